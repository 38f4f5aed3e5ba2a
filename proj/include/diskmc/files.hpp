#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "diskmc/io.hpp"

namespace diskmc {

// The per-partition file kinds. Partition i owns p<i>.matrix, p<i>.states,
// p<i>.queue, p<i>.updates and p<i>.values; a workdir additionally holds one
// `meta` table. Compressed variants carry a ".z" suffix.
enum class FileKind : uint8_t { Matrix, States, Queue, Updates, Values };
constexpr size_t kFileKindCount = 5;

const char* file_kind_name(FileKind k);

// One analysis/exploration working directory. All file access inside it runs
// through this class so byte counters and the sequential-access contract are
// enforced uniformly. Readers auto-detect compression; writers follow the
// configured flag.
class Workdir {
public:
    Workdir(std::filesystem::path dir, bool compress);

    const std::filesystem::path& dir() const { return dir_; }
    bool compress() const { return compress_; }

    std::filesystem::path path(FileKind k, uint32_t partition) const;
    std::filesystem::path meta_path() const { return dir_ / "meta"; }

    // Present on disk in either plain or compressed form?
    bool exists(FileKind k, uint32_t partition) const;

    std::unique_ptr<ByteSink> sink(FileKind k, uint32_t partition, OpenMode mode);
    // Reads a missing file as an empty stream.
    std::unique_ptr<ByteSource> source(FileKind k, uint32_t partition);

    // Sidecar rewrite support. tmp_sink writes "<file>.tmp"; commit_tmp
    // renames it over the real file. rename_to_old moves the current file to
    // "<file>.old" (no-op if absent) and returns whether it existed;
    // old_source reads it, remove_old deletes it.
    std::unique_ptr<ByteSink> tmp_sink(FileKind k, uint32_t partition);
    void commit_tmp(FileKind k, uint32_t partition);
    bool rename_to_old(FileKind k, uint32_t partition);
    std::unique_ptr<ByteSource> old_source(FileKind k, uint32_t partition);
    void remove_old(FileKind k, uint32_t partition);

    void remove(FileKind k, uint32_t partition);
    uint64_t disk_bytes(FileKind k, uint32_t partition) const;

    IoStats& stats(FileKind k) { return kind_stats_[static_cast<size_t>(k)]; }
    IoStats& meta_stats() { return meta_stats_; }
    IoStats total_stats() const;

private:
    std::filesystem::path on_disk(FileKind k, uint32_t partition) const;

    std::filesystem::path dir_;
    bool compress_;
    std::array<IoStats, kFileKindCount> kind_stats_{};
    IoStats meta_stats_{};
};

// Fixed-width record layers. Explicit states are width * 4 bytes (i32 LE per
// variable, declaration order); updates entries are u32 LE; values are f64 LE.

class StateWriter {
public:
    StateWriter(std::unique_ptr<ByteSink> sink, size_t width);
    void append(std::span<const int32_t> s);
    uint64_t count() const { return count_; }
    void close();

private:
    std::unique_ptr<ByteSink> sink_;
    size_t width_;
    uint64_t count_ = 0;
    std::vector<unsigned char> buf_;
};

class StateReader {
public:
    StateReader(std::unique_ptr<ByteSource> source, size_t width);
    // False at clean end of stream; FormatError on a partial record.
    bool next(std::vector<int32_t>& out);

private:
    std::unique_ptr<ByteSource> source_;
    size_t width_;
    std::vector<unsigned char> buf_;
};

class U32Writer {
public:
    explicit U32Writer(std::unique_ptr<ByteSink> sink) : sink_(std::move(sink)) {}
    void append(uint32_t v) {
        unsigned char b[4];
        store_le_u32(b, v);
        sink_->write(b, 4);
        ++count_;
    }
    uint64_t count() const { return count_; }
    void close() { sink_->close(); }

private:
    std::unique_ptr<ByteSink> sink_;
    uint64_t count_ = 0;
};

class F64Writer {
public:
    explicit F64Writer(std::unique_ptr<ByteSink> sink) : sink_(std::move(sink)) {}
    void append(double v) {
        unsigned char b[8];
        store_le_f64(b, v);
        sink_->write(b, 8);
        ++count_;
    }
    uint64_t count() const { return count_; }
    void close() { sink_->close(); }

private:
    std::unique_ptr<ByteSink> sink_;
    uint64_t count_ = 0;
};

std::vector<uint32_t> read_all_u32(ByteSource& src, const char* context);
std::vector<double> read_all_f64(ByteSource& src, const char* context);

// Workdir metadata: partition count, then per partition its state count, its
// queue-append counter and its successor set. Binary u32 LE throughout:
//   count, { state_count, qlen, successor_count, successor_id* }*
struct PartitionMeta {
    uint32_t state_count = 0;
    uint32_t qlen = 0;
    std::vector<uint32_t> successors; // ascending partition ids
};

struct WorkdirMeta {
    std::vector<PartitionMeta> partitions; // index 0 = partition 1

    uint32_t count() const { return static_cast<uint32_t>(partitions.size()); }
    uint64_t states_total() const;
    uint32_t n_max() const;
    uint32_t s_max() const;
};

void write_meta(Workdir& wd, const WorkdirMeta& meta);
WorkdirMeta read_meta(Workdir& wd);

} // namespace diskmc
