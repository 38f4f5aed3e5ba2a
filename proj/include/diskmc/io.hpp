#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>

#include "diskmc/diagnostics.hpp"

namespace diskmc {

// Little-endian fixed-width encoding, independent of host byte order.
inline void store_le_u32(unsigned char* p, uint32_t v) {
    p[0] = static_cast<unsigned char>(v);
    p[1] = static_cast<unsigned char>(v >> 8);
    p[2] = static_cast<unsigned char>(v >> 16);
    p[3] = static_cast<unsigned char>(v >> 24);
}
inline uint32_t load_le_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
           static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}
inline void store_le_i32(unsigned char* p, int32_t v) {
    store_le_u32(p, static_cast<uint32_t>(v));
}
inline int32_t load_le_i32(const unsigned char* p) {
    return static_cast<int32_t>(load_le_u32(p));
}
inline void store_le_f64(unsigned char* p, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int k = 0; k < 8; ++k) p[k] = static_cast<unsigned char>(bits >> (8 * k));
}
inline double load_le_f64(const unsigned char* p) {
    uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<uint64_t>(p[k]) << (8 * k);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

// Counters for one run. Every file the engine touches goes through this;
// backward_seeks stays 0 as long as the sequential-access contract holds.
struct IoStats {
    uint64_t bytes_read = 0;
    uint64_t bytes_written = 0;
    uint64_t files_opened = 0;
    uint64_t backward_seeks = 0;
};

enum class OpenMode : uint8_t { Read, Truncate, Append };

// Buffered file handle that only moves forward. seek() exists for
// completeness of the contract: a backward target is counted and rejected.
class RawFile {
public:
    RawFile(const std::filesystem::path& path, OpenMode mode, IoStats& stats);
    ~RawFile();
    RawFile(const RawFile&) = delete;
    RawFile& operator=(const RawFile&) = delete;

    size_t read(void* buf, size_t n);
    void write(const void* buf, size_t n);
    void seek(uint64_t target);
    uint64_t position() const { return pos_; }
    void flush();
    void close();
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::FILE* f_ = nullptr;
    IoStats* stats_;
    uint64_t pos_ = 0;
    std::unique_ptr<char[]> buffer_;
};

// Abstract byte streams; implementations are the plain file and the framed
// compression codec. All higher layers (record files, matrix streams) are
// written against these.
class ByteSink {
public:
    virtual ~ByteSink() = default;
    virtual void write(const void* data, size_t n) = 0;
    // Total bytes accepted (before any compression).
    virtual uint64_t logical_bytes() const = 0;
    virtual void close() = 0;
};

class ByteSource {
public:
    virtual ~ByteSource() = default;
    // Returns bytes produced; short count means end of stream.
    virtual size_t read(void* data, size_t n) = 0;
    virtual uint64_t logical_bytes() const = 0;

    // Convenience: read exactly n or throw FormatError(context).
    void read_exact(void* data, size_t n, const char* context);
};

class FileSink final : public ByteSink {
public:
    FileSink(const std::filesystem::path& path, OpenMode mode, IoStats& stats)
        : file_(path, mode, stats) {}
    void write(const void* data, size_t n) override {
        file_.write(data, n);
        logical_ += n;
    }
    uint64_t logical_bytes() const override { return logical_; }
    void close() override { file_.close(); }

private:
    RawFile file_;
    uint64_t logical_ = 0;
};

class FileSource final : public ByteSource {
public:
    FileSource(const std::filesystem::path& path, IoStats& stats)
        : file_(path, OpenMode::Read, stats) {}
    size_t read(void* data, size_t n) override {
        size_t got = file_.read(data, n);
        logical_ += got;
        return got;
    }
    uint64_t logical_bytes() const override { return logical_; }

private:
    RawFile file_;
    uint64_t logical_ = 0;
};

// Replace `target` with `replacement` in one atomic rename.
void replace_file(const std::filesystem::path& replacement, const std::filesystem::path& target);

} // namespace diskmc
