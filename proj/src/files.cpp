#include "diskmc/files.hpp"

#include <algorithm>

#include "diskmc/compress.hpp"

namespace diskmc {

namespace {

// An absent file reads as an empty stream (fresh partitions have no files yet).
class EmptySource final : public ByteSource {
public:
    size_t read(void*, size_t) override { return 0; }
    uint64_t logical_bytes() const override { return 0; }
};

} // namespace

const char* file_kind_name(FileKind k) {
    switch (k) {
    case FileKind::Matrix: return "matrix";
    case FileKind::States: return "states";
    case FileKind::Queue: return "queue";
    case FileKind::Updates: return "updates";
    case FileKind::Values: return "values";
    }
    return "?";
}

Workdir::Workdir(std::filesystem::path dir, bool compress)
    : dir_(std::move(dir)), compress_(compress) {}

std::filesystem::path Workdir::path(FileKind k, uint32_t partition) const {
    std::string name = "p" + std::to_string(partition) + "." + file_kind_name(k);
    if (compress_) name += ".z";
    return dir_ / name;
}

std::filesystem::path Workdir::on_disk(FileKind k, uint32_t partition) const {
    std::string base = "p" + std::to_string(partition) + "." + file_kind_name(k);
    auto plain = dir_ / base;
    if (std::filesystem::exists(plain)) return plain;
    auto z = dir_ / (base + ".z");
    if (std::filesystem::exists(z)) return z;
    return plain;
}

bool Workdir::exists(FileKind k, uint32_t partition) const {
    std::string base = "p" + std::to_string(partition) + "." + file_kind_name(k);
    return std::filesystem::exists(dir_ / base) ||
           std::filesystem::exists(dir_ / (base + ".z"));
}

std::unique_ptr<ByteSink> Workdir::sink(FileKind k, uint32_t partition, OpenMode mode) {
    auto p = path(k, partition);
    if (compress_) return std::make_unique<FramedSink>(p, mode, stats(k));
    return std::make_unique<FileSink>(p, mode, stats(k));
}

std::unique_ptr<ByteSource> Workdir::source(FileKind k, uint32_t partition) {
    auto p = on_disk(k, partition);
    if (!std::filesystem::exists(p)) return std::make_unique<EmptySource>();
    if (p.extension() == ".z") return std::make_unique<FramedSource>(p, stats(k));
    return std::make_unique<FileSource>(p, stats(k));
}

std::unique_ptr<ByteSink> Workdir::tmp_sink(FileKind k, uint32_t partition) {
    auto p = path(k, partition);
    p += ".tmp";
    if (compress_) return std::make_unique<FramedSink>(p, OpenMode::Truncate, stats(k));
    return std::make_unique<FileSink>(p, OpenMode::Truncate, stats(k));
}

void Workdir::commit_tmp(FileKind k, uint32_t partition) {
    auto target = path(k, partition);
    auto tmp = target;
    tmp += ".tmp";
    replace_file(tmp, target);
}

bool Workdir::rename_to_old(FileKind k, uint32_t partition) {
    auto p = on_disk(k, partition);
    if (!std::filesystem::exists(p)) return false;
    auto old = p;
    old += ".old";
    replace_file(p, old);
    return true;
}

std::unique_ptr<ByteSource> Workdir::old_source(FileKind k, uint32_t partition) {
    std::string base = "p" + std::to_string(partition) + "." + file_kind_name(k);
    auto plain_old = dir_ / (base + ".old");
    auto z_old = dir_ / (base + ".z.old");
    if (std::filesystem::exists(plain_old))
        return std::make_unique<FileSource>(plain_old, stats(k));
    if (std::filesystem::exists(z_old))
        return std::make_unique<FramedSource>(z_old, stats(k));
    return std::make_unique<EmptySource>();
}

void Workdir::remove_old(FileKind k, uint32_t partition) {
    auto plain = dir_ / ("p" + std::to_string(partition) + "." +
                         std::string(file_kind_name(k)) + ".old");
    auto z = dir_ / ("p" + std::to_string(partition) + "." + std::string(file_kind_name(k)) +
                     ".z.old");
    std::filesystem::remove(plain);
    std::filesystem::remove(z);
}

void Workdir::remove(FileKind k, uint32_t partition) {
    std::string base = "p" + std::to_string(partition) + "." + file_kind_name(k);
    std::filesystem::remove(dir_ / base);
    std::filesystem::remove(dir_ / (base + ".z"));
}

uint64_t Workdir::disk_bytes(FileKind k, uint32_t partition) const {
    auto p = on_disk(k, partition);
    std::error_code ec;
    auto n = std::filesystem::file_size(p, ec);
    return ec ? 0 : static_cast<uint64_t>(n);
}

IoStats Workdir::total_stats() const {
    IoStats total = meta_stats_;
    for (const auto& s : kind_stats_) {
        total.bytes_read += s.bytes_read;
        total.bytes_written += s.bytes_written;
        total.files_opened += s.files_opened;
        total.backward_seeks += s.backward_seeks;
    }
    return total;
}

StateWriter::StateWriter(std::unique_ptr<ByteSink> sink, size_t width)
    : sink_(std::move(sink)), width_(width), buf_(width * 4) {}

void StateWriter::append(std::span<const int32_t> s) {
    for (size_t k = 0; k < width_; ++k) store_le_i32(buf_.data() + 4 * k, s[k]);
    sink_->write(buf_.data(), buf_.size());
    ++count_;
}

void StateWriter::close() { sink_->close(); }

StateReader::StateReader(std::unique_ptr<ByteSource> source, size_t width)
    : source_(std::move(source)), width_(width), buf_(width * 4) {}

bool StateReader::next(std::vector<int32_t>& out) {
    size_t got = source_->read(buf_.data(), buf_.size());
    if (got == 0) return false;
    if (got != buf_.size())
        throw FormatError("state file length is not a multiple of the state width");
    out.resize(width_);
    for (size_t k = 0; k < width_; ++k) out[k] = load_le_i32(buf_.data() + 4 * k);
    return true;
}

std::vector<uint32_t> read_all_u32(ByteSource& src, const char* context) {
    std::vector<uint32_t> out;
    unsigned char b[4];
    while (true) {
        size_t got = src.read(b, 4);
        if (got == 0) break;
        if (got != 4)
            throw FormatError(std::string("length mismatch in ") + context +
                              " (not a multiple of 4 bytes)");
        out.push_back(load_le_u32(b));
    }
    return out;
}

std::vector<double> read_all_f64(ByteSource& src, const char* context) {
    std::vector<double> out;
    unsigned char b[8];
    while (true) {
        size_t got = src.read(b, 8);
        if (got == 0) break;
        if (got != 8)
            throw FormatError(std::string("length mismatch in ") + context +
                              " (not a multiple of 8 bytes)");
        out.push_back(load_le_f64(b));
    }
    return out;
}

uint64_t WorkdirMeta::states_total() const {
    uint64_t total = 0;
    for (const auto& p : partitions) total += p.state_count;
    return total;
}

uint32_t WorkdirMeta::n_max() const {
    uint32_t m = 0;
    for (const auto& p : partitions) m = std::max(m, p.state_count);
    return m;
}

uint32_t WorkdirMeta::s_max() const {
    uint32_t m = 0;
    for (const auto& p : partitions) m = std::max(m, static_cast<uint32_t>(p.successors.size()));
    return m;
}

void write_meta(Workdir& wd, const WorkdirMeta& meta) {
    FileSink sink(wd.meta_path(), OpenMode::Truncate, wd.meta_stats());
    unsigned char b[4];
    auto put = [&](uint32_t v) {
        store_le_u32(b, v);
        sink.write(b, 4);
    };
    put(meta.count());
    for (const auto& p : meta.partitions) {
        put(p.state_count);
        put(p.qlen);
        put(static_cast<uint32_t>(p.successors.size()));
        for (uint32_t s : p.successors) put(s);
    }
    sink.close();
}

WorkdirMeta read_meta(Workdir& wd) {
    FileSource src(wd.meta_path(), wd.meta_stats());
    auto get = [&](const char* what) {
        unsigned char b[4];
        src.read_exact(b, 4, what);
        return load_le_u32(b);
    };
    WorkdirMeta meta;
    uint32_t count = get("partition count");
    meta.partitions.resize(count);
    for (auto& p : meta.partitions) {
        p.state_count = get("state count");
        p.qlen = get("queue counter");
        uint32_t ns = get("successor count");
        p.successors.resize(ns);
        for (auto& s : p.successors) s = get("successor id");
    }
    unsigned char extra;
    if (src.read(&extra, 1) != 0) throw FormatError("trailing bytes in meta file");
    return meta;
}

} // namespace diskmc
