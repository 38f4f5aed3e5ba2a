#include "diskmc/io.hpp"

namespace diskmc {

namespace {
constexpr size_t kBufferSize = 256 * 1024;
} // namespace

RawFile::RawFile(const std::filesystem::path& path, OpenMode mode, IoStats& stats)
    : path_(path), stats_(&stats) {
    const char* m = mode == OpenMode::Read ? "rb" : mode == OpenMode::Truncate ? "wb" : "ab";
    f_ = std::fopen(path.c_str(), m);
    if (!f_) throw IoError("cannot open " + path.string());
    ++stats_->files_opened;
    buffer_ = std::make_unique<char[]>(kBufferSize);
    std::setvbuf(f_, buffer_.get(), _IOFBF, kBufferSize);
    if (mode == OpenMode::Append) {
        // "ab" positions at end; record where we are so the monotone-position
        // bookkeeping starts from the true offset.
        std::error_code ec;
        auto size = std::filesystem::file_size(path, ec);
        pos_ = ec ? 0 : static_cast<uint64_t>(size);
    }
}

RawFile::~RawFile() {
    if (f_) std::fclose(f_);
}

size_t RawFile::read(void* buf, size_t n) {
    size_t got = std::fread(buf, 1, n, f_);
    if (got < n && std::ferror(f_)) throw IoError("read failure on " + path_.string());
    pos_ += got;
    stats_->bytes_read += got;
    return got;
}

void RawFile::write(const void* buf, size_t n) {
    size_t put = std::fwrite(buf, 1, n, f_);
    if (put != n) throw IoError("write failure on " + path_.string());
    pos_ += put;
    stats_->bytes_written += put;
}

void RawFile::seek(uint64_t target) {
    if (target < pos_) {
        ++stats_->backward_seeks;
        throw IoError("backward seek rejected on " + path_.string() + " (" +
                      std::to_string(pos_) + " -> " + std::to_string(target) + ")");
    }
    if (target == pos_) return;
    if (std::fseek(f_, static_cast<long>(target), SEEK_SET) != 0)
        throw IoError("seek failure on " + path_.string());
    pos_ = target;
}

void RawFile::flush() {
    if (f_ && std::fflush(f_) != 0) throw IoError("flush failure on " + path_.string());
}

void RawFile::close() {
    if (!f_) return;
    int rc = std::fclose(f_);
    f_ = nullptr;
    if (rc != 0) throw IoError("close failure on " + path_.string());
}

void ByteSource::read_exact(void* data, size_t n, const char* context) {
    if (read(data, n) != n)
        throw FormatError(std::string("truncated input while reading ") + context);
}

void replace_file(const std::filesystem::path& replacement,
                  const std::filesystem::path& target) {
    std::error_code ec;
    std::filesystem::rename(replacement, target, ec);
    if (ec)
        throw IoError("cannot rename " + replacement.string() + " to " + target.string() +
                      ": " + ec.message());
}

} // namespace diskmc
