#include "diskmc/compress.hpp"

#include <zlib.h>

#include <cstring>

namespace diskmc {

FramedSink::FramedSink(const std::filesystem::path& path, OpenMode mode, IoStats& stats,
                       uint8_t codec)
    : file_(path, mode, stats), codec_(codec) {
    if (codec_ != kCodecNone && codec_ != kCodecDefault)
        throw FormatError("unknown compression codec id " + std::to_string(codec_));
    raw_.reserve(kRawFrameSize);
    if (file_.position() == 0) file_.write(&codec_, 1);
}

FramedSink::~FramedSink() {
    try {
        close();
    } catch (...) {
        // Destructor must not throw; close() explicitly to observe errors.
    }
}

void FramedSink::write(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    logical_ += n;
    while (n > 0) {
        size_t take = std::min(n, kRawFrameSize - raw_.size());
        raw_.insert(raw_.end(), p, p + take);
        p += take;
        n -= take;
        if (raw_.size() == kRawFrameSize) flush_frame();
    }
}

void FramedSink::flush_frame() {
    if (raw_.empty()) return;
    const unsigned char* payload = raw_.data();
    uLongf payload_len = static_cast<uLongf>(raw_.size());
    if (codec_ == kCodecDefault) {
        uLongf bound = compressBound(static_cast<uLong>(raw_.size()));
        scratch_.resize(bound);
        payload_len = bound;
        int rc = compress2(scratch_.data(), &payload_len, raw_.data(),
                           static_cast<uLong>(raw_.size()), Z_DEFAULT_COMPRESSION);
        if (rc != Z_OK) throw FormatError("block compression failed (zlib rc " +
                                          std::to_string(rc) + ")");
        payload = scratch_.data();
    }
    unsigned char header[8];
    store_le_u32(header, static_cast<uint32_t>(payload_len));
    store_le_u32(header + 4, static_cast<uint32_t>(raw_.size()));
    file_.write(header, 8);
    file_.write(payload, payload_len);
    raw_.clear();
}

void FramedSink::close() {
    if (closed_) return;
    closed_ = true;
    flush_frame();
    file_.close();
}

FramedSource::FramedSource(const std::filesystem::path& path, IoStats& stats)
    : file_(path, OpenMode::Read, stats) {
    unsigned char id;
    if (file_.read(&id, 1) != 1) {
        eof_ = true; // zero-byte file behaves as an empty stream
        return;
    }
    codec_ = id;
    if (codec_ != kCodecNone && codec_ != kCodecDefault)
        throw FormatError("unknown compression codec id " + std::to_string(id) + " in " +
                          path.string());
}

bool FramedSource::refill() {
    if (eof_) return false;
    unsigned char header[8];
    size_t got = file_.read(header, 8);
    if (got == 0) {
        eof_ = true;
        return false;
    }
    if (got != 8) throw FormatError("truncated frame header in " + file_.path().string());
    uint32_t compressed_len = load_le_u32(header);
    uint32_t raw_len = load_le_u32(header + 4);
    if (raw_len == 0 || raw_len > kRawFrameSize || compressed_len == 0)
        throw FormatError("corrupt frame header in " + file_.path().string());

    scratch_.resize(compressed_len);
    if (file_.read(scratch_.data(), compressed_len) != compressed_len)
        throw FormatError("truncated frame payload in " + file_.path().string());

    raw_.resize(raw_len);
    if (codec_ == kCodecDefault) {
        uLongf out_len = raw_len;
        int rc = uncompress(raw_.data(), &out_len, scratch_.data(), compressed_len);
        if (rc != Z_OK || out_len != raw_len)
            throw FormatError("corrupt frame payload in " + file_.path().string());
    } else {
        if (compressed_len != raw_len)
            throw FormatError("corrupt stored frame in " + file_.path().string());
        std::memcpy(raw_.data(), scratch_.data(), raw_len);
    }
    pos_ = 0;
    return true;
}

size_t FramedSource::read(void* data, size_t n) {
    auto* out = static_cast<unsigned char*>(data);
    size_t produced = 0;
    while (produced < n) {
        if (pos_ == raw_.size() && !refill()) break;
        size_t take = std::min(n - produced, raw_.size() - pos_);
        std::memcpy(out + produced, raw_.data() + pos_, take);
        pos_ += take;
        produced += take;
    }
    logical_ += produced;
    return produced;
}

} // namespace diskmc
