#pragma once

#include <vector>

#include "diskmc/io.hpp"

namespace diskmc {

// Compressed files are framed so they can be written and read in one pass
// and appended to across sessions:
//
//   file  := codec-id (1 byte) frame*
//   frame := compressed_len (u32 LE) raw_len (u32 LE) payload
//
// raw_len is at most kRawFrameSize; the final frame of a session may be
// shorter. Codec 0 stores payloads verbatim, codec 1 is the default block
// codec (zlib deflate).
constexpr size_t kRawFrameSize = 256 * 1024;
constexpr uint8_t kCodecNone = 0;
constexpr uint8_t kCodecDefault = 1;

class FramedSink final : public ByteSink {
public:
    // Append mode continues an existing framed file (codec byte only written
    // when the file is empty or fresh).
    FramedSink(const std::filesystem::path& path, OpenMode mode, IoStats& stats,
               uint8_t codec = kCodecDefault);
    ~FramedSink() override;

    void write(const void* data, size_t n) override;
    uint64_t logical_bytes() const override { return logical_; }
    void close() override;

private:
    void flush_frame();

    RawFile file_;
    uint8_t codec_;
    uint64_t logical_ = 0;
    std::vector<unsigned char> raw_;
    std::vector<unsigned char> scratch_;
    bool closed_ = false;
};

class FramedSource final : public ByteSource {
public:
    FramedSource(const std::filesystem::path& path, IoStats& stats);

    size_t read(void* data, size_t n) override;
    uint64_t logical_bytes() const override { return logical_; }

private:
    bool refill();

    RawFile file_;
    uint8_t codec_ = kCodecDefault;
    uint64_t logical_ = 0;
    std::vector<unsigned char> raw_;
    std::vector<unsigned char> scratch_;
    size_t pos_ = 0;
    bool eof_ = false;
};

} // namespace diskmc
