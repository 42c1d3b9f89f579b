#pragma once

#include <optional>
#include <string>

#include "ghz/stream.hpp"
#include "ghz/wire.hpp"

namespace ghz {

/// Blocking line reader over a byte stream; owns the connection's frame buffer.
class LineReader {
  public:
    explicit LineReader(ByteStream& stream) : stream_(&stream) {}

    /// Next complete frame (without LF), or nullopt at end-of-stream.
    /// Throws FrameError if the stream ends mid-line.
    std::optional<std::string> next_line();

  private:
    ByteStream* stream_;
    FrameReader frames_;
};

/// Encodes and writes one message; returns the encoded frame (with LF).
std::string send_message(ByteStream& stream, const Message& m);

}  // namespace ghz
