#include "ghz/message_io.hpp"

namespace ghz {

std::optional<std::string> LineReader::next_line() {
    for (;;) {
        if (auto line = frames_.next_line()) return line;
        char buf[4096];
        std::size_t n = stream_->read_some(buf, sizeof(buf));
        if (n == 0) {
            frames_.finish();
            return std::nullopt;
        }
        frames_.feed(std::string_view(buf, n));
    }
}

std::string send_message(ByteStream& stream, const Message& m) {
    std::string frame = encode_message(m);
    stream.write_all(frame);
    return frame;
}

}  // namespace ghz
