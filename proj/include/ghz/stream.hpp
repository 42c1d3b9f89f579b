#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace ghz {

/// Reliable ordered byte stream; the wire protocol runs over either a TCP
/// socket or an in-memory pipe pair.
class ByteStream {
  public:
    virtual ~ByteStream() = default;

    /// Reads up to buf_len bytes, blocking until data or end-of-stream.
    /// Returns 0 at end-of-stream. Throws std::runtime_error on transport error.
    virtual std::size_t read_some(char* buf, std::size_t buf_len) = 0;

    /// Writes all bytes or throws std::runtime_error.
    virtual void write_all(std::string_view bytes) = 0;

    /// Closes the write side; the peer's reads drain then return 0.
    virtual void close() = 0;
};

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class TcpStream final : public ByteStream {
  public:
    explicit TcpStream(int fd) : fd_(fd) {}
    ~TcpStream() override;
    TcpStream(const TcpStream&) = delete;
    TcpStream& operator=(const TcpStream&) = delete;

    std::size_t read_some(char* buf, std::size_t buf_len) override;
    void write_all(std::string_view bytes) override;
    void close() override;

    /// Applies a receive timeout; a read past it throws TransportError.
    void set_read_timeout(std::chrono::milliseconds timeout);

  private:
    int fd_;
};

class TcpListener {
  public:
    /// Binds and listens; addr is "host:port". Throws TransportError.
    explicit TcpListener(const std::string& addr);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    /// Accepts one connection, or nullptr after the timeout expires.
    std::unique_ptr<TcpStream> accept(std::chrono::milliseconds timeout);

    int port() const { return port_; }

  private:
    int fd_;
    int port_;
};

/// Connects to "host:port". Throws TransportError on failure.
std::unique_ptr<TcpStream> tcp_connect(const std::string& addr);

/// Two connected in-memory streams: bytes written on one end are read from
/// the other. Both ends are thread-safe for one reader and one writer.
std::pair<std::shared_ptr<ByteStream>, std::shared_ptr<ByteStream>> make_duplex_pair();

}  // namespace ghz
