#include "ghz/stream.hpp"

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <fmt/format.h>
#include <mutex>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace ghz {
namespace {

[[noreturn]] void throw_errno(const std::string& what) {
    throw TransportError(fmt::format("{}: {}", what, std::strerror(errno)));
}

std::pair<std::string, int> split_addr(const std::string& addr) {
    auto colon = addr.rfind(':');
    if (colon == std::string::npos) {
        throw TransportError(fmt::format("address \"{}\" is not host:port", addr));
    }
    std::string host = addr.substr(0, colon);
    int port = std::stoi(addr.substr(colon + 1));
    if (port < 0 || port > 65535) {
        throw TransportError(fmt::format("port out of range in \"{}\"", addr));
    }
    return {host.empty() ? "0.0.0.0" : host, port};
}

}  // namespace

TcpStream::~TcpStream() {
    if (fd_ >= 0) ::close(fd_);
}

std::size_t TcpStream::read_some(char* buf, std::size_t buf_len) {
    for (;;) {
        ssize_t n = ::recv(fd_, buf, buf_len, 0);
        if (n >= 0) return static_cast<std::size_t>(n);
        if (errno == EINTR) continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK) {
            throw TransportError("read timed out");
        }
        throw_errno("recv");
    }
}

void TcpStream::write_all(std::string_view bytes) {
    const char* p = bytes.data();
    std::size_t left = bytes.size();
    while (left > 0) {
        ssize_t n = ::send(fd_, p, left, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("send");
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
}

void TcpStream::close() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

void TcpStream::set_read_timeout(std::chrono::milliseconds timeout) {
    timeval tv{};
    tv.tv_sec = timeout.count() / 1000;
    tv.tv_usec = (timeout.count() % 1000) * 1000;
    if (::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv)) != 0) {
        throw_errno("setsockopt(SO_RCVTIMEO)");
    }
}

TcpListener::TcpListener(const std::string& addr) : fd_(-1), port_(0) {
    auto [host, port] = split_addr(addr);
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw_errno("socket");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
        ::close(fd_);
        throw TransportError(fmt::format("bad listen address \"{}\"", host));
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
        int saved = errno;
        ::close(fd_);
        errno = saved;
        throw_errno("bind");
    }
    if (::listen(fd_, 8) != 0) {
        int saved = errno;
        ::close(fd_);
        errno = saved;
        throw_errno("listen");
    }
    socklen_t len = sizeof(sa);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&sa), &len);
    port_ = ntohs(sa.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpStream> TcpListener::accept(std::chrono::milliseconds timeout) {
    pollfd pfd{fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc < 0) throw_errno("poll");
    if (rc == 0) return nullptr;
    int cfd = ::accept(fd_, nullptr, nullptr);
    if (cfd < 0) throw_errno("accept");
    return std::make_unique<TcpStream>(cfd);
}

std::unique_ptr<TcpStream> tcp_connect(const std::string& addr) {
    auto [host, port] = split_addr(addr);
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res); rc != 0) {
        throw TransportError(fmt::format("resolve \"{}\": {}", host, gai_strerror(rc)));
    }
    sockaddr_in sa = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
    ::freeaddrinfo(res);
    sa.sin_port = htons(static_cast<std::uint16_t>(port));
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw_errno("socket");
    if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
        int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno(fmt::format("connect to {}", addr));
    }
    return std::make_unique<TcpStream>(fd);
}

namespace {

/// One direction of an in-memory pipe.
struct PipeBuffer {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<char> data;
    bool closed = false;

    void write(std::string_view bytes) {
        {
            std::lock_guard lock(mu);
            if (closed) throw TransportError("write on closed pipe");
            data.insert(data.end(), bytes.begin(), bytes.end());
        }
        cv.notify_all();
    }

    std::size_t read(char* buf, std::size_t buf_len) {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return !data.empty() || closed; });
        std::size_t n = std::min(buf_len, data.size());
        std::copy_n(data.begin(), n, buf);
        data.erase(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n));
        return n;
    }

    void close() {
        {
            std::lock_guard lock(mu);
            closed = true;
        }
        cv.notify_all();
    }
};

class PipeEnd final : public ByteStream {
  public:
    PipeEnd(std::shared_ptr<PipeBuffer> incoming, std::shared_ptr<PipeBuffer> outgoing)
        : incoming_(std::move(incoming)), outgoing_(std::move(outgoing)) {}

    ~PipeEnd() override { outgoing_->close(); }

    std::size_t read_some(char* buf, std::size_t buf_len) override {
        return incoming_->read(buf, buf_len);
    }

    void write_all(std::string_view bytes) override { outgoing_->write(bytes); }

    void close() override { outgoing_->close(); }

  private:
    std::shared_ptr<PipeBuffer> incoming_;
    std::shared_ptr<PipeBuffer> outgoing_;
};

}  // namespace

std::pair<std::shared_ptr<ByteStream>, std::shared_ptr<ByteStream>> make_duplex_pair() {
    auto a_to_b = std::make_shared<PipeBuffer>();
    auto b_to_a = std::make_shared<PipeBuffer>();
    return {std::make_shared<PipeEnd>(b_to_a, a_to_b), std::make_shared<PipeEnd>(a_to_b, b_to_a)};
}

}  // namespace ghz
