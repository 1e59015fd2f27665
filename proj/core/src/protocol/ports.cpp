#include "salmon/protocol/ports.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <stdexcept>

#include "salmon/protocol/codec.hpp"

namespace salmon::proto {

void send_telegram(OutputPort& out, const Telegram& telegram) {
    out.send(encode(telegram));
}

namespace {

struct LoopbackQueue {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<std::vector<std::uint8_t>> items;
    bool closed = false;

    void push(std::span<const std::uint8_t> datagram) {
        {
            std::lock_guard lock(mutex);
            if (closed) return;
            items.emplace_back(datagram.begin(), datagram.end());
        }
        ready.notify_one();
    }

    std::optional<std::vector<std::uint8_t>> pop(std::chrono::milliseconds timeout) {
        std::unique_lock lock(mutex);
        if (!ready.wait_for(lock, timeout, [&] { return !items.empty() || closed; })) {
            return std::nullopt;
        }
        if (items.empty()) return std::nullopt;
        auto out = std::move(items.front());
        items.pop_front();
        return out;
    }

    void close() {
        {
            std::lock_guard lock(mutex);
            closed = true;
        }
        ready.notify_all();
    }
};

class LoopbackPort : public Port {
public:
    LoopbackPort(std::shared_ptr<LoopbackQueue> rx, std::shared_ptr<LoopbackQueue> tx)
        : rx_(std::move(rx)), tx_(std::move(tx)) {}

    ~LoopbackPort() override {
        rx_->close();
        tx_->close();
    }

    void send(std::span<const std::uint8_t> datagram) override {
        if (datagram.size() > kMaxDatagram) {
            throw std::runtime_error("datagram exceeds UDP size bound");
        }
        tx_->push(datagram);
    }

    std::optional<std::vector<std::uint8_t>> receive(std::chrono::milliseconds timeout) override {
        return rx_->pop(timeout);
    }

private:
    std::shared_ptr<LoopbackQueue> rx_;
    std::shared_ptr<LoopbackQueue> tx_;
};

sockaddr_in parse_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) {
        throw std::runtime_error("address '" + addr + "' must be host:port");
    }
    const std::string host = addr.substr(0, colon);
    const std::string port_text = addr.substr(colon + 1);
    int port = 0;
    try {
        port = std::stoi(port_text);
    } catch (const std::exception&) {
        throw std::runtime_error("bad port in '" + addr + "'");
    }
    if (port < 0 || port > 65535) throw std::runtime_error("port out of range in '" + addr + "'");

    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
        throw std::runtime_error("cannot parse IPv4 host in '" + addr + "'");
    }
    return sa;
}

class UdpPort : public Port {
public:
    UdpPort(const std::string& bind_addr, const std::string& peer_addr) {
        peer_ = parse_addr(peer_addr);
        const sockaddr_in local = parse_addr(bind_addr);

        fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
        if (fd_ < 0) throw std::runtime_error("socket(): " + std::string(std::strerror(errno)));
        int reuse = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &reuse, sizeof reuse);
        if (::bind(fd_, reinterpret_cast<const sockaddr*>(&local), sizeof local) != 0) {
            const int err = errno;
            ::close(fd_);
            fd_ = -1;
            throw std::runtime_error("bind(" + bind_addr + "): " + std::strerror(err));
        }
    }

    ~UdpPort() override {
        if (fd_ >= 0) ::close(fd_);
    }

    void send(std::span<const std::uint8_t> datagram) override {
        if (datagram.size() > kMaxDatagram) {
            throw std::runtime_error("datagram exceeds UDP size bound");
        }
        const ssize_t n = ::sendto(fd_, datagram.data(), datagram.size(), 0,
                                   reinterpret_cast<const sockaddr*>(&peer_), sizeof peer_);
        if (n < 0 || static_cast<std::size_t>(n) != datagram.size()) {
            throw std::runtime_error("sendto: " + std::string(std::strerror(errno)));
        }
    }

    std::optional<std::vector<std::uint8_t>> receive(std::chrono::milliseconds timeout) override {
        timeval tv{};
        tv.tv_sec = static_cast<long>(timeout.count() / 1000);
        tv.tv_usec = static_cast<long>((timeout.count() % 1000) * 1000);
        ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);

        std::vector<std::uint8_t> buf(kMaxDatagram);
        const ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(),
                                     timeout.count() == 0 ? MSG_DONTWAIT : 0, nullptr, nullptr);
        if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) return std::nullopt;
            throw std::runtime_error("recvfrom: " + std::string(std::strerror(errno)));
        }
        buf.resize(static_cast<std::size_t>(n));
        return buf;
    }

private:
    int fd_ = -1;
    sockaddr_in peer_{};
};

}  // namespace

std::pair<std::shared_ptr<Port>, std::shared_ptr<Port>> make_loopback_pair() {
    auto a_to_b = std::make_shared<LoopbackQueue>();
    auto b_to_a = std::make_shared<LoopbackQueue>();
    return {std::make_shared<LoopbackPort>(b_to_a, a_to_b),
            std::make_shared<LoopbackPort>(a_to_b, b_to_a)};
}

std::shared_ptr<Port> open_udp_port(const std::string& bind_addr, const std::string& peer_addr) {
    return std::make_shared<UdpPort>(bind_addr, peer_addr);
}

}  // namespace salmon::proto
