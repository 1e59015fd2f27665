#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "salmon/protocol/telegrams.hpp"

namespace salmon::proto {

// Transport abstraction between the stack programs. Implementations carry
// whole datagrams (one telegram each); swapping the implementation must not
// change program behavior, which is what the staged test phases verify.

class InputPort {
public:
    virtual ~InputPort() = default;

    /// Next datagram, waiting up to timeout; nullopt on timeout or closed port.
    virtual std::optional<std::vector<std::uint8_t>> receive(std::chrono::milliseconds timeout) = 0;

    /// Non-blocking variant.
    std::optional<std::vector<std::uint8_t>> poll() { return receive(std::chrono::milliseconds(0)); }
};

class OutputPort {
public:
    virtual ~OutputPort() = default;

    /// Sends one datagram, whole or not at all. Throws std::runtime_error on
    /// transport failure or datagrams beyond the UDP size bound.
    virtual void send(std::span<const std::uint8_t> datagram) = 0;
};

class Port : public InputPort, public OutputPort {};

/// Encode + send in one step; throws on invariant violations (from encode)
/// and transport errors.
void send_telegram(OutputPort& out, const Telegram& telegram);

/// In-process FIFO pair: a.send() -> b.receive() and vice versa, order
/// preserving, thread safe.
std::pair<std::shared_ptr<Port>, std::shared_ptr<Port>> make_loopback_pair();

/// UDP datagram port: binds bind_addr, sends to peer_addr, receives from any
/// source. Addresses are "host:port". Throws std::runtime_error on resolve
/// or bind failure.
std::shared_ptr<Port> open_udp_port(const std::string& bind_addr, const std::string& peer_addr);

}  // namespace salmon::proto
