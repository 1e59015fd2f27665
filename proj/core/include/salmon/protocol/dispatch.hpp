#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>

#include "salmon/protocol/codec.hpp"
#include "salmon/protocol/ports.hpp"

namespace salmon::proto {

/// Decodes datagrams from an InputPort and fans each telegram out to the
/// handler registered for its message id. Malformed datagrams and telegrams
/// without a handler are counted, never fatal.
class Dispatcher {
public:
    using Handler = std::function<void(const Telegram&)>;

    explicit Dispatcher(InputPort& in) : in_(in) {}

    void on(MessageId id, Handler handler) { handlers_[id] = std::move(handler); }

    /// Processes at most one datagram; true if one was consumed.
    bool poll_one(std::chrono::milliseconds timeout) {
        auto datagram = in_.receive(timeout);
        if (!datagram) return false;
        DecodeResult result = decode(*datagram);
        if (const auto* telegram = std::get_if<Telegram>(&result)) {
            const auto it = handlers_.find(message_id(*telegram));
            if (it == handlers_.end()) {
                ++unhandled_;
            } else {
                it->second(*telegram);
            }
        } else {
            ++malformed_;
        }
        return true;
    }

    /// Drains everything currently queued; returns datagrams consumed.
    std::size_t pump(std::chrono::milliseconds first_timeout = std::chrono::milliseconds(0)) {
        std::size_t n = 0;
        if (poll_one(first_timeout)) {
            ++n;
            while (poll_one(std::chrono::milliseconds(0))) ++n;
        }
        return n;
    }

    std::uint64_t malformed_count() const { return malformed_; }
    std::uint64_t unhandled_count() const { return unhandled_; }

private:
    InputPort& in_;
    std::map<MessageId, Handler> handlers_;
    std::uint64_t malformed_ = 0;
    std::uint64_t unhandled_ = 0;
};

}  // namespace salmon::proto
