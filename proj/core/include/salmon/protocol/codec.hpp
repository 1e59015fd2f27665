#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "salmon/protocol/telegrams.hpp"

namespace salmon::proto {

inline constexpr std::size_t kHeaderSize = 4;
inline constexpr std::size_t kMaxDatagram = 65507;  // UDP payload bound

enum class DecodeError {
    Truncated,        // datagram shorter than the header
    UnknownId,        // header id is not a defined telegram
    LengthMismatch,   // header length disagrees with the payload
    TrailingBytes,    // datagram longer than header + payload
    InvalidUtf8,      // LlcError message is not valid UTF-8
    FieldOutOfRange,  // decoded field violates its invariant
};

const char* decode_error_name(DecodeError error);

using DecodeResult = std::variant<Telegram, DecodeError>;

/// Encodes one telegram as one datagram: 4-byte little-endian header
/// followed by the fixed-layout payload. Throws std::invalid_argument if a
/// field violates its invariant (e.g. PWM out of range).
std::vector<std::uint8_t> encode(const Telegram& telegram);

/// Total decoder: returns the telegram or a typed error, never throws on
/// arbitrary input.
DecodeResult decode(std::span<const std::uint8_t> datagram);

/// True iff bytes form valid UTF-8.
bool is_valid_utf8(std::span<const std::uint8_t> bytes);

}  // namespace salmon::proto
