#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>

namespace salmon::proto {

// Wire telegram set exchanged between the control computer (CC), the
// scientific computer (SC) and the measurement computer (MC). Layouts are
// frozen in docs/wire-format.md; every telegram is one UDP datagram with a
// little-endian 4-byte header (message id u16, payload length u16).

enum class MessageId : std::uint16_t {
    NavData = 0x0001,
    LlcCommand = 0x0002,
    LlcSetpoint = 0x0003,
    LlcSetpointsCwolf = 0x0004,
    LlcStatus = 0x0005,
    LlcError = 0x0006,
};

enum class LlcMode : std::uint16_t {
    NoControl = 0,
    Controlled = 1,
    Direct = 2,
};

const char* llc_mode_name(LlcMode mode);

/// Vehicle navigation solution broadcast by the CC at 10 Hz.
struct NavData {
    double timestamp = 0.0;           // [s] simulation epoch
    double latitude = 0.0;            // [deg] WGS84
    double longitude = 0.0;           // [deg]
    double depth = 0.0;               // [m] >= 0
    double roll = 0.0;                // [rad]
    double pitch = 0.0;               // [rad]
    double yaw = 0.0;                 // [rad], in [-pi, pi)
    double speed = 0.0;               // [m/s] body surge
    double height_over_ground = 0.0;  // [m], NaN when the DVL has no lock
    bool gps_fix = false;             // position is GPS-quality (surfaced)
};

/// Switches the LLC between no-control, controlled and direct mode.
struct LlcCommand {
    LlcMode mode = LlcMode::NoControl;
};

/// Heading/depth/speed setpoint for controlled mode.
struct LlcSetpoint {
    double heading = 0.0;  // [rad]
    double depth = 0.0;    // [m] >= 0
    double speed = 0.0;    // [m/s] >= 0
};

inline constexpr std::size_t kMotorCount = 6;

// Motor slot order used throughout the stack.
enum MotorIndex : std::size_t {
    kMainPort = 0,
    kMainStarboard = 1,
    kLateralBow = 2,
    kLateralStern = 3,
    kVerticalBow = 4,
    kVerticalStern = 5,
};

inline constexpr std::int16_t kPwmLimit = 1000;

/// Per-motor PWM commands for direct mode, each in [-1000, 1000].
struct LlcSetpointsCwolf {
    std::array<std::int16_t, kMotorCount> pwm{};
};

struct MotorStatus {
    float rpm = 0.0F;
    bool enabled = false;
};

/// Actual motor state reported by the LLC.
struct LlcStatus {
    std::array<MotorStatus, kMotorCount> motors{};
    LlcMode mode_echo = LlcMode::NoControl;
};

/// Error report from the LLC; message is UTF-8, at most 255 bytes.
struct LlcError {
    std::uint16_t code = 0;
    std::string message;
};

using Telegram =
    std::variant<NavData, LlcCommand, LlcSetpoint, LlcSetpointsCwolf, LlcStatus, LlcError>;

MessageId message_id(const Telegram& telegram);
const char* message_name(MessageId id);

/// Field-wise equality that treats NaN == NaN (routes and logs carry NaN
/// height_over_ground, which must survive a round trip).
bool equivalent(const Telegram& a, const Telegram& b);

}  // namespace salmon::proto
