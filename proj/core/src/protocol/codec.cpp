#include "salmon/protocol/codec.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "salmon/geometry.hpp"

namespace salmon::proto {

namespace {

// All fields are little-endian; this codec targets little-endian hosts.
static_assert(std::endian::native == std::endian::little,
              "wire codec assumes a little-endian host");

class Writer {
public:
    explicit Writer(std::size_t reserve) { buf_.reserve(reserve); }

    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { raw(&v, sizeof v); }
    void i16(std::int16_t v) { raw(&v, sizeof v); }
    void f32(float v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void bytes(const void* p, std::size_t n) { raw(p, n); }

    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    bool exhausted() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

    std::uint8_t u8() { return take<std::uint8_t>(); }
    std::uint16_t u16() { return take<std::uint16_t>(); }
    std::int16_t i16() { return take<std::int16_t>(); }
    float f32() { return take<float>(); }
    double f64() { return take<double>(); }

    std::span<const std::uint8_t> bytes(std::size_t n) {
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

private:
    template <typename T>
    T take() {
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof v);
        pos_ += sizeof v;
        return v;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

bool finite(double v) { return std::isfinite(v); }

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("telegram invariant violated: ") + what);
}

void check_nav(const NavData& n) {
    require(finite(n.timestamp), "NavData timestamp must be finite");
    require(finite(n.latitude) && n.latitude >= -90.0 && n.latitude <= 90.0,
            "NavData latitude out of [-90, 90]");
    require(finite(n.longitude) && n.longitude >= -180.0 && n.longitude < 180.0,
            "NavData longitude out of [-180, 180)");
    require(finite(n.depth) && n.depth >= 0.0, "NavData depth must be >= 0");
    require(finite(n.roll), "NavData roll must be finite");
    require(finite(n.pitch), "NavData pitch must be finite");
    require(finite(n.yaw) && n.yaw >= -kPi && n.yaw < kPi, "NavData yaw out of [-pi, pi)");
    require(finite(n.speed), "NavData speed must be finite");
    // height_over_ground may be NaN (DVL out of range).
    require(!std::isinf(n.height_over_ground), "NavData height_over_ground must not be inf");
}

bool nav_fields_ok(const NavData& n) {
    return finite(n.timestamp) && finite(n.latitude) && n.latitude >= -90.0 &&
           n.latitude <= 90.0 && finite(n.longitude) && n.longitude >= -180.0 &&
           n.longitude < 180.0 && finite(n.depth) && n.depth >= 0.0 && finite(n.roll) &&
           finite(n.pitch) && finite(n.yaw) && n.yaw >= -kPi && n.yaw < kPi && finite(n.speed) &&
           !std::isinf(n.height_over_ground);
}

constexpr std::size_t kNavPayload = 10 * sizeof(double);  // 80
constexpr std::size_t kCommandPayload = 2;
constexpr std::size_t kSetpointPayload = 3 * sizeof(double);  // 24
constexpr std::size_t kSetpointsCwolfPayload = kMotorCount * 2;  // 12
constexpr std::size_t kStatusPayload = kMotorCount * 5 + 2;      // 32

}  // namespace

const char* llc_mode_name(LlcMode mode) {
    switch (mode) {
        case LlcMode::NoControl: return "no_control";
        case LlcMode::Controlled: return "controlled";
        case LlcMode::Direct: return "direct";
    }
    return "no_control";
}

MessageId message_id(const Telegram& telegram) {
    switch (telegram.index()) {
        case 0: return MessageId::NavData;
        case 1: return MessageId::LlcCommand;
        case 2: return MessageId::LlcSetpoint;
        case 3: return MessageId::LlcSetpointsCwolf;
        case 4: return MessageId::LlcStatus;
        default: return MessageId::LlcError;
    }
}

const char* message_name(MessageId id) {
    switch (id) {
        case MessageId::NavData: return "NAV_Data";
        case MessageId::LlcCommand: return "LLC_Command";
        case MessageId::LlcSetpoint: return "LLC_Setpoint";
        case MessageId::LlcSetpointsCwolf: return "LLC_Setpoints_CWolf";
        case MessageId::LlcStatus: return "LLC_Status";
        case MessageId::LlcError: return "LLC_Error";
    }
    return "unknown";
}

bool equivalent(const Telegram& a, const Telegram& b) {
    if (a.index() != b.index()) return false;
    const auto feq = [](double x, double y) {
        if (std::isnan(x) || std::isnan(y)) return std::isnan(x) && std::isnan(y);
        return x == y;
    };
    if (const auto* na = std::get_if<NavData>(&a)) {
        const auto& nb = std::get<NavData>(b);
        return feq(na->timestamp, nb.timestamp) && feq(na->latitude, nb.latitude) &&
               feq(na->longitude, nb.longitude) && feq(na->depth, nb.depth) &&
               feq(na->roll, nb.roll) && feq(na->pitch, nb.pitch) && feq(na->yaw, nb.yaw) &&
               feq(na->speed, nb.speed) &&
               feq(na->height_over_ground, nb.height_over_ground) &&
               na->gps_fix == nb.gps_fix;
    }
    if (const auto* ca = std::get_if<LlcCommand>(&a)) {
        return ca->mode == std::get<LlcCommand>(b).mode;
    }
    if (const auto* sa = std::get_if<LlcSetpoint>(&a)) {
        const auto& sb = std::get<LlcSetpoint>(b);
        return feq(sa->heading, sb.heading) && feq(sa->depth, sb.depth) &&
               feq(sa->speed, sb.speed);
    }
    if (const auto* pa = std::get_if<LlcSetpointsCwolf>(&a)) {
        return pa->pwm == std::get<LlcSetpointsCwolf>(b).pwm;
    }
    if (const auto* ma = std::get_if<LlcStatus>(&a)) {
        const auto& mb = std::get<LlcStatus>(b);
        if (ma->mode_echo != mb.mode_echo) return false;
        for (std::size_t i = 0; i < kMotorCount; ++i) {
            if (ma->motors[i].rpm != mb.motors[i].rpm) return false;
            if (ma->motors[i].enabled != mb.motors[i].enabled) return false;
        }
        return true;
    }
    const auto& ea = std::get<LlcError>(a);
    const auto& eb = std::get<LlcError>(b);
    return ea.code == eb.code && ea.message == eb.message;
}

const char* decode_error_name(DecodeError error) {
    switch (error) {
        case DecodeError::Truncated: return "truncated";
        case DecodeError::UnknownId: return "unknown_id";
        case DecodeError::LengthMismatch: return "length_mismatch";
        case DecodeError::TrailingBytes: return "trailing_bytes";
        case DecodeError::InvalidUtf8: return "invalid_utf8";
        case DecodeError::FieldOutOfRange: return "field_out_of_range";
    }
    return "unknown";
}

bool is_valid_utf8(std::span<const std::uint8_t> bytes) {
    std::size_t i = 0;
    while (i < bytes.size()) {
        const std::uint8_t b = bytes[i];
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (b < 0x80) {
            ++i;
            continue;
        } else if ((b & 0xE0) == 0xC0) {
            len = 2;
            cp = b & 0x1F;
        } else if ((b & 0xF0) == 0xE0) {
            len = 3;
            cp = b & 0x0F;
        } else if ((b & 0xF8) == 0xF0) {
            len = 4;
            cp = b & 0x07;
        } else {
            return false;
        }
        if (i + len > bytes.size()) return false;
        for (std::size_t k = 1; k < len; ++k) {
            if ((bytes[i + k] & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (bytes[i + k] & 0x3F);
        }
        if (len == 2 && cp < 0x80) return false;
        if (len == 3 && cp < 0x800) return false;
        if (len == 4 && cp < 0x10000) return false;
        if (cp > 0x10FFFF) return false;
        if (cp >= 0xD800 && cp <= 0xDFFF) return false;  // surrogates
        i += len;
    }
    return true;
}

std::vector<std::uint8_t> encode(const Telegram& telegram) {
    std::size_t payload = 0;
    switch (message_id(telegram)) {
        case MessageId::NavData: payload = kNavPayload; break;
        case MessageId::LlcCommand: payload = kCommandPayload; break;
        case MessageId::LlcSetpoint: payload = kSetpointPayload; break;
        case MessageId::LlcSetpointsCwolf: payload = kSetpointsCwolfPayload; break;
        case MessageId::LlcStatus: payload = kStatusPayload; break;
        case MessageId::LlcError:
            payload = 3 + std::get<LlcError>(telegram).message.size();
            break;
    }

    Writer w(kHeaderSize + payload);
    w.u16(static_cast<std::uint16_t>(message_id(telegram)));
    w.u16(static_cast<std::uint16_t>(payload));

    if (const auto* nav = std::get_if<NavData>(&telegram)) {
        check_nav(*nav);
        w.f64(nav->timestamp);
        w.f64(nav->latitude);
        w.f64(nav->longitude);
        w.f64(nav->depth);
        w.f64(nav->roll);
        w.f64(nav->pitch);
        w.f64(nav->yaw);
        w.f64(nav->speed);
        w.f64(nav->height_over_ground);
        w.f64(nav->gps_fix ? 1.0 : 0.0);
    } else if (const auto* cmd = std::get_if<LlcCommand>(&telegram)) {
        const auto mode = static_cast<std::uint16_t>(cmd->mode);
        require(mode <= 2, "LlcCommand mode must be 0, 1 or 2");
        w.u16(mode);
    } else if (const auto* sp = std::get_if<LlcSetpoint>(&telegram)) {
        require(finite(sp->heading), "LlcSetpoint heading must be finite");
        require(finite(sp->depth) && sp->depth >= 0.0, "LlcSetpoint depth must be >= 0");
        require(finite(sp->speed) && sp->speed >= 0.0, "LlcSetpoint speed must be >= 0");
        w.f64(sp->heading);
        w.f64(sp->depth);
        w.f64(sp->speed);
    } else if (const auto* pwm = std::get_if<LlcSetpointsCwolf>(&telegram)) {
        for (const std::int16_t v : pwm->pwm) {
            require(v >= -kPwmLimit && v <= kPwmLimit, "PWM out of [-1000, 1000]");
            w.i16(v);
        }
    } else if (const auto* status = std::get_if<LlcStatus>(&telegram)) {
        const auto mode = static_cast<std::uint16_t>(status->mode_echo);
        require(mode <= 2, "LlcStatus mode_echo must be 0, 1 or 2");
        for (const MotorStatus& m : status->motors) {
            require(std::isfinite(m.rpm), "LlcStatus rpm must be finite");
            w.f32(m.rpm);
            w.u8(m.enabled ? 1 : 0);
        }
        w.u16(mode);
    } else {
        const auto& err = std::get<LlcError>(telegram);
        require(err.message.size() <= 255, "LlcError message longer than 255 bytes");
        require(is_valid_utf8({reinterpret_cast<const std::uint8_t*>(err.message.data()),
                               err.message.size()}),
                "LlcError message must be valid UTF-8");
        w.u16(err.code);
        w.u8(static_cast<std::uint8_t>(err.message.size()));
        w.bytes(err.message.data(), err.message.size());
    }

    return w.take();
}

DecodeResult decode(std::span<const std::uint8_t> datagram) {
    if (datagram.size() < kHeaderSize) return DecodeError::Truncated;
    Reader r(datagram);
    const std::uint16_t id = r.u16();
    const std::uint16_t declared = r.u16();
    const std::size_t actual = datagram.size() - kHeaderSize;
    if (declared > actual) return DecodeError::LengthMismatch;
    if (declared < actual) return DecodeError::TrailingBytes;

    switch (static_cast<MessageId>(id)) {
        case MessageId::NavData: {
            if (declared != kNavPayload) return DecodeError::LengthMismatch;
            NavData nav;
            nav.timestamp = r.f64();
            nav.latitude = r.f64();
            nav.longitude = r.f64();
            nav.depth = r.f64();
            nav.roll = r.f64();
            nav.pitch = r.f64();
            nav.yaw = r.f64();
            nav.speed = r.f64();
            nav.height_over_ground = r.f64();
            const double fix = r.f64();
            if (fix != 0.0 && fix != 1.0) return DecodeError::FieldOutOfRange;
            nav.gps_fix = fix == 1.0;
            if (!nav_fields_ok(nav)) return DecodeError::FieldOutOfRange;
            return Telegram{nav};
        }
        case MessageId::LlcCommand: {
            if (declared != kCommandPayload) return DecodeError::LengthMismatch;
            const std::uint16_t mode = r.u16();
            if (mode > 2) return DecodeError::FieldOutOfRange;
            return Telegram{LlcCommand{static_cast<LlcMode>(mode)}};
        }
        case MessageId::LlcSetpoint: {
            if (declared != kSetpointPayload) return DecodeError::LengthMismatch;
            LlcSetpoint sp;
            sp.heading = r.f64();
            sp.depth = r.f64();
            sp.speed = r.f64();
            if (!finite(sp.heading) || !finite(sp.depth) || sp.depth < 0.0 ||
                !finite(sp.speed) || sp.speed < 0.0) {
                return DecodeError::FieldOutOfRange;
            }
            return Telegram{sp};
        }
        case MessageId::LlcSetpointsCwolf: {
            if (declared != kSetpointsCwolfPayload) return DecodeError::LengthMismatch;
            LlcSetpointsCwolf sp;
            for (std::int16_t& v : sp.pwm) {
                v = r.i16();
                if (v < -kPwmLimit || v > kPwmLimit) return DecodeError::FieldOutOfRange;
            }
            return Telegram{sp};
        }
        case MessageId::LlcStatus: {
            if (declared != kStatusPayload) return DecodeError::LengthMismatch;
            LlcStatus status;
            for (MotorStatus& m : status.motors) {
                m.rpm = r.f32();
                const std::uint8_t enabled = r.u8();
                if (enabled > 1) return DecodeError::FieldOutOfRange;
                if (!std::isfinite(m.rpm)) return DecodeError::FieldOutOfRange;
                m.enabled = enabled == 1;
            }
            const std::uint16_t mode = r.u16();
            if (mode > 2) return DecodeError::FieldOutOfRange;
            status.mode_echo = static_cast<LlcMode>(mode);
            return Telegram{status};
        }
        case MessageId::LlcError: {
            if (declared < 3) return DecodeError::LengthMismatch;
            LlcError err;
            err.code = r.u16();
            const std::uint8_t len = r.u8();
            if (len != declared - 3) return DecodeError::LengthMismatch;
            const auto bytes = r.bytes(len);
            if (!is_valid_utf8(bytes)) return DecodeError::InvalidUtf8;
            err.message.assign(reinterpret_cast<const char*>(bytes.data()), bytes.size());
            return Telegram{err};
        }
        default: return DecodeError::UnknownId;
    }
}

}  // namespace salmon::proto
