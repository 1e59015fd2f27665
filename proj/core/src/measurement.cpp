#include "salmon/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "salmon/keyvalue.hpp"

namespace salmon::meas {

namespace {
constexpr double kTimeEps = 1e-9;
}

std::vector<std::string> validate_sensor_config(const SensorConfig& config) {
    std::vector<std::string> v;
    const auto check = [&](const char* name, const ChannelConfig& c) {
        if (!(c.period > 0.0)) v.push_back(std::string(name) + ": period must be > 0");
        if (!(c.range_min < c.range_max)) v.push_back(std::string(name) + ": empty range");
    };
    check("nitrate", config.nitrate);
    check("oxygen", config.oxygen);
    check("conductivity", config.conductivity);
    check("temperature", config.temperature);
    if (!(config.max_fix_age > 0.0)) v.push_back("max_fix_age must be > 0");
    return v;
}

SampleScheduler::SampleScheduler(const SensorConfig& config) : last_t_(-kTimeEps) {
    slots_ = {
        {Channel::Nitrate, config.nitrate.period, 0.0},
        {Channel::Oxygen, config.oxygen.period, 0.0},
        {Channel::Conductivity, config.conductivity.period, 0.0},
        {Channel::Temperature, config.temperature.period, 0.0},
    };
}

std::vector<Channel> SampleScheduler::due(double t) {
    if (t < last_t_ - kTimeEps) {
        throw std::invalid_argument("sampling clock went backwards");
    }
    last_t_ = std::max(last_t_, t);
    std::vector<Channel> out;
    for (Slot& slot : slots_) {
        if (t >= slot.next_due - kTimeEps) {
            out.push_back(slot.channel);
            while (slot.next_due <= t + kTimeEps) slot.next_due += slot.period;
        }
    }
    return out;
}

MeasurementComputer::MeasurementComputer(SensorConfig config, sim::EnvironmentModel environment,
                                         geo::Origin origin)
    : config_(config), environment_(environment), origin_(origin), scheduler_(config) {
    const auto violations = validate_sensor_config(config_);
    if (!violations.empty()) {
        std::string msg = "invalid sensor config:";
        for (const auto& v : violations) msg += " " + v + ";";
        throw std::invalid_argument(msg);
    }
}

void MeasurementComputer::on_nav(const proto::NavData& nav) {
    last_nav_ = nav;
    tick(nav.timestamp);
}

void MeasurementComputer::tick(double t) {
    const std::vector<Channel> due = scheduler_.due(t);
    if (due.empty()) return;
    if (!last_nav_ || t - last_nav_->timestamp > config_.max_fix_age + kTimeEps) {
        ++dropped_;
        return;
    }

    const Vec2 xy = geo::to_local(origin_, {last_nav_->latitude, last_nav_->longitude});
    const Vec3 pos{xy.x, xy.y, last_nav_->depth};

    MeasurementSample sample;
    sample.timestamp = t;
    sample.latitude = last_nav_->latitude;
    sample.longitude = last_nav_->longitude;
    sample.depth = last_nav_->depth;

    const auto record = [&](Channel ch, double raw, const ChannelConfig& cfg,
                            std::optional<double>& out) {
        const double clamped = std::clamp(raw, cfg.range_min, cfg.range_max);
        if (clamped != raw) sample.clamp_flags |= static_cast<std::uint8_t>(1U << static_cast<unsigned>(ch));
        out = clamped;
    };
    for (const Channel ch : due) {
        switch (ch) {
            case Channel::Nitrate:
                record(ch, environment_.nitrate(pos), config_.nitrate, sample.nano3_ugl);
                break;
            case Channel::Oxygen:
                record(ch, environment_.oxygen(pos.z), config_.oxygen, sample.o2_umoll);
                break;
            case Channel::Conductivity:
                record(ch, environment_.conductivity(pos.z), config_.conductivity,
                       sample.cond_mscm);
                break;
            case Channel::Temperature:
                record(ch, environment_.temperature(pos.z), config_.temperature, sample.temp_c);
                break;
        }
    }
    samples_.push_back(sample);
}

std::string MeasurementComputer::export_csv() const {
    std::string out = "t,lat,lon,depth,nano3_ugl,o2_umoll,cond_mscm,temp_c,flags\n";
    const auto opt = [](const std::optional<double>& v) {
        return v ? kv::format_double(*v) : std::string();
    };
    for (const MeasurementSample& s : samples_) {
        out += kv::format_double(s.timestamp);
        out += ',' + kv::format_double(s.latitude);
        out += ',' + kv::format_double(s.longitude);
        out += ',' + kv::format_double(s.depth);
        out += ',' + opt(s.nano3_ugl);
        out += ',' + opt(s.o2_umoll);
        out += ',' + opt(s.cond_mscm);
        out += ',' + opt(s.temp_c);
        out += ',';
        bool first = true;
        static const char* names[] = {"nano3_clamp", "o2_clamp", "cond_clamp", "temp_clamp"};
        for (unsigned bit = 0; bit < 4; ++bit) {
            if (s.clamp_flags & (1U << bit)) {
                if (!first) out += '|';
                out += names[bit];
                first = false;
            }
        }
        out += '\n';
    }
    return out;
}

std::size_t MeasurementComputer::count_rows_csv(const std::string& csv) {
    std::size_t rows = 0;
    for (const char c : csv) {
        if (c == '\n') ++rows;
    }
    return rows > 0 ? rows - 1 : 0;  // minus header
}

}  // namespace salmon::meas
