#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "salmon/geo.hpp"
#include "salmon/protocol/telegrams.hpp"
#include "salmon/simulator.hpp"

namespace salmon::meas {

enum class Channel { Nitrate, Oxygen, Conductivity, Temperature };

struct ChannelConfig {
    double range_min = 0.0;
    double range_max = 0.0;
    double period = 1.0;  // [s]
};

struct SensorConfig {
    ChannelConfig nitrate{0.0, 1000.0, 5.0};     // [ug/l], 5 s from the 5-10 s band
    ChannelConfig oxygen{0.0, 500.0, 1.0};       // [umol/l]
    ChannelConfig conductivity{0.0, 75.0, 1.0};  // [mS/cm]
    ChannelConfig temperature{-5.0, 40.0, 1.0};  // [degC]
    double max_fix_age = 1.0;                    // [s] drop samples with older nav
};

std::vector<std::string> validate_sensor_config(const SensorConfig& config);

/// Periodic sampling clock; a channel is due whenever t crosses a multiple
/// of its period (all four fire at t = 0).
class SampleScheduler {
public:
    explicit SampleScheduler(const SensorConfig& config);

    /// Channels due at monotone time t. Throws std::invalid_argument when
    /// time runs backwards.
    std::vector<Channel> due(double t);

private:
    struct Slot {
        Channel channel;
        double period;
        double next_due;
    };
    std::vector<Slot> slots_;
    double last_t_;
};

struct MeasurementSample {
    double timestamp = 0.0;
    double latitude = 0.0;
    double longitude = 0.0;
    double depth = 0.0;
    std::optional<double> nano3_ugl;
    std::optional<double> o2_umoll;
    std::optional<double> cond_mscm;
    std::optional<double> temp_c;
    std::uint8_t clamp_flags = 0;  // bit per channel in Channel order
};

/// Measurement-computer core: rides on the NavData stream, samples the
/// synthetic water column at the sensor cadences and accumulates the
/// water-quality log.
class MeasurementComputer {
public:
    MeasurementComputer(SensorConfig config, sim::EnvironmentModel environment,
                        geo::Origin origin);

    /// Stores the fix and advances the sampling clock to nav.timestamp.
    void on_nav(const proto::NavData& nav);

    /// Advances the clock without a new fix (samples drop when the last fix
    /// is older than max_fix_age).
    void tick(double t);

    const std::vector<MeasurementSample>& samples() const { return samples_; }
    std::uint64_t dropped_samples() const { return dropped_; }

    std::string export_csv() const;
    static std::size_t count_rows_csv(const std::string& csv);

private:
    SensorConfig config_;
    sim::EnvironmentModel environment_;
    geo::Origin origin_;
    SampleScheduler scheduler_;
    std::optional<proto::NavData> last_nav_;
    std::vector<MeasurementSample> samples_;
    std::uint64_t dropped_ = 0;
};

}  // namespace salmon::meas
