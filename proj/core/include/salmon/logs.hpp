#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "salmon/guidance.hpp"
#include "salmon/protocol/telegrams.hpp"

namespace salmon::logs {

// Per-process logs written during a run and replayed by `salmon analyze`:
//   <role>_telegrams.bin  framed binary telegram log
//   mission.jsonl         one JSON object per guidance tick
//   sim_state.csv         simulator truth trace
//   measurements.csv      water-quality log (written by the MC)

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

struct TelegramLogEntry {
    double t = 0.0;
    bool outbound = false;
    std::vector<std::uint8_t> frame;
};

class TelegramLogWriter {
public:
    TelegramLogWriter() = default;
    explicit TelegramLogWriter(const std::string& path) { open(path); }

    void open(const std::string& path);
    bool is_open() const { return out_.is_open(); }
    void record(double t, bool outbound, std::span<const std::uint8_t> frame);

private:
    std::ofstream out_;
};

std::vector<TelegramLogEntry> read_telegram_log(const std::string& path);

struct MissionLogEntry {
    double t = 0.0;
    guidance::Mode mode = guidance::Mode::Idle;
    proto::NavData nav;
    proto::LlcSetpointsCwolf setpoints;
    double fraction = 0.0;
    std::size_t waypoint_index = 0;
};

class MissionLogWriter {
public:
    MissionLogWriter() = default;
    explicit MissionLogWriter(const std::string& path) { open(path); }

    void open(const std::string& path);
    bool is_open() const { return out_.is_open(); }
    void record(const MissionLogEntry& entry);

private:
    std::ofstream out_;
};

std::vector<MissionLogEntry> read_mission_log(const std::string& path);

}  // namespace salmon::logs
