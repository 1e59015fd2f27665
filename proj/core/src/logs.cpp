#include "salmon/logs.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace salmon::logs {

namespace {
constexpr char kTelegramMagic[8] = {'S', 'A', 'L', 'M', 'O', 'N', 'T', 'L'};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void TelegramLogWriter::open(const std::string& path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot write telegram log '" + path + "'");
    out_.write(kTelegramMagic, sizeof kTelegramMagic);
}

void TelegramLogWriter::record(double t, bool outbound, std::span<const std::uint8_t> frame) {
    if (!out_.is_open()) return;
    out_.write(reinterpret_cast<const char*>(&t), sizeof t);
    const std::uint8_t dir = outbound ? 1 : 0;
    out_.write(reinterpret_cast<const char*>(&dir), 1);
    const auto len = static_cast<std::uint32_t>(frame.size());
    out_.write(reinterpret_cast<const char*>(&len), sizeof len);
    out_.write(reinterpret_cast<const char*>(frame.data()),
               static_cast<std::streamsize>(frame.size()));
}

std::vector<TelegramLogEntry> read_telegram_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read telegram log '" + path + "'");
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kTelegramMagic, sizeof magic) != 0) {
        throw std::runtime_error("'" + path + "' is not a telegram log");
    }
    std::vector<TelegramLogEntry> entries;
    while (true) {
        TelegramLogEntry e;
        in.read(reinterpret_cast<char*>(&e.t), sizeof e.t);
        if (!in) break;
        std::uint8_t dir = 0;
        std::uint32_t len = 0;
        in.read(reinterpret_cast<char*>(&dir), 1);
        in.read(reinterpret_cast<char*>(&len), sizeof len);
        if (!in) throw std::runtime_error("truncated telegram log '" + path + "'");
        e.outbound = dir == 1;
        e.frame.resize(len);
        in.read(reinterpret_cast<char*>(e.frame.data()), len);
        if (!in) throw std::runtime_error("truncated telegram log '" + path + "'");
        entries.push_back(std::move(e));
    }
    return entries;
}

void MissionLogWriter::open(const std::string& path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot write mission log '" + path + "'");
}

void MissionLogWriter::record(const MissionLogEntry& e) {
    if (!out_.is_open()) return;
    nlohmann::json nav = {
        {"t", e.nav.timestamp},       {"lat", e.nav.latitude},
        {"lon", e.nav.longitude},     {"depth", e.nav.depth},
        {"roll", e.nav.roll},         {"pitch", e.nav.pitch},
        {"yaw", e.nav.yaw},           {"speed", e.nav.speed},
        {"gps_fix", e.nav.gps_fix},
    };
    if (std::isnan(e.nav.height_over_ground)) {
        nav["hog"] = nullptr;
    } else {
        nav["hog"] = e.nav.height_over_ground;
    }
    const nlohmann::json line = {
        {"t", e.t},
        {"mode", guidance::mode_name(e.mode)},
        {"nav", nav},
        {"setpoints", e.setpoints.pwm},
        {"fraction", e.fraction},
        {"waypoint", e.waypoint_index},
    };
    out_ << line.dump() << '\n';
}

std::vector<MissionLogEntry> read_mission_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read mission log '" + path + "'");
    std::vector<MissionLogEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        MissionLogEntry entry;
        entry.t = j.at("t").get<double>();
        entry.mode = guidance::mode_from_name(j.at("mode").get<std::string>());
        const auto& nav = j.at("nav");
        entry.nav.timestamp = nav.at("t").get<double>();
        entry.nav.latitude = nav.at("lat").get<double>();
        entry.nav.longitude = nav.at("lon").get<double>();
        entry.nav.depth = nav.at("depth").get<double>();
        entry.nav.roll = nav.at("roll").get<double>();
        entry.nav.pitch = nav.at("pitch").get<double>();
        entry.nav.yaw = nav.at("yaw").get<double>();
        entry.nav.speed = nav.at("speed").get<double>();
        entry.nav.gps_fix = nav.at("gps_fix").get<bool>();
        entry.nav.height_over_ground = nav.at("hog").is_null()
                                           ? std::numeric_limits<double>::quiet_NaN()
                                           : nav.at("hog").get<double>();
        const auto& sp = j.at("setpoints");
        for (std::size_t i = 0; i < proto::kMotorCount; ++i) {
            entry.setpoints.pwm[i] = sp.at(i).get<std::int16_t>();
        }
        entry.fraction = j.at("fraction").get<double>();
        entry.waypoint_index = j.at("waypoint").get<std::size_t>();
        entries.push_back(std::move(entry));
    }
    return entries;
}

}  // namespace salmon::logs
