#include "salmon/mission_plan.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "salmon/keyvalue.hpp"

namespace salmon::plan {

namespace {

MissionElement parse_element(const kv::Section& sec) {
    const std::string type = sec.get_string("type");
    if (type == "initial") {
        return InitialElement{sec.get_double("x"), sec.get_double("y")};
    }
    if (type == "final") {
        return FinalElement{sec.get_double("x"), sec.get_double("y")};
    }
    if (type == "waypoint") {
        return WaypointElement{sec.get_double("x"), sec.get_double("y"), sec.get_double("z")};
    }
    if (type == "line") {
        return LineElement{sec.get_double("x1"), sec.get_double("y1"), sec.get_double("x2"),
                           sec.get_double("y2"), sec.get_double("z")};
    }
    if (type == "arc") {
        return ArcElement{sec.get_double("cx"),    sec.get_double("cy"),
                          sec.get_double("radius"), sec.get_double("start_angle_deg"),
                          sec.get_double("end_angle_deg"), sec.get_double("z")};
    }
    if (type == "meander") {
        MeanderElement m;
        m.x = sec.get_double("x");
        m.y = sec.get_double("y");
        m.z_max = sec.get_double("z_max");
        m.rotation_deg = sec.get_double("rotation_deg");
        m.leg_length = sec.get_double("leg_length");
        m.leg_distance = sec.get_double("leg_distance");
        m.n_legs = sec.get_int("n_legs");
        return m;
    }
    throw std::runtime_error("section [" + sec.name + "]: unknown element type '" + type + "'");
}

void serialize_element(kv::Section& sec, const MissionElement& element) {
    const auto num = [](double v) { return kv::format_double(v); };
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, InitialElement>) {
                sec.set("type", "initial");
                sec.set("x", num(e.x));
                sec.set("y", num(e.y));
            } else if constexpr (std::is_same_v<T, FinalElement>) {
                sec.set("type", "final");
                sec.set("x", num(e.x));
                sec.set("y", num(e.y));
            } else if constexpr (std::is_same_v<T, WaypointElement>) {
                sec.set("type", "waypoint");
                sec.set("x", num(e.x));
                sec.set("y", num(e.y));
                sec.set("z", num(e.z));
            } else if constexpr (std::is_same_v<T, LineElement>) {
                sec.set("type", "line");
                sec.set("x1", num(e.x1));
                sec.set("y1", num(e.y1));
                sec.set("x2", num(e.x2));
                sec.set("y2", num(e.y2));
                sec.set("z", num(e.z));
            } else if constexpr (std::is_same_v<T, ArcElement>) {
                sec.set("type", "arc");
                sec.set("cx", num(e.cx));
                sec.set("cy", num(e.cy));
                sec.set("radius", num(e.radius));
                sec.set("start_angle_deg", num(e.start_angle_deg));
                sec.set("end_angle_deg", num(e.end_angle_deg));
                sec.set("z", num(e.z));
            } else if constexpr (std::is_same_v<T, MeanderElement>) {
                sec.set("type", "meander");
                sec.set("x", num(e.x));
                sec.set("y", num(e.y));
                sec.set("z_max", num(e.z_max));
                sec.set("rotation_deg", num(e.rotation_deg));
                sec.set("leg_length", num(e.leg_length));
                sec.set("leg_distance", num(e.leg_distance));
                sec.set("n_legs", std::to_string(e.n_legs));
            }
        },
        element);
}

}  // namespace

const char* element_type_name(const MissionElement& element) {
    static const char* names[] = {"initial", "final", "waypoint", "line", "arc", "meander"};
    return names[element.index()];
}

MissionPlan parse_plan(std::string_view text) {
    const kv::Document doc = kv::Document::parse(text);

    MissionPlan plan;
    if (const kv::Section* mission = doc.find("mission")) {
        plan.name = mission->get_string_or("name", "");
        plan.origin_lat = mission->get_double_or("origin_lat", 0.0);
        plan.origin_lon = mission->get_double_or("origin_lon", 0.0);
    }

    std::size_t expected_index = 1;
    for (const kv::Section& sec : doc.sections) {
        if (sec.name == "mission") continue;
        if (sec.name.rfind("element.", 0) != 0) {
            throw std::runtime_error("unexpected section [" + sec.name + "] in mission plan");
        }
        const std::string_view idx_text = std::string_view(sec.name).substr(8);
        std::size_t idx = 0;
        const auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
        if (ec != std::errc() || ptr != idx_text.data() + idx_text.size()) {
            throw std::runtime_error("bad element index in section [" + sec.name + "]");
        }
        if (idx != expected_index) {
            throw std::runtime_error("element sections must be numbered consecutively from 1; got [" +
                                     sec.name + "], expected [element." +
                                     std::to_string(expected_index) + "]");
        }
        ++expected_index;
        plan.elements.push_back(parse_element(sec));
    }

    if (plan.elements.empty()) {
        throw std::runtime_error("mission plan has no elements");
    }
    if (!std::holds_alternative<InitialElement>(plan.elements.front())) {
        throw std::runtime_error("first element must be type = initial");
    }
    if (!std::holds_alternative<FinalElement>(plan.elements.back())) {
        throw std::runtime_error("last element must be type = final");
    }
    for (std::size_t i = 1; i + 1 < plan.elements.size(); ++i) {
        const MissionElement& e = plan.elements[i];
        if (std::holds_alternative<InitialElement>(e) || std::holds_alternative<FinalElement>(e)) {
            throw std::runtime_error("element " + std::to_string(i + 1) +
                                     ": initial/final are only allowed at the plan boundaries");
        }
    }
    return plan;
}

std::string serialize_plan(const MissionPlan& plan) {
    kv::Document doc;
    kv::Section& mission = doc.add("mission");
    mission.set("name", plan.name);
    mission.set("origin_lat", kv::format_double(plan.origin_lat));
    mission.set("origin_lon", kv::format_double(plan.origin_lon));
    for (std::size_t i = 0; i < plan.elements.size(); ++i) {
        kv::Section& sec = doc.add("element." + std::to_string(i + 1));
        serialize_element(sec, plan.elements[i]);
    }
    return doc.serialize();
}

std::vector<std::string> validate_plan(const MissionPlan& plan) {
    std::vector<std::string> violations;
    const auto add = [&](std::size_t i, const std::string& msg) {
        violations.push_back("element " + std::to_string(i + 1) + " (" +
                             element_type_name(plan.elements[i]) + "): " + msg);
    };

    if (plan.elements.empty()) {
        violations.push_back("plan has no elements");
        return violations;
    }
    if (!std::holds_alternative<InitialElement>(plan.elements.front())) {
        violations.push_back("first element must be initial");
    }
    if (!std::holds_alternative<FinalElement>(plan.elements.back())) {
        violations.push_back("last element must be final");
    }

    for (std::size_t i = 0; i < plan.elements.size(); ++i) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, WaypointElement>) {
                    if (e.z < 0.0) add(i, "z must be >= 0");
                } else if constexpr (std::is_same_v<T, LineElement>) {
                    if (e.x1 == e.x2 && e.y1 == e.y2) add(i, "line endpoints must be distinct");
                    if (e.z < 0.0) add(i, "z must be >= 0");
                } else if constexpr (std::is_same_v<T, ArcElement>) {
                    if (!(e.radius > 0.0)) add(i, "radius must be > 0");
                    if (e.start_angle_deg == e.end_angle_deg) add(i, "arc sweep must be nonzero");
                    if (e.z < 0.0) add(i, "z must be >= 0");
                } else if constexpr (std::is_same_v<T, MeanderElement>) {
                    if (!(e.z_max > 0.0)) add(i, "z_max must be > 0");
                    if (!(e.leg_length > 0.0)) add(i, "leg_length must be > 0");
                    if (!(e.leg_distance > 0.0)) add(i, "leg_distance must be > 0");
                    if (e.n_legs < 1) add(i, "n_legs must be >= 1");
                }
            },
            plan.elements[i]);
    }
    return violations;
}

MissionPlan load_plan_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open mission plan '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_plan(buf.str());
}

}  // namespace salmon::plan
