#include "salmon/keyvalue.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace salmon::kv {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

const std::string* Section::find(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::string Section::get_string(std::string_view key) const {
    const std::string* v = find(key);
    if (!v) throw MissingKeyError(name, std::string(key));
    return *v;
}

double Section::get_double(std::string_view key) const {
    const std::string value = get_string(key);
    std::string_view v = value;
    if (!v.empty() && v.front() == '+') v.remove_prefix(1);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ValueError(name, std::string(key), "'" + value + "' is not a number");
    }
    return out;
}

std::int64_t Section::get_int(std::string_view key) const {
    const std::string value = get_string(key);
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ValueError(name, std::string(key), "'" + value + "' is not an integer");
    }
    return out;
}

std::string Section::get_string_or(std::string_view key, std::string fallback) const {
    const std::string* v = find(key);
    return v ? *v : std::move(fallback);
}

double Section::get_double_or(std::string_view key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t Section::get_int_or(std::string_view key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

void Section::set(std::string key, std::string value) {
    entries.emplace_back(std::move(key), std::move(value));
}

const Section* Document::find(std::string_view name) const {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

Section& Document::add(std::string name) {
    sections.push_back(Section{std::move(name), {}});
    return sections.back();
}

Document Document::parse(std::string_view text) {
    Document doc;
    Section* current = nullptr;
    std::size_t line_no = 0;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;

        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(line_no, "malformed section header '" + std::string(line) + "'");
            }
            const std::string name(trim(line.substr(1, line.size() - 2)));
            if (name.empty()) throw ParseError(line_no, "empty section name");
            if (doc.find(name)) throw ParseError(line_no, "duplicate section [" + name + "]");
            current = &doc.add(name);
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "expected 'key = value', got '" + std::string(line) + "'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (!current) throw ParseError(line_no, "entry before any [section]");
        if (current->find(key)) {
            throw ParseError(line_no, "duplicate key '" + key + "' in [" + current->name + "]");
        }
        current->set(key, value);
    }
    return doc;
}

std::string Document::serialize() const {
    std::string out;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        if (i > 0) out += '\n';
        out += '[' + sections[i].name + "]\n";
        for (const auto& [k, v] : sections[i].entries) {
            out += k + " = " + v + '\n';
        }
    }
    return out;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace salmon::kv
