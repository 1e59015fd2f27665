#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace salmon::kv {

// Line-oriented key-value format shared by mission plan files (.mis) and
// stack config files (.cfg): `[section]` headers, `key = value` entries,
// full-line `#` comments, UTF-8 text.

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class MissingKeyError : public std::runtime_error {
public:
    MissingKeyError(const std::string& section, const std::string& key)
        : std::runtime_error("section [" + section + "] is missing key '" + key + "'"),
          key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

class ValueError : public std::runtime_error {
public:
    ValueError(const std::string& section, const std::string& key, const std::string& message)
        : std::runtime_error("section [" + section + "], key '" + key + "': " + message),
          key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;  // file order

    const std::string* find(std::string_view key) const;
    bool has(std::string_view key) const { return find(key) != nullptr; }

    std::string get_string(std::string_view key) const;
    double get_double(std::string_view key) const;
    std::int64_t get_int(std::string_view key) const;

    std::string get_string_or(std::string_view key, std::string fallback) const;
    double get_double_or(std::string_view key, double fallback) const;
    std::int64_t get_int_or(std::string_view key, std::int64_t fallback) const;

    void set(std::string key, std::string value);
};

struct Document {
    std::vector<Section> sections;  // file order

    const Section* find(std::string_view name) const;
    Section& add(std::string name);

    /// Parses text; throws ParseError (with line number) on malformed input
    /// or duplicate section names.
    static Document parse(std::string_view text);

    std::string serialize() const;
};

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

}  // namespace salmon::kv
