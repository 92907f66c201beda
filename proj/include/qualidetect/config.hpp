#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qualidetect {

/// Flat `key = value` configuration. Lines starting with `#` are comments; a `#`
/// after a value also starts a comment. Later assignments override earlier ones.
class Config {
public:
    static Config parse(const std::string& text, const std::string& source = "<string>");
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    /// Applies a `key=value` override as given to --set.
    void apply_override(const std::string& assignment);
    void erase(const std::string& key);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }
    std::string to_text() const;

    bool operator==(const Config& other) const { return values_ == other.values_; }

private:
    std::map<std::string, std::string> values_;
};

double parse_double(const std::string& text, const std::string& what);
std::vector<double> parse_double_list(const std::string& text, const std::string& what);

}  // namespace qualidetect
