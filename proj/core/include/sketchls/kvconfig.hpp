#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sketchls {

/// Flat `key = value` configuration: one pair per line, '#' comments.
/// Command-line overrides win over file values.
class KvConfig {
public:
    KvConfig() = default;

    static KvConfig from_file(const std::string& path);
    static KvConfig from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key,
                                      const std::vector<std::string>& fallback) const;

    /// FNV-1a over the sorted canonical "key=value" lines; stable run to run.
    std::uint64_t hash() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    double parse_double(const std::string& key) const;
    std::map<std::string, std::string> values_;
};

} // namespace sketchls
