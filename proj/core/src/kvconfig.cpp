#include "sketchls/kvconfig.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sketchls/errors.hpp"

namespace sketchls {

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

KvConfig KvConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str());
}

KvConfig KvConfig::from_string(const std::string& text) {
    KvConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trimmed(line);
        if (line.empty()) {
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value, got '" + line + "'");
        }
        std::string key = trimmed(line.substr(0, eq));
        std::string value = trimmed(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        config.values_[key] = value;
    }
    return config;
}

void KvConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

bool KvConfig::has(const std::string& key) const {
    return values_.count(key) > 0;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string KvConfig::require_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("missing required config key '" + key + "'");
    }
    return it->second;
}

double KvConfig::parse_double(const std::string& key) const {
    const std::string& raw = values_.at(key);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc() || ptr != raw.data() + raw.size()) {
        throw ConfigError("config key '" + key + "': '" + raw + "' is not a number");
    }
    return value;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? parse_double(key) : fallback;
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) {
        return fallback;
    }
    double value = parse_double(key);
    auto rounded = static_cast<std::int64_t>(value);
    if (static_cast<double>(rounded) != value) {
        throw ConfigError("config key '" + key + "': expected an integer");
    }
    return rounded;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) {
        return fallback;
    }
    const std::string& raw = values_.at(key);
    if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") {
        return true;
    }
    if (raw == "false" || raw == "0" || raw == "no" || raw == "off") {
        return false;
    }
    throw ConfigError("config key '" + key + "': '" + raw + "' is not a boolean");
}

std::vector<std::string> KvConfig::get_list(const std::string& key,
                                            const std::vector<std::string>& fallback) const {
    if (!has(key)) {
        return fallback;
    }
    std::vector<std::string> out;
    const std::string& raw = values_.at(key);
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = raw.find(',', start);
        std::string item = trimmed(comma == std::string::npos ? raw.substr(start)
                                                              : raw.substr(start, comma - start));
        if (!item.empty()) {
            out.push_back(item);
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::uint64_t KvConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [key, value] : values_) {
        feed(key);
        feed("=");
        feed(value);
        feed("\n");
    }
    return h;
}

} // namespace sketchls
