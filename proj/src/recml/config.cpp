#include "recml/config.hpp"

#include <fstream>
#include <sstream>

namespace recml {

namespace {
std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}
}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.kv_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string Config::get_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config: missing key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + v + "'");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-integer value '" + v + "'");
    }
}

long long Config::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_uint64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-integer value '" + v + "'");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("config: key '" + key + "' has non-boolean value '" + v + "'");
}

std::string Config::canonical_text() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
    return os.str();
}

}  // namespace recml
