#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "recml/common.hpp"

namespace recml {

/// Flat dotted-key configuration: one `section.key = value` per line,
/// '#' starts a comment. Values stay strings until queried.
class Config {
  public:
    Config() = default;

    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Canonical text form (sorted keys); the config hash is FNV-1a of this.
    std::string canonical_text() const;
    std::uint64_t hash() const { return fnv1a64(canonical_text()); }

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace recml
