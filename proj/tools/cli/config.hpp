#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ddcli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Kind { boolean, integer, unsigned_integer, real, text, list };

using Value = std::variant<bool, std::int64_t, std::uint64_t, double, std::string, std::vector<double>>;

struct KeySpec {
    std::string section;
    std::string key;
    Kind kind;
    Value fallback;
    std::string doc;
};

/// Every recognised key. Key names are unique across sections, so a bare
/// `--key value` flag is unambiguous.
const std::vector<KeySpec>& schema();
const KeySpec& key_spec(std::string_view key);

/// TOML subset: [section] headers, `key = value` lines, # comments; values are
/// booleans, integers, floats, basic strings and single-line numeric arrays.
class Config {
public:
    /// Every key at its documented default.
    static Config defaults();
    /// Only the keys present in `text`; unknown or duplicate keys throw.
    static Config parse(std::string_view text, const std::string& origin = "config");
    static Config load(const std::string& path);

    /// Keys set in `other` replace ours.
    void merge(const Config& other);
    /// Flag override; `key` is bare or `section.key`, the token is parsed by
    /// the key's kind (lists as `1,2,3` or `[1, 2, 3]`).
    void set_from_token(const std::string& key, const std::string& token);

    std::string emit() const;
    bool has(std::string_view key) const;

    bool boolean(std::string_view key) const;
    std::int64_t integer(std::string_view key) const;
    std::uint64_t unsigned_integer(std::string_view key) const;
    double real(std::string_view key) const;
    const std::string& text(std::string_view key) const;
    const std::vector<double>& list(std::string_view key) const;

    bool operator==(const Config& other) const;

private:
    const Value& get(std::string_view key) const;
    void set(const KeySpec& spec, Value v);

    std::map<std::string, std::map<std::string, Value>> values_;
};

}  // namespace ddcli
