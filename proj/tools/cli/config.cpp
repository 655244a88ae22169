#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ddcli {
namespace {

std::vector<double> default_qubit_list() {
    std::vector<double> out;
    for (int p = 1; p <= 10; ++p) out.push_back(double(1 << p));
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

std::string strip_underscores(std::string_view s) {
    std::string out;
    for (char c : s)
        if (c != '_') out += c;
    return out;
}

bool parse_int(std::string_view raw, std::int64_t& out) {
    const std::string s = strip_underscores(raw);
    const char* b = s.data();
    if (!s.empty() && s[0] == '+') ++b;
    const auto r = std::from_chars(b, s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size() && b != s.data() + s.size();
}

bool parse_uint(std::string_view raw, std::uint64_t& out) {
    const std::string s = strip_underscores(raw);
    const char* b = s.data();
    if (!s.empty() && s[0] == '+') ++b;
    const auto r = std::from_chars(b, s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size() && b != s.data() + s.size();
}

bool parse_double(std::string_view raw, double& out) {
    std::string s = strip_underscores(raw);
    if (s == "inf" || s == "+inf") return out = HUGE_VAL, true;
    if (s == "-inf") return out = -HUGE_VAL, true;
    if (s == "nan" || s == "+nan" || s == "-nan") return out = std::nan(""), true;
    if (!s.empty() && s[0] == '+') s.erase(0, 1);
    if (s.empty() || s.find_first_of("0123456789") == std::string::npos) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

std::string parse_string(std::string_view s, const std::string& where) {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') throw ConfigError(where + ": expected a quoted string");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        char c = s[i];
        if (c == '"') throw ConfigError(where + ": unescaped quote in string");
        if (c == '\\') {
            if (i + 2 >= s.size()) throw ConfigError(where + ": dangling escape");
            const char e = s[++i];
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: throw ConfigError(where + ": unsupported escape \\" + std::string(1, e));
            }
        } else {
            out += c;
        }
    }
    return out;
}

std::vector<double> parse_list(std::string_view raw, bool brackets_required, const std::string& where) {
    std::string s = trim(raw);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') throw ConfigError(where + ": unterminated array");
        s = s.substr(1, s.size() - 2);
    } else if (brackets_required) {
        throw ConfigError(where + ": expected an array");
    }
    std::vector<double> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty() && ss.eof()) break;  // trailing comma
        double v;
        if (!parse_double(t, v)) throw ConfigError(where + ": array element '" + t + "' is not a number");
        out.push_back(v);
    }
    return out;
}

Value parse_value(const KeySpec& spec, std::string_view raw, bool from_flag, const std::string& where) {
    const std::string s = trim(raw);
    switch (spec.kind) {
        case Kind::boolean:
            if (s == "true") return true;
            if (s == "false") return false;
            throw ConfigError(where + ": " + spec.key + " expects true or false");
        case Kind::integer: {
            std::int64_t v;
            if (!parse_int(s, v)) throw ConfigError(where + ": " + spec.key + " expects an integer");
            return v;
        }
        case Kind::unsigned_integer: {
            std::uint64_t v;
            if (!parse_uint(s, v)) throw ConfigError(where + ": " + spec.key + " expects an unsigned integer");
            return v;
        }
        case Kind::real: {
            double v;
            if (!parse_double(s, v)) throw ConfigError(where + ": " + spec.key + " expects a number");
            return v;
        }
        case Kind::text:
            if (from_flag && (s.empty() || s.front() != '"')) return std::string(raw);
            return parse_string(s, where);
        case Kind::list:
            return parse_list(s, !from_flag, where);
    }
    throw ConfigError(where + ": unsupported kind");
}

std::string emit_value(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::int64_t> || std::is_same_v<T, std::uint64_t>)
                return std::to_string(x);
            else if constexpr (std::is_same_v<T, double>) return format_real(x);
            else if constexpr (std::is_same_v<T, std::string>) return quote(x);
            else {
                std::string out = "[";
                for (std::size_t i = 0; i < x.size(); ++i) out += (i ? ", " : "") + format_real(x[i]);
                return out + "]";
            }
        },
        v);
}

// NaN never compares equal; compare bit patterns so round-trips of nan hold.
bool same_value(const Value& a, const Value& b) {
    if (a.index() != b.index()) return false;
    if (auto* x = std::get_if<double>(&a)) {
        const double y = std::get<double>(b);
        return *x == y || (std::isnan(*x) && std::isnan(y));
    }
    return a == b;
}

}  // namespace

const std::vector<KeySpec>& schema() {
    static const std::vector<KeySpec> keys = {
        {"spectrum", "kind", Kind::text, std::string("lorentzian"), "ohmic | lorentzian | gaussian | tabulated"},
        {"spectrum", "sigma", Kind::real, 1.0, "classical noise RMS amplitude, rad/s"},
        {"spectrum", "tau_c", Kind::real, 1.0, "classical correlation time, s"},
        {"spectrum", "alpha", Kind::real, 0.1, "ohmic coupling"},
        {"spectrum", "omega_d", Kind::real, 1.0, "ohmic cutoff, rad/s"},
        {"spectrum", "spectrum_file", Kind::text, std::string(""), "two-column CSV for kind = tabulated"},
        {"spectrum", "bath", Kind::text, std::string("auto"),
         "quantum | classical | auto (quantum for ohmic and tabulated)"},
        {"spectrum", "temperature", Kind::real, 0.0, "quantum bath temperature, K"},
        {"spectrum", "chi_rel_tol", Kind::real, 1e-10, "quadrature relative tolerance"},
        {"model", "model", Kind::text, std::string("spectrum"), "spectrum | power_law"},
        {"model", "power_a", Kind::real, 1.0, "power-law prefactor a in chi = a N tau^v"},
        {"model", "power_v", Kind::real, 6.0, "power-law exponent v"},
        {"sequence", "pulses", Kind::integer, std::int64_t{1}, "CPMG pulse count n (0 = Ramsey)"},
        {"ensemble", "qubits", Kind::integer, std::int64_t{1}, "N"},
        {"ensemble", "qubit_list", Kind::list, default_qubit_list(), "N values for scaling"},
        {"ensemble", "protocol", Kind::text, std::string("ghz"), "ghz | separable"},
        {"ensemble", "total_time", Kind::real, 1000.0, "total time budget T_t, s"},
        {"ensemble", "detuning", Kind::real, 0.0, "detuning, rad/s"},
        {"ensemble", "bias", Kind::real, std::numbers::pi / 2.0, "phase bias added to N phi"},
        {"grid", "z_min", Kind::real, 0.0, "filter grid start"},
        {"grid", "z_max", Kind::real, 4.0 * std::numbers::pi, "filter grid end"},
        {"grid", "z_points", Kind::integer, std::int64_t{1001}, "filter grid size"},
        {"grid", "tau_min", Kind::real, 1e-3, "tau grid start, s"},
        {"grid", "tau_max", Kind::real, 1.0, "tau grid end, s"},
        {"grid", "tau_points", Kind::integer, std::int64_t{41}, "tau grid size (log spaced)"},
        {"search", "initial_tau", Kind::real, 0.0, "bracketing start for tau*, 0 = total_time * 1e-3"},
        {"search", "search_rel_tol", Kind::real, 1e-7, "golden-section tolerance on log tau"},
        {"fit", "expected_k", Kind::real, 0.0, "target k; 0 derives it from the local exponent of chi"},
        {"fit", "tolerance", Kind::real, 0.02, "allowed |k - expected_k|"},
        {"mc", "seed", Kind::unsigned_integer, std::uint64_t{1}, "master seed"},
        {"mc", "trials", Kind::integer, std::int64_t{100000}, "trajectories per row"},
        {"mc", "mc_spectra", Kind::text, std::string("lorentzian,gaussian"), "comma-separated spectrum kinds"},
        {"mc", "mc_pulses", Kind::list, std::vector<double>{0, 1, 2, 4}, "pulse counts"},
        {"mc", "mc_tau", Kind::list, std::vector<double>{0.2, 0.5, 1.0, 2.0}, "tau values in units of tau_c"},
        {"state", "state_kind", Kind::text, std::string("ghz"), "ghz | plus | file"},
        {"state", "state_file", Kind::text, std::string(""), "amplitude CSV (x, re, im)"},
        {"state", "phi", Kind::real, 0.0, "phase per qubit"},
        {"state", "alpha_rate", Kind::real, 0.0, "alpha in exp(-2 c alpha tau^6)"},
        {"state", "state_tau", Kind::real, 0.1, "interrogation time, s"},
        {"state", "repetitions", Kind::real, 1000.0, "l = T_t / tau"},
        {"state", "theta", Kind::real, 0.1, "bias expansion angle"},
    };
    return keys;
}

const KeySpec& key_spec(std::string_view key) {
    const auto dot = key.find('.');
    const std::string_view bare = dot == std::string_view::npos ? key : key.substr(dot + 1);
    for (const auto& s : schema()) {
        if (s.key != bare) continue;
        if (dot != std::string_view::npos && key.substr(0, dot) != s.section) break;
        return s;
    }
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

Config Config::defaults() {
    Config c;
    for (const auto& s : schema()) c.values_[s.section][s.key] = s.fallback;
    return c;
}

Config Config::parse(std::string_view text, const std::string& origin) {
    Config c;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);

        // Drop a trailing comment, ignoring '#' inside strings.
        std::string line;
        bool in_string = false;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const char ch = raw[i];
            if (in_string && ch == '\\' && i + 1 < raw.size()) {
                line += ch;
                line += raw[++i];
                continue;
            }
            if (ch == '"') in_string = !in_string;
            if (ch == '#' && !in_string) break;
            line += ch;
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            const bool known = std::any_of(schema().begin(), schema().end(),
                                           [&](const KeySpec& s) { return s.section == section; });
            if (!known) throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside a section");
        const KeySpec* spec = nullptr;
        try {
            spec = &key_spec(section + "." + key);
        } catch (const ConfigError&) {
            throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
        }
        if (c.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        c.set(*spec, parse_value(*spec, std::string_view(line).substr(eq + 1), false, where));
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void Config::merge(const Config& other) {
    for (const auto& [section, keys] : other.values_)
        for (const auto& [key, value] : keys) values_[section][key] = value;
}

void Config::set_from_token(const std::string& key, const std::string& token) {
    const KeySpec& spec = key_spec(key);
    set(spec, parse_value(spec, token, true, "--" + key));
}

void Config::set(const KeySpec& spec, Value v) { values_[spec.section][spec.key] = std::move(v); }

std::string Config::emit() const {
    std::string out;
    std::string current;
    for (const auto& s : schema()) {
        const auto sec = values_.find(s.section);
        if (sec == values_.end()) continue;
        const auto it = sec->second.find(s.key);
        if (it == sec->second.end()) continue;
        if (s.section != current) {
            out += (out.empty() ? "[" : "\n[") + s.section + "]\n";
            current = s.section;
        }
        out += s.key + " = " + emit_value(it->second) + "\n";
    }
    return out;
}

bool Config::has(std::string_view key) const {
    const KeySpec& spec = key_spec(key);
    const auto sec = values_.find(spec.section);
    return sec != values_.end() && sec->second.count(spec.key) > 0;
}

const Value& Config::get(std::string_view key) const {
    const KeySpec& spec = key_spec(key);
    const auto sec = values_.find(spec.section);
    if (sec != values_.end()) {
        const auto it = sec->second.find(spec.key);
        if (it != sec->second.end()) return it->second;
    }
    return spec.fallback;
}

bool Config::operator==(const Config& other) const {
    for (const auto& s : schema()) {
        const bool mine = has(s.key), theirs = other.has(s.key);
        if (mine != theirs) return false;
        if (mine && !same_value(get(s.key), other.get(s.key))) return false;
    }
    return true;
}

namespace {

template <class T>
const T& typed(const Value& v, std::string_view key) {
    if (auto* x = std::get_if<T>(&v)) return *x;
    throw ConfigError("key '" + std::string(key) + "' has a different type");
}

}  // namespace

bool Config::boolean(std::string_view key) const { return typed<bool>(get(key), key); }
std::int64_t Config::integer(std::string_view key) const { return typed<std::int64_t>(get(key), key); }
std::uint64_t Config::unsigned_integer(std::string_view key) const { return typed<std::uint64_t>(get(key), key); }
double Config::real(std::string_view key) const { return typed<double>(get(key), key); }
const std::string& Config::text(std::string_view key) const { return typed<std::string>(get(key), key); }
const std::vector<double>& Config::list(std::string_view key) const {
    return typed<std::vector<double>>(get(key), key);
}

}  // namespace ddcli
