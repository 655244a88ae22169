#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "ddmetrics/ddmetrics.h"
#include "json.hpp"

namespace fs = std::filesystem;
using ddcli::Config;
using ddcli::ConfigError;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct ApiError : std::runtime_error {
    ApiError(ddm_status s, const std::string& what) : std::runtime_error(what), status(s) {}
    ddm_status status;
};

void check(ddm_status s) {
    if (s != DDM_OK) throw ApiError(s, std::string(ddm_status_name(s)) + ": " + ddm_last_error());
}

int exit_code_for(ddm_status s) {
    switch (s) {
        case DDM_E_INVALID_ARGUMENT:
        case DDM_E_DOMAIN:
        case DDM_E_CAPACITY:
        case DDM_E_IO: return kExitConfig;
        default: return kExitNumeric;
    }
}

using Spectrum = std::unique_ptr<ddm_spectrum, decltype(&ddm_spectrum_free)>;
using Model = std::unique_ptr<ddm_chi_model, decltype(&ddm_chi_model_free)>;
using State = std::unique_ptr<ddm_state, decltype(&ddm_state_free)>;
using Scaling = std::unique_ptr<ddm_scaling, decltype(&ddm_scaling_free)>;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string out;
    for (const auto& c : cells) out += (out.empty() ? "" : ",") + c;
    return out + "\n";
}

// Written to a sibling temp file, then renamed over the target.
void write_atomically(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body << std::flush;
        return;
    }
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << body;
        out.close();
        if (!out) {
            std::remove(tmp.c_str());
            throw ApiError(DDM_E_IO, "cannot write '" + path + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw ApiError(DDM_E_IO, "cannot move output into place at '" + path + "': " + ec.message());
    }
}

std::string preset_path(const std::string& name) {
    if (name.find('/') != std::string::npos || name.find("..") != std::string::npos)
        throw ConfigError("preset names may not contain paths: '" + name + "'");
    std::vector<fs::path> dirs;
#ifdef DDMETRICS_PRESET_DIR
    dirs.emplace_back(DDMETRICS_PRESET_DIR);
#endif
    std::error_code ec;
    const fs::path exe = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) {
        dirs.push_back(exe.parent_path() / "presets");
        dirs.push_back(exe.parent_path().parent_path() / "share" / "ddmetrics" / "presets");
    }
    for (const auto& d : dirs) {
        const fs::path p = d / (name + ".toml");
        if (fs::exists(p)) return p.string();
    }
    throw ConfigError("unknown preset '" + name + "'");
}

int as_int(double v, const char* what) {
    if (!(std::floor(v) == v) || std::abs(v) > 1e9) throw ConfigError(std::string(what) + " must be an integer");
    return static_cast<int>(v);
}

int config_int(const Config& cfg, const char* key) {
    const auto v = cfg.integer(key);
    if (v < -1000000000 || v > 1000000000) throw ConfigError(std::string(key) + " is out of range");
    return static_cast<int>(v);
}

std::vector<double> linear_grid(double lo, double hi, std::int64_t count, const char* what) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo) || count < 2 || count > 100000000)
        throw ConfigError(std::string("invalid ") + what + " grid");
    std::vector<double> g(count);
    for (std::int64_t i = 0; i < count; ++i) g[i] = lo + (hi - lo) * double(i) / double(count - 1);
    return g;
}

std::vector<double> log_grid(double lo, double hi, std::int64_t count, const char* what) {
    if (!(lo > 0.0) || !std::isfinite(hi) || !(hi > lo) || count < 2 || count > 100000000)
        throw ConfigError(std::string("invalid ") + what + " grid");
    std::vector<double> g(count);
    for (std::int64_t i = 0; i < count; ++i) g[i] = lo * std::pow(hi / lo, double(i) / double(count - 1));
    g.back() = hi;
    return g;
}

Spectrum make_spectrum(const Config& cfg, const std::string& kind) {
    ddm_spectrum* raw = nullptr;
    if (kind == "ohmic") check(ddm_spectrum_ohmic(cfg.real("alpha"), cfg.real("omega_d"), &raw));
    else if (kind == "lorentzian") check(ddm_spectrum_lorentzian(cfg.real("sigma"), cfg.real("tau_c"), &raw));
    else if (kind == "gaussian") check(ddm_spectrum_gaussian(cfg.real("sigma"), cfg.real("tau_c"), &raw));
    else if (kind == "tabulated") {
        if (cfg.text("spectrum_file").empty()) throw ConfigError("kind = tabulated needs spectrum_file");
        check(ddm_spectrum_load_csv(cfg.text("spectrum_file").c_str(), &raw));
    } else {
        throw ConfigError("unknown spectrum kind '" + kind + "'");
    }
    return Spectrum(raw, &ddm_spectrum_free);
}

ddm_bath resolve_bath(const Config& cfg) {
    const std::string& b = cfg.text("bath");
    if (b == "quantum") return DDM_BATH_QUANTUM;
    if (b == "classical") return DDM_BATH_CLASSICAL;
    if (b != "auto") throw ConfigError("bath must be quantum, classical or auto");
    const std::string& kind = cfg.text("kind");
    return kind == "ohmic" || kind == "tabulated" ? DDM_BATH_QUANTUM : DDM_BATH_CLASSICAL;
}

ddm_protocol resolve_protocol(const Config& cfg) {
    const std::string& p = cfg.text("protocol");
    if (p == "ghz") return DDM_PROTOCOL_GHZ;
    if (p == "separable") return DDM_PROTOCOL_SEPARABLE;
    throw ConfigError("protocol must be ghz or separable");
}

// χ(τ, N) with its quadrature error estimate (zero for the power law).
struct ChiSource {
    Spectrum spec{nullptr, &ddm_spectrum_free};
    Model model{nullptr, &ddm_chi_model_free};
    ddm_bath bath = DDM_BATH_CLASSICAL;
    double temperature = 0.0;
    int pulses = 0;
    double rel_tol = 0.0;

    ddm_chi_result eval(double tau, int qubits) const {
        ddm_chi_result r{};
        if (!spec) {
            check(ddm_chi_model_eval(model.get(), tau, qubits, &r.chi));
        } else if (bath == DDM_BATH_QUANTUM) {
            check(ddm_chi_quantum(spec.get(), temperature, pulses, tau, qubits, rel_tol, &r));
        } else {
            check(ddm_chi_classical(spec.get(), pulses, tau, qubits, rel_tol, &r));
        }
        return r;
    }
};

ChiSource make_chi_source(const Config& cfg) {
    ChiSource src;
    src.pulses = config_int(cfg, "pulses");
    src.rel_tol = cfg.real("chi_rel_tol");
    ddm_chi_model* raw = nullptr;
    const std::string& model = cfg.text("model");
    if (model == "power_law") {
        check(ddm_chi_model_power_law(cfg.real("power_a"), cfg.real("power_v"), &raw));
    } else if (model == "spectrum") {
        src.spec = make_spectrum(cfg, cfg.text("kind"));
        src.bath = resolve_bath(cfg);
        src.temperature = cfg.real("temperature");
        check(ddm_chi_model_spectrum(src.spec.get(), src.bath, src.temperature, src.pulses, src.rel_tol, &raw));
    } else {
        throw ConfigError("model must be spectrum or power_law");
    }
    src.model = Model(raw, &ddm_chi_model_free);
    return src;
}

ddm_ensemble make_ensemble(const Config& cfg) {
    ddm_ensemble e;
    ddm_ensemble_default(&e);
    e.qubits = config_int(cfg, "qubits");
    e.detuning = cfg.real("detuning");
    e.total_time = cfg.real("total_time");
    return e;
}

struct Outcome {
    std::string csv;
    int code = 0;
};

Outcome run_filter(const Config& cfg) {
    const int n = config_int(cfg, "pulses");
    if (n < 0) throw ConfigError("pulses must be >= 0");
    const auto z = linear_grid(cfg.real("z_min"), cfg.real("z_max"), cfg.integer("z_points"), "z");
    Outcome out;
    out.csv = csv_row({"z", "F"});
    for (double x : z) {
        double f = 0.0;
        check(ddm_filter(x, n, &f));
        out.csv += csv_row({num(x), num(f)});
    }
    return out;
}

Outcome run_coherence(const Config& cfg) {
    const auto src = make_chi_source(cfg);
    const int qubits = config_int(cfg, "qubits");
    const auto taus = log_grid(cfg.real("tau_min"), cfg.real("tau_max"), cfg.integer("tau_points"), "tau");
    Outcome out;
    out.csv = csv_row({"tau", "chi", "abs_error", "envelope"});
    for (double tau : taus) {
        const auto r = src.eval(tau, qubits);
        out.csv += csv_row({num(tau), num(r.chi), num(r.abs_error), num(std::exp(-2.0 * r.chi))});
    }
    return out;
}

Outcome run_scan(const Config& cfg) {
    const auto src = make_chi_source(cfg);
    const ddm_ensemble ens = make_ensemble(cfg);
    const ddm_protocol protocol = resolve_protocol(cfg);
    const double bias = cfg.real("bias");
    const auto taus = log_grid(cfg.real("tau_min"), cfg.real("tau_max"), cfg.integer("tau_points"), "tau");
    Outcome out;
    out.csv = csv_row({"tau", "chi", "signal", "delta_delta"});
    for (double tau : taus) {
        const double chi = src.eval(tau, protocol == DDM_PROTOCOL_GHZ ? ens.qubits : 1).chi;
        ddm_precision_point p{};
        if (protocol == DDM_PROTOCOL_GHZ) check(ddm_precision_ghz(&ens, tau, chi, bias, &p));
        else check(ddm_precision_separable(&ens, tau, chi, bias, &p));
        out.csv += csv_row({num(tau), num(p.chi), num(p.signal), num(p.delta_delta)});
    }
    return out;
}

Outcome run_scaling(const Config& cfg, const std::string& out_path) {
    const auto src = make_chi_source(cfg);
    const ddm_ensemble ens = make_ensemble(cfg);
    const ddm_protocol protocol = resolve_protocol(cfg);
    std::vector<int> qubits;
    for (double v : cfg.list("qubit_list")) qubits.push_back(as_int(v, "qubit_list entries"));
    ddm_tau_search search;
    ddm_tau_search_default(&search);
    search.initial_tau = cfg.real("initial_tau");
    search.rel_tol = cfg.real("search_rel_tol");
    search.bias = cfg.real("bias");

    ddm_scaling* raw = nullptr;
    check(ddm_scaling_scan(&ens, src.model.get(), protocol, qubits.data(), qubits.size(), &search, &raw));
    const Scaling scan(raw, &ddm_scaling_free);
    ddm_scaling_summary sum{};
    check(ddm_scaling_summary_get(scan.get(), &sum));

    Outcome out;
    out.csv = csv_row({"N", "tau_star", "chi_at_star", "delta_delta_star", "local_exponent", "error"});
    std::size_t used = 0;
    for (std::size_t i = 0; i < sum.points; ++i) {
        ddm_scaling_point p{};
        check(ddm_scaling_point_get(scan.get(), i, &p));
        std::string err = ddm_scaling_point_error(scan.get(), i);
        for (char& c : err)
            if (c == ',' || c == '\n' || c == '"') c = ' ';
        used += p.ok ? 1 : 0;
        out.csv += csv_row({std::to_string(p.qubits), num(p.tau_star), num(p.chi_star), num(p.delta_delta_star),
                            num(p.local_exponent), err});
    }

    const double expected = cfg.real("expected_k") > 0.0 ? cfg.real("expected_k") : sum.predicted_k;
    const double tolerance = cfg.real("tolerance");
    nlohmann::json summary = {
        {"k", sum.k},
        {"stderr", sum.stderr_k},
        {"expected_k", expected},
        {"tolerance", tolerance},
        {"pass", std::abs(sum.k - expected) <= tolerance},
        {"points_used", used},
        {"mean_local_exponent", sum.mean_local_exponent},
        {"predicted_k", sum.predicted_k},
        {"enhancement_exponent", sum.enhancement_exponent},
        {"predicted_enhancement", sum.predicted_enhancement},
    };
    const std::string text = summary.dump(2) + "\n";
    if (out_path.empty()) std::cerr << text;
    else write_atomically(out_path + ".json", text);
    return out;
}

Outcome run_state(const Config& cfg) {
    const int qubits = config_int(cfg, "qubits");
    const std::string& kind = cfg.text("state_kind");
    ddm_state* raw = nullptr;
    if (kind == "ghz") {
        check(ddm_state_ghz(qubits, &raw));
    } else if (kind == "plus") {
        if (qubits < 1 || qubits > 12) throw ConfigError("state_kind = plus needs 1 <= qubits <= 12");
        const std::size_t dim = std::size_t{1} << qubits;
        const std::vector<double> re(dim, 1.0 / std::sqrt(double(dim)));
        check(ddm_state_dense(qubits, re.data(), nullptr, dim, &raw));
    } else if (kind == "file") {
        if (cfg.text("state_file").empty()) throw ConfigError("state_kind = file needs state_file");
        check(ddm_state_load_csv(cfg.text("state_file").c_str(), qubits, &raw));
    } else {
        throw ConfigError("state_kind must be ghz, plus or file");
    }
    const State state(raw, &ddm_state_free);
    const double phi = cfg.real("phi"), alpha = cfg.real("alpha_rate"), tau = cfg.real("state_tau");
    const double reps = cfg.real("repetitions"), theta = cfg.real("theta");

    ddm_moments m{};
    double pc = 0, pd = 0, bc = 0, bd = 0;
    check(ddm_state_moments(state.get(), &m));
    check(ddm_state_p_coherent(state.get(), phi, &pc));
    check(ddm_state_p_decohered(state.get(), phi, alpha, tau, &pd));
    check(ddm_state_bound_coherent(state.get(), tau, reps, &bc));
    check(ddm_state_bound_decohered(state.get(), tau, reps, alpha, theta, &bd));
    Outcome out;
    out.csv = csv_row({"qubits", "mean", "second", "kappa", "variance", "p_coherent", "p_decohered",
                       "bound_coherent", "bound_decohered"});
    out.csv += csv_row({std::to_string(qubits), num(m.mean), num(m.second), num(m.kappa),
                        num(m.second - m.mean * m.mean), num(pc), num(pd), num(bc), num(bd)});
    return out;
}

Outcome run_mc_validate(const Config& cfg) {
    const auto trials = cfg.integer("trials");
    if (trials < 2) throw ConfigError("trials must be >= 2");
    const std::uint64_t seed = cfg.unsigned_integer("seed");
    const double tau_c = cfg.real("tau_c");
    std::vector<std::string> kinds;
    {
        std::stringstream ss(cfg.text("mc_spectra"));
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) kinds.push_back(item);
    }
    if (kinds.empty()) throw ConfigError("mc_spectra is empty");
    for (const auto& k : kinds)
        if (k != "lorentzian" && k != "gaussian") throw ConfigError("mc_spectra entries must be lorentzian or gaussian");

    Outcome out;
    out.csv = csv_row({"spectrum", "n", "tau", "chi_mc", "stderr", "chi_analytic", "sigma_ratio", "low_confidence",
                       "pass"});
    for (const auto& kind : kinds) {
        const Spectrum spec = make_spectrum(cfg, kind);
        for (double nv : cfg.list("mc_pulses")) {
            const int n = as_int(nv, "mc_pulses entries");
            for (double t : cfg.list("mc_tau")) {
                const double tau = t * tau_c;
                ddm_mc_estimate mc{};
                check(ddm_mc_estimate_chi(spec.get(), n, tau, std::size_t(trials), seed, 0, &mc));
                ddm_chi_result q{};
                check(ddm_chi_classical(spec.get(), n, tau, 1, cfg.real("chi_rel_tol"), &q));
                const double dev = std::abs(mc.chi - q.chi);
                const bool pass = dev <= std::max(3.0 * mc.stderr_chi, 0.05 * q.chi);
                const double ratio = mc.stderr_chi > 0.0 ? (mc.chi - q.chi) / mc.stderr_chi : 0.0;
                if (!pass) out.code = kExitNumeric;
                out.csv += csv_row({kind, std::to_string(n), num(tau), num(mc.chi), num(mc.stderr_chi), num(q.chi),
                                    num(ratio), mc.low_confidence ? "1" : "0", pass ? "1" : "0"});
            }
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamical-decoupling metrology calculator"};
    app.require_subcommand(1);
    std::string config_path, out_path, seed, preset;
    bool print_config = false;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"filter", "CPMG filter function on a z grid"},
        {"coherence", "decoherence exponent chi over a tau grid"},
        {"scan", "frequency uncertainty over a tau grid"},
        {"scaling", "optimal uncertainty against N with a power-law fit"},
        {"state", "generator moments, probabilities and bounds for a probe state"},
        {"mc-validate", "Monte Carlo chi against quadrature"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "TOML-style configuration file");
        sub->add_option("--out", out_path, "output CSV path (stdout when absent)");
        sub->add_option("--seed", seed, "master seed (unsigned 64-bit)");
        sub->add_option("--preset", preset, "shipped preset name");
        sub->add_flag("--print-config", print_config, "print the effective configuration and exit");
        sub->allow_extras();
        sub->footer("Any configuration key can be overridden with --key value.");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    const CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();

    try {
        Config cfg = Config::defaults();
        if (!preset.empty()) cfg.merge(Config::load(preset_path(preset)));
        if (!config_path.empty()) cfg.merge(Config::load(config_path));
        const auto extras = sub->remaining();
        for (std::size_t i = 0; i < extras.size(); ++i) {
            const std::string& flag = extras[i];
            if (flag.rfind("--", 0) != 0 || flag.size() < 3) throw ConfigError("unexpected argument '" + flag + "'");
            const auto eq = flag.find('=');
            if (eq != std::string::npos) {
                cfg.set_from_token(flag.substr(2, eq - 2), flag.substr(eq + 1));
            } else {
                if (i + 1 >= extras.size()) throw ConfigError("flag " + flag + " needs a value");
                cfg.set_from_token(flag.substr(2), extras[++i]);
            }
        }
        if (!seed.empty()) cfg.set_from_token("seed", seed);
        if (print_config) {
            std::cout << cfg.emit();
            return 0;
        }

        Outcome result;
        if (command == "filter") result = run_filter(cfg);
        else if (command == "coherence") result = run_coherence(cfg);
        else if (command == "scan") result = run_scan(cfg);
        else if (command == "scaling") result = run_scaling(cfg, out_path);
        else if (command == "state") result = run_state(cfg);
        else result = run_mc_validate(cfg);
        write_atomically(out_path, result.csv);
        if (result.code != 0) std::cerr << command << ": some rows failed\n";
        return result.code;
    } catch (const ConfigError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const ApiError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return exit_code_for(e.status);
    } catch (const std::exception& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return kExitNumeric;
    }
}
