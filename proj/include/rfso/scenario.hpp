#ifndef RFSO_SCENARIO_HPP
#define RFSO_SCENARIO_HPP

// Scenario documents: JSON with sections mirroring LinkConfig. Fields ending in
// _db are decibels and are converted to linear here, nowhere else.
//
//   {
//     "name": "...", "label": "representative",
//     "rf": {"relays": 3, "rank": 2, "rho": 0.7, "avg_snr_db": 20},
//     "optical": {"beta1": 1, "beta2": 1, "detection": "heterodyne", "avg_snr_db": 20},
//     "impairments": {"kappa1": 0.1, "kappa2": 0.1},
//     "gamma_th_db": 5,
//     "sweep": {"axis": "avg_snr_db", "grid": {"start": 0, "stop": 40, "step": 2},
//               "outputs": ["op_closed", "op_mc"], "trials": 1000000, "seed": 1},
//     "diagnostics": {"analytic_delta_override": 0.5}
//   }
//
// rf.rho may be replaced by rf.doppler_hz with rf.delay_s (Jakes model).
// optical.k, optical.l, optical.omega1 and optical.omega2 are optional; the
// default scales give unit-mean irradiance.

#include "rfso/errors.hpp"
#include "rfso/link.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfso {

enum class SweepAxis { avg_snr_db, gamma_th_db };

inline std::string_view to_string(SweepAxis a) { return a == SweepAxis::avg_snr_db ? "avg_snr_db" : "gamma_th_db"; }

inline SweepAxis axis_from_string(std::string_view s) {
    if (s == "avg_snr_db") return SweepAxis::avg_snr_db;
    if (s == "gamma_th_db") return SweepAxis::gamma_th_db;
    throw ConfigInvalid("sweep.axis: expected avg_snr_db or gamma_th_db, got '" + std::string(s) + "'");
}

/// Output columns in canonical order.
inline const std::vector<std::string>& known_outputs() {
    static const std::vector<std::string> names = {"op_closed", "op_quad",    "op_mc", "ec_bound",
                                                   "ec_approx", "ec_numeric", "ec_mc", "ceilings"};
    return names;
}

struct SweepSpec {
    SweepAxis axis = SweepAxis::avg_snr_db;
    std::vector<double> grid; ///< abscissa values in dB
    std::vector<std::string> outputs;
    std::int64_t trials = 1'000'000;
    std::uint64_t seed = 1;

    bool wants(std::string_view name) const {
        return std::find(outputs.begin(), outputs.end(), name) != outputs.end();
    }
    bool wants_mc() const { return wants("op_mc") || wants("ec_mc"); }

    void validate() const {
        std::string msg;
        if (grid.empty()) msg += "sweep.grid: must be nonempty; ";
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1])) {
                msg += "sweep.grid: must be strictly increasing; ";
                break;
            }
        for (double g : grid)
            if (!std::isfinite(g)) {
                msg += "sweep.grid: values must be finite; ";
                break;
            }
        if (outputs.empty()) msg += "sweep.outputs: at least one output is required; ";
        std::set<std::string> seen;
        for (const auto& o : outputs) {
            if (std::find(known_outputs().begin(), known_outputs().end(), o) == known_outputs().end())
                msg += "sweep.outputs: unknown output '" + o + "'; ";
            if (!seen.insert(o).second) msg += "sweep.outputs: duplicate output '" + o + "'; ";
        }
        if (wants_mc() && trials < 10'000) msg += "sweep.trials: must be >= 10000 when Monte Carlo outputs are requested; ";
        if (!msg.empty()) throw ConfigInvalid(msg);
    }
};

/// start:stop:step, inclusive of stop when it lies on the lattice.
inline std::vector<double> make_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop))
        throw ConfigInvalid("sweep.grid: need step > 0 and stop >= start");
    const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100'000) throw ConfigInvalid("sweep.grid: more than 100000 points");
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        // Round to 12 decimals so 0.1-style steps print cleanly.
        const double v = start + double(i) * step;
        g.push_back(std::round(v * 1e12) / 1e12);
    }
    return g;
}

inline std::vector<double> parse_grid_text(const std::string& text) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos) throw ConfigInvalid("--grid: expected start:stop:step, got '" + text + "'");
    try {
        return make_grid(std::stod(text.substr(0, a)), std::stod(text.substr(a + 1, b - a - 1)),
                         std::stod(text.substr(b + 1)));
    } catch (const std::invalid_argument&) {
        throw ConfigInvalid("--grid: non-numeric field in '" + text + "'");
    }
}

struct Scenario {
    std::string name = "unnamed";
    std::string label = "representative";
    LinkConfig link;
    double gamma_th_db = 0.0;
    std::optional<SweepSpec> sweep;
    std::optional<double> analytic_delta_override; ///< negative-control fixture only

    double gamma_th() const { return from_db(gamma_th_db); }
};

namespace detail {

using nlohmann::json;

class FieldReader {
public:
    FieldReader(const json& obj, std::string section, std::string& errors)
        : obj_(obj), section_(std::move(section)), errors_(errors) {
        if (!obj_.is_object()) errors_ += section_ + ": must be an object; ";
    }

    bool has(const char* key) const { return obj_.is_object() && obj_.contains(key); }

    std::optional<double> number(const char* key, bool required = true) {
        used_.insert(key);
        if (!has(key)) {
            if (required) errors_ += path(key) + ": missing; ";
            return std::nullopt;
        }
        const auto& v = obj_.at(key);
        if (!v.is_number()) {
            errors_ += path(key) + ": must be a number; ";
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<int> integer(const char* key, bool required = true) {
        used_.insert(key);
        if (!has(key)) {
            if (required) errors_ += path(key) + ": missing; ";
            return std::nullopt;
        }
        const auto& v = obj_.at(key);
        if (!v.is_number_integer()) {
            errors_ += path(key) + ": must be an integer; ";
            return std::nullopt;
        }
        return v.get<int>();
    }

    std::optional<std::string> string(const char* key, bool required = true) {
        used_.insert(key);
        if (!has(key)) {
            if (required) errors_ += path(key) + ": missing; ";
            return std::nullopt;
        }
        const auto& v = obj_.at(key);
        if (!v.is_string()) {
            errors_ += path(key) + ": must be a string; ";
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    const json* child(const char* key) {
        used_.insert(key);
        return has(key) ? &obj_.at(key) : nullptr;
    }

    void reject_unknown() {
        if (!obj_.is_object()) return;
        for (const auto& item : obj_.items())
            if (!used_.count(item.key())) errors_ += path(item.key().c_str()) + ": unknown field; ";
    }

    std::string path(const char* key) const { return section_.empty() ? key : section_ + "." + key; }

private:
    const json& obj_;
    std::string section_;
    std::string& errors_;
    std::set<std::string> used_;
};

inline SweepSpec parse_sweep(const json& j, std::string& errors) {
    SweepSpec s;
    FieldReader r(j, "sweep", errors);
    if (auto a = r.string("axis", false)) {
        try {
            s.axis = axis_from_string(*a);
        } catch (const ConfigInvalid& e) {
            errors += std::string(e.what()) + "; ";
        }
    }
    if (const json* g = r.child("grid")) {
        if (g->is_array()) {
            for (const auto& v : *g) {
                if (!v.is_number()) {
                    errors += "sweep.grid: entries must be numbers; ";
                    break;
                }
                s.grid.push_back(v.get<double>());
            }
        } else if (g->is_object()) {
            FieldReader gr(*g, "sweep.grid", errors);
            const auto start = gr.number("start"), stop = gr.number("stop"), step = gr.number("step");
            gr.reject_unknown();
            if (start && stop && step) {
                try {
                    s.grid = make_grid(*start, *stop, *step);
                } catch (const ConfigInvalid& e) {
                    errors += std::string(e.what()) + "; ";
                }
            }
        } else {
            errors += "sweep.grid: must be an array or {start, stop, step}; ";
        }
    }
    if (const json* o = r.child("outputs")) {
        if (!o->is_array()) {
            errors += "sweep.outputs: must be an array of names; ";
        } else {
            for (const auto& v : *o) {
                if (!v.is_string()) {
                    errors += "sweep.outputs: entries must be strings; ";
                    break;
                }
                s.outputs.push_back(v.get<std::string>());
                const auto& known = known_outputs();
                if (std::find(known.begin(), known.end(), s.outputs.back()) == known.end())
                    errors += "sweep.outputs: unknown output '" + s.outputs.back() + "'; ";
            }
        }
    }
    if (const json* t = r.child("trials")) {
        if (t->is_number_integer() && t->get<std::int64_t>() > 0)
            s.trials = t->get<std::int64_t>();
        else
            errors += "sweep.trials: must be a positive integer; ";
    }
    if (const json* sd = r.child("seed")) {
        if (sd->is_number_unsigned() || (sd->is_number_integer() && sd->get<std::int64_t>() >= 0))
            s.seed = sd->get<std::uint64_t>();
        else
            errors += "sweep.seed: must be a non-negative integer; ";
    }
    r.reject_unknown();
    return s;
}

} // namespace detail

/// Parses and validates a scenario. All problems are collected into one
/// ConfigInvalid whose message names each offending field.
inline Scenario parse_scenario(const nlohmann::json& doc) {
    using detail::FieldReader;
    std::string errors;
    Scenario sc;
    FieldReader top(doc, "", errors);
    if (!doc.is_object()) throw ConfigInvalid("scenario: top level must be a JSON object");

    if (auto v = top.string("name", false)) sc.name = *v;
    if (auto v = top.string("label", false)) sc.label = *v;
    if (auto v = top.number("gamma_th_db", false)) sc.gamma_th_db = *v;

    if (const auto* rf = top.child("rf")) {
        FieldReader r(*rf, "rf", errors);
        if (auto v = r.integer("relays")) sc.link.rf.relays = *v;
        if (auto v = r.integer("rank")) sc.link.rf.rank = *v;
        if (auto v = r.number("avg_snr_db")) sc.link.rf.avg_snr = from_db(*v);
        const bool jakes = r.has("doppler_hz") || r.has("delay_s");
        if (jakes) {
            if (r.has("rho")) errors += "rf.rho: give either rho or doppler_hz/delay_s, not both; ";
            const auto fd = r.number("doppler_hz"), td = r.number("delay_s");
            if (fd && td) {
                try {
                    sc.link.rf.rho = jakes_rho(*fd, *td);
                } catch (const Error& e) {
                    errors += std::string("rf.doppler_hz/delay_s: ") + e.what() + "; ";
                }
            }
        } else if (auto v = r.number("rho")) {
            sc.link.rf.rho = *v;
        }
        r.reject_unknown();
    } else {
        errors += "rf: missing; ";
    }

    if (const auto* op = top.child("optical")) {
        FieldReader r(*op, "optical", errors);
        const auto b1 = r.number("beta1"), b2 = r.number("beta2");
        const auto snr = r.number("avg_snr_db");
        const auto k = r.integer("k", false), l = r.integer("l", false);
        const auto om1 = r.number("omega1", false), om2 = r.number("omega2", false);
        Detection det = Detection::heterodyne;
        if (auto d = r.string("detection")) {
            try {
                det = detection_from_string(*d);
            } catch (const Error& e) {
                errors += std::string(e.what()) + "; ";
            }
        }
        r.reject_unknown();
        if (k.has_value() != l.has_value()) errors += "optical.k/l: give both or neither; ";
        if (b1 && b2 && snr && *b1 > 0.0 && *b2 > 0.0) {
            try {
                std::optional<KL> kl;
                if (k && l) kl = KL{*k, *l};
                const double w1 = om1 ? *om1 : weibull_scale_unit_mean(*b1);
                const double w2 = om2 ? *om2 : weibull_scale_unit_mean(*b2);
                sc.link.optical = make_optical_config(*b1, *b2, w1, w2, det, from_db(*snr), kl);
            } catch (const Error& e) {
                errors += std::string(e.what()) + "; ";
            }
        } else if (b1 && b2 && !(*b1 > 0.0 && *b2 > 0.0)) {
            errors += "optical.beta1/beta2: must be positive; ";
        }
    } else {
        errors += "optical: missing; ";
    }

    if (const auto* im = top.child("impairments")) {
        FieldReader r(*im, "impairments", errors);
        if (auto v = r.number("kappa1")) sc.link.impairments.kappa1 = *v;
        if (auto v = r.number("kappa2")) sc.link.impairments.kappa2 = *v;
        r.reject_unknown();
    }

    if (const auto* sw = top.child("sweep")) sc.sweep = detail::parse_sweep(*sw, errors);

    if (const auto* dg = top.child("diagnostics")) {
        FieldReader r(*dg, "diagnostics", errors);
        if (auto v = r.number("analytic_delta_override", false)) {
            if (*v >= 0.0)
                sc.analytic_delta_override = *v;
            else
                errors += "diagnostics.analytic_delta_override: must be >= 0; ";
        }
        r.reject_unknown();
    }
    top.reject_unknown();

    if (errors.empty()) {
        try {
            sc.link.validate();
        } catch (const ConfigInvalid& e) {
            errors += e.what();
        }
    }
    if (!errors.empty()) throw ConfigInvalid(errors);
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("scenario: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigInvalid("scenario: JSON parse error in '" + path + "': " + e.what());
    }
    return parse_scenario(doc);
}

/// Fully resolved configuration, linear and dB, for metadata sidecars.
inline nlohmann::json resolved_json(const Scenario& sc) {
    const auto& L = sc.link;
    nlohmann::json j;
    j["name"] = sc.name;
    j["label"] = sc.label;
    j["rf"] = {{"relays", L.rf.relays},
               {"rank", L.rf.rank},
               {"rho", L.rf.rho},
               {"avg_snr", L.rf.avg_snr},
               {"avg_snr_db", to_db(L.rf.avg_snr)}};
    j["optical"] = {{"beta1", L.optical.beta1},
                    {"beta2", L.optical.beta2},
                    {"k", L.optical.k},
                    {"l", L.optical.l},
                    {"omega1", L.optical.omega1},
                    {"omega2", L.optical.omega2},
                    {"detection", std::string(to_string(L.optical.detection))},
                    {"r", L.optical.r()},
                    {"c", L.detection_constant()},
                    {"avg_snr", L.optical.avg_snr},
                    {"avg_snr_db", to_db(L.optical.avg_snr)}};
    j["impairments"] = {{"kappa1", L.impairments.kappa1},
                        {"kappa2", L.impairments.kappa2},
                        {"delta", L.impairments.delta()}};
    j["gain_constant"] = gain_constant(L);
    j["gamma_th_db"] = sc.gamma_th_db;
    if (sc.analytic_delta_override) j["diagnostics"] = {{"analytic_delta_override", *sc.analytic_delta_override}};
    return j;
}

} // namespace rfso

#endif // RFSO_SCENARIO_HPP
