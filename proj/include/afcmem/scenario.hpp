#pragma once

// JSON scenarios: parsing with field-level validation, the five canned
// scenario kinds, and deterministic artifact bundles with a hash manifest.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "afcmem/designer.hpp"
#include "afcmem/io.hpp"
#include "afcmem/simulation.hpp"

namespace afcmem {

using json = nlohmann::json;

enum class ScenarioKind { ColdCavity, PitModes, Storage, EfficiencySweep, Design };

inline const char* to_string(ScenarioKind k) noexcept {
    switch (k) {
        case ScenarioKind::ColdCavity: return "cold_cavity";
        case ScenarioKind::PitModes: return "pit_modes";
        case ScenarioKind::Storage: return "storage";
        case ScenarioKind::EfficiencySweep: return "efficiency_sweep";
        case ScenarioKind::Design: return "design";
    }
    return "?";
}

enum class Tuning { Fixed, Resonant, Sweep };

struct CavityConfig {
    CavitySpec spec;
    double mode_matching = 1.0;
    bool impedance_match = false;  // choose r1 from the comb's mean depth
    Tuning tuning = Tuning::Fixed;
    int sweep_steps = 8;
};

struct PulseConfig {
    double fwhm = 250e-9;
    double detuning = 0.0;
    double center = 1e-6;
    double span = 8e-6;
    double dt = 4e-9;
    std::optional<double> gate;
};

struct SweepConfig {
    std::vector<double> finesse{4.0, 7.0, 10.0};
    std::vector<double> d_tilde{0.2, 0.5, 1.0, 1.5};
    double delta = 1e6;
    int peak_count = 16;
};

struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::Storage;
    MediumConfig medium;
    double t2 = kDefaultT2;
    std::optional<CavityConfig> cavity;
    PulseConfig pulse;
    bool decoherence = false;
    double mode_threshold = 0.5;
    std::optional<double> export_span;  // Hz around the grid centre for spectral CSVs
    SweepConfig sweep;
    DesignConstraints design;
    bool verify = false;
    std::set<std::string> outputs;
    std::string canonical;  // normalised source text, hashed into the manifest
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace detail {

/// Typed access to one JSON object; every key must be consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const json* v = get(key);
        if (!v) return require(key, fallback);
        if (!v->is_number()) throw ConfigError(field(key) + ": must be a number");
        const double x = v->get<double>();
        if (!std::isfinite(x)) throw ConfigError(field(key) + ": must be finite");
        return x;
    }

    long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
        const json* v = get(key);
        if (!v) return require(key, fallback);
        if (!v->is_number_integer()) throw ConfigError(field(key) + ": must be an integer");
        return v->get<long long>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(field(key) + ": must be true or false");
        return v->get<bool>();
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        const json* v = get(key);
        if (!v) return require(key, fallback);
        if (!v->is_string()) throw ConfigError(field(key) + ": must be a string");
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_array() || v->empty()) throw ConfigError(field(key) + ": must be a non-empty array of numbers");
        std::vector<double> out;
        for (const auto& x : *v) {
            if (!x.is_number()) throw ConfigError(field(key) + ": must be a non-empty array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::optional<Section> child(const std::string& key) {
        const json* v = get(key);
        if (!v) return std::nullopt;
        return Section(*v, field(key));
    }

    const json* raw(const std::string& key) { return get(key); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown field");
    }

private:
    const json* get(const std::string& key) {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <typename T>
    T require(const std::string& key, const std::optional<T>& fallback) const {
        if (!fallback) throw ConfigError(field(key) + ": required field is missing");
        return *fallback;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

inline void check(bool ok, const Section& s, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(s.field(key) + ": " + what);
}

inline DesignConstraints parse_constraints(Section& s) {
    DesignConstraints c;
    c.gamma_pit = s.number("gamma_pit_hz", c.gamma_pit);
    check(c.gamma_pit > 0.0, s, "gamma_pit_hz", "must be positive");
    c.alpha_available = s.number("alpha_per_m", c.alpha_available);
    check(c.alpha_available > 0.0, s, "alpha_per_m", "must be positive");
    c.length = s.number("length_m", c.length);
    check(c.length > 0.0, s, "length_m", "must be positive");
    c.d0 = s.number("d0", c.d0);
    check(c.d0 >= 0.0, s, "d0", "must be non-negative");
    c.r2 = s.number("r2", c.r2);
    check(c.r2 > 0.0 && c.r2 <= 1.0, s, "r2", "must lie in (0, 1]");
    c.min_peak_count = static_cast<int>(s.integer("min_peak_count", c.min_peak_count));
    check(c.min_peak_count >= 1, s, "min_peak_count", "must be positive");
    c.delta_min = s.number("delta_min_hz", c.delta_min);
    check(c.delta_min > 0.0, s, "delta_min_hz", "must be positive");
    return c;
}

}  // namespace detail

/// Constraints object as used by the `design` subcommand.
inline DesignConstraints parse_constraints(const json& j) {
    detail::Section s(j, "");
    DesignConstraints c = detail::parse_constraints(s);
    s.finish();
    return c;
}

inline ScenarioKind parse_kind(const std::string& k) {
    if (k == "cold_cavity") return ScenarioKind::ColdCavity;
    if (k == "pit_modes") return ScenarioKind::PitModes;
    if (k == "storage") return ScenarioKind::Storage;
    if (k == "efficiency_sweep") return ScenarioKind::EfficiencySweep;
    if (k == "design") return ScenarioKind::Design;
    throw ConfigError("kind: unknown scenario kind '" + k + "'");
}

/// Builds and validates a scenario. Errors are ConfigError naming the field.
inline Scenario parse_scenario(const json& root) {
    using detail::check;
    detail::Section s(root, "");
    Scenario sc;
    sc.canonical = root.dump();
    sc.name = s.text("name");
    check(!sc.name.empty(), s, "name", "must not be empty");
    sc.kind = parse_kind(s.text("kind"));

    auto& m = sc.medium;
    std::optional<double> grid_center;
    double span = 200e6;
    long long count = 1 << 18;
    if (auto g = s.child("grid")) {
        if (g->has("center_hz")) grid_center = g->number("center_hz");
        span = g->number("span_hz", span);
        check(span > 0.0, *g, "span_hz", "must be positive");
        count = g->integer("count", count);
        check(count >= 2 && is_power_of_two(static_cast<std::size_t>(count)), *g, "count",
              "must be a power of two >= 2");
        g->finish();
    }

    if (auto mat = s.child("material")) {
        m.length = mat->number("length_m", m.length);
        check(m.length > 0.0, *mat, "length_m", "must be positive");
        m.n_bg = mat->number("n_bg", m.n_bg);
        check(m.n_bg >= 1.0, *mat, "n_bg", "must be at least 1");
        m.wavelength = mat->number("wavelength_m", m.wavelength);
        check(m.wavelength > 0.0, *mat, "wavelength_m", "must be positive");
        sc.t2 = mat->number("t2_s", sc.t2);
        check(sc.t2 > 0.0, *mat, "t2_s", "must be positive");
        const double alpha = mat->number("alpha_per_m", 0.0);
        check(alpha >= 0.0, *mat, "alpha_per_m", "must be non-negative");
        LineConfig line;
        line.alpha_peak = alpha;
        line.fwhm = mat->number("inhomogeneous_fwhm_hz", line.fwhm);
        check(line.fwhm > 0.0, *mat, "inhomogeneous_fwhm_hz", "must be positive");
        line.offset = mat->number("line_center_hz", 0.0);
        const std::string shape = mat->text("line_shape", std::string("gaussian"));
        check(shape == "gaussian" || shape == "lorentzian", *mat, "line_shape", "must be gaussian or lorentzian");
        line.shape = shape == "gaussian" ? LineShape::Gaussian : LineShape::Lorentzian;
        if (alpha > 0.0) m.line = line;
        mat->finish();
    }
    m.grid = make_grid(grid_center.value_or(kSpeedOfLight / m.wavelength), span, static_cast<std::size_t>(count));

    if (auto p = s.child("pit")) {
        PitConfig pit;
        pit.offset = p->number("center_hz", 0.0);
        pit.width = p->number("width_hz", pit.width);
        check(pit.width > 0.0, *p, "width_hz", "must be positive");
        pit.residual_alpha = p->number("residual", 0.0);
        check(pit.residual_alpha >= 0.0, *p, "residual", "must be non-negative");
        pit.edge_width = p->number("edge_width_hz", pit.edge_width);
        check(pit.edge_width >= 0.0, *p, "edge_width_hz", "must be non-negative");
        p->finish();
        m.pit = pit;
    }

    if (auto a = s.child("afc")) {
        AfcParams afc;
        afc.delta = a->number("delta_hz");
        check(afc.delta > 0.0, *a, "delta_hz", "must be positive");
        if (a->has("finesse")) {
            const double f = a->number("finesse");
            check(f > 1.0, *a, "finesse", "must exceed 1");
            afc.gamma = afc.delta / f;
        }
        afc.gamma = a->number("gamma_hz", afc.gamma > 0.0 ? std::optional<double>(afc.gamma) : std::nullopt);
        check(afc.gamma > 0.0 && afc.gamma < afc.delta, *a, "gamma_hz", "must lie in (0, delta_hz)");
        afc.peak_count = static_cast<int>(a->integer("peak_count"));
        check(afc.peak_count >= 0, *a, "peak_count", "must be non-negative");
        afc.d_peak = a->number("d_peak");
        afc.d0 = a->number("d0", 0.0);
        check(afc.d0 >= 0.0, *a, "d0", "must be non-negative");
        check(afc.d_peak >= afc.d0, *a, "d_peak", "must not be below d0");
        const std::string shape = a->text("peak_shape", std::string("gaussian"));
        check(shape == "gaussian" || shape == "square", *a, "peak_shape", "must be gaussian or square");
        afc.peak_shape = shape == "gaussian" ? PeakShape::Gaussian : PeakShape::Square;
        m.afc_offset = a->number("center_hz", 0.0);
        a->finish();
        m.afc = afc;
    }

    if (auto c = s.child("cavity")) {
        CavityConfig cc;
        cc.spec.length = m.length;
        cc.spec.n_bg = m.n_bg;
        cc.spec.r1 = c->number("r1", cc.spec.r1);
        check(cc.spec.r1 >= 0.0 && cc.spec.r1 <= 1.0, *c, "r1", "must lie in [0, 1]");
        cc.spec.r2 = c->number("r2", cc.spec.r2);
        check(cc.spec.r2 >= 0.0 && cc.spec.r2 <= 1.0, *c, "r2", "must lie in [0, 1]");
        cc.spec.length_offset = c->number("length_offset_m", 0.0);
        check(std::abs(cc.spec.length_offset) < m.wavelength, *c, "length_offset_m", "must be sub-wavelength");
        cc.spec.walkoff_factor = c->number("walkoff_factor", 1.0);
        check(cc.spec.walkoff_factor > 0.0 && cc.spec.walkoff_factor <= 1.0, *c, "walkoff_factor",
              "must lie in (0, 1]");
        cc.mode_matching = c->number("mode_matching", 1.0);
        check(cc.mode_matching > 0.0 && cc.mode_matching <= 1.0, *c, "mode_matching", "must lie in (0, 1]");
        cc.impedance_match = c->boolean("impedance_match", false);
        const std::string tuning = c->text("tuning", std::string("fixed"));
        if (tuning == "fixed") cc.tuning = Tuning::Fixed;
        else if (tuning == "resonant") cc.tuning = Tuning::Resonant;
        else if (tuning == "sweep") cc.tuning = Tuning::Sweep;
        else throw ConfigError(c->field("tuning") + ": must be fixed, resonant or sweep");
        cc.sweep_steps = static_cast<int>(c->integer("sweep_steps", 8));
        check(cc.sweep_steps >= 1, *c, "sweep_steps", "must be positive");
        c->finish();
        sc.cavity = cc;
    }

    if (auto p = s.child("pulse")) {
        auto& pc = sc.pulse;
        pc.fwhm = p->number("fwhm_s", pc.fwhm);
        check(pc.fwhm > 0.0, *p, "fwhm_s", "must be positive");
        pc.detuning = p->number("detuning_hz", 0.0);
        pc.center = p->number("center_s", pc.center);
        pc.span = p->number("span_s", pc.span);
        check(pc.span > 0.0, *p, "span_s", "must be positive");
        pc.dt = p->number("dt_s", pc.dt);
        check(pc.dt > 0.0, *p, "dt_s", "must be positive");
        check(pc.fwhm >= 8.0 * pc.dt, *p, "fwhm_s", "must span at least 8 samples of dt_s");
        check(pc.center > 0.0 && pc.center < pc.span, *p, "center_s", "must lie inside the trace span");
        if (p->has("gate_s")) {
            pc.gate = p->number("gate_s");
            check(*pc.gate > 0.0, *p, "gate_s", "must be positive");
        }
        sc.decoherence = p->boolean("decoherence", false);
        p->finish();
    }

    if (auto a = s.child("analysis")) {
        sc.mode_threshold = a->number("mode_threshold", sc.mode_threshold);
        check(sc.mode_threshold > 0.0 && sc.mode_threshold < 1.0, *a, "mode_threshold", "must lie in (0, 1)");
        if (a->has("export_span_hz")) {
            sc.export_span = a->number("export_span_hz");
            check(*sc.export_span > 0.0, *a, "export_span_hz", "must be positive");
        }
        a->finish();
    }

    if (auto w = s.child("sweep")) {
        auto& e = sc.sweep;
        e.finesse = w->numbers("finesse", e.finesse);
        for (double f : e.finesse) check(f > 1.0, *w, "finesse", "values must exceed 1");
        e.d_tilde = w->numbers("d_tilde", e.d_tilde);
        for (double d : e.d_tilde) check(d > 0.0, *w, "d_tilde", "values must be positive");
        e.delta = w->number("delta_hz", e.delta);
        check(e.delta > 0.0, *w, "delta_hz", "must be positive");
        e.peak_count = static_cast<int>(w->integer("peak_count", e.peak_count));
        check(e.peak_count >= 2, *w, "peak_count", "must be at least 2");
        w->finish();
    }

    if (auto d = s.child("design")) {
        sc.verify = d->boolean("verify", false);
        sc.design = detail::parse_constraints(*d);
        d->finish();
    }

    if (const json* o = s.raw("outputs")) {
        static const std::set<std::string> known{"profile", "index", "cavity", "modes", "trace", "results", "candidates"};
        if (!o->is_array()) throw ConfigError("outputs: must be an array of strings");
        for (const auto& x : *o) {
            if (!x.is_string() || !known.count(x.get<std::string>()))
                throw ConfigError("outputs: unknown artifact selector " + x.dump());
            sc.outputs.insert(x.get<std::string>());
        }
    } else {
        sc.outputs = {"results"};
    }
    s.finish();

    if ((sc.kind == ScenarioKind::ColdCavity || sc.kind == ScenarioKind::PitModes) && !sc.cavity)
        throw ConfigError("cavity: required for this scenario kind");
    if (sc.kind == ScenarioKind::PitModes && !sc.medium.pit) throw ConfigError("pit: required for pit_modes");
    if (sc.kind == ScenarioKind::Storage && !sc.medium.afc) throw ConfigError("afc: required for storage");
    return sc;
}

inline Scenario parse_scenario_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_scenario(root);
}

/// Named in-memory artifacts, in output order.
struct Artifacts {
    std::vector<std::pair<std::string, std::string>> files;

    void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
    const std::string* find(const std::string& name) const {
        for (const auto& f : files)
            if (f.first == name) return &f.second;
        return nullptr;
    }
};

namespace detail {

inline AbsorptionProfile restrict(const AbsorptionProfile& p, std::optional<double> span) {
    if (!span) return p;
    std::vector<double> keep;
    std::size_t first = p.grid.size();
    for (std::size_t i = 0; i < p.grid.size(); ++i)
        if (std::abs(p.grid.at(i) - p.grid.center()) <= 0.5 * *span) {
            if (first == p.grid.size()) first = i;
            keep.push_back(p.alpha[i]);
        }
    if (keep.size() < 2) throw PhysicsError("export", "export span holds fewer than two grid points");
    const FrequencyGrid g(p.grid.at(first) + static_cast<double>(keep.size() / 2) * p.grid.spacing(),
                          p.grid.spacing(), keep.size());
    return AbsorptionProfile(g, std::move(keep), p.length);
}

template <typename T>
std::vector<T> slice(const std::vector<T>& v, const FrequencyGrid& full, const FrequencyGrid& part) {
    const std::size_t first = full.nearest(part.front());
    return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(first),
                          v.begin() + static_cast<std::ptrdiff_t>(first + part.size()));
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void add_spectral(Artifacts& out, const Scenario& sc, const Medium& medium, const CavitySpectra* spectra) {
    const AbsorptionProfile part = restrict(medium.profile, sc.export_span);
    if (sc.outputs.count("profile")) out.add("profile.csv", io::profile_csv(part));
    if (sc.outputs.count("index")) {
        IndexProfile idx = medium.index;
        idx.grid = part.grid;
        idx.n_r = slice(medium.index.n_r, medium.profile.grid, part.grid);
        idx.n_g = slice(medium.index.n_g, medium.profile.grid, part.grid);
        out.add("index.csv", io::index_csv(part, idx));
    }
    if (spectra && sc.outputs.count("cavity")) {
        CavitySpectra s{part.grid, slice(spectra->r_amp, medium.profile.grid, part.grid),
                        slice(spectra->t_amp, medium.profile.grid, part.grid)};
        out.add("cavity.csv", io::cavity_csv(s));
    }
}

inline json storage_json(const StorageResult& r, double decoherence) {
    return json{{"efficiency", r.efficiency * decoherence},
                {"echo_time_s", r.echo_time},
                {"echo_delay_s", r.echo_delay()},
                {"direct_fraction", r.direct_fraction},
                {"input_energy", r.input_energy}};
}

inline Artifacts run_cold_cavity(const Scenario& sc) {
    const Medium medium = build_medium(sc.medium);
    const CavitySpec spec = sc.cavity->spec;
    const CavitySpectra spectra = cavity_response(round_trip(medium.index, medium.profile, spec), spec);
    const CavityModeList modes = find_modes(spectra, sc.mode_threshold);
    const double R = effective_reflectance(spec.r1, spec.r2, spec.walkoff_factor);
    json res{{"fsr_theory_hz", cold_cavity_fsr(spec)},
             {"mode_count", modes.size()},
             {"finesse_formula", cavity_finesse(R).exact},
             {"effective_reflectance", R}};
    if (modes.size() >= 2) {
        double fwhm = 0.0;
        for (double w : modes.mode_fwhm) fwhm += w;
        fwhm /= static_cast<double>(modes.size());
        res["fsr_sim_hz"] = modes.mean_spacing();
        res["mode_fwhm_hz"] = fwhm;
        res["finesse_sim"] = modes.mean_spacing() / fwhm;
    }
    Artifacts out;
    add_spectral(out, sc, medium, &spectra);
    if (sc.outputs.count("modes")) out.add("modes.csv", io::modes_csv(modes));
    if (sc.outputs.count("results")) out.add("results.json", dump(res));
    return out;
}

inline Artifacts run_pit_modes(const Scenario& sc) {
    const Medium medium = build_medium(sc.medium);
    const auto& pit = *sc.medium.pit;
    const double centre = medium.profile.grid.center() + pit.offset;
    const FrequencyBand band{centre - 0.5 * pit.width, centre + 0.5 * pit.width};
    CavitySpec spec = sc.cavity->spec;
    const int steps = sc.cavity->tuning == Tuning::Sweep ? sc.cavity->sweep_steps : 1;
    const double lambda_m = medium.index.wavelength() / (2.0 * spec.n_bg);

    json positions = json::array();
    CavityModeList all;
    double spacing_sum = 0.0;
    std::size_t spacing_count = 0;
    std::optional<CavitySpectra> first;
    for (int k = 0; k < steps; ++k) {
        if (sc.cavity->tuning == Tuning::Sweep) spec.length_offset = lambda_m * k / steps;
        if (sc.cavity->tuning == Tuning::Resonant)
            spec.length_offset = length_offset_for_phase(medium.index, spec, centre, 0.0);
        const CavitySpectra spectra = cavity_response(round_trip(medium.index, medium.profile, spec), spec);
        if (!first) first = spectra;
        json pos{{"length_offset_m", spec.length_offset}, {"modes_hz", json::array()}, {"spacings_hz", json::array()}};
        try {
            const CavityModeList modes = find_modes(spectra, sc.mode_threshold, band);
            for (std::size_t i = 0; i < modes.size(); ++i) {
                pos["modes_hz"].push_back(modes.mode_frequencies[i]);
                all.mode_frequencies.push_back(modes.mode_frequencies[i]);
                all.mode_fwhm.push_back(modes.mode_fwhm[i]);
                all.mode_peak_transmission.push_back(modes.mode_peak_transmission[i]);
            }
            for (double s : modes.spacings()) {
                pos["spacings_hz"].push_back(s);
                spacing_sum += s;
                ++spacing_count;
            }
        } catch (const PhysicsError&) {
            // No resolvable mode inside the pit at this offset.
        }
        positions.push_back(pos);
    }
    if (spacing_count == 0) throw PhysicsError("pit_modes", "no offset shows two modes inside the pit");
    const double mean = spacing_sum / static_cast<double>(spacing_count);
    const double fsr = cold_cavity_fsr(spec);
    const double vg = slow_light_vg(pit.width, sc.medium.line ? sc.medium.line->alpha_peak : 0.0);
    json res{{"mean_spacing_hz", mean},
             {"cold_fsr_hz", fsr},
             {"compression", fsr / mean},
             {"group_index_center", group_index(medium.index, centre)},
             {"group_index_slow_light", kSpeedOfLight / vg},
             {"slow_light_spacing_hz", vg / (2.0 * spec.length)},
             {"positions", positions}};
    Artifacts out;
    add_spectral(out, sc, medium, &*first);
    if (sc.outputs.count("modes")) out.add("modes.csv", io::modes_csv(all));
    if (sc.outputs.count("results")) out.add("results.json", dump(res));
    return out;
}

inline Artifacts run_storage(const Scenario& sc) {
    const Medium medium = build_medium(sc.medium);
    const auto& pc = sc.pulse;
    const AfcParams& afc = *sc.medium.afc;
    const PulseTrace input = gaussian_pulse(pc.fwhm, pc.center, pc.detuning, pc.span, pc.dt);
    const StorageRun bare = simulate_bare(medium, input, afc.delta, pc.gate);
    const double deco = sc.decoherence ? decoherence_factor(1.0 / afc.delta, sc.t2) : 1.0;

    const double analytic = afc_efficiency_analytic(afc.d_peak, afc.d0, afc.finesse());

    json res = storage_json(bare.result, deco);
    res["bare_efficiency"] = bare.result.efficiency * deco;
    res["bare_echo_time_s"] = bare.result.echo_time;
    res["bare_echo_delay_s"] = bare.result.echo_delay();
    res["analytic_efficiency"] = analytic;

    Artifacts out;
    std::optional<CavitySpectra> spectra;
    std::optional<StorageRun> cav;
    if (sc.cavity) {
        const double comb_centre = medium.profile.grid.center() + sc.medium.afc_offset;
        CavitySpec spec = sc.cavity->spec;
        if (sc.cavity->impedance_match) spec.r1 = match_mirror(mean_depth(medium.profile, comb_centre, afc.delta), spec.r2);
        if (sc.cavity->tuning != Tuning::Fixed)
            spec.length_offset = length_offset_for_phase(medium.index, spec, comb_centre, 0.0);
        spectra = cavity_response(round_trip(medium.index, medium.profile, spec), spec);
        cav = simulate_cavity(medium, spec, input, afc.delta, sc.cavity->mode_matching, pc.gate);
        res = storage_json(cav->result, deco);
        res["bare_efficiency"] = bare.result.efficiency * deco;
        res["bare_echo_time_s"] = bare.result.echo_time;
        res["bare_echo_delay_s"] = bare.result.echo_delay();
        res["analytic_efficiency"] = analytic;
        res["enhancement"] = enhancement_factor(cav->result.efficiency, bare.result.efficiency);
        res["r1"] = spec.r1;
        res["length_offset_m"] = spec.length_offset;
    }
    add_spectral(out, sc, medium, spectra ? &*spectra : nullptr);
    if (sc.outputs.count("trace")) {
        out.add("trace_input.csv", io::trace_csv(input));
        out.add("trace_bare.csv", io::trace_csv(bare.output));
        if (cav) out.add("trace_cavity.csv", io::trace_csv(cav->output));
    }
    if (sc.outputs.count("results")) out.add("results.json", dump(res));
    return out;
}

inline Artifacts run_efficiency_sweep(const Scenario& sc) {
    const auto& e = sc.sweep;
    std::string csv = "f_afc,d_tilde,d,eta_analytic,eta_sim,ratio\n";
    double worst = 0.0;
    for (double f : e.finesse) {
        for (double dt : e.d_tilde) {
            const AfcParams afc = comb_for(e.delta, f, dt, e.peak_count);
            const double analytic = afc_efficiency_analytic(afc.d_peak, 0.0, f);
            const double sim = single_pass_comb_run(afc, sc.medium.length).result.efficiency;
            worst = std::max(worst, std::abs(sim / analytic - 1.0));
            io::detail::row(csv, f, dt, afc.d_peak, analytic, sim, sim / analytic);
        }
    }
    Artifacts out;
    if (sc.outputs.count("candidates")) out.add("efficiency.csv", csv);
    if (sc.outputs.count("results")) out.add("results.json", dump(json{{"max_relative_error", worst}}));
    return out;
}

inline json design_json(const DesignResult& b) {
    return json{{"r1", b.r1},
                {"f_afc", b.f_afc},
                {"delta_hz", b.delta},
                {"d", b.d},
                {"predicted_eta_bare", b.predicted_eta_bare},
                {"predicted_delta_cav_hz", b.predicted_delta_cav},
                {"bandwidth_ok", b.bandwidth_ok},
                {"mismatch_residual", b.mismatch_residual}};
}

}  // namespace detail

inline Artifacts run_design(const DesignConstraints& c, bool verify, bool candidates = true) {
    const DesignReport rep = optimize_afc(c);
    json res = detail::design_json(rep.best);
    if (verify) {
        const DesignVerification v = verify_design(rep.best, c);
        res["verified_eta_bare"] = v.simulated_eta_bare;
        res["verified_ratio"] = v.ratio();
    }
    Artifacts out;
    out.add("design.json", detail::dump(res));
    if (candidates) out.add("candidates.csv", io::candidates_csv(rep.feasible));
    return out;
}

/// Runs a validated scenario entirely in memory.
inline Artifacts run_scenario(const Scenario& sc) {
    switch (sc.kind) {
        case ScenarioKind::ColdCavity: return detail::run_cold_cavity(sc);
        case ScenarioKind::PitModes: return detail::run_pit_modes(sc);
        case ScenarioKind::Storage: return detail::run_storage(sc);
        case ScenarioKind::EfficiencySweep: return detail::run_efficiency_sweep(sc);
        case ScenarioKind::Design: return run_design(sc.design, sc.verify, sc.outputs.count("candidates") > 0);
    }
    throw ConfigError("kind: unsupported");
}

inline std::string manifest(const std::string& name, const std::string& canonical, const Artifacts& a) {
    json files = json::array();
    for (const auto& [file, content] : a.files)
        files.push_back(json{{"file", file}, {"bytes", content.size()}, {"fnv1a", hex(fnv1a(content))}});
    return detail::dump(json{{"scenario", name}, {"scenario_hash", hex(fnv1a(canonical))}, {"files", files}});
}

/// Writes the artifacts and manifest.json into `dir`. On failure every file
/// written so far is removed.
inline void write_artifacts(const std::filesystem::path& dir, const std::string& name, const std::string& canonical,
                            const Artifacts& a) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::vector<fs::path> written;
    auto put = [&](const std::string& file, const std::string& content) {
        const fs::path p = dir / file;
        std::ofstream o(p, std::ios::binary | std::ios::trunc);
        if (o) written.push_back(p);
        if (o) o.write(content.data(), static_cast<std::streamsize>(content.size()));
        o.close();
        if (!o) {
            for (const auto& w : written) fs::remove(w, ec);
            throw IoError("cannot write " + p.string());
        }
    };
    for (const auto& [file, content] : a.files) put(file, content);
    put("manifest.json", manifest(name, canonical, a));
}

}  // namespace afcmem
