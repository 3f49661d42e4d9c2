#pragma once

// End-to-end storage pipelines built from the spectra, dispersion, cavity and
// storage pieces: bare single-pass AFC and AFC inside an impedance-matched cavity.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "afcmem/cavity.hpp"
#include "afcmem/designer.hpp"
#include "afcmem/dispersion.hpp"
#include "afcmem/spectra.hpp"
#include "afcmem/storage.hpp"

namespace afcmem {

struct LineConfig {
    double alpha_peak = 2000.0;  // 1/m
    double fwhm = 9e9;           // Hz
    double offset = 0.0;         // Hz from grid centre
    LineShape shape = LineShape::Gaussian;
};

struct PitConfig {
    double offset = 0.0;  // Hz from grid centre
    double width = 18e6;
    double residual_alpha = 0.0;
    double edge_width = 1e6;
};

/// Medium description; absent parts are skipped.
struct MediumConfig {
    FrequencyGrid grid = make_grid(kSpeedOfLight / kDefaultWavelength, 200e6, std::size_t{1} << 18);
    double length = 2e-3;
    double n_bg = kDefaultHostIndex;
    double wavelength = kDefaultWavelength;
    std::optional<LineConfig> line;
    std::optional<PitConfig> pit;
    std::optional<AfcParams> afc;
    double afc_offset = 0.0;  // Hz from grid centre
};

struct Medium {
    AbsorptionProfile profile;
    IndexProfile index;
};

inline Medium build_medium(const MediumConfig& cfg) {
    const auto& grid = cfg.grid;
    AbsorptionProfile profile = AbsorptionProfile::zero(grid, cfg.length);
    if (cfg.line)
        profile = inhomogeneous_line(grid, cfg.line->alpha_peak, cfg.line->fwhm, grid.center() + cfg.line->offset,
                                     cfg.line->shape, cfg.length);
    if (cfg.pit)
        profile = carve_pit(profile, grid.center() + cfg.pit->offset, cfg.pit->width, cfg.pit->residual_alpha,
                            cfg.pit->edge_width);
    if (cfg.afc) profile = write_afc(profile, *cfg.afc, grid.center() + cfg.afc_offset);
    IndexProfile index = kramers_kronig(profile, cfg.n_bg, cfg.wavelength);
    return Medium{std::move(profile), std::move(index)};
}

struct StorageRun {
    PulseTrace input;
    PulseTrace output;
    StorageResult result;
};

/// Single pass through the medium, forward echo.
inline StorageRun simulate_bare(const Medium& medium, const PulseTrace& input, double delta,
                                std::optional<double> gate = std::nullopt) {
    PulseTrace out = propagate(input, medium_transfer(medium.profile, medium.index));
    StorageResult r = measure_efficiency(out, input, delta, gate);
    return StorageRun{input, std::move(out), r};
}

/// Pulse reflected from the cavity's input mirror.
///
/// A fraction `mode_matching` of the input power couples to the cavity mode;
/// the rest is reflected by the bare input mirror. The two transverse parts
/// are orthogonal, so the output intensity is their incoherent sum; the
/// returned samples carry that intensity with the phase of the coupled field.
inline StorageRun simulate_cavity(const Medium& medium, const CavitySpec& spec, const PulseTrace& input,
                                  double delta, double mode_matching = 1.0,
                                  std::optional<double> gate = std::nullopt) {
    if (!(mode_matching > 0.0 && mode_matching <= 1.0))
        throw PhysicsError("simulate_cavity", "mode matching must lie in (0, 1]");
    const RoundTrip trip = round_trip(medium.index, medium.profile, spec);
    const CavitySpectra spectra = cavity_response(trip, spec);
    const PulseTrace coupled = propagate(input, cavity_transfer(spectra, CavityPort::Reflection));
    PulseTrace out = coupled;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double power = mode_matching * std::norm(coupled.samples[i]) +
                             (1.0 - mode_matching) * spec.r1 * std::norm(input.samples[i]);
        const double phase = std::arg(coupled.samples[i]);
        out.samples[i] = std::polar(std::sqrt(power), phase);
    }
    StorageResult r = measure_efficiency(out, input, delta, gate);
    return StorageRun{input, std::move(out), r};
}

/// Mean single-pass intensity depth over one comb period around `at`.
inline double mean_depth(const AbsorptionProfile& profile, double at, double period) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < profile.grid.size(); ++i) {
        if (std::abs(profile.grid.at(i) - at) <= 0.5 * period) {
            sum += profile.depth(i);
            ++n;
        }
    }
    if (n == 0) throw PhysicsError("mean_depth", "averaging window holds no grid points");
    return sum / static_cast<double>(n);
}

/// Cavity spec with R1 impedance-matched to the comb's mean depth and the
/// wedge offset tuned so a resonance sits on the comb centre.
inline CavitySpec matched_cavity(const Medium& medium, CavitySpec spec, double comb_center, double delta) {
    const double d_eff = mean_depth(medium.profile, comb_center, delta);
    spec.r1 = match_mirror(d_eff, spec.r2);
    spec.length_offset = length_offset_for_phase(medium.index, spec, comb_center, 0.0);
    return spec;
}

/// Single-pass echo efficiency of a comb-only medium, the numerical
/// counterpart of afc_efficiency_analytic.
///
/// The comb gets at least 16 peaks and the pulse a spectral FWHM of a quarter
/// of the comb bandwidth, so the pulse sees a locally periodic medium.
inline StorageRun single_pass_comb_run(AfcParams afc, double length) {
    afc.peak_count = std::max(afc.peak_count, 16);
    afc.validate("single_pass_comb_run");
    MediumConfig cfg;
    cfg.length = length;
    cfg.grid = make_grid(kSpeedOfLight / kDefaultWavelength, 8.0 * afc.bandwidth(), std::size_t{1} << 18);
    cfg.afc = afc;
    const Medium medium = build_medium(cfg);

    const double fwhm = 4.0 * 2.0 * std::numbers::ln2 / (kPi * afc.bandwidth());
    const double period = 1.0 / afc.delta;
    const PulseTrace input = gaussian_pulse(fwhm, period, 0.0, 4.0 * period, fwhm / 32.0);
    return simulate_bare(medium, input, afc.delta);
}

/// Comb with finesse `f_afc` and effective depth `d_tilde` (d0 = 0).
inline AfcParams comb_for(double delta, double f_afc, double d_tilde, int peak_count = 16) {
    AfcParams afc;
    afc.delta = delta;
    afc.gamma = delta / f_afc;
    afc.peak_count = peak_count;
    afc.d_peak = d_tilde * f_afc;
    afc.d0 = 0.0;
    return afc;
}

struct DesignVerification {
    double simulated_eta_bare = 0.0;
    double predicted_eta_bare = 0.0;
    double ratio() const noexcept { return simulated_eta_bare / predicted_eta_bare; }
};

/// Re-runs a design through the single-pass simulation.
inline DesignVerification verify_design(const DesignResult& design, const DesignConstraints& c) {
    AfcParams afc;
    afc.delta = design.delta;
    afc.gamma = design.delta / design.f_afc;
    afc.peak_count = c.min_peak_count;
    afc.d_peak = design.d;
    afc.d0 = c.d0;
    const StorageRun run = single_pass_comb_run(afc, c.length);
    return DesignVerification{run.result.efficiency, design.predicted_eta_bare};
}

}  // namespace afcmem
