#pragma once

// Two-mirror cavity around a dispersive absorber.

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "afcmem/constants.hpp"
#include "afcmem/dispersion.hpp"
#include "afcmem/error.hpp"
#include "afcmem/grid.hpp"
#include "afcmem/spectra.hpp"

namespace afcmem {

using Complex = std::complex<double>;

struct CavitySpec {
    double length = 2e-3;  // m
    double r1 = 0.8;       // input mirror intensity reflectivity
    double r2 = 0.997;     // back mirror intensity reflectivity
    double n_bg = kDefaultHostIndex;
    double length_offset = 0.0;  // m, wedge position; sub-wavelength
    /// Extra round-trip field factor (beam walk-off, finesse degradation). 1 = off.
    double walkoff_factor = 1.0;

    void validate(const char* operation) const {
        if (!(length > 0.0)) throw PhysicsError(operation, "cavity length must be positive");
        if (!(r1 >= 0.0 && r1 <= 1.0) || !(r2 >= 0.0 && r2 <= 1.0))
            throw PhysicsError(operation, "mirror reflectivities must lie in [0, 1]");
        if (!(n_bg > 0.0)) throw PhysicsError(operation, "host index must be positive");
        if (!(walkoff_factor > 0.0 && walkoff_factor <= 1.0))
            throw PhysicsError(operation, "walk-off factor must lie in (0, 1]");
        if (!std::isfinite(length_offset)) throw PhysicsError(operation, "length offset must be finite");
    }
};

/// Per-point field factors for one pass and one round trip through the medium.
struct RoundTrip {
    FrequencyGrid grid;
    std::vector<Complex> single_pass;  // exp(-alpha L / 2) exp(i 2 pi nu n_r L / c0) with tuning phase / 2
    std::vector<Complex> g;            // single_pass^2
};

struct CavitySpectra {
    FrequencyGrid grid;
    std::vector<Complex> r_amp;
    std::vector<Complex> t_amp;

    double reflectance(std::size_t i) const noexcept { return std::norm(r_amp[i]); }
    double transmittance(std::size_t i) const noexcept { return std::norm(t_amp[i]); }
    double absorbed(std::size_t i) const noexcept { return 1.0 - reflectance(i) - transmittance(i); }
};

struct CavityModeList {
    std::vector<double> mode_frequencies;
    std::vector<double> mode_fwhm;
    std::vector<double> mode_peak_transmission;

    std::size_t size() const noexcept { return mode_frequencies.size(); }

    std::vector<double> spacings() const {
        std::vector<double> out;
        for (std::size_t i = 1; i < mode_frequencies.size(); ++i)
            out.push_back(mode_frequencies[i] - mode_frequencies[i - 1]);
        return out;
    }

    double mean_spacing() const {
        if (size() < 2) throw PhysicsError("CavityModeList", "need at least two modes for a spacing");
        return (mode_frequencies.back() - mode_frequencies.front()) / static_cast<double>(size() - 1);
    }
};

/// Constant tuning phase of the wedge offset: 4 pi n_bg dL / lambda_ref.
/// dL = lambda_ref / (2 n_bg) shifts the round trip by exactly 2 pi.
inline double length_offset_phase(double length_offset, double n_bg, double wavelength_ref) {
    return 4.0 * kPi * n_bg * length_offset / wavelength_ref;
}

/// Complex single-pass and round-trip factors.
///
/// Loss and dispersion act over the nominal length L. The sub-wavelength
/// offset dL only adds the frequency-independent tuning phase above; its
/// effect on loss and FSR is of relative order dL/L and is neglected.
inline RoundTrip round_trip(const IndexProfile& index, const AbsorptionProfile& profile, const CavitySpec& spec) {
    spec.validate("round_trip");
    require_same_grid(index.grid, profile.grid, "round_trip");
    const double lambda = index.wavelength();
    if (std::abs(spec.length_offset) >= lambda)
        throw PhysicsError("round_trip", "length offset must be sub-wavelength");
    const auto& grid = profile.grid;
    const double L = spec.length;
    const double tuning = 0.5 * length_offset_phase(spec.length_offset, spec.n_bg, lambda);
    RoundTrip out{grid, std::vector<Complex>(grid.size()), std::vector<Complex>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double nu = index.optical_frequency(i);
        const double phase = 2.0 * kPi * nu * index.n_r[i] * L / kSpeedOfLight + tuning;
        const double amp = std::exp(-0.5 * profile.alpha[i] * L);
        out.single_pass[i] = std::polar(amp, phase);
        out.g[i] = out.single_pass[i] * out.single_pass[i];
    }
    return out;
}

/// Airy reflection and transmission; the direct reflection carries the minus sign.
inline CavitySpectra cavity_response(const RoundTrip& trip, const CavitySpec& spec) {
    spec.validate("cavity_response");
    const double s1 = std::sqrt(spec.r1), s2 = std::sqrt(spec.r2);
    const double coupling = std::sqrt((1.0 - spec.r1) * (1.0 - spec.r2));
    const double w = spec.walkoff_factor;
    const double sw = std::sqrt(w);
    CavitySpectra out{trip.grid, std::vector<Complex>(trip.g.size()), std::vector<Complex>(trip.g.size())};
    for (std::size_t i = 0; i < trip.g.size(); ++i) {
        const Complex g = w * trip.g[i];
        const Complex denom = 1.0 - s1 * s2 * g;
        out.r_amp[i] = (-s1 + s2 * g) / denom;
        out.t_amp[i] = coupling * sw * trip.single_pass[i] / denom;
    }
    return out;
}

namespace detail {

inline bool crossing(const std::vector<double>& y, std::size_t peak, int step, double level, std::size_t lo,
                     std::size_t hi, double& where) {
    std::size_t i = peak;
    while (true) {
        if ((step < 0 && i <= lo) || (step > 0 && i >= hi)) return false;
        const std::size_t j = step < 0 ? i - 1 : i + 1;
        if (y[j] < level) {
            where = static_cast<double>(i) + step * (y[i] - level) / (y[i] - y[j]);
            return true;
        }
        i = j;
    }
}

}  // namespace detail

/// Transmission maxima above threshold * (max |t|^2 in band).
///
/// Centres use a three-point parabolic refinement; FWHM is measured on |t|^2
/// with linear interpolation at the half-maximum crossings. Modes whose
/// half-maximum crossing falls outside the band are dropped.
inline CavityModeList find_modes(const CavitySpectra& spectra, double threshold,
                                 std::optional<FrequencyBand> band = std::nullopt) {
    const auto& grid = spectra.grid;
    std::size_t lo = 0, hi = grid.size() - 1;
    if (band) {
        lo = grid.nearest(band->lo);
        hi = grid.nearest(band->hi);
    }
    if (hi < lo + 2) throw PhysicsError("find_modes", "band is narrower than three grid points");
    std::vector<double> T(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) T[i] = spectra.transmittance(i);
    const double tmax = *std::max_element(T.begin() + lo, T.begin() + hi + 1);

    CavityModeList out;
    if (tmax > 0.0) {
        for (std::size_t i = lo + 1; i < hi; ++i) {
            if (!(T[i] > T[i - 1] && T[i] >= T[i + 1] && T[i] >= threshold * tmax)) continue;
            double centre = static_cast<double>(i);
            double peak = T[i];
            const double denom = T[i - 1] - 2.0 * T[i] + T[i + 1];
            if (denom < 0.0) {
                const double off = 0.5 * (T[i - 1] - T[i + 1]) / denom;
                centre += off;
                peak = T[i] - 0.25 * (T[i - 1] - T[i + 1]) * off;
            }
            double left = 0.0, right = 0.0;
            if (!detail::crossing(T, i, -1, 0.5 * peak, lo, hi, left) ||
                !detail::crossing(T, i, +1, 0.5 * peak, lo, hi, right))
                continue;
            out.mode_frequencies.push_back(grid.front() + centre * grid.spacing());
            out.mode_fwhm.push_back((right - left) * grid.spacing());
            out.mode_peak_transmission.push_back(peak);
        }
    }
    if (out.size() == 0) throw PhysicsError("find_modes", "no transmission modes above threshold");
    return out;
}

/// c0 / (2 n_bg L).
inline double cold_cavity_fsr(const CavitySpec& spec) {
    spec.validate("cold_cavity_fsr");
    return kSpeedOfLight / (2.0 * spec.n_bg * spec.length);
}

struct FinesseEstimate {
    double exact = 0.0;       // pi R^(1/4) / (1 - sqrt(R))
    double approx = 0.0;      // pi / d_tilde with R = exp(-2 d_tilde)
    bool approx_valid = false;  // 2 d_tilde << 1 (taken as <= 0.25)
};

/// Cavity finesse from the round-trip reflectance R.
inline FinesseEstimate cavity_finesse(double R) {
    if (!(R > 0.0 && R < 1.0)) throw PhysicsError("cavity_finesse", "reflectance must lie in (0, 1)");
    FinesseEstimate f;
    const double root = std::sqrt(R);
    f.exact = kPi * std::sqrt(root) / (1.0 - root);
    const double d_tilde = -0.5 * std::log(R);
    f.approx = kPi / d_tilde;
    f.approx_valid = 2.0 * d_tilde <= 0.25;
    return f;
}

/// Round-trip reflectance of an asymmetric mirror pair, R1 * R2, so that the
/// sqrt(R) of the finesse formula is the geometric mean sqrt(R1 R2).
inline double effective_reflectance(double r1, double r2, double walkoff_factor = 1.0) {
    return r1 * r2 * walkoff_factor * walkoff_factor;
}

/// pi Gamma / (F_cav d_pit).
inline double matched_linewidth(double pit_width, double finesse, double d_pit) {
    if (!(pit_width > 0.0) || !(finesse > 0.0) || !(d_pit > 0.0))
        throw PhysicsError("matched_linewidth", "all inputs must be positive");
    return kPi * pit_width / (finesse * d_pit);
}

/// Gamma / F_AFC, the first-order linewidth of a matched cavity.
inline double matched_linewidth_afc(double pit_width, double f_afc) {
    if (!(pit_width > 0.0) || !(f_afc > 0.0))
        throw PhysicsError("matched_linewidth_afc", "all inputs must be positive");
    return pit_width / f_afc;
}

/// On-resonance reflectance for single-pass depth d; zero iff sqrt(R1) = sqrt(R2) e^-d.
inline double impedance_mismatch(double r1, double r2, double d) {
    if (!(r1 >= 0.0 && r1 <= 1.0) || !(r2 >= 0.0 && r2 <= 1.0))
        throw PhysicsError("impedance_mismatch", "mirror reflectivities must lie in [0, 1]");
    if (!(d >= 0.0)) throw PhysicsError("impedance_mismatch", "depth must be non-negative");
    const double g = std::exp(-d);
    const double num = -std::sqrt(r1) + std::sqrt(r2) * g;
    const double den = 1.0 - std::sqrt(r1 * r2) * g;
    return (num * num) / (den * den);
}

/// d_pit at the memory position from the linewidth ratio, at equal Gamma and F_cav.
inline double pit_depth_ratio(double delta_c, double delta_qm, double d_pit_c) {
    if (!(delta_c > 0.0) || !(delta_qm > 0.0) || !(d_pit_c > 0.0))
        throw PhysicsError("pit_depth_ratio", "all inputs must be positive");
    return d_pit_c * delta_c / delta_qm;
}

/// Length offset in [0, lambda/(2 n_bg)) that puts the round-trip phase at
/// `at` (a grid frequency) equal to `target_phase` modulo 2 pi.
inline double length_offset_for_phase(const IndexProfile& index, const CavitySpec& spec, double at,
                                      double target_phase = 0.0) {
    spec.validate("length_offset_for_phase");
    const double pos = index.grid.position(at);
    if (!(pos >= 0.0 && pos <= static_cast<double>(index.grid.size() - 1)))
        throw PhysicsError("length_offset_for_phase", "frequency is outside the grid");
    const std::size_t i = index.grid.nearest(at);
    const double nu = index.optical_frequency(at);
    const double phase = 4.0 * kPi * nu * index.n_r[i] * spec.length / kSpeedOfLight;
    double needed = std::fmod(target_phase - phase, 2.0 * kPi);
    if (needed < 0.0) needed += 2.0 * kPi;
    const double lambda = index.wavelength();
    return needed * lambda / (4.0 * kPi * spec.n_bg);
}

}  // namespace afcmem
