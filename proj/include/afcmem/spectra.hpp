#pragma once

// Engineered absorption spectra: inhomogeneous line, spectral pit, AFC comb.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "afcmem/constants.hpp"
#include "afcmem/error.hpp"
#include "afcmem/grid.hpp"

namespace afcmem {

enum class LineShape { Gaussian, Lorentzian };
enum class PeakShape { Gaussian, Square };

/// Absorption coefficient alpha(nu) (1/m, intensity) over a propagation length.
struct AbsorptionProfile {
    FrequencyGrid grid;
    std::vector<double> alpha;
    double length = 0.0;  // m

    AbsorptionProfile(FrequencyGrid g, std::vector<double> a, double len)
        : grid(g), alpha(std::move(a)), length(len) {
        if (alpha.size() != grid.size())
            throw PhysicsError("AbsorptionProfile", "alpha size does not match grid");
        if (!(length > 0.0)) throw PhysicsError("AbsorptionProfile", "length must be positive");
        for (double v : alpha)
            if (!std::isfinite(v) || v < 0.0)
                throw PhysicsError("AbsorptionProfile", "alpha must be finite and non-negative");
    }

    /// Empty medium.
    static AbsorptionProfile zero(const FrequencyGrid& g, double len) {
        return AbsorptionProfile(g, std::vector<double>(g.size(), 0.0), len);
    }

    double depth(std::size_t i) const noexcept { return alpha[i] * length; }

    std::vector<double> depths() const {
        std::vector<double> d(alpha.size());
        std::transform(alpha.begin(), alpha.end(), d.begin(), [&](double a) { return a * length; });
        return d;
    }

    double max_alpha() const noexcept { return *std::max_element(alpha.begin(), alpha.end()); }
};

/// Comb parameters. delta and gamma in Hz; depths dimensionless.
struct AfcParams {
    double delta = 0.0;
    double gamma = 0.0;
    int peak_count = 0;
    double d_peak = 0.0;
    double d0 = 0.0;
    PeakShape peak_shape = PeakShape::Gaussian;

    double finesse() const noexcept { return delta / gamma; }
    double effective_depth() const noexcept { return (d_peak - d0) / finesse(); }
    double bandwidth() const noexcept { return static_cast<double>(peak_count) * delta; }

    void validate(const char* operation) const {
        if (!(gamma > 0.0) || !(delta > gamma))
            throw PhysicsError(operation, "comb requires delta > gamma > 0");
        if (peak_count < 0) throw PhysicsError(operation, "peak_count must be non-negative");
        if (!(d0 >= 0.0) || !(d_peak >= d0))
            throw PhysicsError(operation, "comb requires d_peak >= d0 >= 0");
    }
};

namespace detail {

inline double gaussian_unit(double x, double fwhm) noexcept {
    const double u = x / fwhm;
    return std::exp(-4.0 * std::numbers::ln2 * u * u);
}

inline double lorentzian_unit(double x, double fwhm) noexcept {
    const double u = 2.0 * x / fwhm;
    return 1.0 / (1.0 + u * u);
}

// 0 at the window edge, 1 once `width` outside it.
inline double raised_cosine(double outside, double width) noexcept {
    if (outside <= 0.0) return 0.0;
    if (outside >= width) return 1.0;
    return 0.5 * (1.0 - std::cos(kPi * outside / width));
}

}  // namespace detail

/// Inhomogeneously broadened line with peak alpha_peak at `center`.
inline AbsorptionProfile inhomogeneous_line(const FrequencyGrid& grid, double alpha_peak, double fwhm,
                                            double center, LineShape shape, double length) {
    if (!(alpha_peak >= 0.0)) throw PhysicsError("inhomogeneous_line", "alpha_peak must be non-negative");
    if (!(fwhm > 0.0)) throw PhysicsError("inhomogeneous_line", "fwhm must be positive");
    if (fwhm < 4.0 * grid.spacing())
        throw PhysicsError("inhomogeneous_line", "fwhm is below 4 grid spacings (unresolvable)");
    std::vector<double> alpha(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.at(i) - center;
        const double s = shape == LineShape::Gaussian ? detail::gaussian_unit(x, fwhm)
                                                      : detail::lorentzian_unit(x, fwhm);
        alpha[i] = alpha_peak * s;
    }
    return AbsorptionProfile(grid, std::move(alpha), length);
}

/// Burns a transmission window of width `pit_width` at `pit_center`.
///
/// Inside [center +- width/2] alpha becomes `residual_alpha`. Over the next
/// `edge_width` on each side a raised cosine blends back to the original.
inline AbsorptionProfile carve_pit(const AbsorptionProfile& profile, double pit_center, double pit_width,
                                   double residual_alpha, double edge_width = 1e6) {
    const auto& grid = profile.grid;
    if (!(pit_width > 0.0)) throw PhysicsError("carve_pit", "pit width must be positive");
    if (!(residual_alpha >= 0.0)) throw PhysicsError("carve_pit", "residual alpha must be non-negative");
    if (!(edge_width >= 0.0)) throw PhysicsError("carve_pit", "edge width must be non-negative");
    const double half = 0.5 * pit_width;
    if (pit_center - half - edge_width < grid.front() || pit_center + half + edge_width > grid.back())
        throw PhysicsError("carve_pit", "pit extends beyond the grid");

    double window_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid.at(i) - pit_center) <= half) window_min = std::min(window_min, profile.alpha[i]);
    if (std::isfinite(window_min) && residual_alpha > window_min * (1.0 + 1e-12))
        throw PhysicsError("carve_pit", "residual alpha exceeds the original alpha inside the pit");

    std::vector<double> alpha = profile.alpha;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double outside = std::abs(grid.at(i) - pit_center) - half;
        if (outside > edge_width) continue;
        const double w = edge_width > 0.0 ? detail::raised_cosine(outside, edge_width) : (outside > 0.0 ? 1.0 : 0.0);
        const double orig = profile.alpha[i];
        // Never raise absorption above the original on the skirts.
        alpha[i] = std::min(orig, residual_alpha + w * (orig - residual_alpha));
    }
    return AbsorptionProfile(grid, std::move(alpha), profile.length);
}

/// Writes an AFC centred on `comb_center` on top of an existing (low) region.
inline AbsorptionProfile write_afc(const AbsorptionProfile& profile, const AfcParams& params,
                                   double comb_center) {
    params.validate("write_afc");
    if (params.peak_count == 0) return profile;
    const auto& grid = profile.grid;
    if (params.gamma < 4.0 * grid.spacing())
        throw PhysicsError("write_afc", "peak width is below 4 grid spacings (unresolvable)");

    const double half_band = 0.5 * params.bandwidth();
    if (comb_center - half_band < grid.front() || comb_center + half_band > grid.back())
        throw PhysicsError("write_afc", "comb extends beyond the grid");

    // The comb band must sit in a transparent region (a pit or an empty medium).
    const double limit = 0.1 * profile.max_alpha();
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid.at(i) - comb_center) <= half_band && profile.alpha[i] > limit)
            throw PhysicsError("write_afc", "comb is wider than the transparent pit it is written into");

    const double L = profile.length;
    const double contrast = (params.d_peak - params.d0) / L;
    const double background = params.d0 / L;
    std::vector<double> alpha = profile.alpha;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.at(i) - comb_center;
        if (std::abs(x) <= half_band) alpha[i] += background;
        if (contrast == 0.0) continue;
        double sum = 0.0;
        for (int k = 0; k < params.peak_count; ++k) {
            const double pos = (static_cast<double>(k) - 0.5 * (params.peak_count - 1)) * params.delta;
            const double u = x - pos;
            if (params.peak_shape == PeakShape::Gaussian) {
                if (std::abs(u) < 6.0 * params.gamma) sum += detail::gaussian_unit(u, params.gamma);
            } else if (std::abs(u) <= 0.5 * params.gamma) {
                sum += 1.0;
            }
        }
        alpha[i] += contrast * sum;
    }
    return AbsorptionProfile(grid, std::move(alpha), profile.length);
}

namespace detail {

// Linear-interpolated crossing of `level` walking from `peak` in direction `step`.
inline bool half_crossing(const std::vector<double>& d, std::size_t peak, int step, double level,
                          std::size_t lo, std::size_t hi, double& where) {
    std::size_t i = peak;
    while (true) {
        if ((step < 0 && i <= lo) || (step > 0 && i >= hi)) return false;
        const std::size_t j = step < 0 ? i - 1 : i + 1;
        if (d[j] < level) {
            const double frac = (d[i] - level) / (d[i] - d[j]);
            where = static_cast<double>(i) + step * frac;
            return true;
        }
        i = j;
    }
}

}  // namespace detail

/// Recovers comb parameters from a profile.
///
/// Maxima must exceed the band minimum by 10% of the band's depth range;
/// plateaus resolve to their lowest-frequency point. Peak centres are the
/// midpoints of the half-maximum crossings, measured against the mean
/// inter-peak minimum.
inline AfcParams afc_metrics(const AbsorptionProfile& profile, FrequencyBand band) {
    const auto& grid = profile.grid;
    const std::vector<double> d = profile.depths();
    std::size_t lo = grid.nearest(band.lo);
    std::size_t hi = grid.nearest(band.hi);
    if (grid.at(lo) < band.lo && lo + 1 < grid.size()) ++lo;
    if (grid.at(hi) > band.hi && hi > 0) --hi;
    if (hi < lo + 2) throw PhysicsError("afc_metrics", "band is narrower than three grid points");

    const auto [mn_it, mx_it] = std::minmax_element(d.begin() + lo, d.begin() + hi + 1);
    const double dmin = *mn_it;
    const double dmax = *mx_it;
    const double threshold = dmin + 0.1 * (dmax - dmin);

    std::vector<std::size_t> peaks;
    if (dmax > dmin) {
        for (std::size_t i = lo + 1; i < hi; ++i)
            if (d[i] > d[i - 1] && d[i] >= d[i + 1] && d[i] > threshold) peaks.push_back(i);
    }
    if (peaks.size() < 2) throw PhysicsError("afc_metrics", "fewer than 2 comb peaks found in band");

    std::vector<double> minima;
    for (std::size_t k = 0; k + 1 < peaks.size(); ++k)
        minima.push_back(*std::min_element(d.begin() + peaks[k], d.begin() + peaks[k + 1] + 1));
    const double base = std::accumulate(minima.begin(), minima.end(), 0.0) / minima.size();

    std::vector<double> centres, widths, heights;
    for (std::size_t p : peaks) {
        double height = d[p];
        // Parabolic refinement only for strict maxima; plateaus keep the sampled value.
        if (d[p] > d[p + 1]) {
            const double a = d[p - 1], b = d[p], c = d[p + 1];
            const double denom = a - 2.0 * b + c;
            if (denom < 0.0) {
                const double off = 0.5 * (a - c) / denom;
                height = b - 0.25 * (a - c) * off;
            }
        }
        const double level = base + 0.5 * (height - base);
        double left = 0.0, right = 0.0;
        if (!detail::half_crossing(d, p, -1, level, lo, hi, left) ||
            !detail::half_crossing(d, p, +1, level, lo, hi, right))
            continue;
        centres.push_back(grid.front() + 0.5 * (left + right) * grid.spacing());
        widths.push_back((right - left) * grid.spacing());
        heights.push_back(height);
    }
    if (centres.size() < 2) throw PhysicsError("afc_metrics", "fewer than 2 resolvable comb peaks in band");

    AfcParams out;
    out.peak_count = static_cast<int>(centres.size());
    out.delta = (centres.back() - centres.front()) / static_cast<double>(centres.size() - 1);
    out.gamma = std::accumulate(widths.begin(), widths.end(), 0.0) / widths.size();
    out.d_peak = std::accumulate(heights.begin(), heights.end(), 0.0) / heights.size();
    out.d0 = base;
    out.peak_shape = PeakShape::Gaussian;
    return out;
}

/// Trapezoidal integral of alpha over a band (1/m * Hz).
inline double spectral_area(const AbsorptionProfile& profile, FrequencyBand band) {
    const auto& grid = profile.grid;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double f0 = grid.at(i), f1 = grid.at(i + 1);
        if (f1 < band.lo || f0 > band.hi) continue;
        sum += 0.5 * (profile.alpha[i] + profile.alpha[i + 1]) * grid.spacing();
    }
    return sum;
}

inline const char* to_string(PeakShape s) noexcept { return s == PeakShape::Gaussian ? "gaussian" : "square"; }
inline const char* to_string(LineShape s) noexcept { return s == LineShape::Gaussian ? "gaussian" : "lorentzian"; }

}  // namespace afcmem
