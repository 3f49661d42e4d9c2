#pragma once

// Refractive index from absorption via the narrowband Kramers-Kronig relation,
// group index, and the slow-light group velocity estimate.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "afcmem/constants.hpp"
#include "afcmem/error.hpp"
#include "afcmem/fft.hpp"
#include "afcmem/grid.hpp"
#include "afcmem/spectra.hpp"

namespace afcmem {

/// Real phase index and group index on a grid.
///
/// Grid values are read as offsets in a frame whose centre sits at the
/// optical carrier: the optical frequency of point i is
/// carrier_hz + (grid.at(i) - grid.center()). An absolute grid centred on
/// the carrier therefore reads directly as optical frequency.
struct IndexProfile {
    FrequencyGrid grid;
    std::vector<double> n_r;
    std::vector<double> n_g;
    double n_bg = kDefaultHostIndex;
    double carrier_hz = kSpeedOfLight / kDefaultWavelength;
    bool edge_leakage = false;  // absorption was non-negligible at the grid edges

    double optical_frequency(double grid_freq) const noexcept {
        return carrier_hz + (grid_freq - grid.center());
    }
    double optical_frequency(std::size_t i) const noexcept { return optical_frequency(grid.at(i)); }
    double wavelength() const noexcept { return kSpeedOfLight / carrier_hz; }

    /// Points whose derivative used a one-sided stencil.
    bool is_edge(std::size_t i) const noexcept { return i == 0 || i + 1 == grid.size(); }
};

namespace detail {

inline constexpr std::size_t kKkPadding = 4;
inline constexpr double kEdgeLeakageFraction = 1e-3;

// Multiplies the spectrum of a real signal by +i*sgn(k). With zero padding this
// is the discrete form of (1/pi) PV int f(x') / (x' - x) dx'.
inline std::vector<double> conjugate_transform_padded(const std::vector<double>& signal, double sign) {
    const std::size_t n = signal.size();
    const std::size_t padded = n * kKkPadding;
    std::vector<fft::Complex> buf(padded, 0.0);
    for (std::size_t i = 0; i < n; ++i) buf[i] = signal[i];
    fft::transform(buf, fft::Sign::Negative);
    for (std::size_t k = 0; k < padded; ++k) {
        const long b = fft::bin_index(k, padded);
        if (b == 0 || k == padded / 2) {
            buf[k] = 0.0;
        } else {
            const double s = b > 0 ? sign : -sign;
            buf[k] *= fft::Complex(0.0, s);
        }
    }
    fft::transform(buf, fft::Sign::Positive);
    std::vector<double> out(padded);
    for (std::size_t i = 0; i < padded; ++i) out[i] = buf[i].real() / static_cast<double>(padded);
    return out;
}

inline std::vector<double> conjugate_transform(const std::vector<double>& signal, double sign) {
    std::vector<double> out = conjugate_transform_padded(signal, sign);
    out.resize(signal.size());
    return out;
}

inline std::vector<double> group_index_from(const FrequencyGrid& grid, const std::vector<double>& n_r,
                                            double carrier_hz) {
    const std::size_t n = grid.size();
    std::vector<double> n_g(n);
    const double h = grid.spacing();
    for (std::size_t i = 0; i < n; ++i) {
        double slope;
        if (i == 0)
            slope = (n_r[1] - n_r[0]) / h;
        else if (i + 1 == n)
            slope = (n_r[n - 1] - n_r[n - 2]) / h;
        else
            slope = (n_r[i + 1] - n_r[i - 1]) / (2.0 * h);
        const double nu = carrier_hz + (grid.at(i) - grid.center());
        n_g[i] = n_r[i] + nu * slope;
    }
    return n_g;
}

}  // namespace detail

/// Builds an IndexProfile from an explicit phase index (group index derived).
inline IndexProfile make_index_profile(const FrequencyGrid& grid, std::vector<double> n_r, double n_bg,
                                       double carrier_hz) {
    if (n_r.size() != grid.size()) throw PhysicsError("make_index_profile", "n_r size does not match grid");
    IndexProfile out{grid, std::move(n_r), {}, n_bg, carrier_hz, false};
    out.n_g = detail::group_index_from(grid, out.n_r, carrier_hz);
    return out;
}

/// Phase index n_bg + dn(nu) from the absorption spectrum.
///
/// The absorption deviation from a straight baseline through the two edge
/// points is converted to the extinction coefficient kappa = c0 alpha / (4 pi nu)
/// and Hilbert transformed (zero-padded x4). The baseline removes any
/// broadband absorption that the window cannot represent; when the edge
/// values are non-negligible the result carries `edge_leakage`.
inline IndexProfile kramers_kronig(const AbsorptionProfile& profile, double n_bg,
                                   double wavelength_ref = kDefaultWavelength) {
    if (!(wavelength_ref > 0.0)) throw PhysicsError("kramers_kronig", "reference wavelength must be positive");
    const auto& grid = profile.grid;
    const std::size_t n = grid.size();
    for (double a : profile.alpha)
        if (!std::isfinite(a) || a < 0.0) throw PhysicsError("kramers_kronig", "alpha must be finite and non-negative");

    const double carrier = kSpeedOfLight / wavelength_ref;
    const double first = profile.alpha.front();
    const double last = profile.alpha.back();
    const double peak = profile.max_alpha();

    std::vector<double> kappa(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
        const double deviation = profile.alpha[i] - (first + frac * (last - first));
        const double nu = carrier + (grid.at(i) - grid.center());
        kappa[i] = kSpeedOfLight * deviation / (4.0 * kPi * nu);
    }
    std::vector<double> dn = detail::conjugate_transform(kappa, +1.0);

    IndexProfile out{grid, std::vector<double>(n), {}, n_bg, carrier, false};
    for (std::size_t i = 0; i < n; ++i) out.n_r[i] = n_bg + dn[i];
    out.n_g = detail::group_index_from(grid, out.n_r, carrier);
    out.edge_leakage = peak > 0.0 && std::max(first, last) > detail::kEdgeLeakageFraction * peak;
    return out;
}

/// Inverse direction (index -> absorption), for self-consistency checks only.
///
/// The transform loses the mean of the padded signal; it is restored by
/// requiring the recovered extinction to vanish, on average, outside the window.
inline AbsorptionProfile absorption_from_index(const IndexProfile& index, double length) {
    const auto& grid = index.grid;
    const std::size_t n = grid.size();
    std::vector<double> dn(n);
    for (std::size_t i = 0; i < n; ++i) dn[i] = index.n_r[i] - index.n_bg;
    const std::vector<double> padded = detail::conjugate_transform_padded(dn, -1.0);
    double outside = 0.0;
    for (std::size_t i = n; i < padded.size(); ++i) outside += padded[i];
    const double offset = -outside / static_cast<double>(padded.size() - n);
    std::vector<double> alpha(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double nu = index.optical_frequency(i);
        // Round-off can leave tiny negative values where the absorption is zero.
        alpha[i] = std::max(0.0, 4.0 * kPi * nu * (padded[i] + offset) / kSpeedOfLight);
    }
    return AbsorptionProfile(grid, std::move(alpha), length);
}

/// n_r + nu dn_r/dnu at a grid frequency, by central differences.
inline double group_index(const IndexProfile& index, double at) {
    const auto& grid = index.grid;
    const double pos = grid.position(at);
    if (!(pos >= 2.0) || !(pos <= static_cast<double>(grid.size()) - 3.0))
        throw PhysicsError("group_index", "frequency is outside the grid interior");
    // Linear interpolation between the two neighbouring interior points.
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double w = pos - static_cast<double>(i);
    if (w == 0.0) return index.n_g[i];
    return (1.0 - w) * index.n_g[i] + w * index.n_g[i + 1];
}

/// Slow-light group velocity 2 pi Gamma / alpha inside a transmission window.
inline double slow_light_vg(double pit_width, double alpha) {
    if (!(pit_width > 0.0)) throw PhysicsError("slow_light_vg", "pit width must be positive");
    if (!(alpha > 0.0)) throw PhysicsError("slow_light_vg", "absorption must be positive");
    return 2.0 * kPi * pit_width / alpha;
}

}  // namespace afcmem
