#pragma once

// Pulse storage as stationary linear filtering: pulses, transfer functions,
// echo detection and the analytic AFC efficiency.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "afcmem/cavity.hpp"
#include "afcmem/constants.hpp"
#include "afcmem/dispersion.hpp"
#include "afcmem/error.hpp"
#include "afcmem/fft.hpp"
#include "afcmem/grid.hpp"
#include "afcmem/spectra.hpp"

namespace afcmem {

/// Complex envelope sampled at t0 + i*dt. Energy is sum |a|^2 dt.
struct PulseTrace {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<Complex> samples;

    double time(std::size_t i) const noexcept { return t0 + dt * static_cast<double>(i); }
    double span() const noexcept { return dt * static_cast<double>(samples.size()); }

    double intensity(std::size_t i) const noexcept { return std::norm(samples[i]); }

    double energy() const noexcept {
        double e = 0.0;
        for (const auto& s : samples) e += std::norm(s);
        return e * dt;
    }

    /// Energy inside [from, to].
    double energy_between(double from, double to) const noexcept {
        double e = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double t = time(i);
            if (t >= from && t <= to) e += std::norm(samples[i]);
        }
        return e * dt;
    }

    double centroid() const noexcept {
        double w = 0.0, m = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double p = std::norm(samples[i]);
            w += p;
            m += p * time(i);
        }
        return w > 0.0 ? m / w : t0;
    }

    /// Intensity FWHM with linear interpolation at the half-maximum crossings.
    double intensity_fwhm() const {
        std::size_t peak = 0;
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (intensity(i) > intensity(peak)) peak = i;
        const double half = 0.5 * intensity(peak);
        std::size_t l = peak, r = peak;
        while (l > 0 && intensity(l - 1) >= half) --l;
        while (r + 1 < samples.size() && intensity(r + 1) >= half) ++r;
        if (l == 0 || r + 1 == samples.size()) throw PhysicsError("intensity_fwhm", "pulse touches the window edge");
        const double left = static_cast<double>(l) - (intensity(l) - half) / (intensity(l) - intensity(l - 1));
        const double right = static_cast<double>(r) + (intensity(r) - half) / (intensity(r) - intensity(r + 1));
        return (right - left) * dt;
    }

    PulseTrace scaled(Complex c) const {
        PulseTrace out = *this;
        for (auto& s : out.samples) s *= c;
        return out;
    }
};

/// Complex spectral response on a frequency grid. A pulse's baseband
/// frequency f maps onto grid frequency grid.center() + f.
struct SpectralResponse {
    FrequencyGrid grid;
    std::vector<Complex> values;

    Complex at(double grid_freq) const noexcept {
        const double pos = grid.position(grid_freq);
        if (pos <= 0.0) return values.front();
        const double last = static_cast<double>(values.size() - 1);
        if (pos >= last) return values.back();
        const auto i = static_cast<std::size_t>(pos);
        const double w = pos - static_cast<double>(i);
        return (1.0 - w) * values[i] + w * values[i + 1];
    }
};

struct StorageResult {
    double efficiency = 0.0;
    double echo_time = 0.0;   // s, absolute time of the echo centroid
    double input_time = 0.0;  // s, centroid of the input pulse
    double echo_energy = 0.0;
    double direct_fraction = 0.0;
    double input_energy = 0.0;

    double echo_delay() const noexcept { return echo_time - input_time; }
};

namespace detail {

// Spectrum convention: S(f) = sum a(t) exp(+i 2 pi f t) dt, so that a response
// exp(i 2 pi f T) delays by T (fields oscillate as exp(-i 2 pi nu t)).
inline std::size_t padded_length(std::size_t samples, double dt, double min_resolution) {
    std::size_t n = next_power_of_two(4 * samples);
    if (min_resolution > 0.0) {
        const double needed = 1.0 / (dt * min_resolution);
        constexpr std::size_t kMax = std::size_t{1} << 22;
        while (static_cast<double>(n) < needed && n < kMax) n <<= 1;
    }
    return n;
}

}  // namespace detail

/// Unit-energy Gaussian with intensity FWHM `fwhm`, on a window starting at t = 0.
inline PulseTrace gaussian_pulse(double fwhm, double center_time, double carrier_detuning, double trace_span,
                                 double dt) {
    if (!(dt > 0.0)) throw PhysicsError("gaussian_pulse", "dt must be positive");
    if (!(fwhm >= 8.0 * dt)) throw PhysicsError("gaussian_pulse", "fwhm must span at least 8 samples");
    if (!(trace_span > 0.0)) throw PhysicsError("gaussian_pulse", "trace span must be positive");
    const auto count = static_cast<std::size_t>(std::llround(trace_span / dt));
    const double end = dt * static_cast<double>(count);
    // Intensity sigma; the field sigma is sqrt(2) larger.
    const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const double tail = 0.5 * std::erfc((center_time) / (std::sqrt(2.0) * sigma)) +
                        0.5 * std::erfc((end - center_time) / (std::sqrt(2.0) * sigma));
    if (!(center_time > 0.0 && center_time < end) || tail > 1e-6)
        throw PhysicsError("gaussian_pulse", "pulse is clipped by the time window");

    PulseTrace out{0.0, dt, std::vector<Complex>(count)};
    for (std::size_t i = 0; i < count; ++i) {
        const double t = out.time(i) - center_time;
        const double env = std::exp(-t * t / (4.0 * sigma * sigma));
        out.samples[i] = std::polar(env, -2.0 * kPi * carrier_detuning * t);
    }
    const double norm = 1.0 / std::sqrt(out.energy());
    for (auto& s : out.samples) s *= norm;
    return out;
}

/// Spectrum of a trace on a zero-padded grid: (frequencies, S(f)).
struct TraceSpectrum {
    std::vector<double> freq;
    std::vector<Complex> value;
    double df = 0.0;

    double energy() const noexcept {
        double e = 0.0;
        for (const auto& v : value) e += std::norm(v);
        return e * df;
    }
};

inline TraceSpectrum spectrum(const PulseTrace& trace, std::size_t padded = 0) {
    const std::size_t m = trace.samples.size();
    const std::size_t n = padded ? padded : detail::padded_length(m, trace.dt, 0.0);
    std::vector<Complex> buf(n, 0.0);
    std::copy(trace.samples.begin(), trace.samples.end(), buf.begin());
    fft::transform(buf, fft::Sign::Positive);
    TraceSpectrum out;
    out.df = 1.0 / (static_cast<double>(n) * trace.dt);
    out.freq.resize(n);
    out.value.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = static_cast<double>(fft::bin_index(k, n)) * out.df;
        out.freq[k] = f;
        // Reference the phase to the actual sample times.
        out.value[k] = buf[k] * trace.dt * std::polar(1.0, 2.0 * kPi * f * trace.t0);
    }
    return out;
}

/// Linear time-invariant filtering by `transfer`.
///
/// The trace is zero-padded (at least x4, and until the spectral step is no
/// coarser than 4 transfer-grid spacings) so the filter's long memory does
/// not wrap around; the output covers the input window.
inline PulseTrace propagate(const PulseTrace& pulse, const SpectralResponse& transfer) {
    const std::size_t m = pulse.samples.size();
    if (m == 0) throw PhysicsError("propagate", "empty pulse");
    const std::size_t n = detail::padded_length(m, pulse.dt, 4.0 * transfer.grid.spacing());
    std::vector<Complex> buf(n, 0.0);
    std::copy(pulse.samples.begin(), pulse.samples.end(), buf.begin());
    fft::transform(buf, fft::Sign::Positive);

    const double df = 1.0 / (static_cast<double>(n) * pulse.dt);
    double peak = 0.0;
    for (const auto& v : buf) peak = std::max(peak, std::norm(v));
    const double centre = transfer.grid.center();
    for (std::size_t k = 0; k < n; ++k) {
        const double f = static_cast<double>(fft::bin_index(k, n)) * df;
        const double g = centre + f;
        if (!transfer.grid.contains(g) && std::norm(buf[k]) > 1e-6 * peak)
            throw PhysicsError("propagate", "transfer grid does not cover the pulse spectrum");
        buf[k] *= transfer.at(g);
    }
    fft::transform(buf, fft::Sign::Negative);
    PulseTrace out{pulse.t0, pulse.dt, std::vector<Complex>(m)};
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < m; ++i) out.samples[i] = buf[i] * inv;
    return out;
}

/// Single-pass field transfer exp(-alpha L / 2) exp(i 2 pi nu (n_r - n_bg) L / c0).
inline SpectralResponse medium_transfer(const AbsorptionProfile& profile, const IndexProfile& index) {
    require_same_grid(profile.grid, index.grid, "medium_transfer");
    const double L = profile.length;
    SpectralResponse out{profile.grid, std::vector<Complex>(profile.grid.size())};
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double nu = index.optical_frequency(i);
        const double phase = 2.0 * kPi * nu * (index.n_r[i] - index.n_bg) * L / kSpeedOfLight;
        out.values[i] = std::polar(std::exp(-0.5 * profile.alpha[i] * L), phase);
    }
    return out;
}

enum class CavityPort { Reflection, Transmission };

inline SpectralResponse cavity_transfer(const CavitySpectra& spectra, CavityPort port) {
    return SpectralResponse{spectra.grid, port == CavityPort::Reflection ? spectra.r_amp : spectra.t_amp};
}

/// Echo efficiency of `output` relative to `input`.
///
/// Windows of full width `gate` (default 2 x input FWHM) sit at the input
/// centroid (direct light) and one comb period 1/delta later (first echo).
inline StorageResult measure_efficiency(const PulseTrace& output, const PulseTrace& input, double delta,
                                        std::optional<double> gate = std::nullopt) {
    if (!(delta > 0.0)) throw PhysicsError("measure_efficiency", "comb spacing must be positive");
    const double width = gate.value_or(2.0 * input.intensity_fwhm());
    if (!(width > 0.0)) throw PhysicsError("measure_efficiency", "gate must be positive");
    const double period = 1.0 / delta;
    if (width > period) throw PhysicsError("measure_efficiency", "direct and echo gates overlap");

    StorageResult r;
    r.input_energy = input.energy();
    if (!(r.input_energy > 0.0)) throw PhysicsError("measure_efficiency", "input carries no energy");
    r.input_time = input.centroid();
    const double echo_centre = r.input_time + period;
    const double half = 0.5 * width;
    if (echo_centre + half > output.time(output.samples.size() - 1) || r.input_time - half < output.t0)
        throw PhysicsError("measure_efficiency", "output window does not contain both gates");

    double w = 0.0, m = 0.0;
    for (std::size_t i = 0; i < output.samples.size(); ++i) {
        const double t = output.time(i);
        if (std::abs(t - echo_centre) <= half) {
            const double p = output.intensity(i);
            w += p;
            m += p * t;
        }
    }
    r.echo_energy = w * output.dt;
    r.echo_time = w > 0.0 ? m / w : echo_centre;
    r.efficiency = r.echo_energy / r.input_energy;
    r.direct_fraction = output.energy_between(r.input_time - half, r.input_time + half) / r.input_energy;
    return r;
}

/// d_tilde^2 exp(-d_tilde) exp(-7 / F^2) exp(-d0), d_tilde = (d - d0) / F.
inline double afc_efficiency_analytic(double d, double d0, double f_afc) {
    if (!(d0 >= 0.0)) throw PhysicsError("afc_efficiency_analytic", "background depth must be non-negative");
    if (!(d >= d0)) throw PhysicsError("afc_efficiency_analytic", "peak depth must not be below background");
    if (!(f_afc > 1.0)) throw PhysicsError("afc_efficiency_analytic", "comb finesse must exceed 1");
    const double dt = (d - d0) / f_afc;
    return dt * dt * std::exp(-dt) * std::exp(-7.0 / (f_afc * f_afc)) * std::exp(-d0);
}

inline double enhancement_factor(double eta_cavity, double eta_bare) {
    if (!(eta_bare > 0.0)) throw PhysicsError("enhancement_factor", "bare efficiency must be positive");
    return eta_cavity / eta_bare;
}

/// Optional excited-state dephasing applied to an echo efficiency.
inline double decoherence_factor(double echo_delay, double t2) {
    if (!(t2 > 0.0)) throw PhysicsError("decoherence_factor", "T2 must be positive");
    return std::exp(-2.0 * echo_delay / t2);
}

}  // namespace afcmem
