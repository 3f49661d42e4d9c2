#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include "afcmem/constants.hpp"

namespace support {

/// Runs `body` for `cases` draws from a fixed-seed generator.
inline void for_all(std::uint32_t seed, int cases, const std::function<void(std::mt19937&, int)>& body) {
    std::mt19937 rng(seed);
    for (int k = 0; k < cases; ++k) body(rng, k);
}

inline double uniform(std::mt19937& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Dispersive partner of a Lorentzian absorption line alpha0 / (1 + x^2),
/// x = 2 (nu - nu0) / fwhm: dn = -(c0 alpha0 / (4 pi nu0)) x / (1 + x^2).
inline double lorentzian_dn(double detuning, double alpha0, double fwhm, double nu0) {
    const double x = 2.0 * detuning / fwhm;
    return -(afcmem::kSpeedOfLight * alpha0 / (4.0 * afcmem::kPi * nu0)) * x / (1.0 + x * x);
}

/// Index change of a sharp-edged transmission window of width `width` in a
/// flat absorber alpha0 (principal value integral of the missing absorption):
/// dn = (kappa0 / pi) ln |(x + a) / (x - a)|, a = width / 2, kappa0 = c0 alpha0 / (4 pi nu0).
inline double square_pit_dn(double detuning, double alpha0, double width, double nu0) {
    const double a = 0.5 * width;
    const double kappa0 = afcmem::kSpeedOfLight * alpha0 / (4.0 * afcmem::kPi * nu0);
    return kappa0 / afcmem::kPi * std::log(std::abs((detuning + a) / (detuning - a)));
}

/// Peak transmission of an empty two-mirror resonator.
inline double airy_peak(double r1, double r2) {
    const double s = 1.0 - std::sqrt(r1 * r2);
    return (1.0 - r1) * (1.0 - r2) / (s * s);
}

}  // namespace support
