#pragma once

// Impedance-matched cavity AFC design: mirror matching, bandwidth check and
// a deterministic grid search over comb finesse and peak depth.

#include <cmath>
#include <cstddef>
#include <vector>

#include "afcmem/cavity.hpp"
#include "afcmem/error.hpp"
#include "afcmem/storage.hpp"

namespace afcmem {

struct DesignConstraints {
    double gamma_pit = 18e6;          // Hz, widest pit the level structure allows
    double alpha_available = 2000.0;  // 1/m
    double length = 2e-3;             // m
    double d0 = 0.0;
    double r2 = 1.0;
    int min_peak_count = 4;
    double delta_min = 1e6;  // Hz

    void validate() const {
        if (!(gamma_pit > 0.0) || !(alpha_available > 0.0) || !(length > 0.0) || !(delta_min > 0.0))
            throw PhysicsError("optimize_afc", "pit width, absorption, length and delta_min must be positive");
        if (!(d0 >= 0.0)) throw PhysicsError("optimize_afc", "background depth must be non-negative");
        if (!(r2 > 0.0 && r2 <= 1.0)) throw PhysicsError("optimize_afc", "r2 must lie in (0, 1]");
        if (min_peak_count < 1) throw PhysicsError("optimize_afc", "min_peak_count must be positive");
    }
};

struct DesignCandidate {
    double f_afc = 0.0;
    double d = 0.0;
    double r1 = 0.0;
    double eta = 0.0;
    double delta_cav = 0.0;
};

struct DesignResult {
    double r1 = 0.0;
    double f_afc = 0.0;
    double delta = 0.0;  // comb spacing, Hz
    double d = 0.0;
    double predicted_eta_bare = 0.0;
    double predicted_delta_cav = 0.0;  // Hz
    bool bandwidth_ok = false;
    double mismatch_residual = 0.0;

    double d_tilde(double d0) const noexcept { return (d - d0) / f_afc; }
};

struct DesignReport {
    DesignResult best;
    std::vector<DesignCandidate> feasible;  // in search order
};

/// Input mirror reflectivity that impedance-matches a single-pass depth d_tilde:
/// sqrt(r1) = sqrt(r2) exp(-d_tilde), i.e. r1 = r2 exp(-2 d_tilde).
inline double match_mirror(double d_tilde, double r2) {
    if (!(d_tilde >= 0.0)) throw PhysicsError("match_mirror", "effective depth must be non-negative");
    if (!(r2 > 0.0 && r2 <= 1.0)) throw PhysicsError("match_mirror", "r2 must lie in (0, 1]");
    return r2 * std::exp(-2.0 * d_tilde);
}

/// True iff the comb bandwidth fits inside the cavity line (inclusive).
inline bool bandwidth_check(double delta, int peak_count, double delta_cav) {
    return static_cast<double>(peak_count) * delta <= delta_cav;
}

inline std::vector<double> finesse_search_grid() {
    std::vector<double> out;
    for (int k = 0; k <= 72; ++k) out.push_back(2.0 + 0.25 * k);
    return out;
}

/// 64 log-spaced depths from d_max/1000 to d_max inclusive.
inline std::vector<double> depth_search_grid(double d_max) {
    std::vector<double> out(64);
    for (int k = 0; k < 64; ++k) out[k] = d_max * std::pow(10.0, -3.0 * (63 - k) / 63.0);
    out.back() = d_max;
    return out;
}

/// Maximises the analytic bare efficiency over (F_AFC, d) subject to the comb
/// fitting inside the matched-cavity line Gamma / F_AFC. Comb spacing is
/// fixed at delta_min. Ties go to the smaller F_AFC, then the smaller d.
inline DesignReport optimize_afc(const DesignConstraints& c) {
    c.validate();
    const double d_max = c.alpha_available * c.length;
    DesignReport report;
    bool found = false;
    for (double f : finesse_search_grid()) {
        const double delta_cav = matched_linewidth_afc(c.gamma_pit, f);
        if (!bandwidth_check(c.delta_min, c.min_peak_count, delta_cav)) continue;
        for (double d : depth_search_grid(d_max)) {
            if (d < c.d0) continue;
            const double eta = afc_efficiency_analytic(d, c.d0, f);
            const double r1 = match_mirror((d - c.d0) / f, c.r2);
            report.feasible.push_back({f, d, r1, eta, delta_cav});
            if (!found || eta > report.best.predicted_eta_bare) {
                found = true;
                report.best = DesignResult{r1, f, c.delta_min, d, eta, delta_cav, true, 0.0};
            }
        }
    }
    if (!found) throw PhysicsError("optimize_afc", "no candidate satisfies the bandwidth constraint");
    auto& b = report.best;
    b.mismatch_residual = impedance_mismatch(b.r1, c.r2, b.d_tilde(c.d0));
    return report;
}

}  // namespace afcmem
