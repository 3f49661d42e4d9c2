#include <gtest/gtest.h>

#include <algorithm>

#include "afcmem/dispersion.hpp"
#include "afcmem/spectra.hpp"
#include "support.hpp"

using namespace afcmem;

namespace {

const double kCarrier = kSpeedOfLight / kDefaultWavelength;

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> deviation(const IndexProfile& idx) {
    std::vector<double> d(idx.n_r.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = idx.n_r[i] - idx.n_bg;
    return d;
}

}  // namespace

TEST(KramersKronig, NoAbsorptionNoDispersion) {
    const auto g = make_grid(kCarrier, 200e6, 4096);
    const auto idx = kramers_kronig(AbsorptionProfile::zero(g, 2e-3), 1.8);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(idx.n_r[i], 1.8);
        EXPECT_EQ(idx.n_g[i], 1.8);
    }
    EXPECT_FALSE(idx.edge_leakage);
}

TEST(KramersKronig, LorentzianMatchesClosedForm) {
    const auto g = make_grid(kCarrier, 400e6, std::size_t{1} << 16);
    const double alpha0 = 1000.0, fwhm = 2e6;
    const auto p = inhomogeneous_line(g, alpha0, fwhm, kCarrier, LineShape::Lorentzian, 2e-3);
    const auto idx = kramers_kronig(p, 1.8);
    const double extremum = std::abs(support::lorentzian_dn(0.5 * fwhm, alpha0, fwhm, kCarrier));
    double worst = 0.0;
    for (std::size_t i = g.size() / 10; i < g.size() - g.size() / 10; ++i) {
        const double expect = support::lorentzian_dn(g.at(i) - kCarrier, alpha0, fwhm, kCarrier);
        worst = std::max(worst, std::abs(idx.n_r[i] - 1.8 - expect));
    }
    EXPECT_LT(worst, 0.01 * extremum);
}

TEST(KramersKronig, SquarePitMatchesClosedForm) {
    const auto g = make_grid(kCarrier, 200e6, std::size_t{1} << 16);
    const double alpha0 = 2000.0, width = 18e6;
    const AbsorptionProfile flat(g, std::vector<double>(g.size(), alpha0), 2e-3);
    const auto pit = carve_pit(flat, kCarrier, width, 0.0, 0.0);
    const auto idx = kramers_kronig(pit, 1.8);
    const double scale = support::square_pit_dn(0.25 * width, alpha0, width, kCarrier);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.at(i) - kCarrier;
        if (std::abs(std::abs(x) - 0.5 * width) < 1e6 || std::abs(x) > 60e6) continue;
        worst = std::max(worst, std::abs(idx.n_r[i] - 1.8 - support::square_pit_dn(x, alpha0, width, kCarrier)));
    }
    EXPECT_LT(worst, 0.01 * scale);
    // Centre slope 4 kappa0 / (pi Gamma) gives n_g = c0 alpha / (pi^2 Gamma) = 3375.04.
    EXPECT_NEAR(group_index(idx, kCarrier), 3375.04, 0.01 * 3375.04);
}

TEST(KramersKronig, EdgeLeakageFlagged) {
    const auto g = make_grid(kCarrier, 200e6, 4096);
    const auto wide = inhomogeneous_line(g, 2000.0, 9e9, kCarrier, LineShape::Gaussian, 2e-3);
    EXPECT_TRUE(kramers_kronig(wide, 1.8).edge_leakage);
    const auto narrow = inhomogeneous_line(g, 2000.0, 5e6, kCarrier, LineShape::Gaussian, 2e-3);
    EXPECT_FALSE(kramers_kronig(narrow, 1.8).edge_leakage);
}

TEST(KramersKronig, FarFieldReturnsToBackground) {
    const auto g = make_grid(kCarrier, 2e9, std::size_t{1} << 16);
    const auto p = inhomogeneous_line(g, 2000.0, 5e6, kCarrier, LineShape::Gaussian, 2e-3);
    const auto idx = kramers_kronig(p, 1.8);
    const std::size_t edge = g.size() / 100;
    for (std::size_t i = 0; i < edge; ++i) {
        EXPECT_LT(std::abs(idx.n_r[i] - 1.8), 1e-6);
        EXPECT_LT(std::abs(idx.n_r[g.size() - 1 - i] - 1.8), 1e-6);
    }
}

TEST(KramersKronig, InverseRecoversAbsorption) {
    const auto g = make_grid(kCarrier, 400e6, std::size_t{1} << 14);
    const auto p = inhomogeneous_line(g, 1500.0, 10e6, kCarrier, LineShape::Gaussian, 2e-3);
    const auto back = absorption_from_index(kramers_kronig(p, 1.8), 2e-3);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(back.alpha[i] - p.alpha[i]));
    EXPECT_LT(worst, 1e-2 * 1500.0);
}

TEST(KramersKronig, RejectsInvalidAbsorption) {
    const auto g = make_grid(kCarrier, 200e6, 64);
    EXPECT_THROW(kramers_kronig(AbsorptionProfile::zero(g, 1e-3), 1.8, 0.0), PhysicsError);
}

TEST(GroupIndex, FlatIndexGivesPhaseIndex) {
    const auto g = make_grid(kCarrier, 200e6, 64);
    const auto idx = make_index_profile(g, std::vector<double>(64, 1.8), 1.8, kCarrier);
    EXPECT_DOUBLE_EQ(group_index(idx, g.at(30)), 1.8);
}

TEST(GroupIndex, LinearRamp) {
    // n_r = a + b nu on the optical axis gives n_g = a + 2 b nu.
    const auto g = make_grid(kCarrier, 200e6, 64);
    const double b = 1e-12, a = 1.8 - b * kCarrier;
    std::vector<double> n(64);
    for (std::size_t i = 0; i < 64; ++i) n[i] = a + b * g.at(i);
    const auto idx = make_index_profile(g, n, 1.8, kCarrier);
    for (std::size_t i : {5u, 32u, 58u}) EXPECT_NEAR(group_index(idx, g.at(i)), a + 2.0 * b * g.at(i), 1e-5);
}

TEST(GroupIndex, InteriorOnly) {
    const auto g = make_grid(kCarrier, 200e6, 64);
    const auto idx = make_index_profile(g, std::vector<double>(64, 1.8), 1.8, kCarrier);
    EXPECT_THROW(group_index(idx, g.at(1)), PhysicsError);
    EXPECT_THROW(group_index(idx, g.at(62)), PhysicsError);
    EXPECT_THROW(group_index(idx, g.back() + 1e9), PhysicsError);
    EXPECT_NO_THROW(group_index(idx, g.at(2)));
    EXPECT_NO_THROW(group_index(idx, g.at(61)));
}

TEST(GroupIndex, SelfConsistentWithPhaseIndex) {
    const auto g = make_grid(kCarrier, 400e6, std::size_t{1} << 14);
    const auto p = inhomogeneous_line(g, 1000.0, 5e6, kCarrier, LineShape::Lorentzian, 2e-3);
    const auto idx = kramers_kronig(p, 1.8);
    for (std::size_t i = 100; i + 100 < g.size(); i += 997) {
        const double slope = (idx.n_r[i + 1] - idx.n_r[i - 1]) / (2.0 * g.spacing());
        EXPECT_NEAR(idx.n_g[i], idx.n_r[i] + idx.optical_frequency(i) * slope, 1e-9 * std::abs(idx.n_g[i]));
    }
}

TEST(SlowLight, GroupVelocity) {
    EXPECT_NEAR(slow_light_vg(18e6, 2000.0), 56548.667764616, 1e-6);
    EXPECT_DOUBLE_EQ(slow_light_vg(18e6, 2000.0), slow_light_vg(36e6, 4000.0));
    EXPECT_THROW(slow_light_vg(18e6, 0.0), PhysicsError);
    EXPECT_THROW(slow_light_vg(0.0, 2000.0), PhysicsError);
    EXPECT_NEAR(kSpeedOfLight / slow_light_vg(18e6, 2000.0), 5301.49, 0.01);
}

TEST(DispersionProperties, Linearity) {
    const auto g = make_grid(kCarrier, 400e6, std::size_t{1} << 13);
    support::for_all(0xD15Eu, 10, [&](std::mt19937& rng, int) {
        const auto p1 = inhomogeneous_line(g, support::uniform(rng, 100, 2000), support::uniform(rng, 2e6, 20e6),
                                           kCarrier + support::uniform(rng, -50e6, 50e6), LineShape::Gaussian, 2e-3);
        const auto p2 = inhomogeneous_line(g, support::uniform(rng, 100, 2000), support::uniform(rng, 2e6, 20e6),
                                           kCarrier + support::uniform(rng, -50e6, 50e6), LineShape::Lorentzian,
                                           2e-3);
        const double a = support::uniform(rng, 0.1, 3.0), b = support::uniform(rng, 0.1, 3.0);
        std::vector<double> mix(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) mix[i] = a * p1.alpha[i] + b * p2.alpha[i];
        const auto d1 = deviation(kramers_kronig(p1, 1.8));
        const auto d2 = deviation(kramers_kronig(p2, 1.8));
        const auto dm = deviation(kramers_kronig(AbsorptionProfile(g, mix, 2e-3), 1.8));
        std::vector<double> err(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) err[i] = dm[i] - (a * d1[i] + b * d2[i]);
        EXPECT_LT(max_abs(err), 1e-9 * max_abs(dm));
    });
}

TEST(DispersionProperties, SymmetricAbsorptionGivesAntisymmetricIndex) {
    support::for_all(0x5E77u, 10, [&](std::mt19937& rng, int) {
        const double centre = kCarrier + support::uniform(rng, -20e6, 20e6);
        const auto g = make_grid(centre, 400e6, std::size_t{1} << 14);
        auto p = inhomogeneous_line(g, support::uniform(rng, 500, 3000), support::uniform(rng, 60e6, 120e6), centre,
                                    LineShape::Gaussian, 2e-3);
        p = carve_pit(p, centre, support::uniform(rng, 5e6, 30e6), 0.0, support::uniform(rng, 0.0, 2e6));
        const auto dn = deviation(kramers_kronig(p, 1.8));
        const double extremum = max_abs(dn);
        const std::size_t c = g.size() / 2;
        for (std::size_t k = 1; k < c - g.size() / 10; k += 37) EXPECT_LT(std::abs(dn[c + k] + dn[c - k]), 0.01 * extremum);
    });
}

TEST(DispersionProperties, PitCentreGroupIndexVersusSlowLightFormula) {
    // A square-edged pit in a broad line: the resulting n_g is compared with
    // c0 / slow_light_vg. The sharp-edged window gives c0 alpha / (pi^2 Gamma),
    // a factor 2/pi of the slow-light formula, so this records the ratio.
    const auto g = make_grid(kCarrier, 40e9, std::size_t{1} << 20);
    const auto line = inhomogeneous_line(g, 2000.0, 9e9, kCarrier, LineShape::Gaussian, 2e-3);
    const auto idx = kramers_kronig(carve_pit(line, kCarrier, 18e6, 0.0, 0.0), 1.8);
    const double ratio = group_index(idx, kCarrier) / (kSpeedOfLight / slow_light_vg(18e6, 2000.0));
    EXPECT_NEAR(ratio, 2.0 / kPi, 0.03);
}
