#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "djl/math.hpp"
#include "djl/models.hpp"
#include "djl/rng.hpp"

using namespace djl;
using models::Complex;

namespace {

const auto merton = models::make_merton(0.2, 0.1, -0.1, 0.15);
const auto kou = models::make_kou(0.2, 0.3, 0.5, 15.0, 10.0);
const auto nig = models::make_nig(5.0, -2.0, 0.3);
const auto vg = models::make_vg(-0.1, 0.4, 0.2);
const auto ruin = models::make_ruin(0.2, 0.02);
const auto bs = models::make_bs(0.2);

const std::vector<const models::ModelSpec*> all = {&merton, &kou,  &nig,
                                                   &vg,     &ruin, &bs};

// Random point strictly inside the model's real strip, biased away from the
// endpoints so finite differences stay inside too.
double random_strip_point(const models::ModelSpec& m, uint64_t i) {
    auto st = models::strip(m);
    double lo = std::max(st.lo, -40.0), hi = std::min(st.hi, 40.0);
    double u = rng::u01(7, 1, i);
    return lo + (0.05 + 0.9 * u) * (hi - lo);
}

}  // namespace

TEST_CASE("log_mgf trivial points") {
    CHECK(std::abs(models::log_mgf(merton, 0.0, 1.0)) == 0.0);
    CHECK(std::abs(models::log_mgf(merton, 1.0, 2.5)) < 1e-12);
    // NIG closed form stays finite at the strip endpoint alpha - beta
    Complex v = models::log_mgf(nig, 7.0, 1.0);
    auto* p = std::get_if<models::NigParams>(&nig.params);
    double expected = p->delta * std::sqrt(21.0) + p->b * 7.0;
    CHECK(v.real() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("martingale normalization m(1,T) = 0") {
    for (const auto* m : all)
        for (double T : {0.1, 1.0, 10.0})
            CHECK(std::abs(models::log_mgf(*m, 1.0, T)) < 1e-12);
}

TEST_CASE("Levy time homogeneity m(s,T) = T m(s,1)") {
    for (const auto* m : all) {
        for (int i = 0; i < 20; ++i) {
            double s = random_strip_point(*m, i);
            double T = 0.05 + 3.0 * rng::u01(7, 2, i);
            Complex lhs = models::log_mgf(*m, s, T);
            Complex rhs = T * models::log_mgf(*m, s, 1.0);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("characteristic function bounded by one") {
    for (const auto* m : all)
        for (double u : {0.3, 2.0, 17.0, 150.0})
            for (double T : {0.1, 1.0})
                CHECK(std::abs(std::exp(models::log_mgf(*m, Complex(0.0, u), T))) <=
                      1.0 + 1e-12);
}

TEST_CASE("log_mgf_grad closed forms") {
    // BS: m(s,1) = sigma^2 s^2 / 2 - sigma^2 s / 2
    auto g = models::log_mgf_grad(bs, 0.7, 1.0);
    CHECK(g.dm_ds.real() == doctest::Approx(0.04 * 0.7 - 0.02).epsilon(1e-14));
    CHECK(g.d2m_ds2.real() == doctest::Approx(0.04).epsilon(1e-14));

    // jump-to-ruin at s=10, T=.25: dm_ds = T (sigma^2 s + lambda - sigma^2/2)
    auto r = models::log_mgf_grad(ruin, 10.0, 0.25);
    CHECK(r.dm_ds.real() == doctest::Approx(0.25 * 0.4).epsilon(1e-14));
    CHECK(r.dm_dT.real() ==
          doctest::Approx(0.5 * 0.04 * 100 + (0.02 - 0.02) * 10 - 0.02)
              .epsilon(1e-14));
}

TEST_CASE("log_mgf_grad matches finite differences") {
    const double h = 1e-5;
    for (const auto* m : all) {
        for (int i = 0; i < 50; ++i) {
            double s = random_strip_point(*m, 100 + i);
            double T = 0.2 + 2.0 * rng::u01(7, 3, i);
            auto g = models::log_mgf_grad(*m, s, T);

            Complex up = models::log_mgf(*m, s + h, T);
            Complex dn = models::log_mgf(*m, s - h, T);
            double fd1 = ((up - dn) / (2 * h)).real();
            // wider step for the second difference (cancellation noise)
            const double h2 = 2e-4;
            double fd2 = ((models::log_mgf(*m, s + h2, T) - 2.0 * g.m +
                           models::log_mgf(*m, s - h2, T)) /
                          (h2 * h2))
                             .real();
            double fdT = ((models::log_mgf(*m, s, T + h) -
                           models::log_mgf(*m, s, T - h)) /
                          (2 * h))
                             .real();

            CHECK(g.dm_ds.real() ==
                  doctest::Approx(fd1).epsilon(1e-6));
            CHECK(g.d2m_ds2.real() ==
                  doctest::Approx(fd2).epsilon(1e-4).scale(std::abs(fd2) + 1.0));
            CHECK(g.dm_dT.real() == doctest::Approx(fdT).epsilon(1e-6));
        }
    }
}

TEST_CASE("martingale_drift closed forms and failures") {
    auto pure_bs = models::make_merton(0.2, 0.0, 0.0, 0.1);
    CHECK(std::get<models::MertonParams>(pure_bs.params).b ==
          doctest::Approx(-0.02).epsilon(1e-14));

    double expected =
        -0.02 - 0.1 * (std::exp(0.15 * 0.15 / 2 - 0.1) - 1.0);
    CHECK(std::get<models::MertonParams>(merton.params).b ==
          doctest::Approx(expected).epsilon(1e-14));

    CHECK_THROWS_AS(models::make_kou(0.2, 0.3, 0.5, 1.0, 10.0),
                    NoMartingaleDrift);
    CHECK_THROWS_AS(models::make_nig(2.0, 1.5, 0.3), NoMartingaleDrift);
}

TEST_CASE("strip violations") {
    CHECK_THROWS_AS(models::log_mgf(kou, 15.0, 1.0), StripViolation);
    CHECK_THROWS_AS(models::log_mgf(kou, -10.0, 1.0), StripViolation);
    CHECK_THROWS_AS(models::log_mgf(ruin, -0.1, 1.0), StripViolation);
    CHECK_THROWS_AS(models::log_mgf(nig, 7.5, 1.0), StripViolation);
    CHECK_NOTHROW(models::log_mgf(nig, 7.0, 1.0));  // closed endpoint
    CHECK_NOTHROW(models::log_mgf(ruin, 0.0, 1.0));
}

TEST_CASE("VG smoothness gate") {
    const auto& p = std::get<models::VgParams>(vg.params);

    auto g = models::vg_smoothness_gate(p, 0.3);
    CHECK(g.verdict == models::Smoothness::Smooth);
    CHECK(g.exponent == doctest::Approx(1.5).epsilon(1e-14));

    g = models::vg_smoothness_gate(p, 0.2);  // boundary is singular
    CHECK(g.verdict == models::Smoothness::SingularDensity);
    CHECK(g.exponent == doctest::Approx(1.0).epsilon(1e-14));

    g = models::vg_smoothness_gate(p, 0.1);
    CHECK(g.verdict == models::Smoothness::SingularDensity);
    CHECK(g.exponent == doctest::Approx(0.5).epsilon(1e-14));

    CHECK_THROWS_AS(models::require_density_exists(vg, 0.2), SingularDensity);
    CHECK_NOTHROW(models::require_density_exists(vg, 0.21));
    CHECK_NOTHROW(models::require_density_exists(merton, 0.001));
}

TEST_CASE("VG characteristic function decay exponent") {
    for (double T : {0.1, 0.3, 1.0}) {
        std::vector<double> lx, ly;
        for (double u = 1e2; u <= 1e4; u *= 1.3) {
            double mag = std::abs(std::exp(models::log_mgf(vg, Complex(0.0, u), T)));
            lx.push_back(std::log(u));
            ly.push_back(std::log(mag));
        }
        auto fit = fit_line(lx.begin(), lx.end(), ly.begin());
        double want = -2.0 * T / 0.4;
        CHECK(std::abs(fit.slope - want) < 0.02 * std::abs(want));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS(models::make_bs(-0.1));
    CHECK_THROWS(models::make_merton(0.2, -1.0, 0.0, 0.1));
    CHECK_THROWS(models::make_kou(0.2, 0.3, 1.5, 15.0, 10.0));
    CHECK_THROWS(models::make_nig(5.0, 6.0, 0.3));
    CHECK_THROWS(models::make_vg(-0.1, -0.4, 0.2));
}
