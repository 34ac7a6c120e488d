// Acceptance gate: one pass/fail line per criterion, non-zero exit on failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "djl/math.hpp"
#include "djl/mc.hpp"
#include "djl/saddle.hpp"

using namespace djl;

namespace {

const auto merton = models::make_merton(0.2, 0.1, -0.1, 0.15);
const auto kou = models::make_kou(0.2, 0.3, 0.5, 15.0, 10.0);
const auto nig = models::make_nig(5.0, -2.0, 0.3);
const auto vg = models::make_vg(-0.1, 0.4, 0.2);
const auto ruin = models::make_ruin(0.2, 0.02);
const auto bs = models::make_bs(0.2);
const models::JumpToRuinParams ruin_p{0.2, 0.02};

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
}

std::vector<double> dyadic(double t0, int n) {
    std::vector<double> mats;
    for (double T = t0; static_cast<int>(mats.size()) < n; T /= 2)
        mats.push_back(T);
    return mats;
}

int failures = 0;
int index = 0;

void criterion(const std::string& name, const std::function<void()>& body) {
    ++index;
    auto t0 = std::chrono::steady_clock::now();
    std::string verdict = "PASS", detail;
    try {
        body();
    } catch (const std::exception& e) {
        verdict = "FAIL";
        detail = e.what();
        ++failures;
    }
    double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%d/9] %s (%6.1fs) %s%s%s\n", index, verdict.c_str(), sec,
                name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(msg);
}

std::string num(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

int main() {
    criterion("Fourier pricer matches Black-Scholes to 1e-7 on a 50x10 grid", [] {
        double worst = 0.0;
        for (double K : linspace(0.5, 2.0, 50))
            for (double T : linspace(0.1, 2.0, 10))
                worst = std::max(worst,
                                 std::abs(pricing::call_price_fourier(bs, K, T) -
                                          pricing::bs_call(1.0, K, 0.2, T)));
        require(worst < 1e-7, "worst price error " + num(worst));
    });

    criterion("Dupire inversion is flat for Black-Scholes (FD 1e-4, Fourier 1e-8)",
              [] {
                  auto s = pricing::build_surface(bs, linspace(0.8, 1.25, 91),
                                                  linspace(0.3, 1.0, 29));
                  double worst_fd = 0.0, worst_f = 0.0;
                  for (std::size_t j = 1; j + 1 < s.maturities.size(); ++j)
                      for (std::size_t i = 1; i + 1 < s.strikes.size(); ++i) {
                          double K = s.strikes[i], T = s.maturities[j];
                          worst_fd = std::max(
                              worst_fd, std::abs(dupire::local_vol_fd(s, K, T) - 0.04));
                          worst_f = std::max(
                              worst_f,
                              std::abs(dupire::local_vol_fourier(bs, K, T) - 0.04));
                      }
                  require(worst_fd < 1e-4, "worst FD error " + num(worst_fd));
                  require(worst_f < 1e-8, "worst Fourier error " + num(worst_f));
              });

    criterion("Monte Carlo under the shifted field reprices C(K, T+eps), |z| < 3",
              [] {
                  const std::vector<double> strikes = {0.9, 1.0, 1.1};
                  const std::vector<double> eps_list = {0.2, 0.1, 0.05};
                  struct Run { const models::ModelSpec* m; int steps; };
                  for (auto [m, steps] : {Run{&merton, 800}, Run{&kou, 800},
                                          Run{&ruin, 1600}}) {
                      mc::McConfig cfg;
                      cfg.n_paths = 400000;
                      cfg.steps_per_year = steps;
                      cfg.seed = 2024;
                      auto r = mc::verify_theorem(*m, strikes, 0.5, eps_list, cfg);
                      for (const auto& c : r.cells)
                          require(std::abs(c.z) < 3.0,
                                  r.model_id + " K=" + num(c.strike) + " eps=" +
                                      num(c.eps) + " z=" + num(c.z));
                      require(r.convergence,
                              r.model_id + ": analytic column not monotone");
                  }
              });

    criterion("Fokker-Planck residual decays at second order (ratio in [3,5])", [] {
        for (const auto* m : {&bs, &merton}) {
            double c = dupire::fokker_planck_residual(*m, 0.05,
                                                      linspace(0.7, 1.4, 41),
                                                      linspace(0.3, 1.0, 15));
            double f = dupire::fokker_planck_residual(*m, 0.05,
                                                      linspace(0.7, 1.4, 81),
                                                      linspace(0.3, 1.0, 29));
            require(c / f > 3.0 && c / f < 5.0, "refinement ratio " + num(c / f));
        }
    });

    criterion("short-maturity blowup exponents land in the expected brackets", [] {
        auto f = saddle::blowup_fit(merton, 1.25, dyadic(0.2, 6),
                                    saddle::BlowupSource::Fourier);
        require(f.exponent > 0.85 && f.exponent < 1.15,
                "merton exponent " + num(f.exponent));

        f = saddle::blowup_fit(kou, 1.25, dyadic(0.05, 6),
                               saddle::BlowupSource::Saddle);
        require(f.exponent > 0.35 && f.exponent < 0.65,
                "kou exponent " + num(f.exponent));

        f = saddle::blowup_fit(nig, 1.25, dyadic(0.2, 6),
                               saddle::BlowupSource::Fourier);
        require(f.exponent > 0.85 && f.exponent < 1.15,
                "nig exponent " + num(f.exponent));

        f = saddle::blowup_fit(ruin, 1.25, dyadic(0.2, 6),
                               saddle::BlowupSource::ClosedFormRuin);
        require(std::abs(f.exponent) < 0.05,
                "ruin above spot should not blow up, exponent " + num(f.exponent));
        require(std::abs(f.local_variance.back() - 0.04) < 0.005,
                "ruin limit " + num(f.local_variance.back()));

        f = saddle::blowup_fit(ruin, 0.8, dyadic(0.2, 6),
                               saddle::BlowupSource::ClosedFormRuin);
        require(f.exp_mode && f.exp_slope > 0.0 && f.exp_r2 > 0.99,
                "ruin exp(1/T) fit R2 " + num(f.exp_r2));
    });

    criterion("saddle point solver and Merton large-strike expansion", [] {
        for (double k : {0.05, 0.3, 1.0})
            for (double T : {0.1, 0.5, 2.0}) {
                double want = k / (0.04 * T) + 0.5 - 0.02 / 0.04;
                double got = saddle::solve_saddle(ruin, k, T).s_hat;
                require(std::abs(got - want) < 1e-9 * want,
                        "ruin saddle " + num(got) + " vs " + num(want));
            }

        const auto& p = std::get<models::MertonParams>(merton.params);
        double T = 0.001;
        double rel300 = std::abs(saddle::merton_saddle_expansion(p, 0.3, T) /
                                     saddle::solve_saddle(merton, 0.3, T).s_hat -
                                 1.0);
        double rel1e6 = std::abs(saddle::merton_saddle_expansion(p, 1000.0, T) /
                                     saddle::solve_saddle(merton, 1000.0, T).s_hat -
                                 1.0);
        require(rel300 < 0.10, "expansion error at k/T=300: " + num(rel300));
        require(rel1e6 < 0.02, "expansion error at k/T=1e6: " + num(rel1e6));

        bool threw = false;
        try {
            saddle::solve_saddle(nig, 3.0, 1e-5);
        } catch (const NoSaddle&) {
            threw = true;
        }
        require(threw, "NIG at k/T = 3e5 must report NoSaddle");

        for (double k : {0.3, -0.4})
            require(std::abs(saddle::wing_local_vol(bs, k, 0.5) - 0.04) < 1e-12,
                    "BS wing approximation must be exact");
    });

    criterion("at-the-money local variance approaches sigma^2 as T -> 0", [] {
        for (const auto* m : {&merton, &kou}) {
            double prev = 1e300, v = 0.0;
            for (double T : {0.1, 0.05, 0.025, 0.0125}) {
                v = dupire::local_vol_fourier(*m, 1.0, T);
                require(std::abs(v - 0.04) < prev, "ATM gap not decreasing");
                prev = std::abs(v - 0.04);
            }
            require(std::abs(v - 0.04) < 0.15 * 0.04,
                    "ATM limit off by " + num(std::abs(v / 0.04 - 1.0)));
        }
    });

    criterion("VG transform decay matches 2T/nu; below the gate it refuses", [] {
        for (double T : {0.1, 0.3, 1.0}) {
            std::vector<double> lx, ly;
            for (double u = 1e2; u <= 1e4; u *= 1.3) {
                double mag = std::abs(
                    std::exp(models::log_mgf(vg, models::Complex(0.0, u), T)));
                lx.push_back(std::log(u));
                ly.push_back(std::log(mag));
            }
            auto fit = fit_line(lx.begin(), lx.end(), ly.begin());
            double want = -2.0 * T / 0.4;
            require(std::abs(fit.slope - want) < 0.02 * std::abs(want),
                    "decay slope " + num(fit.slope) + " vs " + num(want));
        }
        std::string msg;
        try {
            pricing::sample_spot(vg, 0.15, 10, 1);
        } catch (const SingularDensity& e) {
            msg = e.what();
        }
        require(msg.find("SingularDensity") != std::string::npos,
                "refusal must name the singular density");
    });

    criterion("verification runs are deterministic and thread-count invariant", [] {
        mc::McConfig cfg;
        cfg.n_paths = 20000;
        cfg.steps_per_year = 100;
        cfg.seed = 7;
        cfg.threads = 1;
        auto a = mc::verify_theorem(ruin, {0.9, 1.1}, 0.25, {0.2, 0.1}, cfg);
        auto b = mc::verify_theorem(ruin, {0.9, 1.1}, 0.25, {0.2, 0.1}, cfg);
        cfg.threads = 4;
        auto c = mc::verify_theorem(ruin, {0.9, 1.1}, 0.25, {0.2, 0.1}, cfg);
        for (std::size_t i = 0; i < a.cells.size(); ++i) {
            require(a.cells[i].mc_price == b.cells[i].mc_price &&
                        a.cells[i].std_error == b.cells[i].std_error,
                    "rerun differs at cell " + num(static_cast<double>(i)));
            require(a.cells[i].mc_price == c.cells[i].mc_price,
                    "thread count changes the estimate at cell " +
                        num(static_cast<double>(i)));
        }
    });

    std::printf("%s: %d/9 criteria passed\n", failures == 0 ? "OK" : "FAILED",
                9 - failures);
    return failures == 0 ? 0 : 1;
}
