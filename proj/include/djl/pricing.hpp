#pragma once

#include <array>
#include <functional>
#include <vector>

#include "djl/models.hpp"

namespace djl::pricing {

using models::ModelSpec;

// Vertical-contour Fourier quadrature.  Integrals run along Re s = contour;
// truncated trapezoid with adaptive doubling of the node count until two
// successive refinements agree to rel_tol.
struct QuadratureConfig {
    double contour = 0.0;  // 0 = auto: 1.5, clipped to the strip midpoint above 1
    double bound = 0.0;    // 0 = auto from the model's tail decay
    int nodes = 256;       // initial trapezoid node count
    double rel_tol = 1e-9;
    int max_doublings = 16;
};

double pick_contour(const ModelSpec& model, const QuadratureConfig& q);
double pick_bound(const ModelSpec& model, double T, const QuadratureConfig& q,
                  bool payoff_integrand);

// Trapezoid over u in [0, bound] of a two-component integrand, refined until
// both components converge.  Throws QuadratureNotConverged.
std::array<double, 2> contour_integral2(
    const std::function<std::array<double, 2>(double)>& f, double bound,
    const QuadratureConfig& q);

// Black-Scholes closed forms with flat rate (r = 0 throughout the library;
// the rate argument exists because jump-to-ruin prices are BS prices at
// rate lambda).
double bs_call(double spot, double strike, double sigma, double T, double rate = 0.0);
double bs_call_theta(double spot, double strike, double sigma, double T,
                     double rate = 0.0);
double lognormal_density(double spot, double strike, double sigma, double T,
                         double rate = 0.0);

// E[(S_T - K)^+].  Dispatches to closed forms for BS and jump-to-ruin,
// Fourier quadrature otherwise.
double call_price(const ModelSpec& model, double strike, double T,
                  const QuadratureConfig& q = {});
double call_price_fourier(const ModelSpec& model, double strike, double T,
                          const QuadratureConfig& q = {});

// Density of S_T at K (= d2C/dK2).  Refuses VG maturities at or below nu/2.
double density(const ModelSpec& model, double strike, double T,
               const QuadratureConfig& q = {});
double density_fourier(const ModelSpec& model, double strike, double T,
                       const QuadratureConfig& q = {});

// Calendar derivative dC/dT.
double dC_dT(const ModelSpec& model, double strike, double T,
             const QuadratureConfig& q = {});
double dC_dT_fourier(const ModelSpec& model, double strike, double T,
                     const QuadratureConfig& q = {});

struct SurfaceGrid {
    std::vector<double> strikes;     // ascending, positive
    std::vector<double> maturities;  // ascending, positive (years)
    std::vector<double> prices;      // row-major by maturity
    double spot = 1.0;

    double price(std::size_t strike_idx, std::size_t maturity_idx) const {
        return prices[maturity_idx * strikes.size() + strike_idx];
    }
    double& price(std::size_t strike_idx, std::size_t maturity_idx) {
        return prices[maturity_idx * strikes.size() + strike_idx];
    }
};

// Throws ArbitrageDetected on butterfly/calendar/intrinsic violations beyond
// tolerance.  Model prices are arbitrage-free, so a violation indicates a
// quadrature fault.
void audit_arbitrage(const SurfaceGrid& surface, double tol = 1e-8);

SurfaceGrid build_surface(const ModelSpec& model, std::vector<double> strikes,
                          std::vector<double> maturities,
                          const QuadratureConfig& q = {});

// Randomized spot S0^eps with density d2C/dK2 at maturity eps, sampled by
// inverse CDF from a tabulated density on a log-strike grid.  Jump-to-ruin
// carries an atom at zero of mass 1 - exp(-lambda*eps).
struct SpotSampler {
    std::vector<double> strikes;
    std::vector<double> cdf;  // cumulative mass of the continuous part
    double atom_at_zero = 0.0;
    double continuous_mass = 1.0;

    double draw(double u01) const;  // u01 in (0,1)
    double cdf_at(double strike) const;
};

struct SamplerConfig {
    int points = 2048;
    double span_std_devs = 12.0;
    double coverage = 1.0 - 1e-6;
    int max_widenings = 4;  // widen the span when jump tails exceed the budget
};

SpotSampler make_spot_sampler(const ModelSpec& model, double eps,
                              const QuadratureConfig& q = {},
                              const SamplerConfig& sc = {});

std::vector<double> sample_spot(const ModelSpec& model, double eps, std::size_t n,
                                std::uint64_t seed, std::uint64_t stream = 0,
                                const QuadratureConfig& q = {},
                                const SamplerConfig& sc = {});

}  // namespace djl::pricing
