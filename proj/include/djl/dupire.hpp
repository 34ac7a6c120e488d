#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "djl/pricing.hpp"

namespace djl::dupire {

using models::ModelSpec;
using pricing::QuadratureConfig;
using pricing::SurfaceGrid;

enum class Provenance { FiniteDifference, Fourier, ClosedFormRuin, SaddleApprox };

std::string provenance_name(Provenance p);

struct LocalVolSurface {
    std::vector<double> strikes;
    std::vector<double> maturities;
    std::vector<double> local_variance;  // row-major by maturity
    Provenance provenance = Provenance::Fourier;
    // shift metadata, set when produced by a shifted field
    double eps = 0.0;
    std::string time_change_id;

    double value(std::size_t strike_idx, std::size_t maturity_idx) const {
        return local_variance[maturity_idx * strikes.size() + strike_idx];
    }
};

// Strictly increasing calendar-time map tau: [0,inf) -> [eps,inf) with
// derivative tau_prime; the default shift is tau(T) = T + eps.
struct TimeChange {
    std::string id;
    double eps;
    std::function<double(double)> tau;
    std::function<double(double)> tau_prime;
};

TimeChange shift_time_change(double eps);
TimeChange affine_time_change(double a, double b);  // tau(T) = a + b*T

// Dupire ratio from a tabulated surface via three-point Lagrange stencils on
// the (possibly non-uniform) grid.  K and T must coincide with interior grid
// nodes.  Throws BoundaryPoint when the stencil leaves the grid and
// DegenerateDensity when the discrete d2C/dK2 falls below the density floor.
double local_vol_fd(const SurfaceGrid& surface, double strike, double T);

// Exact local variance as the ratio of the two contour integrals sharing one
// node set, so exact cancellations (e.g. Black-Scholes) survive quadrature.
double local_vol_fourier(const ModelSpec& model, double strike, double T,
                         const QuadratureConfig& q = {});

// Closed-form jump-to-ruin local variance
//   sigma^2 + 2*lambda*sigma*sqrt(T) * N(d2)/N'(d2),
//   d2 = (log(S0/K) + lambda*T)/(sigma*sqrt(T)) - sigma*sqrt(T)/2.
double ruin_local_vol(const models::JumpToRuinParams& p, double strike, double T);

// eps-shifted local-variance field sigma_eps^2(K,T) =
// tau'(T) * [2 dC/dT / (K^2 d2C/dK2)] evaluated at (K, tau(T)); defined for
// all T >= 0.
class ShiftedLocalVol {
  public:
    ShiftedLocalVol(ModelSpec model, double eps, QuadratureConfig q = {},
                    std::optional<TimeChange> tc = std::nullopt);
    ShiftedLocalVol(SurfaceGrid surface, double eps,
                    std::optional<TimeChange> tc = std::nullopt);

    double variance(double strike, double T) const;
    double vol(double strike, double T) const;

    // Pre-tabulates the base variance on a (log-strike x calendar-time) grid;
    // variance() then interpolates bilinearly inside the table and falls back
    // to on-demand quadrature (memoized) outside.
    void enable_tabulation(double k_lo, double k_hi, int n_strikes, double t_max,
                           int n_times);

    LocalVolSurface materialize(const std::vector<double>& strikes,
                                const std::vector<double>& maturities) const;

    const TimeChange& time_change() const { return tc_; }
    double eps() const { return tc_.eps; }

  private:
    double base_variance(double strike, double t) const;
    double base_variance_cached(double strike, double t) const;

    std::optional<ModelSpec> model_;
    QuadratureConfig quad_;
    std::optional<SurfaceGrid> surface_;
    std::vector<double> surface_node_variance_;  // FD local variance at interior nodes
    TimeChange tc_;
    Provenance provenance_;

    struct Table {
        std::vector<double> log_strikes;
        std::vector<double> times;
        std::vector<double> variance;  // row-major by time
    };
    std::optional<Table> table_;
    mutable std::map<std::pair<double, double>, double> cache_;
    mutable std::mutex cache_mutex_;
};

// Max absolute residual of the forward (Fokker-Planck) identity
// d2/dK2 (a^eps p^eps) - d/dT p^eps evaluated with second-order stencils of
// quadrature-exact quantities over interior nodes of the given grids.
double fokker_planck_residual(const ModelSpec& model, double eps,
                              const std::vector<double>& strikes,
                              const std::vector<double>& maturities,
                              const QuadratureConfig& q = {});

}  // namespace djl::dupire
