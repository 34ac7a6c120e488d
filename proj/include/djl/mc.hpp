#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "djl/dupire.hpp"

namespace djl::mc {

using models::ModelSpec;
using pricing::QuadratureConfig;

// Local-variance field sigma^2(K, t).
using VarianceField = std::function<double(double, double)>;

struct McConfig {
    long n_paths = 100000;
    int steps_per_year = 100;
    std::uint64_t seed = 0;
    double vol_cap = 5.0;  // 500% vol; a hit flags the run instead of truncating silently
    bool antithetic = false;
    int threads = 0;  // 0 = hardware concurrency
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    std::uint64_t seed = 0;
    long cap_hits = 0;
    double elapsed_sec = 0.0;
};

struct SimResult {
    std::vector<double> terminals;
    long cap_hits = 0;
};

// Log-Euler terminal simulation of dS/S = sigma(S,t) dW from the given spots.
// Noise is a pure function of (seed, stream_tag, path, step) via the
// counter-based generator, so partitioned parallel runs equal serial runs.
// Paths starting at zero (jump-to-ruin atom) stay absorbed at zero.
SimResult simulate_terminal(const VarianceField& variance,
                            const std::vector<double>& spots, double T,
                            const McConfig& cfg, std::uint64_t stream_tag = 0);

McEstimate estimate_call(const std::vector<double>& terminals, double strike,
                         bool antithetic_pairs = false);

struct TheoremCell {
    double strike;
    double eps;
    double mc_price;
    double std_error;
    double analytic;  // C(K, T+eps)
    double z;
    long cap_hits;
};

struct TheoremReport {
    std::string model_id;
    std::vector<double> strikes;
    double maturity = 0.0;
    std::vector<double> eps_list;  // decreasing
    std::vector<TheoremCell> cells;      // eps-major, strike-minor
    std::vector<double> limit_prices;    // C(K, T) per strike
    bool convergence = false;  // analytic column approaches C(K,T) monotonically
    std::uint64_t seed = 0;
    long n_paths = 0;
    int steps_per_year = 0;
};

// For each eps: build the shifted field, sample the randomized spot, simulate
// to T, price every strike and compare against C(K, T+eps).
TheoremReport verify_theorem(const ModelSpec& model,
                             const std::vector<double>& strikes, double T,
                             const std::vector<double>& eps_list,
                             const McConfig& cfg, const QuadratureConfig& q = {});

}  // namespace djl::mc
