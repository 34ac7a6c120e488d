#pragma once

#include <string>
#include <vector>

#include "djl/dupire.hpp"
#include "djl/models.hpp"

namespace djl::saddle {

using models::ModelSpec;
using pricing::QuadratureConfig;

struct SaddleResult {
    double s_hat;        // real saddle point, d/ds m(s,T) = k
    double k;            // log-strike
    double T;
    double m;            // m(s_hat, T)
    double dm_ds;        // d/ds m(s_hat, T)
    double d2m_ds2;      // d2/ds2 m(s_hat, T), > 0 by convexity
    double dm_dT;        // dT m = m(s_hat, 1)
    double local_variance_approx;  // wing value 2*dm_dT/(s(s-1)), NaN if s in [0,1]
};

// Safeguarded Newton with bracket maintenance on the open real strip.
// Throws NoSaddle when k/T lies outside the range of d/ds m on the
// (endpoint-damped) strip, StripExhausted when bracketing fails.
SaddleResult solve_saddle(const ModelSpec& model, double k, double T);

// Wing/short-time local-variance approximation 2*dT m(s,T)/(s(s-1)) at the
// saddle.  Throws SaddleInUnitInterval when s_hat is in [0,1], where the
// approximation is singular or of the wrong sign.
double wing_local_vol(const ModelSpec& model, double k, double T);

// Closed-form large-k/T approximation of the Merton saddle point (positive
// root).  Requires k > 0 and k/T > e.
double merton_saddle_expansion(const models::MertonParams& p, double k, double T);

enum class BlowupSource { Fourier, ClosedFormRuin, Saddle };

struct BlowupFit {
    std::string model_id;
    double strike = 0.0;
    std::vector<double> maturities;       // descending
    std::vector<double> local_variance;
    // power-law fit sigma_loc^2 ~ const * T^-rho; headline exponent from the
    // three smallest maturities, R^2 over all points
    double exponent = 0.0;
    double r2 = 0.0;
    // exp(1/T) mode (jump-to-ruin below spot): log(sigma_loc^2 - sigma^2) vs 1/T
    bool exp_mode = false;
    double exp_slope = 0.0;
    double exp_r2 = 0.0;
    // optional Merton correction: y = sigma_loc^2 * T * log(|k|/T)^{3/2} / |k|
    bool merton_correction = false;
    std::vector<double> corrected_constant;
    double correction_slope = 0.0;
};

BlowupFit blowup_fit(const ModelSpec& model, double strike,
                     std::vector<double> maturities, BlowupSource source,
                     const QuadratureConfig& q = {}, bool merton_correction = false);

}  // namespace djl::saddle
