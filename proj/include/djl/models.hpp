#pragma once

#include <complex>
#include <string>
#include <variant>

#include "djl/errors.hpp"

namespace djl::models {

using Complex = std::complex<double>;

// Parameter sets.  Drift fields are derived: factories fix them so that the
// discounted price is a martingale, i.e. m(1,T) = 0 for all T.

struct MertonParams {
    double sigma;   // diffusion vol
    double lambda;  // jump intensity
    double mu;      // mean log-jump size
    double delta;   // log-jump-size std dev
    double b;       // drift
};

struct KouParams {
    double sigma;
    double lambda;
    double p;             // up-jump probability
    double lambda_plus;   // up-jump rate
    double lambda_minus;  // down-jump rate
    double b;
};

struct NigParams {
    double alpha;  // tail heaviness
    double beta;   // asymmetry, |beta| < alpha
    double delta;  // scale
    double b;
};

struct VgParams {
    double theta;  // drift of subordinated BM
    double nu;     // variance rate of the Gamma clock
    double sigma;  // vol of subordinated BM
    double mu;
};

struct JumpToRuinParams {
    double sigma;   // Black-Scholes vol of the surviving part
    double lambda;  // default intensity
};

struct BlackScholesParams {
    double sigma;
};

using ParamSet = std::variant<MertonParams, KouParams, NigParams, VgParams,
                              JumpToRuinParams, BlackScholesParams>;

struct ModelSpec {
    ParamSet params;
    double spot = 1.0;
    std::string id;
};

// Real strip of finiteness of the moment generating function.
struct Strip {
    double lo;
    double hi;
    bool closed_lo;
    bool closed_hi;

    bool contains(double re_s) const {
        if (re_s < lo || (re_s == lo && !closed_lo)) return false;
        if (re_s > hi || (re_s == hi && !closed_hi)) return false;
        return true;
    }
    double width() const { return hi - lo; }
};

Strip strip(const ParamSet& params);
inline Strip strip(const ModelSpec& m) { return strip(m.params); }

// Drift making m(1,T) = 0.  Throws NoMartingaleDrift when s = 1 is outside
// the finiteness strip (Kou lambda_plus <= 1, NIG |beta+1| > alpha, ...).
double martingale_drift(const ParamSet& params);

// Returns a copy with the drift field replaced by the martingale drift.
ParamSet with_martingale_drift(const ParamSet& params);

// Factories; parameters validated, martingale drift applied at construction.
ModelSpec make_merton(double sigma, double lambda, double mu, double delta);
ModelSpec make_kou(double sigma, double lambda, double p, double lambda_plus,
                   double lambda_minus);
ModelSpec make_nig(double alpha, double beta, double delta);
ModelSpec make_vg(double theta, double nu, double sigma);
ModelSpec make_ruin(double sigma, double lambda);
ModelSpec make_bs(double sigma);

void validate(const ParamSet& params);

// m(s,T) = log E[exp(s X_T)], closed form, m(s,T) = T m(s,1) for all models.
// Throws StripViolation when Re s leaves the finiteness strip.
Complex log_mgf(const ModelSpec& model, Complex s, double T);

struct MgfDerivs {
    Complex m;
    Complex dm_ds;
    Complex d2m_ds2;
    Complex dm_dT;  // equals m(s,1) by time homogeneity
};

// Analytic closed-form derivatives (no finite differences).
MgfDerivs log_mgf_grad(const ModelSpec& model, Complex s, double T);

// Mean and variance rates of X_1, used to size tabulation grids.
double mean_rate(const ParamSet& params);
double variance_rate(const ParamSet& params);

enum class Smoothness { Smooth, SingularDensity };

struct VgGateResult {
    Smoothness verdict;
    double exponent;  // 2T/nu, the characteristic-function decay exponent
};

// The density of the asymmetric VG model is smooth only when 2T/nu > 1;
// the boundary counts as singular.
VgGateResult vg_smoothness_gate(const VgParams& p, double T);

// Throws SingularDensity when the model is VG and T is at or below nu/2.
void require_density_exists(const ModelSpec& model, double T);

std::string model_name(const ParamSet& params);

}  // namespace djl::models
