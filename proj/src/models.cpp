#include "djl/models.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace djl::models {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_strip(const ParamSet& params, Complex s) {
    Strip st = strip(params);
    if (!st.contains(s.real())) {
        std::ostringstream os;
        os << model_name(params) << ": Re s = " << s.real()
           << " outside finiteness strip (" << st.lo << ", " << st.hi << ")";
        throw StripViolation(os.str());
    }
}

// Per-unit-time log-mgf m(s,1) and its s-derivatives, model by model.

Complex merton_m1(const MertonParams& p, Complex s) {
    return 0.5 * p.sigma * p.sigma * s * s + p.b * s +
           p.lambda * (std::exp(0.5 * p.delta * p.delta * s * s + p.mu * s) - 1.0);
}

Complex kou_m1(const KouParams& p, Complex s) {
    Complex jump = p.p * p.lambda_plus / (p.lambda_plus - s) +
                   (1.0 - p.p) * p.lambda_minus / (p.lambda_minus + s) - 1.0;
    return 0.5 * p.sigma * p.sigma * s * s + p.b * s + p.lambda * jump;
}

Complex nig_m1(const NigParams& p, Complex s) {
    double gamma = std::sqrt(p.alpha * p.alpha - p.beta * p.beta);
    Complex bs = p.beta + s;
    Complex root = std::sqrt(p.alpha * p.alpha - bs * bs);
    return p.delta * (gamma - root) + p.b * s;
}

Complex vg_q(const VgParams& p, Complex s) {
    return 1.0 - p.theta * p.nu * s - 0.5 * p.sigma * p.sigma * p.nu * s * s;
}

Complex vg_m1(const VgParams& p, Complex s) {
    return -std::log(vg_q(p, s)) / p.nu + p.mu * s;
}

Complex ruin_m1(const JumpToRuinParams& p, Complex s) {
    // Continuous (no-default) part; the atom at zero contributes nothing for
    // Re s > 0.
    return 0.5 * p.sigma * p.sigma * s * s +
           (p.lambda - 0.5 * p.sigma * p.sigma) * s - p.lambda;
}

Complex bs_m1(const BlackScholesParams& p, Complex s) {
    return 0.5 * p.sigma * p.sigma * (s * s - s);
}

Complex m1(const ParamSet& params, Complex s) {
    return std::visit(
        [&](const auto& p) -> Complex {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MertonParams>) return merton_m1(p, s);
            else if constexpr (std::is_same_v<P, KouParams>) return kou_m1(p, s);
            else if constexpr (std::is_same_v<P, NigParams>) return nig_m1(p, s);
            else if constexpr (std::is_same_v<P, VgParams>) return vg_m1(p, s);
            else if constexpr (std::is_same_v<P, JumpToRuinParams>) return ruin_m1(p, s);
            else return bs_m1(p, s);
        },
        params);
}

struct D2 {
    Complex first;
    Complex second;
};

D2 m1_derivs(const ParamSet& params, Complex s) {
    return std::visit(
        [&](const auto& p) -> D2 {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MertonParams>) {
                double s2 = p.sigma * p.sigma, d2 = p.delta * p.delta;
                Complex e = std::exp(0.5 * d2 * s * s + p.mu * s);
                Complex g = d2 * s + p.mu;
                return {s2 * s + p.b + p.lambda * g * e,
                        s2 + p.lambda * (g * g + d2) * e};
            } else if constexpr (std::is_same_v<P, KouParams>) {
                double s2 = p.sigma * p.sigma;
                Complex up = p.lambda_plus - s, dn = p.lambda_minus + s;
                Complex d1 = p.p * p.lambda_plus / (up * up) -
                             (1.0 - p.p) * p.lambda_minus / (dn * dn);
                Complex dd = 2.0 * p.p * p.lambda_plus / (up * up * up) +
                             2.0 * (1.0 - p.p) * p.lambda_minus / (dn * dn * dn);
                return {s2 * s + p.b + p.lambda * d1, s2 + p.lambda * dd};
            } else if constexpr (std::is_same_v<P, NigParams>) {
                Complex bs = p.beta + s;
                Complex root = std::sqrt(p.alpha * p.alpha - bs * bs);
                return {p.delta * bs / root + p.b,
                        p.delta * p.alpha * p.alpha / (root * root * root)};
            } else if constexpr (std::is_same_v<P, VgParams>) {
                Complex q = vg_q(p, s);
                Complex num = p.theta + p.sigma * p.sigma * s;
                return {num / q + p.mu,
                        p.sigma * p.sigma / q + p.nu * num * num / (q * q)};
            } else if constexpr (std::is_same_v<P, JumpToRuinParams>) {
                double s2 = p.sigma * p.sigma;
                return {s2 * s + (p.lambda - 0.5 * s2), Complex(s2)};
            } else {
                double s2 = p.sigma * p.sigma;
                return {s2 * s - 0.5 * s2, Complex(s2)};
            }
        },
        params);
}

}  // namespace

Strip strip(const ParamSet& params) {
    return std::visit(
        [](const auto& p) -> Strip {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MertonParams> ||
                          std::is_same_v<P, BlackScholesParams>) {
                return {-kInf, kInf, false, false};
            } else if constexpr (std::is_same_v<P, KouParams>) {
                return {-p.lambda_minus, p.lambda_plus, false, false};
            } else if constexpr (std::is_same_v<P, NigParams>) {
                // Finite at the square-root branch points.
                return {-p.alpha - p.beta, p.alpha - p.beta, true, true};
            } else if constexpr (std::is_same_v<P, VgParams>) {
                // Roots of 1 - theta*nu*s - sigma^2*nu*s^2/2.
                double s2n = p.sigma * p.sigma * p.nu;
                double disc = std::sqrt(p.theta * p.theta * p.nu * p.nu + 2.0 * s2n);
                return {-(p.theta * p.nu + disc) / s2n,
                        (disc - p.theta * p.nu) / s2n, false, false};
            } else {
                // jump-to-ruin: S_T may be zero, so only Re s >= 0.
                return {0.0, kInf, true, false};
            }
        },
        params);
}

double martingale_drift(const ParamSet& params) {
    return std::visit(
        [](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MertonParams>) {
                return -0.5 * p.sigma * p.sigma -
                       p.lambda * (std::exp(0.5 * p.delta * p.delta + p.mu) - 1.0);
            } else if constexpr (std::is_same_v<P, KouParams>) {
                if (p.lambda_plus <= 1.0)
                    throw NoMartingaleDrift("Kou requires lambda_plus > 1");
                double jump = p.p * p.lambda_plus / (p.lambda_plus - 1.0) +
                              (1.0 - p.p) * p.lambda_minus / (p.lambda_minus + 1.0) -
                              1.0;
                return -0.5 * p.sigma * p.sigma - p.lambda * jump;
            } else if constexpr (std::is_same_v<P, NigParams>) {
                if (std::abs(p.beta + 1.0) > p.alpha)
                    throw NoMartingaleDrift("NIG requires |beta+1| <= alpha");
                double gamma = std::sqrt(p.alpha * p.alpha - p.beta * p.beta);
                double g1 = std::sqrt(p.alpha * p.alpha -
                                      (p.beta + 1.0) * (p.beta + 1.0));
                return -p.delta * (gamma - g1);
            } else if constexpr (std::is_same_v<P, VgParams>) {
                double q1 = 1.0 - p.theta * p.nu - 0.5 * p.sigma * p.sigma * p.nu;
                if (q1 <= 0.0)
                    throw NoMartingaleDrift("VG requires 1 - theta*nu - sigma^2*nu/2 > 0");
                return std::log(q1) / p.nu;
            } else if constexpr (std::is_same_v<P, JumpToRuinParams>) {
                return p.lambda - 0.5 * p.sigma * p.sigma;  // fixed by the model
            } else {
                return -0.5 * p.sigma * p.sigma;
            }
        },
        params);
}

ParamSet with_martingale_drift(const ParamSet& params) {
    ParamSet out = params;
    double b = martingale_drift(params);
    std::visit(
        [&](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MertonParams> ||
                          std::is_same_v<P, KouParams> ||
                          std::is_same_v<P, NigParams>) {
                p.b = b;
            } else if constexpr (std::is_same_v<P, VgParams>) {
                p.mu = b;
            }
            // jump-to-ruin and BS drifts are implied by their parameters
        },
        out);
    return out;
}

void validate(const ParamSet& params) {
    std::visit(
        [](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            auto req = [](bool ok, const char* msg) {
                if (!ok) throw std::invalid_argument(msg);
            };
            if constexpr (std::is_same_v<P, MertonParams>) {
                req(p.sigma > 0, "Merton: sigma > 0");
                req(p.lambda >= 0, "Merton: lambda >= 0");
                req(p.delta > 0, "Merton: delta > 0");
            } else if constexpr (std::is_same_v<P, KouParams>) {
                req(p.sigma > 0, "Kou: sigma > 0");
                req(p.lambda >= 0, "Kou: lambda >= 0");
                req(p.p >= 0 && p.p <= 1, "Kou: p in [0,1]");
                req(p.lambda_plus > 0, "Kou: lambda_plus > 0");
                req(p.lambda_minus > 0, "Kou: lambda_minus > 0");
            } else if constexpr (std::is_same_v<P, NigParams>) {
                req(p.alpha > 0, "NIG: alpha > 0");
                req(std::abs(p.beta) < p.alpha, "NIG: |beta| < alpha");
                req(p.delta > 0, "NIG: delta > 0");
            } else if constexpr (std::is_same_v<P, VgParams>) {
                req(p.nu > 0, "VG: nu > 0");
                req(p.sigma > 0, "VG: sigma > 0");
            } else if constexpr (std::is_same_v<P, JumpToRuinParams>) {
                req(p.sigma > 0, "ruin: sigma > 0");
                req(p.lambda >= 0, "ruin: lambda >= 0");
            } else {
                req(p.sigma > 0, "BS: sigma > 0");
            }
        },
        params);
}

namespace {
ModelSpec finish(ParamSet params, std::string id) {
    validate(params);
    ModelSpec m;
    m.params = with_martingale_drift(params);
    m.spot = 1.0;
    m.id = std::move(id);
    return m;
}
}  // namespace

ModelSpec make_merton(double sigma, double lambda, double mu, double delta) {
    return finish(MertonParams{sigma, lambda, mu, delta, 0.0}, "merton");
}
ModelSpec make_kou(double sigma, double lambda, double p, double lambda_plus,
                   double lambda_minus) {
    return finish(KouParams{sigma, lambda, p, lambda_plus, lambda_minus, 0.0}, "kou");
}
ModelSpec make_nig(double alpha, double beta, double delta) {
    return finish(NigParams{alpha, beta, delta, 0.0}, "nig");
}
ModelSpec make_vg(double theta, double nu, double sigma) {
    return finish(VgParams{theta, nu, sigma, 0.0}, "vg");
}
ModelSpec make_ruin(double sigma, double lambda) {
    return finish(JumpToRuinParams{sigma, lambda}, "ruin");
}
ModelSpec make_bs(double sigma) {
    return finish(BlackScholesParams{sigma}, "bs");
}

Complex log_mgf(const ModelSpec& model, Complex s, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("log_mgf: T > 0 required");
    check_strip(model.params, s);
    return T * m1(model.params, s);
}

MgfDerivs log_mgf_grad(const ModelSpec& model, Complex s, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("log_mgf_grad: T > 0 required");
    check_strip(model.params, s);
    Complex m = m1(model.params, s);
    D2 d = m1_derivs(model.params, s);
    return {T * m, T * d.first, T * d.second, m};
}

double mean_rate(const ParamSet& params) {
    D2 d = m1_derivs(params, Complex(0.0, 0.0));
    return d.first.real();
}

double variance_rate(const ParamSet& params) {
    D2 d = m1_derivs(params, Complex(0.0, 0.0));
    return d.second.real();
}

VgGateResult vg_smoothness_gate(const VgParams& p, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("vg_smoothness_gate: T > 0 required");
    double exponent = 2.0 * T / p.nu;
    // Integrability of the characteristic function is strict: the boundary
    // 2T/nu = 1 is classified as singular.
    return {exponent > 1.0 ? Smoothness::Smooth : Smoothness::SingularDensity,
            exponent};
}

void require_density_exists(const ModelSpec& model, double T) {
    if (const auto* vg = std::get_if<VgParams>(&model.params)) {
        auto gate = vg_smoothness_gate(*vg, T);
        if (gate.verdict == Smoothness::SingularDensity) {
            std::ostringstream os;
            os << "VG density requires T > nu/2 = " << 0.5 * vg->nu
               << "; got T = " << T << " (decay exponent " << gate.exponent << ")";
            throw SingularDensity(os.str());
        }
    }
}

std::string model_name(const ParamSet& params) {
    return std::visit(
        [](const auto& p) -> std::string {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MertonParams>) return "merton";
            else if constexpr (std::is_same_v<P, KouParams>) return "kou";
            else if constexpr (std::is_same_v<P, NigParams>) return "nig";
            else if constexpr (std::is_same_v<P, VgParams>) return "vg";
            else if constexpr (std::is_same_v<P, JumpToRuinParams>) return "ruin";
            else return "bs";
        },
        params);
}

}  // namespace djl::models
