#include "djl/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "djl/math.hpp"
#include "djl/rng.hpp"

namespace djl::pricing {

using models::Complex;

double pick_contour(const ModelSpec& model, const QuadratureConfig& q) {
    models::Strip st = models::strip(model);
    if (q.contour != 0.0) {
        if (q.contour <= 1.0 || !st.contains(q.contour) || q.contour == st.hi) {
            std::ostringstream os;
            os << "contour " << q.contour << " must lie in (1, " << st.hi << ")";
            throw StripViolation(os.str());
        }
        return q.contour;
    }
    if (!(st.hi > 1.0)) {
        throw StripViolation("model strip does not extend past s = 1; cannot price");
    }
    if (std::isinf(st.hi)) return 1.5;
    return std::min(1.5, 0.5 * (1.0 + st.hi));
}

double pick_bound(const ModelSpec& model, double T, const QuadratureConfig& q,
                  bool payoff_integrand) {
    if (q.bound != 0.0) return q.bound;
    // Exponent drop for the integrand tail, e^-46 ~ 1e-20.
    const double drop = 46.0;
    return std::visit(
        [&](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, models::NigParams>) {
                // |M| ~ exp(-delta*T*u) for large u.
                return drop / (p.delta * T) + 2.0 * p.alpha;
            } else if constexpr (std::is_same_v<P, models::VgParams>) {
                // Polynomial decay u^{-2T/nu}, plus u^{-2} for payoff kernels.
                double decay = 2.0 * T / p.nu + (payoff_integrand ? 2.0 : 0.0);
                if (decay <= 1.05)
                    throw QuadratureNotConverged(
                        "VG integrand tail decays too slowly to truncate");
                double u = std::pow(1e-11, -1.0 / (decay - 1.0));
                return std::clamp(u, 50.0, 5e6);
            } else {
                return std::max(50.0, std::sqrt(2.0 * drop / (T * p.sigma * p.sigma)));
            }
        },
        model.params);
}

std::array<double, 2> contour_integral2(
    const std::function<std::array<double, 2>(double)>& f, double bound,
    const QuadratureConfig& q) {
    int n = std::max(16, q.nodes);
    double h = bound / n;

    std::array<double, 2> sum = {0.0, 0.0};
    std::array<double, 2> abs_scale = {0.0, 0.0};
    {
        auto f0 = f(0.0), fU = f(bound);
        for (int c = 0; c < 2; ++c) {
            sum[c] = 0.5 * (f0[c] + fU[c]);
            abs_scale[c] = 0.5 * (std::abs(f0[c]) + std::abs(fU[c]));
        }
        for (int i = 1; i < n; ++i) {
            auto v = f(i * h);
            for (int c = 0; c < 2; ++c) {
                sum[c] += v[c];
                abs_scale[c] += std::abs(v[c]);
            }
        }
    }
    std::array<double, 2> current = {sum[0] * h, sum[1] * h};
    std::array<double, 2> scale = {abs_scale[0] * h, abs_scale[1] * h};

    for (int d = 0; d < q.max_doublings; ++d) {
        double h2 = 0.5 * h;
        std::array<double, 2> odd = {0.0, 0.0};
        std::array<double, 2> odd_abs = {0.0, 0.0};
        for (int i = 0; i < n; ++i) {
            auto v = f((2 * i + 1) * h2);
            for (int c = 0; c < 2; ++c) {
                odd[c] += v[c];
                odd_abs[c] += std::abs(v[c]);
            }
        }
        std::array<double, 2> next = {0.5 * current[0] + odd[0] * h2,
                                      0.5 * current[1] + odd[1] * h2};
        scale = {0.5 * scale[0] + odd_abs[0] * h2, 0.5 * scale[1] + odd_abs[1] * h2};

        bool converged = true;
        for (int c = 0; c < 2; ++c) {
            double diff = std::abs(next[c] - current[c]);
            if (diff > q.rel_tol * std::abs(next[c]) + 1e-15 * scale[c])
                converged = false;
        }
        current = next;
        n *= 2;
        h = h2;
        if (converged) return current;
    }
    throw QuadratureNotConverged("contour integral did not stabilize after doubling");
}

// ---------------------------------------------------------------------------
// Closed forms

double bs_call(double spot, double strike, double sigma, double T, double rate) {
    double sq = sigma * std::sqrt(T);
    double d1 = (std::log(spot / strike) + (rate + 0.5 * sigma * sigma) * T) / sq;
    double d2 = d1 - sq;
    return spot * norm_cdf(d1) - strike * std::exp(-rate * T) * norm_cdf(d2);
}

double bs_call_theta(double spot, double strike, double sigma, double T, double rate) {
    double sq = sigma * std::sqrt(T);
    double d1 = (std::log(spot / strike) + (rate + 0.5 * sigma * sigma) * T) / sq;
    double d2 = d1 - sq;
    return spot * norm_pdf(d1) * sigma / (2.0 * std::sqrt(T)) +
           rate * strike * std::exp(-rate * T) * norm_cdf(d2);
}

double lognormal_density(double spot, double strike, double sigma, double T,
                         double rate) {
    double sq = sigma * std::sqrt(T);
    double d2 = (std::log(spot / strike) + (rate - 0.5 * sigma * sigma) * T) / sq;
    return std::exp(-rate * T) * norm_pdf(d2) / (strike * sq);
}

// ---------------------------------------------------------------------------
// Fourier transforms along the vertical contour

namespace {

void check_kt(double strike, double T) {
    if (!(strike > 0.0)) throw std::invalid_argument("strike > 0 required");
    if (!(T > 0.0)) throw std::invalid_argument("T > 0 required");
}

}  // namespace

double call_price_fourier(const ModelSpec& model, double strike, double T,
                          const QuadratureConfig& q) {
    check_kt(strike, T);
    double sc = pick_contour(model, q);
    double bound = pick_bound(model, T, q, true);
    double k = std::log(strike / model.spot);

    auto f = [&](double u) -> std::array<double, 2> {
        Complex s(sc, u);
        Complex w = std::exp(-k * s + models::log_mgf(model, s, T));
        return {(w / (s * (s - 1.0))).real(), 0.0};
    };
    auto I = contour_integral2(f, bound, q);
    return strike * I[0] / M_PI;  // K^{1-s} = (K/S0) e^{-ks}
}

double density_fourier(const ModelSpec& model, double strike, double T,
                       const QuadratureConfig& q) {
    check_kt(strike, T);
    models::require_density_exists(model, T);
    double sc = pick_contour(model, q);
    double bound = pick_bound(model, T, q, false);
    double k = std::log(strike / model.spot);

    auto f = [&](double u) -> std::array<double, 2> {
        Complex s(sc, u);
        return {std::exp(-k * s + models::log_mgf(model, s, T)).real(), 0.0};
    };
    auto I = contour_integral2(f, bound, q);
    return I[0] / (M_PI * strike);
}

double dC_dT_fourier(const ModelSpec& model, double strike, double T,
                     const QuadratureConfig& q) {
    check_kt(strike, T);
    double sc = pick_contour(model, q);
    double bound = pick_bound(model, T, q, true);
    double k = std::log(strike / model.spot);

    auto f = [&](double u) -> std::array<double, 2> {
        Complex s(sc, u);
        auto g = models::log_mgf_grad(model, s, T);
        Complex w = std::exp(-k * s + g.m);
        return {(g.dm_dT * w / (s * (s - 1.0))).real(), 0.0};
    };
    auto I = contour_integral2(f, bound, q);
    return strike * I[0] / M_PI;
}

double call_price(const ModelSpec& model, double strike, double T,
                  const QuadratureConfig& q) {
    check_kt(strike, T);
    if (const auto* bs = std::get_if<models::BlackScholesParams>(&model.params))
        return bs_call(model.spot, strike, bs->sigma, T);
    if (const auto* r = std::get_if<models::JumpToRuinParams>(&model.params))
        return bs_call(model.spot, strike, r->sigma, T, r->lambda);
    return call_price_fourier(model, strike, T, q);
}

double density(const ModelSpec& model, double strike, double T,
               const QuadratureConfig& q) {
    check_kt(strike, T);
    if (const auto* bs = std::get_if<models::BlackScholesParams>(&model.params))
        return lognormal_density(model.spot, strike, bs->sigma, T);
    if (const auto* r = std::get_if<models::JumpToRuinParams>(&model.params))
        return lognormal_density(model.spot, strike, r->sigma, T, r->lambda);
    return density_fourier(model, strike, T, q);
}

double dC_dT(const ModelSpec& model, double strike, double T,
             const QuadratureConfig& q) {
    check_kt(strike, T);
    if (const auto* bs = std::get_if<models::BlackScholesParams>(&model.params))
        return bs_call_theta(model.spot, strike, bs->sigma, T);
    if (const auto* r = std::get_if<models::JumpToRuinParams>(&model.params))
        return bs_call_theta(model.spot, strike, r->sigma, T, r->lambda);
    return dC_dT_fourier(model, strike, T, q);
}

// ---------------------------------------------------------------------------
// Surface construction

void audit_arbitrage(const SurfaceGrid& s, double tol) {
    const auto& K = s.strikes;
    const auto& Ts = s.maturities;
    for (std::size_t j = 0; j < Ts.size(); ++j) {
        for (std::size_t i = 0; i < K.size(); ++i) {
            double c = s.price(i, j);
            double intrinsic = std::max(s.spot - K[i], 0.0);
            if (c < intrinsic - tol || c < -tol) {
                std::ostringstream os;
                os << "price below intrinsic at K=" << K[i] << " T=" << Ts[j];
                throw ArbitrageDetected(os.str());
            }
            if (i + 1 < K.size() && s.price(i + 1, j) > c + tol) {
                std::ostringstream os;
                os << "call not decreasing in strike at K=" << K[i] << " T=" << Ts[j];
                throw ArbitrageDetected(os.str());
            }
            if (i > 0 && i + 1 < K.size()) {
                // discrete butterfly: second divided difference >= -tol
                double dd =
                    (s.price(i + 1, j) - c) / (K[i + 1] - K[i]) -
                    (c - s.price(i - 1, j)) / (K[i] - K[i - 1]);
                if (dd < -tol) {
                    std::ostringstream os;
                    os << "butterfly violation at K=" << K[i] << " T=" << Ts[j];
                    throw ArbitrageDetected(os.str());
                }
            }
            if (j + 1 < Ts.size() && s.price(i, j + 1) < c - tol) {
                std::ostringstream os;
                os << "calendar violation at K=" << K[i] << " T=" << Ts[j];
                throw ArbitrageDetected(os.str());
            }
        }
    }
}

SurfaceGrid build_surface(const ModelSpec& model, std::vector<double> strikes,
                          std::vector<double> maturities, const QuadratureConfig& q) {
    if (strikes.empty() || maturities.empty())
        throw std::invalid_argument("build_surface: empty grid");
    if (!std::is_sorted(strikes.begin(), strikes.end()) || strikes.front() <= 0.0)
        throw std::invalid_argument("build_surface: strikes must be ascending, positive");
    if (!std::is_sorted(maturities.begin(), maturities.end()) ||
        maturities.front() <= 0.0)
        throw std::invalid_argument(
            "build_surface: maturities must be ascending, positive");

    SurfaceGrid s;
    s.spot = model.spot;
    s.strikes = std::move(strikes);
    s.maturities = std::move(maturities);
    s.prices.resize(s.strikes.size() * s.maturities.size());
    for (std::size_t j = 0; j < s.maturities.size(); ++j)
        for (std::size_t i = 0; i < s.strikes.size(); ++i)
            s.price(i, j) = call_price(model, s.strikes[i], s.maturities[j], q);
    audit_arbitrage(s);
    return s;
}

// ---------------------------------------------------------------------------
// Randomized spot sampling

double SpotSampler::draw(double u) const {
    if (u <= atom_at_zero) return 0.0;
    double target = (u - atom_at_zero) / (1.0 - atom_at_zero) * continuous_mass;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.begin()) return strikes.front();
    if (it == cdf.end()) return strikes.back();
    std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    double c0 = cdf[i - 1], c1 = cdf[i];
    double w = c1 > c0 ? (target - c0) / (c1 - c0) : 0.5;
    return strikes[i - 1] + w * (strikes[i] - strikes[i - 1]);
}

double SpotSampler::cdf_at(double strike) const {
    if (strike < strikes.front()) return atom_at_zero;
    if (strike >= strikes.back()) return 1.0;
    auto it = std::upper_bound(strikes.begin(), strikes.end(), strike);
    std::size_t i = static_cast<std::size_t>(it - strikes.begin());
    double w = (strike - strikes[i - 1]) / (strikes[i] - strikes[i - 1]);
    double cont = cdf[i - 1] + w * (cdf[i] - cdf[i - 1]);
    return atom_at_zero + cont / continuous_mass * (1.0 - atom_at_zero);
}

SpotSampler make_spot_sampler(const ModelSpec& model, double eps,
                              const QuadratureConfig& q, const SamplerConfig& sc) {
    if (!(eps > 0.0)) throw std::invalid_argument("sample_spot: eps > 0 required");
    models::require_density_exists(model, eps);

    double expected_mass = 1.0;
    double atom = 0.0;
    if (const auto* r = std::get_if<models::JumpToRuinParams>(&model.params)) {
        expected_mass = std::exp(-r->lambda * eps);
        atom = 1.0 - expected_mass;
    }

    double mean_k = models::mean_rate(model.params) * eps;
    double sd = std::sqrt(models::variance_rate(model.params) * eps);
    double span = sc.span_std_devs * sd;

    SpotSampler out;
    for (int attempt = 0;; ++attempt) {
        int n = sc.points * (1 << attempt);
        out.strikes.resize(n);
        out.cdf.assign(n, 0.0);
        double k_lo = mean_k - span, k_hi = mean_k + span;
        for (int i = 0; i < n; ++i) {
            double k = k_lo + (k_hi - k_lo) * i / (n - 1);
            out.strikes[i] = model.spot * std::exp(k);
        }
        double prev_p = std::max(0.0, density(model, out.strikes[0], eps, q));
        for (int i = 1; i < n; ++i) {
            double p = std::max(0.0, density(model, out.strikes[i], eps, q));
            out.cdf[i] = out.cdf[i - 1] +
                         0.5 * (p + prev_p) * (out.strikes[i] - out.strikes[i - 1]);
            prev_p = p;
        }
        double mass = out.cdf.back();
        if (mass >= sc.coverage * expected_mass) break;
        if (attempt >= sc.max_widenings) {
            std::ostringstream os;
            os << "tabulated mass " << mass << " < " << sc.coverage << " * "
               << expected_mass << " after widening to " << span / sd << " std devs";
            throw TabulationRangeTooNarrow(os.str());
        }
        span *= 2.0;  // jump tails can reach past the default span
    }
    out.atom_at_zero = atom;
    out.continuous_mass = out.cdf.back();
    return out;
}

std::vector<double> sample_spot(const ModelSpec& model, double eps, std::size_t n,
                                std::uint64_t seed, std::uint64_t stream,
                                const QuadratureConfig& q, const SamplerConfig& sc) {
    SpotSampler sampler = make_spot_sampler(model, eps, q, sc);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = sampler.draw(rng::u01(seed, stream, i));
    return out;
}

}  // namespace djl::pricing
