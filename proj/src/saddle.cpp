#include "djl/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "djl/math.hpp"

namespace djl::saddle {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double real_m1(const ModelSpec& model, double s) {
    return models::log_mgf(model, {s, 0.0}, 1.0).real();
}

double real_dm1(const ModelSpec& model, double s) {
    return models::log_mgf_grad(model, {s, 0.0}, 1.0).dm_ds.real();
}

double real_d2m1(const ModelSpec& model, double s) {
    return models::log_mgf_grad(model, {s, 0.0}, 1.0).d2m_ds2.real();
}

struct Bracket {
    double lo, hi;  // d/ds m(s,1) - y changes sign over [lo, hi]
};

// Endpoint-damped evaluation range of the real strip.  For strips with
// square-root or pole singularities the derivative evaluated here is the
// operational sup/inf used for the NoSaddle decision.
Bracket damped_range(const models::Strip& st) {
    double lo = st.lo, hi = st.hi;
    if (std::isfinite(lo) && std::isfinite(hi)) {
        double margin = 1e-12 * st.width();
        return {lo + margin, hi - margin};
    }
    if (std::isfinite(lo)) return {st.closed_lo ? lo : lo + 1e-12, kNan};
    if (std::isfinite(hi)) return {kNan, st.closed_hi ? hi : hi - 1e-12};
    return {kNan, kNan};
}

}  // namespace

SaddleResult solve_saddle(const ModelSpec& model, double k, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("solve_saddle: T > 0 required");
    const double y = k / T;  // solve d/ds m(s,1) = k/T
    models::Strip st = models::strip(model);
    Bracket range = damped_range(st);

    auto g = [&](double s) { return real_dm1(model, s) - y; };

    // Establish a sign-changing bracket.  g is strictly increasing (m convex).
    double a, b;
    if (std::isfinite(st.lo)) {
        a = range.lo;
        if (g(a) > 0.0) {
            std::ostringstream os;
            os << "k/T = " << y << " below inf d/ds m = " << real_dm1(model, a);
            throw NoSaddle(os.str());
        }
    } else {
        a = -1.0;
        int it = 0;
        while (g(a) > 0.0) {
            a *= 2.0;
            if (!std::isfinite(g(a)) || ++it > 200)
                throw StripExhausted("no lower bracket for the saddle equation");
        }
    }
    if (std::isfinite(st.hi)) {
        b = range.hi;
        if (g(b) < 0.0) {
            std::ostringstream os;
            os << "k/T = " << y << " above sup d/ds m = " << real_dm1(model, b)
               << " on the strip (" << st.lo << ", " << st.hi << ")";
            throw NoSaddle(os.str());
        }
    } else {
        b = std::max(1.0, a);
        int it = 0;
        for (;;) {
            double gb = g(b);
            if (std::isnan(gb)) throw StripExhausted("derivative overflow while bracketing");
            if (gb >= 0.0 || std::isinf(gb)) break;
            b *= 2.0;
            if (++it > 200) throw StripExhausted("no upper bracket for the saddle equation");
        }
    }

    // Safeguarded Newton inside [a, b].
    const double tol = 0.5e-10 * std::max(1.0, std::abs(y));
    double x = 0.5 * (a + b);
    double gx = g(x);
    for (int it = 0; it < 200; ++it) {
        if (std::isfinite(gx)) {
            if (std::abs(gx) <= tol) break;
            (gx < 0.0 ? a : b) = x;
        } else {
            b = x;  // overflowed: treat as above target
        }
        double step_x = kNan;
        if (std::isfinite(gx)) {
            double d2 = real_d2m1(model, x);
            if (std::isfinite(d2) && d2 > 0.0) step_x = x - gx / d2;
        }
        if (!(step_x > a && step_x < b)) step_x = 0.5 * (a + b);
        if (step_x == x) break;  // bracket collapsed to machine precision
        x = step_x;
        gx = g(x);
    }
    if (!std::isfinite(gx) || std::abs(gx) > tol) {
        std::ostringstream os;
        os << "saddle residual " << gx << " at s = " << x << " exceeds tolerance "
           << tol;
        throw StripExhausted(os.str());
    }

    SaddleResult r;
    r.s_hat = x;
    r.k = k;
    r.T = T;
    r.m = T * real_m1(model, x);
    r.dm_ds = T * real_dm1(model, x);
    r.d2m_ds2 = T * real_d2m1(model, x);
    r.dm_dT = real_m1(model, x);
    r.local_variance_approx = (x > 0.0 && x < 1.0)
                                  ? kNan
                                  : 2.0 * r.dm_dT / (x * (x - 1.0));
    return r;
}

double wing_local_vol(const ModelSpec& model, double k, double T) {
    SaddleResult r = solve_saddle(model, k, T);
    const double edge = 1e-8;
    if (r.s_hat > -edge && r.s_hat < 1.0 + edge) {
        std::ostringstream os;
        os << "saddle s = " << r.s_hat
           << " in [0,1]; wing approximation inapplicable near the money";
        throw SaddleInUnitInterval(os.str());
    }
    return 2.0 * r.dm_dT / (r.s_hat * (r.s_hat - 1.0));
}

double merton_saddle_expansion(const models::MertonParams& p, double k, double T) {
    if (!(k > 0.0)) throw std::invalid_argument("merton_saddle_expansion: k > 0 required");
    if (!(p.lambda > 0.0))
        throw std::invalid_argument("merton_saddle_expansion: lambda > 0 required");
    double x = k / T;
    if (!(x > std::exp(1.0))) {
        std::ostringstream os;
        os << "k/T = " << x << " <= e; log log(k/T) not positive";
        throw RegimeTooSmall(os.str());
    }
    double L = std::log(x);
    double mu_d = p.mu / p.delta;
    double rhs = L - std::sqrt(2.0) * mu_d * std::sqrt(L) - 0.5 * std::log(L) +
                 mu_d * mu_d -
                 std::log(std::sqrt(2.0) * p.lambda * p.delta);
    if (!(rhs > 0.0)) {
        std::ostringstream os;
        os << "expansion gives delta^2 s^2/2 = " << rhs << " <= 0 at k/T = " << x;
        throw RegimeTooSmall(os.str());
    }
    return std::sqrt(2.0 * rhs) / p.delta;
}

BlowupFit blowup_fit(const ModelSpec& model, double strike,
                     std::vector<double> maturities, BlowupSource source,
                     const QuadratureConfig& q, bool merton_correction) {
    if (maturities.size() < 4)
        throw std::invalid_argument("blowup_fit: need at least 4 maturities");
    if (std::abs(strike - model.spot) < 1e-12)
        throw std::invalid_argument("blowup_fit: strike must differ from spot");
    std::sort(maturities.begin(), maturities.end(), std::greater<>());

    BlowupFit fit;
    fit.model_id = model.id.empty() ? models::model_name(model.params) : model.id;
    fit.strike = strike;
    fit.maturities = maturities;

    const auto* ruin = std::get_if<models::JumpToRuinParams>(&model.params);
    double k = std::log(strike / model.spot);
    for (double T : maturities) {
        double v;
        switch (source) {
            case BlowupSource::Fourier:
                v = dupire::local_vol_fourier(model, strike, T, q);
                break;
            case BlowupSource::ClosedFormRuin:
                if (!ruin)
                    throw std::invalid_argument("ruin source requires a jump-to-ruin model");
                v = dupire::ruin_local_vol(*ruin, strike, T);
                break;
            case BlowupSource::Saddle:
                v = wing_local_vol(model, k, T);
                break;
        }
        fit.local_variance.push_back(v);
    }

    std::size_t n = maturities.size();
    std::vector<double> log_t(n), log_v(n);
    for (std::size_t i = 0; i < n; ++i) {
        log_t[i] = std::log(maturities[i]);
        log_v[i] = std::log(fit.local_variance[i]);
    }
    // Headline exponent from the three smallest maturities (asymptotic regime),
    // R^2 over the full grid.
    auto head = fit_line(log_t.end() - 3, log_t.end(), log_v.end() - 3);
    auto full = fit_line(log_t.begin(), log_t.end(), log_v.begin());
    fit.exponent = -head.slope;
    fit.r2 = full.r2;

    if (ruin && strike < model.spot) {
        fit.exp_mode = true;
        double s2 = ruin->sigma * ruin->sigma;
        std::vector<double> inv_t(n), log_excess(n);
        for (std::size_t i = 0; i < n; ++i) {
            inv_t[i] = 1.0 / maturities[i];
            log_excess[i] = std::log(fit.local_variance[i] - s2);
        }
        auto ef = fit_line(inv_t.begin(), inv_t.end(), log_excess.begin());
        fit.exp_slope = ef.slope;
        fit.exp_r2 = ef.r2;
    }

    if (merton_correction) {
        fit.merton_correction = true;
        std::vector<double> ts(n);
        for (std::size_t i = 0; i < n; ++i) {
            double T = maturities[i];
            double y = fit.local_variance[i] * T *
                       std::pow(std::log(std::abs(k) / T), 1.5) / std::abs(k);
            fit.corrected_constant.push_back(y);
            ts[i] = T;
        }
        auto cf = fit_line(ts.begin(), ts.end(), fit.corrected_constant.begin());
        fit.correction_slope = cf.slope;
    }
    return fit;
}

}  // namespace djl::saddle
