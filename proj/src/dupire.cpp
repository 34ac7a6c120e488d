#include "djl/dupire.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

#include "djl/math.hpp"

namespace djl::dupire {

using models::Complex;

namespace {

constexpr double kDensityFloor = 1e-14;

// Three-point Lagrange derivatives at the middle node of a non-uniform stencil.
double lagrange_d1(double x0, double x1, double x2, double f0, double f1, double f2) {
    return f0 * (x1 - x2) / ((x0 - x1) * (x0 - x2)) +
           f1 * (2.0 * x1 - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
           f2 * (x1 - x0) / ((x2 - x0) * (x2 - x1));
}

double lagrange_d2(double x0, double x1, double x2, double f0, double f1, double f2) {
    return 2.0 * (f0 / ((x0 - x1) * (x0 - x2)) + f1 / ((x1 - x0) * (x1 - x2)) +
                  f2 / ((x2 - x0) * (x2 - x1)));
}

std::size_t locate_node(const std::vector<double>& grid, double x, const char* what) {
    auto it = std::lower_bound(grid.begin(), grid.end(), x - 1e-9 * std::abs(x));
    if (it == grid.end() || std::abs(*it - x) > 1e-9 * std::max(1.0, std::abs(x))) {
        std::ostringstream os;
        os << what << " = " << x << " is not a grid node";
        throw std::invalid_argument(os.str());
    }
    return static_cast<std::size_t>(it - grid.begin());
}

}  // namespace

std::string provenance_name(Provenance p) {
    switch (p) {
        case Provenance::FiniteDifference: return "finite_difference";
        case Provenance::Fourier: return "fourier";
        case Provenance::ClosedFormRuin: return "closed_form_ruin";
        case Provenance::SaddleApprox: return "saddle_approx";
    }
    return "unknown";
}

TimeChange shift_time_change(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("time change: eps > 0 required");
    return {"shift", eps, [eps](double T) { return T + eps; },
            [](double) { return 1.0; }};
}

TimeChange affine_time_change(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("affine time change: a > 0 and b > 0 required");
    std::ostringstream os;
    os << "affine:" << a << "," << b;
    return {os.str(), a, [a, b](double T) { return a + b * T; },
            [b](double) { return b; }};
}

double local_vol_fd(const SurfaceGrid& s, double strike, double T) {
    std::size_t i = locate_node(s.strikes, strike, "strike");
    std::size_t j = locate_node(s.maturities, T, "maturity");
    if (i == 0 || i + 1 >= s.strikes.size() || j == 0 || j + 1 >= s.maturities.size())
        throw BoundaryPoint("Dupire stencil leaves the surface grid");

    double d2K = lagrange_d2(s.strikes[i - 1], s.strikes[i], s.strikes[i + 1],
                             s.price(i - 1, j), s.price(i, j), s.price(i + 1, j));
    if (d2K <= kDensityFloor) {
        std::ostringstream os;
        os << "discrete d2C/dK2 = " << d2K << " at K=" << strike << " T=" << T;
        throw DegenerateDensity(os.str());
    }
    double dT = lagrange_d1(s.maturities[j - 1], s.maturities[j], s.maturities[j + 1],
                            s.price(i, j - 1), s.price(i, j), s.price(i, j + 1));
    return 2.0 * dT / (strike * strike * d2K);
}

double local_vol_fourier(const ModelSpec& model, double strike, double T,
                         const QuadratureConfig& q) {
    if (!(strike > 0.0) || !(T > 0.0))
        throw std::invalid_argument("local_vol_fourier: strike > 0, T > 0 required");
    models::require_density_exists(model, T);
    double sc = pricing::pick_contour(model, q);
    double bound = pricing::pick_bound(model, T, q, false);
    double k = std::log(strike / model.spot);

    // Numerator and denominator of the local-vol Fourier representation share
    // one node set, so ratios that are exact on the contour stay exact.
    auto f = [&](double u) -> std::array<double, 2> {
        Complex s(sc, u);
        auto g = models::log_mgf_grad(model, s, T);
        Complex w = std::exp(-k * s + g.m);
        return {(g.dm_dT * w / (s * (s - 1.0))).real(), w.real()};
    };
    auto I = pricing::contour_integral2(f, bound, q);
    if (I[1] <= kDensityFloor) {
        std::ostringstream os;
        os << "density integral " << I[1] << " at K=" << strike << " T=" << T;
        throw DegenerateDensity(os.str());
    }
    return 2.0 * I[0] / I[1];
}

double ruin_local_vol(const models::JumpToRuinParams& p, double strike, double T) {
    if (!(strike > 0.0) || !(T > 0.0))
        throw std::invalid_argument("ruin_local_vol: strike > 0, T > 0 required");
    if (p.lambda == 0.0) return p.sigma * p.sigma;
    double sq = p.sigma * std::sqrt(T);
    double d2 = (std::log(1.0 / strike) + p.lambda * T) / sq - 0.5 * sq;
    return p.sigma * p.sigma +
           2.0 * p.lambda * p.sigma * std::sqrt(T) * norm_cdf(d2) / norm_pdf(d2);
}

// ---------------------------------------------------------------------------
// Shifted field

ShiftedLocalVol::ShiftedLocalVol(ModelSpec model, double eps, QuadratureConfig q,
                                 std::optional<TimeChange> tc)
    : model_(std::move(model)),
      quad_(q),
      tc_(tc ? std::move(*tc) : shift_time_change(eps)) {
    if (!(eps > 0.0)) throw std::invalid_argument("ShiftedLocalVol: eps > 0 required");
    tc_.eps = tc_.tau(0.0);
    models::require_density_exists(*model_, tc_.eps);
    provenance_ = std::holds_alternative<models::JumpToRuinParams>(model_->params)
                      ? Provenance::ClosedFormRuin
                      : Provenance::Fourier;
}

ShiftedLocalVol::ShiftedLocalVol(SurfaceGrid surface, double eps,
                                 std::optional<TimeChange> tc)
    : surface_(std::move(surface)),
      tc_(tc ? std::move(*tc) : shift_time_change(eps)),
      provenance_(Provenance::FiniteDifference) {
    if (!(eps > 0.0)) throw std::invalid_argument("ShiftedLocalVol: eps > 0 required");
    tc_.eps = tc_.tau(0.0);
    const auto& s = *surface_;
    if (s.strikes.size() < 3 || s.maturities.size() < 3)
        throw std::invalid_argument("ShiftedLocalVol: surface too small");
    if (tc_.eps < s.maturities.front() - 1e-12)
        throw BoundaryPoint("shift target below the surface's first maturity");
    surface_node_variance_.resize(s.strikes.size() * s.maturities.size(), 0.0);
    for (std::size_t j = 1; j + 1 < s.maturities.size(); ++j)
        for (std::size_t i = 1; i + 1 < s.strikes.size(); ++i)
            surface_node_variance_[j * s.strikes.size() + i] =
                local_vol_fd(s, s.strikes[i], s.maturities[j]);
}

double ShiftedLocalVol::base_variance(double strike, double t) const {
    if (model_) {
        if (const auto* r = std::get_if<models::JumpToRuinParams>(&model_->params))
            return ruin_local_vol(*r, strike, t);
        if (const auto* b = std::get_if<models::BlackScholesParams>(&model_->params))
            return b->sigma * b->sigma;  // flat by construction
        return local_vol_fourier(*model_, strike, t, quad_);
    }
    // Surface source: bilinear interpolation of node-wise FD local variance
    // over the interior lattice; outside the lattice we refuse rather than
    // extrapolate silently.
    const auto& s = *surface_;
    const auto& K = s.strikes;
    const auto& Ts = s.maturities;
    if (strike < K[1] || strike > K[K.size() - 2] || t < Ts[1] ||
        t > Ts[Ts.size() - 2]) {
        std::ostringstream os;
        os << "(K,t)=(" << strike << "," << t << ") outside tabulated surface interior";
        throw BoundaryPoint(os.str());
    }
    auto cell = [](const std::vector<double>& g, double x, std::size_t lo_limit,
                   std::size_t hi_limit) {
        auto it = std::upper_bound(g.begin() + lo_limit, g.begin() + hi_limit, x);
        std::size_t i = static_cast<std::size_t>(it - g.begin());
        i = std::clamp<std::size_t>(i, lo_limit + 1, hi_limit - 1);
        return i;
    };
    std::size_t i = cell(K, strike, 1, K.size() - 2);
    std::size_t j = cell(Ts, t, 1, Ts.size() - 2);
    double wx = (strike - K[i - 1]) / (K[i] - K[i - 1]);
    double wy = (t - Ts[j - 1]) / (Ts[j] - Ts[j - 1]);
    auto v = [&](std::size_t ii, std::size_t jj) {
        return surface_node_variance_[jj * K.size() + ii];
    };
    return (1 - wx) * (1 - wy) * v(i - 1, j - 1) + wx * (1 - wy) * v(i, j - 1) +
           (1 - wx) * wy * v(i - 1, j) + wx * wy * v(i, j);
}

double ShiftedLocalVol::base_variance_cached(double strike, double t) const {
    if (!model_) return base_variance(strike, t);
    std::pair<double, double> key(strike, t);
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    double v = base_variance(strike, t);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    cache_.emplace(key, v);
    return v;
}

void ShiftedLocalVol::enable_tabulation(double k_lo, double k_hi, int n_strikes,
                                        double t_max, int n_times) {
    if (!model_) return;  // surface source is already a table
    Table tab;
    tab.log_strikes.resize(n_strikes);
    tab.times.resize(n_times);
    for (int i = 0; i < n_strikes; ++i)
        tab.log_strikes[i] = k_lo + (k_hi - k_lo) * i / (n_strikes - 1);
    for (int j = 0; j < n_times; ++j)
        tab.times[j] = tc_.eps + (t_max - tc_.eps) * j / (n_times - 1);
    tab.variance.resize(static_cast<std::size_t>(n_strikes) * n_times);
    for (int j = 0; j < n_times; ++j) {
        double* row = tab.variance.data() + static_cast<std::size_t>(j) * n_strikes;
        int first_ok = -1, last_ok = -1;
        for (int i = 0; i < n_strikes; ++i) {
            // Deep-tail nodes can fall below the quadrature density floor; the
            // field value there never matters (no mass), so mark and fill below.
            try {
                row[i] = base_variance(model_->spot * std::exp(tab.log_strikes[i]),
                                       tab.times[j]);
                if (first_ok < 0) first_ok = i;
                last_ok = i;
            } catch (const DegenerateDensity&) {
                row[i] = std::numeric_limits<double>::quiet_NaN();
            }
        }
        if (first_ok < 0) {
            std::ostringstream os;
            os << "no resolvable density in tabulation row t=" << tab.times[j];
            throw DegenerateDensity(os.str());
        }
        for (int i = 0; i < first_ok; ++i) row[i] = row[first_ok];
        for (int i = last_ok + 1; i < n_strikes; ++i) row[i] = row[last_ok];
        for (int i = first_ok; i < last_ok; ++i)
            if (std::isnan(row[i])) row[i] = row[i - 1];
    }
    table_ = std::move(tab);
}

double ShiftedLocalVol::variance(double strike, double T) const {
    if (!(T >= 0.0)) throw std::invalid_argument("shifted field: T >= 0 required");
    if (!(strike > 0.0)) throw std::invalid_argument("shifted field: strike > 0");
    double t = tc_.tau(T);
    double factor = tc_.tau_prime(T);

    if (table_) {
        const auto& tab = *table_;
        // Clamp into the tabulated strike range: the table spans many standard
        // deviations, and outside it the density is below the quadrature floor.
        double k = std::clamp(std::log(strike / model_->spot),
                              tab.log_strikes.front(), tab.log_strikes.back());
        if (t >= tab.times.front() - 1e-12 && t <= tab.times.back()) {
            auto upper = [](const std::vector<double>& g, double x) {
                auto it = std::upper_bound(g.begin(), g.end(), x);
                std::size_t i = static_cast<std::size_t>(it - g.begin());
                return std::clamp<std::size_t>(i, 1, g.size() - 1);
            };
            std::size_t i = upper(tab.log_strikes, k);
            std::size_t j = upper(tab.times, t);
            double wx = (k - tab.log_strikes[i - 1]) /
                        (tab.log_strikes[i] - tab.log_strikes[i - 1]);
            double wy =
                (t - tab.times[j - 1]) / (tab.times[j] - tab.times[j - 1]);
            wy = std::clamp(wy, 0.0, 1.0);
            std::size_t n = tab.log_strikes.size();
            auto v = [&](std::size_t ii, std::size_t jj) {
                return tab.variance[jj * n + ii];
            };
            return factor * ((1 - wx) * (1 - wy) * v(i - 1, j - 1) +
                             wx * (1 - wy) * v(i, j - 1) +
                             (1 - wx) * wy * v(i - 1, j) + wx * wy * v(i, j));
        }
    }
    return factor * base_variance_cached(strike, t);
}

double ShiftedLocalVol::vol(double strike, double T) const {
    return std::sqrt(variance(strike, T));
}

LocalVolSurface ShiftedLocalVol::materialize(
    const std::vector<double>& strikes, const std::vector<double>& maturities) const {
    LocalVolSurface out;
    out.strikes = strikes;
    out.maturities = maturities;
    out.provenance = provenance_;
    out.eps = tc_.eps;
    out.time_change_id = tc_.id;
    out.local_variance.resize(strikes.size() * maturities.size());
    for (std::size_t j = 0; j < maturities.size(); ++j)
        for (std::size_t i = 0; i < strikes.size(); ++i)
            out.local_variance[j * strikes.size() + i] =
                variance(strikes[i], maturities[j]);
    return out;
}

// ---------------------------------------------------------------------------

double fokker_planck_residual(const ModelSpec& model, double eps,
                              const std::vector<double>& strikes,
                              const std::vector<double>& maturities,
                              const QuadratureConfig& q) {
    if (strikes.size() < 3 || maturities.size() < 3)
        throw std::invalid_argument("fokker_planck_residual: need 3x3 interior-resolvable grids");
    if (!(eps > 0.0)) throw std::invalid_argument("fokker_planck_residual: eps > 0");

    std::size_t nk = strikes.size(), nt = maturities.size();
    // a^eps * p^eps equals dC/dT at the shifted maturity by the Dupire ratio,
    // so both sides come from quadrature-exact surfaces.
    std::vector<double> ap(nk * nt), p(nk * nt);
    for (std::size_t j = 0; j < nt; ++j) {
        for (std::size_t i = 0; i < nk; ++i) {
            double t = maturities[j] + eps;
            ap[j * nk + i] = pricing::dC_dT(model, strikes[i], t, q);
            p[j * nk + i] = pricing::density(model, strikes[i], t, q);
        }
    }
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < nt; ++j) {
        for (std::size_t i = 1; i + 1 < nk; ++i) {
            double lhs = lagrange_d2(strikes[i - 1], strikes[i], strikes[i + 1],
                                     ap[j * nk + i - 1], ap[j * nk + i],
                                     ap[j * nk + i + 1]);
            double rhs = lagrange_d1(maturities[j - 1], maturities[j],
                                     maturities[j + 1], p[(j - 1) * nk + i],
                                     p[j * nk + i], p[(j + 1) * nk + i]);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

}  // namespace djl::dupire
