#include "djl/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "djl/rng.hpp"

namespace djl::mc {

SimResult simulate_terminal(const VarianceField& variance,
                            const std::vector<double>& spots, double T,
                            const McConfig& cfg, std::uint64_t stream_tag) {
    if (!(T > 0.0)) throw std::invalid_argument("simulate_terminal: T > 0 required");
    const long n = static_cast<long>(spots.size());
    const int steps = std::max(1, static_cast<int>(std::ceil(cfg.steps_per_year * T)));
    const double dt = T / steps;
    const double sqrt_dt = std::sqrt(dt);
    const double cap_var = cfg.vol_cap * cfg.vol_cap;

    SimResult out;
    out.terminals.resize(n);
    std::atomic<long> cap_hits{0};

    auto run_block = [&](long begin, long end) {
        long local_hits = 0;
        for (long i = begin; i < end; ++i) {
            double s0 = spots[i];
            if (s0 <= 0.0) {
                out.terminals[i] = 0.0;  // absorbed (jump-to-ruin atom)
                continue;
            }
            double x = std::log(s0);
            bool hit = false;
            std::uint64_t noise_stream =
                (stream_tag << 40) | static_cast<std::uint64_t>(
                                         cfg.antithetic ? i / 2 : i);
            double sign = (cfg.antithetic && (i & 1)) ? -1.0 : 1.0;
            for (int j = 0; j < steps; ++j) {
                double var = variance(std::exp(x), j * dt);
                if (var > cap_var) {
                    var = cap_var;
                    hit = true;
                }
                double vol = std::sqrt(var);
                double z = sign * rng::normal(cfg.seed, noise_stream,
                                              static_cast<std::uint64_t>(j));
                x += -0.5 * var * dt + vol * sqrt_dt * z;
                if (!std::isfinite(x)) {
                    std::ostringstream os;
                    os << "non-finite log-state at path " << i << " step " << j;
                    throw NonFiniteState(os.str());
                }
            }
            out.terminals[i] = std::exp(x);
            if (hit) ++local_hits;
        }
        cap_hits += local_hits;
    };

    int threads = cfg.threads > 0
                      ? cfg.threads
                      : std::max(1u, std::thread::hardware_concurrency());
    const long block = 8192;
    if (threads <= 1 || n <= block) {
        run_block(0, n);
    } else {
        std::atomic<long> next{0};
        auto worker = [&]() {
            for (;;) {
                long b = next.fetch_add(block);
                if (b >= n) return;
                run_block(b, std::min(b + block, n));
            }
        };
        std::vector<std::future<void>> futs;
        for (int t = 0; t < threads; ++t)
            futs.push_back(std::async(std::launch::async, worker));
        for (auto& f : futs) f.get();  // rethrows NonFiniteState
    }
    out.cap_hits = cap_hits.load();
    return out;
}

McEstimate estimate_call(const std::vector<double>& terminals, double strike,
                         bool antithetic_pairs) {
    if (terminals.empty())
        throw std::invalid_argument("estimate_call: empty terminal sample");
    McEstimate e;
    if (antithetic_pairs && terminals.size() % 2 == 0) {
        // Stderr from independent pair means.
        long m = static_cast<long>(terminals.size()) / 2;
        double sum = 0.0, sum2 = 0.0;
        for (long i = 0; i < m; ++i) {
            double a = std::max(terminals[2 * i] - strike, 0.0);
            double b = std::max(terminals[2 * i + 1] - strike, 0.0);
            double pm = 0.5 * (a + b);
            sum += pm;
            sum2 += pm * pm;
        }
        e.mean = sum / m;
        double var = std::max(0.0, (sum2 - sum * sum / m) / (m - 1));
        e.std_error = std::sqrt(var / m);
        e.n_paths = static_cast<long>(terminals.size());
    } else {
        double sum = 0.0, sum2 = 0.0;
        for (double s : terminals) {
            double p = std::max(s - strike, 0.0);
            sum += p;
            sum2 += p * p;
        }
        long n = static_cast<long>(terminals.size());
        e.mean = sum / n;
        double var = n > 1 ? std::max(0.0, (sum2 - sum * sum / n) / (n - 1)) : 0.0;
        e.std_error = std::sqrt(var / n);
        e.n_paths = n;
    }
    return e;
}

TheoremReport verify_theorem(const ModelSpec& model,
                             const std::vector<double>& strikes, double T,
                             const std::vector<double>& eps_list,
                             const McConfig& cfg, const QuadratureConfig& q) {
    if (eps_list.empty() ||
        !std::is_sorted(eps_list.rbegin(), eps_list.rend()))
        throw std::invalid_argument("verify_theorem: eps list must be decreasing");
    for (double e : eps_list) models::require_density_exists(model, e);

    TheoremReport r;
    r.model_id = model.id.empty() ? models::model_name(model.params) : model.id;
    r.strikes = strikes;
    r.maturity = T;
    r.eps_list = eps_list;
    r.seed = cfg.seed;
    r.n_paths = cfg.n_paths;
    r.steps_per_year = cfg.steps_per_year;

    for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
        double eps = eps_list[ei];
        dupire::ShiftedLocalVol field(model, eps, q);

        // Tabulate the field over a generous range for the stepping loop.
        double mean_k = models::mean_rate(model.params) * (T + eps);
        double sd = std::sqrt(models::variance_rate(model.params) * (T + eps));
        field.enable_tabulation(mean_k - 12.0 * sd, mean_k + 12.0 * sd, 512,
                                T + eps, 65);

        // Stream partition: even tags draw spots, odd tags drive paths.
        auto sampler = pricing::make_spot_sampler(model, eps, q);
        std::vector<double> spots(cfg.n_paths);
        for (long i = 0; i < cfg.n_paths; ++i)
            spots[i] = sampler.draw(rng::u01(cfg.seed, 2 * ei, i));

        auto sim = simulate_terminal(
            [&field](double s, double t) { return field.variance(s, t); }, spots,
            T, cfg, 2 * ei + 1);

        auto t0 = std::chrono::steady_clock::now();
        for (double K : strikes) {
            McEstimate est = estimate_call(sim.terminals, K, cfg.antithetic);
            est.seed = cfg.seed;
            est.cap_hits = sim.cap_hits;
            est.elapsed_sec =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
            double analytic = pricing::call_price(model, K, T + eps, q);
            TheoremCell cell;
            cell.strike = K;
            cell.eps = eps;
            cell.mc_price = est.mean;
            cell.std_error = est.std_error;
            cell.analytic = analytic;
            cell.z = est.std_error > 0.0 ? (est.mean - analytic) / est.std_error
                                         : 0.0;
            cell.cap_hits = sim.cap_hits;
            r.cells.push_back(cell);
        }
    }

    r.limit_prices.reserve(strikes.size());
    for (double K : strikes)
        r.limit_prices.push_back(pricing::call_price(model, K, T, q));

    // Convergence: the analytic column C(K, T+eps) must close in on C(K,T)
    // monotonically as eps decreases (calendar monotonicity).
    r.convergence = true;
    const double tol = 10.0 * q.rel_tol;
    for (std::size_t ki = 0; ki < strikes.size(); ++ki) {
        double prev_gap = std::numeric_limits<double>::infinity();
        for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
            double analytic = r.cells[ei * strikes.size() + ki].analytic;
            double gap = analytic - r.limit_prices[ki];
            if (gap < -tol || gap > prev_gap + tol) r.convergence = false;
            prev_gap = gap;
        }
    }
    return r;
}

}  // namespace djl::mc
