#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "qrps/regions.hpp"
#include "qrps/rng.hpp"

namespace qrps::regions {

using qlinalg::KrausChannel;
using qlinalg::ValidationError;

namespace {

// Substream path tags for the sweep (seed / grid index / start index / tag).
constexpr uint64_t kTagInit = 1;

int resolve_threads(int requested) {
    int n = requested;
    if (const char* env = std::getenv("QRPS_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = (n > 0) ? std::min(n, cap) : cap;
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, n);
}

struct Score {
    double violation = 0.0;  // max(0, Dmin - Dtarget)
    double rate = -1.0;

    // Feasibility first, then rate; `tol` guards against accepting noise.
    bool better_than(const Score& o, double tol) const {
        if (violation < o.violation - 1e-12) return true;
        if (violation > o.violation + 1e-12) return false;
        return rate > o.rate + tol;
    }
};

struct Evaluator {
    const RandomParameterChannel& rpc;
    const DistortionFunction& dist;
    double d_target;

    Score operator()(const Strategy& st) const {
        const auto rho_sx = detail::output_states(rpc, st);
        Score sc;
        sc.rate = std::max(0.0, detail::fast_rate(rpc, st, rho_sx));
        const double dmin = detail::min_expected_distortion(conditional_family_from(st, rho_sx), dist);
        sc.violation = std::max(0.0, dmin - d_target);
        return sc;
    }

    // Same construction as conditional_family but reusing rho_sx.
    std::vector<ConditionalContext> conditional_family_from(
        const Strategy& st, const std::vector<std::vector<CMat>>& rho_sx) const {
        const int ns = rpc.param_count();
        const bool has_z = (st.mode == CsiMode::sc || st.mode == CsiMode::causal);
        const int nz = has_z ? st.z_size : 1;
        std::vector<ConditionalContext> out;
        out.reserve(static_cast<size_t>(st.x_size) * nz);
        for (int x = 0; x < st.x_size; ++x) {
            for (int z = 0; z < nz; ++z) {
                ConditionalContext ctx;
                ctx.x = x;
                ctx.z = z;
                ctx.posterior.assign(ns, 0.0);
                ctx.states.assign(ns, CMat());
                double w = 0.0;
                for (int s = 0; s < ns; ++s) {
                    double p = (st.mode == CsiMode::nc) ? rpc.q()[s] * st.p_x_given_s[s][x]
                                                        : rpc.q()[s] * st.p_x[x];
                    if (has_z) p *= st.p_z_given_xs[x][s][z];
                    ctx.posterior[s] = p;
                    ctx.states[s] = rho_sx[s][x];
                    w += p;
                }
                ctx.weight = w;
                if (w > 0.0)
                    for (double& p : ctx.posterior) p /= w;
                out.push_back(std::move(ctx));
            }
        }
        return out;
    }
};

std::vector<cxd> normalized(std::vector<cxd> v) {
    double n2 = 0.0;
    for (const auto& a : v) n2 += std::norm(a);
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : v) a *= inv;
    return v;
}

std::vector<cxd> basis_vector(int dim, int i) {
    std::vector<cxd> v(dim, 0.0);
    v[i % dim] = 1.0;
    return v;
}

std::vector<cxd> fourier_vector(int dim, int i) {
    std::vector<cxd> v(dim);
    const double w = 2.0 * 3.14159265358979323846 / dim;
    for (int j = 0; j < dim; ++j) v[j] = cxd(std::cos(w * (i % dim) * j), std::sin(w * (i % dim) * j));
    return normalized(std::move(v));
}

std::vector<cxd> random_state(int dim, Rng& rng) {
    std::vector<cxd> v(dim);
    for (auto& a : v) a = cxd(rng.gaussian(), rng.gaussian());
    return normalized(std::move(v));
}

std::vector<double> random_pmf(int n, Rng& rng) {
    std::vector<double> p(n);
    double tot = 0.0;
    for (double& v : p) {
        v = rng.uniform() + 1e-6;
        tot += v;
    }
    for (double& v : p) v /= tot;
    return p;
}

// Shannon-strategy candidates for the causal sweep: identity, the
// "revert" strategy (adjoint of each unitary parameter map, when every
// map is unitary), and random unitaries.
std::vector<KrausChannel> identity_strategies(const RandomParameterChannel& rpc) {
    std::vector<KrausChannel> fs;
    for (int s = 0; s < rpc.param_count(); ++s) fs.push_back(KrausChannel::identity(rpc.in_dim()));
    return fs;
}

std::vector<KrausChannel> revert_strategies(const RandomParameterChannel& rpc) {
    std::vector<KrausChannel> fs;
    for (int s = 0; s < rpc.param_count(); ++s) {
        const auto& ops = rpc.map(s).kraus();
        if (ops.size() == 1 && ops.front().rows() == ops.front().cols()) {
            fs.push_back(KrausChannel::unitary(ops.front().adjoint()));
        } else {
            fs.push_back(KrausChannel::identity(rpc.in_dim()));
        }
    }
    return fs;
}

CMat random_unitary(int dim, Rng& rng) {
    // Gram-Schmidt on a random complex matrix.
    std::vector<std::vector<cxd>> cols;
    for (int c = 0; c < dim; ++c) {
        std::vector<cxd> v(dim);
        for (auto& a : v) a = cxd(rng.gaussian(), rng.gaussian());
        for (const auto& u : cols) {
            cxd ip = 0.0;
            for (int i = 0; i < dim; ++i) ip += std::conj(u[i]) * v[i];
            for (int i = 0; i < dim; ++i) v[i] -= ip * u[i];
        }
        cols.push_back(normalized(std::move(v)));
    }
    CMat m(dim, dim);
    for (int c = 0; c < dim; ++c)
        for (int r = 0; r < dim; ++r) m(r, c) = cols[c][r];
    return m;
}

// Conditional p(desc | s) of the rate-distortion test channel for a
// Hamming-style cost at level alpha: the posterior of s given the
// descriptor is (1 - alpha) on the match. Degrades to an exact copy at
// alpha = 0 and to near-uniform where the linear solve leaves the simplex.
std::vector<std::vector<double>> reverse_test_channel(const std::vector<double>& q, int n_desc,
                                                      double alpha) {
    const int ns = static_cast<int>(q.size());
    std::vector<std::vector<double>> p(ns, std::vector<double>(n_desc, 0.0));
    const double off = (ns > 1) ? alpha / (ns - 1) : 0.0;
    // Descriptor marginal solving q = sum_z p(z) t(s|z) for the symmetric
    // posterior t, clipped into the simplex.
    std::vector<double> pz(n_desc, 0.0);
    const double denom = 1.0 - alpha - off;
    double tot = 0.0;
    for (int z = 0; z < n_desc; ++z) {
        const double target = (z < ns) ? q[z] : 0.0;
        pz[z] = (denom > 1e-9) ? std::max(0.0, (target - off) / denom) : target;
        tot += pz[z];
    }
    if (tot <= 0.0) {
        for (int z = 0; z < std::min(ns, n_desc); ++z) pz[z] = 1.0;
        tot = std::min(ns, n_desc);
    }
    for (double& v : pz) v /= tot;
    for (int s = 0; s < ns; ++s) {
        double row = 0.0;
        for (int z = 0; z < n_desc; ++z) {
            const double t = (z < ns) ? ((z == s) ? 1.0 - alpha : off) : 0.0;
            p[s][z] = pz[z] * t;
            row += p[s][z];
        }
        if (row <= 0.0) {
            p[s].assign(n_desc, 1.0 / n_desc);
        } else {
            for (double& v : p[s]) v /= row;
        }
    }
    return p;
}

Strategy initial_strategy(const RandomParameterChannel& rpc, CsiMode mode, int x_size, int z_size,
                          double d_target, double d_max, int start, Rng& rng) {
    const int ns = rpc.param_count();
    Strategy st;
    st.mode = mode;
    st.x_size = x_size;
    st.z_size = (mode == CsiMode::sc || mode == CsiMode::causal) ? z_size : 1;

    const int dim = rpc.in_dim();
    const int family = start % 4;
    const bool random_states = start >= 6 && family >= 2;
    auto make_state = [&](int idx) {
        if (random_states) return random_state(dim, rng);
        if (family % 2 == 1) return fourier_vector(dim, idx);
        return basis_vector(dim, idx);
    };
    // Test-channel level: a copy at the D = 0 end, the distortion budget
    // otherwise (capped below the blind-guess ceiling).
    const double alpha = std::min(std::max(0.0, d_target / std::max(d_max, 1e-12)),
                                  0.95 * (ns - 1.0) / ns);

    if (mode == CsiMode::nc) {
        // Per-(x, s) states let non-causal encoding adapt the input to the
        // parameter, the structure the causal mode gets through F^(s).
        const int n_carrier = x_size / ns;
        const bool product_start = (start < 2 && n_carrier >= 2);
        st.input_states_xs.assign(x_size, std::vector<std::vector<cxd>>(ns));
        st.p_x_given_s.assign(ns, std::vector<double>(x_size, 1.0 / x_size));
        if (product_start) {
            // x = (carrier, descriptor): p(x|s) = p(b) * p_rev(u|s), states
            // keyed by the carrier only.
            const auto rev = reverse_test_channel(rpc.q(), ns, alpha);
            for (int x = 0; x < x_size; ++x) {
                const int b = x / ns, u = x % ns;
                const auto base = make_state(b);
                for (int s = 0; s < ns; ++s) {
                    st.input_states_xs[x][s] = base;
                    st.p_x_given_s[s][x] = rev[s][u] / n_carrier;
                }
            }
            for (int s = 0; s < ns; ++s) {
                double tot = 0.0;
                for (double v : st.p_x_given_s[s]) tot += v;
                for (double& v : st.p_x_given_s[s]) v /= tot;
            }
        } else {
            for (int x = 0; x < x_size; ++x) {
                const auto base = make_state(x);
                for (int s = 0; s < ns; ++s)
                    st.input_states_xs[x][s] = (start >= 8 && family == 3) ? random_state(dim, rng) : base;
            }
            if (start >= 4)
                for (int s = 0; s < ns; ++s) st.p_x_given_s[s] = random_pmf(x_size, rng);
        }
    } else {
        st.input_states.clear();
        for (int x = 0; x < x_size; ++x) st.input_states.push_back(make_state(x));
        st.p_x.assign(x_size, 1.0 / x_size);
        if (start >= 8 && family >= 2) st.p_x = random_pmf(x_size, rng);
    }

    if (mode == CsiMode::sc || mode == CsiMode::causal) {
        st.p_z_given_xs.assign(x_size, std::vector<std::vector<double>>(ns, std::vector<double>(st.z_size)));
        const auto rev = reverse_test_channel(rpc.q(), st.z_size, alpha);
        for (int x = 0; x < x_size; ++x) {
            for (int s = 0; s < ns; ++s) {
                if (start >= 6 && family % 2 == 1) {
                    st.p_z_given_xs[x][s] = random_pmf(st.z_size, rng);
                } else if (start < 2) {
                    st.p_z_given_xs[x][s] = rev[s];  // rate-distortion test channel
                } else if (family < 2) {
                    for (int z = 0; z < st.z_size; ++z)
                        st.p_z_given_xs[x][s][z] = (z == s % st.z_size) ? 1.0 : 0.0;  // copy of s
                } else {
                    for (int z = 0; z < st.z_size; ++z) st.p_z_given_xs[x][s][z] = 1.0 / st.z_size;
                }
            }
        }
    }

    if (mode == CsiMode::causal) {
        if (start >= 6 && start % 3 == 2) {
            std::vector<KrausChannel> fs;
            for (int s = 0; s < ns; ++s) fs.push_back(KrausChannel::unitary(random_unitary(dim, rng)));
            st.shannon_strategies = std::move(fs);
        } else if (start % 2 == 1) {
            st.shannon_strategies = revert_strategies(rpc);
        } else {
            st.shannon_strategies = identity_strategies(rpc);
        }
    }
    return st;
}

// One cyclic pass over every coordinate block at the given step scale;
// returns true if any move was accepted. Ties break toward the incumbent.
bool ascent_cycle(Strategy& st, Score& cur, const Evaluator& eval, double tol, double scale) {
    bool moved = false;
    const double kMixSteps[] = {scale, scale / 3.0};
    const double kStateSteps[] = {scale, scale / 4.0};

    auto try_simplex = [&](std::vector<double>& p) {
        const int n = static_cast<int>(p.size());
        std::vector<double> best = p;
        Score best_score = cur;
        bool improved = false;
        for (int v = 0; v < n; ++v) {
            for (double beta : kMixSteps) {
                std::vector<double> cand = p;
                for (int i = 0; i < n; ++i) cand[i] *= (1.0 - beta);
                cand[v] += beta;
                std::swap(p, cand);
                const Score s = eval(st);
                std::swap(p, cand);
                if (s.better_than(best_score, tol)) {
                    best_score = s;
                    best = cand;
                    improved = true;
                }
            }
            // Drain mass away from vertex v.
            for (double beta : kMixSteps) {
                std::vector<double> cand = p;
                double removed = std::min(cand[v], beta);
                if (removed <= 0.0) continue;
                cand[v] -= removed;
                const double rest = 1.0 - cand[v];
                if (rest <= 0.0) continue;
                const double scale = (rest + removed) / rest;
                for (int i = 0; i < n; ++i)
                    if (i != v) cand[i] *= scale;
                double tot = 0.0;
                for (double q : cand) tot += q;
                for (double& q : cand) q /= tot;
                std::swap(p, cand);
                const Score s = eval(st);
                std::swap(p, cand);
                if (s.better_than(best_score, tol)) {
                    best_score = s;
                    best = cand;
                    improved = true;
                }
            }
        }
        if (improved) {
            p = best;
            cur = best_score;
            moved = true;
        }
    };

    auto try_state = [&](std::vector<cxd>& psi) {
        const int dim = static_cast<int>(psi.size());
        std::vector<cxd> best = psi;
        Score best_score = cur;
        bool improved = false;
        for (int j = 0; j < dim; ++j) {
            for (double step : kStateSteps) {
                for (int dir = 0; dir < 4; ++dir) {
                    std::vector<cxd> cand = psi;
                    const cxd delta = (dir == 0)   ? cxd(step, 0.0)
                                      : (dir == 1) ? cxd(-step, 0.0)
                                      : (dir == 2) ? cxd(0.0, step)
                                                   : cxd(0.0, -step);
                    cand[j] += delta;
                    cand = normalized(std::move(cand));
                    std::swap(psi, cand);
                    const Score s = eval(st);
                    std::swap(psi, cand);
                    if (s.better_than(best_score, tol)) {
                        best_score = s;
                        best = cand;
                        improved = true;
                    }
                }
            }
        }
        if (improved) {
            psi = best;
            cur = best_score;
            moved = true;
        }
    };

    if (st.mode == CsiMode::nc) {
        for (auto& row : st.p_x_given_s) try_simplex(row);
    } else {
        try_simplex(st.p_x);
    }
    if (st.mode == CsiMode::sc || st.mode == CsiMode::causal) {
        for (auto& per_x : st.p_z_given_xs)
            for (auto& row : per_x) try_simplex(row);
    }
    for (auto& psi : st.input_states) try_state(psi);
    for (auto& per_x : st.input_states_xs)
        for (auto& psi : per_x) try_state(psi);
    return moved;
}

struct TaskResult {
    Score score;
    Strategy strategy;
};

TaskResult run_task(const RandomParameterChannel& rpc, const DistortionFunction& dist, CsiMode mode,
                    double d_target, int x_size, int z_size, int start, uint64_t seed, int grid_idx,
                    const OptimizerConfig& cfg) {
    Rng rng = substream(seed, {static_cast<uint64_t>(grid_idx), static_cast<uint64_t>(start), kTagInit});
    Evaluator eval{rpc, dist, d_target};
    Strategy st = initial_strategy(rpc, mode, x_size, z_size, d_target, dist.d_max(), start, rng);
    Score cur = eval(st);
    // Pattern search: the step scale shrinks geometrically whenever a full
    // cycle makes no progress, down to the resolution floor.
    double scale = 0.8;
    constexpr double kMinScale = 1e-4;
    for (int cycle = 0; cycle < cfg.max_cycles && scale >= kMinScale; ++cycle) {
        if (!ascent_cycle(st, cur, eval, cfg.tol, scale)) scale /= 3.0;
    }
    return {cur, std::move(st)};
}

}  // namespace

RegionFrontier sweep_region(const RandomParameterChannel& rpc0, const DistortionFunction& dist0,
                            CsiMode mode, const std::vector<double>& grid, const OptimizerConfig& cfg,
                            uint64_t seed, int k) {
    if (grid.empty()) throw ValidationError("sweep_region: empty distortion grid");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw ValidationError("sweep_region: grid must be sorted ascending");
    if (k < 1 || k > 2) throw ValidationError("sweep_region: only k in {1, 2} is supported");
    if (cfg.starts < 1 || cfg.max_cycles < 1)
        throw std::runtime_error("sweep_region: optimizer budget misconfigured");

    const RandomParameterChannel rpc = channels::tensor_power(rpc0, k);
    const DistortionFunction dist = channels::tensor_power(dist0, k);

    const int dim = rpc.in_dim();
    const int ns = rpc.param_count();
    // Pure-state cardinality caps: |X| <= dim^2 + 1, |Z| <= dim^2 + |S|.
    const int x_cap = dim * dim + 1;
    const int z_cap = dim * dim + ns;
    const int x_size = std::min(cfg.x_size > 0 ? cfg.x_size : std::min(dim * dim, dim + 2), x_cap);
    const int z_size = std::min(cfg.z_size > 0 ? cfg.z_size : std::max(2, ns), z_cap);

    const int n_tasks = static_cast<int>(grid.size()) * cfg.starts;
    std::vector<TaskResult> results(n_tasks);

    const int n_threads = std::min(resolve_threads(cfg.threads), n_tasks);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= n_tasks) return;
            const int g = t / cfg.starts;
            const int s = t % cfg.starts;
            results[t] = run_task(rpc, dist, mode, grid[g], x_size, z_size, s, seed, g, cfg);
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    RegionFrontier frontier;
    frontier.mode = mode;
    frontier.k = k;
    frontier.seed = seed;
    frontier.grid = grid;

    // Deterministic reduction ordered by (grid index, start index).
    for (size_t g = 0; g < grid.size(); ++g) {
        int best = -1;
        for (int s = 0; s < cfg.starts; ++s) {
            const int t = static_cast<int>(g) * cfg.starts + s;
            if (best < 0 || results[t].score.better_than(results[best].score, 0.0)) best = t;
        }
        const TaskResult& win = results[best];
        RatePoint pt;
        pt.mode = mode;
        pt.rate = win.score.rate / k;
        pt.rate_clamped = false;
        pt.povm_restricted = dist.s_hat_count() > 2;
        pt.strategy = win.strategy;
        // Achieved distortion of the winning strategy (its estimation
        // minimum, which may sit below the grid target).
        Evaluator eval{rpc, dist, grid[g]};
        const auto rho_sx = detail::output_states(rpc, win.strategy);
        pt.distortion =
            detail::min_expected_distortion(eval.conditional_family_from(win.strategy, rho_sx), dist);
        frontier.points.push_back(std::move(pt));
    }

    // Non-decreasing frontier by running max over the ascending grid.
    for (size_t g = 1; g < frontier.points.size(); ++g) {
        if (frontier.points[g].rate < frontier.points[g - 1].rate) {
            RatePoint carried = frontier.points[g - 1];
            frontier.points[g] = carried;
        }
    }
    return frontier;
}

}  // namespace qrps::regions
