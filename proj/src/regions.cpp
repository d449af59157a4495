#include "qrps/regions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qrps::regions {

using qlinalg::apply_channel_raw;
using qlinalg::DimensionError;
using qlinalg::entropy_of;
using qlinalg::kStructuralTol;
using qlinalg::PovmOutcome;
using qlinalg::ValidationError;

std::string to_string(CsiMode m) {
    switch (m) {
        case CsiMode::sc: return "sc";
        case CsiMode::causal: return "causal";
        case CsiMode::nc: return "nc";
        case CsiMode::none: return "none";
    }
    return "?";
}

CsiMode csi_mode_from_string(const std::string& s) {
    if (s == "sc") return CsiMode::sc;
    if (s == "causal") return CsiMode::causal;
    if (s == "nc") return CsiMode::nc;
    if (s == "none") return CsiMode::none;
    throw ValidationError("unknown CSI mode: " + s);
}

namespace {

void check_pmf(const std::vector<double>& p, const char* what) {
    double tot = 0.0;
    for (double v : p) {
        if (v < -kStructuralTol) throw ValidationError(std::string(what) + ": negative probability");
        tot += v;
    }
    if (std::abs(tot - 1.0) > kStructuralTol) throw ValidationError(std::string(what) + ": pmf not normalized");
}

void check_state(const std::vector<cxd>& psi, const char* what) {
    double n2 = 0.0;
    for (const auto& a : psi) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > 1e-9) throw ValidationError(std::string(what) + ": state not normalized");
}

}  // namespace

void Strategy::validate(const RandomParameterChannel& rpc) const {
    const int ns = rpc.param_count();
    if (x_size <= 0 || z_size <= 0) throw ValidationError("strategy: empty alphabet");
    if (mode == CsiMode::nc) {
        if (static_cast<int>(p_x_given_s.size()) != ns) throw ValidationError("strategy: p_x_given_s missing");
        for (const auto& row : p_x_given_s) {
            if (static_cast<int>(row.size()) != x_size) throw ValidationError("strategy: p_x_given_s shape");
            check_pmf(row, "p_x_given_s");
        }
    } else {
        if (static_cast<int>(p_x.size()) != x_size) throw ValidationError("strategy: p_x shape");
        check_pmf(p_x, "p_x");
    }
    if (mode == CsiMode::sc || mode == CsiMode::causal) {
        if (static_cast<int>(p_z_given_xs.size()) != x_size)
            throw ValidationError("strategy: p_z_given_xs shape");
        for (const auto& per_x : p_z_given_xs) {
            if (static_cast<int>(per_x.size()) != ns) throw ValidationError("strategy: p_z_given_xs shape");
            for (const auto& row : per_x) {
                if (static_cast<int>(row.size()) != z_size)
                    throw ValidationError("strategy: p_z_given_xs shape");
                check_pmf(row, "p_z_given_xs");
            }
        }
    }
    if (mode == CsiMode::causal) {
        if (static_cast<int>(shannon_strategies.size()) != ns)
            throw ValidationError("strategy: one Shannon strategy per parameter required");
        for (const auto& f : shannon_strategies)
            if (f.out_dim() != rpc.in_dim())
                throw DimensionError("strategy: F^(s) output dimension must match the channel input");
    }
    const int in_dim = (mode == CsiMode::causal) ? shannon_strategies.front().in_dim() : rpc.in_dim();
    if (static_cast<int>(input_states.size()) != x_size && input_states_xs.empty())
        throw ValidationError("strategy: one input state per x required");
    for (const auto& psi : input_states) {
        if (static_cast<int>(psi.size()) != in_dim) throw DimensionError("strategy: input state dimension");
        check_state(psi, "input state");
    }
    if (!input_states_xs.empty()) {
        if (mode != CsiMode::nc) throw ValidationError("strategy: per-(x,s) states only in nc mode");
        if (static_cast<int>(input_states_xs.size()) != x_size)
            throw ValidationError("strategy: input_states_xs shape");
        for (const auto& per_x : input_states_xs) {
            if (static_cast<int>(per_x.size()) != ns) throw ValidationError("strategy: input_states_xs shape");
            for (const auto& psi : per_x) {
                if (static_cast<int>(psi.size()) != in_dim)
                    throw DimensionError("strategy: input state dimension");
                check_state(psi, "input state");
            }
        }
    }
}

namespace detail {

// rho^{s,x}_B for every (s, x); causal mode routes through F^(s).
std::vector<std::vector<CMat>> output_states(const RandomParameterChannel& rpc, const Strategy& st) {
    const int ns = rpc.param_count();
    std::vector<std::vector<CMat>> out(ns);
    for (int s = 0; s < ns; ++s) {
        out[s].reserve(st.x_size);
        for (int x = 0; x < st.x_size; ++x) {
            const std::vector<cxd>& psi = (!st.input_states_xs.empty() && st.mode == CsiMode::nc)
                                              ? st.input_states_xs[x][s]
                                              : st.input_states[x];
            CMat theta = CMat::outer(psi, psi);
            if (st.mode == CsiMode::causal) theta = apply_channel_raw(st.shannon_strategies[s], theta);
            out[s].push_back(apply_channel_raw(rpc.map(s), theta));
        }
    }
    return out;
}

}  // namespace detail

namespace {

using detail::output_states;

// Joint p(s, x) for the mode (z handled separately where present).
double joint_sx(const RandomParameterChannel& rpc, const Strategy& st, int s, int x) {
    if (st.mode == CsiMode::nc) return rpc.q()[s] * st.p_x_given_s[s][x];
    return rpc.q()[s] * st.p_x[x];
}

void check_estimation(const RandomParameterChannel& rpc, const Strategy& st, const EstimationPovm& est) {
    if (est.x_size != st.x_size) throw ValidationError("estimation: x alphabet mismatch");
    const int need_z = (st.mode == CsiMode::sc || st.mode == CsiMode::causal) ? st.z_size : 1;
    if (est.z_size != need_z) throw ValidationError("estimation: z alphabet mismatch");
    if (static_cast<int>(est.gamma.size()) != est.x_size * est.z_size)
        throw ValidationError("estimation: POVM family size mismatch");
    if (est.distortion.s_count() != rpc.param_count())
        throw ValidationError("estimation: distortion s-alphabet mismatch");
    for (const auto& povm : est.gamma) {
        if (povm.dim() != rpc.out_dim()) throw DimensionError("estimation: POVM dimension mismatch");
        if (static_cast<int>(povm.outcomes().size()) != est.distortion.s_hat_count())
            throw ValidationError("estimation: POVM outcomes must cover the s_hat alphabet");
    }
}

double expected_distortion(const RandomParameterChannel& rpc, const Strategy& st,
                           const EstimationPovm& est, const std::vector<std::vector<CMat>>& rho_sx) {
    const int ns = rpc.param_count();
    double total = 0.0;
    for (int s = 0; s < ns; ++s) {
        for (int x = 0; x < st.x_size; ++x) {
            const double p_sx = joint_sx(rpc, st, s, x);
            if (p_sx <= 0.0) continue;
            if (st.mode == CsiMode::sc || st.mode == CsiMode::causal) {
                for (int z = 0; z < st.z_size; ++z) {
                    const double w = p_sx * st.p_z_given_xs[x][s][z];
                    if (w <= 0.0) continue;
                    const auto& povm = est.at(x, z);
                    for (int sh = 0; sh < est.distortion.s_hat_count(); ++sh) {
                        const double d = est.distortion(s, sh);
                        if (d == 0.0) continue;
                        total += w * (povm.outcomes()[sh].op * rho_sx[s][x]).trace().real() * d;
                    }
                }
            } else {
                const auto& povm = est.at(x, 0);
                for (int sh = 0; sh < est.distortion.s_hat_count(); ++sh) {
                    const double d = est.distortion(s, sh);
                    if (d == 0.0) continue;
                    total += p_sx * (povm.outcomes()[sh].op * rho_sx[s][x]).trace().real() * d;
                }
            }
        }
    }
    return total;
}

ClassicalQuantumState build_szx_state(const RandomParameterChannel& rpc, const Strategy& st,
                                      const std::vector<std::vector<CMat>>& rho_sx) {
    const int ns = rpc.param_count();
    std::vector<qlinalg::ClassicalAxis> axes = {{"S", ns}, {"Z", st.z_size}, {"X", st.x_size}};
    std::vector<double> pmf(static_cast<size_t>(ns) * st.z_size * st.x_size, 0.0);
    std::vector<CMat> blocks(pmf.size());
    for (int s = 0; s < ns; ++s)
        for (int z = 0; z < st.z_size; ++z)
            for (int x = 0; x < st.x_size; ++x) {
                const size_t idx = (static_cast<size_t>(s) * st.z_size + z) * st.x_size + x;
                pmf[idx] = joint_sx(rpc, st, s, x) * st.p_z_given_xs[x][s][z];
                blocks[idx] = rho_sx[s][x];
            }
    return ClassicalQuantumState(std::move(axes), std::move(pmf), std::move(blocks), rpc.out_dim());
}

ClassicalQuantumState build_sx_state(const RandomParameterChannel& rpc, const Strategy& st,
                                     const std::vector<std::vector<CMat>>& rho_sx) {
    const int ns = rpc.param_count();
    std::vector<qlinalg::ClassicalAxis> axes = {{"S", ns}, {"X", st.x_size}};
    std::vector<double> pmf(static_cast<size_t>(ns) * st.x_size, 0.0);
    std::vector<CMat> blocks(pmf.size());
    for (int s = 0; s < ns; ++s)
        for (int x = 0; x < st.x_size; ++x) {
            const size_t idx = static_cast<size_t>(s) * st.x_size + x;
            pmf[idx] = joint_sx(rpc, st, s, x);
            blocks[idx] = rho_sx[s][x];
        }
    return ClassicalQuantumState(std::move(axes), std::move(pmf), std::move(blocks), rpc.out_dim());
}

RatePoint finish_point(double raw_rate, double dist, CsiMode mode, const Strategy& st,
                       const EstimationPovm& est) {
    RatePoint pt;
    pt.mode = mode;
    pt.rate_clamped = raw_rate < 0.0;
    pt.rate = std::max(0.0, raw_rate);
    pt.distortion = dist;
    pt.povm_restricted = est.distortion.s_hat_count() > 2;
    pt.strategy = st;
    return pt;
}

}  // namespace

RatePoint evaluate_strategy_sc(const RandomParameterChannel& rpc, const Strategy& st,
                               const EstimationPovm& est) {
    if (st.mode != CsiMode::sc) throw ValidationError("evaluate_strategy_sc: mode mismatch");
    st.validate(rpc);
    check_estimation(rpc, st, est);
    const auto rho_sx = output_states(rpc, st);
    const auto cq = build_szx_state(rpc, st, rho_sx);
    // Axes: 0 = S, 1 = Z, 2 = X.
    const double rate = qlinalg::mutual_information_with_block(cq, {1, 2}) -
                        qlinalg::classical_mutual_information(cq, {1}, {0}, {2});
    return finish_point(rate, expected_distortion(rpc, st, est, rho_sx), CsiMode::sc, st, est);
}

RatePoint evaluate_strategy_causal(const RandomParameterChannel& rpc, const Strategy& st,
                                   const EstimationPovm& est) {
    if (st.mode != CsiMode::causal) throw ValidationError("evaluate_strategy_causal: mode mismatch");
    st.validate(rpc);
    check_estimation(rpc, st, est);
    const auto rho_sx = output_states(rpc, st);
    const auto cq = build_szx_state(rpc, st, rho_sx);
    const double rate = qlinalg::mutual_information_with_block(cq, {1, 2}) -
                        qlinalg::classical_mutual_information(cq, {1}, {0}, {2});
    return finish_point(rate, expected_distortion(rpc, st, est, rho_sx), CsiMode::causal, st, est);
}

RatePoint evaluate_strategy_nc(const RandomParameterChannel& rpc, const Strategy& st,
                               const EstimationPovm& est) {
    if (st.mode != CsiMode::nc) throw ValidationError("evaluate_strategy_nc: mode mismatch");
    st.validate(rpc);
    check_estimation(rpc, st, est);
    const auto rho_sx = output_states(rpc, st);
    const auto cq = build_sx_state(rpc, st, rho_sx);
    // Axes: 0 = S, 1 = X.
    const double rate = qlinalg::mutual_information_with_block(cq, {1}) -
                        qlinalg::classical_mutual_information(cq, {1}, {0});
    return finish_point(rate, expected_distortion(rpc, st, est, rho_sx), CsiMode::nc, st, est);
}

RatePoint evaluate_strategy_none(const RandomParameterChannel& rpc, const Strategy& st,
                                 const EstimationPovm& est) {
    if (st.mode != CsiMode::none) throw ValidationError("evaluate_strategy_none: mode mismatch");
    st.validate(rpc);
    check_estimation(rpc, st, est);
    const auto rho_sx = output_states(rpc, st);
    const auto cq = build_sx_state(rpc, st, rho_sx);
    const double rate = qlinalg::mutual_information_with_block(cq, {1});
    return finish_point(rate, expected_distortion(rpc, st, est, rho_sx), CsiMode::none, st, est);
}

RatePoint evaluate_strategy(const RandomParameterChannel& rpc, const Strategy& st,
                            const EstimationPovm& est) {
    switch (st.mode) {
        case CsiMode::sc: return evaluate_strategy_sc(rpc, st, est);
        case CsiMode::causal: return evaluate_strategy_causal(rpc, st, est);
        case CsiMode::nc: return evaluate_strategy_nc(rpc, st, est);
        case CsiMode::none: return evaluate_strategy_none(rpc, st, est);
    }
    throw ValidationError("evaluate_strategy: bad mode");
}

std::vector<ConditionalContext> conditional_family(const RandomParameterChannel& rpc,
                                                   const Strategy& st) {
    st.validate(rpc);
    const auto rho_sx = output_states(rpc, st);
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
                double p = joint_sx(rpc, st, s, x);
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

namespace {

// Cost operators C_shat = sum_s p(s|ctx) d(s, shat) rho_s.
std::vector<CMat> cost_operators(const ConditionalContext& ctx, const DistortionFunction& d, int dim) {
    std::vector<CMat> cost(d.s_hat_count(), CMat(dim, dim));
    for (int sh = 0; sh < d.s_hat_count(); ++sh)
        for (size_t s = 0; s < ctx.posterior.size(); ++s) {
            const double w = ctx.posterior[s] * d(static_cast<int>(s), sh);
            if (w > 0.0) cost[sh] += ctx.states[s] * w;
        }
    return cost;
}

struct ContextPovm {
    std::vector<CMat> elements;  // one per s_hat
    double expected_cost = 0.0;
};

ContextPovm helstrom_binary(const std::vector<CMat>& cost) {
    const int dim = cost[0].rows();
    const CMat delta = cost[0] - cost[1];
    const auto es = hermitian_eigensystem(delta);
    ContextPovm r;
    r.elements.assign(2, CMat(dim, dim));
    for (int i = 0; i < dim; ++i) {
        CMat proj(dim, dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) proj(a, b) = es.vectors(a, i) * std::conj(es.vectors(b, i));
        if (es.values[i] < 0.0)
            r.elements[0] += proj;
        else
            r.elements[1] += proj;
    }
    r.expected_cost = (r.elements[0] * cost[0]).trace().real() + (r.elements[1] * cost[1]).trace().real();
    return r;
}

// Projective measurement in `basis` columns, Bayes-relabeled to s_hat.
ContextPovm relabel_basis(const CMat& basis, const std::vector<CMat>& cost) {
    const int dim = basis.rows();
    const int n_hat = static_cast<int>(cost.size());
    ContextPovm r;
    r.elements.assign(n_hat, CMat(dim, dim));
    for (int i = 0; i < dim; ++i) {
        CMat proj(dim, dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) proj(a, b) = basis(a, i) * std::conj(basis(b, i));
        int best = 0;
        double best_cost = (proj * cost[0]).trace().real();
        for (int sh = 1; sh < n_hat; ++sh) {
            const double c = (proj * cost[sh]).trace().real();
            if (c < best_cost - 1e-15) {
                best = sh;
                best_cost = c;
            }
        }
        r.elements[best] += proj;
        r.expected_cost += best_cost;
    }
    return r;
}

// POVM given as arbitrary PSD elements, Bayes-relabeled.
ContextPovm relabel_elements(const std::vector<CMat>& elems, const std::vector<CMat>& cost) {
    const int dim = elems.front().rows();
    const int n_hat = static_cast<int>(cost.size());
    ContextPovm r;
    r.elements.assign(n_hat, CMat(dim, dim));
    for (const auto& e : elems) {
        int best = 0;
        double best_cost = (e * cost[0]).trace().real();
        for (int sh = 1; sh < n_hat; ++sh) {
            const double c = (e * cost[sh]).trace().real();
            if (c < best_cost - 1e-15) {
                best = sh;
                best_cost = c;
            }
        }
        r.elements[best] += e;
        r.expected_cost += best_cost;
    }
    return r;
}

ContextPovm best_context_povm(const ConditionalContext& ctx, const DistortionFunction& d, int dim) {
    const auto cost = cost_operators(ctx, d, dim);
    if (d.s_hat_count() == 2) return helstrom_binary(cost);

    ContextPovm best;
    bool have = false;
    // Pairwise cost-difference eigenbases.
    for (int a = 0; a < d.s_hat_count(); ++a) {
        for (int b = a + 1; b < d.s_hat_count(); ++b) {
            const auto es = hermitian_eigensystem(cost[a] - cost[b]);
            ContextPovm cand = relabel_basis(es.vectors, cost);
            if (!have || cand.expected_cost < best.expected_cost - 1e-15) {
                best = std::move(cand);
                have = true;
            }
        }
    }
    // Pretty-good measurement from the weighted conditional states.
    CMat s_op(dim, dim);
    std::vector<CMat> weighted;
    for (size_t s = 0; s < ctx.posterior.size(); ++s) {
        CMat w = ctx.states[s] * ctx.posterior[s];
        s_op += w;
        weighted.push_back(std::move(w));
    }
    CMat inv_root = hermitian_function(s_op, [](double v) { return v > 1e-10 ? 1.0 / std::sqrt(v) : 0.0; });
    std::vector<CMat> pgm;
    CMat acc(dim, dim);
    for (const auto& w : weighted) {
        CMat el = inv_root * w * inv_root;
        acc += el;
        pgm.push_back(std::move(el));
    }
    // Completion for any null-space mass: fold it into the first element.
    CMat rem = CMat::identity(dim) - acc;
    pgm.front() += rem;
    ContextPovm cand = relabel_elements(pgm, cost);
    if (!have || cand.expected_cost < best.expected_cost - 1e-15) best = std::move(cand);
    return best;
}

}  // namespace

namespace detail {

double min_expected_distortion(const std::vector<ConditionalContext>& contexts,
                               const DistortionFunction& distortion) {
    if (contexts.empty()) throw ValidationError("min_expected_distortion: empty conditional family");
    const int dim = contexts.front().states.front().rows();
    double total = 0.0;
    for (const auto& ctx : contexts) {
        if (ctx.weight <= 0.0) continue;
        if (distortion.s_hat_count() == 2) {
            // Helstrom cost without materializing the projectors:
            // min = Tr(C1) + sum of negative eigenvalues of (C0 - C1).
            const auto cost = cost_operators(ctx, distortion, dim);
            double v = cost[1].trace().real();
            for (double lam : hermitian_eigenvalues(cost[0] - cost[1]))
                if (lam < 0.0) v += lam;
            total += ctx.weight * v;
        } else {
            total += ctx.weight * best_context_povm(ctx, distortion, dim).expected_cost;
        }
    }
    return total;
}

double fast_rate(const RandomParameterChannel& rpc, const Strategy& st,
                 const std::vector<std::vector<CMat>>& rho_sx) {
    const int ns = rpc.param_count();
    const int dim = rpc.out_dim();
    const auto& q = rpc.q();

    auto entropy_vals = [](const CMat& m) {
        double h = 0.0;
        for (double v : hermitian_eigenvalues(m))
            if (v > qlinalg::kSpectrumClip) h -= v * std::log2(v);
        return h;
    };

    if (st.mode == CsiMode::sc || st.mode == CsiMode::causal) {
        // I(Z,X;B) - I(Z;S|X); X is independent of S in these modes.
        CMat rho_b(dim, dim);
        double holevo_cond = 0.0;
        double penalty = 0.0;
        for (int x = 0; x < st.x_size; ++x) {
            if (st.p_x[x] <= 0.0) continue;
            std::vector<double> pz_marg(st.z_size, 0.0);
            for (int z = 0; z < st.z_size; ++z) {
                CMat mix(dim, dim);
                double pz = 0.0;
                for (int s = 0; s < ns; ++s) {
                    const double w = q[s] * st.p_z_given_xs[x][s][z];
                    if (w <= 0.0) continue;
                    mix += rho_sx[s][x] * w;
                    pz += w;
                }
                pz_marg[z] = pz;
                if (pz > 0.0) {
                    rho_b += mix * st.p_x[x];
                    holevo_cond += st.p_x[x] * pz * entropy_vals(mix * (1.0 / pz));
                }
            }
            double h_z_given_s = 0.0;
            for (int s = 0; s < ns; ++s) h_z_given_s += q[s] * qlinalg::shannon_entropy(st.p_z_given_xs[x][s]);
            penalty += st.p_x[x] * (qlinalg::shannon_entropy(pz_marg) - h_z_given_s);
        }
        return entropy_vals(rho_b) - holevo_cond - penalty;
    }

    // nc / none: I(X;B) (minus I(X;S) for nc).
    std::vector<double> px(st.x_size, 0.0);
    CMat rho_b(dim, dim);
    double holevo_cond = 0.0;
    for (int x = 0; x < st.x_size; ++x) {
        CMat mix(dim, dim);
        double p = 0.0;
        for (int s = 0; s < ns; ++s) {
            const double w = (st.mode == CsiMode::nc) ? q[s] * st.p_x_given_s[s][x] : q[s] * st.p_x[x];
            if (w <= 0.0) continue;
            mix += rho_sx[s][x] * w;
            p += w;
        }
        px[x] = p;
        if (p > 0.0) {
            rho_b += mix;
            holevo_cond += p * entropy_vals(mix * (1.0 / p));
        }
    }
    double rate = entropy_vals(rho_b) - holevo_cond;
    if (st.mode == CsiMode::nc) {
        double h_x_given_s = 0.0;
        for (int s = 0; s < ns; ++s) h_x_given_s += q[s] * qlinalg::shannon_entropy(st.p_x_given_s[s]);
        rate -= qlinalg::shannon_entropy(px) - h_x_given_s;
    }
    return rate;
}

}  // namespace detail

EstimationResult optimal_estimation_povm(const std::vector<ConditionalContext>& contexts,
                                         const DistortionFunction& distortion, int x_size, int z_size) {
    if (contexts.empty()) throw ValidationError("optimal_estimation_povm: empty conditional family");
    const int dim = contexts.front().states.front().rows();

    EstimationResult res;
    res.restricted = distortion.s_hat_count() > 2;
    res.povm.x_size = x_size;
    res.povm.z_size = z_size;
    res.povm.distortion = distortion;
    res.povm.gamma.reserve(contexts.size());

    std::vector<ContextPovm> per_ctx(static_cast<size_t>(x_size) * z_size);
    for (const auto& ctx : contexts) {
        ContextPovm cp;
        if (ctx.weight > 0.0) {
            cp = best_context_povm(ctx, distortion, dim);
        } else {
            // Unreachable context: any valid POVM; answer the first label.
            cp.elements.assign(distortion.s_hat_count(), CMat(dim, dim));
            cp.elements[0] = CMat::identity(dim);
        }
        res.expected_distortion += ctx.weight * cp.expected_cost;
        per_ctx[static_cast<size_t>(ctx.x) * z_size + ctx.z] = std::move(cp);
    }
    for (auto& cp : per_ctx) {
        std::vector<PovmOutcome> outcomes;
        for (int sh = 0; sh < distortion.s_hat_count(); ++sh)
            outcomes.push_back({distortion.s_hat_labels()[sh], cp.elements[sh]});
        res.povm.gamma.emplace_back(std::move(outcomes));
    }
    return res;
}

}  // namespace qrps::regions
