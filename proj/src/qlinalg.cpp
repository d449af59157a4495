#include "qrps/qlinalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qrps::qlinalg {

namespace {

void check_density(const CMat& m) {
    if (m.rows() != m.cols()) throw ValidationError("density operator: not square");
    if (!m.is_hermitian(kStructuralTol)) throw ValidationError("density operator: not Hermitian");
    if (std::abs(m.trace() - cxd(1.0, 0.0)) > kStructuralTol)
        throw ValidationError("density operator: trace differs from 1");
    EigenSystem es = hermitian_eigensystem(m);
    if (es.values.front() < -kStructuralTol)
        throw ValidationError("density operator: negative eigenvalue");
}

bool is_psd(const CMat& m, double tol) {
    if (!m.is_hermitian(tol)) return false;
    EigenSystem es = hermitian_eigensystem(m);
    return es.values.front() >= -tol;
}

}  // namespace

DensityOperator::DensityOperator(CMat entries) : m_(std::move(entries)) { check_density(m_); }

DensityOperator DensityOperator::pure(const std::vector<cxd>& psi) {
    double n2 = 0.0;
    for (const auto& a : psi) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > 1e-9) throw ValidationError("pure state: vector not normalized");
    return DensityOperator(CMat::outer(psi, psi));
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
    CMat m(dim, dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0 / dim;
    return DensityOperator(std::move(m));
}

KrausChannel::KrausChannel(int in_dim, int out_dim, std::vector<CMat> kraus_ops)
    : in_dim_(in_dim), out_dim_(out_dim), ops_(std::move(kraus_ops)) {
    if (ops_.empty()) throw ValidationError("KrausChannel: no operators");
    for (const auto& k : ops_)
        if (k.rows() != out_dim_ || k.cols() != in_dim_)
            throw DimensionError("KrausChannel: operator shape mismatch");
    CMat s(in_dim_, in_dim_);
    for (const auto& k : ops_) s += k.adjoint() * k;
    if (s.max_abs_diff(CMat::identity(in_dim_)) > kStructuralTol)
        throw ValidationError("KrausChannel: completeness sum differs from identity");
}

KrausChannel KrausChannel::identity(int dim) {
    return KrausChannel(dim, dim, {CMat::identity(dim)});
}

KrausChannel KrausChannel::unitary(const CMat& u) {
    return KrausChannel(u.cols(), u.rows(), {u});
}

KrausChannel KrausChannel::compose_after(const KrausChannel& inner) const {
    if (inner.out_dim_ != in_dim_) throw DimensionError("compose_after: dimension mismatch");
    std::vector<CMat> ops;
    ops.reserve(ops_.size() * inner.ops_.size());
    for (const auto& a : ops_)
        for (const auto& b : inner.ops_) ops.push_back(a * b);
    return KrausChannel(inner.in_dim_, out_dim_, std::move(ops));
}

KrausChannel KrausChannel::tensor(const KrausChannel& other) const {
    std::vector<CMat> ops;
    ops.reserve(ops_.size() * other.ops_.size());
    for (const auto& a : ops_)
        for (const auto& b : other.ops_) ops.push_back(a.kron(b));
    return KrausChannel(in_dim_ * other.in_dim_, out_dim_ * other.out_dim_, std::move(ops));
}

Povm::Povm(std::vector<PovmOutcome> outcomes) : outcomes_(std::move(outcomes)) {
    if (outcomes_.empty()) throw ValidationError("Povm: empty");
    const int d = outcomes_.front().op.rows();
    CMat s(d, d);
    for (const auto& o : outcomes_) {
        if (o.op.rows() != d || o.op.cols() != d) throw DimensionError("Povm: element shape mismatch");
        if (!is_psd(o.op, kStructuralTol)) throw ValidationError("Povm: element not PSD");
        s += o.op;
    }
    if (s.max_abs_diff(CMat::identity(d)) > kPovmCompletenessTol)
        throw ValidationError("Povm: elements do not sum to identity");
}

ClassicalQuantumState::ClassicalQuantumState(std::vector<ClassicalAxis> axes, std::vector<double> joint_pmf,
                                             std::vector<CMat> blocks, int qdim)
    : axes_(std::move(axes)), pmf_(std::move(joint_pmf)), blocks_(std::move(blocks)), qdim_(qdim) {
    size_t cells = 1;
    for (const auto& ax : axes_) cells *= static_cast<size_t>(ax.size);
    if (pmf_.size() != cells) throw DimensionError("cq-state: pmf size mismatch");
    if (blocks_.size() != cells) throw DimensionError("cq-state: block count mismatch");
    double tot = 0.0;
    for (double p : pmf_) {
        if (p < -kStructuralTol) throw ValidationError("cq-state: negative pmf entry");
        tot += p;
    }
    if (std::abs(tot - 1.0) > kStructuralTol) throw ValidationError("cq-state: pmf does not sum to 1");
    for (size_t i = 0; i < cells; ++i) {
        if (pmf_[i] <= 0.0) continue;
        check_density(blocks_[i]);
        if (blocks_[i].rows() != qdim_) throw DimensionError("cq-state: block dimension mismatch");
    }
}

size_t ClassicalQuantumState::flat_index(const std::vector<int>& tuple) const {
    size_t idx = 0;
    for (size_t a = 0; a < axes_.size(); ++a) idx = idx * axes_[a].size + tuple[a];
    return idx;
}

std::vector<int> ClassicalQuantumState::unflatten(size_t idx) const {
    std::vector<int> t(axes_.size());
    for (size_t a = axes_.size(); a-- > 0;) {
        t[a] = static_cast<int>(idx % axes_[a].size);
        idx /= axes_[a].size;
    }
    return t;
}

CMat ClassicalQuantumState::average_block() const {
    CMat m(qdim_, qdim_);
    for (size_t i = 0; i < pmf_.size(); ++i)
        if (pmf_[i] > 0.0) m += blocks_[i] * pmf_[i];
    return m;
}

double entropy_of(const CMat& h) {
    EigenSystem es = hermitian_eigensystem(h);
    double s = 0.0;
    for (double v : es.values)
        if (v > kSpectrumClip) s -= v * std::log2(v);
    return s;
}

double von_neumann_entropy(const DensityOperator& rho) { return entropy_of(rho.mat()); }

double shannon_entropy(const std::vector<double>& pmf) {
    double s = 0.0;
    for (double p : pmf)
        if (p > kSpectrumClip) s -= p * std::log2(p);
    return s;
}

namespace {

// Marginal pmf over a subset of axes (ascending order of `axes` indices).
std::vector<double> marginal_pmf(const ClassicalQuantumState& st, const std::vector<int>& axes) {
    size_t cells = 1;
    for (int a : axes) cells *= static_cast<size_t>(st.axes()[a].size);
    std::vector<double> out(cells, 0.0);
    const auto& pmf = st.pmf();
    for (size_t i = 0; i < pmf.size(); ++i) {
        if (pmf[i] <= 0.0) continue;
        const auto t = st.unflatten(i);
        size_t idx = 0;
        for (int a : axes) idx = idx * st.axes()[a].size + t[a];
        out[idx] += pmf[i];
    }
    return out;
}

size_t project_index(const ClassicalQuantumState& st, const std::vector<int>& tuple,
                     const std::vector<int>& axes) {
    size_t idx = 0;
    for (int a : axes) idx = idx * st.axes()[a].size + tuple[a];
    return idx;
}

}  // namespace

double mutual_information_with_block(const ClassicalQuantumState& st, const std::vector<int>& part_a,
                                     const std::vector<int>& cond) {
    // I(A;Q|C) = sum_c p(c) [ H(rho_c) - sum_a p(a|c) H(rho_{a,c}) ].
    std::vector<int> ac = cond;
    ac.insert(ac.end(), part_a.begin(), part_a.end());
    std::sort(ac.begin(), ac.end());

    size_t c_cells = 1;
    for (int a : cond) c_cells *= static_cast<size_t>(st.axes()[a].size);
    size_t ac_cells = 1;
    for (int a : ac) ac_cells *= static_cast<size_t>(st.axes()[a].size);

    std::vector<double> p_c(c_cells, 0.0), p_ac(ac_cells, 0.0);
    std::vector<CMat> rho_c(c_cells, CMat(st.qdim(), st.qdim()));
    std::vector<CMat> rho_ac(ac_cells, CMat(st.qdim(), st.qdim()));

    const auto& pmf = st.pmf();
    std::vector<int> cond_sorted = cond;
    std::sort(cond_sorted.begin(), cond_sorted.end());
    for (size_t i = 0; i < pmf.size(); ++i) {
        if (pmf[i] <= 0.0) continue;
        const auto t = st.unflatten(i);
        const size_t ic = project_index(st, t, cond_sorted);
        const size_t iac = project_index(st, t, ac);
        p_c[ic] += pmf[i];
        p_ac[iac] += pmf[i];
        rho_c[ic] += st.blocks()[i] * pmf[i];
        rho_ac[iac] += st.blocks()[i] * pmf[i];
    }

    double info = 0.0;
    for (size_t ic = 0; ic < c_cells; ++ic) {
        if (p_c[ic] <= 0.0) continue;
        info += p_c[ic] * entropy_of(rho_c[ic] * (1.0 / p_c[ic]));
    }
    for (size_t i = 0; i < ac_cells; ++i) {
        if (p_ac[i] <= 0.0) continue;
        info -= p_ac[i] * entropy_of(rho_ac[i] * (1.0 / p_ac[i]));
    }
    return info;
}

double classical_mutual_information(const ClassicalQuantumState& st, const std::vector<int>& part_a,
                                    const std::vector<int>& part_b, const std::vector<int>& cond) {
    // I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C).
    auto ent = [&st](std::vector<int> axes) {
        std::sort(axes.begin(), axes.end());
        return shannon_entropy(marginal_pmf(st, axes));
    };
    std::vector<int> acu = cond, bcu = cond, abc = cond;
    acu.insert(acu.end(), part_a.begin(), part_a.end());
    bcu.insert(bcu.end(), part_b.begin(), part_b.end());
    abc.insert(abc.end(), part_a.begin(), part_a.end());
    abc.insert(abc.end(), part_b.begin(), part_b.end());
    return ent(acu) + ent(bcu) - ent(abc) - ent(cond);
}

double quantum_mutual_information(const DensityOperator& sigma, const std::vector<int>& dims,
                                  const std::vector<int>& part_a) {
    int prod = 1;
    for (int d : dims) prod *= d;
    if (prod != sigma.dim()) throw DimensionError("mutual information: cut does not factor the state");
    std::vector<int> part_b;
    for (int i = 0; i < static_cast<int>(dims.size()); ++i)
        if (std::find(part_a.begin(), part_a.end(), i) == part_a.end()) part_b.push_back(i);
    DensityOperator rho_a = partial_trace(sigma, dims, part_a);
    DensityOperator rho_b = partial_trace(sigma, dims, part_b);
    return von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(sigma);
}

double quantum_conditional_mutual_information(const DensityOperator& sigma, const std::vector<int>& dims,
                                              const std::vector<int>& part_a,
                                              const std::vector<int>& part_c) {
    int prod = 1;
    for (int d : dims) prod *= d;
    if (prod != sigma.dim()) throw DimensionError("conditional MI: cut does not factor the state");
    std::vector<int> part_b;
    for (int i = 0; i < static_cast<int>(dims.size()); ++i)
        if (std::find(part_a.begin(), part_a.end(), i) == part_a.end() &&
            std::find(part_c.begin(), part_c.end(), i) == part_c.end())
            part_b.push_back(i);
    auto ent = [&](std::vector<int> keep) {
        if (keep.empty()) return 0.0;
        std::sort(keep.begin(), keep.end());
        return von_neumann_entropy(partial_trace(sigma, dims, keep));
    };
    std::vector<int> ac = part_a, bc = part_b;
    ac.insert(ac.end(), part_c.begin(), part_c.end());
    bc.insert(bc.end(), part_c.begin(), part_c.end());
    return ent(ac) + ent(bc) - von_neumann_entropy(sigma) - ent(part_c);
}

DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho) {
    if (rho.dim() != ch.in_dim()) throw DimensionError("apply_channel: dimension mismatch");
    return DensityOperator(apply_channel_raw(ch, rho.mat()));
}

CMat apply_channel_raw(const KrausChannel& ch, const CMat& rho) {
    CMat out(ch.out_dim(), ch.out_dim());
    for (const auto& k : ch.kraus()) out += k * rho * k.adjoint();
    return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& dims,
                              const std::vector<int>& keep) {
    int prod = 1;
    for (int d : dims) prod *= d;
    if (prod != rho.dim()) throw DimensionError("partial_trace: dims do not factor the state");

    std::vector<int> keep_sorted = keep;
    std::sort(keep_sorted.begin(), keep_sorted.end());
    const int n = static_cast<int>(dims.size());

    int dim_keep = 1;
    for (int k : keep_sorted) dim_keep *= dims[k];

    // Strides of each subsystem in the flattened index.
    std::vector<int> stride(n, 1);
    for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    std::vector<int> traced;
    for (int i = 0; i < n; ++i)
        if (std::find(keep_sorted.begin(), keep_sorted.end(), i) == keep_sorted.end()) traced.push_back(i);
    int dim_traced = 1;
    for (int t : traced) dim_traced *= dims[t];

    CMat out(dim_keep, dim_keep);
    for (int rk = 0; rk < dim_keep; ++rk) {
        for (int ck = 0; ck < dim_keep; ++ck) {
            // Decompose kept multi-indices.
            int base_r = 0, base_c = 0, tmp_r = rk, tmp_c = ck;
            for (size_t i = keep_sorted.size(); i-- > 0;) {
                const int d = dims[keep_sorted[i]];
                base_r += (tmp_r % d) * stride[keep_sorted[i]];
                base_c += (tmp_c % d) * stride[keep_sorted[i]];
                tmp_r /= d;
                tmp_c /= d;
            }
            cxd sum = 0.0;
            for (int t = 0; t < dim_traced; ++t) {
                int off = 0, tmp = t;
                for (size_t i = traced.size(); i-- > 0;) {
                    const int d = dims[traced[i]];
                    off += (tmp % d) * stride[traced[i]];
                    tmp /= d;
                }
                sum += rho.mat()(base_r + off, base_c + off);
            }
            out(rk, ck) = sum;
        }
    }
    return DensityOperator(std::move(out));
}

}  // namespace qrps::qlinalg
