#include "qrps/cmat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qrps {

CMat::CMat(int rows, int cols, std::initializer_list<cxd> entries) : CMat(rows, cols) {
    if (static_cast<int>(entries.size()) != rows * cols)
        throw std::invalid_argument("CMat: initializer size mismatch");
    size_t i = 0;
    for (const auto& e : entries) a_[i++] = e;
}

CMat CMat::identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMat CMat::outer(const std::vector<cxd>& u, const std::vector<cxd>& v) {
    CMat m(static_cast<int>(u.size()), static_cast<int>(v.size()));
    for (size_t r = 0; r < u.size(); ++r)
        for (size_t c = 0; c < v.size(); ++c)
            m(static_cast<int>(r), static_cast<int>(c)) = u[r] * std::conj(v[c]);
    return m;
}

CMat CMat::diag(const std::vector<double>& d) {
    CMat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

CMat CMat::operator+(const CMat& o) const {
    CMat r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
    return r;
}

CMat CMat::operator-(const CMat& o) const {
    CMat r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
    return r;
}

CMat& CMat::operator+=(const CMat& o) {
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

CMat CMat::operator*(const CMat& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("CMat: dimension mismatch in product");
    CMat r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int k = 0; k < cols_; ++k) {
            const cxd aik = (*this)(i, k);
            if (aik == cxd(0.0, 0.0)) continue;
            for (int j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
        }
    }
    return r;
}

CMat CMat::operator*(cxd s) const {
    CMat r = *this;
    for (auto& e : r.a_) e *= s;
    return r;
}

CMat CMat::adjoint() const {
    CMat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

CMat CMat::transpose() const {
    CMat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

cxd CMat::trace() const {
    cxd t = 0.0;
    for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

CMat CMat::kron(const CMat& o) const {
    CMat r(rows_ * o.rows_, cols_ * o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) {
            const cxd v = (*this)(i, j);
            if (v == cxd(0.0, 0.0)) continue;
            for (int k = 0; k < o.rows_; ++k)
                for (int l = 0; l < o.cols_; ++l)
                    r(i * o.rows_ + k, j * o.cols_ + l) = v * o(k, l);
        }
    return r;
}

double CMat::frobenius_norm() const {
    double s = 0.0;
    for (const auto& e : a_) s += std::norm(e);
    return std::sqrt(s);
}

double CMat::max_abs_diff(const CMat& o) const {
    double m = 0.0;
    for (size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - o.a_[i]));
    return m;
}

bool CMat::is_hermitian(double tol) const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = i; j < cols_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    return true;
}

namespace {

double offdiag_norm(const CMat& a) {
    double s = 0.0;
    const int n = a.rows();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

namespace {

// Cyclic complex Jacobi; diagonalizes `a` in place, accumulating the
// rotations into `u` when it is non-null.
void jacobi_diagonalize(CMat& a, CMat* u) {
    const int n = a.rows();
    constexpr double kConvergence = 1e-12;
    constexpr int kMaxSweeps = 100;

    for (int sweep = 0; sweep < kMaxSweeps && offdiag_norm(a) >= kConvergence; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cxd apq = a(p, q);
                const double r = std::abs(apq);
                if (r < 1e-300) continue;
                // Phase that makes the pivot real, then a real Jacobi rotation.
                const cxd phase = apq / r;  // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * r);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Rotation columns on the (p, q) pair:
                //   v_p = c * e_p - s * conj(phase) * e_q
                //   v_q = s * e_p + c * conj(phase) * e_q
                const cxd w = std::conj(phase);
                for (int k = 0; k < n; ++k) {
                    const cxd akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * w * akq;
                    a(k, q) = s * akp + c * w * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const cxd apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * phase * aqk;
                    a(q, k) = s * apk + c * phase * aqk;
                }
                if (u) {
                    for (int k = 0; k < n; ++k) {
                        const cxd ukp = (*u)(k, p), ukq = (*u)(k, q);
                        (*u)(k, p) = c * ukp - s * w * ukq;
                        (*u)(k, q) = s * ukp + c * w * ukq;
                    }
                }
            }
        }
    }
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const CMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eigenvalues: not square");
    CMat a = m;
    jacobi_diagonalize(a, nullptr);
    std::vector<double> vals(a.rows());
    for (int i = 0; i < a.rows(); ++i) vals[i] = a(i, i).real();
    std::sort(vals.begin(), vals.end());
    return vals;
}

EigenSystem hermitian_eigensystem(const CMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eigensystem: not square");
    const int n = m.rows();
    CMat a = m;
    CMat u = CMat::identity(n);
    jacobi_diagonalize(a, &u);

    EigenSystem es;
    es.values.resize(n);
    for (int i = 0; i < n; ++i) es.values[i] = a(i, i).real();

    // Sort ascending, reordering eigenvector columns to match.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = 0; i < n - 1; ++i) {
        int best = i;
        for (int j = i + 1; j < n; ++j)
            if (es.values[order[j]] < es.values[order[best]]) best = j;
        std::swap(order[i], order[best]);
    }
    EigenSystem out;
    out.values.resize(n);
    out.vectors = CMat(n, n);
    for (int i = 0; i < n; ++i) {
        out.values[i] = es.values[order[i]];
        for (int k = 0; k < n; ++k) out.vectors(k, i) = u(k, order[i]);
    }
    return out;
}

CMat hermitian_function(const CMat& m, double (*f)(double)) {
    EigenSystem es = hermitian_eigensystem(m);
    const int n = m.rows();
    CMat r(n, n);
    for (int i = 0; i < n; ++i) {
        const double fi = f(es.values[i]);
        if (fi == 0.0) continue;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                r(a, b) += fi * es.vectors(a, i) * std::conj(es.vectors(b, i));
    }
    return r;
}

double trace_norm_diff(const CMat& a, const CMat& b) {
    EigenSystem es = hermitian_eigensystem(a - b);
    double s = 0.0;
    for (double v : es.values) s += std::abs(v);
    return s;
}

}  // namespace qrps
