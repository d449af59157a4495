#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace qrps {

using cxd = std::complex<double>;

// Dense complex matrix, row-major. Sized for the small Hilbert spaces this
// library works with (dim <= 64); no attempt at sparsity or blocking.
class CMat {
public:
    CMat() : rows_(0), cols_(0) {}
    CMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}
    CMat(int rows, int cols, std::initializer_list<cxd> entries);

    static CMat identity(int n);
    static CMat zero(int n) { return CMat(n, n); }
    // Outer product |u><v|.
    static CMat outer(const std::vector<cxd>& u, const std::vector<cxd>& v);
    static CMat diag(const std::vector<double>& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cxd& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const cxd& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    CMat operator+(const CMat& o) const;
    CMat operator-(const CMat& o) const;
    CMat operator*(const CMat& o) const;
    CMat operator*(cxd s) const;
    CMat& operator+=(const CMat& o);

    CMat adjoint() const;
    CMat transpose() const;
    cxd trace() const;
    // Tensor (Kronecker) product, this (x) o.
    CMat kron(const CMat& o) const;

    double frobenius_norm() const;
    double max_abs_diff(const CMat& o) const;
    bool is_hermitian(double tol) const;

    const std::vector<cxd>& data() const { return a_; }
    std::vector<cxd>& data() { return a_; }

private:
    int rows_, cols_;
    std::vector<cxd> a_;
};

struct EigenSystem {
    std::vector<double> values;   // ascending
    CMat vectors;                 // columns are the eigenvectors, same order
};

// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
// rotations. Deterministic; converges when the off-diagonal Frobenius
// norm drops below 1e-12 (or after a sweep cap, whichever first).
EigenSystem hermitian_eigensystem(const CMat& m);

// Eigenvalues only (ascending); skips eigenvector accumulation.
std::vector<double> hermitian_eigenvalues(const CMat& m);

// Apply f to the spectrum: U f(diag) U^dagger.
CMat hermitian_function(const CMat& m, double (*f)(double));

// Sum of absolute eigenvalues of (a - b); equals ||a - b||_1 for Hermitian inputs.
double trace_norm_diff(const CMat& a, const CMat& b);

}  // namespace qrps
