#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracle_helpers.hpp"
#include "qrps/qlinalg.hpp"
#include "qrps/rng.hpp"

using namespace qrps;
using namespace qrps::qlinalg;

namespace {

const std::vector<cxd> kZero = {1.0, 0.0};
const std::vector<cxd> kOne = {0.0, 1.0};
const std::vector<cxd> kPlus = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
const std::vector<cxd> kMinus = {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)};

KrausChannel dephasing_channel(double eps) {
    CMat k0 = CMat::identity(2) * std::sqrt(1.0 - eps);
    CMat k1(2, 2, {std::sqrt(eps), 0.0, 0.0, -std::sqrt(eps)});
    return KrausChannel(2, 2, {k0, k1});
}

}  // namespace

TEST_CASE("jacobi eigensystem reconstructs random Hermitian matrices") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 2 + rng.uniform_int(6);
        CMat g(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) g(i, j) = cxd(rng.gaussian(), rng.gaussian());
        CMat herm = (g + g.adjoint()) * 0.5;
        const auto es = hermitian_eigensystem(herm);
        // Residual || H v - lambda v || per eigenpair.
        for (int i = 0; i < dim; ++i) {
            double resid = 0.0;
            for (int r = 0; r < dim; ++r) {
                cxd hv = 0.0;
                for (int c = 0; c < dim; ++c) hv += herm(r, c) * es.vectors(c, i);
                resid += std::norm(hv - es.values[i] * es.vectors(r, i));
            }
            CHECK(std::sqrt(resid) < 1e-9);
        }
        // Eigenvalues ascending and trace preserved.
        double tr = 0.0;
        for (int i = 0; i < dim; ++i) {
            tr += es.values[i];
            if (i) CHECK(es.values[i] >= es.values[i - 1]);
        }
        CHECK(tr == doctest::Approx(herm.trace().real()).epsilon(1e-10));
    }
}

TEST_CASE("von Neumann entropy: stated examples") {
    CHECK(von_neumann_entropy(DensityOperator::maximally_mixed(2)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(von_neumann_entropy(DensityOperator::pure(kPlus)) == doctest::Approx(0.0).epsilon(1e-10));
    const double expected = oracle::binary_entropy(0.11);
    CHECK(von_neumann_entropy(DensityOperator(CMat::diag({0.89, 0.11}))) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("von Neumann entropy rejects invalid operators") {
    CMat bad(2, 2, {0.6, cxd(0.0, 0.3), cxd(0.0, 0.3), 0.4});  // not Hermitian
    CHECK_THROWS_AS(DensityOperator{bad}, ValidationError);
    CMat bad_trace(2, 2, {0.9, 0.0, 0.0, 0.4});
    CHECK_THROWS_AS(DensityOperator{bad_trace}, ValidationError);
    CMat neg(2, 2, {1.2, 0.0, 0.0, -0.2});
    CHECK_THROWS_AS(DensityOperator{neg}, ValidationError);
}

TEST_CASE("entropy bounds and invariances on random states") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = 2 + rng.uniform_int(4);
        DensityOperator rho(oracle::random_density(dim, rng));
        const double h = von_neumann_entropy(rho);
        CHECK(h >= -1e-12);
        CHECK(h <= std::log2(dim) + 1e-9);
    }
    // Unitary invariance: H(U rho U^+) = H(rho).
    for (int trial = 0; trial < 10; ++trial) {
        DensityOperator rho(oracle::random_density(3, rng));
        CMat g(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g(i, j) = cxd(rng.gaussian(), rng.gaussian());
        // QR-lite: orthonormalize columns.
        auto es = hermitian_eigensystem((g + g.adjoint()) * 0.5);
        const CMat& u = es.vectors;
        DensityOperator rotated(u * rho.mat() * u.adjoint());
        CHECK(von_neumann_entropy(rotated) == doctest::Approx(von_neumann_entropy(rho)).epsilon(1e-9));
    }
    // Additivity: H(rho (x) sigma) = H(rho) + H(sigma).
    for (int trial = 0; trial < 10; ++trial) {
        DensityOperator a(oracle::random_density(2, rng));
        DensityOperator b(oracle::random_density(3, rng));
        DensityOperator ab(a.mat().kron(b.mat()));
        CHECK(von_neumann_entropy(ab) ==
              doctest::Approx(von_neumann_entropy(a) + von_neumann_entropy(b)).epsilon(1e-9));
    }
}

TEST_CASE("quantum mutual information: product, entangled, and cq examples") {
    Rng rng(3);
    // Product state: I(A;B) = 0.
    DensityOperator a(oracle::random_density(2, rng));
    DensityOperator b(oracle::random_density(2, rng));
    DensityOperator ab(a.mat().kron(b.mat()));
    CHECK(quantum_mutual_information(ab, {2, 2}, {0}) == doctest::Approx(0.0).epsilon(1e-9));

    // Maximally entangled pair: I(A;B) = 2 log2(D), D = 2.
    std::vector<cxd> bell = {1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0)};
    DensityOperator phi = DensityOperator::pure(bell);
    CHECK(quantum_mutual_information(phi, {2, 2}, {0}) == doctest::Approx(2.0).epsilon(1e-9));

    // cq-state of a binary symmetric channel: I(X;B) = 1 - h(p).
    const double p = 0.17;
    std::vector<CMat> blocks = {CMat::diag({1.0 - p, p}), CMat::diag({p, 1.0 - p})};
    ClassicalQuantumState cq({{"X", 2}}, {0.5, 0.5}, blocks, 2);
    CHECK(mutual_information_with_block(cq, {0}) ==
          doctest::Approx(1.0 - oracle::binary_entropy(p)).epsilon(1e-9));

    // Dimension mismatch on the cut.
    CHECK_THROWS_AS(quantum_mutual_information(ab, {3, 2}, {0}), DimensionError);
}

TEST_CASE("apply_channel: identity, Pauli-Z, and two-Kraus dephasing") {
    Rng rng(11);
    DensityOperator rho(oracle::random_density(2, rng));
    CHECK(apply_channel(KrausChannel::identity(2), rho).mat().max_abs_diff(rho.mat()) < 1e-12);

    CMat z(2, 2, {1.0, 0.0, 0.0, -1.0});
    DensityOperator plus = DensityOperator::pure(kPlus);
    DensityOperator flipped = apply_channel(KrausChannel::unitary(z), plus);
    CHECK(flipped.mat().max_abs_diff(CMat::outer(kMinus, kMinus)) < 1e-12);

    const double eps = 0.25;
    DensityOperator out = apply_channel(dephasing_channel(eps), plus);
    const auto vals = hermitian_eigenvalues(out.mat());
    CHECK(vals[0] == doctest::Approx(eps).epsilon(1e-12));
    CHECK(vals[1] == doctest::Approx(1.0 - eps).epsilon(1e-12));

    DensityOperator rho3(oracle::random_density(3, rng));
    CHECK_THROWS_AS(apply_channel(KrausChannel::identity(2), rho3), DimensionError);
}

TEST_CASE("apply_channel preserves trace and positivity") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        // Random CPTP map via Stinespring-style column-orthonormal blocks.
        CMat g(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) g(i, j) = cxd(rng.gaussian(), rng.gaussian());
        auto es = hermitian_eigensystem((g + g.adjoint()) * 0.5);
        const CMat& u = es.vectors;  // unitary 4x4
        // Two 2x2 Kraus blocks from the first two columns.
        CMat k0(2, 2), k1(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                k0(r, c) = u(r, c);
                k1(r, c) = u(2 + r, c);
            }
        KrausChannel ch(2, 2, {k0, k1});
        DensityOperator rho(oracle::random_density(2, rng));
        DensityOperator out = apply_channel(ch, rho);  // constructor re-validates
        CHECK(std::abs(out.mat().trace() - cxd(1.0, 0.0)) < 1e-10);
    }
}

TEST_CASE("data processing: channels never increase I(X;B)") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<CMat> blocks = {oracle::random_density(2, rng), oracle::random_density(2, rng),
                                    oracle::random_density(2, rng)};
        ClassicalQuantumState cq({{"X", 3}}, {0.3, 0.4, 0.3}, blocks, 2);
        const double before = mutual_information_with_block(cq, {0});

        KrausChannel noisy = dephasing_channel(0.3);
        std::vector<CMat> after_blocks;
        for (const auto& b : blocks) after_blocks.push_back(apply_channel_raw(noisy, b));
        ClassicalQuantumState cq_after({{"X", 3}}, {0.3, 0.4, 0.3}, after_blocks, 2);
        const double after = mutual_information_with_block(cq_after, {0});
        CHECK(after <= before + 1e-9);
    }
}

TEST_CASE("partial trace: Bell pair, products, and classical registers") {
    std::vector<cxd> bell = {1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0)};
    DensityOperator phi = DensityOperator::pure(bell);
    DensityOperator reduced = partial_trace(phi, {2, 2}, {0});
    CHECK(reduced.mat().max_abs_diff(CMat::diag({0.5, 0.5})) < 1e-12);

    Rng rng(23);
    DensityOperator a(oracle::random_density(2, rng));
    DensityOperator b(oracle::random_density(3, rng));
    DensityOperator ab(a.mat().kron(b.mat()));
    CHECK(partial_trace(ab, {2, 3}, {0}).mat().max_abs_diff(a.mat()) < 1e-10);
    CHECK(partial_trace(ab, {2, 3}, {1}).mat().max_abs_diff(b.mat()) < 1e-10);

    // cq-state sum_x p(x) |x><x| (x) rho_x: tracing the register leaves the mixture.
    std::vector<CMat> rho_x = {oracle::random_density(2, rng), oracle::random_density(2, rng)};
    const double p0 = 0.3;
    CMat joint(4, 4);
    for (int x = 0; x < 2; ++x) {
        CMat reg(2, 2);
        reg(x, x) = 1.0;
        joint += reg.kron(rho_x[x]) * (x == 0 ? p0 : 1.0 - p0);
    }
    CMat expected = rho_x[0] * p0 + rho_x[1] * (1.0 - p0);
    CHECK(partial_trace(DensityOperator(joint), {2, 2}, {1}).mat().max_abs_diff(expected) < 1e-10);

    CHECK_THROWS_AS(partial_trace(phi, {3, 2}, {0}), DimensionError);

    // Non-contiguous keep set on a three-factor product.
    DensityOperator c(oracle::random_density(2, rng));
    DensityOperator abc(a.mat().kron(b.mat()).kron(c.mat()));
    CHECK(partial_trace(abc, {2, 3, 2}, {0, 2}).mat().max_abs_diff(a.mat().kron(c.mat())) < 1e-10);
}

TEST_CASE("POVM validation") {
    CMat plus_proj = CMat::outer(kPlus, kPlus);
    CMat minus_proj = CMat::outer(kMinus, kMinus);
    CHECK_NOTHROW(Povm({{"0", plus_proj}, {"1", minus_proj}}));
    CHECK_THROWS_AS(Povm({{"0", plus_proj}, {"1", plus_proj}}), ValidationError);
    CMat neg = plus_proj * (-1.0);
    CHECK_THROWS_AS(Povm({{"0", CMat::identity(2) - neg}, {"1", neg}}), ValidationError);
}

TEST_CASE("conditional quantum mutual information: strong subadditivity holds") {
    Rng rng(59);
    for (int trial = 0; trial < 15; ++trial) {
        DensityOperator rho(oracle::random_density(8, rng));  // 2 x 2 x 2
        const double cmi = quantum_conditional_mutual_information(rho, {2, 2, 2}, {0}, {2});
        CHECK(cmi >= -1e-9);
    }
    // Product of a correlated AB pair with C: I(A;B|C) = I(A;B).
    DensityOperator ab(oracle::random_density(4, rng));
    DensityOperator c(oracle::random_density(2, rng));
    DensityOperator abc(ab.mat().kron(c.mat()));
    const double cond = quantum_conditional_mutual_information(abc, {2, 2, 2}, {0}, {2});
    const double plain = quantum_mutual_information(ab, {2, 2}, {0});
    CHECK(cond == doctest::Approx(plain).epsilon(1e-9));
}

TEST_CASE("conditional mutual information identities on cq states") {
    // I(A;B|C) computed two ways on a random classical joint.
    Rng rng(31);
    const int na = 2, nb = 3, nc = 2;
    std::vector<double> pmf(na * nb * nc);
    double tot = 0.0;
    for (auto& p : pmf) {
        p = rng.uniform() + 0.01;
        tot += p;
    }
    for (auto& p : pmf) p /= tot;
    std::vector<CMat> blocks(pmf.size(), CMat::diag({1.0}));
    ClassicalQuantumState cq({{"A", na}, {"B", nb}, {"C", nc}}, pmf, blocks, 1);

    // Chain rule: I(A;BC) = I(A;C) + I(A;B|C).
    const double lhs = classical_mutual_information(cq, {0}, {1, 2});
    const double rhs = classical_mutual_information(cq, {0}, {2}) +
                       classical_mutual_information(cq, {0}, {1}, {2});
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}
