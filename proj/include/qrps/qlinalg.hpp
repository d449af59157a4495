#pragma once

#include <map>
#include <string>
#include <vector>

#include "qrps/cmat.hpp"

namespace qrps::qlinalg {

// Validation tolerances, fixed project-wide.
constexpr double kStructuralTol = 1e-10;       // Hermiticity, PSD, trace, completeness
constexpr double kPovmCompletenessTol = 1e-8;  // POVM elements summing to identity
constexpr double kSpectrumClip = 1e-12;        // eigenvalues below this count as exact zero

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Hermitian, PSD, unit-trace matrix on a finite-dimensional space.
class DensityOperator {
public:
    explicit DensityOperator(CMat entries);
    static DensityOperator pure(const std::vector<cxd>& psi);
    static DensityOperator maximally_mixed(int dim);

    int dim() const { return m_.rows(); }
    const CMat& mat() const { return m_; }

private:
    CMat m_;
};

// CPTP map given by Kraus operators (out_dim x in_dim each); completeness
// sum_k K^dag K = I is checked at construction.
class KrausChannel {
public:
    KrausChannel(int in_dim, int out_dim, std::vector<CMat> kraus_ops);
    static KrausChannel identity(int dim);
    static KrausChannel unitary(const CMat& u);

    int in_dim() const { return in_dim_; }
    int out_dim() const { return out_dim_; }
    const std::vector<CMat>& kraus() const { return ops_; }

    // Serial composition: (this after inner)(rho) = this(inner(rho)).
    KrausChannel compose_after(const KrausChannel& inner) const;
    KrausChannel tensor(const KrausChannel& other) const;

private:
    int in_dim_, out_dim_;
    std::vector<CMat> ops_;
};

struct PovmOutcome {
    std::string label;
    CMat op;
};

// Positive operator-valued measure; elements PSD, summing to identity.
class Povm {
public:
    explicit Povm(std::vector<PovmOutcome> outcomes);
    const std::vector<PovmOutcome>& outcomes() const { return outcomes_; }
    int dim() const { return outcomes_.empty() ? 0 : outcomes_.front().op.rows(); }

private:
    std::vector<PovmOutcome> outcomes_;
};

struct ClassicalAxis {
    std::string label;
    int size = 0;
};

// State of the form sum_c p(c) |c><c| (x) rho_c with a tuple of classical
// registers c and one quantum block. The pmf is stored flattened row-major
// over the axes; blocks may be omitted where the pmf vanishes.
class ClassicalQuantumState {
public:
    ClassicalQuantumState(std::vector<ClassicalAxis> axes, std::vector<double> joint_pmf,
                          std::vector<CMat> blocks, int qdim);

    int axis_count() const { return static_cast<int>(axes_.size()); }
    const std::vector<ClassicalAxis>& axes() const { return axes_; }
    int qdim() const { return qdim_; }
    const std::vector<double>& pmf() const { return pmf_; }
    const std::vector<CMat>& blocks() const { return blocks_; }

    size_t flat_index(const std::vector<int>& tuple) const;
    std::vector<int> unflatten(size_t idx) const;

    // Average quantum block over a subset of (or all) classical values.
    CMat average_block() const;

private:
    std::vector<ClassicalAxis> axes_;
    std::vector<double> pmf_;
    std::vector<CMat> blocks_;
    int qdim_;
};

// Quantum entropy -Tr[rho log rho] in bits; eigenvalues below 1e-12
// contribute zero.
double von_neumann_entropy(const DensityOperator& rho);
double entropy_of(const CMat& hermitian_psd);  // same, on a raw matrix (trusted input)

// Shannon entropy of a pmf, in bits.
double shannon_entropy(const std::vector<double>& pmf);

// I(A;B) = H(A) + H(B) - H(AB) on a bipartite density operator whose space
// factors as dims[0] (x) dims[1] (x) ...; part_a lists the subsystems on
// the A side of the cut, the remainder forms B.
double quantum_mutual_information(const DensityOperator& sigma, const std::vector<int>& dims,
                                  const std::vector<int>& part_a);

// I(A;B|C) = H(AC) + H(BC) - H(ABC) - H(C); subsystems not listed in
// part_a or part_c form B.
double quantum_conditional_mutual_information(const DensityOperator& sigma, const std::vector<int>& dims,
                                              const std::vector<int>& part_a,
                                              const std::vector<int>& part_c);

// I(A ; quantum block | C) on a cq-state: A and C are disjoint sets of
// classical axis indices. With C empty this is the Holevo quantity of the
// (A -> block) ensemble after marginalizing the other axes.
double mutual_information_with_block(const ClassicalQuantumState& st, const std::vector<int>& part_a,
                                     const std::vector<int>& cond = {});

// Classical I(A;B|C) between axis sets of a cq-state's pmf.
double classical_mutual_information(const ClassicalQuantumState& st, const std::vector<int>& part_a,
                                    const std::vector<int>& part_b, const std::vector<int>& cond = {});

DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho);
CMat apply_channel_raw(const KrausChannel& ch, const CMat& rho);

// Reduced state keeping the listed subsystems (ascending order kept).
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& dims,
                              const std::vector<int>& keep);

}  // namespace qrps::qlinalg
