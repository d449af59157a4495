#pragma once

#include <string>
#include <vector>

#include "qrps/qlinalg.hpp"

namespace qrps::channels {

using qlinalg::DensityOperator;
using qlinalg::KrausChannel;
using qlinalg::Povm;

enum class ChannelKind { general, measurement, classical_quantum };

// Collection of CPTP maps N^(s) indexed by a classical parameter s ~ q(s).
class RandomParameterChannel {
public:
    RandomParameterChannel(std::vector<std::string> param_labels, std::vector<double> q,
                           std::vector<KrausChannel> maps, ChannelKind kind = ChannelKind::general);

    int param_count() const { return static_cast<int>(q_.size()); }
    const std::vector<std::string>& param_labels() const { return labels_; }
    const std::vector<double>& q() const { return q_; }
    const std::vector<KrausChannel>& maps() const { return maps_; }
    const KrausChannel& map(int s) const { return maps_[s]; }
    ChannelKind kind() const { return kind_; }
    int in_dim() const { return maps_.front().in_dim(); }
    int out_dim() const { return maps_.front().out_dim(); }

private:
    std::vector<std::string> labels_;
    std::vector<double> q_;
    std::vector<KrausChannel> maps_;
    ChannelKind kind_;
};

// Distortion table d(s, s_hat) >= 0 with d_max = max entry.
class DistortionFunction {
public:
    // Trivial single-symbol zero-distortion table; placeholder default.
    DistortionFunction() : DistortionFunction({"0"}, {"0"}, {{0.0}}) {}
    DistortionFunction(std::vector<std::string> s_labels, std::vector<std::string> s_hat_labels,
                       std::vector<std::vector<double>> table);
    static DistortionFunction hamming(const std::vector<std::string>& labels);

    int s_count() const { return static_cast<int>(s_labels_.size()); }
    int s_hat_count() const { return static_cast<int>(s_hat_labels_.size()); }
    double operator()(int s, int s_hat) const { return table_[s][s_hat]; }
    double d_max() const { return d_max_; }
    const std::vector<std::string>& s_labels() const { return s_labels_; }
    const std::vector<std::string>& s_hat_labels() const { return s_hat_labels_; }

private:
    std::vector<std::string> s_labels_, s_hat_labels_;
    std::vector<std::vector<double>> table_;
    double d_max_;
};

// Phase-flip switch: N^(0) = id, N^(1) = Z . Z, S ~ Bernoulli(epsilon).
RandomParameterChannel make_dephasing_rpc(double epsilon);

// Pauli switch, q = (1-eps, eps/3, eps/3, eps/3), eps in [0, 3/8].
RandomParameterChannel make_depolarizing_rpc(double epsilon);

// State-reset switch: N^(0) = id, N^(1) replaces the input by |psi><psi|.
RandomParameterChannel make_projection_rpc(double epsilon, const std::vector<cxd>& psi);

// Measurement (q-c) channel family: M^(s)(rho) = sum_y Tr(L^(s)_y rho) |y><y|.
// All POVMs share the outcome alphabet; outputs are diagonal in the
// computational basis of the outcome space.
RandomParameterChannel make_measurement_rpc(const std::vector<double>& q, const std::vector<Povm>& povms);

// Remark 1 reduction: Kraus set { sqrt(q(s)) K_k^(s) } of sum_s q(s) N^(s).
KrausChannel average_channel(const RandomParameterChannel& rpc);

// k-fold product channel: parameter alphabet S^k, q^k, tensor maps.
RandomParameterChannel tensor_power(const RandomParameterChannel& rpc, int k);

// Per-use average distortion on the k-fold parameter alphabet.
DistortionFunction tensor_power(const DistortionFunction& d, int k);

// Virtual channel V^(s) = N^(s) o F^(s) (Shannon-strategy pre-composition).
// Measurement kind survives composition since the outer factor stays q-c.
RandomParameterChannel compose_with_strategies(const RandomParameterChannel& rpc,
                                               const std::vector<KrausChannel>& fs);

}  // namespace qrps::channels
