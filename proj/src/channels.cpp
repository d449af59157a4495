#include "qrps/channels.hpp"

#include <cmath>

namespace qrps::channels {

using qlinalg::DimensionError;
using qlinalg::kStructuralTol;
using qlinalg::ValidationError;

namespace {

const CMat kPauliI = CMat::identity(2);
const CMat kPauliX(2, 2, {0.0, 1.0, 1.0, 0.0});
const CMat kPauliY(2, 2, {0.0, cxd(0.0, -1.0), cxd(0.0, 1.0), 0.0});
const CMat kPauliZ(2, 2, {1.0, 0.0, 0.0, -1.0});

}  // namespace

RandomParameterChannel::RandomParameterChannel(std::vector<std::string> param_labels,
                                               std::vector<double> q, std::vector<KrausChannel> maps,
                                               ChannelKind kind)
    : labels_(std::move(param_labels)), q_(std::move(q)), maps_(std::move(maps)), kind_(kind) {
    if (q_.empty() || q_.size() != maps_.size() || q_.size() != labels_.size())
        throw ValidationError("RandomParameterChannel: inconsistent component counts");
    double tot = 0.0;
    for (double p : q_) {
        if (p < -kStructuralTol) throw ValidationError("RandomParameterChannel: negative weight");
        tot += p;
    }
    if (std::abs(tot - 1.0) > kStructuralTol)
        throw ValidationError("RandomParameterChannel: pmf not normalized");
    for (const auto& m : maps_)
        if (m.in_dim() != maps_.front().in_dim() || m.out_dim() != maps_.front().out_dim())
            throw DimensionError("RandomParameterChannel: maps disagree on dimensions");
}

DistortionFunction::DistortionFunction(std::vector<std::string> s_labels,
                                       std::vector<std::string> s_hat_labels,
                                       std::vector<std::vector<double>> table)
    : s_labels_(std::move(s_labels)), s_hat_labels_(std::move(s_hat_labels)), table_(std::move(table)) {
    if (table_.size() != s_labels_.size()) throw ValidationError("DistortionFunction: row count mismatch");
    d_max_ = 0.0;
    for (const auto& row : table_) {
        if (row.size() != s_hat_labels_.size())
            throw ValidationError("DistortionFunction: column count mismatch");
        for (double v : row) {
            if (v < 0.0) throw ValidationError("DistortionFunction: negative entry");
            d_max_ = std::max(d_max_, v);
        }
    }
}

DistortionFunction DistortionFunction::hamming(const std::vector<std::string>& labels) {
    std::vector<std::vector<double>> t(labels.size(), std::vector<double>(labels.size(), 1.0));
    for (size_t i = 0; i < labels.size(); ++i) t[i][i] = 0.0;
    return DistortionFunction(labels, labels, std::move(t));
}

RandomParameterChannel make_dephasing_rpc(double epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) throw ValidationError("dephasing: epsilon out of [0,1]");
    std::vector<KrausChannel> maps;
    maps.push_back(KrausChannel::identity(2));
    maps.push_back(KrausChannel::unitary(kPauliZ));
    return RandomParameterChannel({"0", "1"}, {1.0 - epsilon, epsilon}, std::move(maps));
}

RandomParameterChannel make_depolarizing_rpc(double epsilon) {
    if (epsilon < 0.0 || epsilon > 3.0 / 8.0)
        throw ValidationError("depolarizing: epsilon out of [0, 3/8]");
    std::vector<KrausChannel> maps;
    maps.push_back(KrausChannel::identity(2));
    maps.push_back(KrausChannel::unitary(kPauliX));
    maps.push_back(KrausChannel::unitary(kPauliY));
    maps.push_back(KrausChannel::unitary(kPauliZ));
    const double e3 = epsilon / 3.0;
    return RandomParameterChannel({"0", "1", "2", "3"}, {1.0 - epsilon, e3, e3, e3}, std::move(maps));
}

RandomParameterChannel make_projection_rpc(double epsilon, const std::vector<cxd>& psi) {
    if (epsilon < 0.0 || epsilon > 1.0) throw ValidationError("projection: epsilon out of [0,1]");
    double n2 = 0.0;
    for (const auto& a : psi) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > 1e-9) throw ValidationError("projection: psi not normalized");
    // Constant map rho -> |psi><psi| via Kraus { |psi><0|, |psi><1| }.
    std::vector<CMat> ops;
    for (int b = 0; b < 2; ++b) {
        std::vector<cxd> basis(2, 0.0);
        basis[b] = 1.0;
        ops.push_back(CMat::outer(psi, basis));
    }
    std::vector<KrausChannel> maps;
    maps.push_back(KrausChannel::identity(2));
    maps.emplace_back(2, 2, std::move(ops));
    return RandomParameterChannel({"0", "1"}, {1.0 - epsilon, epsilon}, std::move(maps));
}

RandomParameterChannel make_measurement_rpc(const std::vector<double>& q, const std::vector<Povm>& povms) {
    if (povms.empty() || povms.size() != q.size())
        throw ValidationError("measurement rpc: component count mismatch");
    const size_t n_out = povms.front().outcomes().size();
    const int in_dim = povms.front().dim();
    const int out_dim = static_cast<int>(n_out);
    std::vector<std::string> labels;
    std::vector<KrausChannel> maps;
    for (const auto& povm : povms) {
        if (povm.outcomes().size() != n_out || povm.dim() != in_dim)
            throw ValidationError("measurement rpc: POVMs disagree on outcome alphabet or dimension");
        // M(rho) = sum_y Tr(L_y rho) |y><y|; Kraus set { |y><e_i| sqrt(L_y) row i }.
        std::vector<CMat> ops;
        for (size_t y = 0; y < n_out; ++y) {
            CMat root = hermitian_function(povm.outcomes()[y].op, [](double v) {
                return v > 0.0 ? std::sqrt(v) : 0.0;
            });
            for (int i = 0; i < in_dim; ++i) {
                CMat k(out_dim, in_dim);
                for (int j = 0; j < in_dim; ++j) k(static_cast<int>(y), j) = root(i, j);
                ops.push_back(std::move(k));
            }
        }
        maps.emplace_back(in_dim, out_dim, std::move(ops));
    }
    for (size_t s = 0; s < q.size(); ++s) labels.push_back(std::to_string(s));
    return RandomParameterChannel(std::move(labels), q, std::move(maps), ChannelKind::measurement);
}

KrausChannel average_channel(const RandomParameterChannel& rpc) {
    std::vector<CMat> ops;
    for (int s = 0; s < rpc.param_count(); ++s) {
        const double w = std::sqrt(rpc.q()[s]);
        if (w == 0.0) continue;
        for (const auto& k : rpc.map(s).kraus()) ops.push_back(k * w);
    }
    return KrausChannel(rpc.in_dim(), rpc.out_dim(), std::move(ops));
}

RandomParameterChannel tensor_power(const RandomParameterChannel& rpc, int k) {
    if (k < 1) throw ValidationError("tensor_power: k must be >= 1");
    if (k == 1) return rpc;
    RandomParameterChannel acc = rpc;
    for (int i = 1; i < k; ++i) {
        std::vector<std::string> labels;
        std::vector<double> q;
        std::vector<KrausChannel> maps;
        for (int a = 0; a < acc.param_count(); ++a) {
            for (int b = 0; b < rpc.param_count(); ++b) {
                labels.push_back(acc.param_labels()[a] + "," + rpc.param_labels()[b]);
                q.push_back(acc.q()[a] * rpc.q()[b]);
                maps.push_back(acc.map(a).tensor(rpc.map(b)));
            }
        }
        acc = RandomParameterChannel(std::move(labels), std::move(q), std::move(maps), rpc.kind());
    }
    return acc;
}

DistortionFunction tensor_power(const DistortionFunction& d, int k) {
    if (k < 1) throw ValidationError("tensor_power: k must be >= 1");
    if (k == 1) return d;
    DistortionFunction acc = d;
    for (int i = 1; i < k; ++i) {
        const double wa = static_cast<double>(i) / (i + 1);
        const double wb = 1.0 / (i + 1);
        std::vector<std::string> sl, shl;
        for (const auto& a : acc.s_labels())
            for (const auto& b : d.s_labels()) sl.push_back(a + "," + b);
        for (const auto& a : acc.s_hat_labels())
            for (const auto& b : d.s_hat_labels()) shl.push_back(a + "," + b);
        std::vector<std::vector<double>> t(sl.size(), std::vector<double>(shl.size(), 0.0));
        for (int sa = 0; sa < acc.s_count(); ++sa)
            for (int sb = 0; sb < d.s_count(); ++sb)
                for (int ha = 0; ha < acc.s_hat_count(); ++ha)
                    for (int hb = 0; hb < d.s_hat_count(); ++hb)
                        t[sa * d.s_count() + sb][ha * d.s_hat_count() + hb] =
                            wa * acc(sa, ha) + wb * d(sb, hb);
        acc = DistortionFunction(std::move(sl), std::move(shl), std::move(t));
    }
    return acc;
}

RandomParameterChannel compose_with_strategies(const RandomParameterChannel& rpc,
                                               const std::vector<KrausChannel>& fs) {
    if (static_cast<int>(fs.size()) != rpc.param_count())
        throw ValidationError("compose_with_strategies: one F per parameter required");
    std::vector<KrausChannel> maps;
    for (int s = 0; s < rpc.param_count(); ++s) maps.push_back(rpc.map(s).compose_after(fs[s]));
    return RandomParameterChannel(rpc.param_labels(), rpc.q(), std::move(maps), rpc.kind());
}

}  // namespace qrps::channels
