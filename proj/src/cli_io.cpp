#include "qrps/cli_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qrps::cli {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using channels::ChannelKind;
using qlinalg::KrausChannel;
using qlinalg::ValidationError;
using regions::CsiMode;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot move output into place: " + path);
}

namespace {

cxd parse_complex(const json& j, const char* where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError(std::string("expected [re, im] pair in ") + where);
    return cxd(j[0].get<double>(), j[1].get<double>());
}

CMat parse_matrix(const json& j, const char* where) {
    if (!j.is_array() || j.empty()) throw ValidationError(std::string("expected matrix rows in ") + where);
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    CMat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j[r].size()) != cols)
            throw ValidationError(std::string("ragged matrix in ") + where);
        for (int c = 0; c < cols; ++c) m(r, c) = parse_complex(j[r][c], where);
    }
    return m;
}

std::vector<cxd> parse_state_vector(const json& j, const char* where) {
    if (!j.is_array() || j.empty()) throw ValidationError(std::string("expected state vector in ") + where);
    std::vector<cxd> v;
    for (const auto& e : j) v.push_back(parse_complex(e, where));
    return v;
}

DistortionFunction parse_distortion(const json& j, int s_count) {
    if (!j.contains("s_hat") || !j.contains("table"))
        throw ValidationError("distortion: fields 's_hat' and 'table' required");
    std::vector<std::string> s_hat;
    for (const auto& l : j.at("s_hat")) s_hat.push_back(l.is_string() ? l.get<std::string>() : l.dump());
    std::vector<std::vector<double>> table;
    for (const auto& row : j.at("table")) table.push_back(row.get<std::vector<double>>());
    if (static_cast<int>(table.size()) != s_count)
        throw ValidationError("distortion: table rows must match the parameter alphabet");
    std::vector<std::string> s_labels;
    for (int s = 0; s < s_count; ++s) s_labels.push_back(std::to_string(s));
    return DistortionFunction(std::move(s_labels), std::move(s_hat), std::move(table));
}

// Every map of a measurement-kind channel must send all basis operators
// |i><j| to diagonal outputs.
void verify_measurement_kind(const std::vector<KrausChannel>& maps) {
    for (const auto& map : maps) {
        const int d = map.in_dim();
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                CMat eij(d, d);
                eij(i, j) = 1.0;
                CMat out(map.out_dim(), map.out_dim());
                for (const auto& k : map.kraus()) out += k * eij * k.adjoint();
                for (int a = 0; a < map.out_dim(); ++a)
                    for (int b = 0; b < map.out_dim(); ++b)
                        if (a != b && std::abs(out(a, b)) > 1e-9)
                            throw ValidationError(
                                "channel spec: kind 'measurement' but a map output is not diagonal "
                                "in the declared basis");
            }
        }
    }
}

}  // namespace

ChannelSpec parse_channel_spec_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("channel spec: malformed JSON: ") + e.what());
    }

    const std::string kind = j.value("kind", "general");
    const bool has_maps = j.contains("maps");
    const bool has_short = j.contains("shorthand");
    if (has_maps && has_short)
        throw ValidationError("channel spec: 'maps' and 'shorthand' are mutually exclusive");

    if (kind == "shorthand" || has_short) {
        if (!has_short) throw ValidationError("channel spec: kind 'shorthand' without a 'shorthand' object");
        const json& sh = j.at("shorthand");
        const std::string name = sh.value("name", "");
        const double eps = sh.value("epsilon", -1.0);
        RandomParameterChannel rpc = [&]() {
            if (name == "dephasing") return channels::make_dephasing_rpc(eps);
            if (name == "depolarizing") return channels::make_depolarizing_rpc(eps);
            if (name == "projection") {
                std::vector<cxd> psi = {1.0, 0.0};
                if (sh.contains("psi")) psi = parse_state_vector(sh.at("psi"), "shorthand.psi");
                return channels::make_projection_rpc(eps, psi);
            }
            throw ValidationError("channel spec: unknown shorthand '" + name + "'");
        }();
        DistortionFunction dist = j.contains("distortion")
                                      ? parse_distortion(j.at("distortion"), rpc.param_count())
                                      : DistortionFunction::hamming(rpc.param_labels());
        return {std::move(rpc), std::move(dist)};
    }

    if (!has_maps) throw ValidationError("channel spec: field 'maps' required");
    if (!j.contains("q")) throw ValidationError("channel spec: field 'q' required");
    if (!j.contains("dims")) throw ValidationError("channel spec: field 'dims' required");
    const int in_dim = j.at("dims").value("in", 0);
    const int out_dim = j.at("dims").value("out", 0);
    if (in_dim <= 0 || out_dim <= 0) throw ValidationError("channel spec: dims.in/dims.out must be positive");

    std::vector<double> q = j.at("q").get<std::vector<double>>();
    {
        double tot = 0.0;
        for (double p : q) tot += p;
        if (std::abs(tot - 1.0) > qlinalg::kStructuralTol)
            throw ValidationError("channel spec: pmf not normalized");
    }

    std::vector<KrausChannel> maps;
    for (const auto& m : j.at("maps")) {
        if (!m.contains("kraus")) throw ValidationError("channel spec: map without 'kraus' list");
        std::vector<CMat> ops;
        for (const auto& op : m.at("kraus")) {
            CMat k = parse_matrix(op, "maps.kraus");
            if (k.rows() != out_dim || k.cols() != in_dim)
                throw ValidationError("channel spec: Kraus operator shape disagrees with dims");
            ops.push_back(std::move(k));
        }
        maps.emplace_back(in_dim, out_dim, std::move(ops));
    }
    if (maps.size() != q.size()) throw ValidationError("channel spec: one map per parameter required");

    ChannelKind ckind = ChannelKind::general;
    if (kind == "measurement") {
        verify_measurement_kind(maps);
        ckind = ChannelKind::measurement;
    } else if (kind != "general") {
        throw ValidationError("channel spec: unknown kind '" + kind + "'");
    }

    std::vector<std::string> labels;
    for (size_t s = 0; s < q.size(); ++s) labels.push_back(std::to_string(s));
    RandomParameterChannel rpc(std::move(labels), std::move(q), std::move(maps), ckind);
    DistortionFunction dist = j.contains("distortion")
                                  ? parse_distortion(j.at("distortion"), rpc.param_count())
                                  : DistortionFunction::hamming(rpc.param_labels());
    return {std::move(rpc), std::move(dist)};
}

ChannelSpec parse_channel_spec(const std::string& path) {
    return parse_channel_spec_text(read_file(path));
}

std::pair<Strategy, std::string> parse_strategy_text(const std::string& text,
                                                     const RandomParameterChannel& rpc) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("strategy: malformed JSON: ") + e.what());
    }
    Strategy st;
    st.mode = regions::csi_mode_from_string(j.value("mode", "none"));
    st.x_size = j.value("x_size", rpc.in_dim());
    st.z_size = j.value("z_size", 1);
    const int ns = rpc.param_count();

    if (j.contains("p_x")) {
        st.p_x = j.at("p_x").get<std::vector<double>>();
    } else if (st.mode != CsiMode::nc) {
        st.p_x.assign(st.x_size, 1.0 / st.x_size);
    }
    if (j.contains("p_x_given_s")) {
        for (const auto& row : j.at("p_x_given_s")) st.p_x_given_s.push_back(row.get<std::vector<double>>());
    } else if (st.mode == CsiMode::nc) {
        st.p_x_given_s.assign(ns, std::vector<double>(st.x_size, 1.0 / st.x_size));
    }
    if (j.contains("p_z_given_xs")) {
        for (const auto& per_x : j.at("p_z_given_xs")) {
            std::vector<std::vector<double>> rows;
            for (const auto& row : per_x) rows.push_back(row.get<std::vector<double>>());
            st.p_z_given_xs.push_back(std::move(rows));
        }
    } else if (st.mode == CsiMode::sc || st.mode == CsiMode::causal) {
        st.p_z_given_xs.assign(
            st.x_size, std::vector<std::vector<double>>(ns, std::vector<double>(st.z_size, 1.0 / st.z_size)));
    }
    if (j.contains("input_states")) {
        for (const auto& v : j.at("input_states"))
            st.input_states.push_back(parse_state_vector(v, "input_states"));
    } else {
        const int dim = rpc.in_dim();
        for (int x = 0; x < st.x_size; ++x) {
            std::vector<cxd> e(dim, 0.0);
            e[x % dim] = 1.0;
            st.input_states.push_back(std::move(e));
        }
    }
    if (j.contains("shannon_strategies")) {
        for (const auto& f : j.at("shannon_strategies")) {
            std::vector<CMat> ops;
            for (const auto& op : f.at("kraus")) ops.push_back(parse_matrix(op, "shannon_strategies.kraus"));
            st.shannon_strategies.emplace_back(ops.front().cols(), ops.front().rows(), std::move(ops));
        }
    }
    st.validate(rpc);

    // Echo with every default filled in.
    ordered_json echo;
    echo["mode"] = regions::to_string(st.mode);
    echo["x_size"] = st.x_size;
    echo["z_size"] = st.z_size;
    if (!st.p_x.empty()) echo["p_x"] = st.p_x;
    if (!st.p_x_given_s.empty()) echo["p_x_given_s"] = st.p_x_given_s;
    if (!st.p_z_given_xs.empty()) echo["p_z_given_xs"] = st.p_z_given_xs;
    {
        json states = json::array();
        for (const auto& psi : st.input_states) {
            json v = json::array();
            for (const auto& a : psi) v.push_back({a.real(), a.imag()});
            states.push_back(v);
        }
        echo["input_states"] = states;
    }
    if (!st.shannon_strategies.empty()) {
        json fs = json::array();
        for (const auto& f : st.shannon_strategies) {
            json ops = json::array();
            for (const auto& k : f.kraus()) {
                json rows = json::array();
                for (int r = 0; r < k.rows(); ++r) {
                    json row = json::array();
                    for (int c = 0; c < k.cols(); ++c) row.push_back({k(r, c).real(), k(r, c).imag()});
                    rows.push_back(row);
                }
                ops.push_back(rows);
            }
            fs.push_back({{"kraus", ops}});
        }
        echo["shannon_strategies"] = fs;
    }
    return {std::move(st), echo.dump()};
}

std::pair<Strategy, std::string> parse_strategy_file(const std::string& path,
                                                     const RandomParameterChannel& rpc) {
    return parse_strategy_text(read_file(path), rpc);
}

void write_frontier_csv(const std::string& path, const RegionFrontier& frontier) {
    std::string out = "mode,k,D,R,clamped,povm_restricted,seed\n";
    char buf[160];
    for (size_t g = 0; g < frontier.grid.size(); ++g) {
        const auto& pt = frontier.points[g];
        std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f,%d,%d,%" PRIu64 "\n",
                      regions::to_string(frontier.mode).c_str(), frontier.k, frontier.grid[g], pt.rate,
                      pt.rate_clamped ? 1 : 0, pt.povm_restricted ? 1 : 0, frontier.seed);
        out += buf;
    }
    atomic_write_file(path, out);
}

std::vector<FrontierCsvRow> parse_frontier_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "mode,k,D,R,clamped,povm_restricted,seed")
        throw ValidationError("frontier csv: bad header");
    std::vector<FrontierCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        FrontierCsvRow r;
        char mode[16];
        int clamped = 0, restricted = 0;
        if (std::sscanf(line.c_str(), "%15[^,],%d,%lf,%lf,%d,%d,%" SCNu64, mode, &r.k, &r.d, &r.r,
                        &clamped, &restricted, &r.seed) != 7)
            throw ValidationError("frontier csv: bad row: " + line);
        r.mode = mode;
        r.clamped = clamped != 0;
        r.povm_restricted = restricted != 0;
        rows.push_back(r);
    }
    return rows;
}

void write_dpc_curve_csv(const std::string& path, const std::vector<DpcCurveRow>& rows, double t_max,
                         double r_max) {
    std::string out = "t,R_DPC\n";
    char buf[96];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", row.t, row.rate);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "t_max,%.6f\nR_max,%.6f\n", t_max, r_max);
    out += buf;
    atomic_write_file(path, out);
}

void write_dpc_curve_svg(const std::string& path, const std::vector<DpcCurveRow>& rows, double t_max,
                         double r_max) {
    const double w = 640.0, h = 400.0, margin = 48.0;
    double t_lo = rows.front().t, t_hi = rows.back().t;
    double r_lo = rows.front().rate, r_hi = rows.front().rate;
    for (const auto& r : rows) {
        r_lo = std::min(r_lo, r.rate);
        r_hi = std::max(r_hi, r.rate);
    }
    if (t_hi <= t_lo) t_hi = t_lo + 1.0;
    if (r_hi <= r_lo) r_hi = r_lo + 1.0;
    auto sx = [&](double t) { return margin + (t - t_lo) / (t_hi - t_lo) * (w - 2 * margin); };
    auto sy = [&](double r) { return h - margin - (r - r_lo) / (r_hi - r_lo) * (h - 2 * margin); };

    std::ostringstream svg;
    char buf[96];
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
           "viewBox=\"0 0 640 400\">\n";
    std::snprintf(buf, sizeof(buf), "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" ", margin,
                  h - margin, w - margin, h - margin);
    svg << buf << "stroke=\"black\"/>\n";
    std::snprintf(buf, sizeof(buf), "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" ", margin,
                  margin, margin, h - margin);
    svg << buf << "stroke=\"black\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(r.t), sy(r.rate));
        svg << buf;
    }
    svg << "\"/>\n";
    std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"#d62728\"/>\n",
                  sx(t_max), sy(r_max));
    svg << buf;
    std::snprintf(buf, sizeof(buf), "<!-- t_max=%.6f R_max=%.6f -->\n", t_max, r_max);
    svg << buf;
    svg << "</svg>\n";
    atomic_write_file(path, svg.str());
}

void write_sim_report_json(const std::string& path, const SimReport& report, const std::string& scheme,
                           int n, int T, const codesim::RateTriple& rates, const codesim::SimControls& ctl,
                           const std::string& strategy_echo) {
    ordered_json j;
    j["scheme"] = scheme;
    j["n"] = n;
    if (scheme == "block-markov") j["T"] = T;
    j["trials"] = report.trials;
    j["seed"] = report.seed;
    j["rates"] = {{"R", rates.r}, {"Rs", rates.r_s}, {"Rst", rates.r_st}};
    j["achieved_rates"] = {{"R", report.achieved.r}, {"Rs", report.achieved.r_s}, {"Rst", report.achieved.r_st}};
    j["delta_cover"] = ctl.delta_cover;
    j["delta_decode"] = ctl.delta_decode;
    j["error_rate"] = report.error_rate;
    j["avg_distortion"] = report.avg_distortion;
    j["covering_failure_rate"] = report.covering_failure_rate;
    j["strategy"] = json::parse(strategy_echo);
    atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace qrps::cli
