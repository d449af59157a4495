#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qrps/channels.hpp"
#include "qrps/codesim.hpp"
#include "qrps/regions.hpp"

namespace qrps::cli {

using channels::DistortionFunction;
using channels::RandomParameterChannel;
using codesim::SimReport;
using regions::RegionFrontier;
using regions::Strategy;

struct ChannelSpec {
    RandomParameterChannel rpc;
    DistortionFunction distortion;
};

// JSON channel-spec ingestion; shorthand entries expand through the
// channels constructors, explicit Kraus lists are validated field by field.
ChannelSpec parse_channel_spec(const std::string& path);
ChannelSpec parse_channel_spec_text(const std::string& text);

// Strategy file; omitted fields take documented defaults (uniform p_X,
// computational-basis states). Returns the strategy plus its full echo
// (defaults filled in) for report reproducibility.
std::pair<Strategy, std::string> parse_strategy_file(const std::string& path,
                                                     const RandomParameterChannel& rpc);
std::pair<Strategy, std::string> parse_strategy_text(const std::string& text,
                                                     const RandomParameterChannel& rpc);

// FrontierCsv: header "mode,k,D,R,clamped,povm_restricted,seed", floats at
// 6 decimals, rows ascending in D. Written atomically (temp + rename).
void write_frontier_csv(const std::string& path, const RegionFrontier& frontier);

struct FrontierCsvRow {
    std::string mode;
    int k = 1;
    double d = 0.0;
    double r = 0.0;
    bool clamped = false;
    bool povm_restricted = false;
    uint64_t seed = 0;
};
std::vector<FrontierCsvRow> parse_frontier_csv(const std::string& path);

struct DpcCurveRow {
    double t = 0.0;
    double rate = 0.0;
};
// CSV rows "t,R_DPC" plus a trailing summary row "t_max,R_max".
void write_dpc_curve_csv(const std::string& path, const std::vector<DpcCurveRow>& rows, double t_max,
                         double r_max);
// Single-polyline SVG of the curve with the maximizer marked.
void write_dpc_curve_svg(const std::string& path, const std::vector<DpcCurveRow>& rows, double t_max,
                         double r_max);

// SimReport JSON with the full invocation echoed for reproducibility.
void write_sim_report_json(const std::string& path, const SimReport& report, const std::string& scheme,
                           int n, int T, const codesim::RateTriple& rates, const codesim::SimControls& ctl,
                           const std::string& strategy_echo);

void atomic_write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace qrps::cli
