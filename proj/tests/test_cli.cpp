#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "oracle_helpers.hpp"
#include "qrps/cli_io.hpp"

using namespace qrps;
using qlinalg::ValidationError;

namespace {

std::string bin_path() {
    const char* p = std::getenv("QRPS_BIN");
    REQUIRE_MESSAGE(p != nullptr, "QRPS_BIN must point at the CLI binary");
    return p;
}

std::string work_dir() {
    const char* p = std::getenv("QRPS_WORK");
    return p ? p : ".";
}

int run_cli(const std::string& args) {
    const std::string cmd = bin_path() + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) { return cli::read_file(path); }

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

const char* kDephasingSpec = R"({"kind": "shorthand", "shorthand": {"name": "dephasing", "epsilon": 0.2}})";

const char* kMeasuredSpec = R"({
  "dims": {"in": 2, "out": 2},
  "q": [0.5, 0.5],
  "kind": "measurement",
  "maps": [
    {"kraus": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]},
    {"kraus": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]}
  ]
})";

const char* kScStrategy = R"({
  "mode": "sc",
  "x_size": 2,
  "z_size": 2,
  "p_z_given_xs": [
    [[0.6, 0.4], [0.4, 0.6]],
    [[0.4, 0.6], [0.6, 0.4]]
  ]
})";

}  // namespace

TEST_CASE("channel spec parsing: shorthand, explicit Kraus, and validation errors") {
    auto spec = cli::parse_channel_spec_text(kDephasingSpec);
    auto direct = channels::make_dephasing_rpc(0.2);
    CHECK(spec.rpc.param_count() == 2);
    CHECK(spec.rpc.q()[1] == doctest::Approx(0.2));
    // Same action on a test state.
    Rng rng(1);
    CMat rho = oracle::random_density(2, rng);
    CHECK(qlinalg::apply_channel_raw(channels::average_channel(spec.rpc), rho)
              .max_abs_diff(qlinalg::apply_channel_raw(channels::average_channel(direct), rho)) < 1e-12);
    CHECK(spec.distortion.d_max() == 1.0);  // Hamming attached by default

    // Explicit identity channel.
    const char* identity_spec = R"({
      "dims": {"in": 2, "out": 2},
      "q": [1.0],
      "maps": [{"kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}]
    })";
    auto ident = cli::parse_channel_spec_text(identity_spec);
    CHECK(qlinalg::apply_channel_raw(ident.rpc.map(0), rho).max_abs_diff(rho) < 1e-12);

    // pmf not normalized.
    const char* bad_q = R"({
      "dims": {"in": 2, "out": 2},
      "q": [0.6, 0.5],
      "maps": [{"kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]},
               {"kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}]
    })";
    CHECK_THROWS_WITH_AS(cli::parse_channel_spec_text(bad_q),
                         doctest::Contains("pmf not normalized"), ValidationError);

    // Malformed JSON.
    CHECK_THROWS_AS(cli::parse_channel_spec_text("{nope"), ValidationError);

    // Declared measurement kind must produce diagonal outputs.
    const char* fake_measurement = R"({
      "dims": {"in": 2, "out": 2},
      "q": [1.0],
      "kind": "measurement",
      "maps": [{"kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}]
    })";
    CHECK_THROWS_AS(cli::parse_channel_spec_text(fake_measurement), ValidationError);
}

TEST_CASE("strategy parsing fills documented defaults and echoes them") {
    auto spec = cli::parse_channel_spec_text(kDephasingSpec);
    auto [st, echo] = cli::parse_strategy_text(kScStrategy, spec.rpc);
    CHECK(st.mode == regions::CsiMode::sc);
    CHECK(st.p_x == std::vector<double>{0.5, 0.5});          // default uniform
    CHECK(st.input_states[0][0] == cxd(1.0, 0.0));           // default basis states
    CHECK(echo.find("\"p_x\"") != std::string::npos);        // defaults echoed
    CHECK(echo.find("\"input_states\"") != std::string::npos);
}

TEST_CASE("frontier CSV round-trips at 6-decimal precision") {
    regions::RegionFrontier f;
    f.mode = regions::CsiMode::sc;
    f.k = 1;
    f.seed = 42;
    f.grid = {0.0, 0.25};
    regions::RatePoint a, b;
    a.rate = 0.2780719051;
    b.rate = 0.9151234567;
    b.povm_restricted = true;
    f.points = {a, b};
    const std::string path = work_dir() + "/roundtrip.csv";
    cli::write_frontier_csv(path, f);
    const auto rows = cli::parse_frontier_csv(path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mode == "sc");
    CHECK(rows[0].d == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rows[0].r == doctest::Approx(0.278072).epsilon(1e-9));
    CHECK(rows[1].r == doctest::Approx(0.915123).epsilon(1e-9));
    CHECK(rows[1].povm_restricted);
    CHECK(rows[1].seed == 42);
}

TEST_CASE("sweep command: exit codes, determinism, and monotone output") {
    const std::string spec = work_dir() + "/dephasing.json";
    spit(spec, kDephasingSpec);
    const std::string out1 = work_dir() + "/sw1.csv";
    const std::string out2 = work_dir() + "/sw2.csv";

    const std::string base = "sweep --spec " + spec + " --mode sc --grid 0,0.1,0.5 --seed 7";
    CHECK(run_cli(base + " --starts 6 --cycles 25 --out " + out1) == 0);
    CHECK(run_cli(base + " --starts 6 --cycles 25 --out " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));  // byte-identical for a fixed seed

    const auto rows = cli::parse_frontier_csv(out1);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].r <= rows[1].r);
    CHECK(rows[1].r <= rows[2].r);

    // Validation failure: unreadable spec.
    CHECK(run_cli("sweep --spec /nonexistent.json --out " + out1) == 2);
    // Configuration failure: zero starts.
    CHECK(run_cli(base + " --starts 0 --out " + out1) == 3);
}

TEST_CASE("dpc-curve command reproduces the paper values") {
    const std::string out = work_dir() + "/dpc.csv";
    const std::string svg = work_dir() + "/dpc.svg";
    CHECK(run_cli("dpc-curve --na 2 --ns 2 --ne 0 --eta 0.5 --steps 101 --out " + out + " --svg " + svg) ==
          0);
    std::istringstream in(slurp(out));
    std::string line, first_row, last_row, tmax_row, rmax_row;
    std::getline(in, line);
    CHECK(line == "t,R_DPC");
    while (std::getline(in, line)) {
        if (line.rfind("t_max", 0) == 0)
            tmax_row = line;
        else if (line.rfind("R_max", 0) == 0)
            rmax_row = line;
        else if (first_row.empty())
            first_row = line;
        else
            last_row = line;
    }
    CHECK(first_row == "0.000000,0.754888");
    CHECK(last_row == "1.000000,1.754888");
    CHECK(std::abs(std::stod(tmax_row.substr(6)) - 0.8065) < 5e-4);
    CHECK(std::abs(std::stod(rmax_row.substr(6)) - 1.8750) < 1e-3);
    CHECK(slurp(svg).find("<polyline") != std::string::npos);

    // N_S = 0: every curve value equals the interference-free rate.
    const std::string flat = work_dir() + "/flat.csv";
    CHECK(run_cli("dpc-curve --na 2 --ns 0 --ne 0 --eta 0.5 --steps 11 --out " + flat) == 0);
    std::istringstream fin(slurp(flat));
    std::getline(fin, line);
    double ref = -1.0;
    while (std::getline(fin, line)) {
        if (line.rfind("t_max", 0) == 0 || line.rfind("R_max", 0) == 0) continue;
        const double v = std::stod(line.substr(line.find(',') + 1));
        if (ref < 0.0)
            ref = v;
        else
            CHECK(std::abs(v - ref) < 1e-12);
    }

    CHECK(run_cli("dpc-curve --steps 1 --out " + flat) == 3);
}

TEST_CASE("simulate command: restriction, validation, and determinism") {
    const std::string spec = work_dir() + "/measured.json";
    const std::string quantum_spec = work_dir() + "/quantum.json";
    const std::string strat = work_dir() + "/strategy.json";
    spit(spec, kMeasuredSpec);
    spit(quantum_spec, kDephasingSpec);
    spit(strat, kScStrategy);

    const std::string out1 = work_dir() + "/sim1.json";
    const std::string out2 = work_dir() + "/sim2.json";
    const std::string base = "simulate --spec " + spec + " --strategy " + strat +
                             " --scheme block-markov --n 60 --T 3 --rates 0.05,0.05,0.05 --seed 9";
    CHECK(run_cli(base + " --trials 40 --out " + out1) == 0);
    CHECK(run_cli(base + " --trials 40 --out " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));

    const std::string report = slurp(out1);
    for (const char* field : {"\"error_rate\"", "\"avg_distortion\"", "\"covering_failure_rate\"",
                              "\"seed\"", "\"achieved_rates\"", "\"strategy\""})
        CHECK(report.find(field) != std::string::npos);

    // Non-measurement channel: exit 2 with the restriction named.
    CHECK(run_cli("simulate --spec " + quantum_spec + " --strategy " + strat + " --out " + out1) == 2);
    // Zero trials: validation failure.
    CHECK(run_cli(base + " --trials 0 --out " + out1) == 2);
}
