// qrps: capacity-distortion tradeoffs of random-parameter quantum channels.
//
// Subcommands: sweep (region frontiers), dpc-curve (bosonic dirty-paper
// rates), simulate (block-Markov / binning Monte Carlo). All commands are
// deterministic for a fixed flag set including --seed.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qrps/bosonic.hpp"
#include "qrps/cli_io.hpp"
#include "qrps/codesim.hpp"
#include "qrps/regions.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitConfig = 3;

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> grid;
    std::string token;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!token.empty()) grid.push_back(std::stod(token));
            token.clear();
        } else {
            token += c;
        }
    }
    return grid;
}

int run_sweep(const std::string& spec_path, const std::string& mode_str, int k, const std::string& grid_csv,
              int starts, int cycles, int x_size, int z_size, uint64_t seed, const std::string& out) {
    if (starts < 1 || cycles < 1) {
        std::fprintf(stderr, "error: optimizer budget misconfigured (starts/cycles must be >= 1)\n");
        return kExitConfig;
    }
    const auto spec = qrps::cli::parse_channel_spec(spec_path);
    const auto mode = qrps::regions::csi_mode_from_string(mode_str);
    const auto grid = parse_grid(grid_csv);

    qrps::regions::OptimizerConfig cfg;
    cfg.starts = starts;
    cfg.max_cycles = cycles;
    cfg.x_size = x_size;
    cfg.z_size = z_size;

    std::fprintf(stderr, "sweep: mode=%s k=%d grid_points=%zu starts=%d seed=%llu\n", mode_str.c_str(), k,
                 grid.size(), starts, static_cast<unsigned long long>(seed));
    const auto frontier = qrps::regions::sweep_region(spec.rpc, spec.distortion, mode, grid, cfg, seed, k);
    for (size_t g = 0; g < grid.size(); ++g)
        std::fprintf(stderr, "sweep: D=%.6f -> R=%.6f\n", grid[g], frontier.points[g].rate);
    qrps::cli::write_frontier_csv(out, frontier);
    std::fprintf(stderr, "sweep: wrote %s\n", out.c_str());
    return 0;
}

int run_dpc_curve(double na, double ns, double ne, double eta, double tmin, double tmax, int steps,
                  const std::string& out, const std::string& svg) {
    if (steps < 2) {
        std::fprintf(stderr, "error: --steps must be >= 2\n");
        return kExitConfig;
    }
    qrps::bosonic::BosonicParams p{na, ns, ne, eta};
    std::vector<qrps::cli::DpcCurveRow> rows;
    for (int i = 0; i < steps; ++i) {
        const double t = tmin + (tmax - tmin) * i / (steps - 1);
        rows.push_back({t, qrps::bosonic::dpc_rate(t, p)});
    }
    const auto opt = qrps::bosonic::optimize_dpc_coefficient(p);
    std::fprintf(stderr, "dpc-curve: t_max=%.6f R_max=%.6f%s\n", opt.t_max, opt.rate,
                 opt.at_boundary ? " (boundary maximizer)" : "");
    qrps::cli::write_dpc_curve_csv(out, rows, opt.t_max, opt.rate);
    if (!svg.empty()) qrps::cli::write_dpc_curve_svg(svg, rows, opt.t_max, opt.rate);
    return 0;
}

int run_simulate(const std::string& spec_path, const std::string& scheme, const std::string& strategy_path,
                 int n, int T, uint64_t trials, const std::string& rates_csv, uint64_t seed,
                 double delta_cover, double delta_decode, const std::string& out) {
    const auto spec = qrps::cli::parse_channel_spec(spec_path);
    if (spec.rpc.kind() != qrps::channels::ChannelKind::measurement) {
        std::fprintf(stderr,
                     "error: coding simulations are restricted to measurement channels "
                     "(single-letter claims hold for that class only)\n");
        return kExitValidation;
    }
    const auto rates_v = parse_grid(rates_csv);
    if (rates_v.size() != 3) {
        std::fprintf(stderr, "error: --rates expects R,Rs,Rst\n");
        return kExitValidation;
    }
    qrps::codesim::RateTriple rates{rates_v[0], rates_v[1], rates_v[2]};
    auto [strategy, echo] = qrps::cli::parse_strategy_file(strategy_path, spec.rpc);

    // Default estimation: the distortion-minimizing POVM family for the
    // strategy's conditional states.
    const auto contexts = qrps::regions::conditional_family(spec.rpc, strategy);
    const bool has_z = strategy.mode == qrps::regions::CsiMode::sc || strategy.mode == qrps::regions::CsiMode::causal;
    const auto est = qrps::regions::optimal_estimation_povm(contexts, spec.distortion, strategy.x_size,
                                                            has_z ? strategy.z_size : 1);

    qrps::codesim::SimControls ctl;
    ctl.delta_cover = delta_cover;
    ctl.delta_decode = delta_decode;

    std::fprintf(stderr, "simulate: scheme=%s n=%d T=%d trials=%llu seed=%llu\n", scheme.c_str(), n, T,
                 static_cast<unsigned long long>(trials), static_cast<unsigned long long>(seed));
    qrps::codesim::SimReport report;
    if (scheme == "block-markov") {
        report = qrps::codesim::simulate_block_markov_sc(spec.rpc, strategy, est.povm, n, T, rates, trials,
                                                         seed, ctl);
    } else if (scheme == "binning") {
        report = qrps::codesim::simulate_binning_nc(spec.rpc, strategy, est.povm, n, rates, trials, seed, ctl);
    } else {
        std::fprintf(stderr, "error: unknown scheme '%s'\n", scheme.c_str());
        return kExitValidation;
    }
    std::fprintf(stderr, "simulate: error_rate=%.4f avg_distortion=%.4f covering_failure_rate=%.4f\n",
                 report.error_rate, report.avg_distortion, report.covering_failure_rate);
    qrps::cli::write_sim_report_json(out, report, scheme, n, T, rates, ctl, echo);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capacity-distortion analysis for random-parameter quantum channels"};
    app.require_subcommand(1);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "optimize a capacity-distortion frontier");
    std::string spec_path, mode_str = "none", grid_csv = "0", out_path = "frontier.csv";
    int k = 1, starts = 32, cycles = 60, x_size = 0, z_size = 0;
    uint64_t seed = 1;
    sweep->add_option("--spec", spec_path, "channel spec JSON")->required();
    sweep->add_option("--mode", mode_str, "CSI mode: sc|causal|nc|none");
    sweep->add_option("--k", k, "product-channel order (1 or 2)");
    sweep->add_option("--grid", grid_csv, "comma-separated distortion targets, ascending");
    sweep->add_option("--starts", starts, "multi-start count");
    sweep->add_option("--cycles", cycles, "coordinate-ascent cycles per start");
    sweep->add_option("--xsize", x_size, "input ensemble size (0 = auto)");
    sweep->add_option("--zsize", z_size, "auxiliary Z alphabet size (0 = auto)");
    sweep->add_option("--seed", seed, "RNG seed");
    sweep->add_option("--out", out_path, "output CSV path");

    // dpc-curve
    auto* dpc = app.add_subcommand("dpc-curve", "bosonic dirty-paper rate curve");
    double na = 2.0, nsp = 2.0, ne = 0.0, eta = 0.5, tmin = 0.0, tmax = 1.0;
    int steps = 101;
    std::string dpc_out = "dpc.csv", svg_path;
    dpc->add_option("--na", na, "mean input photon number N_A");
    dpc->add_option("--ns", nsp, "interference photon number N_S");
    dpc->add_option("--ne", ne, "environment photon number N_E");
    dpc->add_option("--eta", eta, "transmissivity");
    dpc->add_option("--tmin", tmin, "curve start");
    dpc->add_option("--tmax", tmax, "curve end");
    dpc->add_option("--steps", steps, "curve sample count");
    dpc->add_option("--out", dpc_out, "output CSV path");
    dpc->add_option("--svg", svg_path, "optional SVG plot path");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo coding simulation");
    std::string scheme = "block-markov", strategy_path, sim_out = "report.json", rates_csv = "0.05,0.05,0.05";
    int n = 100, T = 4;
    uint64_t trials = 100, sim_seed = 1;
    double delta_cover = 0.04, delta_decode = 0.10;
    sim->add_option("--spec", spec_path, "channel spec JSON (measurement kind)")->required();
    sim->add_option("--scheme", scheme, "block-markov | binning");
    sim->add_option("--strategy", strategy_path, "strategy JSON")->required();
    sim->add_option("--n", n, "blocklength");
    sim->add_option("--T", T, "transmission blocks (block-markov)");
    sim->add_option("--trials", trials, "Monte-Carlo trials");
    sim->add_option("--rates", rates_csv, "R,Rs,Rst");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--delta-cover", delta_cover, "covering typicality slack");
    sim->add_option("--delta-decode", delta_decode, "decoding typicality slack");
    sim->add_option("--out", sim_out, "output JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed())
            return run_sweep(spec_path, mode_str, k, grid_csv, starts, cycles, x_size, z_size, seed, out_path);
        if (dpc->parsed()) return run_dpc_curve(na, nsp, ne, eta, tmin, tmax, steps, dpc_out, svg_path);
        if (sim->parsed()) {
            if (trials == 0) {
                std::fprintf(stderr, "error: --trials must be positive\n");
                return kExitValidation;
            }
            return run_simulate(spec_path, scheme, strategy_path, n, T, trials, rates_csv, sim_seed,
                                delta_cover, delta_decode, sim_out);
        }
    } catch (const qrps::qlinalg::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const qrps::qlinalg::DimensionError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return 0;
}
