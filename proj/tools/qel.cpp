// qel: experiment driver. Subcommands: sweep, single, oracle, simulate, regions.
// Exit codes: 0 converged/ok, 2 ran but not converged, 1 error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qel/config.hpp"
#include "qel/oracle.hpp"
#include "qel/simulate.hpp"
#include "qel/sweep.hpp"
#include "qel/util.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    double epsilon = -1.0;
    std::string out;
    std::int64_t seed = -1;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool need_epsilon = false) {
    cmd->add_option("--config", a.config_path, "experiment config (TOML)")->required();
    auto* eps = cmd->add_option("--epsilon", a.epsilon, "override: single epsilon value");
    if (need_epsilon) eps->required();
    cmd->add_option("--out", a.out, "override: output directory");
    cmd->add_option("--seed", a.seed, "override: RNG seed");
    cmd->add_option("--threads", a.threads, "override: assembly threads");
}

qel::ExperimentConfig load(const CommonArgs& a) {
    auto cfg = qel::parse_config_file(a.config_path);
    if (a.epsilon > 0.0) cfg.epsilons = {a.epsilon};
    if (!a.out.empty()) cfg.out_dir = a.out;
    if (a.seed >= 0) cfg.seed = std::uint64_t(a.seed);
    if (a.threads > 0) cfg.threads = a.threads;
    return cfg;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

int cmd_sweep(const CommonArgs& a) {
    auto cfg = load(a);
    auto rep = qel::run_sweep(cfg);
    const auto& last = rep.rows.back();
    std::cout << "lambda=" << qel::fmt_double(last.lambda)
              << " log_lambda=" << qel::fmt_double(last.log_lambda);
    if (rep.reference.available)
        std::cout << " pressure=" << qel::fmt_double(rep.reference.pressure)
                  << " gap=" << qel::fmt_double(rep.final_gap);
    std::cout << " converged=" << (rep.converged ? "yes" : "no") << "\n";
    return rep.converged ? 0 : 2;
}

int cmd_single(const CommonArgs& a) {
    auto cfg = load(a);
    double eps = cfg.epsilons.front();
    auto r = qel::run_single(cfg, eps, cfg.out_dir);
    qel::write_manifest(cfg.out_dir, cfg, r.artifacts, {{"subcommand", "single"}});
    std::cout << "epsilon=" << qel::fmt_double(eps)
              << " lambda=" << qel::fmt_double(r.triple.lambda) << " period=" << r.triple.period
              << " active_cells=" << r.op.cells.size() << "\n";
    return 0;
}

int cmd_oracle(const CommonArgs& a) {
    auto cfg = load(a);
    auto map = qel::make_map(cfg);
    qel::CellPartition part(map.space, cfg.resolution);
    auto ref = qel::build_reference(cfg, part);
    if (!ref.available) {
        std::cerr << "no symbolic oracle for this configuration\n";
        return 1;
    }
    std::filesystem::create_directories(cfg.out_dir);
    nlohmann::json j;
    j["model"] = qel::model_to_json(ref.model);
    j["equilibrium"] = qel::equilibrium_to_json(ref.equilibrium);
    write_json_file(cfg.out_dir + "/oracle.json", j);
    qel::write_manifest(cfg.out_dir, cfg, {"oracle.json"}, {{"subcommand", "oracle"}});
    std::cout << "pressure=" << qel::fmt_double(ref.pressure)
              << " entropy=" << qel::fmt_double(ref.equilibrium.entropy)
              << " states=" << ref.model.states.size() << "\n";
    return 0;
}

int cmd_simulate(const CommonArgs& a) {
    auto cfg = load(a);
    double eps = cfg.epsilons.front();
    auto map = qel::make_map(cfg);
    auto weight = qel::make_weight(cfg, map);
    qel::CellPartition part(map.space, cfg.resolution);
    auto survivors = qel::survivor_cells(map, part, cfg.survivor_depth, cfg.survivor_samples);
    auto initial = qel::uniform_over_cells(part, survivors, cfg.particles, cfg.seed);
    qel::NoiseKernel kernel{eps, map.space.dim()};

    std::filesystem::create_directories(cfg.out_dir);
    qel::SimulateOptions opts;
    opts.record_survival = true;
    opts.trace_csv_path = cfg.out_dir + "/trace.csv";
    auto h = [](const qel::State& x) { return x[0]; };
    auto est = qel::run_conditioned(map, kernel, weight, h, initial, cfg.horizon, cfg.particles,
                                    cfg.seed, opts);

    nlohmann::json j;
    j["h"] = "x";
    j["epsilon"] = eps;
    j["seed"] = cfg.seed;
    j["value"] = est.value;
    j["stderr"] = est.stderr_;
    j["n"] = est.n;
    j["N"] = est.N;
    j["lambda_hat"] = est.lambda_hat;
    j["ess_min"] = est.ess_min;
    j["extinct"] = est.extinct;
    write_json_file(cfg.out_dir + "/conditioned.json", j);
    qel::write_manifest(cfg.out_dir, cfg, {"conditioned.json", "trace.csv"},
                        {{"subcommand", "simulate"}});
    std::cout << "lambda_hat=" << qel::fmt_double(est.lambda_hat)
              << " value=" << qel::fmt_double(est.value)
              << " stderr=" << qel::fmt_double(est.stderr_)
              << " ess_min=" << qel::fmt_double(est.ess_min) << "\n";
    return est.extinct ? 2 : 0;
}

int cmd_regions(const CommonArgs& a) {
    auto cfg = load(a);
    double eps = cfg.epsilons.front();
    auto r = qel::run_single(cfg, eps, cfg.out_dir);
    qel::write_manifest(cfg.out_dir, cfg, r.artifacts, {{"subcommand", "regions"}});
    auto summary = qel::region_summary(r.regions);
    std::cout << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasi-ergodic laboratory for noisy open maps"};
    app.require_subcommand(1);

    CommonArgs a;
    auto* sweep = app.add_subcommand("sweep", "descending-epsilon zero-noise sweep");
    auto* single = app.add_subcommand("single", "one pipeline pass at a fixed epsilon");
    auto* oracle = app.add_subcommand("oracle", "symbolic pressure / equilibrium state");
    auto* simulate = app.add_subcommand("simulate", "weighted-particle conditioned estimate");
    auto* regions = app.add_subcommand("regions", "survivor region decomposition");
    add_common(sweep, a);
    add_common(single, a);
    add_common(oracle, a);
    add_common(simulate, a);
    add_common(regions, a);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) return cmd_sweep(a);
        if (single->parsed()) return cmd_single(a);
        if (oracle->parsed()) return cmd_oracle(a);
        if (simulate->parsed()) return cmd_simulate(a);
        if (regions->parsed()) return cmd_regions(a);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
