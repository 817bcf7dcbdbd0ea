// hopdet: planning and simulation for energy-constrained distributed
// detection on a line network. Subcommands: thresholds, allocate, sweep,
// simulate. Exit codes: 0 success, 2 usage/config error, 3 infeasible
// budget (all-zero allocation).

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hopdet/evaluator.hpp"
#include "hopdet/io.hpp"
#include "hopdet/multihop_planner.hpp"
#include "hopdet/network.hpp"
#include "hopdet/parallel_allocator.hpp"
#include "hopdet/rng.hpp"
#include "hopdet/threshold_optimizer.hpp"

namespace {

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

hopdet::ExperimentConfig load_config(const std::string& path) {
    return hopdet::config_from_json(
        hopdet::parse_json_text(hopdet::read_text_file(path), path));
}

hopdet::Network make_network(const hopdet::ExperimentConfig& cfg) {
    if (cfg.network) return *cfg.network;
    if (!cfg.deployment)
        throw hopdet::ConfigError("config: needs \"deployment\" or \"network\"");
    const hopdet::DeploymentSpec& d = *cfg.deployment;
    return hopdet::deploy(d.kind, d.nodes, d.length, d.fusion_offset,
                          hopdet::split_seed(cfg.seed, 0), d.energy_budget);
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::fputs(content.c_str(), stdout);
    else
        hopdet::write_text_file(path, content);
}

void run_thresholds(const hopdet::GaussianHypothesisPair& h, const std::string& metric_name,
                    int max_bits) {
    hopdet::Metric metric = hopdet::metric_from_string(metric_name);
    hopdet::RuleSet rs = hopdet::build_rule_set(h, max_bits, metric);
    std::printf("metric=%s mu0=%g mu1=%g sigma=%g\n", metric_name.c_str(), h.mu0, h.mu1,
                h.sigma);
    std::printf("M  value     thresholds\n");
    for (int m = 1; m <= max_bits; ++m) {
        std::printf("%d  %.6f  [", m, rs.curve.values[m]);
        const std::vector<double>& t = rs.quantizers[m].thresholds;
        for (std::size_t i = 0; i < t.size(); ++i)
            std::printf(i ? ", %.6f" : "%.6f", t[i]);
        std::printf("]\n");
    }
}

void run_allocate(const hopdet::ExperimentConfig& cfg) {
    hopdet::Network net = make_network(cfg);
    hopdet::RuleSet rs = hopdet::build_rule_set(cfg.hypothesis, cfg.max_bits, cfg.metric);
    double battery = cfg.battery ? *cfg.battery : net.share();

    hopdet::json doc;
    doc["config_hash"] = hopdet::config_hash(cfg);
    doc["seed"] = cfg.seed;
    doc["strategy"] = cfg.strategy;
    doc["network"] = hopdet::to_json(net);

    hopdet::Allocation alloc;
    hopdet::EvaluationReport report;
    if (cfg.strategy == "multihop") {
        hopdet::MultihopPlan plan = hopdet::plan_multihop(net, rs.curve, cfg.max_bits);
        alloc = hopdet::allocation_from_plan(plan);
        report = hopdet::evaluate(net, plan, rs.curve, battery);
        doc["plan"] = hopdet::to_json(plan);
    } else {
        hopdet::AllocationResult r =
            cfg.strategy == "parallel-info"
                ? hopdet::allocate_info_max(net, rs.curve, cfg.max_bits)
                : hopdet::allocate_lifetime_max(net, cfg.max_bits);
        alloc = r.allocation;
        report = hopdet::evaluate(net, alloc, rs.curve, battery);
    }
    doc["allocation"] = hopdet::to_json(alloc);
    doc["report"] = hopdet::to_json(report);
    bool infeasible = alloc.total_bits() == 0;
    if (infeasible) doc["infeasible"] = true;
    emit(cfg.output, doc.dump(2) + "\n");
    if (infeasible) throw InfeasibleError("all-zero allocation: budget infeasible");
}

void run_sweep_cmd(const hopdet::ExperimentConfig& cfg) {
    if (!cfg.sweep) throw hopdet::ConfigError("config: sweep command needs a \"sweep\" block");
    if (!cfg.deployment)
        throw hopdet::ConfigError("config: sweep command needs a \"deployment\" block");
    hopdet::SweepSpec spec = *cfg.sweep;
    spec.deploy = cfg.deployment->kind;
    spec.nodes = cfg.deployment->nodes;
    spec.length = cfg.deployment->length;
    spec.fusion_offset = cfg.deployment->fusion_offset;
    spec.max_bits = cfg.max_bits;
    if (spec.kind != hopdet::SweepKind::info_vs_size && spec.energy_grid.empty())
        spec.energy_grid.push_back(cfg.deployment->energy_budget);

    hopdet::RuleSet rs = hopdet::build_rule_set(cfg.hypothesis, cfg.max_bits, cfg.metric);
    std::vector<hopdet::SweepRow> rows = hopdet::run_sweep(spec, rs.curve, cfg.seed);
    emit(cfg.output, hopdet::sweep_rows_to_csv(rows));
    if (!cfg.output.empty()) {
        hopdet::json meta;
        meta["config_hash"] = hopdet::config_hash(cfg);
        meta["seed"] = cfg.seed;
        hopdet::write_text_file(cfg.output + ".meta.json", meta.dump(2) + "\n");
    }
}

void run_simulate(const hopdet::ExperimentConfig& cfg) {
    hopdet::Network net = make_network(cfg);
    hopdet::RuleSet rs = hopdet::build_rule_set(cfg.hypothesis, cfg.max_bits, cfg.metric);

    hopdet::Allocation alloc;
    if (cfg.strategy == "multihop") {
        alloc = hopdet::allocation_from_plan(
            hopdet::plan_multihop(net, rs.curve, cfg.max_bits));
    } else if (cfg.strategy == "parallel-info") {
        alloc = hopdet::allocate_info_max(net, rs.curve, cfg.max_bits).allocation;
    } else {
        alloc = hopdet::allocate_lifetime_max(net, cfg.max_bits).allocation;
    }
    hopdet::DetectionStats stats = hopdet::monte_carlo_detection(
        net, alloc, cfg.hypothesis, rs.quantizers, cfg.trials,
        hopdet::split_seed(cfg.seed, 1));

    hopdet::json doc;
    doc["config_hash"] = hopdet::config_hash(cfg);
    doc["seed"] = cfg.seed;
    doc["strategy"] = cfg.strategy;
    doc["trials"] = cfg.trials;
    doc["network"] = hopdet::to_json(net);
    doc["allocation"] = hopdet::to_json(alloc);
    doc["stats"] = hopdet::to_json(stats);
    emit(cfg.output, doc.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed detection planning on 1-D sensor lines"};
    app.require_subcommand(1);

    auto* th = app.add_subcommand("thresholds", "Print optimized quantizer tables");
    std::string th_metric = "chernoff";
    int th_max_bits = 3;
    hopdet::GaussianHypothesisPair th_h;
    th->add_option("--metric", th_metric, "chernoff or kl")
        ->check(CLI::IsMember({"chernoff", "kl"}));
    th->add_option("--max-bits", th_max_bits, "Largest bit count (1..8)")
        ->check(CLI::Range(1, hopdet::kMaxBits));
    th->add_option("--mu0", th_h.mu0, "Mean under H0");
    th->add_option("--mu1", th_h.mu1, "Mean under H1");
    th->add_option("--sigma", th_h.sigma, "Common standard deviation")
        ->check(CLI::PositiveNumber);

    std::string cfg_path, flag_strategy, flag_output;
    std::uint64_t flag_seed = 0;
    double flag_battery = 0.0;
    std::int64_t flag_trials = 0;

    auto add_common = [&](CLI::App* cmd, bool with_strategy) {
        cmd->add_option("--config", cfg_path, "Config file (JSON)")->required();
        cmd->add_option("--seed", flag_seed, "Root seed override");
        cmd->add_option("--output", flag_output, "Output path override");
        if (with_strategy)
            cmd->add_option("--strategy", flag_strategy, "Allocation strategy override")
                ->check(CLI::IsMember({"multihop", "parallel-info", "parallel-lifetime"}));
    };

    auto* al = app.add_subcommand("allocate", "Allocate bits under an energy budget");
    add_common(al, true);
    al->add_option("--battery", flag_battery, "Per-node battery override")
        ->check(CLI::NonNegativeNumber);

    auto* sw = app.add_subcommand("sweep", "Run a strategy-comparison sweep to CSV");
    add_common(sw, false);

    auto* si = app.add_subcommand("simulate", "Monte Carlo detection error for a strategy");
    add_common(si, true);
    si->add_option("--trials", flag_trials, "Monte Carlo trials override")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (th->parsed()) {
            th_h.validate();
            if (th_h.mu0 == th_h.mu1)
                throw hopdet::ConfigError("mu0 and mu1 must differ");
            run_thresholds(th_h, th_metric, th_max_bits);
            return 0;
        }
        CLI::App* cmd = al->parsed() ? al : sw->parsed() ? sw : si;
        hopdet::ExperimentConfig cfg = load_config(cfg_path);
        if (cmd->count("--seed")) cfg.seed = flag_seed;
        if (cmd->count("--output")) cfg.output = flag_output;
        if (cmd != sw && cmd->count("--strategy")) cfg.strategy = flag_strategy;
        if (cmd == al && al->count("--battery")) cfg.battery = flag_battery;
        if (cmd == si && si->count("--trials")) cfg.trials = flag_trials;
        if (al->parsed())
            run_allocate(cfg);
        else if (sw->parsed())
            run_sweep_cmd(cfg);
        else
            run_simulate(cfg);
        return 0;
    } catch (const InfeasibleError& e) {
        std::cerr << "hopdet: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "hopdet: " << e.what() << "\n";
        return 2;
    }
}
