#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "detection_math.hpp"
#include "multihop_planner.hpp"
#include "network.hpp"
#include "parallel_allocator.hpp"
#include "rng.hpp"
#include "threshold_optimizer.hpp"

namespace hopdet {

inline constexpr std::int64_t kInfiniteRounds = std::numeric_limits<std::int64_t>::max();

struct EvaluationReport {
    double fusion_info = 0.0;
    double total_energy = 0.0;
    std::int64_t lifetime_rounds = kInfiniteRounds;
    std::map<int, double> per_node_energy;
};

/// Information delivered to the fusion node: the curve value of each node's
/// own bits, summed. Relaying moves payloads but not their content, so the
/// multihop overload scores own bits the same way.
inline double fusion_information(const Allocation& alloc, const InfoCurve& curve) {
    double sum = 0.0;
    for (const auto& [id, m] : alloc.bits) {
        if (m < 0 || m > curve.max_bits())
            throw std::invalid_argument("fusion_information: bits outside curve range");
        sum += curve.values[m];
    }
    return sum;
}

inline double fusion_information(const MultihopPlan& plan, const InfoCurve& curve) {
    return fusion_information(allocation_from_plan(plan), curve);
}

inline std::map<int, double> per_node_energy(const Network& net, const Allocation& alloc) {
    std::map<int, double> out;
    for (const auto& [id, m] : alloc.bits)
        out[id] = transmit_energy(m, net.distance_of(id));
    return out;
}

/// Rounds until the first transmitting node drains its battery. Nodes that
/// spend nothing never drain; a plan with no spenders lasts forever
/// (kInfiniteRounds).
inline std::int64_t network_lifetime(const std::map<int, double>& energy, double battery) {
    if (!(battery >= 0.0) || !std::isfinite(battery))
        throw std::invalid_argument("network_lifetime: battery must be finite and >= 0");
    std::int64_t rounds = kInfiniteRounds;
    for (const auto& [id, e] : energy) {
        if (e <= 0.0) continue;
        double r = std::floor(battery / e);
        std::int64_t ri = r >= static_cast<double>(kInfiniteRounds)
                              ? kInfiniteRounds
                              : static_cast<std::int64_t>(r);
        rounds = std::min(rounds, ri);
    }
    return rounds;
}

/// Information lost when the given nodes fail. Parallel links lose exactly
/// the failed nodes' contributions. In a relay chain a dead node also cuts
/// off everything upstream of it (earlier chain positions), whose payloads
/// can no longer reach the fusion node.
inline double failure_impact(const Allocation& alloc, const InfoCurve& curve,
                             const std::vector<int>& failed) {
    double lost = 0.0;
    for (int id : failed) {
        auto it = alloc.bits.find(id);
        if (it == alloc.bits.end())
            throw std::invalid_argument("failure_impact: unknown node id");
        lost += curve.values[it->second];
    }
    return lost;
}

inline double failure_impact(const MultihopPlan& plan, const InfoCurve& curve,
                             const std::vector<int>& failed) {
    std::set<int> dead(failed.begin(), failed.end());
    std::size_t seen = 0;
    double lost = 0.0;
    for (const Group& g : plan.groups) {
        std::size_t cutoff = 0;  // positions strictly below this are lost
        for (std::size_t j = 0; j < g.chain.size(); ++j)
            if (dead.count(g.chain[j])) {
                cutoff = j + 1;
                ++seen;
            }
        for (std::size_t j = 0; j < cutoff; ++j) lost += curve.values[g.bits[j]];
    }
    if (seen != dead.size()) throw std::invalid_argument("failure_impact: unknown node id");
    return lost;
}

inline EvaluationReport evaluate(const Network& net, const Allocation& alloc,
                                 const InfoCurve& curve, double battery) {
    EvaluationReport rep;
    rep.fusion_info = fusion_information(alloc, curve);
    rep.per_node_energy = per_node_energy(net, alloc);
    rep.total_energy = energy_of(net, alloc);
    rep.lifetime_rounds = network_lifetime(rep.per_node_energy, battery);
    return rep;
}

inline EvaluationReport evaluate(const Network& net, const MultihopPlan& plan,
                                 const InfoCurve& curve, double battery) {
    EvaluationReport rep;
    rep.fusion_info = fusion_information(plan, curve);
    PlanEnergy pe = plan_energy(plan, net);
    rep.per_node_energy = pe.per_node;
    rep.total_energy = pe.total;
    rep.lifetime_rounds = network_lifetime(rep.per_node_energy, battery);
    return rep;
}

struct DetectionStats {
    double alpha = 0.0;  // false alarm rate
    double beta = 0.0;   // miss rate
    double pe = 0.0;     // prior-weighted error probability
    std::int64_t trials = 0;
    double se_alpha = 0.0;
    double se_beta = 0.0;
    double se_pe = 0.0;
};

/// Monte Carlo run of the fused likelihood-ratio test. Each trial draws one
/// observation per transmitting node (network order; zero-bit nodes consume
/// no draws), quantizes it, and sums the cell log-likelihood ratios; the sum
/// is compared against ln(pi0/pi1). All H0 trials run before all H1 trials
/// on a single engine seeded with `seed`.
inline DetectionStats monte_carlo_detection(const Network& net, const Allocation& alloc,
                                            const GaussianHypothesisPair& h,
                                            const std::vector<Quantizer>& quantizers_by_bits,
                                            std::int64_t trials, std::uint64_t seed) {
    net.validate();
    h.validate();
    if (trials < 1) throw std::invalid_argument("monte_carlo_detection: trials must be >= 1");

    struct NodeRule {
        const Quantizer* q;
        std::vector<double> llr;  // per-cell ln(p1/p0)
    };
    std::map<int, std::vector<double>> llr_by_bits;
    std::vector<NodeRule> rules;
    for (const Node& n : net.nodes) {
        auto it = alloc.bits.find(n.id);
        int m = it == alloc.bits.end() ? 0 : it->second;
        if (m == 0) continue;
        if (m < 0 || static_cast<std::size_t>(m) >= quantizers_by_bits.size() ||
            quantizers_by_bits[m].bits != m)
            throw std::invalid_argument("monte_carlo_detection: no quantizer for bit count");
        auto [cached, fresh] = llr_by_bits.try_emplace(m);
        if (fresh) {
            ConditionalPMF pmf = cell_probabilities(h, quantizers_by_bits[m]);
            for (std::size_t c = 0; c < pmf.p0.size(); ++c)
                cached->second.push_back(std::log(std::max(pmf.p1[c], kProbFloor) /
                                                  std::max(pmf.p0[c], kProbFloor)));
        }
        rules.push_back({&quantizers_by_bits[m], cached->second});
    }

    const double tau = std::log(h.pi0 / (1.0 - h.pi0));
    std::mt19937_64 eng(seed);
    std::int64_t false_alarms = 0, misses = 0;
    for (int hyp = 0; hyp < 2; ++hyp) {
        double mu = hyp == 0 ? h.mu0 : h.mu1;
        for (std::int64_t t = 0; t < trials; ++t) {
            double llr = 0.0;
            for (const NodeRule& r : rules) {
                double y = mu + h.sigma * standard_normal(eng);
                llr += r.llr[r.q->cell_of(y)];
            }
            bool say_h1 = llr >= tau;
            if (hyp == 0 && say_h1) ++false_alarms;
            if (hyp == 1 && !say_h1) ++misses;
        }
    }

    DetectionStats s;
    s.trials = trials;
    s.alpha = static_cast<double>(false_alarms) / trials;
    s.beta = static_cast<double>(misses) / trials;
    s.pe = h.pi0 * s.alpha + (1.0 - h.pi0) * s.beta;
    s.se_alpha = std::sqrt(s.alpha * (1.0 - s.alpha) / trials);
    s.se_beta = std::sqrt(s.beta * (1.0 - s.beta) / trials);
    s.se_pe = std::sqrt(h.pi0 * h.pi0 * s.se_alpha * s.se_alpha +
                        (1.0 - h.pi0) * (1.0 - h.pi0) * s.se_beta * s.se_beta);
    return s;
}

enum class SweepKind { info_vs_energy, info_vs_bits, info_vs_size };

struct SweepSpec {
    SweepKind kind = SweepKind::info_vs_energy;
    DeployKind deploy = DeployKind::random_uniform;
    int nodes = 100;
    double length = 100.0;
    double fusion_offset = 2.0;
    std::vector<double> energy_grid;  // info_vs_energy, info_vs_bits
    std::vector<int> size_grid;       // info_vs_size
    double energy_budget = 64000.0;   // fixed budget for info_vs_size
    int reps = 50;
    int max_bits = kMaxBits;
};

struct SweepRow {
    std::string strategy;
    int nodes = 0;
    double energy = 0.0;
    double mean_info = 0.0;
    double mean_bits = 0.0;
    double mean_energy = 0.0;
    double stderr_info = 0.0;
};

/// Paired comparison of the three allocation strategies over a grid of
/// budgets or network sizes. Deployments are redrawn per repetition with
/// seed root_seed + grid_index * reps + rep, shared across strategies so
/// every strategy sees the same networks. Rows come back sorted by
/// (strategy, nodes, energy).
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const InfoCurve& curve,
                                       std::uint64_t root_seed) {
    if (spec.reps < 1) throw std::invalid_argument("run_sweep: reps must be >= 1");
    if (spec.nodes < 1) throw std::invalid_argument("run_sweep: nodes must be >= 1");
    struct Point {
        int nodes;
        double energy;
    };
    std::vector<Point> grid;
    if (spec.kind == SweepKind::info_vs_size) {
        for (int L : spec.size_grid) grid.push_back({L, spec.energy_budget});
    } else {
        for (double e : spec.energy_grid) grid.push_back({spec.nodes, e});
    }
    if (grid.empty()) throw std::invalid_argument("run_sweep: empty grid");

    const std::vector<std::string> strategies = {"multihop", "parallel-info",
                                                 "parallel-lifetime"};
    std::vector<SweepRow> rows;
    for (const std::string& strat : strategies) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            std::vector<double> infos(spec.reps);
            double bits_sum = 0.0, energy_sum = 0.0;
            for (int rep = 0; rep < spec.reps; ++rep) {
                std::uint64_t seed = split_seed(root_seed, g * spec.reps + rep);
                Network net = deploy(spec.deploy, grid[g].nodes, spec.length,
                                     spec.fusion_offset, seed, grid[g].energy);
                if (strat == "multihop") {
                    MultihopPlan plan = plan_multihop(net, curve, spec.max_bits);
                    infos[rep] = fusion_information(plan, curve);
                    bits_sum += static_cast<double>(plan_total_bits(plan));
                    energy_sum += plan_energy(plan, net).total;
                } else {
                    AllocationResult r = strat == "parallel-info"
                                             ? allocate_info_max(net, curve, spec.max_bits)
                                             : allocate_lifetime_max(net, spec.max_bits);
                    infos[rep] = fusion_information(r.allocation, curve);
                    bits_sum += static_cast<double>(r.allocation.total_bits());
                    energy_sum += r.total_energy;
                }
            }
            double mean = 0.0;
            for (double v : infos) mean += v;
            mean /= spec.reps;
            double se = 0.0;
            if (spec.reps > 1) {
                double ss = 0.0;
                for (double v : infos) ss += (v - mean) * (v - mean);
                se = std::sqrt(ss / (spec.reps - 1)) / std::sqrt(double(spec.reps));
            }
            rows.push_back({strat, grid[g].nodes, grid[g].energy, mean,
                            bits_sum / spec.reps, energy_sum / spec.reps, se});
        }
    }
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.strategy != b.strategy) return a.strategy < b.strategy;
        if (a.nodes != b.nodes) return a.nodes < b.nodes;
        return a.energy < b.energy;
    });
    return rows;
}

}  // namespace hopdet
