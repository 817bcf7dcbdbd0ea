#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "detection_math.hpp"
#include "network.hpp"
#include "parallel_allocator.hpp"

// Multi-hop configuration planning: sensors are organized into relay chains
// ("groups") running toward the fusion node, each relay forwarding the
// cumulative payload of everything behind it. Joint path and bit selection
// follows the per-node energy share E/L: a chain may hop only as far as the
// current payload can travel without exceeding the share.

namespace hopdet {

struct Group {
    std::vector<int> chain;  // node ids, farthest first
    std::vector<int> bits;   // own bits per chain position
};

struct MultihopPlan {
    std::vector<Group> groups;
    double per_node_share = 0.0;  // E/L
};

struct PlanEnergy {
    std::map<int, double> per_node;   // cumulative bits x outgoing hop^2
    std::map<int, double> delivered;  // own bits x sum of squared hops to fusion
    double total = 0.0;
};

inline long long plan_total_bits(const MultihopPlan& plan) {
    long long sum = 0;
    for (const Group& g : plan.groups)
        for (int m : g.bits) sum += m;
    return sum;
}

/// Own bits per node id, dropping the relay structure.
inline Allocation allocation_from_plan(const MultihopPlan& plan) {
    Allocation alloc;
    for (const Group& g : plan.groups)
        for (std::size_t j = 0; j < g.chain.size(); ++j) alloc.bits[g.chain[j]] = g.bits[j];
    return alloc;
}

/// Per-node transmit energy (cumulative payload times squared outgoing hop),
/// per-origin delivered cost, and the canonical id-ordered total.
inline PlanEnergy plan_energy(const MultihopPlan& plan, const Network& net) {
    net.validate();
    PlanEnergy pe;
    for (const Group& g : plan.groups) {
        if (g.chain.size() != g.bits.size())
            throw std::invalid_argument("plan_energy: chain/bits length mismatch");
        std::size_t n = g.chain.size();
        std::vector<double> hop2(n);
        for (std::size_t j = 0; j < n; ++j) {
            const Node& from = net.node_by_id(g.chain[j]);
            double hop = (j + 1 < n)
                             ? std::abs(from.position - net.node_by_id(g.chain[j + 1]).position)
                             : net.distance(from);
            hop2[j] = hop * hop;
        }
        long long cum = 0;
        double tail = 0.0;  // built back-to-front for delivered costs
        for (std::size_t j = n; j-- > 0;) tail += hop2[j];
        double remaining = tail;
        for (std::size_t j = 0; j < n; ++j) {
            int id = g.chain[j];
            if (g.bits[j] < 0) throw std::invalid_argument("plan_energy: negative bits");
            if (!pe.per_node.emplace(id, 0.0).second)
                throw std::invalid_argument("plan_energy: node appears twice in plan");
            cum += g.bits[j];
            pe.per_node[id] = static_cast<double>(cum) * hop2[j];
            pe.delivered[id] = static_cast<double>(g.bits[j]) * remaining;
            remaining -= hop2[j];
        }
    }
    for (const auto& [id, e] : pe.per_node) pe.total += e;
    return pe;
}

/// Chain-and-bits planning for a network whose fusion node sits at one end of
/// the line (split mid-fusion networks first; see plan_multihop).
///
/// Group formation, farthest node first: the opener takes 1 bit; the chain
/// repeatedly hops to the farthest unassigned node toward the fusion node
/// reachable within the allowance sqrt((E/L)/payload); a new relay's own bits
/// match its share of the chain's information-per-bit ratio; when candidates
/// exist but none is reachable, the largest bit in the chain is dropped
/// (earliest position on ties), and once the payload empties the chain jumps
/// to the nearest node toward the fusion with a single bit. A chain closes
/// once the allowance covers the remaining distance, so the closing hop obeys
/// the same per-node share as every relay hop. A chain that closes as a
/// singleton spends the whole share directly:
/// M = min(max_bits, floor((E/L)/d^2)).
inline MultihopPlan form_groups(const Network& net, const InfoCurve& curve,
                                int max_bits = kMaxBits) {
    net.validate();
    curve.validate();
    if (max_bits < 1 || curve.max_bits() < max_bits)
        throw std::invalid_argument("form_groups: curve must cover 1..max_bits");
    bool below = false, above = false;
    for (const Node& n : net.nodes) {
        below = below || n.position < net.fusion_position;
        above = above || n.position > net.fusion_position;
    }
    if (below && above)
        throw std::invalid_argument("form_groups: fusion node must sit at the line end");

    const double share = net.share();
    MultihopPlan plan;
    plan.per_node_share = share;

    std::vector<int> order = ids_by_distance_desc(net);
    std::map<int, bool> assigned;
    std::map<int, double> dist, pos;
    for (const Node& n : net.nodes) {
        assigned[n.id] = false;
        dist[n.id] = net.distance(n);
        pos[n.id] = n.position;
    }

    for (int start : order) {
        if (assigned[start]) continue;
        Group g;
        g.chain.push_back(start);
        g.bits.push_back(1);
        assigned[start] = true;
        long long sum = 1;
        int cur = start;

        while (true) {
            double allowance = std::sqrt(share / static_cast<double>(sum));
            double d_cur = dist[cur];
            if (allowance >= d_cur) break;

            // Farthest reachable node strictly toward the fusion node.
            int next = -1;
            double best_hop = -1.0;
            for (int id : order) {
                if (assigned[id] || !(dist[id] < d_cur)) continue;
                double hop = std::abs(pos[cur] - pos[id]);
                if (hop <= allowance && hop > best_hop) {
                    next = id;
                    best_hop = hop;
                }
            }
            if (next >= 0) {
                int m_cur = g.bits.back();
                double d_next = dist[next];
                double target = (d_next * d_next) / (best_hop * best_hop + d_next * d_next) *
                                (curve.values[m_cur] / m_cur);
                int m_new = detail::match_ratio(target, curve, max_bits);
                g.chain.push_back(next);
                g.bits.push_back(m_new);
                assigned[next] = true;
                sum += m_new;
                cur = next;
                continue;
            }

            // Out of reach: shed the largest bit, earliest chain position
            // first.
            std::size_t drop = 0;
            for (std::size_t j = 1; j < g.bits.size(); ++j)
                if (g.bits[j] > g.bits[drop]) drop = j;
            --g.bits[drop];
            --sum;
            if (sum > 0) continue;

            // Payload empty: jump to the nearest node toward the fusion with
            // one fresh bit. No such node means the line is exhausted here;
            // close the (all-zero) chain.
            int fb = -1;
            double fb_hop = std::numeric_limits<double>::infinity();
            for (int id : order) {
                if (assigned[id] || !(dist[id] < d_cur)) continue;
                double hop = std::abs(pos[cur] - pos[id]);
                if (hop < fb_hop) {
                    fb = id;
                    fb_hop = hop;
                }
            }
            if (fb < 0) break;
            g.chain.push_back(fb);
            g.bits.push_back(1);
            assigned[fb] = true;
            sum = 1;
            cur = fb;
        }

        if (g.chain.size() == 1) {
            double d = dist[g.chain[0]];
            int m = 0;
            if (d == 0.0) {
                m = share > 0.0 ? max_bits : 0;
            } else {
                double q = share / (d * d);
                m = q >= max_bits ? max_bits : static_cast<int>(std::floor(q));
            }
            g.bits[0] = m;
        }
        plan.groups.push_back(std::move(g));
    }

    // Hard-budget pass: per-hop energy stays within the share by
    // construction, but the sum across groups can still exceed the budget.
    // Trim the biggest transmitter (own bits >= 1, smaller id on ties) until
    // the budget holds exactly.
    while (plan_energy(plan, net).total > net.energy_budget) {
        PlanEnergy pe = plan_energy(plan, net);
        int worst = -1;
        double worst_e = -1.0;
        for (Group& g : plan.groups)
            for (std::size_t j = 0; j < g.chain.size(); ++j) {
                if (g.bits[j] < 1) continue;
                double e = pe.per_node[g.chain[j]];
                if (e > worst_e || (e == worst_e && g.chain[j] < worst)) {
                    worst = g.chain[j];
                    worst_e = e;
                }
            }
        if (worst < 0) break;
        for (Group& g : plan.groups)
            for (std::size_t j = 0; j < g.chain.size(); ++j)
                if (g.chain[j] == worst) --g.bits[j];
    }
    return plan;
}

/// form_groups with mid-line fusion handled: the network is split at the
/// fusion node (budget divided proportionally to node count, preserving E/L),
/// each side planned independently, and the groups merged left side first.
inline MultihopPlan plan_multihop(const Network& net, const InfoCurve& curve,
                                  int max_bits = kMaxBits) {
    auto [left, right] = split_at_fusion(net);
    if (right.nodes.empty()) return form_groups(net, curve, max_bits);
    MultihopPlan plan = form_groups(left, curve, max_bits);
    MultihopPlan other = form_groups(right, curve, max_bits);
    for (Group& g : other.groups) plan.groups.push_back(std::move(g));
    plan.per_node_share = net.share();
    return plan;
}

}  // namespace hopdet
