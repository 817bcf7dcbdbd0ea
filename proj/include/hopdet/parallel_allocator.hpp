#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "detection_math.hpp"
#include "network.hpp"

// Bit allocation for the parallel configuration (every sensor transmits
// straight to the fusion node) under the budget sum M_l * d_l^2 <= E.

namespace hopdet {

enum class AllocationObjective { info_max, lifetime_max };

struct AllocationResult {
    Allocation allocation;
    double total_energy = 0.0;
    AllocationObjective objective = AllocationObjective::info_max;
};

namespace detail {

/// argmin over M in {1..max_bits} of |target - curve(M)/M|, ties toward the
/// smaller M. M = 0 is never ratio-matched (its per-bit value is undefined);
/// zero bits only ever come from the budget-exclusion path.
inline int match_ratio(double target, const InfoCurve& curve, int max_bits) {
    int best = 1;
    double best_dev = std::abs(target - curve.values[1]);
    for (int m = 2; m <= max_bits; ++m) {
        double dev = std::abs(target - curve.values[m] / m);
        if (dev < best_dev) {
            best = m;
            best_dev = dev;
        }
    }
    return best;
}

}  // namespace detail

/// Information-maximizing allocation. Nodes are ranked farthest-first; the
/// farthest transmitting node anchors the per-bit information ratio and every
/// other node is matched to its distance-scaled target. The anchor's bit
/// count grows while the budget allows, backing off one step on overshoot
/// (companions re-matched for the decremented anchor, which restores the last
/// feasible iterate). If even one anchor bit cannot fit, the farthest node is
/// dropped to zero bits and the procedure repeats on the remainder.
inline AllocationResult allocate_info_max(const Network& net, const InfoCurve& curve,
                                          int max_bits = kMaxBits) {
    net.validate();
    curve.validate();
    if (max_bits < 1 || curve.max_bits() < max_bits)
        throw std::invalid_argument("allocate_info_max: curve must cover 1..max_bits");

    AllocationResult result;
    result.objective = AllocationObjective::info_max;
    for (const Node& n : net.nodes) result.allocation.bits[n.id] = 0;
    if (net.energy_budget <= 0.0) return result;

    std::vector<int> order = ids_by_distance_desc(net);
    std::map<int, double> dist;
    for (const Node& n : net.nodes) dist[n.id] = net.distance(n);

    const double E = net.energy_budget;
    std::size_t start = 0;
    while (start < order.size()) {
        double d1 = dist[order[start]];
        if (d1 == 0.0) {
            // Everything left sits on the fusion node; bits are free.
            for (std::size_t k = start; k < order.size(); ++k)
                result.allocation.bits[order[k]] = max_bits;
            break;
        }

        // Anchor bit count M1 -> companion match and canonical (id-ordered) total.
        auto assign_for = [&](int m1) {
            std::map<int, int> bits;
            bits[order[start]] = m1;
            double anchor_ratio = curve.values[m1] / m1;
            for (std::size_t k = start + 1; k < order.size(); ++k) {
                int id = order[k];
                double target = (dist[id] * dist[id]) / (d1 * d1) * anchor_ratio;
                bits[id] = detail::match_ratio(target, curve, max_bits);
            }
            double total = 0.0;
            for (const auto& [id, m] : bits) total += transmit_energy(m, dist[id]);
            return std::pair{bits, total};
        };

        int m1 = 1;
        auto [bits, total] = assign_for(m1);
        while (total < E && m1 < max_bits) {
            ++m1;
            std::tie(bits, total) = assign_for(m1);
        }
        if (total > E) {
            --m1;
            if (m1 == 0) {
                result.allocation.bits[order[start]] = 0;
                ++start;
                continue;
            }
            std::tie(bits, total) = assign_for(m1);
        }
        for (const auto& [id, m] : bits) result.allocation.bits[id] = m;
        result.total_energy = total;
        return result;
    }
    result.total_energy = energy_of(net, result.allocation);
    return result;
}

/// Lifetime-maximizing allocation: every node gets the per-node share E/L and
/// spends it locally, M_l = min(max_bits, floor((E/L) / d_l^2)). A node on the
/// fusion position transmits for free and is capped at max_bits.
inline AllocationResult allocate_lifetime_max(const Network& net, int max_bits = kMaxBits) {
    net.validate();
    if (max_bits < 1) throw std::invalid_argument("allocate_lifetime_max: max_bits must be >= 1");

    AllocationResult result;
    result.objective = AllocationObjective::lifetime_max;
    double share = net.share();
    for (const Node& n : net.nodes) {
        double d = net.distance(n);
        int m = 0;
        if (d == 0.0) {
            m = share > 0.0 ? max_bits : 0;
        } else {
            double q = share / (d * d);
            m = q >= max_bits ? max_bits : static_cast<int>(std::floor(q));
        }
        result.allocation.bits[n.id] = m;
    }

    // Per-node floors can overshoot E by an ulp in aggregate; enforce the hard
    // budget exactly, trimming the biggest spender first.
    result.total_energy = energy_of(net, result.allocation);
    while (result.total_energy > net.energy_budget) {
        int worst = -1;
        double worst_e = -1.0;
        for (const auto& [id, m] : result.allocation.bits) {
            if (m < 1) continue;
            double e = transmit_energy(m, net.distance_of(id));
            if (e > worst_e) {
                worst = id;
                worst_e = e;
            }
        }
        if (worst < 0) break;
        --result.allocation.bits[worst];
        result.total_energy = energy_of(net, result.allocation);
    }
    return result;
}

}  // namespace hopdet
