#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rng.hpp"

// One-dimensional network geometry: node positions on a line, a fusion node,
// the quadratic transmit-energy law, and splitting at a mid-line fusion node.

namespace hopdet {

struct Node {
    int id = 0;
    double position = 0.0;
};

struct Network {
    std::vector<Node> nodes;
    double fusion_position = 0.0;
    double energy_budget = 0.0;  // total budget E, in bits x distance^2

    int size() const { return static_cast<int>(nodes.size()); }

    /// Per-node energy share E/L.
    double share() const { return energy_budget / size(); }

    double distance(const Node& n) const { return std::abs(n.position - fusion_position); }

    const Node& node_by_id(int id) const {
        for (const Node& n : nodes)
            if (n.id == id) return n;
        throw std::invalid_argument("network: unknown node id");
    }

    double distance_of(int id) const { return distance(node_by_id(id)); }

    void validate() const {
        if (nodes.empty()) throw std::invalid_argument("network: needs at least one node");
        if (!std::isfinite(fusion_position) || !std::isfinite(energy_budget) ||
            energy_budget < 0.0)
            throw std::invalid_argument("network: non-finite field or negative budget");
        std::unordered_set<int> seen;
        for (const Node& n : nodes) {
            if (!std::isfinite(n.position))
                throw std::invalid_argument("network: non-finite node position");
            if (!seen.insert(n.id).second)
                throw std::invalid_argument("network: duplicate node id");
        }
    }
};

/// Bits per node, keyed by node id (never by sort position).
struct Allocation {
    std::map<int, int> bits;

    int at(int id) const { return bits.at(id); }

    long long total_bits() const {
        long long sum = 0;
        for (const auto& [id, m] : bits) sum += m;
        return sum;
    }
};

enum class DeployKind { uniform, random_uniform };

/// Transmit cost of one message: bits x distance^2.
inline double transmit_energy(int bits, double distance) {
    if (bits < 0) throw std::invalid_argument("transmit_energy: negative bit count");
    if (!(distance >= 0.0)) throw std::invalid_argument("transmit_energy: negative distance");
    return static_cast<double>(bits) * distance * distance;
}

/// Canonical total energy of a parallel allocation, summed in node-id order.
/// Every budget comparison in the library goes through this so the arithmetic
/// is reproducible across callers.
inline double energy_of(const Network& net, const Allocation& alloc) {
    double total = 0.0;
    for (const auto& [id, m] : alloc.bits) total += transmit_energy(m, net.distance_of(id));
    return total;
}

/// Node ids sorted farthest-from-fusion first; equal distances break toward
/// the smaller id.
inline std::vector<int> ids_by_distance_desc(const Network& net) {
    std::vector<int> ids;
    ids.reserve(net.nodes.size());
    for (const Node& n : net.nodes) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        double da = net.distance_of(a), db = net.distance_of(b);
        if (da != db) return da > db;
        return a < b;
    });
    return ids;
}

/// Place L nodes on [0, length] (ids 0..L-1) with the fusion node at
/// length + fusion_offset. `uniform` spaces nodes evenly (i*length/(L-1),
/// a single node sits at 0); `random_uniform` draws i.i.d. positions from the
/// seeded generator. Same seed, same network.
inline Network deploy(DeployKind kind, int L, double length, double fusion_offset,
                      std::uint64_t seed, double energy_budget) {
    if (L < 1) throw std::invalid_argument("deploy: L must be >= 1");
    if (!(length >= 0.0)) throw std::invalid_argument("deploy: negative length");
    if (!std::isfinite(fusion_offset)) throw std::invalid_argument("deploy: non-finite offset");
    if (!(energy_budget >= 0.0)) throw std::invalid_argument("deploy: negative budget");

    Network net;
    net.fusion_position = length + fusion_offset;
    net.energy_budget = energy_budget;
    net.nodes.resize(L);
    if (kind == DeployKind::uniform) {
        for (int i = 0; i < L; ++i)
            net.nodes[i] = {i, L == 1 ? 0.0 : i * length / double(L - 1)};
    } else {
        std::mt19937_64 eng(seed);
        for (int i = 0; i < L; ++i) net.nodes[i] = {i, uniform01(eng) * length};
    }
    return net;
}

/// Split a network whose fusion node lies strictly between the outermost
/// nodes into the two per-side networks, dividing E proportionally to node
/// count so the per-node share is preserved. A fusion node at or beyond an
/// end returns (original, empty sentinel) untouched.
inline std::pair<Network, Network> split_at_fusion(const Network& net) {
    net.validate();
    double lo = net.nodes.front().position, hi = lo;
    for (const Node& n : net.nodes) {
        lo = std::min(lo, n.position);
        hi = std::max(hi, n.position);
    }
    if (!(lo < net.fusion_position && net.fusion_position < hi))
        return {net, Network{{}, net.fusion_position, 0.0}};

    Network left{{}, net.fusion_position, 0.0};
    Network right{{}, net.fusion_position, 0.0};
    for (const Node& n : net.nodes)
        (n.position <= net.fusion_position ? left : right).nodes.push_back(n);
    double share = net.share();
    left.energy_budget = share * left.size();
    right.energy_budget = share * right.size();
    return {left, right};
}

}  // namespace hopdet
