#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "detection_math.hpp"
#include "evaluator.hpp"
#include "multihop_planner.hpp"
#include "network.hpp"

// Serialization layer: JSON documents for networks, allocations, plans and
// reports, the experiment config schema (strict: unknown keys rejected at
// every level), config hashing for provenance, and the sweep CSV format.

namespace hopdet {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const std::string& a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
}

inline double get_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
    if (!j.at(key).is_number()) throw ConfigError(where + ": \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

inline std::int64_t get_integer(const json& j, const std::string& key,
                                const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
    if (!j.at(key).is_number_integer())
        throw ConfigError(where + ": \"" + key + "\" must be an integer");
    return j.at(key).get<std::int64_t>();
}

inline std::string get_string(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
    if (!j.at(key).is_string()) throw ConfigError(where + ": \"" + key + "\" must be a string");
    return j.at(key).get<std::string>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact-round-trip doubles

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("not a number: \"" + s + "\"");
    return v;
}

// ---------------------------------------------------------------------------
// Network / allocation / plan / report documents

inline json to_json(const Network& net) {
    json nodes = json::array();
    for (const Node& n : net.nodes) nodes.push_back({{"id", n.id}, {"position", n.position}});
    return {{"nodes", nodes},
            {"fusion_position", net.fusion_position},
            {"energy_budget", net.energy_budget}};
}

inline Network network_from_json(const json& j) {
    detail::reject_unknown_keys(j, {"nodes", "fusion_position", "energy_budget"}, "network");
    Network net;
    net.fusion_position = detail::get_number(j, "fusion_position", "network");
    net.energy_budget = detail::get_number(j, "energy_budget", "network");
    if (!j.contains("nodes") || !j.at("nodes").is_array())
        throw ConfigError("network: \"nodes\" must be an array");
    for (const json& nj : j.at("nodes")) {
        detail::reject_unknown_keys(nj, {"id", "position"}, "network.nodes[]");
        Node n;
        n.id = static_cast<int>(detail::get_integer(nj, "id", "network.nodes[]"));
        n.position = detail::get_number(nj, "position", "network.nodes[]");
        net.nodes.push_back(n);
    }
    net.validate();
    return net;
}

inline json to_json(const Allocation& alloc) {
    json arr = json::array();
    for (const auto& [id, m] : alloc.bits) arr.push_back({{"id", id}, {"bits", m}});
    return arr;
}

inline Allocation allocation_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("allocation: expected an array");
    Allocation alloc;
    for (const json& ej : j) {
        detail::reject_unknown_keys(ej, {"id", "bits"}, "allocation[]");
        int id = static_cast<int>(detail::get_integer(ej, "id", "allocation[]"));
        int m = static_cast<int>(detail::get_integer(ej, "bits", "allocation[]"));
        if (m < 0) throw ConfigError("allocation: bits must be >= 0");
        if (!alloc.bits.emplace(id, m).second)
            throw ConfigError("allocation: duplicate node id");
    }
    return alloc;
}

inline json to_json(const MultihopPlan& plan) {
    json groups = json::array();
    for (const Group& g : plan.groups)
        groups.push_back({{"chain", g.chain}, {"bits", g.bits}});
    return {{"groups", groups}, {"per_node_share", plan.per_node_share}};
}

inline MultihopPlan plan_from_json(const json& j) {
    detail::reject_unknown_keys(j, {"groups", "per_node_share"}, "plan");
    MultihopPlan plan;
    plan.per_node_share = detail::get_number(j, "per_node_share", "plan");
    if (!j.contains("groups") || !j.at("groups").is_array())
        throw ConfigError("plan: \"groups\" must be an array");
    for (const json& gj : j.at("groups")) {
        detail::reject_unknown_keys(gj, {"chain", "bits"}, "plan.groups[]");
        Group g;
        if (!gj.contains("chain") || !gj.at("chain").is_array() || !gj.contains("bits") ||
            !gj.at("bits").is_array())
            throw ConfigError("plan.groups[]: \"chain\" and \"bits\" must be arrays");
        for (const json& v : gj.at("chain")) {
            if (!v.is_number_integer()) throw ConfigError("plan: chain ids must be integers");
            g.chain.push_back(v.get<int>());
        }
        for (const json& v : gj.at("bits")) {
            if (!v.is_number_integer()) throw ConfigError("plan: bits must be integers");
            g.bits.push_back(v.get<int>());
        }
        if (g.chain.size() != g.bits.size())
            throw ConfigError("plan: chain/bits length mismatch");
        plan.groups.push_back(std::move(g));
    }
    return plan;
}

inline json to_json(const EvaluationReport& rep) {
    json per_node = json::array();
    for (const auto& [id, e] : rep.per_node_energy)
        per_node.push_back({{"id", id}, {"energy", e}});
    json lifetime;
    if (rep.lifetime_rounds != kInfiniteRounds) lifetime = rep.lifetime_rounds;
    return {{"fusion_info", rep.fusion_info},
            {"total_energy", rep.total_energy},
            {"lifetime_rounds", lifetime},
            {"per_node_energy", per_node}};
}

inline EvaluationReport report_from_json(const json& j) {
    detail::reject_unknown_keys(
        j, {"fusion_info", "total_energy", "lifetime_rounds", "per_node_energy"}, "report");
    EvaluationReport rep;
    rep.fusion_info = detail::get_number(j, "fusion_info", "report");
    rep.total_energy = detail::get_number(j, "total_energy", "report");
    if (!j.contains("lifetime_rounds")) throw ConfigError("report: missing lifetime_rounds");
    rep.lifetime_rounds = j.at("lifetime_rounds").is_null()
                              ? kInfiniteRounds
                              : j.at("lifetime_rounds").get<std::int64_t>();
    if (j.contains("per_node_energy"))
        for (const json& ej : j.at("per_node_energy")) {
            detail::reject_unknown_keys(ej, {"id", "energy"}, "report.per_node_energy[]");
            rep.per_node_energy[static_cast<int>(
                detail::get_integer(ej, "id", "report.per_node_energy[]"))] =
                detail::get_number(ej, "energy", "report.per_node_energy[]");
        }
    return rep;
}

inline json to_json(const DetectionStats& s) {
    return {{"alpha", s.alpha},       {"beta", s.beta},         {"pe", s.pe},
            {"trials", s.trials},     {"se_alpha", s.se_alpha}, {"se_beta", s.se_beta},
            {"se_pe", s.se_pe}};
}

// ---------------------------------------------------------------------------
// Experiment config

struct DeploymentSpec {
    DeployKind kind = DeployKind::random_uniform;
    int nodes = 100;
    double length = 100.0;
    double fusion_offset = 2.0;
    double energy_budget = 64000.0;
};

struct ExperimentConfig {
    GaussianHypothesisPair hypothesis;
    Metric metric = Metric::chernoff;
    int max_bits = kMaxBits;
    std::optional<DeploymentSpec> deployment;
    std::optional<Network> network;
    std::string strategy = "multihop";
    std::optional<double> battery;  // default: energy_budget / nodes
    std::uint64_t seed = 1;
    std::int64_t trials = 100000;
    std::optional<SweepSpec> sweep;  // deployment fields filled at resolution
    std::string output;
};

inline DeployKind deploy_kind_from_string(const std::string& s) {
    if (s == "uniform") return DeployKind::uniform;
    if (s == "random-uniform") return DeployKind::random_uniform;
    throw ConfigError("deployment.kind must be \"uniform\" or \"random-uniform\"");
}

inline std::string to_string(DeployKind k) {
    return k == DeployKind::uniform ? "uniform" : "random-uniform";
}

inline Metric metric_from_string(const std::string& s) {
    if (s == "chernoff") return Metric::chernoff;
    if (s == "kl") return Metric::kl;
    throw ConfigError("metric must be \"chernoff\" or \"kl\"");
}

inline std::string to_string(Metric m) {
    return m == Metric::chernoff ? "chernoff" : "kl";
}

inline SweepKind sweep_kind_from_string(const std::string& s) {
    if (s == "info-vs-energy") return SweepKind::info_vs_energy;
    if (s == "info-vs-bits") return SweepKind::info_vs_bits;
    if (s == "info-vs-size") return SweepKind::info_vs_size;
    throw ConfigError(
        "sweep.kind must be \"info-vs-energy\", \"info-vs-bits\" or \"info-vs-size\"");
}

inline std::string to_string(SweepKind k) {
    switch (k) {
        case SweepKind::info_vs_energy: return "info-vs-energy";
        case SweepKind::info_vs_bits: return "info-vs-bits";
        default: return "info-vs-size";
    }
}

inline ExperimentConfig config_from_json(const json& j) {
    detail::reject_unknown_keys(j,
                                {"hypothesis", "metric", "max_bits", "deployment", "network",
                                 "strategy", "battery", "seed", "trials", "sweep", "output"},
                                "config");
    ExperimentConfig cfg;
    if (j.contains("hypothesis")) {
        const json& h = j.at("hypothesis");
        detail::reject_unknown_keys(h, {"mu0", "mu1", "sigma", "pi0"}, "hypothesis");
        if (h.contains("mu0")) cfg.hypothesis.mu0 = detail::get_number(h, "mu0", "hypothesis");
        if (h.contains("mu1")) cfg.hypothesis.mu1 = detail::get_number(h, "mu1", "hypothesis");
        if (h.contains("sigma"))
            cfg.hypothesis.sigma = detail::get_number(h, "sigma", "hypothesis");
        if (h.contains("pi0")) cfg.hypothesis.pi0 = detail::get_number(h, "pi0", "hypothesis");
        cfg.hypothesis.validate();
    }
    if (j.contains("metric"))
        cfg.metric = metric_from_string(detail::get_string(j, "metric", "config"));
    if (j.contains("max_bits")) {
        std::int64_t m = detail::get_integer(j, "max_bits", "config");
        if (m < 1 || m > kMaxBits)
            throw ConfigError("config: max_bits must be in [1, " +
                              std::to_string(kMaxBits) + "]");
        cfg.max_bits = static_cast<int>(m);
    }
    if (j.contains("deployment")) {
        const json& d = j.at("deployment");
        detail::reject_unknown_keys(
            d, {"kind", "nodes", "length", "fusion_offset", "energy_budget"}, "deployment");
        DeploymentSpec spec;
        if (d.contains("kind"))
            spec.kind = deploy_kind_from_string(detail::get_string(d, "kind", "deployment"));
        std::int64_t nodes = detail::get_integer(d, "nodes", "deployment");
        if (nodes < 1) throw ConfigError("deployment: nodes must be >= 1");
        spec.nodes = static_cast<int>(nodes);
        spec.length = detail::get_number(d, "length", "deployment");
        spec.fusion_offset = detail::get_number(d, "fusion_offset", "deployment");
        spec.energy_budget = detail::get_number(d, "energy_budget", "deployment");
        cfg.deployment = spec;
    }
    if (j.contains("network")) cfg.network = network_from_json(j.at("network"));
    if (cfg.deployment && cfg.network)
        throw ConfigError("config: give either \"deployment\" or \"network\", not both");
    if (j.contains("strategy")) {
        cfg.strategy = detail::get_string(j, "strategy", "config");
        if (cfg.strategy != "multihop" && cfg.strategy != "parallel-info" &&
            cfg.strategy != "parallel-lifetime")
            throw ConfigError(
                "strategy must be \"multihop\", \"parallel-info\" or \"parallel-lifetime\"");
    }
    if (j.contains("battery")) {
        cfg.battery = detail::get_number(j, "battery", "config");
        if (!(*cfg.battery >= 0.0)) throw ConfigError("config: battery must be >= 0");
    }
    if (j.contains("seed")) {
        std::int64_t s = detail::get_integer(j, "seed", "config");
        if (s < 0) throw ConfigError("config: seed must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("trials")) {
        cfg.trials = detail::get_integer(j, "trials", "config");
        if (cfg.trials < 1) throw ConfigError("config: trials must be >= 1");
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        detail::reject_unknown_keys(
            s, {"kind", "energy_grid", "size_grid", "energy_budget", "reps"}, "sweep");
        SweepSpec spec;
        spec.kind = sweep_kind_from_string(detail::get_string(s, "kind", "sweep"));
        if (s.contains("energy_grid")) {
            if (!s.at("energy_grid").is_array())
                throw ConfigError("sweep: energy_grid must be an array");
            for (const json& v : s.at("energy_grid")) {
                if (!v.is_number()) throw ConfigError("sweep: energy_grid entries are numbers");
                spec.energy_grid.push_back(v.get<double>());
            }
        }
        if (s.contains("size_grid")) {
            if (!s.at("size_grid").is_array())
                throw ConfigError("sweep: size_grid must be an array");
            for (const json& v : s.at("size_grid")) {
                if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
                    throw ConfigError("sweep: size_grid entries are positive integers");
                spec.size_grid.push_back(v.get<int>());
            }
        }
        if (s.contains("energy_budget"))
            spec.energy_budget = detail::get_number(s, "energy_budget", "sweep");
        if (s.contains("reps")) {
            std::int64_t r = detail::get_integer(s, "reps", "sweep");
            if (r < 1) throw ConfigError("sweep: reps must be >= 1");
            spec.reps = static_cast<int>(r);
        }
        cfg.sweep = spec;
    }
    if (j.contains("output")) cfg.output = detail::get_string(j, "output", "config");
    return cfg;
}

/// Canonical form of a resolved config: defaults applied, keys sorted (the
/// JSON library keeps object keys ordered), no whitespace. The provenance
/// hash is FNV-1a over this string.
inline std::string canonical_config_dump(const ExperimentConfig& cfg) {
    json j;
    j["hypothesis"] = {{"mu0", cfg.hypothesis.mu0},
                       {"mu1", cfg.hypothesis.mu1},
                       {"sigma", cfg.hypothesis.sigma},
                       {"pi0", cfg.hypothesis.pi0}};
    j["metric"] = to_string(cfg.metric);
    j["max_bits"] = cfg.max_bits;
    if (cfg.deployment)
        j["deployment"] = {{"kind", to_string(cfg.deployment->kind)},
                           {"nodes", cfg.deployment->nodes},
                           {"length", cfg.deployment->length},
                           {"fusion_offset", cfg.deployment->fusion_offset},
                           {"energy_budget", cfg.deployment->energy_budget}};
    if (cfg.network) j["network"] = to_json(*cfg.network);
    j["strategy"] = cfg.strategy;
    j["battery"] = cfg.battery ? json(*cfg.battery) : json();
    j["seed"] = cfg.seed;
    j["trials"] = cfg.trials;
    if (cfg.sweep)
        j["sweep"] = {{"kind", to_string(cfg.sweep->kind)},
                      {"energy_grid", cfg.sweep->energy_grid},
                      {"size_grid", cfg.sweep->size_grid},
                      {"energy_budget", cfg.sweep->energy_budget},
                      {"reps", cfg.sweep->reps}};
    j["output"] = cfg.output;
    return j.dump();
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view s) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(s);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline std::string config_hash(const ExperimentConfig& cfg) {
    return fnv1a64_hex(canonical_config_dump(cfg));
}

// ---------------------------------------------------------------------------
// Sweep CSV (RFC-4180-style quoting; doubles round-trip exactly)

inline const std::string kSweepCsvHeader =
    "strategy,L,E,mean_info,mean_bits,mean_energy,stderr_info";

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace detail

inline std::string sweep_rows_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = kSweepCsvHeader + "\n";
    for (const SweepRow& r : rows) {
        out += detail::csv_field(r.strategy);
        out += ',' + std::to_string(r.nodes);
        out += ',' + format_double(r.energy);
        out += ',' + format_double(r.mean_info);
        out += ',' + format_double(r.mean_bits);
        out += ',' + format_double(r.mean_energy);
        out += ',' + format_double(r.stderr_info);
        out += '\n';
    }
    return out;
}

inline std::vector<SweepRow> sweep_rows_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("sweep csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSweepCsvHeader) throw ConfigError("sweep csv: unexpected header");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f = detail::split_csv_line(line);
        if (f.size() != 7) throw ConfigError("sweep csv: expected 7 fields per row");
        SweepRow r;
        r.strategy = f[0];
        r.nodes = static_cast<int>(parse_double(f[1]));
        r.energy = parse_double(f[2]);
        r.mean_info = parse_double(f[3]);
        r.mean_bits = parse_double(f[4]);
        r.mean_energy = parse_double(f[5]);
        r.stderr_info = parse_double(f[6]);
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

inline json parse_json_text(const std::string& text, const std::string& where) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError(where + ": invalid JSON");
    return j;
}

}  // namespace hopdet
