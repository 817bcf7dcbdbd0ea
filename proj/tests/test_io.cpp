#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>

#include "hopdet/io.hpp"

using namespace hopdet;

TEST_CASE("fnv1a64 reference vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("doubles round-trip through their text form") {
    for (double v : {0.1, 1.0 / 3.0, 1e300, 5e-324, 12345.678, -2.5, 0.0}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    double neg_zero = parse_double(format_double(-0.0));
    CHECK(std::signbit(neg_zero));

    CHECK_THROWS_AS(parse_double("1.5x"), ConfigError);
    CHECK_THROWS_AS(parse_double(""), ConfigError);
    CHECK_THROWS_AS(parse_double(" 1"), ConfigError);
}

TEST_CASE("network documents round-trip and reject junk") {
    Network net;
    net.nodes = {{0, 0.25}, {1, 7.5}};
    net.fusion_position = 10.0;
    net.energy_budget = 123.456;

    json j = to_json(net);
    Network back = network_from_json(parse_json_text(j.dump(), "test"));
    REQUIRE(back.nodes.size() == 2);
    CHECK(back.nodes[1].position == 7.5);
    CHECK(back.fusion_position == 10.0);
    CHECK(back.energy_budget == 123.456);

    json bad = j;
    bad["color"] = "red";
    CHECK_THROWS_AS(network_from_json(bad), ConfigError);
    bad = j;
    bad["nodes"][0]["speed"] = 3;
    CHECK_THROWS_AS(network_from_json(bad), ConfigError);
    bad = j;
    bad["nodes"][1]["id"] = 0;  // duplicate id caught by network validation
    CHECK_THROWS_AS(network_from_json(bad), std::invalid_argument);
    bad = j;
    bad.erase("energy_budget");
    CHECK_THROWS_AS(network_from_json(bad), ConfigError);
}

TEST_CASE("allocation documents round-trip") {
    Allocation a;
    a.bits = {{0, 1}, {5, 3}};
    Allocation back = allocation_from_json(to_json(a));
    CHECK(back.bits == a.bits);

    CHECK_THROWS_AS(allocation_from_json(json::object()), ConfigError);
    json dup = json::array({{{"id", 1}, {"bits", 2}}, {{"id", 1}, {"bits", 3}}});
    CHECK_THROWS_AS(allocation_from_json(dup), ConfigError);
    json neg = json::array({{{"id", 1}, {"bits", -2}}});
    CHECK_THROWS_AS(allocation_from_json(neg), ConfigError);
}

TEST_CASE("plan documents round-trip") {
    MultihopPlan plan;
    plan.per_node_share = 12.5;
    plan.groups.push_back({{0, 1}, {1, 2}});
    plan.groups.push_back({{2}, {0}});

    MultihopPlan back = plan_from_json(to_json(plan));
    CHECK(back.per_node_share == 12.5);
    REQUIRE(back.groups.size() == 2);
    CHECK(back.groups[0].chain == std::vector<int>{0, 1});
    CHECK(back.groups[0].bits == std::vector<int>{1, 2});

    json j = to_json(plan);
    j["groups"][0]["color"] = 1;
    CHECK_THROWS_AS(plan_from_json(j), ConfigError);
    j = to_json(plan);
    j["groups"][0]["bits"] = {1};
    CHECK_THROWS_AS(plan_from_json(j), ConfigError);
    j = to_json(plan);
    j.erase("per_node_share");
    CHECK_THROWS_AS(plan_from_json(j), ConfigError);
}

TEST_CASE("report documents encode endless lifetime as null") {
    EvaluationReport rep;
    rep.fusion_info = 0.75;
    rep.total_energy = 41.0;
    rep.lifetime_rounds = 12;
    rep.per_node_energy = {{0, 9.0}, {1, 32.0}};

    json j = to_json(rep);
    CHECK(j.at("lifetime_rounds").get<std::int64_t>() == 12);
    EvaluationReport back = report_from_json(j);
    CHECK(back.lifetime_rounds == 12);
    CHECK(back.per_node_energy.at(1) == 32.0);

    rep.lifetime_rounds = kInfiniteRounds;
    j = to_json(rep);
    CHECK(j.at("lifetime_rounds").is_null());
    CHECK(report_from_json(j).lifetime_rounds == kInfiniteRounds);
}

TEST_CASE("detection stats serialize every field") {
    DetectionStats s;
    s.alpha = 0.1;
    s.trials = 500;
    json j = to_json(s);
    for (const char* key : {"alpha", "beta", "pe", "trials", "se_alpha", "se_beta", "se_pe"})
        CHECK(j.contains(key));
    CHECK(j.at("trials").get<std::int64_t>() == 500);
}

TEST_CASE("empty config takes all defaults") {
    ExperimentConfig cfg = config_from_json(json::object());
    CHECK(cfg.metric == Metric::chernoff);
    CHECK(cfg.max_bits == 8);
    CHECK(cfg.strategy == "multihop");
    CHECK(cfg.seed == 1);
    CHECK(cfg.trials == 100000);
    CHECK(!cfg.deployment);
    CHECK(!cfg.network);
    CHECK(!cfg.battery);
    CHECK(!cfg.sweep);
    CHECK(cfg.hypothesis.mu0 == -1.0);
    CHECK(cfg.hypothesis.pi0 == 0.5);
}

TEST_CASE("full config parses and validates") {
    json j = {
        {"hypothesis", {{"mu0", -2.0}, {"mu1", 2.0}, {"sigma", 0.5}, {"pi0", 0.6}}},
        {"metric", "kl"},
        {"max_bits", 4},
        {"deployment",
         {{"kind", "uniform"},
          {"nodes", 10},
          {"length", 100.0},
          {"fusion_offset", 2.0},
          {"energy_budget", 5000.0}}},
        {"strategy", "parallel-info"},
        {"battery", 250.0},
        {"seed", 42},
        {"trials", 2000},
        {"sweep",
         {{"kind", "info-vs-size"},
          {"size_grid", {50, 100}},
          {"energy_budget", 64000.0},
          {"reps", 5}}},
        {"output", "out.csv"},
    };
    ExperimentConfig cfg = config_from_json(j);
    CHECK(cfg.metric == Metric::kl);
    CHECK(cfg.max_bits == 4);
    REQUIRE(cfg.deployment);
    CHECK(cfg.deployment->kind == DeployKind::uniform);
    CHECK(cfg.deployment->nodes == 10);
    CHECK(cfg.strategy == "parallel-info");
    CHECK(cfg.battery == 250.0);
    CHECK(cfg.seed == 42);
    REQUIRE(cfg.sweep);
    CHECK(cfg.sweep->kind == SweepKind::info_vs_size);
    CHECK(cfg.sweep->size_grid == std::vector<int>{50, 100});
    CHECK(cfg.sweep->reps == 5);
    CHECK(cfg.output == "out.csv");
}

TEST_CASE("config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(config_from_json({{"metrics", "kl"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"metric", "banana"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"max_bits", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"max_bits", 9}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"strategy", "direct"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"battery", -1.0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"seed", -5}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"trials", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"hypothesis", {{"sigma", 0.0}}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json({{"hypothesis", {{"tau", 1.0}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"sweep", {{"energy_grid", {1.0}}}}}), ConfigError);
    CHECK_THROWS_AS(
        config_from_json({{"sweep", {{"kind", "info-vs-size"}, {"size_grid", {0}}}}}),
        ConfigError);
    CHECK_THROWS_AS(
        config_from_json({{"sweep", {{"kind", "info-vs-energy"}, {"reps", 0}}}}),
        ConfigError);

    json both = {{"deployment",
                  {{"nodes", 2}, {"length", 10.0}, {"fusion_offset", 1.0},
                   {"energy_budget", 10.0}}},
                 {"network",
                  {{"nodes", json::array({{{"id", 0}, {"position", 0.0}}})},
                   {"fusion_position", 5.0},
                   {"energy_budget", 10.0}}}};
    CHECK_THROWS_AS(config_from_json(both), ConfigError);
}

TEST_CASE("config hash ignores key order and tracks content") {
    std::string text_a = R"({"seed": 7, "metric": "kl", "trials": 50})";
    std::string text_b = R"({"trials": 50, "seed": 7, "metric": "kl"})";
    ExperimentConfig a = config_from_json(parse_json_text(text_a, "a"));
    ExperimentConfig b = config_from_json(parse_json_text(text_b, "b"));
    CHECK(config_hash(a) == config_hash(b));

    ExperimentConfig c = a;
    c.seed = 8;
    CHECK(config_hash(a) != config_hash(c));

    // unset battery is pinned into the canonical form as null
    CHECK(canonical_config_dump(a).find("\"battery\":null") != std::string::npos);
}

TEST_CASE("sweep csv round-trips exactly") {
    std::vector<SweepRow> rows = {
        {"multihop", 100, 8000.0, 0.1 + 0.2, 12.5, 7999.25, 1.0 / 3.0},
        {"parallel-info", 100, 16000.0, 42.0, 0.0, 0.0, 0.0},
    };
    std::string csv = sweep_rows_to_csv(rows);
    CHECK(csv.rfind(kSweepCsvHeader, 0) == 0);

    std::vector<SweepRow> back = sweep_rows_from_csv(csv);
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].strategy == rows[i].strategy);
        CHECK(back[i].nodes == rows[i].nodes);
        CHECK(back[i].energy == rows[i].energy);
        CHECK(back[i].mean_info == rows[i].mean_info);
        CHECK(back[i].mean_bits == rows[i].mean_bits);
        CHECK(back[i].mean_energy == rows[i].mean_energy);
        CHECK(back[i].stderr_info == rows[i].stderr_info);
    }
}

TEST_CASE("sweep csv quoting handles commas and quotes") {
    std::vector<SweepRow> rows = {{"odd,na\"me", 1, 2.0, 3.0, 4.0, 5.0, 6.0}};
    std::string csv = sweep_rows_to_csv(rows);
    CHECK(csv.find("\"odd,na\"\"me\"") != std::string::npos);
    std::vector<SweepRow> back = sweep_rows_from_csv(csv);
    REQUIRE(back.size() == 1);
    CHECK(back[0].strategy == "odd,na\"me");
}

TEST_CASE("sweep csv rejects malformed input") {
    CHECK_THROWS_AS(sweep_rows_from_csv(""), ConfigError);
    CHECK_THROWS_AS(sweep_rows_from_csv("strategy,L,E\n"), ConfigError);
    CHECK_THROWS_AS(sweep_rows_from_csv(kSweepCsvHeader + "\na,1,2\n"), ConfigError);
    CHECK(sweep_rows_from_csv(kSweepCsvHeader + "\n").empty());
    // carriage returns are tolerated
    std::vector<SweepRow> rows =
        sweep_rows_from_csv(kSweepCsvHeader + "\r\nmultihop,1,2,3,4,5,6\r\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean_energy == 5.0);
}

TEST_CASE("text files round-trip bytes") {
    const std::string path = "io_test_tmp.txt";
    write_text_file(path, "line1\nline2\n");
    CHECK(read_text_file(path) == "line1\nline2\n");
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_text_file("definitely_missing_file.json"), ConfigError);
    CHECK_THROWS_AS(parse_json_text("{oops", "test"), ConfigError);
}
