#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "hopdet/network.hpp"

using namespace hopdet;

TEST_CASE("uniform deployment spaces nodes evenly") {
    Network net = deploy(DeployKind::uniform, 5, 100.0, 2.0, 1, 900.0);
    REQUIRE(net.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(net.nodes[i].id == i);
        CHECK(net.nodes[i].position == Catch::Approx(25.0 * i).margin(1e-12));
    }
    CHECK(net.fusion_position == Catch::Approx(102.0).margin(1e-12));
    CHECK(net.energy_budget == 900.0);
    CHECK(net.share() == Catch::Approx(180.0).margin(1e-12));
}

TEST_CASE("single-node deployment with zero length is allowed") {
    Network net = deploy(DeployKind::uniform, 1, 0.0, 2.0, 1, 10.0);
    REQUIRE(net.size() == 1);
    CHECK(net.nodes[0].position == 0.0);
    CHECK(net.distance(net.nodes[0]) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("random deployment is seeded and stays on the segment") {
    Network a = deploy(DeployKind::random_uniform, 40, 100.0, 2.0, 7, 1000.0);
    Network b = deploy(DeployKind::random_uniform, 40, 100.0, 2.0, 7, 1000.0);
    Network c = deploy(DeployKind::random_uniform, 40, 100.0, 2.0, 8, 1000.0);
    bool same = true, diff = false;
    for (int i = 0; i < 40; ++i) {
        same = same && a.nodes[i].position == b.nodes[i].position;
        diff = diff || a.nodes[i].position != c.nodes[i].position;
        CHECK(a.nodes[i].position >= 0.0);
        CHECK(a.nodes[i].position <= 100.0);
    }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("deployment argument validation") {
    CHECK_THROWS_AS(deploy(DeployKind::uniform, 0, 100.0, 2.0, 1, 10.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(deploy(DeployKind::uniform, 5, -1.0, 2.0, 1, 10.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(deploy(DeployKind::uniform, 5, 100.0, 2.0, 1, -10.0),
                    std::invalid_argument);
}

TEST_CASE("network validation") {
    Network net{{{0, 0.0}, {0, 5.0}}, 10.0, 100.0};
    CHECK_THROWS_AS(net.validate(), std::invalid_argument);
    Network empty{{}, 10.0, 100.0};
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
    Network negative{{{0, 0.0}}, 10.0, -1.0};
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
    Network ok{{{0, 0.0}, {1, 5.0}}, 10.0, 100.0};
    CHECK_NOTHROW(ok.validate());
    CHECK_THROWS_AS(ok.node_by_id(7), std::invalid_argument);
    CHECK(ok.distance_of(1) == Catch::Approx(5.0).margin(1e-12));
}

TEST_CASE("transmit energy and allocation totals") {
    CHECK(transmit_energy(3, 10.0) == 300.0);
    CHECK(transmit_energy(0, 10.0) == 0.0);
    CHECK_THROWS_AS(transmit_energy(-1, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(transmit_energy(1, -1.0), std::invalid_argument);

    Network net{{{0, 0.0}, {1, 5.0}}, 10.0, 1000.0};
    Allocation alloc;
    alloc.bits = {{0, 2}, {1, 3}};
    CHECK(energy_of(net, alloc) == Catch::Approx(2 * 100.0 + 3 * 25.0).margin(1e-12));
    CHECK(alloc.total_bits() == 5);
    CHECK(alloc.at(0) == 2);
}

TEST_CASE("distance ordering breaks ties by id") {
    // nodes at 4 and 16 are both 6 away from the fusion node at 10
    Network net{{{2, 16.0}, {1, 4.0}, {0, 0.0}}, 10.0, 100.0};
    std::vector<int> order = ids_by_distance_desc(net);
    REQUIRE(order.size() == 3);
    CHECK(order[0] == 0);
    CHECK(order[1] == 1);
    CHECK(order[2] == 2);
}

TEST_CASE("splitting at an interior fusion node divides the budget by node count") {
    Network net{{{0, 0.0}, {1, 5.0}, {2, 20.0}}, 10.0, 90.0};
    auto [left, right] = split_at_fusion(net);
    REQUIRE(left.size() == 2);
    REQUIRE(right.size() == 1);
    CHECK(left.energy_budget == Catch::Approx(60.0).margin(1e-12));
    CHECK(right.energy_budget == Catch::Approx(30.0).margin(1e-12));
    CHECK(left.share() == Catch::Approx(net.share()).margin(1e-12));
    CHECK(right.share() == Catch::Approx(net.share()).margin(1e-12));
    CHECK(left.fusion_position == 10.0);
    CHECK(right.fusion_position == 10.0);
}

TEST_CASE("splitting leaves end-fusion networks whole") {
    Network net{{{0, 0.0}, {1, 5.0}}, 10.0, 90.0};
    auto [left, right] = split_at_fusion(net);
    CHECK(left.size() == 2);
    CHECK(right.size() == 0);
}

TEST_CASE("a node exactly at the fusion position goes to the left side") {
    Network net{{{0, 0.0}, {1, 10.0}, {2, 20.0}}, 10.0, 90.0};
    auto [left, right] = split_at_fusion(net);
    REQUIRE(left.size() == 2);
    std::set<int> left_ids;
    for (const Node& n : left.nodes) left_ids.insert(n.id);
    CHECK(left_ids.count(1) == 1);
    CHECK(right.size() == 1);
}
