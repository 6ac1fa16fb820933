#include <doctest.h>

#include <algorithm>

#include "ctigap/graph/behavior_graph.hpp"
#include "ctigap/graph/matrix.hpp"
#include "support/fixtures.hpp"

using namespace ctigap;
namespace fix = ctigap::testing;

TEST_CASE("every relationship becomes an edge or is quarantined, never lost") {
    auto world = fix::mini_world();
    const auto& g = world->graph;
    CHECK(g.nodes.size() == 22);  // identity object is not a node
    CHECK(g.edges.size() + g.quarantined.size() ==
          world->corpus.relationships.size());
    CHECK(g.edges.size() == 26);
    REQUIRE(g.quarantined.size() == 2);

    std::vector<std::string> reasons;
    for (const auto& q : g.quarantined) reasons.push_back(q.reason);
    std::sort(reasons.begin(), reasons.end());
    CHECK(reasons[0] == "dangling endpoint attack-pattern--T7777");
    CHECK(reasons[1] == "non-behavioral endpoint identity--VENDOR");
}

TEST_CASE("edges keep their relationship kind") {
    auto world = fix::mini_world();
    std::size_t uses = 0, attributed = 0, mitigates = 0;
    for (const auto& e : world->graph.edges) {
        if (e.kind == stix::RelationshipKind::kUses) ++uses;
        if (e.kind == stix::RelationshipKind::kAttributedTo) ++attributed;
        if (e.kind == stix::RelationshipKind::kMitigates) ++mitigates;
    }
    CHECK(uses == 22);
    CHECK(attributed == 3);
    CHECK(mitigates == 1);
}

TEST_CASE("entities resolve by external id, exact name, then folded name") {
    auto world = fix::mini_world();
    const auto& g = world->graph;

    const auto* by_id = g.find_entity(graph::NodeKind::kCampaign, "C0001");
    REQUIRE(by_id);
    CHECK(by_id->name == "Alpha Blast");

    const auto* by_name = g.find_entity(graph::NodeKind::kCampaign, "Alpha Blast");
    REQUIRE(by_name);
    CHECK(by_name->external_id == "C0001");

    const auto* folded = g.find_entity(graph::NodeKind::kCampaign, "alpha blast");
    REQUIRE(folded);
    CHECK(folded->external_id == "C0001");

    CHECK(g.find_entity(graph::NodeKind::kCampaign, "No Such") == nullptr);
    // Kind is part of the key: C0001 is not an intrusion set.
    CHECK(g.find_entity(graph::NodeKind::kIntrusionSet, "C0001") == nullptr);
}

TEST_CASE("case-folded name collisions resolve to nothing rather than guessing") {
    auto world = fix::world_from_bundles(
        {{"dup",
          fix::bundle({fix::campaign("C0801", "Echo Point"),
                       fix::campaign("C0802", "echo point")})}});
    const auto& g = world->graph;
    CHECK(g.find_entity(graph::NodeKind::kCampaign, "Echo Point") != nullptr);
    CHECK(g.find_entity(graph::NodeKind::kCampaign, "echo POINT") == nullptr);
}

TEST_CASE("attribution pairs are complete and sorted") {
    auto world = fix::mini_world();
    const auto pairs = graph::campaign_group_attributions(world->graph);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0].campaign_id == "C0001");
    CHECK(pairs[0].group_id == "G0001");
    CHECK(pairs[0].campaign_name == "Alpha Blast");
    CHECK(pairs[0].group_name == "Red Fox");
    CHECK(pairs[1].campaign_id == "C0002");
    CHECK(pairs[1].group_id == "G0001");
    CHECK(pairs[2].campaign_id == "C0002");
    CHECK(pairs[2].group_id == "G0002");
}

TEST_CASE("one campaign attributed to several groups yields one pair each") {
    auto world = fix::mini_world();
    const auto pairs = graph::campaign_group_attributions(world->graph);
    std::size_t c0002 = 0;
    for (const auto& p : pairs)
        if (p.campaign_id == "C0002") ++c0002;
    CHECK(c0002 == 2);
}

TEST_CASE("default universe drops revoked, deprecated, and phaseless techniques") {
    auto world = fix::mini_world();
    std::vector<std::string> ids;
    for (const auto& t : world->universe) ids.push_back(t.attack_id);
    const std::vector<std::string> expected = {"T0100", "T1001",     "T1566",
                                               "T1059", "T1059.001", "T1003",
                                               "T1105", "T1486"};
    CHECK(ids == expected);

    const auto& sub = world->universe[4];
    CHECK(sub.attack_id == "T1059.001");
    CHECK(sub.is_subtechnique);
    CHECK(sub.parent_attack_id == "T1059");
    CHECK(sub.tactic_names == std::vector<std::string>{"execution"});

    const auto& t1059 = world->universe[3];
    CHECK(t1059.platforms ==
          std::vector<std::string>{"Linux", "Windows", "macOS"});
    CHECK_FALSE(t1059.is_subtechnique);
}

TEST_CASE("the unfiltered universe keeps lifecycle-flagged techniques, last") {
    auto world = fix::mini_world(graph::FilterPolicy::kNone);
    std::vector<std::string> ids;
    for (const auto& t : world->universe) ids.push_back(t.attack_id);
    const std::vector<std::string> expected = {
        "T0100", "T1001", "T1566", "T1059", "T1059.001", "T9000",
        "T9001", "T1003", "T1105", "T1486", "T9002"};
    CHECK(ids == expected);  // T9002 (no tactic) sorts after every tactic
}

TEST_CASE("campaign matrix has exact cells and reports empty rows") {
    auto world = fix::mini_world();
    const auto m = graph::entity_technique_matrix(
        world->graph, graph::NodeKind::kCampaign, world->universe);

    CHECK(m.row_ids == std::vector<std::string>{"C0001", "C0002", "C0003"});
    CHECK(m.row_names ==
          std::vector<std::string>{"Alpha Blast", "Beta Storm", "Gamma Wave"});
    CHECK(m.excluded_rows == std::vector<std::string>{"C0033"});
    REQUIRE(m.cols() == 8);

    using Row = std::vector<std::uint8_t>;
    CHECK(m.cells[0] == Row{0, 1, 0, 1, 1, 0, 1, 0});
    CHECK(m.cells[1] == Row{0, 0, 0, 1, 0, 1, 1, 0});
    CHECK(m.cells[2] == Row{1, 0, 0, 0, 0, 0, 0, 1});
    CHECK(m.ones_count() == 9);

    CHECK(m.row_index("C0002") == 1);
    CHECK(m.row_index("Beta Storm") == 1);
    CHECK_FALSE(m.row_index("C0033"));
    CHECK_FALSE(m.row_index("nope"));
}

TEST_CASE("group matrix rows never inherit parent techniques from children") {
    auto world = fix::mini_world();
    const auto m = graph::entity_technique_matrix(
        world->graph, graph::NodeKind::kIntrusionSet, world->universe);

    CHECK(m.row_ids == std::vector<std::string>{"G0001", "G0002", "G0004"});
    CHECK(m.excluded_rows == std::vector<std::string>{"G0003"});

    using Row = std::vector<std::uint8_t>;
    CHECK(m.cells[0] == Row{0, 1, 1, 1, 0, 1, 1, 0});
    // G0002 uses the sub-technique T1059.001 only: the parent column stays 0.
    CHECK(m.cells[1] == Row{0, 0, 0, 0, 1, 0, 1, 1});
    CHECK(m.cells[2] == Row{1, 0, 0, 0, 0, 0, 0, 0});
}

TEST_CASE("matrix csv is byte-identical across independent rebuilds") {
    auto a = fix::mini_world();
    auto b = fix::mini_world();
    const auto ma = graph::entity_technique_matrix(
        a->graph, graph::NodeKind::kCampaign, a->universe);
    const auto mb = graph::entity_technique_matrix(
        b->graph, graph::NodeKind::kCampaign, b->universe);
    const std::string csv_a = graph::matrix_to_csv(ma);
    const std::string csv_b = graph::matrix_to_csv(mb);
    CHECK(csv_a == csv_b);
    CHECK(csv_a.substr(0, 15) == "entity_id,T0100");
    CHECK(csv_a.find("C0001,0,1,0,1,1,0,1,0") != std::string::npos);
    CHECK(graph::matrix_to_json(ma) == graph::matrix_to_json(mb));
}

TEST_CASE("graph json carries nodes, edges, and quarantine information") {
    auto world = fix::mini_world();
    const auto doc = graph::graph_to_json(world->graph);
    CHECK(doc["nodes"].size() == 22);
    CHECK(doc["edges"].size() == 26);
    CHECK(doc["quarantined"].size() == 2);
}
