#include <doctest.h>

#include "ctigap/stix/bundle_parser.hpp"
#include "ctigap/stix/corpus.hpp"
#include "ctigap/util/errors.hpp"
#include "support/fixtures.hpp"

using namespace ctigap;
namespace fix = ctigap::testing;

TEST_CASE("bundle parsing separates objects, relationships, and rejects") {
    const auto parsed = stix::parse_bundle(fix::mini_bundle().dump(), "mini");
    CHECK(parsed.objects.size() == 23);
    CHECK(parsed.relationships.size() == 28);
    CHECK(parsed.rejects.empty());
    CHECK(parsed.raw_object_count() == 51);

    std::size_t techniques = 0, campaigns = 0, groups = 0, other = 0;
    for (const auto& obj : parsed.objects) {
        switch (obj.object_type) {
            case stix::ObjectKind::kAttackPattern: ++techniques; break;
            case stix::ObjectKind::kCampaign: ++campaigns; break;
            case stix::ObjectKind::kIntrusionSet: ++groups; break;
            case stix::ObjectKind::kOther: ++other; break;
            default: break;
        }
    }
    CHECK(techniques == 11);
    CHECK(campaigns == 4);
    CHECK(groups == 4);
    CHECK(other == 1);  // the identity object
}

TEST_CASE("typed fields are extracted from recognized objects") {
    const auto parsed = stix::parse_bundle(fix::mini_bundle().dump(), "mini");
    const stix::NormalizedObject* t1059 = nullptr;
    for (const auto& obj : parsed.objects)
        if (obj.stix_id == "attack-pattern--T1059") t1059 = &obj;
    REQUIRE(t1059);
    CHECK(t1059->name == "Script Runner");
    CHECK(t1059->attack_external_id() == "T1059");
    CHECK(t1059->source_tag == "mini");
    REQUIRE(t1059->kill_chain_phases.size() == 1);
    CHECK(t1059->kill_chain_phases[0].kill_chain_name == "mitre-attack");
    CHECK(t1059->kill_chain_phases[0].phase_name == "execution");
    CHECK(t1059->modified_us == 1704067200000000);  // 2024-01-01T00:00:00Z
    CHECK(t1059->created_us == 1672531200000000);   // 2023-01-01T00:00:00Z
    CHECK_FALSE(t1059->revoked);
    CHECK_FALSE(t1059->deprecated);
    // Unrecognized custom fields ride along.
    CHECK(t1059->raw_extras.contains("x_mitre_platforms"));

    const stix::NormalizedObject* t9000 = nullptr;
    for (const auto& obj : parsed.objects)
        if (obj.stix_id == "attack-pattern--T9000") t9000 = &obj;
    REQUIRE(t9000);
    CHECK(t9000->revoked);
}

TEST_CASE("every parsed record re-serializes to its input form") {
    const auto doc = fix::mini_bundle();
    const auto parsed = stix::parse_bundle(doc.dump(), "mini");

    std::map<std::string, nlohmann::json> originals;
    for (const auto& entry : doc["objects"])
        originals[entry["id"].get<std::string>()] = entry;

    for (const auto& obj : parsed.objects) {
        CAPTURE(obj.stix_id);
        CHECK(obj.to_json() == originals.at(obj.stix_id));
    }
    for (const auto& rel : parsed.relationships) {
        CAPTURE(rel.stix_id);
        CHECK(rel.to_json() == originals.at(rel.stix_id));
    }
}

TEST_CASE("custom and unknown fields survive the round trip exactly") {
    nlohmann::json odd = {
        {"type", "attack-pattern"},
        {"id", "attack-pattern--odd"},
        {"name", "Odd One"},
        {"x_custom_matrix", {1, 2, 3}},
        {"nested", {{"deep", {{"value", true}}}}},
        {"description", "has\nnewlines and \"quotes\""},
    };
    const auto parsed =
        stix::parse_bundle(fix::bundle({odd}).dump(), "odd");
    REQUIRE(parsed.objects.size() == 1);
    CHECK(parsed.objects[0].to_json() == odd);
    // Absent optional blocks stay absent rather than becoming empty arrays.
    CHECK_FALSE(parsed.objects[0].to_json().contains("external_references"));
    CHECK_FALSE(parsed.objects[0].to_json().contains("kill_chain_phases"));
}

TEST_CASE("malformed entries are rejected with positions, not fatal") {
    nlohmann::json doc = fix::bundle({
        fix::campaign("C0100", "Fine"),
        nlohmann::json("just a string"),
        {{"id", "mystery--1"}},                          // missing type
        {{"type", "campaign"}},                          // missing id
        {{"type", "relationship"}, {"id", "relationship--x"},
         {"relationship_type", "uses"}, {"source_ref", "a--1"}},  // no target
    });
    const auto parsed = stix::parse_bundle(doc.dump(), "messy");
    CHECK(parsed.objects.size() == 1);
    CHECK(parsed.relationships.empty());
    REQUIRE(parsed.rejects.size() == 4);
    CHECK(parsed.rejects[0].index == 1);
    CHECK(parsed.rejects[0].reason == "object entry is not a JSON object");
    CHECK(parsed.rejects[1].index == 2);
    CHECK(parsed.rejects[1].reason.find("type") != std::string::npos);
    CHECK(parsed.rejects[2].index == 3);
    CHECK(parsed.rejects[2].reason.find("id") != std::string::npos);
    CHECK(parsed.rejects[3].index == 4);
    CHECK(parsed.rejects[3].reason.find("target_ref") != std::string::npos);
    for (const auto& reject : parsed.rejects) CHECK(reject.source_tag == "messy");
}

TEST_CASE("structurally broken documents raise ParseError") {
    CHECK_THROWS_AS(stix::parse_bundle("{not json", "x"), util::ParseError);
    CHECK_THROWS_AS(stix::parse_bundle("[1,2,3]", "x"), util::ParseError);
    CHECK_THROWS_AS(stix::parse_bundle("{\"type\":\"bundle\"}", "x"),
                    util::ParseError);
    try {
        stix::parse_bundle("{\"objects\": [,]}", "x");
        FAIL("expected ParseError");
    } catch (const util::ParseError& e) {
        CHECK(e.byte_offset() > 0);
    }
    CHECK_THROWS_AS(stix::parse_bundle_file("/nonexistent/path.json", "x"),
                    util::IoError);
}

TEST_CASE("deduplication keeps the most recently modified copy") {
    auto v1 = fix::campaign("C0500", "Old Name", "2024-01-01T00:00:00.000Z");
    auto v2 = fix::campaign("C0500", "New Name", "2024-06-01T00:00:00.000Z");

    SUBCASE("newer copy arrives second") {
        stix::Corpus corpus;
        corpus.add(stix::parse_bundle(fix::bundle({v1}).dump(), "a"), "a");
        corpus.add(stix::parse_bundle(fix::bundle({v2}).dump(), "b"), "b");
        const auto dropped = stix::deduplicate(corpus);
        REQUIRE(corpus.objects.size() == 1);
        CHECK(corpus.objects[0].name == "New Name");
        CHECK(corpus.objects[0].source_tag == "b");
        CHECK(dropped.at("a") == 1);  // charged to the losing source
    }
    SUBCASE("newer copy arrives first") {
        stix::Corpus corpus;
        corpus.add(stix::parse_bundle(fix::bundle({v2}).dump(), "a"), "a");
        corpus.add(stix::parse_bundle(fix::bundle({v1}).dump(), "b"), "b");
        stix::deduplicate(corpus);
        REQUIRE(corpus.objects.size() == 1);
        CHECK(corpus.objects[0].name == "New Name");
    }
    SUBCASE("timestamp tie keeps the earliest-ingested source") {
        auto twin = fix::campaign("C0500", "Twin", "2024-01-01T00:00:00.000Z");
        stix::Corpus corpus;
        corpus.add(stix::parse_bundle(fix::bundle({v1}).dump(), "first"), "first");
        corpus.add(stix::parse_bundle(fix::bundle({twin}).dump(), "second"),
                   "second");
        const auto dropped = stix::deduplicate(corpus);
        REQUIRE(corpus.objects.size() == 1);
        CHECK(corpus.objects[0].source_tag == "first");
        CHECK(corpus.objects[0].name == "Old Name");
        CHECK(dropped.at("second") == 1);
    }
    SUBCASE("idempotent") {
        stix::Corpus corpus;
        corpus.add(stix::parse_bundle(fix::bundle({v1}).dump(), "a"), "a");
        corpus.add(stix::parse_bundle(fix::bundle({v2}).dump(), "b"), "b");
        stix::deduplicate(corpus);
        const auto second = stix::deduplicate(corpus);
        CHECK(second.empty());
        CHECK(corpus.objects.size() == 1);
    }
}

TEST_CASE("relationships deduplicate by id as well") {
    auto rel_old = fix::relationship("uses", "campaign--C1", "attack-pattern--T1",
                                     "2024-01-01T00:00:00.000Z");
    auto rel_new = rel_old;
    rel_new["modified"] = "2024-06-01T00:00:00.000Z";
    rel_new["relationship_type"] = "uses";
    stix::Corpus corpus;
    corpus.add(stix::parse_bundle(fix::bundle({rel_old}).dump(), "a"), "a");
    corpus.add(stix::parse_bundle(fix::bundle({rel_new}).dump(), "b"), "b");
    stix::deduplicate(corpus);
    REQUIRE(corpus.relationships.size() == 1);
    CHECK(corpus.relationships[0].source_tag == "b");
}

TEST_CASE("a feed with exact-id duplicates shrinks by the duplicate count") {
    stix::Corpus corpus;
    corpus.add(stix::parse_bundle(fix::feed_bundle(2043, 292).dump(), "feed"),
               "feed");
    CHECK(corpus.objects.size() == 2335);
    const auto dropped = stix::deduplicate(corpus);
    CHECK(corpus.objects.size() == 2043);
    CHECK(dropped.at("feed") == 292);

    const auto stats = stix::corpus_stats(corpus, dropped);
    REQUIRE(stats.per_source.size() == 1);
    CHECK(stats.per_source[0].objects_total == 2335);
    CHECK(stats.per_source[0].objects_unique == 2043);
    CHECK(stats.per_source[0].duplicates == 292);
    CHECK(stats.per_source[0].duplicate_fraction ==
          doctest::Approx(0.125).epsilon(0.002));

    const std::string table = stix::format_stats_table(stats);
    CHECK(table.find("2,335") != std::string::npos);
    CHECK(table.find("2,043") != std::string::npos);
    CHECK(table.find("12.5%") != std::string::npos);
    CHECK(table.find("Total") != std::string::npos);
}

TEST_CASE("corpus statistics aggregate across sources in ingest order") {
    stix::Corpus corpus;
    corpus.add(stix::parse_bundle(fix::mini_bundle().dump(), "mini"), "mini");
    corpus.add(stix::parse_bundle(fix::feed_bundle(10, 3).dump(), "feed"), "feed");
    const auto dropped = stix::deduplicate(corpus);
    const auto stats = stix::corpus_stats(corpus, dropped);

    REQUIRE(stats.per_source.size() == 2);
    CHECK(stats.per_source[0].source == "mini");
    CHECK(stats.per_source[1].source == "feed");
    CHECK(stats.per_source[0].objects_total == 51);
    CHECK(stats.per_source[0].duplicates == 0);
    CHECK(stats.per_source[1].objects_total == 13);
    CHECK(stats.per_source[1].duplicates == 3);
    CHECK(stats.total_objects == 64);
    CHECK(stats.total_unique == 61);
    CHECK(stats.total_duplicates == 3);
    CHECK(stats.total_rejects == 0);
    CHECK(stats.objects_by_type.at("attack-pattern") == 11);
    CHECK(stats.objects_by_type.at("relationship") == 28);
    CHECK(stats.objects_by_type.at("indicator") == 10);

    const auto doc = stix::stats_to_json(stats);
    CHECK(doc["total_objects"] == 64);
    CHECK(doc["per_source"].size() == 2);
}

TEST_CASE("corpus persistence round-trips losslessly") {
    stix::Corpus corpus;
    corpus.add(stix::parse_bundle(fix::mini_bundle().dump(), "mini"), "mini");
    nlohmann::json broken = fix::bundle({{{"id", "mystery--1"}}});
    corpus.add(stix::parse_bundle(broken.dump(), "messy"), "messy");
    stix::deduplicate(corpus);

    fix::TempDir tmp;
    const std::string path = tmp.file("corpus.json");
    stix::save_corpus(corpus, path);
    const auto loaded = stix::load_corpus(path);

    CHECK(loaded.source_order == corpus.source_order);
    REQUIRE(loaded.objects.size() == corpus.objects.size());
    REQUIRE(loaded.relationships.size() == corpus.relationships.size());
    REQUIRE(loaded.rejects.size() == 1);
    CHECK(loaded.rejects[0].source_tag == "messy");
    for (std::size_t i = 0; i < corpus.objects.size(); ++i) {
        CHECK(loaded.objects[i].to_json() == corpus.objects[i].to_json());
        CHECK(loaded.objects[i].source_tag == corpus.objects[i].source_tag);
    }
    for (std::size_t i = 0; i < corpus.relationships.size(); ++i)
        CHECK(loaded.relationships[i].to_json() ==
              corpus.relationships[i].to_json());

    // Serialization itself is deterministic.
    CHECK(stix::corpus_to_json(corpus).dump(2) ==
          stix::corpus_to_json(loaded).dump(2));
}
