#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctigap/graph/behavior_graph.hpp"
#include "ctigap/graph/matrix.hpp"
#include "ctigap/stix/corpus.hpp"

namespace ctigap::testing {

// ---- JSON object builders --------------------------------------------------

struct TechniqueSpec {
    std::string attack_id;
    std::string name;
    std::vector<std::string> tactics = {};  // kill-chain phase names, bundle order
    bool revoked = false;
    bool deprecated = false;
    bool sub = false;
    std::vector<std::string> platforms = {};
    std::string modified = "2024-01-01T00:00:00.000Z";
};

nlohmann::json technique(const TechniqueSpec& spec);
nlohmann::json campaign(const std::string& attack_id, const std::string& name,
                        const std::string& modified = "2024-01-01T00:00:00.000Z");
nlohmann::json intrusion_set(const std::string& attack_id, const std::string& name,
                             const std::string& modified = "2024-01-01T00:00:00.000Z");
nlohmann::json software(const std::string& stix_type, const std::string& attack_id,
                        const std::string& name);
nlohmann::json course_of_action(const std::string& stix_id, const std::string& name);
nlohmann::json relationship(const std::string& rel_type, const std::string& source_ref,
                            const std::string& target_ref,
                            const std::string& modified = "2024-01-01T00:00:00.000Z");
nlohmann::json bundle(std::vector<nlohmann::json> objects);

// Deterministic fixture STIX ids ("attack-pattern--T1059", "campaign--C0001").
std::string technique_ref(const std::string& attack_id);
std::string campaign_ref(const std::string& attack_id);
std::string group_ref(const std::string& attack_id);

// ---- canned worlds ----------------------------------------------------------

// Small self-consistent corpus exercising every structural case:
//   techniques  T0100(recon) T1001,T1566(initial-access) T1059+T1059.001(execution)
//               T1003(cred-access) T1105(c2) T1486(impact)
//               filtered: T9000 revoked, T9001 deprecated, T9002 no phases
//   campaigns   C0001{T1001,T1059,T1059.001,T1105} C0002{T1059,T1003,T1105}
//               C0003{T0100,T1486,T9000} C0033{} (empty)
//   groups      G0001{T1001,T1566,T1059,T1003,T1105} G0002{T1059.001,T1105,T1486}
//               G0003{} (empty) G0004{T0100} (unattributed)
//   attribution C0001->G0001, C0002->G0001, C0002->G0002
//   extras      tool S0001 (G0001 uses it; it uses T1105), malware S0002
//               (C0001 uses it), course-of-action mitigates T1059 (edge),
//               identity--VENDOR uses T1059 (quarantined: non-behavioral),
//               dangling uses edge from C0001 (quarantined: dangling)
nlohmann::json mini_bundle();

// mini_bundle parsed, deduplicated and graphed. Heap-allocated because the
// graph points into the corpus.
struct World {
    stix::Corpus corpus;
    graph::BehaviorGraph graph;
    std::vector<graph::Technique> universe;
};
std::unique_ptr<World> mini_world(graph::FilterPolicy policy = graph::FilterPolicy::kDefault);

// Builds a world from any bundle list (tags parallel to bundles).
std::unique_ptr<World> world_from_bundles(
    const std::vector<std::pair<std::string, nlohmann::json>>& tagged_bundles,
    graph::FilterPolicy policy = graph::FilterPolicy::kDefault);

// Published-incident fixtures: one campaign each, full technique lists with
// canonical tactics.
nlohmann::json shadowray_bundle();  // C0900 "ShadowRay", 11 techniques
nlohmann::json softcell_bundle();   // C0901 "Soft Cell", 12 techniques

// Feed-style dedup fixture: `unique_count` distinct objects plus
// `duplicate_count` stale re-statements of the first ids.
nlohmann::json feed_bundle(std::size_t unique_count, std::size_t duplicate_count);

// ---- process / environment helpers -----------------------------------------

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

// Runs the ctigap binary (path from CTIGAP_CLI) with the given arguments.
CliResult run_cli(const std::vector<std::string>& args);

// tests/fixtures directory (from CTIGAP_FIXTURES) or empty.
std::string fixtures_dir();

// The pinned full-size corpus bundle, if present: CTIGAP_ATTACK_BUNDLE, then
// data/enterprise-attack-18.1.json next to the fixtures directory.
std::optional<std::string> find_attack_bundle();

// RAII temp directory under TMPDIR, removed recursively on destruction.
class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const;

  private:
    std::string path_;
};

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace ctigap::testing
