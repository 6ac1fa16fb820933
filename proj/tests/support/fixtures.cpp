#include "support/fixtures.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctigap/stix/bundle_parser.hpp"

namespace ctigap::testing {

namespace {

int g_rel_counter = 0;

std::string attack_url(const std::string& attack_id) {
    return "https://attack.example/techniques/" + attack_id;
}

nlohmann::json mitre_ref(const std::string& attack_id) {
    return {{"source_name", "mitre-attack"},
            {"external_id", attack_id},
            {"url", attack_url(attack_id)}};
}

nlohmann::json base_object(const std::string& type, const std::string& stix_id,
                           const std::string& name, const std::string& attack_id,
                           const std::string& modified) {
    nlohmann::json obj = {
        {"type", type},
        {"id", stix_id},
        {"spec_version", "2.1"},
        {"name", name},
        {"created", "2023-01-01T00:00:00.000Z"},
        {"modified", modified},
    };
    if (!attack_id.empty())
        obj["external_references"] = nlohmann::json::array({mitre_ref(attack_id)});
    return obj;
}

}  // namespace

std::string technique_ref(const std::string& attack_id) {
    return "attack-pattern--" + attack_id;
}
std::string campaign_ref(const std::string& attack_id) {
    return "campaign--" + attack_id;
}
std::string group_ref(const std::string& attack_id) {
    return "intrusion-set--" + attack_id;
}

nlohmann::json technique(const TechniqueSpec& spec) {
    nlohmann::json obj = base_object("attack-pattern", technique_ref(spec.attack_id),
                                     spec.name, spec.attack_id, spec.modified);
    if (!spec.tactics.empty()) {
        nlohmann::json phases = nlohmann::json::array();
        for (const auto& tactic : spec.tactics)
            phases.push_back(
                {{"kill_chain_name", "mitre-attack"}, {"phase_name", tactic}});
        obj["kill_chain_phases"] = std::move(phases);
    }
    if (spec.revoked) obj["revoked"] = true;
    if (spec.deprecated) obj["x_mitre_deprecated"] = true;
    if (spec.sub) obj["x_mitre_is_subtechnique"] = true;
    if (!spec.platforms.empty()) obj["x_mitre_platforms"] = spec.platforms;
    return obj;
}

nlohmann::json campaign(const std::string& attack_id, const std::string& name,
                        const std::string& modified) {
    return base_object("campaign", campaign_ref(attack_id), name, attack_id,
                       modified);
}

nlohmann::json intrusion_set(const std::string& attack_id, const std::string& name,
                             const std::string& modified) {
    return base_object("intrusion-set", group_ref(attack_id), name, attack_id,
                       modified);
}

nlohmann::json software(const std::string& stix_type, const std::string& attack_id,
                        const std::string& name) {
    return base_object(stix_type, stix_type + "--" + attack_id, name, attack_id,
                       "2024-01-01T00:00:00.000Z");
}

nlohmann::json course_of_action(const std::string& stix_id, const std::string& name) {
    return base_object("course-of-action", stix_id, name, "", "2024-01-01T00:00:00.000Z");
}

nlohmann::json relationship(const std::string& rel_type, const std::string& source_ref,
                            const std::string& target_ref, const std::string& modified) {
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "%04d", ++g_rel_counter);
    return {{"type", "relationship"},
            {"id", "relationship--" + std::string(idbuf)},
            {"spec_version", "2.1"},
            {"relationship_type", rel_type},
            {"source_ref", source_ref},
            {"target_ref", target_ref},
            {"created", "2023-01-01T00:00:00.000Z"},
            {"modified", modified}};
}

nlohmann::json bundle(std::vector<nlohmann::json> objects) {
    return {{"type", "bundle"},
            {"id", "bundle--fixture"},
            {"objects", std::move(objects)}};
}

nlohmann::json mini_bundle() {
    g_rel_counter = 0;
    std::vector<nlohmann::json> objs;

    objs.push_back(technique({.attack_id = "T0100",
                              .name = "Active Probe",
                              .tactics = {"reconnaissance"},
                              .platforms = {"PRE"}}));
    objs.push_back(technique({.attack_id = "T1001",
                              .name = "Front Door",
                              .tactics = {"initial-access"},
                              .platforms = {"Linux", "Windows"}}));
    objs.push_back(technique({.attack_id = "T1566",
                              .name = "Lure Mail",
                              .tactics = {"initial-access"}}));
    objs.push_back(technique({.attack_id = "T1059",
                              .name = "Script Runner",
                              .tactics = {"execution"},
                              .platforms = {"Linux", "Windows", "macOS"}}));
    objs.push_back(technique({.attack_id = "T1059.001",
                              .name = "Shell Flavor",
                              .tactics = {"execution"},
                              .sub = true}));
    objs.push_back(technique({.attack_id = "T1003",
                              .name = "Secret Scoop",
                              .tactics = {"credential-access"}}));
    objs.push_back(technique({.attack_id = "T1105",
                              .name = "Tool Ferry",
                              .tactics = {"command-and-control"}}));
    objs.push_back(technique({.attack_id = "T1486",
                              .name = "Data Lock",
                              .tactics = {"impact"}}));
    objs.push_back(technique({.attack_id = "T9000",
                              .name = "Old Trick",
                              .tactics = {"execution"},
                              .revoked = true}));
    objs.push_back(technique({.attack_id = "T9001",
                              .name = "Faded Trick",
                              .tactics = {"execution"},
                              .deprecated = true}));
    objs.push_back(technique({.attack_id = "T9002", .name = "Phaseless"}));

    objs.push_back(campaign("C0001", "Alpha Blast"));
    objs.push_back(campaign("C0002", "Beta Storm"));
    objs.push_back(campaign("C0003", "Gamma Wave"));
    objs.push_back(campaign("C0033", "Quiet Interlude"));

    objs.push_back(intrusion_set("G0001", "Red Fox"));
    objs.push_back(intrusion_set("G0002", "Blue Wolf"));
    objs.push_back(intrusion_set("G0003", "Ghost Crew"));
    objs.push_back(intrusion_set("G0004", "Lone Bear"));

    objs.push_back(software("tool", "S0001", "Carrier Kit"));
    objs.push_back(software("malware", "S0002", "Rust Rat"));
    objs.push_back(course_of_action("course-of-action--CA0001", "Block Scripts"));
    objs.push_back(base_object("identity", "identity--VENDOR", "Vendor Feed", "",
                               "2024-01-01T00:00:00.000Z"));

    auto uses = [&](const std::string& src, const std::string& dst) {
        objs.push_back(relationship("uses", src, dst));
    };

    uses(campaign_ref("C0001"), technique_ref("T1001"));
    uses(campaign_ref("C0001"), technique_ref("T1059"));
    uses(campaign_ref("C0001"), technique_ref("T1059.001"));
    uses(campaign_ref("C0001"), technique_ref("T1105"));
    uses(campaign_ref("C0002"), technique_ref("T1059"));
    uses(campaign_ref("C0002"), technique_ref("T1003"));
    uses(campaign_ref("C0002"), technique_ref("T1105"));
    uses(campaign_ref("C0003"), technique_ref("T0100"));
    uses(campaign_ref("C0003"), technique_ref("T1486"));
    uses(campaign_ref("C0003"), technique_ref("T9000"));
    uses(group_ref("G0001"), technique_ref("T1001"));
    uses(group_ref("G0001"), technique_ref("T1566"));
    uses(group_ref("G0001"), technique_ref("T1059"));
    uses(group_ref("G0001"), technique_ref("T1003"));
    uses(group_ref("G0001"), technique_ref("T1105"));
    uses(group_ref("G0002"), technique_ref("T1059.001"));
    uses(group_ref("G0002"), technique_ref("T1105"));
    uses(group_ref("G0002"), technique_ref("T1486"));
    uses(group_ref("G0004"), technique_ref("T0100"));
    uses(campaign_ref("C0001"), "malware--S0002");
    uses(group_ref("G0001"), "tool--S0001");
    uses("tool--S0001", technique_ref("T1105"));

    objs.push_back(relationship("attributed-to", campaign_ref("C0001"),
                                group_ref("G0001")));
    objs.push_back(relationship("attributed-to", campaign_ref("C0002"),
                                group_ref("G0001")));
    objs.push_back(relationship("attributed-to", campaign_ref("C0002"),
                                group_ref("G0002")));

    objs.push_back(relationship("mitigates", "course-of-action--CA0001",
                                technique_ref("T1059")));
    objs.push_back(relationship("uses", "identity--VENDOR",
                                technique_ref("T1059")));  // non-node source
    objs.push_back(relationship("uses", campaign_ref("C0001"),
                                technique_ref("T7777")));  // dangling target

    return bundle(std::move(objs));
}

std::unique_ptr<World> world_from_bundles(
    const std::vector<std::pair<std::string, nlohmann::json>>& tagged_bundles,
    graph::FilterPolicy policy) {
    auto world = std::make_unique<World>();
    for (const auto& [tag, doc] : tagged_bundles)
        world->corpus.add(stix::parse_bundle(doc.dump(), tag), tag);
    stix::deduplicate(world->corpus);
    world->graph = graph::build_graph(world->corpus);
    world->universe = graph::technique_universe(world->graph, policy);
    return world;
}

std::unique_ptr<World> mini_world(graph::FilterPolicy policy) {
    return world_from_bundles({{"mini", mini_bundle()}}, policy);
}

namespace {

nlohmann::json incident_bundle(const std::string& campaign_id,
                               const std::string& campaign_name,
                               const std::vector<TechniqueSpec>& techniques) {
    std::vector<nlohmann::json> objs;
    objs.push_back(campaign(campaign_id, campaign_name));
    for (const auto& spec : techniques) {
        objs.push_back(technique(spec));
        objs.push_back(relationship("uses", campaign_ref(campaign_id),
                                    technique_ref(spec.attack_id)));
    }
    return bundle(std::move(objs));
}

}  // namespace

nlohmann::json shadowray_bundle() {
    g_rel_counter = 1000;
    return incident_bundle(
        "C0900", "ShadowRay",
        {
            {.attack_id = "T1588.002",
             .name = "Obtain Capabilities: Tool",
             .tactics = {"resource-development"},
             .sub = true},
            {.attack_id = "T1190",
             .name = "Exploit Public-Facing Application",
             .tactics = {"initial-access"}},
            {.attack_id = "T1059.006",
             .name = "Command and Scripting Interpreter: Python",
             .tactics = {"execution"},
             .sub = true},
            {.attack_id = "T1546.004",
             .name = "Event Triggered Execution: Unix Shell Configuration "
                     "Modification",
             .tactics = {"privilege-escalation", "persistence"},
             .sub = true},
            {.attack_id = "T1068",
             .name = "Exploitation for Privilege Escalation",
             .tactics = {"privilege-escalation"}},
            {.attack_id = "T1027.013",
             .name = "Obfuscated Files or Information: Encrypted/Encoded File",
             .tactics = {"defense-evasion"},
             .sub = true},
            {.attack_id = "T1003.008",
             .name = "OS Credential Dumping: /etc/passwd and /etc/shadow",
             .tactics = {"credential-access"},
             .sub = true},
            {.attack_id = "T1016",
             .name = "System Network Configuration Discovery",
             .tactics = {"discovery"}},
            {.attack_id = "T1071.001",
             .name = "Application Layer Protocol: Web Protocols",
             .tactics = {"command-and-control"},
             .sub = true},
            {.attack_id = "T1090",
             .name = "Proxy",
             .tactics = {"command-and-control"}},
            {.attack_id = "T1496.001",
             .name = "Resource Hijacking: Compute Hijacking",
             .tactics = {"impact"},
             .sub = true},
        });
}

nlohmann::json softcell_bundle() {
    g_rel_counter = 2000;
    return incident_bundle(
        "C0901", "Soft Cell",
        {
            {.attack_id = "T1190",
             .name = "Exploit Public-Facing Application",
             .tactics = {"initial-access"}},
            {.attack_id = "T1059",
             .name = "Command and Scripting Interpreter",
             .tactics = {"execution"}},
            {.attack_id = "T1505",
             .name = "Server Software Component",
             .tactics = {"persistence"}},
            {.attack_id = "T1068",
             .name = "Exploitation for Privilege Escalation",
             .tactics = {"privilege-escalation"}},
            {.attack_id = "T1070",
             .name = "Indicator Removal",
             .tactics = {"defense-evasion"}},
            {.attack_id = "T1003",
             .name = "OS Credential Dumping",
             .tactics = {"credential-access"}},
            {.attack_id = "T1018",
             .name = "Remote System Discovery",
             .tactics = {"discovery"}},
            {.attack_id = "T1087",
             .name = "Account Discovery",
             .tactics = {"discovery"}},
            {.attack_id = "T1021",
             .name = "Remote Services",
             .tactics = {"lateral-movement"}},
            {.attack_id = "T1005",
             .name = "Data from Local System",
             .tactics = {"collection"}},
            {.attack_id = "T1041",
             .name = "Exfiltration Over C2 Channel",
             .tactics = {"exfiltration"}},
            {.attack_id = "T1491",
             .name = "Defacement",
             .tactics = {"impact"}},
        });
}

nlohmann::json feed_bundle(std::size_t unique_count, std::size_t duplicate_count) {
    std::vector<nlohmann::json> objs;
    objs.reserve(unique_count + duplicate_count);
    char buf[32];
    for (std::size_t i = 0; i < unique_count; ++i) {
        std::snprintf(buf, sizeof(buf), "%06zu", i);
        objs.push_back({{"type", "indicator"},
                        {"id", "indicator--" + std::string(buf)},
                        {"name", "indicator " + std::string(buf)},
                        {"modified", "2024-06-01T00:00:00.000Z"}});
    }
    for (std::size_t i = 0; i < duplicate_count; ++i) {
        std::snprintf(buf, sizeof(buf), "%06zu", i % unique_count);
        objs.push_back({{"type", "indicator"},
                        {"id", "indicator--" + std::string(buf)},
                        {"name", "stale indicator " + std::string(buf)},
                        {"modified", "2024-01-01T00:00:00.000Z"}});
    }
    return bundle(std::move(objs));
}

// ---- process / environment helpers -----------------------------------------

namespace {

std::string shell_quote(const std::string& arg) {
    std::string out = "'";
    for (char c : arg) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args) {
    CliResult result;
    const char* cli = std::getenv("CTIGAP_CLI");
    if (!cli || !*cli) {
        result.err = "CTIGAP_CLI is not set";
        return result;
    }
    TempDir scratch;
    const std::string out_path = scratch.file("stdout");
    const std::string err_path = scratch.file("stderr");
    std::string command = shell_quote(cli);
    for (const auto& arg : args) command += " " + shell_quote(arg);
    command += " > " + shell_quote(out_path) + " 2> " + shell_quote(err_path);
    const int rc = std::system(command.c_str());
    if (rc == -1) {
        result.err = "system() failed";
        return result;
    }
    result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    return result;
}

std::string fixtures_dir() {
    const char* dir = std::getenv("CTIGAP_FIXTURES");
    return dir ? dir : "";
}

std::optional<std::string> find_attack_bundle() {
    namespace fs = std::filesystem;
    if (const char* env = std::getenv("CTIGAP_ATTACK_BUNDLE"); env && *env)
        if (fs::exists(env)) return std::string(env);
    const std::string fix = fixtures_dir();
    if (!fix.empty()) {
        const fs::path candidate =
            fs::path(fix).parent_path().parent_path() / "data" /
            "enterprise-attack-18.1.json";
        if (fs::exists(candidate)) return candidate.string();
    }
    if (fs::exists("data/enterprise-attack-18.1.json"))
        return std::string("data/enterprise-attack-18.1.json");
    return std::nullopt;
}

TempDir::TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "ctigap.XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path_ = buf.data();
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string TempDir::file(const std::string& name) const {
    return (std::filesystem::path(path_) / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ctigap::testing
