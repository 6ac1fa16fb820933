#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>

#include <CLI11.hpp>

#include "ctigap/caldera/export.hpp"
#include "ctigap/graph/behavior_graph.hpp"
#include "ctigap/graph/matrix.hpp"
#include "ctigap/metrics/metrics.hpp"
#include "ctigap/scaffold/scaffold.hpp"
#include "ctigap/stix/bundle_parser.hpp"
#include "ctigap/stix/corpus.hpp"
#include "ctigap/translation/translation.hpp"
#include "ctigap/util/errors.hpp"
#include "ctigap/util/format.hpp"

namespace {

using ctigap::util::fixed1;
using ctigap::util::fixed3;
using ctigap::util::pct1;
using ctigap::util::pct2;
using ctigap::util::with_thousands;

struct SourceOptions {
    std::vector<std::string> specs;  // tag=path
    std::string corpus_file;
    std::string policy = "default";
};

void add_source_options(CLI::App* cmd, SourceOptions& opts, bool with_policy = true) {
    auto* source = cmd->add_option("--source", opts.specs,
                                   "STIX bundle as tag=path (repeatable)");
    cmd->add_option("--corpus", opts.corpus_file,
                    "previously ingested corpus file (alternative to --source)")
        ->excludes(source);
    if (with_policy)
        cmd->add_option("--filter-policy", opts.policy,
                        "technique lifecycle filter: default|none")
            ->check(CLI::IsMember({"default", "none"}));
}

struct Workspace {
    ctigap::stix::Corpus corpus;
    std::map<std::string, std::size_t> duplicates;
    ctigap::graph::BehaviorGraph graph;
    std::vector<ctigap::graph::Technique> universe;
};

std::unique_ptr<Workspace> load_workspace(const SourceOptions& opts,
                                          bool build_graph = true) {
    if (opts.specs.empty() && opts.corpus_file.empty())
        throw ctigap::util::DomainError(
            "no input given: pass --source tag=path or --corpus file");
    auto ws = std::make_unique<Workspace>();
    if (!opts.corpus_file.empty()) {
        ws->corpus = ctigap::stix::load_corpus(opts.corpus_file);
    } else {
        for (const auto& spec : opts.specs) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
                throw ctigap::util::DomainError("bad --source (want tag=path): " +
                                                spec);
            const std::string tag = spec.substr(0, eq);
            const std::string path = spec.substr(eq + 1);
            ws->corpus.add(ctigap::stix::parse_bundle_file(path, tag), tag);
        }
    }
    ws->duplicates = ctigap::stix::deduplicate(ws->corpus);
    if (build_graph) {
        ws->graph = ctigap::graph::build_graph(ws->corpus);
        const auto policy = ctigap::graph::filter_policy_from_string(opts.policy);
        ws->universe = ctigap::graph::technique_universe(
            ws->graph, policy.value_or(ctigap::graph::FilterPolicy::kDefault));
    }
    return ws;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ctigap::util::IoError("cannot write " + path);
    out << content;
    if (!out) throw ctigap::util::IoError("error writing " + path);
}

void write_dir_file(const std::string& dir, const std::string& name,
                    const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ctigap::util::IoError("cannot create directory " + dir + ": " +
                                    ec.message());
    write_output((fs::path(dir) / name).string(), content);
}

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// ---- metrics assembly ------------------------------------------------------

struct MetricsBundle {
    ctigap::graph::TechniqueMatrix campaigns;
    ctigap::graph::TechniqueMatrix groups;
    std::vector<ctigap::graph::Attribution> attributions;
    ctigap::metrics::FrequencyTable frequency;
    std::vector<std::pair<std::string, std::string>> universal_pairs;
    ctigap::metrics::AsymmetryReport asymmetry;
    ctigap::metrics::ClusterResult campaign_clusters;
    double campaign_coverage = 0.0;
    double group_coverage = 0.0;
    double campaign_sparsity = 0.0;
    double group_sparsity = 0.0;
    std::size_t campaign_used = 0;
    std::size_t group_used = 0;
};

MetricsBundle compute_metrics(const Workspace& ws) {
    MetricsBundle m;
    m.campaigns = ctigap::graph::entity_technique_matrix(
        ws.graph, ctigap::graph::NodeKind::kCampaign, ws.universe);
    m.groups = ctigap::graph::entity_technique_matrix(
        ws.graph, ctigap::graph::NodeKind::kIntrusionSet, ws.universe);
    m.attributions = ctigap::graph::campaign_group_attributions(ws.graph);
    m.frequency = ctigap::metrics::technique_frequency(m.campaigns);
    m.universal_pairs = ctigap::metrics::universal_cooccurrence(m.campaigns);
    m.asymmetry = ctigap::metrics::asymmetry_report(m.campaigns, m.groups,
                                                    m.attributions);
    m.campaign_coverage = ctigap::metrics::coverage(m.campaigns);
    m.group_coverage = ctigap::metrics::coverage(m.groups);
    m.campaign_used = m.asymmetry.campaign_used;
    m.group_used = m.asymmetry.group_used;
    if (m.campaigns.rows() > 0 && m.campaigns.cols() > 0)
        m.campaign_sparsity = ctigap::metrics::sparsity(m.campaigns);
    if (m.groups.rows() > 0 && m.groups.cols() > 0)
        m.group_sparsity = ctigap::metrics::sparsity(m.groups);
    if (m.campaigns.rows() >= 3)
        m.campaign_clusters = ctigap::metrics::cluster(m.campaigns);
    return m;
}

nlohmann::json frequency_head_json(const ctigap::metrics::FrequencyTable& table,
                                   std::size_t n) {
    nlohmann::json head = nlohmann::json::array();
    for (std::size_t i = 0; i < table.entries.size() && i < n; ++i) {
        const auto& e = table.entries[i];
        if (e.row_count == 0) break;
        head.push_back({{"attack_id", e.attack_id},
                        {"rows", e.row_count},
                        {"fraction", e.fraction}});
    }
    return head;
}

nlohmann::json metrics_json(const Workspace& ws, const MetricsBundle& m,
                            const std::string& policy) {
    std::size_t attack_patterns_raw = 0;
    for (const auto& obj : ws.corpus.objects)
        if (obj.object_type == ctigap::stix::ObjectKind::kAttackPattern)
            ++attack_patterns_raw;

    nlohmann::json campaign_cluster = nlohmann::json::object();
    if (!m.campaign_clusters.row_ids.empty() || m.campaign_clusters.degenerate) {
        nlohmann::json per_k = nlohmann::json::array();
        for (const auto& [k, score] : m.campaign_clusters.per_k_scores)
            per_k.push_back({{"k", k}, {"silhouette", score}});
        campaign_cluster = {{"k", m.campaign_clusters.k},
                            {"silhouette", m.campaign_clusters.silhouette},
                            {"degenerate", m.campaign_clusters.degenerate},
                            {"per_k", std::move(per_k)}};
    }

    nlohmann::json universal = nlohmann::json::array();
    for (const auto& [a, b] : m.universal_pairs)
        universal.push_back({{"first", a}, {"second", b}});

    return {
        {"universe",
         {{"policy", policy},
          {"size", ws.universe.size()},
          {"attack_patterns_raw", attack_patterns_raw}}},
        {"campaigns",
         {{"rows", m.campaigns.rows()},
          {"excluded_rows", m.campaigns.excluded_rows},
          {"used_techniques", m.campaign_used},
          {"coverage", m.campaign_coverage},
          {"coverage_pct", pct1(m.campaign_coverage)},
          {"sparsity", m.campaign_sparsity},
          {"ones", m.campaigns.ones_count()},
          {"cluster", std::move(campaign_cluster)}}},
        {"intrusion_sets",
         {{"rows", m.groups.rows()},
          {"excluded_rows", m.groups.excluded_rows},
          {"used_techniques", m.group_used},
          {"coverage", m.group_coverage},
          {"coverage_pct", pct2(m.group_coverage)},
          {"sparsity", m.group_sparsity},
          {"ones", m.groups.ones_count()},
          {"mean_per_row",
           m.groups.rows() == 0
               ? 0.0
               : static_cast<double>(m.groups.ones_count()) / m.groups.rows()}}},
        {"frequency_head", frequency_head_json(m.frequency, 10)},
        {"universal_technique_pairs", std::move(universal)},
        {"attribution_pairs", m.attributions.size()},
        {"asymmetry",
         {{"campaign_used", m.asymmetry.campaign_used},
          {"group_used", m.asymmetry.group_used},
          {"campaign_only", m.asymmetry.campaign_only},
          {"campaign_only_vs_attributed", m.asymmetry.campaign_only_vs_attributed},
          {"campaign_only_per_campaign", m.asymmetry.campaign_only_per_campaign},
          {"group_only_vs_campaigns", m.asymmetry.group_only_vs_campaigns}}}};
}

std::string metrics_text(const Workspace& ws, const MetricsBundle& m) {
    std::string out;
    out += "Technique universe: " + with_thousands(ws.universe.size()) + "\n";
    out += "Campaign rows: " + with_thousands(m.campaigns.rows());
    if (!m.campaigns.excluded_rows.empty()) {
        out += " (excluded:";
        for (const auto& id : m.campaigns.excluded_rows) out += " " + id;
        out += ")";
    }
    out += "\n";
    out += "Campaign coverage: " + std::to_string(m.campaign_used) + "/" +
           std::to_string(ws.universe.size()) + " = " + pct1(m.campaign_coverage) +
           "\n";
    out += "Campaign sparsity: " + pct1(m.campaign_sparsity) + "\n";
    out += "Intrusion-set rows: " + with_thousands(m.groups.rows()) + " (" +
           with_thousands(m.groups.excluded_rows.size()) + " excluded)\n";
    out += "Intrusion-set coverage: " + std::to_string(m.group_used) + "/" +
           std::to_string(ws.universe.size()) + " = " + pct2(m.group_coverage) +
           "\n";
    out += "Intrusion-set technique references: " +
           with_thousands(m.groups.ones_count());
    if (m.groups.rows() > 0)
        out += " (mean " +
               fixed1(static_cast<double>(m.groups.ones_count()) / m.groups.rows()) +
               " per row)";
    out += "\n";
    out += "Frequency head:";
    bool any = false;
    for (std::size_t i = 0; i < m.frequency.entries.size() && i < 5; ++i) {
        const auto& e = m.frequency.entries[i];
        if (e.row_count == 0) break;
        out += " " + e.attack_id + "=" + std::to_string(e.row_count);
        any = true;
    }
    if (!any) out += " (none)";
    out += "\n";
    out += "Universal technique pairs: " + std::to_string(m.universal_pairs.size()) +
           "\n";
    if (!m.campaign_clusters.row_ids.empty() || m.campaign_clusters.degenerate) {
        if (m.campaign_clusters.degenerate) {
            out += "Campaign clustering: degenerate (all pairwise distances zero)\n";
        } else {
            out += "Campaign clustering: k=" + std::to_string(m.campaign_clusters.k) +
                   ", silhouette " + fixed3(m.campaign_clusters.silhouette) + "\n";
        }
    }
    out += "Asymmetry: campaigns use " + std::to_string(m.asymmetry.campaign_used) +
           ", " + std::to_string(m.asymmetry.campaign_only) +
           " in no intrusion-set profile; intrusion sets use " +
           std::to_string(m.asymmetry.group_used) + ", " +
           std::to_string(m.asymmetry.group_only_vs_campaigns) +
           " in no campaign\n";
    return out;
}

std::string overlap_csv(const ctigap::graph::TechniqueMatrix& matrix) {
    const auto overlap = ctigap::metrics::overlap_matrix(matrix);
    std::string out = "entity_id";
    for (const auto& id : matrix.row_ids) out += "," + id;
    out += "\n";
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        out += matrix.row_ids[i];
        for (std::size_t j = 0; j < matrix.rows(); ++j)
            out += "," + csv_double(overlap[i][j]);
        out += "\n";
    }
    return out;
}

std::string frequency_csv(const ctigap::metrics::FrequencyTable& table) {
    std::string out = "attack_id,rows,fraction\n";
    for (const auto& e : table.entries)
        out += e.attack_id + "," + std::to_string(e.row_count) + "," +
               csv_double(e.fraction) + "\n";
    return out;
}

std::string embedding_csv(const ctigap::graph::TechniqueMatrix& matrix) {
    const auto distances = ctigap::metrics::jaccard_distance_matrix(matrix);
    const auto embedding = ctigap::metrics::embed_2d(distances);
    std::string out = "entity_id,x,y\n";
    for (std::size_t i = 0; i < matrix.rows(); ++i)
        out += matrix.row_ids[i] + "," + csv_double(embedding.coords[i][0]) + "," +
               csv_double(embedding.coords[i][1]) + "\n";
    return out;
}

// ---- report ----------------------------------------------------------------

struct AlignmentSummary {
    std::vector<ctigap::metrics::AlignmentScores> pairs;  // resolvable pairs
    std::size_t unattributed_campaigns = 0;
    std::vector<std::string> unattributed_ids;
};

AlignmentSummary summarize_alignment(const MetricsBundle& m) {
    AlignmentSummary summary;
    for (const auto& att : m.attributions) {
        auto c = m.campaigns.row_index(att.campaign_id);
        auto g = m.groups.row_index(att.group_id);
        if (!c || !g) continue;
        auto scores = ctigap::metrics::alignment(m.campaigns.cells[*c],
                                                 m.groups.cells[*g],
                                                 att.campaign_id, att.group_id);
        summary.pairs.push_back(std::move(scores));
    }
    std::set<std::string> attributed;
    for (const auto& att : m.attributions) attributed.insert(att.campaign_id);
    for (const auto& id : m.campaigns.row_ids)
        if (!attributed.count(id)) {
            ++summary.unattributed_campaigns;
            summary.unattributed_ids.push_back(id);
        }
    return summary;
}

std::string campaign_display(const MetricsBundle& m, const std::string& row_id) {
    auto idx = m.campaigns.row_index(row_id);
    if (idx && !m.campaigns.row_names[*idx].empty() &&
        m.campaigns.row_names[*idx] != row_id)
        return row_id + " (" + m.campaigns.row_names[*idx] + ")";
    return row_id;
}

std::string group_display(const MetricsBundle& m, const std::string& row_id) {
    auto idx = m.groups.row_index(row_id);
    if (idx && !m.groups.row_names[*idx].empty() &&
        m.groups.row_names[*idx] != row_id)
        return row_id + " (" + m.groups.row_names[*idx] + ")";
    return row_id;
}

std::string report_text(const Workspace& ws, const MetricsBundle& m) {
    AlignmentSummary align = summarize_alignment(m);
    auto worst = align.pairs;
    std::sort(worst.begin(), worst.end(),
              [](const auto& a, const auto& b) {
                  if (a.campaign_in_group != b.campaign_in_group)
                      return a.campaign_in_group < b.campaign_in_group;
                  return std::tie(a.campaign_id, a.group_id) <
                         std::tie(b.campaign_id, b.group_id);
              });

    const std::size_t universe = ws.universe.size();
    std::string out;
    auto heading = [&](const std::string& title) {
        out += title + "\n" + std::string(title.size(), '-') + "\n";
    };

    heading("Campaign heterogeneity");
    std::size_t universal_techniques = 0;
    for (const auto& e : m.frequency.entries)
        if (e.row_count == m.campaigns.rows() && m.campaigns.rows() > 0)
            ++universal_techniques;
    out += "Across " + std::to_string(m.campaigns.rows()) + " campaign profiles, " +
           std::to_string(universal_techniques) +
           " techniques appear in every campaign and " +
           std::to_string(m.universal_pairs.size()) +
           " technique pairs co-occur universally.\n";
    if (!m.frequency.entries.empty() && m.frequency.entries[0].row_count > 0) {
        const auto& top = m.frequency.entries[0];
        out += "The most frequent technique, " + top.attack_id + ", appears in " +
               std::to_string(top.row_count) + " of " +
               std::to_string(m.campaigns.rows()) + " campaigns (" +
               pct1(top.fraction) + ").\n";
    }
    if (m.campaign_clusters.degenerate) {
        out += "Clustering is degenerate: all campaign profiles are identical.\n";
    } else if (!m.campaign_clusters.row_ids.empty()) {
        out += "Best clustering: k=" + std::to_string(m.campaign_clusters.k) +
               " with silhouette " + fixed3(m.campaign_clusters.silhouette) + ".\n";
    }
    out += "\n";

    heading("Technique dispersion");
    out += std::to_string(m.campaign_used) + " of " + std::to_string(universe) +
           " techniques (" + pct1(m.campaign_coverage) +
           ") appear in at least one campaign; campaign matrix sparsity is " +
           pct1(m.campaign_sparsity) + ".\n";
    out += "Frequency head:";
    for (std::size_t i = 0; i < m.frequency.entries.size() && i < 5; ++i) {
        const auto& e = m.frequency.entries[i];
        if (e.row_count == 0) break;
        out += " " + e.attack_id + " (" + std::to_string(e.row_count) + ")";
    }
    out += "\n\n";

    heading("Intrusion-set coverage");
    const std::size_t group_total = m.groups.rows() + m.groups.excluded_rows.size();
    out += "Of " + std::to_string(group_total) + " intrusion sets, " +
           std::to_string(m.groups.rows()) + " (" +
           pct1(group_total == 0
                    ? 0.0
                    : static_cast<double>(m.groups.rows()) / group_total) +
           ") reference at least one technique and " +
           std::to_string(m.groups.excluded_rows.size()) + " (" +
           pct1(group_total == 0
                    ? 0.0
                    : static_cast<double>(m.groups.excluded_rows.size()) /
                          group_total) +
           ") reference none.\n";
    out += "They account for " + std::to_string(m.group_used) + " of " +
           std::to_string(universe) + " techniques (" + pct2(m.group_coverage) +
           ") via " + with_thousands(m.groups.ones_count()) +
           " technique references";
    if (m.groups.rows() > 0)
        out += " (mean " +
               fixed1(static_cast<double>(m.groups.ones_count()) / m.groups.rows()) +
               " per populated set)";
    out += ".\n\n";

    heading("Structural asymmetry");
    out += "Campaigns use " + std::to_string(m.asymmetry.campaign_used) +
           " techniques; " + std::to_string(m.asymmetry.campaign_only) +
           " of them appear in no intrusion-set profile (" +
           std::to_string(m.asymmetry.campaign_only_vs_attributed) +
           " measured against attributed groups only, " +
           std::to_string(m.asymmetry.campaign_only_per_campaign) +
           " when each campaign is compared with its own groups).\n";
    out += "Intrusion sets use " + std::to_string(m.asymmetry.group_used) +
           " techniques, including " +
           std::to_string(m.asymmetry.group_only_vs_campaigns) +
           " that appear in no campaign.\n\n";

    heading("Broken campaign-group mapping");
    out += std::to_string(align.unattributed_campaigns) + " of " +
           std::to_string(m.campaigns.rows()) +
           " campaign rows have no attribution edge.\n";
    if (!align.pairs.empty()) {
        double mean = 0.0;
        std::size_t contradicting = 0;
        for (const auto& p : align.pairs) {
            mean += p.campaign_in_group;
            if (p.campaign_in_group < 1.0) ++contradicting;
        }
        mean /= static_cast<double>(align.pairs.size());
        out += "Across " + std::to_string(align.pairs.size()) +
               " attribution pairs, the mean fraction of campaign techniques also "
               "present in the attributed group is " +
               pct1(mean) + "; " + std::to_string(contradicting) +
               " pairs have campaign techniques the group profile lacks.\n";
        out += "Lowest-overlap pairs:";
        for (std::size_t i = 0; i < worst.size() && i < 3; ++i)
            out += " " + campaign_display(m, worst[i].campaign_id) + " vs " +
                   group_display(m, worst[i].group_id) + " (" +
                   pct1(worst[i].campaign_in_group) + ")" +
                   (i + 1 < std::min<std::size_t>(worst.size(), 3) ? ";" : "");
        out += "\n";
    }
    out += "\n";

    heading("Modeling implication");
    out += "Intrusion-set profiles cover " + pct2(m.group_coverage) +
           " of the technique universe versus " + pct1(m.campaign_coverage) +
           " for campaigns, with " +
           std::to_string(m.asymmetry.group_only_vs_campaigns) +
           " group techniques never observed in any campaign; campaign records "
           "alone understate group behavior and are best treated as partial "
           "evidence when building emulation profiles.\n";
    return out;
}

nlohmann::json report_json(const Workspace& ws, const MetricsBundle& m,
                           const std::string& policy) {
    AlignmentSummary align = summarize_alignment(m);
    auto worst = align.pairs;
    std::sort(worst.begin(), worst.end(), [](const auto& a, const auto& b) {
        if (a.campaign_in_group != b.campaign_in_group)
            return a.campaign_in_group < b.campaign_in_group;
        return std::tie(a.campaign_id, a.group_id) <
               std::tie(b.campaign_id, b.group_id);
    });
    nlohmann::json outliers = nlohmann::json::array();
    for (std::size_t i = 0; i < worst.size() && i < 5; ++i)
        outliers.push_back({{"campaign", worst[i].campaign_id},
                            {"group", worst[i].group_id},
                            {"shared", worst[i].shared},
                            {"campaign_in_group", worst[i].campaign_in_group},
                            {"group_in_campaign", worst[i].group_in_campaign}});

    nlohmann::json doc = metrics_json(ws, m, policy);
    doc["report"] = {
        {"campaign_heterogeneity",
         {{"rows", m.campaigns.rows()},
          {"universal_techniques", 0},
          {"universal_pairs", m.universal_pairs.size()},
          {"best_k", m.campaign_clusters.k},
          {"best_silhouette", m.campaign_clusters.silhouette}}},
        {"technique_dispersion",
         {{"coverage_pct", pct1(m.campaign_coverage)},
          {"sparsity_pct", pct1(m.campaign_sparsity)},
          {"frequency_head", frequency_head_json(m.frequency, 5)}}},
        {"intrusion_set_coverage",
         {{"populated_rows", m.groups.rows()},
          {"empty_rows", m.groups.excluded_rows.size()},
          {"coverage_pct", pct2(m.group_coverage)},
          {"references", m.groups.ones_count()}}},
        {"structural_asymmetry",
         {{"campaign_used", m.asymmetry.campaign_used},
          {"campaign_only", m.asymmetry.campaign_only},
          {"campaign_only_vs_attributed", m.asymmetry.campaign_only_vs_attributed},
          {"campaign_only_per_campaign", m.asymmetry.campaign_only_per_campaign},
          {"group_used", m.asymmetry.group_used},
          {"group_only_vs_campaigns", m.asymmetry.group_only_vs_campaigns}}},
        {"broken_campaign_group_mapping",
         {{"unattributed_campaigns", align.unattributed_campaigns},
          {"attribution_pairs", align.pairs.size()},
          {"lowest_overlap", std::move(outliers)}}},
        {"modeling_implication",
         {{"campaign_coverage_pct", pct1(m.campaign_coverage)},
          {"group_coverage_pct", pct2(m.group_coverage)},
          {"group_only_techniques", m.asymmetry.group_only_vs_campaigns}}}};
    std::size_t universal_techniques = 0;
    for (const auto& e : m.frequency.entries)
        if (m.campaigns.rows() > 0 && e.row_count == m.campaigns.rows())
            ++universal_techniques;
    doc["report"]["campaign_heterogeneity"]["universal_techniques"] =
        universal_techniques;
    return doc;
}

// ---- subcommand runners ----------------------------------------------------

int cmd_stats(const SourceOptions& sources, const std::string& format,
              const std::string& out, const std::string& save_corpus_path) {
    auto ws = load_workspace(sources, /*build_graph=*/false);
    if (!save_corpus_path.empty())
        ctigap::stix::save_corpus(ws->corpus, save_corpus_path);
    const auto stats = ctigap::stix::corpus_stats(ws->corpus, ws->duplicates);
    if (format == "json")
        write_output(out, ctigap::stix::stats_to_json(stats).dump(2) + "\n");
    else
        write_output(out, ctigap::stix::format_stats_table(stats));
    return 0;
}

int cmd_metrics(const SourceOptions& sources, const std::string& format,
                const std::string& out_dir) {
    auto ws = load_workspace(sources);
    MetricsBundle m = compute_metrics(*ws);
    const nlohmann::json doc = metrics_json(*ws, m, sources.policy);
    if (!out_dir.empty()) {
        write_dir_file(out_dir, "metrics.json", doc.dump(2) + "\n");
        write_dir_file(out_dir, "campaign_matrix.csv",
                       ctigap::graph::matrix_to_csv(m.campaigns));
        write_dir_file(out_dir, "intrusion_set_matrix.csv",
                       ctigap::graph::matrix_to_csv(m.groups));
        write_dir_file(out_dir, "frequency.csv", frequency_csv(m.frequency));
        if (m.campaigns.rows() >= 2) {
            write_dir_file(out_dir, "campaign_overlap.csv", overlap_csv(m.campaigns));
            write_dir_file(out_dir, "campaign_embedding.csv",
                           embedding_csv(m.campaigns));
        }
    }
    if (format == "json")
        write_output("", doc.dump(2) + "\n");
    else
        write_output("", metrics_text(*ws, m));
    return 0;
}

int cmd_align(const SourceOptions& sources, const std::string& campaign,
              const std::string& group, bool attributed, const std::string& format) {
    auto ws = load_workspace(sources);
    MetricsBundle m;
    m.campaigns = ctigap::graph::entity_technique_matrix(
        ws->graph, ctigap::graph::NodeKind::kCampaign, ws->universe);
    m.groups = ctigap::graph::entity_technique_matrix(
        ws->graph, ctigap::graph::NodeKind::kIntrusionSet, ws->universe);
    m.attributions = ctigap::graph::campaign_group_attributions(ws->graph);

    std::vector<ctigap::metrics::AlignmentScores> results;
    if (attributed) {
        results = summarize_alignment(m).pairs;
    } else {
        if (campaign.empty() || group.empty())
            throw ctigap::util::DomainError(
                "pass --campaign and --group, or --attributed for all pairs");
        auto resolve = [&](const ctigap::graph::TechniqueMatrix& matrix,
                           ctigap::graph::NodeKind kind, const std::string& key) {
            auto idx = matrix.row_index(key);
            if (!idx) {
                const auto* node = ws->graph.find_entity(kind, key);
                if (node)
                    idx = matrix.row_index(node->external_id.empty()
                                               ? node->stix_id
                                               : node->external_id);
            }
            if (!idx)
                throw ctigap::util::DomainError("no matrix row for entity: " + key);
            return *idx;
        };
        const std::size_t c =
            resolve(m.campaigns, ctigap::graph::NodeKind::kCampaign, campaign);
        const std::size_t g =
            resolve(m.groups, ctigap::graph::NodeKind::kIntrusionSet, group);
        results.push_back(ctigap::metrics::alignment(
            m.campaigns.cells[c], m.groups.cells[g], m.campaigns.row_ids[c],
            m.groups.row_ids[g]));
    }

    if (format == "json") {
        nlohmann::json doc = nlohmann::json::array();
        for (const auto& r : results)
            doc.push_back({{"campaign", r.campaign_id},
                           {"group", r.group_id},
                           {"shared", r.shared},
                           {"campaign_size", r.campaign_size},
                           {"group_size", r.group_size},
                           {"campaign_in_group", r.campaign_in_group},
                           {"group_in_campaign", r.group_in_campaign}});
        write_output("", doc.dump(2) + "\n");
    } else {
        std::string out;
        for (const auto& r : results)
            out += campaign_display(m, r.campaign_id) + " vs " +
                   group_display(m, r.group_id) + ": shared " +
                   std::to_string(r.shared) + ", campaign_in_group " +
                   fixed3(r.campaign_in_group) + " (" + pct1(r.campaign_in_group) +
                   "), group_in_campaign " + fixed3(r.group_in_campaign) + " (" +
                   pct1(r.group_in_campaign) + ")\n";
        write_output("", out);
    }
    return 0;
}

int cmd_scaffold(const SourceOptions& sources, const std::string& entity,
                 const std::string& format, const std::string& out) {
    auto ws = load_workspace(sources);
    const auto scaffold =
        ctigap::scaffold::build_scaffold(ws->graph, ws->universe, entity);
    if (format == "json")
        write_output(out, ctigap::scaffold::scaffold_to_json(scaffold).dump(2) + "\n");
    else
        write_output(out, ctigap::scaffold::format_scaffold(scaffold));
    return 0;
}

ctigap::scaffold::TacticScaffold scaffold_for(const SourceOptions& sources,
                                              const std::string& scaffold_file,
                                              const std::string& entity) {
    if (!scaffold_file.empty()) {
        std::ifstream in(scaffold_file, std::ios::binary);
        if (!in) throw ctigap::util::IoError("cannot open " + scaffold_file);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ctigap::util::ParseError(e.what(), e.byte);
        }
        return ctigap::scaffold::scaffold_from_json(doc);
    }
    if (entity.empty())
        throw ctigap::util::DomainError("pass --entity with --source, or --scaffold");
    auto ws = load_workspace(sources);
    return ctigap::scaffold::build_scaffold(ws->graph, ws->universe, entity);
}

int cmd_translate_init(const SourceOptions& sources, const std::string& scaffold_file,
                       const std::string& entity, const std::string& out) {
    const auto scaffold = scaffold_for(sources, scaffold_file, entity);
    const std::string doc = ctigap::translation::template_from_scaffold(scaffold);
    if (scaffold.entries.empty())
        std::cerr << "warning: scaffold has no entries; template is empty\n";
    write_output(out, doc);
    return 0;
}

int cmd_translate_validate(const SourceOptions& sources,
                           const std::string& scaffold_file, const std::string& entity,
                           const std::string& doc_file, const std::string& out) {
    const auto scaffold = scaffold_for(sources, scaffold_file, entity);
    const auto doc = ctigap::translation::load_steps_file(doc_file);
    const auto plan = ctigap::translation::validate_plan(scaffold, doc);
    write_output(out, ctigap::translation::plan_to_json(plan).dump(2) + "\n");
    std::cerr << "plan valid: " << plan.steps.size() << " steps, "
              << plan.markers.size() << " markers, " << plan.assumption_ledger.size()
              << " ledger assumptions\n";
    return 0;
}

int cmd_export(const std::string& plan_file, const std::string& out_dir,
               bool dry_run, bool do_push, const std::string& server,
               std::string api_key, int run_reps, const std::string& reset_hook,
               int timeout_s, int poll_ms, int retries, int backoff_ms) {
    std::ifstream in(plan_file, std::ios::binary);
    if (!in) throw ctigap::util::IoError("cannot open plan: " + plan_file);
    nlohmann::json plan_doc;
    try {
        plan_doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ctigap::util::ParseError(e.what(), e.byte);
    }
    const auto plan = ctigap::translation::plan_from_json(plan_doc);
    const auto abilities = ctigap::caldera::to_abilities(plan);
    const auto adversary = ctigap::caldera::to_adversary(plan, abilities);
    if (abilities.empty())
        std::cerr << "warning: plan has no executable steps; only markers\n";

    nlohmann::json result;
    result["entity_id"] = plan.entity_id;
    result["abilities"] = abilities.size();
    result["adversary_id"] = adversary.adversary_id;
    result["files"] =
        ctigap::caldera::serialize_artifacts(abilities, adversary, out_dir);

    if (const char* env_key = std::getenv("CTIGAP_API_KEY");
        env_key && *env_key) api_key = env_key;  // env var wins

    ctigap::caldera::ServerConfig config;
    config.base_url = server;
    config.api_key = api_key;
    config.retries = retries;
    config.backoff_ms = backoff_ms;
    config.poll_interval_ms = poll_ms;
    config.operation_timeout_s = timeout_s;
    config.reset_hook = reset_hook;

    int exit_code = 0;
    if (dry_run) {
        config.dry_run = true;
        config.dry_run_dir = (std::filesystem::path(out_dir) / "payloads").string();
        const auto report = ctigap::caldera::push(abilities, adversary, config);
        nlohmann::json payloads = nlohmann::json::array();
        for (const auto& o : report.outcomes) payloads.push_back(o.endpoint);
        result["dry_run_payloads"] = std::move(payloads);
    } else if (do_push) {
        if (server.empty())
            throw ctigap::util::DomainError("--push requires --server");
        const auto report = ctigap::caldera::push(abilities, adversary, config);
        nlohmann::json outcomes = nlohmann::json::array();
        for (const auto& o : report.outcomes)
            outcomes.push_back({{"kind", o.kind},
                                {"id", o.id},
                                {"endpoint", o.endpoint},
                                {"ok", o.ok},
                                {"http_status", o.http_status},
                                {"attempts", o.attempts},
                                {"error", o.error}});
        result["push"] = {{"ok", report.ok}, {"outcomes", std::move(outcomes)}};
        if (!report.ok) exit_code = 2;
    }
    if (run_reps > 0) {
        if (server.empty())
            throw ctigap::util::DomainError("--run requires --server");
        const auto run = ctigap::caldera::run_workflow(adversary, config, run_reps);
        nlohmann::json operations = nlohmann::json::array();
        for (const auto& op : run.operations) {
            nlohmann::json entry = {
                {"operation_id", op.operation_id},
                {"state", std::string(ctigap::caldera::to_string(op.state))}};
            if (op.report) entry["report"] = *op.report;
            operations.push_back(std::move(entry));
        }
        result["run"] = {{"repetitions_requested", run_reps},
                         {"reports_collected", run.reports_collected},
                         {"aborted", run.aborted},
                         {"abort_reason", run.abort_reason},
                         {"operations", std::move(operations)}};
        if (run.aborted) exit_code = 2;
    }
    write_output("", result.dump(2) + "\n");
    return exit_code;
}

int cmd_report(const SourceOptions& sources, const std::string& format,
               const std::string& out) {
    auto ws = load_workspace(sources);
    MetricsBundle m = compute_metrics(*ws);
    if (format == "json")
        write_output(out, report_json(*ws, m, sources.policy).dump(2) + "\n");
    else
        write_output(out, report_text(*ws, m));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CTI behavior-gap analysis and emulation artifact toolkit"};
    app.require_subcommand(1);

    std::function<int()> run;

    // ingest
    auto* ingest = app.add_subcommand(
        "ingest", "Parse and deduplicate STIX bundles into a corpus file");
    static SourceOptions ingest_sources;
    static std::string ingest_out, ingest_format = "text";
    add_source_options(ingest, ingest_sources, /*with_policy=*/false);
    ingest->add_option("--out", ingest_out, "corpus output file")->required();
    ingest->add_option("--format", ingest_format)->check(CLI::IsMember({"json", "text"}));
    ingest->callback([&] {
        run = [&] {
            return cmd_stats(ingest_sources, ingest_format, "", ingest_out);
        };
    });

    // stats
    auto* stats = app.add_subcommand("stats", "Per-source ingest/dedup statistics");
    static SourceOptions stats_sources;
    static std::string stats_out, stats_format = "text";
    add_source_options(stats, stats_sources, /*with_policy=*/false);
    stats->add_option("--out", stats_out, "write to file instead of stdout");
    stats->add_option("--format", stats_format)->check(CLI::IsMember({"json", "text"}));
    stats->callback([&] {
        run = [&] { return cmd_stats(stats_sources, stats_format, stats_out, ""); };
    });

    // metrics
    auto* metrics = app.add_subcommand(
        "metrics", "Coverage, sparsity, frequency, overlap, clustering, embedding");
    static SourceOptions metrics_sources;
    static std::string metrics_dir, metrics_format = "json";
    add_source_options(metrics, metrics_sources);
    metrics->add_option("--out-dir", metrics_dir, "directory for CSV/JSON outputs");
    metrics->add_option("--format", metrics_format)
        ->check(CLI::IsMember({"json", "text"}));
    metrics->callback([&] {
        run = [&] { return cmd_metrics(metrics_sources, metrics_format, metrics_dir); };
    });

    // align
    auto* align = app.add_subcommand(
        "align", "Campaign vs intrusion-set technique alignment");
    static SourceOptions align_sources;
    static std::string align_campaign, align_group, align_format = "text";
    static bool align_attributed = false;
    add_source_options(align, align_sources);
    align->add_option("--campaign", align_campaign, "campaign id or name");
    align->add_option("--group", align_group, "intrusion-set id or name");
    align->add_flag("--attributed", align_attributed,
                    "score every attribution pair");
    align->add_option("--format", align_format)->check(CLI::IsMember({"json", "text"}));
    align->callback([&] {
        run = [&] {
            return cmd_align(align_sources, align_campaign, align_group,
                             align_attributed, align_format);
        };
    });

    // scaffold
    auto* scaffold = app.add_subcommand(
        "scaffold", "Tactic-ordered technique list for an entity");
    static SourceOptions scaffold_sources;
    static std::string scaffold_entity, scaffold_format = "json", scaffold_out;
    add_source_options(scaffold, scaffold_sources);
    scaffold->add_option("--entity", scaffold_entity, "campaign or intrusion-set id/name")
        ->required();
    scaffold->add_option("--format", scaffold_format)
        ->check(CLI::IsMember({"json", "text"}));
    scaffold->add_option("--out", scaffold_out, "write to file instead of stdout");
    scaffold->callback([&] {
        run = [&] {
            return cmd_scaffold(scaffold_sources, scaffold_entity, scaffold_format,
                                scaffold_out);
        };
    });

    // translate
    auto* translate = app.add_subcommand(
        "translate", "Executable-step documents: stubs and validation");
    translate->require_subcommand(1);
    auto* tinit = translate->add_subcommand(
        "init", "Emit an editable step template from a scaffold");
    static SourceOptions tinit_sources;
    static std::string tinit_scaffold, tinit_entity, tinit_out;
    add_source_options(tinit, tinit_sources);
    tinit->add_option("--scaffold", tinit_scaffold, "scaffold JSON file");
    tinit->add_option("--entity", tinit_entity, "entity id/name (with --source)");
    tinit->add_option("--out", tinit_out, "write to file instead of stdout");
    tinit->callback([&] {
        run = [&] {
            return cmd_translate_init(tinit_sources, tinit_scaffold, tinit_entity,
                                      tinit_out);
        };
    });
    auto* tvalidate = translate->add_subcommand(
        "validate", "Validate a step document against the scaffold");
    static SourceOptions tval_sources;
    static std::string tval_scaffold, tval_entity, tval_doc, tval_out;
    add_source_options(tvalidate, tval_sources);
    tvalidate->add_option("--scaffold", tval_scaffold, "scaffold JSON file");
    tvalidate->add_option("--entity", tval_entity, "entity id/name (with --source)");
    tvalidate->add_option("--doc", tval_doc, "translation YAML document")->required();
    tvalidate->add_option("--out", tval_out, "plan output file (default stdout)");
    tvalidate->callback([&] {
        run = [&] {
            return cmd_translate_validate(tval_sources, tval_scaffold, tval_entity,
                                          tval_doc, tval_out);
        };
    });

    // export
    auto* exp = app.add_subcommand(
        "export", "Emit Caldera artifacts; optionally push and run operations");
    static std::string exp_plan, exp_out, exp_server, exp_key, exp_hook;
    static bool exp_dry = false, exp_push = false;
    static int exp_run = 0, exp_timeout = 600, exp_poll = 500, exp_retries = 3,
               exp_backoff = 250;
    exp->add_option("--plan", exp_plan, "validated plan JSON")->required();
    exp->add_option("--out", exp_out, "artifact output directory")->required();
    exp->add_flag("--dry-run", exp_dry, "write request payloads instead of pushing");
    exp->add_flag("--push", exp_push, "push artifacts to a server");
    exp->add_option("--server", exp_server, "Caldera base URL");
    exp->add_option("--key", exp_key, "API key (CTIGAP_API_KEY overrides)");
    exp->add_option("--run", exp_run, "run the adversary N times");
    exp->add_option("--reset-hook", exp_hook, "command run between repetitions");
    exp->add_option("--timeout", exp_timeout, "per-operation timeout seconds");
    exp->add_option("--poll-ms", exp_poll, "operation poll interval");
    exp->add_option("--retries", exp_retries, "attempts per request");
    exp->add_option("--backoff-ms", exp_backoff, "initial retry backoff");
    exp->callback([&] {
        run = [&] {
            return cmd_export(exp_plan, exp_out, exp_dry, exp_push, exp_server,
                              exp_key, exp_run, exp_hook, exp_timeout, exp_poll,
                              exp_retries, exp_backoff);
        };
    });

    // report
    auto* report = app.add_subcommand(
        "report", "Consolidated findings report over one or more bundles");
    static SourceOptions report_sources;
    static std::string report_format = "text", report_out;
    add_source_options(report, report_sources);
    report->add_option("--format", report_format)
        ->check(CLI::IsMember({"json", "text"}));
    report->add_option("--out", report_out, "write to file instead of stdout");
    report->callback([&] {
        run = [&] { return cmd_report(report_sources, report_format, report_out); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // contextual help to stdout, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // diagnostic to stderr
        return 1;
    }

    try {
        return run ? run() : 1;
    } catch (const ctigap::translation::PlanValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ctigap::util::ParseError& e) {
        std::cerr << "error: " << e.what() << " (byte " << e.byte_offset() << ")\n";
        return 1;
    } catch (const ctigap::util::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ctigap::util::ServerError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ctigap::util::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
