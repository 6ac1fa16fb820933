#include "ctigap/stix/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "ctigap/util/errors.hpp"
#include "ctigap/util/format.hpp"

namespace ctigap::stix {

using util::pct1;
using util::with_thousands;

void Corpus::add(const ParsedBundle& bundle, const std::string& source_tag) {
    if (std::find(source_order.begin(), source_order.end(), source_tag) ==
        source_order.end())
        source_order.push_back(source_tag);
    objects.insert(objects.end(), bundle.objects.begin(), bundle.objects.end());
    relationships.insert(relationships.end(), bundle.relationships.begin(),
                         bundle.relationships.end());
    rejects.insert(rejects.end(), bundle.rejects.begin(), bundle.rejects.end());
}

std::map<std::string, std::size_t> deduplicate(Corpus& corpus) {
    std::map<std::string, std::size_t> dropped_by_source;
    std::unordered_map<std::string, std::size_t> source_rank;
    for (std::size_t i = 0; i < corpus.source_order.size(); ++i)
        source_rank.emplace(corpus.source_order[i], i);
    auto rank = [&](const std::string& source) {
        auto it = source_rank.find(source);
        return it == source_rank.end() ? source_rank.size() : it->second;
    };

    // Latest `modified` wins; on a timestamp tie the earliest-ingested
    // source keeps its copy. The dropped record is charged to its own source.
    auto collapse = [&](auto& records) {
        std::unordered_map<std::string, std::size_t> winner;  // id -> index
        std::vector<char> keep(records.size(), 1);
        for (std::size_t i = 0; i < records.size(); ++i) {
            auto [it, inserted] = winner.emplace(records[i].stix_id, i);
            if (inserted) continue;
            const std::size_t j = it->second;
            const bool new_wins =
                records[i].modified_us > records[j].modified_us ||
                (records[i].modified_us == records[j].modified_us &&
                 rank(records[i].source_tag) < rank(records[j].source_tag));
            const std::size_t loser = new_wins ? j : i;
            if (new_wins) it->second = i;
            keep[loser] = 0;
            ++dropped_by_source[records[loser].source_tag];
        }
        std::size_t w = 0;
        for (std::size_t r = 0; r < records.size(); ++r) {
            if (!keep[r]) continue;
            if (w != r) records[w] = std::move(records[r]);
            ++w;
        }
        records.resize(w);
    };
    collapse(corpus.objects);
    collapse(corpus.relationships);
    return dropped_by_source;
}

CorpusStats corpus_stats(const Corpus& corpus,
                         const std::map<std::string, std::size_t>& duplicates_by_source) {
    CorpusStats stats;
    std::map<std::string, SourceStats> by_source;
    for (const auto& source : corpus.source_order) {
        by_source[source].source = source;
    }
    auto touch = [&](const std::string& source) -> SourceStats& {
        auto& entry = by_source[source];
        if (entry.source.empty()) entry.source = source;
        return entry;
    };
    for (const auto& obj : corpus.objects) {
        ++touch(obj.source_tag).objects_unique;
        ++stats.objects_by_type[obj.type_raw];
    }
    for (const auto& rel : corpus.relationships) {
        ++touch(rel.source_tag).objects_unique;
        ++stats.objects_by_type["relationship"];
    }
    for (const auto& rej : corpus.rejects) ++touch(rej.source_tag).rejects;
    for (const auto& [source, dropped] : duplicates_by_source)
        touch(source).duplicates = dropped;

    for (auto& [source, entry] : by_source) {
        entry.objects_total = entry.objects_unique + entry.duplicates;
        entry.duplicate_fraction =
            entry.objects_total == 0
                ? 0.0
                : static_cast<double>(entry.duplicates) / entry.objects_total;
        stats.total_objects += entry.objects_total;
        stats.total_unique += entry.objects_unique;
        stats.total_duplicates += entry.duplicates;
        stats.total_rejects += entry.rejects;
    }
    // Emit in ingest order, then any stragglers (records whose source never
    // appeared in source_order) alphabetically.
    for (const auto& source : corpus.source_order) {
        auto it = by_source.find(source);
        if (it != by_source.end()) {
            stats.per_source.push_back(it->second);
            by_source.erase(it);
        }
    }
    for (auto& [source, entry] : by_source) stats.per_source.push_back(entry);
    return stats;
}

std::string format_stats_table(const CorpusStats& stats) {
    struct Row {
        std::string source, total, unique, dup_pct, rejects;
    };
    std::vector<Row> rows;
    rows.push_back({"Source", "Objects", "Unique", "Dup%", "Rejects"});
    for (const auto& s : stats.per_source) {
        rows.push_back({s.source, with_thousands(s.objects_total),
                        with_thousands(s.objects_unique), pct1(s.duplicate_fraction),
                        with_thousands(s.rejects)});
    }
    const double total_fraction =
        stats.total_objects == 0
            ? 0.0
            : static_cast<double>(stats.total_duplicates) / stats.total_objects;
    rows.push_back({"Total", with_thousands(stats.total_objects),
                    with_thousands(stats.total_unique), pct1(total_fraction),
                    with_thousands(stats.total_rejects)});

    std::size_t w0 = 0, w1 = 0, w2 = 0, w3 = 0, w4 = 0;
    for (const auto& r : rows) {
        w0 = std::max(w0, r.source.size());
        w1 = std::max(w1, r.total.size());
        w2 = std::max(w2, r.unique.size());
        w3 = std::max(w3, r.dup_pct.size());
        w4 = std::max(w4, r.rejects.size());
    }
    std::string out;
    auto pad_left = [](const std::string& s, std::size_t w) {
        return std::string(w - s.size(), ' ') + s;
    };
    auto pad_right = [](const std::string& s, std::size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out += pad_right(r.source, w0) + "  " + pad_left(r.total, w1) + "  " +
               pad_left(r.unique, w2) + "  " + pad_left(r.dup_pct, w3) + "  " +
               pad_left(r.rejects, w4) + "\n";
        if (i == 0)
            out += std::string(w0 + w1 + w2 + w3 + w4 + 8, '-') + "\n";
    }
    return out;
}

nlohmann::json stats_to_json(const CorpusStats& stats) {
    nlohmann::json sources = nlohmann::json::array();
    for (const auto& s : stats.per_source) {
        sources.push_back({{"source", s.source},
                           {"objects_total", s.objects_total},
                           {"objects_unique", s.objects_unique},
                           {"duplicates", s.duplicates},
                           {"duplicate_fraction", s.duplicate_fraction},
                           {"rejects", s.rejects}});
    }
    nlohmann::json by_type = nlohmann::json::object();
    for (const auto& [type, count] : stats.objects_by_type) by_type[type] = count;
    return {{"per_source", std::move(sources)},
            {"total_objects", stats.total_objects},
            {"total_unique", stats.total_unique},
            {"total_duplicates", stats.total_duplicates},
            {"total_rejects", stats.total_rejects},
            {"objects_by_type", std::move(by_type)}};
}

nlohmann::json corpus_to_json(const Corpus& corpus) {
    nlohmann::json objects = nlohmann::json::array();
    for (const auto& obj : corpus.objects)
        objects.push_back({{"source", obj.source_tag}, {"data", obj.to_json()}});
    nlohmann::json relationships = nlohmann::json::array();
    for (const auto& rel : corpus.relationships)
        relationships.push_back({{"source", rel.source_tag}, {"data", rel.to_json()}});
    nlohmann::json rejects = nlohmann::json::array();
    for (const auto& rej : corpus.rejects)
        rejects.push_back({{"index", rej.index},
                           {"reason", rej.reason},
                           {"source", rej.source_tag}});
    return {{"format", "ctigap-corpus/1"},
            {"sources", corpus.source_order},
            {"objects", std::move(objects)},
            {"relationships", std::move(relationships)},
            {"rejects", std::move(rejects)}};
}

Corpus corpus_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("format", "") != "ctigap-corpus/1")
        throw util::ParseError("not a ctigap corpus document", 0);
    Corpus corpus;
    for (const auto& s : doc.value("sources", nlohmann::json::array()))
        corpus.source_order.push_back(s.get<std::string>());
    for (const auto& entry : doc.value("objects", nlohmann::json::array()))
        corpus.objects.push_back(normalize_object(
            entry.at("data"), entry.at("source").get<std::string>()));
    for (const auto& entry : doc.value("relationships", nlohmann::json::array()))
        corpus.relationships.push_back(normalize_relationship(
            entry.at("data"), entry.at("source").get<std::string>()));
    for (const auto& entry : doc.value("rejects", nlohmann::json::array()))
        corpus.rejects.push_back({entry.at("index").get<std::size_t>(),
                                  entry.at("reason").get<std::string>(),
                                  entry.at("source").get<std::string>()});
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw util::IoError("cannot open for writing: " + path);
    out << corpus_to_json(corpus).dump(2) << "\n";
    if (!out) throw util::IoError("error writing: " + path);
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw util::IoError("cannot open corpus file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw util::ParseError(e.what(), e.byte);
    }
    return corpus_from_json(doc);
}

}  // namespace ctigap::stix
