#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ctigap/stix/bundle_parser.hpp"
#include "ctigap/stix/types.hpp"

namespace ctigap::stix {

// Multi-source collection of parsed bundles, prior to deduplication.
struct Corpus {
    std::vector<NormalizedObject> objects;
    std::vector<RelationshipRecord> relationships;
    std::vector<RejectedObject> rejects;
    std::vector<std::string> source_order;  // sources in ingest order

    void add(const ParsedBundle& bundle, const std::string& source_tag);
};

struct SourceStats {
    std::string source;
    std::size_t objects_total = 0;   // objects that parsed (incl. relationships)
    std::size_t objects_unique = 0;  // survivors after deduplication
    std::size_t duplicates = 0;
    std::size_t rejects = 0;
    double duplicate_fraction = 0.0;  // duplicates / objects_total
};

struct CorpusStats {
    std::vector<SourceStats> per_source;  // in source_order
    std::size_t total_objects = 0;
    std::size_t total_unique = 0;
    std::size_t total_duplicates = 0;
    std::size_t total_rejects = 0;
    std::map<std::string, std::size_t> objects_by_type;  // post-dedup, by raw type
};

// Collapses duplicate STIX ids: the record with the latest `modified`
// timestamp wins; ties keep the copy from the earliest-ingested source.
// Duplicates are charged against the source whose copy was dropped.
// Operates in place and is idempotent. Returns duplicate counts by source.
std::map<std::string, std::size_t> deduplicate(Corpus& corpus);

// Computes per-source and aggregate counts from a deduplicated corpus.
// `duplicates_by_source` is the map returned by deduplicate(); pre-dedup
// totals are reconstructed as survivors + duplicates.
CorpusStats corpus_stats(const Corpus& corpus,
                         const std::map<std::string, std::size_t>& duplicates_by_source);

// Renders stats as an aligned text table with thousands separators:
// one row per source plus a Total row.
std::string format_stats_table(const CorpusStats& stats);

nlohmann::json stats_to_json(const CorpusStats& stats);

// Round-trip persistence of a corpus as a JSON document with deterministic
// key and element ordering.
nlohmann::json corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& doc);
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace ctigap::stix
