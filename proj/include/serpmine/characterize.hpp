#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "serpmine/errors.hpp"
#include "serpmine/features.hpp"
#include "serpmine/serp_schema.hpp"

namespace serpmine {

// Per-cluster feature statistics, computed on raw (unstandardized) values:
// the share of 1.0 rows for each binary feature and the mean for each
// numeric feature.
struct ClusterProfile {
    int cluster_id = 0;
    std::size_t size = 0;
    std::vector<std::pair<std::string, double>> binary_pct;
    std::vector<std::pair<std::string, double>> numeric_mean;

    std::optional<double> stat(const std::string& feature_name) const;
};

// Token occurrence counts over all queries assigned to one cluster.
struct WordFrequency {
    int cluster_id = 0;
    std::map<std::string, std::size_t> counts;
};

struct KeywordSet {
    ClusterIntent intent = ClusterIntent::Informational;
    std::set<std::string> keywords;
    std::map<std::string, double> provenance;
};

// One profile per cluster id in [0, k), in index order. Throws
// LengthMismatch when assignments are not aligned with the matrix rows.
std::vector<ClusterProfile> profile_clusters(const FeatureMatrix& m,
                                             const std::vector<int>& assignments, int k);

// Lowercases, splits on every non-alphanumeric ASCII character (bytes
// >= 0x80 are kept as word characters), and drops tokens shorter than
// two bytes, pure digit runs, and stopwords. Order and duplicates are
// preserved.
std::vector<std::string> tokenize(const std::string& query,
                                  const std::set<std::string>& stopwords);

std::vector<WordFrequency> word_frequencies(
    const std::vector<std::vector<std::string>>& queries_per_cluster,
    const std::set<std::string>& stopwords);

// Assigns each token to the cluster where it is most specific
// (specificity = cluster count / total count; ties broken by higher
// count, then lower cluster index), then keeps the per-cluster top_n by
// (specificity desc, count desc, token desc). Tokens below min_count
// or listed in exclusions never qualify. The resulting sets are
// pairwise disjoint. Throws UnnamedCluster when a frequency table's
// cluster id is missing from the naming map.
std::vector<KeywordSet> extract_keywords(const std::vector<WordFrequency>& freqs,
                                         const std::set<std::string>& exclusions,
                                         const std::map<int, ClusterIntent>& naming,
                                         int top_n = 50, int min_count = 3);

// Validates that the mapping covers every profiled cluster with a
// distinct intent; throws NonBijectiveMapping otherwise.
std::map<int, ClusterIntent> name_clusters(const std::vector<ClusterProfile>& profiles,
                                           const std::map<int, ClusterIntent>& mapping);

// Wordlist files: one entry per line, trimmed; blank lines and lines
// starting with '#' are skipped.
std::set<std::string> parse_wordlist(const std::string& text);
std::set<std::string> load_wordlist(const std::string& path);

// Mapping file: JSON object of cluster id (as a string key) to intent
// name, e.g. {"0": "informational", "2": "local_place"}.
std::map<int, ClusterIntent> cluster_intent_map_from_json(const std::string& json_text);
std::map<int, ClusterIntent> load_cluster_intent_map(const std::string& path);

// CSV with header cluster,size,feature,kind,value (one row per
// cluster and feature).
std::string profiles_to_csv(const std::vector<ClusterProfile>& profiles);

// CSV with header cluster,token,count, sorted by cluster then token.
std::string word_frequencies_to_csv(const std::vector<WordFrequency>& freqs);

// JSON object of intent name to sorted keyword array, in intent
// priority order.
std::string lexicon_to_json(const std::vector<KeywordSet>& sets);

}  // namespace serpmine
