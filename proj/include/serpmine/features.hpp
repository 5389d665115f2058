#pragma once

#include <optional>
#include <string>
#include <vector>

#include "serpmine/serp_schema.hpp"

namespace serpmine {

enum class FeatureKind { Binary, Numeric };

// One feature derived from a SerpDocument. Binary features are presence
// flags for a block type; numeric features count either the item entries
// of a block type or the page's related searches.
struct FeatureSpec {
    enum class Source { BlockPresence, BlockItemCount, RelatedSearchesCount };

    std::string name;
    FeatureKind kind = FeatureKind::Binary;
    Source source = Source::BlockPresence;
    std::optional<ResultBlockType> block_type;  // unset for RelatedSearchesCount
};

// The default 19-feature set: 16 presence flags plus paa_count,
// related_searches_count and natural_results_count.
std::vector<FeatureSpec> default_feature_spec();

// Feature spec file: JSON list of {name, kind, block_type | source}.
// Throws SpecMismatch on unknown block types, duplicate names, or
// inconsistent entries.
std::vector<FeatureSpec> feature_spec_from_json(const std::string& json_text);
std::vector<FeatureSpec> load_feature_spec(const std::string& path);
std::string feature_spec_to_json(const std::vector<FeatureSpec>& spec);

struct FeatureVector {
    std::string query;
    std::vector<double> values;  // aligned with the feature spec entries
};

struct FeatureMatrix {
    std::vector<FeatureSpec> spec;
    std::vector<std::string> queries;
    std::vector<std::vector<double>> rows;

    size_t n_rows() const { return rows.size(); }
    size_t n_features() const { return spec.size(); }
};

// Total over valid documents; binary slots are 0/1, numeric slots are
// non-negative integral counts.
FeatureVector extract_features(const SerpDocument& doc, const std::vector<FeatureSpec>& spec);

// Row order equals input order. Throws EmptyInput on an empty list.
FeatureMatrix build_matrix(const std::vector<SerpDocument>& docs,
                           const std::vector<FeatureSpec>& spec);

// Pearson correlation of every feature pair (phi coefficient for binary
// columns). Constant columns correlate 0 against everything and 1 with
// themselves. Throws TooFewRows unless the matrix has >= 2 rows.
std::vector<std::vector<double>> correlation_matrix(const FeatureMatrix& m);

struct PruneResult {
    FeatureMatrix matrix;
    std::vector<std::string> dropped;
};

// Greedy scan in spec order: for every pair with |r| >= threshold the
// later feature is dropped. The result has no remaining pair at or above
// the threshold.
PruneResult prune_correlated(const FeatureMatrix& m, double threshold);

// CSV persistence: header row `query,<feature names...>`, counts written
// as integers.
std::string matrix_to_csv(const FeatureMatrix& m);
FeatureMatrix matrix_from_csv(const std::string& csv_text,
                              const std::vector<FeatureSpec>& spec);
void save_matrix(const FeatureMatrix& m, const std::string& path);
FeatureMatrix load_matrix(const std::string& path, const std::vector<FeatureSpec>& spec);

// Accepts a CSV whose columns are any subset of the given feature
// spec (e.g. after correlation pruning); each header name must exist
// in it.
FeatureMatrix matrix_from_csv_subset(const std::string& csv_text,
                                     const std::vector<FeatureSpec>& spec);
FeatureMatrix load_matrix_subset(const std::string& path,
                                 const std::vector<FeatureSpec>& spec);

}  // namespace serpmine
