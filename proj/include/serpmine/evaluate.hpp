#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "serpmine/errors.hpp"
#include "serpmine/serp_schema.hpp"

namespace serpmine {

// 3x3 agreement counts; rows are the actual labels (clustering), columns
// the predicted labels (lexicon), both in intent enum order.
struct ConfusionMatrix {
    std::array<ClusterIntent, kClusterIntentCount> labels = {
        ClusterIntent::Informational, ClusterIntent::LocalPlace, ClusterIntent::SexualRacism};
    std::array<std::array<long, kClusterIntentCount>, kClusterIntentCount> cells{};

    long row_sum(size_t i) const;
    long col_sum(size_t j) const;
    long total() const;
};

struct ClassMetrics {
    struct PerClass {
        double precision = 0.0;  // diagonal / column sum, 0 when the column is empty
        double recall = 0.0;     // diagonal / row sum, 0 when the row is empty
        long support = 0;        // row sum
    };
    std::array<PerClass, kClusterIntentCount> per_class{};
    std::vector<std::string> warnings;  // zero-division notes
};

// Reads a UTF-8 TSV of `query<TAB>label` lines; the label is optional
// and parsed case-insensitively. Throws IoError, BadLabel, BadRecord
// (the latter two carry 1-based line numbers).
std::vector<QueryRecord> load_dataset(const std::string& path);
std::vector<QueryRecord> parse_dataset(const std::string& text);

// Seeded shuffle of [0, n), then the first ceil(n * test_fraction)
// positions become the test set. Returns (train, test) index lists in
// shuffled order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double test_fraction, std::uint64_t seed);

// split_indices applied to the records. Returns (train, test).
std::pair<std::vector<QueryRecord>, std::vector<QueryRecord>> split_train_test(
    const std::vector<QueryRecord>& records, double test_fraction, std::uint64_t seed);

ConfusionMatrix confusion(const std::vector<ClusterIntent>& actual,
                          const std::vector<ClusterIntent>& predicted);

ClassMetrics precision_recall(const ConfusionMatrix& cm);

// JSON report: {"labels", "matrix", "per_class": {intent: {precision,
// recall, support}}}.
std::string metrics_to_json(const ConfusionMatrix& cm, const ClassMetrics& metrics);

// Reads {"matrix": [[...3x3...]]} with an optional "labels" array that
// must then equal the canonical intent order.
ConfusionMatrix confusion_from_json(const std::string& json_text);
ConfusionMatrix load_confusion(const std::string& path);

// Plain-text table with counts and per-class precision/recall printed
// to three decimals.
std::string format_metrics_table(const ConfusionMatrix& cm, const ClassMetrics& metrics);

}  // namespace serpmine
