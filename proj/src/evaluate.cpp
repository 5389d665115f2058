#include "serpmine/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace serpmine {

long ConfusionMatrix::row_sum(size_t i) const {
    long s = 0;
    for (size_t j = 0; j < kClusterIntentCount; ++j) s += cells[i][j];
    return s;
}

long ConfusionMatrix::col_sum(size_t j) const {
    long s = 0;
    for (size_t i = 0; i < kClusterIntentCount; ++i) s += cells[i][j];
    return s;
}

long ConfusionMatrix::total() const {
    long s = 0;
    for (size_t i = 0; i < kClusterIntentCount; ++i) s += row_sum(i);
    return s;
}

std::vector<QueryRecord> parse_dataset(const std::string& text) {
    std::vector<QueryRecord> records;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim_copy(line).empty()) continue;

        const size_t tab = line.find('\t');
        std::string query = tab == std::string::npos ? line : line.substr(0, tab);
        std::string label = tab == std::string::npos ? std::string() : line.substr(tab + 1);
        if (label.find('\t') != std::string::npos)
            throw BadRecord("more than one tab", line_no);
        if (trim_copy(query).empty()) throw BadRecord("empty query", line_no);

        QueryRecord rec;
        rec.query = std::move(query);
        const std::string trimmed = trim_copy(label);
        if (!trimmed.empty()) {
            try {
                rec.manual_label = manual_intent_from_name(trimmed);
            } catch (const SchemaError&) {
                throw BadLabel("unknown label \"" + trimmed + "\"", line_no);
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<QueryRecord> load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read dataset: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_dataset(ss.str());
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction <= 1.0))
        throw PreconditionError("test_fraction must be in [0, 1]");

    std::vector<std::size_t> shuffled(n);
    for (std::size_t i = 0; i < n; ++i) shuffled[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng() % i);
        std::swap(shuffled[i - 1], shuffled[j]);
    }

    // the epsilon absorbs representation error in n * fraction (0.10 of
    // 30000 must give exactly 3000)
    const double raw = static_cast<double>(n) * test_fraction;
    const auto n_test = static_cast<std::size_t>(std::ceil(raw - 1e-9));

    std::vector<std::size_t> test(shuffled.begin(),
                                  shuffled.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(shuffled.begin() + static_cast<std::ptrdiff_t>(n_test),
                                   shuffled.end());
    return {std::move(train), std::move(test)};
}

std::pair<std::vector<QueryRecord>, std::vector<QueryRecord>> split_train_test(
    const std::vector<QueryRecord>& records, double test_fraction, std::uint64_t seed) {
    const auto [train_idx, test_idx] = split_indices(records.size(), test_fraction, seed);
    std::vector<QueryRecord> train, test;
    train.reserve(train_idx.size());
    test.reserve(test_idx.size());
    for (const auto i : train_idx) train.push_back(records[i]);
    for (const auto i : test_idx) test.push_back(records[i]);
    return {std::move(train), std::move(test)};
}

ConfusionMatrix confusion(const std::vector<ClusterIntent>& actual,
                          const std::vector<ClusterIntent>& predicted) {
    if (actual.size() != predicted.size())
        throw LengthMismatch("actual and predicted label lists differ in length");
    ConfusionMatrix cm;
    for (size_t r = 0; r < actual.size(); ++r)
        cm.cells[static_cast<size_t>(actual[r])][static_cast<size_t>(predicted[r])]++;
    return cm;
}

ClassMetrics precision_recall(const ConfusionMatrix& cm) {
    ClassMetrics metrics;
    for (size_t i = 0; i < kClusterIntentCount; ++i) {
        const long diag = cm.cells[i][i];
        const long rs = cm.row_sum(i);
        const long cs = cm.col_sum(i);
        auto& pc = metrics.per_class[i];
        pc.support = rs;
        if (cs > 0) {
            pc.precision = static_cast<double>(diag) / static_cast<double>(cs);
        } else {
            metrics.warnings.push_back("no predictions for " +
                                       std::string(cluster_intent_name(cm.labels[i])) +
                                       "; precision set to 0");
        }
        if (rs > 0) {
            pc.recall = static_cast<double>(diag) / static_cast<double>(rs);
        } else {
            metrics.warnings.push_back("no records labeled " +
                                       std::string(cluster_intent_name(cm.labels[i])) +
                                       "; recall set to 0");
        }
    }
    return metrics;
}

std::string metrics_to_json(const ConfusionMatrix& cm, const ClassMetrics& metrics) {
    nlohmann::ordered_json j;
    std::vector<std::string> labels;
    for (const auto l : cm.labels) labels.emplace_back(cluster_intent_name(l));
    j["labels"] = labels;
    j["matrix"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < kClusterIntentCount; ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (size_t k = 0; k < kClusterIntentCount; ++k) row.push_back(cm.cells[i][k]);
        j["matrix"].push_back(row);
    }
    j["per_class"] = nlohmann::ordered_json::object();
    for (size_t i = 0; i < kClusterIntentCount; ++i) {
        nlohmann::ordered_json entry;
        entry["precision"] = metrics.per_class[i].precision;
        entry["recall"] = metrics.per_class[i].recall;
        entry["support"] = metrics.per_class[i].support;
        j["per_class"][labels[i]] = entry;
    }
    return j.dump(2) + "\n";
}

ConfusionMatrix confusion_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonError(std::string("confusion matrix is not valid JSON: ") + e.what());
    }
    ConfusionMatrix cm;
    try {
        if (j.contains("labels")) {
            const auto labels = j.at("labels").get<std::vector<std::string>>();
            if (labels.size() != kClusterIntentCount)
                throw SchemaError("confusion matrix needs exactly 3 labels");
            for (size_t i = 0; i < kClusterIntentCount; ++i)
                if (cluster_intent_from_name(labels[i]) != cm.labels[i])
                    throw SchemaError("confusion matrix labels must be in intent order");
        }
        const auto& matrix = j.at("matrix");
        if (!matrix.is_array() || matrix.size() != kClusterIntentCount)
            throw SchemaError("confusion matrix needs 3 rows");
        for (size_t i = 0; i < kClusterIntentCount; ++i) {
            if (!matrix[i].is_array() || matrix[i].size() != kClusterIntentCount)
                throw SchemaError("confusion matrix row needs 3 cells");
            for (size_t k = 0; k < kClusterIntentCount; ++k) {
                const long v = matrix[i][k].get<long>();
                if (v < 0) throw SchemaError("confusion matrix cells must be non-negative");
                cm.cells[i][k] = v;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("bad confusion matrix JSON: ") + e.what());
    }
    return cm;
}

ConfusionMatrix load_confusion(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read confusion matrix: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return confusion_from_json(ss.str());
}

std::string format_metrics_table(const ConfusionMatrix& cm, const ClassMetrics& metrics) {
    std::ostringstream out;
    out << "actual \\ predicted";
    for (const auto l : cm.labels) out << '\t' << cluster_intent_name(l);
    out << '\n';
    for (size_t i = 0; i < kClusterIntentCount; ++i) {
        out << cluster_intent_name(cm.labels[i]);
        for (size_t k = 0; k < kClusterIntentCount; ++k) out << '\t' << cm.cells[i][k];
        out << '\n';
    }
    out << '\n';
    out << "intent\tprecision\trecall\tsupport\n";
    char buf[32];
    for (size_t i = 0; i < kClusterIntentCount; ++i) {
        const auto& pc = metrics.per_class[i];
        out << cluster_intent_name(cm.labels[i]);
        std::snprintf(buf, sizeof(buf), "%.3f", pc.precision);
        out << '\t' << buf;
        std::snprintf(buf, sizeof(buf), "%.3f", pc.recall);
        out << '\t' << buf << '\t' << pc.support << '\n';
    }
    for (const auto& w : metrics.warnings) out << "warning: " << w << '\n';
    return out.str();
}

}  // namespace serpmine
