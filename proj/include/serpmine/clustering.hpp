#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "serpmine/errors.hpp"

namespace serpmine {

using Matrix = std::vector<std::vector<double>>;

struct KMeansConfig {
    int k = 3;
    std::uint64_t seed = 0;
    int max_iters = 300;
    double tol = 1e-4;  // Frobenius norm of the centroid shift
    int n_init = 10;    // best-of-n restarts with seeds seed, seed+1, ...
};

// Per-column transform applied before clustering; stddev is the
// population value. A zero-stddev column passes through as all zero.
struct Standardization {
    std::vector<double> mean;
    std::vector<double> stddev;
};

std::pair<Matrix, Standardization> standardize(const Matrix& m);

// Identity transform of the given width (used when scaling is disabled).
Standardization identity_standardization(size_t n_cols);

struct KMeansModel {
    Matrix centroids;              // k x d
    std::vector<int> assignments;  // per-row cluster index in [0, k)
    double wcss = 0.0;
    int iterations_run = 0;  // of the winning restart
    int k = 0;
    std::uint64_t seed = 0;
    Standardization standardization;
};

// Called after every assignment step of every restart with the wcss at
// that point; wcss is non-increasing within a run.
using IterationObserver = std::function<void(int run, int iteration, double wcss)>;

// Lloyd iterations over k-means++ seeds, best of n_init restarts.
// Deterministic for a given (data, config). Empty clusters are reseeded
// to the point farthest from the empty centroid. Throws TooFewRows when
// rows < k.
KMeansModel kmeans_fit(const Matrix& data, const KMeansConfig& config,
                       const IterationObserver& observer = {});

struct ElbowResult {
    std::vector<int> k_values;
    std::vector<double> wcss_values;
    int selected_k = 0;
};

// Fits every k in [k_min, k_max] with the template config (same seed for
// each k) and picks the k whose (k, wcss) point lies farthest from the
// chord joining the two endpoints. Ties go to the smaller k.
ElbowResult elbow_select(const Matrix& data, int k_min, int k_max,
                         const KMeansConfig& config_template,
                         const IterationObserver& observer = {});

// Recomputes wcss from centroids and assignments; used by tests and by
// the model invariant check.
double recompute_wcss(const Matrix& data, const Matrix& centroids,
                      const std::vector<int>& assignments);

// Model persistence: JSON {spec_names, standardization, centroids, k,
// seed, wcss}.
std::string model_to_json(const KMeansModel& model, const std::vector<std::string>& spec_names);
KMeansModel model_from_json(const std::string& json_text,
                            std::vector<std::string>* spec_names = nullptr);
void save_model(const KMeansModel& model, const std::vector<std::string>& spec_names,
                const std::string& path);

// Plain numeric CSV: one header row, then rows of doubles. A leading
// "query" column is skipped when present. Throws SchemaError on
// non-numeric cells or ragged rows.
Matrix numeric_matrix_from_csv(const std::string& csv_text);
Matrix load_numeric_csv(const std::string& path);
std::string numeric_matrix_to_csv(const Matrix& m, const std::vector<std::string>& col_names);

}  // namespace serpmine
