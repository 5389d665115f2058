#include "serpmine/clustering.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "serpmine/csv.hpp"

namespace serpmine {

namespace {

// Uniform double in [0,1) from the raw engine output. Distribution
// classes are implementation-defined, so draws are derived directly from
// the 64-bit stream to keep runs reproducible everywhere.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

size_t uniform_index(std::mt19937_64& rng, size_t n) {
    return static_cast<size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

Matrix kmeanspp_seed(const Matrix& data, int k, std::mt19937_64& rng) {
    const size_t n = data.size();
    Matrix centroids;
    centroids.reserve(static_cast<size_t>(k));
    centroids.push_back(data[uniform_index(rng, n)]);

    std::vector<double> d2(n);
    while (centroids.size() < static_cast<size_t>(k)) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, sq_dist(data[i], c));
            d2[i] = best;
            total += best;
        }
        size_t pick;
        if (total <= 0.0) {
            // all remaining mass at already-chosen positions
            pick = uniform_index(rng, n);
        } else {
            const double target = uniform01(rng) * total;
            double acc = 0.0;
            pick = n - 1;
            for (size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(data[pick]);
    }
    return centroids;
}

struct LloydRun {
    Matrix centroids;
    std::vector<int> assignments;
    double wcss = 0.0;
    int iterations = 0;
};

// Assigns every row to its nearest centroid (ties to the lowest index)
// and returns the resulting wcss.
double assign_step(const Matrix& data, const Matrix& centroids, std::vector<int>& assignments) {
    double wcss = 0.0;
    for (size_t i = 0; i < data.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (size_t c = 0; c < centroids.size(); ++c) {
            const double d = sq_dist(data[i], centroids[c]);
            if (d < best) {
                best = d;
                best_c = static_cast<int>(c);
            }
        }
        assignments[i] = best_c;
        wcss += best;
    }
    return wcss;
}

LloydRun lloyd(const Matrix& data, int k, std::uint64_t seed, int max_iters, double tol,
               int run_index, const IterationObserver& observer) {
    const size_t n = data.size();
    const size_t d = data[0].size();
    std::mt19937_64 rng(seed);

    LloydRun run;
    run.centroids = kmeanspp_seed(data, k, rng);
    run.assignments.assign(n, 0);

    double prev_wcss = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        const double wcss = assign_step(data, run.centroids, run.assignments);
        run.iterations = iter + 1;
        if (wcss > prev_wcss + 1e-9 * (1.0 + prev_wcss))
            throw Error("kmeans objective increased between iterations");
        if (observer) observer(run_index, iter, wcss);
        prev_wcss = wcss;

        // update step
        Matrix next(static_cast<size_t>(k), std::vector<double>(d, 0.0));
        std::vector<size_t> counts(static_cast<size_t>(k), 0);
        for (size_t i = 0; i < n; ++i) {
            const auto c = static_cast<size_t>(run.assignments[i]);
            counts[c]++;
            for (size_t j = 0; j < d; ++j) next[c][j] += data[i][j];
        }
        for (size_t c = 0; c < static_cast<size_t>(k); ++c) {
            if (counts[c] > 0) {
                for (size_t j = 0; j < d; ++j) next[c][j] /= static_cast<double>(counts[c]);
            } else {
                // reseed the empty centroid to the point farthest from it
                size_t far = 0;
                double far_d = -1.0;
                for (size_t i = 0; i < n; ++i) {
                    const double dd = sq_dist(data[i], run.centroids[c]);
                    if (dd > far_d) {
                        far_d = dd;
                        far = i;
                    }
                }
                next[c] = data[far];
            }
        }

        double shift2 = 0.0;
        for (size_t c = 0; c < static_cast<size_t>(k); ++c)
            shift2 += sq_dist(next[c], run.centroids[c]);
        run.centroids = std::move(next);
        if (std::sqrt(shift2) < tol) break;
    }

    // final sync so every row is assigned to its nearest centroid
    run.wcss = assign_step(data, run.centroids, run.assignments);
    if (run.wcss > prev_wcss + 1e-9 * (1.0 + prev_wcss))
        throw Error("kmeans objective increased at final assignment");
    return run;
}

}  // namespace

std::pair<Matrix, Standardization> standardize(const Matrix& m) {
    if (m.empty()) throw EmptyInput("standardize requires at least one row");
    const size_t n = m.size();
    const size_t d = m[0].size();

    Standardization st;
    st.mean.assign(d, 0.0);
    st.stddev.assign(d, 0.0);
    for (const auto& row : m)
        for (size_t j = 0; j < d; ++j) st.mean[j] += row[j];
    for (auto& v : st.mean) v /= static_cast<double>(n);
    for (const auto& row : m)
        for (size_t j = 0; j < d; ++j) {
            const double c = row[j] - st.mean[j];
            st.stddev[j] += c * c;
        }
    for (auto& v : st.stddev) v = std::sqrt(v / static_cast<double>(n));

    Matrix out(n, std::vector<double>(d, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < d; ++j)
            out[i][j] = (st.stddev[j] > 0.0) ? (m[i][j] - st.mean[j]) / st.stddev[j] : 0.0;
    return {std::move(out), std::move(st)};
}

Standardization identity_standardization(size_t n_cols) {
    Standardization st;
    st.mean.assign(n_cols, 0.0);
    st.stddev.assign(n_cols, 1.0);
    return st;
}

KMeansModel kmeans_fit(const Matrix& data, const KMeansConfig& config,
                       const IterationObserver& observer) {
    if (config.k < 1) throw PreconditionError("k must be >= 1");
    if (config.n_init < 1) throw PreconditionError("n_init must be >= 1");
    if (config.max_iters < 1) throw PreconditionError("max_iters must be >= 1");
    if (data.size() < static_cast<size_t>(config.k))
        throw TooFewRows("kmeans needs at least k rows (" + std::to_string(data.size()) + " < " +
                         std::to_string(config.k) + ")");

    LloydRun best;
    bool have_best = false;
    for (int r = 0; r < config.n_init; ++r) {
        LloydRun run = lloyd(data, config.k, config.seed + static_cast<std::uint64_t>(r),
                             config.max_iters, config.tol, r, observer);
        if (!have_best || run.wcss < best.wcss) {
            best = std::move(run);
            have_best = true;
        }
    }

    KMeansModel model;
    model.centroids = std::move(best.centroids);
    model.assignments = std::move(best.assignments);
    model.wcss = best.wcss;
    model.iterations_run = best.iterations;
    model.k = config.k;
    model.seed = config.seed;
    model.standardization = identity_standardization(data.empty() ? 0 : data[0].size());
    return model;
}

ElbowResult elbow_select(const Matrix& data, int k_min, int k_max,
                         const KMeansConfig& config_template,
                         const IterationObserver& observer) {
    if (!(1 <= k_min && k_min < k_max))
        throw PreconditionError("elbow range must satisfy 1 <= k_min < k_max");
    if (static_cast<size_t>(k_max) > data.size())
        throw TooFewRows("elbow k_max exceeds the number of rows");

    ElbowResult res;
    for (int k = k_min; k <= k_max; ++k) {
        KMeansConfig cfg = config_template;
        cfg.k = k;
        const KMeansModel model = kmeans_fit(data, cfg, observer);
        res.k_values.push_back(k);
        res.wcss_values.push_back(model.wcss);
    }

    // farthest point from the chord joining the endpoints; the chord
    // direction is shared by all points, so comparing the cross-product
    // numerators is enough
    const double k0 = static_cast<double>(res.k_values.front());
    const double k1 = static_cast<double>(res.k_values.back());
    const double w0 = res.wcss_values.front();
    const double w1 = res.wcss_values.back();
    double best_dist = -1.0;
    int best_k = res.k_values.front();
    for (size_t i = 0; i < res.k_values.size(); ++i) {
        const double kk = static_cast<double>(res.k_values[i]);
        const double ww = res.wcss_values[i];
        const double dist = std::fabs((w1 - w0) * (kk - k0) - (k1 - k0) * (ww - w0));
        if (dist > best_dist + 1e-12) {
            best_dist = dist;
            best_k = res.k_values[i];
        }
    }
    res.selected_k = best_k;
    return res;
}

double recompute_wcss(const Matrix& data, const Matrix& centroids,
                      const std::vector<int>& assignments) {
    if (data.size() != assignments.size())
        throw LengthMismatch("assignments are not aligned with the data");
    double s = 0.0;
    for (size_t i = 0; i < data.size(); ++i)
        s += sq_dist(data[i], centroids[static_cast<size_t>(assignments[i])]);
    return s;
}

std::string model_to_json(const KMeansModel& model, const std::vector<std::string>& spec_names) {
    nlohmann::ordered_json j;
    j["spec_names"] = spec_names;
    j["standardization"]["mean"] = model.standardization.mean;
    j["standardization"]["stddev"] = model.standardization.stddev;
    j["centroids"] = model.centroids;
    j["k"] = model.k;
    j["seed"] = model.seed;
    j["wcss"] = model.wcss;
    return j.dump(2) + "\n";
}

KMeansModel model_from_json(const std::string& json_text, std::vector<std::string>* spec_names) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonError(std::string("model is not valid JSON: ") + e.what());
    }
    KMeansModel model;
    try {
        if (spec_names) *spec_names = j.at("spec_names").get<std::vector<std::string>>();
        model.standardization.mean =
            j.at("standardization").at("mean").get<std::vector<double>>();
        model.standardization.stddev =
            j.at("standardization").at("stddev").get<std::vector<double>>();
        model.centroids = j.at("centroids").get<Matrix>();
        model.k = j.at("k").get<int>();
        model.seed = j.at("seed").get<std::uint64_t>();
        model.wcss = j.at("wcss").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("bad model JSON: ") + e.what());
    }
    return model;
}

void save_model(const KMeansModel& model, const std::vector<std::string>& spec_names,
                const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model: " + path);
    out << model_to_json(model, spec_names);
}

Matrix numeric_matrix_from_csv(const std::string& csv_text) {
    const auto rows = csv::parse(csv_text);
    if (rows.size() < 2) throw EmptyInput("numeric CSV has no data rows");
    const bool skip_first = !rows[0].empty() && rows[0][0] == "query";
    const size_t first_col = skip_first ? 1 : 0;
    const size_t width = rows[0].size() - first_col;
    if (width == 0) throw SchemaError("numeric CSV has no value columns");

    Matrix m;
    m.reserve(rows.size() - 1);
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw SchemaError("numeric CSV row has wrong arity at line " + std::to_string(i + 1));
        std::vector<double> vals;
        vals.reserve(width);
        for (size_t j = first_col; j < rows[i].size(); ++j) {
            double v = 0.0;
            const auto& cell = rows[i][j];
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size())
                throw SchemaError("bad numeric value \"" + cell + "\" at line " +
                                  std::to_string(i + 1));
            vals.push_back(v);
        }
        m.push_back(std::move(vals));
    }
    return m;
}

Matrix load_numeric_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open numeric CSV: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return numeric_matrix_from_csv(ss.str());
}

std::string numeric_matrix_to_csv(const Matrix& m, const std::vector<std::string>& col_names) {
    std::string out = csv::join_row(col_names) + "\n";
    for (const auto& row : m) {
        if (row.size() != col_names.size())
            throw LengthMismatch("matrix row width does not match the column names");
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (const double v : row) {
            char buf[64];
            const auto res = std::to_chars(buf, buf + sizeof(buf), v);
            cells.emplace_back(buf, res.ptr);
        }
        out += csv::join_row(cells) + "\n";
    }
    return out;
}

}  // namespace serpmine
