#include "serpmine/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "serpmine/characterize.hpp"
#include "serpmine/csv.hpp"
#include "serpmine/evaluate.hpp"
#include "serpmine/features.hpp"

namespace serpmine {

namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& path, const std::string& base_dir) {
    if (path.empty() || base_dir.empty()) return path;
    const fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_dir) / p).lexically_normal().string();
}

void require_readable(const std::string& path, const std::string& what) {
    if (path.empty()) return;
    std::error_code ec;
    if (!fs::exists(path, ec)) throw IoError("config " + what + " path not found: " + path);
}

const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "dataset",       "raw_dir",   "parsed_dir",    "output_dir",
        "selector_config", "feature_spec", "stopwords", "exclusions",
        "cluster_intents", "seed",     "k",             "max_iters",
        "tol",           "n_init",    "elbow",         "standardize",
        "correlation_threshold",      "top_n",         "min_count",
        "match_semantics",            "test_fraction", "fetch"};
    return keys;
}

}  // namespace

KMeansConfig PipelineConfig::kmeans_config() const {
    KMeansConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    cfg.max_iters = max_iters;
    cfg.tol = tol;
    cfg.n_init = n_init;
    return cfg;
}

PipelineConfig pipeline_config_from_json(const std::string& json_text,
                                         const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonError(std::string("pipeline config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("pipeline config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known_config_keys().count(key))
            throw SchemaError("unknown pipeline config key: " + key);
    }

    PipelineConfig cfg;
    try {
        auto path_field = [&](const char* key, std::string& out) {
            if (j.contains(key) && !j.at(key).is_null())
                out = resolve(j.at(key).get<std::string>(), base_dir);
        };
        path_field("dataset", cfg.dataset);
        path_field("raw_dir", cfg.raw_dir);
        path_field("parsed_dir", cfg.parsed_dir);
        path_field("output_dir", cfg.output_dir);
        path_field("selector_config", cfg.selector_config);
        path_field("feature_spec", cfg.feature_spec);
        path_field("stopwords", cfg.stopwords);
        path_field("exclusions", cfg.exclusions);
        path_field("cluster_intents", cfg.cluster_intents);

        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("k")) cfg.k = j.at("k").get<int>();
        if (j.contains("max_iters")) cfg.max_iters = j.at("max_iters").get<int>();
        if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
        if (j.contains("n_init")) cfg.n_init = j.at("n_init").get<int>();
        if (j.contains("elbow")) {
            cfg.elbow_k_min = j.at("elbow").at("k_min").get<int>();
            cfg.elbow_k_max = j.at("elbow").at("k_max").get<int>();
        }
        if (j.contains("standardize")) cfg.standardize_features = j.at("standardize").get<bool>();
        if (j.contains("correlation_threshold") && !j.at("correlation_threshold").is_null())
            cfg.correlation_threshold = j.at("correlation_threshold").get<double>();
        if (j.contains("top_n")) cfg.top_n = j.at("top_n").get<int>();
        if (j.contains("min_count")) cfg.min_count = j.at("min_count").get<int>();
        if (j.contains("match_semantics")) {
            const auto s = j.at("match_semantics").get<std::string>();
            if (s == "multiplicity")
                cfg.match_semantics = MatchSemantics::Multiplicity;
            else if (s == "unique")
                cfg.match_semantics = MatchSemantics::Unique;
            else
                throw SchemaError("match_semantics must be multiplicity or unique");
        }
        if (j.contains("test_fraction")) cfg.test_fraction = j.at("test_fraction").get<double>();
        if (j.contains("fetch")) {
            const auto& f = j.at("fetch");
            if (f.contains("endpoint_url"))
                cfg.fetch.endpoint_url = f.at("endpoint_url").get<std::string>();
            if (f.contains("min_delay_ms"))
                cfg.fetch.min_delay_ms = f.at("min_delay_ms").get<std::int64_t>();
            if (f.contains("max_retries")) cfg.fetch.max_retries = f.at("max_retries").get<int>();
            if (f.contains("captcha_cooldown_s"))
                cfg.fetch.captcha_cooldown_s = f.at("captcha_cooldown_s").get<std::int64_t>();
            if (f.contains("user_agents"))
                cfg.fetch.user_agents = f.at("user_agents").get<std::vector<std::string>>();
            if (f.contains("proxies"))
                cfg.fetch.proxies = f.at("proxies").get<std::vector<std::string>>();
            if (f.contains("workers")) cfg.fetch.workers = f.at("workers").get<int>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("bad pipeline config: ") + e.what());
    }

    if (cfg.k < 1 || cfg.n_init < 1 || cfg.max_iters < 1 || !(cfg.tol > 0.0))
        throw SchemaError("pipeline config: kmeans parameters out of range");
    if (!(1 <= cfg.elbow_k_min && cfg.elbow_k_min < cfg.elbow_k_max))
        throw SchemaError("pipeline config: elbow range must satisfy 1 <= k_min < k_max");
    if (cfg.correlation_threshold &&
        !(*cfg.correlation_threshold > 0.0 && *cfg.correlation_threshold <= 1.0))
        throw SchemaError("pipeline config: correlation_threshold must be in (0, 1]");
    if (cfg.top_n < 1 || cfg.min_count < 1)
        throw SchemaError("pipeline config: top_n and min_count must be >= 1");
    if (!(cfg.test_fraction >= 0.0 && cfg.test_fraction <= 1.0))
        throw SchemaError("pipeline config: test_fraction must be in [0, 1]");
    if (cfg.fetch.min_delay_ms < 0 || cfg.fetch.max_retries < 0 ||
        cfg.fetch.captcha_cooldown_s < 0 || cfg.fetch.workers < 1 ||
        cfg.fetch.user_agents.empty())
        throw SchemaError("pipeline config: fetch settings out of range");

    require_readable(cfg.dataset, "dataset");
    require_readable(cfg.raw_dir, "raw_dir");
    require_readable(cfg.selector_config, "selector_config");
    require_readable(cfg.feature_spec, "feature_spec");
    require_readable(cfg.stopwords, "stopwords");
    require_readable(cfg.exclusions, "exclusions");
    require_readable(cfg.cluster_intents, "cluster_intents");
    return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    const std::string text = read_text_file(path);
    const fs::path parent = fs::path(path).parent_path();
    return pipeline_config_from_json(text, parent.empty() ? "." : parent.string());
}

ParsedCorpus parse_raw_dir(const std::string& raw_dir, const std::string& parsed_dir,
                           const SelectorConfig& selectors) {
    std::error_code ec;
    if (!fs::is_directory(raw_dir, ec)) throw IoError("raw directory not found: " + raw_dir);

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(raw_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    if (!parsed_dir.empty()) fs::create_directories(parsed_dir, ec);

    ParsedCorpus corpus;
    for (const auto& file : files) {
        const std::string name = file.filename().string();
        const std::string text = read_text_file(file.string());
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw SchemaError(name + ": not valid JSON: " + e.what());
        }
        if (!j.is_object() || !j.contains("query") || !j.at("query").is_string() ||
            !j.contains("fetched_at") || !j.at("fetched_at").is_string() ||
            !j.contains("body") || !j.at("body").is_string())
            throw SchemaError(name + ": raw capture needs query, fetched_at, and body strings");

        const auto query = j.at("query").get<std::string>();
        const auto fetched_at = j.at("fetched_at").get<std::string>();
        const auto body = j.at("body").get<std::string>();
        try {
            auto [doc, report] = parse_html(body, query, selectors, fetched_at);
            for (const auto& w : report.warnings) corpus.warnings.push_back(name + ": " + w);
            if (!parsed_dir.empty())
                write_text_file((fs::path(parsed_dir) / name).string(),
                                serialize_document(doc));
            corpus.docs.push_back(std::move(doc));
        } catch (const CaptchaDetected&) {
            corpus.skipped.push_back(name);
        }
    }
    return corpus;
}

std::vector<SerpDocument> load_parsed_dir(const std::string& parsed_dir) {
    std::error_code ec;
    if (!fs::is_directory(parsed_dir, ec))
        throw IoError("parsed directory not found: " + parsed_dir);

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(parsed_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    std::vector<SerpDocument> docs;
    docs.reserve(files.size());
    for (const auto& file : files)
        docs.push_back(deserialize_document(read_text_file(file.string())));
    return docs;
}

std::string assignments_to_csv(const std::vector<std::string>& queries,
                               const std::vector<int>& assignments) {
    if (queries.size() != assignments.size())
        throw LengthMismatch("assignments are not aligned with the queries");
    std::string out = "query,cluster\n";
    for (size_t i = 0; i < queries.size(); ++i)
        out += csv::join_row({queries[i], std::to_string(assignments[i])}) + "\n";
    return out;
}

void save_assignments(const std::vector<std::string>& queries,
                      const std::vector<int>& assignments, const std::string& path) {
    write_text_file(path, assignments_to_csv(queries, assignments));
}

std::vector<int> load_assignments(const std::string& path,
                                  const std::vector<std::string>& queries) {
    const auto rows = csv::parse(read_text_file(path));
    if (rows.empty() || rows[0] != std::vector<std::string>{"query", "cluster"})
        throw SchemaError("assignments file needs a query,cluster header: " + path);
    if (rows.size() - 1 != queries.size())
        throw SchemaError("assignments row count does not match the matrix: " + path);

    std::vector<int> assignments(queries.size());
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2) throw SchemaError("assignments row needs 2 fields: " + path);
        if (rows[i][0] != queries[i - 1])
            throw SchemaError("assignments query mismatch at row " + std::to_string(i) + ": " +
                              path);
        int c = 0;
        const auto& cell = rows[i][1];
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), c);
        if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || c < 0)
            throw SchemaError("assignments cluster is not a non-negative integer: " + path);
        assignments[i - 1] = c;
    }
    return assignments;
}

void write_text_file(const std::string& path, const std::string& content) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        fs::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
    if (!out) throw IoError("short write: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PipelineOutputs run_pipeline(const PipelineConfig& config) {
    PipelineOutputs out;
    std::ostringstream summary;

    const SelectorConfig selectors = SelectorConfig::load(config.selector_config);
    const ParsedCorpus corpus = parse_raw_dir(config.raw_dir, config.parsed_dir, selectors);
    if (corpus.docs.empty()) throw EmptyInput("no parseable raw captures under " + config.raw_dir);
    out.documents = corpus.docs.size();
    out.skipped_captcha = corpus.skipped.size();
    summary << "documents: " << corpus.docs.size()
            << " (captcha skipped: " << corpus.skipped.size() << ")\n";

    const std::vector<FeatureSpec> spec = config.feature_spec.empty()
                                              ? default_feature_spec()
                                              : load_feature_spec(config.feature_spec);
    FeatureMatrix matrix = build_matrix(corpus.docs, spec);
    if (config.correlation_threshold) {
        PruneResult pruned = prune_correlated(matrix, *config.correlation_threshold);
        matrix = std::move(pruned.matrix);
        summary << "features pruned: " << pruned.dropped.size() << "\n";
    }
    summary << "features: " << matrix.n_features() << "\n";

    const fs::path out_dir(config.output_dir.empty() ? "." : config.output_dir);
    auto emit = [&](const std::string& name, const std::string& content) {
        const std::string path = (out_dir / name).string();
        write_text_file(path, content);
        out.files_written.push_back(path);
    };

    emit("matrix.csv", matrix_to_csv(matrix));

    Matrix data = matrix.rows;
    Standardization st = identity_standardization(matrix.n_features());
    if (config.standardize_features) {
        auto [standardized, stats] = standardize(matrix.rows);
        data = std::move(standardized);
        st = std::move(stats);
    }
    KMeansModel model = kmeans_fit(data, config.kmeans_config());
    model.standardization = st;
    out.k = model.k;
    out.wcss = model.wcss;
    summary << "k: " << model.k << " wcss: " << model.wcss
            << " iterations: " << model.iterations_run << "\n";

    std::vector<std::string> spec_names;
    for (const auto& s : matrix.spec) spec_names.push_back(s.name);
    emit("model.json", model_to_json(model, spec_names));
    emit("assignments.csv", assignments_to_csv(matrix.queries, model.assignments));

    const std::vector<ClusterProfile> profiles =
        profile_clusters(matrix, model.assignments, model.k);
    emit("profiles.csv", profiles_to_csv(profiles));
    summary << "cluster sizes:";
    for (const auto& p : profiles) summary << " " << p.size;
    summary << "\n";

    const std::map<int, ClusterIntent> naming =
        name_clusters(profiles, load_cluster_intent_map(config.cluster_intents));
    const std::set<std::string> stopwords =
        config.stopwords.empty() ? std::set<std::string>{} : load_wordlist(config.stopwords);
    const std::set<std::string> exclusions =
        config.exclusions.empty() ? std::set<std::string>{} : load_wordlist(config.exclusions);

    const auto [train_idx, test_idx] =
        split_indices(matrix.n_rows(), config.test_fraction, config.seed);

    std::vector<std::vector<std::string>> queries_per_cluster(
        static_cast<size_t>(model.k));
    for (const auto i : train_idx)
        queries_per_cluster[static_cast<size_t>(model.assignments[i])].push_back(
            matrix.queries[i]);
    const std::vector<WordFrequency> freqs = word_frequencies(queries_per_cluster, stopwords);
    emit("word_frequencies.csv", word_frequencies_to_csv(freqs));

    const std::vector<KeywordSet> keyword_sets =
        extract_keywords(freqs, exclusions, naming, config.top_n, config.min_count);
    emit("lexicon.json", lexicon_to_json(keyword_sets));

    IntentLexicon lexicon;
    for (const auto& ks : keyword_sets)
        lexicon.keywords[ks.intent].insert(ks.keywords.begin(), ks.keywords.end());
    validate_lexicon(lexicon);

    std::vector<std::size_t> eval_idx;
    if (test_idx.empty()) {
        eval_idx.resize(matrix.n_rows());
        for (std::size_t i = 0; i < eval_idx.size(); ++i) eval_idx[i] = i;
    } else {
        eval_idx = test_idx;
        std::sort(eval_idx.begin(), eval_idx.end());
    }

    std::vector<QueryRecord> eval_records;
    eval_records.reserve(eval_idx.size());
    for (const auto i : eval_idx) eval_records.push_back({matrix.queries[i], std::nullopt});
    const TagReport tags =
        tag_batch(eval_records, lexicon, stopwords, config.match_semantics);
    out.tagged = tags.tags.size();
    emit("tags.csv", tags_to_csv(tags));

    std::vector<ClusterIntent> actual, predicted;
    actual.reserve(eval_idx.size());
    predicted.reserve(tags.tags.size());
    for (const auto i : eval_idx)
        actual.push_back(naming.at(model.assignments[i]));
    for (const auto& t : tags.tags) predicted.push_back(t.result.intent);

    const ConfusionMatrix cm = confusion(actual, predicted);
    const ClassMetrics metrics = precision_recall(cm);
    emit("metrics.json", metrics_to_json(cm, metrics));
    summary << format_metrics_table(cm, metrics);

    out.summary = summary.str();
    return out;
}

}  // namespace serpmine
