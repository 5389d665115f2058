#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "serpmine/characterize.hpp"
#include "serpmine/clustering.hpp"
#include "serpmine/errors.hpp"
#include "serpmine/evaluate.hpp"
#include "serpmine/features.hpp"
#include "serpmine/fetcher.hpp"
#include "serpmine/pipeline.hpp"
#include "serpmine/serp_parser.hpp"
#include "serpmine/tagger.hpp"

namespace {

using namespace serpmine;

std::string out_path(const PipelineConfig& cfg, const std::string& name) {
    const std::string dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
    return (std::filesystem::path(dir) / name).string();
}

std::vector<FeatureSpec> spec_for(const PipelineConfig& cfg) {
    return cfg.feature_spec.empty() ? default_feature_spec()
                                    : load_feature_spec(cfg.feature_spec);
}

int cluster_count(const PipelineConfig& cfg, const std::vector<int>& assignments) {
    int k = cfg.k;
    for (const int a : assignments) k = std::max(k, a + 1);
    return k;
}

int cmd_fetch(PipelineConfig cfg) {
    if (cfg.dataset.empty()) throw Error("fetch needs a dataset path in the config");
    if (cfg.fetch.endpoint_url.empty()) throw Error("fetch needs an endpoint URL");
    if (cfg.raw_dir.empty()) throw Error("fetch needs a raw_dir to write captures");

    const std::vector<QueryRecord> records = load_dataset(cfg.dataset);
    std::vector<std::string> queries;
    queries.reserve(records.size());
    for (const auto& r : records) queries.push_back(r.query);

    const SelectorConfig selectors = SelectorConfig::load(cfg.selector_config);
    std::vector<std::string> proxies = proxies_from_env();
    if (proxies.empty()) proxies = cfg.fetch.proxies;
    if (proxies.empty())
        std::cerr << "warning: no proxies configured, using direct connections\n";
    ProxyPool pool(proxies);

    FetchConfig fc;
    fc.endpoint_url = cfg.fetch.endpoint_url;
    fc.min_delay_ms = cfg.fetch.min_delay_ms;
    fc.max_retries = cfg.fetch.max_retries;
    fc.captcha_cooldown_s = cfg.fetch.captcha_cooldown_s;
    fc.user_agents = cfg.fetch.user_agents;
    fc.output_dir = cfg.raw_dir;

    SystemClock clock;
    HttplibTransport transport;
    Fetcher fetcher(fc, selectors, pool, transport, clock);
    const std::vector<FetchResult> results = fetcher.fetch_batch(queries, cfg.fetch.workers);

    std::size_t ok = 0, captcha = 0, network = 0;
    for (const auto& r : results) {
        if (r.status == FetchStatus::Ok) {
            persist_raw(r, cfg.raw_dir);
            ++ok;
        } else if (r.status == FetchStatus::Captcha) {
            ++captcha;
        } else {
            ++network;
        }
        std::cout << fetch_status_name(r.status) << "\tattempts=" << r.attempts << "\t"
                  << r.query << "\n";
    }
    std::cout << "fetched " << ok << "/" << results.size() << " ok (captcha " << captcha
              << ", network " << network << ") -> " << cfg.raw_dir << "\n";
    return 0;
}

int cmd_parse(const PipelineConfig& cfg) {
    const SelectorConfig selectors = SelectorConfig::load(cfg.selector_config);
    const ParsedCorpus corpus = parse_raw_dir(cfg.raw_dir, cfg.parsed_dir, selectors);
    for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& s : corpus.skipped) std::cerr << "captcha page skipped: " << s << "\n";
    std::cout << "parsed " << corpus.docs.size() << " documents -> " << cfg.parsed_dir
              << " (skipped " << corpus.skipped.size() << ")\n";
    return 0;
}

int cmd_extract(const PipelineConfig& cfg) {
    const std::vector<SerpDocument> docs = load_parsed_dir(cfg.parsed_dir);
    FeatureMatrix matrix = build_matrix(docs, spec_for(cfg));
    if (cfg.correlation_threshold) {
        PruneResult pruned = prune_correlated(matrix, *cfg.correlation_threshold);
        for (const auto& name : pruned.dropped) std::cout << "dropped: " << name << "\n";
        matrix = std::move(pruned.matrix);
    }
    const std::string path = out_path(cfg, "matrix.csv");
    write_text_file(path, matrix_to_csv(matrix));
    std::cout << "matrix: " << matrix.n_rows() << " rows x " << matrix.n_features()
              << " features -> " << path << "\n";
    return 0;
}

int cmd_cluster(const PipelineConfig& cfg) {
    const FeatureMatrix matrix = load_matrix_subset(out_path(cfg, "matrix.csv"), spec_for(cfg));
    Matrix data = matrix.rows;
    Standardization st = identity_standardization(matrix.n_features());
    if (cfg.standardize_features) {
        auto [standardized, stats] = standardize(matrix.rows);
        data = std::move(standardized);
        st = std::move(stats);
    }
    KMeansModel model = kmeans_fit(data, cfg.kmeans_config());
    model.standardization = st;

    std::vector<std::string> names;
    for (const auto& s : matrix.spec) names.push_back(s.name);
    save_model(model, names, out_path(cfg, "model.json"));
    save_assignments(matrix.queries, model.assignments, out_path(cfg, "assignments.csv"));
    std::cout << "k=" << model.k << " wcss=" << model.wcss
              << " iterations=" << model.iterations_run << "\n";
    return 0;
}

int cmd_elbow(const PipelineConfig* cfg, const std::string& input, int k_min, int k_max,
              const KMeansConfig& tmpl) {
    Matrix data;
    if (!input.empty()) {
        data = load_numeric_csv(input);
    } else {
        const FeatureMatrix matrix =
            load_matrix_subset(out_path(*cfg, "matrix.csv"), spec_for(*cfg));
        data = matrix.rows;
        if (cfg->standardize_features) data = standardize(matrix.rows).first;
    }
    const ElbowResult res = elbow_select(data, k_min, k_max, tmpl);
    for (size_t i = 0; i < res.k_values.size(); ++i)
        std::cout << "k=" << res.k_values[i] << " wcss=" << res.wcss_values[i] << "\n";
    std::cout << "selected_k " << res.selected_k << "\n";
    return 0;
}

int cmd_profile(const PipelineConfig& cfg) {
    const FeatureMatrix matrix = load_matrix_subset(out_path(cfg, "matrix.csv"), spec_for(cfg));
    const std::vector<int> assignments =
        load_assignments(out_path(cfg, "assignments.csv"), matrix.queries);
    const std::vector<ClusterProfile> profiles =
        profile_clusters(matrix, assignments, cluster_count(cfg, assignments));
    const std::string csv = profiles_to_csv(profiles);
    write_text_file(out_path(cfg, "profiles.csv"), csv);
    std::cout << csv;
    return 0;
}

int cmd_keywords(const PipelineConfig& cfg) {
    const FeatureMatrix matrix = load_matrix_subset(out_path(cfg, "matrix.csv"), spec_for(cfg));
    const std::vector<int> assignments =
        load_assignments(out_path(cfg, "assignments.csv"), matrix.queries);
    const int k = cluster_count(cfg, assignments);
    const std::vector<ClusterProfile> profiles = profile_clusters(matrix, assignments, k);
    const std::map<int, ClusterIntent> naming =
        name_clusters(profiles, load_cluster_intent_map(cfg.cluster_intents));

    const std::set<std::string> stopwords =
        cfg.stopwords.empty() ? std::set<std::string>{} : load_wordlist(cfg.stopwords);
    const std::set<std::string> exclusions =
        cfg.exclusions.empty() ? std::set<std::string>{} : load_wordlist(cfg.exclusions);

    std::vector<std::vector<std::string>> queries_per_cluster(static_cast<size_t>(k));
    for (size_t i = 0; i < matrix.n_rows(); ++i)
        queries_per_cluster[static_cast<size_t>(assignments[i])].push_back(matrix.queries[i]);

    const std::vector<WordFrequency> freqs = word_frequencies(queries_per_cluster, stopwords);
    write_text_file(out_path(cfg, "word_frequencies.csv"), word_frequencies_to_csv(freqs));

    const std::vector<KeywordSet> sets =
        extract_keywords(freqs, exclusions, naming, cfg.top_n, cfg.min_count);
    write_text_file(out_path(cfg, "lexicon.json"), lexicon_to_json(sets));

    for (const auto& ks : sets) {
        std::cout << cluster_intent_name(ks.intent) << ":";
        int shown = 0;
        for (const auto& w : ks.keywords) {
            if (++shown > 10) break;
            std::cout << " " << w;
        }
        std::cout << "\n";
    }
    std::cout << "lexicon -> " << out_path(cfg, "lexicon.json") << "\n";
    return 0;
}

int cmd_tag(const PipelineConfig& cfg) {
    if (cfg.dataset.empty()) throw Error("tag needs a dataset path in the config");
    std::vector<QueryRecord> records = load_dataset(cfg.dataset);
    if (cfg.test_fraction > 0.0)
        records = split_train_test(records, cfg.test_fraction, cfg.seed).second;

    const IntentLexicon lexicon = load_lexicon(out_path(cfg, "lexicon.json"));
    const std::set<std::string> stopwords =
        cfg.stopwords.empty() ? std::set<std::string>{} : load_wordlist(cfg.stopwords);
    const TagReport report = tag_batch(records, lexicon, stopwords, cfg.match_semantics);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    write_text_file(out_path(cfg, "tags.csv"), tags_to_csv(report));

    std::array<std::size_t, kClusterIntentCount> counts{};
    for (const auto& t : report.tags) counts[static_cast<size_t>(t.result.intent)]++;
    for (const ClusterIntent c : all_cluster_intents())
        std::cout << cluster_intent_name(c) << ": " << counts[static_cast<size_t>(c)] << "\n";
    std::cout << "tags -> " << out_path(cfg, "tags.csv") << "\n";
    return 0;
}

int cmd_eval(const PipelineConfig* cfg, const std::string& matrix_json) {
    if (!matrix_json.empty()) {
        const ConfusionMatrix cm = load_confusion(matrix_json);
        std::cout << format_metrics_table(cm, precision_recall(cm));
        return 0;
    }

    const FeatureMatrix matrix =
        load_matrix_subset(out_path(*cfg, "matrix.csv"), spec_for(*cfg));
    const std::vector<int> assignments =
        load_assignments(out_path(*cfg, "assignments.csv"), matrix.queries);
    const int k = cluster_count(*cfg, assignments);
    const std::vector<ClusterProfile> profiles = profile_clusters(matrix, assignments, k);
    const std::map<int, ClusterIntent> naming =
        name_clusters(profiles, load_cluster_intent_map(cfg->cluster_intents));

    std::map<std::string, int> cluster_of;
    for (size_t i = 0; i < matrix.n_rows(); ++i) cluster_of[matrix.queries[i]] = assignments[i];

    std::vector<ClusterIntent> actual, predicted;
    for (const auto& [query, intent] : load_tags(out_path(*cfg, "tags.csv"))) {
        const auto it = cluster_of.find(query);
        if (it == cluster_of.end())
            throw Error("tagged query is not in the matrix: " + query);
        actual.push_back(naming.at(it->second));
        predicted.push_back(intent);
    }

    const ConfusionMatrix cm = confusion(actual, predicted);
    const ClassMetrics metrics = precision_recall(cm);
    write_text_file(out_path(*cfg, "metrics.json"), metrics_to_json(cm, metrics));
    std::cout << format_metrics_table(cm, metrics);
    return 0;
}

int cmd_pipeline(const PipelineConfig& cfg) {
    const PipelineOutputs out = run_pipeline(cfg);
    std::cout << out.summary;
    for (const auto& f : out.files_written) std::cout << "wrote " << f << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SERP query-intent mining toolkit"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string config_path, endpoint, input, matrix_json;
    std::uint64_t seed = 0;
    int k = 0, top_n = 0, min_count = 0, k_min = 1, k_max = 8;
    double test_fraction = 0.0, threshold = 0.0;

    auto add_config = [&](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--config", config_path, "pipeline config JSON");
        if (required) opt->required();
        return opt;
    };

    auto* sub_fetch = app.add_subcommand("fetch", "request dataset queries and save raw captures");
    add_config(sub_fetch, true);
    auto* opt_endpoint = sub_fetch->add_option("--endpoint", endpoint, "SERP endpoint URL");

    auto* sub_parse = app.add_subcommand("parse", "parse raw captures into documents");
    add_config(sub_parse, true);

    auto* sub_extract = app.add_subcommand("extract", "build the feature matrix");
    add_config(sub_extract, true);
    auto* opt_threshold_x =
        sub_extract->add_option("--threshold", threshold, "correlation prune threshold");

    auto* sub_cluster = app.add_subcommand("cluster", "fit the query clusters");
    add_config(sub_cluster, true);
    auto* opt_k = sub_cluster->add_option("--k", k, "number of clusters");
    auto* opt_seed_c = sub_cluster->add_option("--seed", seed, "random seed");

    auto* sub_elbow = app.add_subcommand("elbow", "scan k and pick the elbow");
    auto* opt_config_e = add_config(sub_elbow, false);
    sub_elbow->add_option("--input", input, "numeric matrix CSV (bypasses the config)");
    sub_elbow->add_option("--k-min", k_min, "smallest k");
    sub_elbow->add_option("--k-max", k_max, "largest k");
    auto* opt_seed_e = sub_elbow->add_option("--seed", seed, "random seed");

    auto* sub_profile = app.add_subcommand("profile", "per-cluster feature statistics");
    add_config(sub_profile, true);

    auto* sub_keywords = app.add_subcommand("keywords", "extract per-intent keyword sets");
    add_config(sub_keywords, true);
    auto* opt_top_n = sub_keywords->add_option("--top-n", top_n, "keywords kept per intent");
    auto* opt_min_count =
        sub_keywords->add_option("--min-count", min_count, "minimum token count");

    auto* sub_tag = app.add_subcommand("tag", "label dataset queries with the lexicon");
    add_config(sub_tag, true);
    auto* opt_tf_t = sub_tag->add_option("--test-fraction", test_fraction,
                                         "tag only the held-out fraction");
    auto* opt_seed_t = sub_tag->add_option("--seed", seed, "random seed");

    auto* sub_eval = app.add_subcommand("eval", "clustering vs lexicon agreement metrics");
    auto* opt_config_v = add_config(sub_eval, false);
    sub_eval->add_option("--matrix", matrix_json, "confusion matrix JSON (bypasses the config)");

    auto* sub_pipeline = app.add_subcommand("pipeline", "run the full chain on fetched data");
    add_config(sub_pipeline, true);
    auto* opt_seed_p = sub_pipeline->add_option("--seed", seed, "random seed");
    auto* opt_k_p = sub_pipeline->add_option("--k", k, "number of clusters");
    auto* opt_tf_p =
        sub_pipeline->add_option("--test-fraction", test_fraction, "held-out fraction");
    auto* opt_threshold_p =
        sub_pipeline->add_option("--threshold", threshold, "correlation prune threshold");
    auto* opt_top_n_p = sub_pipeline->add_option("--top-n", top_n, "keywords kept per intent");
    auto* opt_min_count_p =
        sub_pipeline->add_option("--min-count", min_count, "minimum token count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        using serpmine::PipelineConfig;
        auto config = [&]() -> PipelineConfig {
            return serpmine::load_pipeline_config(config_path);
        };

        if (app.got_subcommand(sub_fetch)) {
            PipelineConfig cfg = config();
            if (opt_endpoint->count()) cfg.fetch.endpoint_url = endpoint;
            return cmd_fetch(std::move(cfg));
        }
        if (app.got_subcommand(sub_parse)) return cmd_parse(config());
        if (app.got_subcommand(sub_extract)) {
            PipelineConfig cfg = config();
            if (opt_threshold_x->count()) cfg.correlation_threshold = threshold;
            return cmd_extract(cfg);
        }
        if (app.got_subcommand(sub_cluster)) {
            PipelineConfig cfg = config();
            if (opt_k->count()) cfg.k = k;
            if (opt_seed_c->count()) cfg.seed = seed;
            return cmd_cluster(cfg);
        }
        if (app.got_subcommand(sub_elbow)) {
            if (input.empty() && !opt_config_e->count()) {
                std::cerr << "elbow needs --input or --config\n" << sub_elbow->help();
                return 2;
            }
            PipelineConfig cfg;
            if (opt_config_e->count()) cfg = config();
            serpmine::KMeansConfig tmpl = cfg.kmeans_config();
            if (opt_seed_e->count()) tmpl.seed = seed;
            return cmd_elbow(opt_config_e->count() ? &cfg : nullptr, input, k_min, k_max, tmpl);
        }
        if (app.got_subcommand(sub_profile)) return cmd_profile(config());
        if (app.got_subcommand(sub_keywords)) {
            PipelineConfig cfg = config();
            if (opt_top_n->count()) cfg.top_n = top_n;
            if (opt_min_count->count()) cfg.min_count = min_count;
            return cmd_keywords(cfg);
        }
        if (app.got_subcommand(sub_tag)) {
            PipelineConfig cfg = config();
            if (opt_tf_t->count()) cfg.test_fraction = test_fraction;
            if (opt_seed_t->count()) cfg.seed = seed;
            return cmd_tag(cfg);
        }
        if (app.got_subcommand(sub_eval)) {
            if (matrix_json.empty() && !opt_config_v->count()) {
                std::cerr << "eval needs --matrix or --config\n" << sub_eval->help();
                return 2;
            }
            PipelineConfig cfg;
            if (opt_config_v->count()) cfg = config();
            return cmd_eval(opt_config_v->count() ? &cfg : nullptr, matrix_json);
        }
        if (app.got_subcommand(sub_pipeline)) {
            PipelineConfig cfg = config();
            if (opt_seed_p->count()) cfg.seed = seed;
            if (opt_k_p->count()) cfg.k = k;
            if (opt_tf_p->count()) cfg.test_fraction = test_fraction;
            if (opt_threshold_p->count()) cfg.correlation_threshold = threshold;
            if (opt_top_n_p->count()) cfg.top_n = top_n;
            if (opt_min_count_p->count()) cfg.min_count = min_count;
            return cmd_pipeline(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
