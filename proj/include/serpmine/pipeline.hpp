#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "serpmine/clustering.hpp"
#include "serpmine/errors.hpp"
#include "serpmine/serp_parser.hpp"
#include "serpmine/serp_schema.hpp"
#include "serpmine/tagger.hpp"

namespace serpmine {

struct FetchSettings {
    std::string endpoint_url;
    std::int64_t min_delay_ms = 1000;
    int max_retries = 2;
    std::int64_t captcha_cooldown_s = 300;
    std::vector<std::string> user_agents = {"serpmine/1.0"};
    std::vector<std::string> proxies;
    int workers = 1;
};

struct PipelineConfig {
    std::string dataset;
    std::string raw_dir;
    std::string parsed_dir;
    std::string output_dir;
    std::string selector_config;
    std::string feature_spec;  // empty = built-in default spec
    std::string stopwords;
    std::string exclusions;
    std::string cluster_intents;

    std::uint64_t seed = 0;
    int k = 3;
    int max_iters = 300;
    double tol = 1e-4;
    int n_init = 10;
    int elbow_k_min = 1;
    int elbow_k_max = 8;
    bool standardize_features = true;
    std::optional<double> correlation_threshold;  // absent = no pruning

    int top_n = 50;
    int min_count = 3;
    MatchSemantics match_semantics = MatchSemantics::Multiplicity;
    double test_fraction = 0.0;

    FetchSettings fetch;

    KMeansConfig kmeans_config() const;
};

// Reads the JSON config; relative paths are resolved against the
// config file's directory.
PipelineConfig pipeline_config_from_json(const std::string& json_text,
                                         const std::string& base_dir);
PipelineConfig load_pipeline_config(const std::string& path);

struct ParsedCorpus {
    std::vector<SerpDocument> docs;  // sorted by raw filename
    std::vector<std::string> skipped;  // raw files refused as captcha pages
    std::vector<std::string> warnings;
};

// Parses every .json raw-capture file ({"query","fetched_at","body"})
// under raw_dir in filename order. When parsed_dir is non-empty,
// canonical document JSON is written there under the same filenames.
ParsedCorpus parse_raw_dir(const std::string& raw_dir, const std::string& parsed_dir,
                           const SelectorConfig& selectors);

// Reads canonical document JSON files from a directory in filename
// order.
std::vector<SerpDocument> load_parsed_dir(const std::string& parsed_dir);

// CSV with header query,cluster in matrix row order.
std::string assignments_to_csv(const std::vector<std::string>& queries,
                               const std::vector<int>& assignments);
void save_assignments(const std::vector<std::string>& queries,
                      const std::vector<int>& assignments, const std::string& path);
// Returns assignments aligned with `queries`; throws SchemaError when
// the file's queries do not match.
std::vector<int> load_assignments(const std::string& path,
                                  const std::vector<std::string>& queries);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

struct PipelineOutputs {
    std::size_t documents = 0;
    std::size_t skipped_captcha = 0;
    int k = 0;
    double wcss = 0.0;
    std::size_t tagged = 0;
    std::vector<std::string> files_written;
    std::string summary;  // human-readable run report
};

// parse -> extract -> cluster -> profile -> keywords -> tag -> eval on
// already-fetched data under raw_dir. With test_fraction > 0 the
// lexicon is built from the train rows and tagging/evaluation run on
// the test rows; at 0 every row is used for both.
PipelineOutputs run_pipeline(const PipelineConfig& config);

}  // namespace serpmine
