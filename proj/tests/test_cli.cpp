#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "serpmine/pipeline.hpp"
#include "test_support.hpp"

using namespace serpmine;
using serpmine::test::TempDir;
using serpmine::test::config_path;
using serpmine::test::fixture_path;
using serpmine::test::read_file;

namespace {

std::string cli_path() {
    if (const char* env = std::getenv("SERPMINE_CLI")) return env;
    std::error_code ec;
    const auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
    if (!ec) {
        const auto sibling = self.parent_path() / "serpmine";
        if (std::filesystem::exists(sibling)) return sibling.string();
    }
    return "./serpmine";
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = "'" + cli_path() + "' " + args + " 2>&1";
    CliResult result;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return result;
    char buf[4096];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, n);
    const int status = ::pclose(pipe);
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

std::string quoted(const std::string& path) {
    return "'" + path + "'";
}

// Config JSON with absolute paths, written next to the outputs.
std::string write_corpus_config(const TempDir& dir) {
    const std::string text = std::string("{\n") +
        "  \"dataset\": \"" + fixture_path("corpus/dataset.tsv") + "\",\n" +
        "  \"raw_dir\": \"" + fixture_path("corpus/raw") + "\",\n" +
        "  \"parsed_dir\": \"" + dir.join("parsed") + "\",\n" +
        "  \"output_dir\": \"" + dir.join("out") + "\",\n" +
        "  \"selector_config\": \"" + config_path("selectors.json") + "\",\n" +
        "  \"feature_spec\": \"" + config_path("feature_spec.json") + "\",\n" +
        "  \"stopwords\": \"" + config_path("stopwords.txt") + "\",\n" +
        "  \"exclusions\": \"" + config_path("exclusions.txt") + "\",\n" +
        "  \"cluster_intents\": \"" + config_path("cluster_intents.json") + "\",\n" +
        "  \"seed\": 42\n" +
        "}\n";
    const std::string path = dir.join("config.json");
    write_text_file(path, text);
    return path;
}

}  // namespace

TEST_CASE("the cli prints usage and rejects bad invocations") {
    const auto help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("Usage") != std::string::npos);
    CHECK(help.output.find("pipeline") != std::string::npos);
    CHECK(help.output.find("elbow") != std::string::npos);

    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("cluster").exit_code == 2);  // --config is required
    CHECK(run_cli("eval").exit_code == 2);
    CHECK(run_cli("elbow").exit_code == 2);

    const auto missing = run_cli("parse --config '/nonexistent/config.json'");
    CHECK(missing.exit_code == 1);
    CHECK(missing.output.find("error:") != std::string::npos);
}

TEST_CASE("cli eval reports metrics for a stored confusion matrix") {
    const auto res =
        run_cli("eval --matrix " + quoted(fixture_path("eval/confusion_example.json")));
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("informational\t0.464\t0.940\t1311") != std::string::npos);
    CHECK(res.output.find("local_place\t0.641\t0.132\t1071") != std::string::npos);
    CHECK(res.output.find("sexual_racism\t0.579\t0.114\t614") != std::string::npos);
}

TEST_CASE("cli elbow picks the knee of a stored matrix") {
    const auto res = run_cli("elbow --input " + quoted(fixture_path("blobs.csv")));
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("k=1 wcss=") != std::string::npos);
    CHECK(res.output.find("k=8 wcss=") != std::string::npos);
    CHECK(res.output.find("selected_k 3") != std::string::npos);
}

TEST_CASE("cli pipeline runs the corpus end to end") {
    TempDir dir;
    const auto cfg = write_corpus_config(dir);
    const auto res = run_cli("pipeline --config " + quoted(cfg));
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("documents: 60 (captcha skipped: 0)") != std::string::npos);
    CHECK(res.output.find("cluster sizes: 20 20 20") != std::string::npos);
    CHECK(res.output.find("metrics.json") != std::string::npos);
    CHECK(std::filesystem::exists(dir.join("out/metrics.json")));
    CHECK(read_file(dir.join("out/matrix.csv")) ==
          read_file(fixture_path("corpus/expected_matrix.csv")));
}

TEST_CASE("cli subcommands chain through the shared output directory") {
    TempDir dir;
    const auto cfg = quoted(write_corpus_config(dir));

    const auto parse = run_cli("parse --config " + cfg);
    CHECK(parse.exit_code == 0);
    CHECK(parse.output.find("parsed 60 documents") != std::string::npos);

    const auto extract = run_cli("extract --config " + cfg);
    CHECK(extract.exit_code == 0);
    CHECK(extract.output.find("matrix: 60 rows x 19 features") != std::string::npos);

    const auto cluster = run_cli("cluster --config " + cfg);
    CHECK(cluster.exit_code == 0);
    CHECK(cluster.output.find("k=3 wcss=") != std::string::npos);

    const auto profile = run_cli("profile --config " + cfg);
    CHECK(profile.exit_code == 0);
    CHECK(profile.output.find("cluster,size,feature,kind,value") != std::string::npos);

    const auto keywords = run_cli("keywords --config " + cfg);
    CHECK(keywords.exit_code == 0);
    CHECK(keywords.output.find("informational:") != std::string::npos);
    CHECK(keywords.output.find("lexicon ->") != std::string::npos);

    const auto tag = run_cli("tag --config " + cfg);
    CHECK(tag.exit_code == 0);
    CHECK(tag.output.find("tags ->") != std::string::npos);

    const auto eval = run_cli("eval --config " + cfg);
    CHECK(eval.exit_code == 0);
    CHECK(eval.output.find("informational\t20\t0\t0") != std::string::npos);
    CHECK(eval.output.find("local_place\t2\t18\t0") != std::string::npos);
    CHECK(eval.output.find("sexual_racism\t0\t0\t20") != std::string::npos);
    CHECK(std::filesystem::exists(dir.join("out/metrics.json")));

    const auto rebucket = run_cli("cluster --config " + cfg + " --k 2 --seed 7");
    CHECK(rebucket.exit_code == 0);
    CHECK(rebucket.output.find("k=2 wcss=") != std::string::npos);
}

TEST_CASE("cli fetch captures pages from a live endpoint") {
    httplib::Server server;
    server.Get("/search", [](const httplib::Request& req, httplib::Response& res) {
        res.set_content("<html><body><div class=\"g\">page for " +
                            req.get_param_value("q") + "</div></body></html>",
                        "text/html");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread serve([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    TempDir dir;
    write_text_file(dir.join("dataset.tsv"), "first query\nsecond query\tnavigational\n");
    const std::string cfg_text = std::string("{\n") +
        "  \"dataset\": \"" + dir.join("dataset.tsv") + "\",\n" +
        "  \"raw_dir\": \"" + dir.join("raw") + "\",\n" +
        "  \"selector_config\": \"" + config_path("selectors.json") + "\",\n" +
        "  \"fetch\": {\"endpoint_url\": \"http://127.0.0.1:" + std::to_string(port) +
        "/search\", \"min_delay_ms\": 0, \"max_retries\": 0}\n" +
        "}\n";
    write_text_file(dir.join("config.json"), cfg_text);
    std::filesystem::create_directories(dir.join("raw"));

    const auto res = run_cli("fetch --config " + quoted(dir.join("config.json")));
    server.stop();
    serve.join();

    CHECK(res.exit_code == 0);
    CHECK(res.output.find("fetched 2/2 ok") != std::string::npos);

    size_t captures = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir.join("raw")))
        if (entry.path().extension() == ".json") ++captures;
    CHECK(captures == 2);
}
