#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "serpmine/errors.hpp"
#include "serpmine/evaluate.hpp"
#include "test_support.hpp"

using namespace serpmine;
using serpmine::test::fixture_path;

TEST_CASE("datasets parse queries with optional labels") {
    const auto records = parse_dataset(
        "best coffee\tNavigational\n"
        "tax deadline\n"
        "cheap hotels\ttransactional\r\n"
        "\n"
        "weather radar\t\n"
        "museum hours\t  INFORMATIONAL \n");
    REQUIRE(records.size() == 5);
    CHECK(records[0].query == "best coffee");
    CHECK(records[0].manual_label == ManualIntent::Navigational);
    CHECK(records[1].query == "tax deadline");
    CHECK_FALSE(records[1].manual_label.has_value());
    CHECK(records[2].manual_label == ManualIntent::Transactional);
    CHECK_FALSE(records[3].manual_label.has_value());
    CHECK(records[4].manual_label == ManualIntent::Informational);

    CHECK(parse_dataset("").empty());
    CHECK(parse_dataset("\n  \n").empty());
}

TEST_CASE("dataset errors carry 1-based line numbers") {
    try {
        parse_dataset("ok query\nbad\tone\ttwo\n");
        FAIL("expected BadRecord");
    } catch (const BadRecord& e) {
        CHECK(e.line_no == 2);
    }

    try {
        parse_dataset("ok query\n\n\tnavigational\n");
        FAIL("expected BadRecord");
    } catch (const BadRecord& e) {
        CHECK(e.line_no == 3);
    }

    try {
        parse_dataset("ok query\nanother\tshopping\n");
        FAIL("expected BadLabel");
    } catch (const BadLabel& e) {
        CHECK(e.line_no == 2);
        CHECK(std::string(e.what()).find("shopping") != std::string::npos);
    }
}

TEST_CASE("the shipped corpus dataset loads") {
    const auto records = load_dataset(fixture_path("corpus/dataset.tsv"));
    REQUIRE(records.size() == 60);
    const auto labeled = std::count_if(records.begin(), records.end(), [](const auto& r) {
        return r.manual_label.has_value();
    });
    CHECK(labeled == 42);

    std::set<std::string> queries;
    for (const auto& r : records) queries.insert(r.query);
    CHECK(queries.size() == 60);

    CHECK_THROWS_AS(load_dataset(fixture_path("corpus/missing.tsv")), IoError);
}

TEST_CASE("split_indices partitions deterministically") {
    const auto [train, test] = split_indices(10, 0.25, 7);
    CHECK(test.size() == 3);  // ceil(2.5)
    CHECK(train.size() == 7);

    std::set<std::size_t> all(train.begin(), train.end());
    all.insert(test.begin(), test.end());
    CHECK(all.size() == 10);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == 9);

    const auto again = split_indices(10, 0.25, 7);
    CHECK(again.first == train);
    CHECK(again.second == test);

    const auto other = split_indices(100, 0.25, 8);
    const auto base = split_indices(100, 0.25, 7);
    CHECK(other.first != base.first);
}

TEST_CASE("split_indices honors edge fractions") {
    const auto [all_train, no_test] = split_indices(10, 0.0, 1);
    CHECK(all_train.size() == 10);
    CHECK(no_test.empty());

    const auto [no_train, all_test] = split_indices(10, 1.0, 1);
    CHECK(no_train.empty());
    CHECK(all_test.size() == 10);

    // A fraction stored inexactly must not round an exact product up.
    const auto [tr, te] = split_indices(30000, 0.10, 1);
    CHECK(te.size() == 3000);
    CHECK(tr.size() == 27000);

    const auto [t3, e3] = split_indices(3, 1.0 / 3.0, 1);
    CHECK(e3.size() == 1);

    const auto [t0, e0] = split_indices(0, 0.5, 1);
    CHECK(t0.empty());
    CHECK(e0.empty());

    CHECK_THROWS_AS(split_indices(10, -0.1, 1), PreconditionError);
    CHECK_THROWS_AS(split_indices(10, 1.1, 1), PreconditionError);
}

TEST_CASE("split_train_test moves whole records") {
    std::vector<QueryRecord> records;
    for (int i = 0; i < 8; ++i) records.push_back({"q" + std::to_string(i), std::nullopt});
    const auto [train, test] = split_train_test(records, 0.5, 3);
    CHECK(train.size() == 4);
    CHECK(test.size() == 4);
    std::set<std::string> seen;
    for (const auto& r : train) seen.insert(r.query);
    for (const auto& r : test) seen.insert(r.query);
    CHECK(seen.size() == 8);
}

TEST_CASE("confusion counts actual rows against predicted columns") {
    using CI = ClusterIntent;
    const std::vector<CI> actual{CI::Informational, CI::Informational, CI::LocalPlace,
                                 CI::SexualRacism, CI::SexualRacism};
    const std::vector<CI> predicted{CI::Informational, CI::LocalPlace, CI::LocalPlace,
                                    CI::SexualRacism, CI::Informational};
    const auto cm = confusion(actual, predicted);
    CHECK(cm.cells[0][0] == 1);
    CHECK(cm.cells[0][1] == 1);
    CHECK(cm.cells[1][1] == 1);
    CHECK(cm.cells[2][2] == 1);
    CHECK(cm.cells[2][0] == 1);
    CHECK(cm.total() == 5);
    CHECK(cm.row_sum(0) == 2);
    CHECK(cm.col_sum(0) == 2);

    CHECK_THROWS_AS(confusion(actual, {CI::Informational}), LengthMismatch);
}

TEST_CASE("precision and recall come from column and row sums") {
    ConfusionMatrix cm;
    cm.cells = {{{2, 1, 0}, {0, 3, 1}, {1, 0, 2}}};
    const auto metrics = precision_recall(cm);
    CHECK(metrics.warnings.empty());
    CHECK(metrics.per_class[0].precision == doctest::Approx(2.0 / 3.0));
    CHECK(metrics.per_class[0].recall == doctest::Approx(2.0 / 3.0));
    CHECK(metrics.per_class[0].support == 3);
    CHECK(metrics.per_class[1].precision == doctest::Approx(3.0 / 4.0));
    CHECK(metrics.per_class[1].recall == doctest::Approx(3.0 / 4.0));
    CHECK(metrics.per_class[1].support == 4);
    CHECK(metrics.per_class[2].precision == doctest::Approx(2.0 / 3.0));
    CHECK(metrics.per_class[2].recall == doctest::Approx(2.0 / 3.0));
    CHECK(metrics.per_class[2].support == 3);
}

TEST_CASE("empty rows and columns warn instead of dividing by zero") {
    ConfusionMatrix cm;
    cm.cells = {{{0, 1, 0}, {0, 0, 0}, {0, 0, 2}}};
    const auto metrics = precision_recall(cm);
    CHECK(metrics.per_class[0].precision == 0.0);
    CHECK(metrics.per_class[0].recall == 0.0);
    CHECK(metrics.per_class[1].precision == 0.0);
    CHECK(metrics.per_class[1].recall == 0.0);
    CHECK(metrics.per_class[1].support == 0);
    CHECK(metrics.per_class[2].precision == 1.0);
    CHECK(metrics.per_class[2].recall == 1.0);
    REQUIRE(metrics.warnings.size() == 2);
    CHECK(metrics.warnings[0] == "no predictions for informational; precision set to 0");
    CHECK(metrics.warnings[1] == "no records labeled local_place; recall set to 0");
}

TEST_CASE("the example confusion matrix reproduces known metrics") {
    const auto cm = load_confusion(fixture_path("eval/confusion_example.json"));
    CHECK(cm.total() == 2996);
    const auto metrics = precision_recall(cm);
    CHECK(metrics.warnings.empty());
    CHECK(metrics.per_class[0].precision == doctest::Approx(0.464).epsilon(0.002));
    CHECK(metrics.per_class[1].precision == doctest::Approx(0.641).epsilon(0.002));
    CHECK(metrics.per_class[2].precision == doctest::Approx(0.579).epsilon(0.002));
    CHECK(metrics.per_class[0].recall == doctest::Approx(0.940).epsilon(0.002));
    CHECK(metrics.per_class[1].recall == doctest::Approx(0.132).epsilon(0.002));
    CHECK(metrics.per_class[2].recall == doctest::Approx(0.114).epsilon(0.002));
    CHECK(metrics.per_class[0].support == 1311);
    CHECK(metrics.per_class[1].support == 1071);
    CHECK(metrics.per_class[2].support == 614);
}

TEST_CASE("confusion matrices parse from json with validation") {
    const auto cm = confusion_from_json(
        R"({"labels": ["informational", "local_place", "sexual_racism"],
            "matrix": [[1, 2, 3], [4, 5, 6], [7, 8, 9]]})");
    CHECK(cm.cells[0][2] == 3);
    CHECK(cm.cells[2][0] == 7);

    const auto bare = confusion_from_json(R"({"matrix": [[1,0,0],[0,1,0],[0,0,1]]})");
    CHECK(bare.total() == 3);

    CHECK_THROWS_AS(confusion_from_json("{"), JsonError);
    CHECK_THROWS_AS(confusion_from_json(R"({"rows": []})"), SchemaError);
    CHECK_THROWS_AS(confusion_from_json(R"({"matrix": [[1,2,3],[4,5,6]]})"), SchemaError);
    CHECK_THROWS_AS(confusion_from_json(R"({"matrix": [[1,2],[3,4],[5,6]]})"), SchemaError);
    CHECK_THROWS_AS(confusion_from_json(R"({"matrix": [[1,2,-3],[4,5,6],[7,8,9]]})"),
                    SchemaError);
    CHECK_THROWS_AS(confusion_from_json(R"({"matrix": [[1,2,"x"],[4,5,6],[7,8,9]]})"),
                    SchemaError);
    CHECK_THROWS_AS(
        confusion_from_json(
            R"({"labels": ["local_place", "informational", "sexual_racism"],
                "matrix": [[1,0,0],[0,1,0],[0,0,1]]})"),
        SchemaError);
    CHECK_THROWS_AS(
        confusion_from_json(
            R"({"labels": ["informational", "local_place"],
                "matrix": [[1,0,0],[0,1,0],[0,0,1]]})"),
        SchemaError);
}

TEST_CASE("metrics serialize to a json report") {
    ConfusionMatrix cm;
    cm.cells = {{{2, 1, 0}, {0, 3, 1}, {1, 0, 2}}};
    const auto metrics = precision_recall(cm);
    const auto text = metrics_to_json(cm, metrics);
    CHECK(text.back() == '\n');

    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("labels") ==
          std::vector<std::string>{"informational", "local_place", "sexual_racism"});
    CHECK(j.at("matrix")[0] == std::vector<long>{2, 1, 0});
    CHECK(j.at("matrix")[2] == std::vector<long>{1, 0, 2});
    CHECK(j.at("per_class").at("local_place").at("precision").get<double>() ==
          doctest::Approx(0.75));
    CHECK(j.at("per_class").at("local_place").at("support").get<long>() == 4);
    CHECK(j.at("per_class").at("sexual_racism").at("recall").get<double>() ==
          doctest::Approx(2.0 / 3.0));
}

TEST_CASE("the metrics table prints counts and three-decimal rates") {
    ConfusionMatrix cm;
    cm.cells = {{{2, 1, 0}, {0, 3, 1}, {1, 0, 2}}};
    const auto table = format_metrics_table(cm, precision_recall(cm));
    CHECK(table.find("actual \\ predicted\tinformational\tlocal_place\tsexual_racism\n") !=
          std::string::npos);
    CHECK(table.find("informational\t2\t1\t0\n") != std::string::npos);
    CHECK(table.find("intent\tprecision\trecall\tsupport\n") != std::string::npos);
    CHECK(table.find("informational\t0.667\t0.667\t3\n") != std::string::npos);
    CHECK(table.find("local_place\t0.750\t0.750\t4\n") != std::string::npos);
    CHECK(table.find("warning:") == std::string::npos);

    ConfusionMatrix empty_col;
    empty_col.cells = {{{0, 1, 0}, {0, 0, 0}, {0, 0, 2}}};
    const auto warn_table = format_metrics_table(empty_col, precision_recall(empty_col));
    CHECK(warn_table.find("warning: no predictions for informational") != std::string::npos);
}
