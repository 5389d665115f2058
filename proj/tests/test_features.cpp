#include <doctest.h>

#include "serpmine/features.hpp"
#include "serpmine/serp_parser.hpp"
#include "test_support.hpp"

using namespace serpmine;

namespace {

SerpDocument doc_with(std::vector<ResultBlock> blocks, int related) {
    SerpDocument doc;
    doc.query = "q";
    doc.fetched_at = "2025-11-04T09:00:00Z";
    int pos = 1;
    for (auto& b : blocks) {
        b.position = pos++;
        doc.blocks.push_back(b);
    }
    for (int i = 0; i < related; ++i) doc.related_searches.push_back("r" + std::to_string(i));
    return doc;
}

ResultBlock make_block(ResultBlockType t, int items = 0) {
    ResultBlock b;
    b.block_type = t;
    for (int i = 0; i < items; ++i) b.items.push_back("item" + std::to_string(i));
    return b;
}

}  // namespace

TEST_CASE("default spec has 19 features in a fixed order") {
    const auto spec = default_feature_spec();
    REQUIRE(spec.size() == 19);

    CHECK(spec.front().name == "knowledge_graph");
    CHECK(spec[15].name == "other_cards");
    CHECK(spec[16].name == "paa_count");
    CHECK(spec[17].name == "related_searches_count");
    CHECK(spec[18].name == "natural_results_count");

    int binary = 0, numeric = 0;
    for (const auto& f : spec)
        (f.kind == FeatureKind::Binary ? binary : numeric)++;
    CHECK(binary == 16);
    CHECK(numeric == 3);

    // presence flags exist for every type except the three counted ones
    // and the translator
    for (const auto& f : spec) {
        if (f.kind != FeatureKind::Binary) continue;
        CHECK(f.block_type != ResultBlockType::PeopleAlsoAsked);
        CHECK(f.block_type != ResultBlockType::NaturalResults);
        CHECK(f.block_type != ResultBlockType::TopButtonAds);
        CHECK(f.block_type != ResultBlockType::Translator);
    }
}

TEST_CASE("spec json round trips and rejects inconsistent entries") {
    const auto spec = default_feature_spec();
    const auto text = feature_spec_to_json(spec);
    const auto back = feature_spec_from_json(text);
    REQUIRE(back.size() == spec.size());
    for (size_t i = 0; i < spec.size(); ++i) {
        CHECK(back[i].name == spec[i].name);
        CHECK(back[i].kind == spec[i].kind);
        CHECK(back[i].source == spec[i].source);
    }

    CHECK_THROWS_AS(feature_spec_from_json("{}"), SpecMismatch);
    CHECK_THROWS_AS(feature_spec_from_json("not json"), JsonError);
    CHECK_THROWS_AS(
        feature_spec_from_json(R"([{"name":"x","kind":"scalar","block_type":"map"}])"),
        SpecMismatch);
    CHECK_THROWS_AS(
        feature_spec_from_json(R"([{"name":"x","kind":"binary","block_type":"no_such"}])"),
        SpecMismatch);
    CHECK_THROWS_AS(
        feature_spec_from_json(
            R"([{"name":"x","kind":"binary","block_type":"map","source":"related_searches"}])"),
        SpecMismatch);
}

TEST_CASE("extraction flags presence and sums item counts") {
    const auto spec = default_feature_spec();
    auto doc = doc_with({make_block(ResultBlockType::KnowledgeGraph),
                         make_block(ResultBlockType::PeopleAlsoAsked, 3),
                         make_block(ResultBlockType::NaturalResults, 4),
                         make_block(ResultBlockType::NaturalResults, 6)},
                        5);
    const auto fv = extract_features(doc, spec);
    REQUIRE(fv.values.size() == 19);
    CHECK(fv.values[0] == 1.0);   // knowledge_graph
    CHECK(fv.values[1] == 0.0);   // calculator
    CHECK(fv.values[16] == 3.0);  // paa_count
    CHECK(fv.values[17] == 5.0);  // related_searches_count
    CHECK(fv.values[18] == 10.0); // natural_results_count sums both blocks
}

TEST_CASE("a parsed fixture page maps to the exact feature vector") {
    const auto cfg = SelectorConfig::load(test::config_path("selectors.json"));
    const std::string markup = test::read_file(test::fixture_path("serp/featured.html"));
    const auto [doc, report] =
        parse_html(markup, "how to tie a tie", cfg, "2025-11-04T09:10:00Z");
    const auto fv = extract_features(doc, default_feature_spec());
    const std::vector<double> expected = {0, 0, 0, 0, 0, 0, 0, 0, 1, 0,
                                          0, 1, 0, 0, 0, 0, 4, 7, 8};
    CHECK(fv.values == expected);
}

TEST_CASE("matrix building keeps input order and rejects empties") {
    const auto spec = default_feature_spec();
    auto d1 = doc_with({make_block(ResultBlockType::Map)}, 0);
    d1.query = "alpha";
    auto d2 = doc_with({make_block(ResultBlockType::Images)}, 2);
    d2.query = "beta";
    const auto m = build_matrix({d1, d2}, spec);
    CHECK(m.queries == std::vector<std::string>{"alpha", "beta"});
    CHECK(m.n_rows() == 2);
    CHECK(m.n_features() == 19);
    CHECK_THROWS_AS(build_matrix({}, spec), EmptyInput);
}

TEST_CASE("matrix csv is integral and round trips") {
    const auto spec = default_feature_spec();
    auto d = doc_with({make_block(ResultBlockType::Calculator),
                       make_block(ResultBlockType::PeopleAlsoAsked, 2)},
                      1);
    d.query = "two words";
    const auto m = build_matrix({d}, spec);
    const std::string text = matrix_to_csv(m);

    CHECK(text.find("query,knowledge_graph,") == 0);
    CHECK(text.find("two words,0,1,0") != std::string::npos);
    CHECK(text.find('.') == std::string::npos);  // counts, not decimals

    const auto back = matrix_from_csv(text, spec);
    CHECK(back.queries == m.queries);
    CHECK(back.rows == m.rows);

    CHECK_THROWS_AS(matrix_from_csv("query,bogus\nq,1\n", spec), SpecMismatch);
    CHECK_THROWS_AS(matrix_from_csv("", spec), EmptyInput);
}

TEST_CASE("subset csv loads any spec-consistent column slice") {
    const auto spec = default_feature_spec();
    const std::string text = "query,map,paa_count\nq1,1,4\nq2,0,0\n";
    const auto m = matrix_from_csv_subset(text, spec);
    REQUIRE(m.n_features() == 2);
    CHECK(m.spec[0].name == "map");
    CHECK(m.spec[1].name == "paa_count");
    CHECK(m.rows[0] == std::vector<double>{1, 4});
    CHECK_THROWS_AS(matrix_from_csv_subset("query,mystery\nq,1\n", spec), SpecMismatch);
}

TEST_CASE("correlation matrix is 1 on the diagonal and symmetric") {
    FeatureMatrix m;
    m.spec = {{"a", FeatureKind::Binary, FeatureSpec::Source::BlockPresence,
               ResultBlockType::Map},
              {"b", FeatureKind::Binary, FeatureSpec::Source::BlockPresence,
               ResultBlockType::Images},
              {"c", FeatureKind::Numeric, FeatureSpec::Source::RelatedSearchesCount,
               std::nullopt}};
    m.queries = {"q1", "q2", "q3", "q4"};
    m.rows = {{1, 1, 5}, {0, 0, 3}, {1, 1, 4}, {0, 0, 2}};

    const auto corr = correlation_matrix(m);
    REQUIRE(corr.size() == 3);
    CHECK(corr[0][0] == doctest::Approx(1.0));
    CHECK(corr[0][1] == doctest::Approx(1.0));  // identical binary columns
    CHECK(corr[1][0] == doctest::Approx(corr[0][1]));
    CHECK(corr[0][2] > 0.0);

    FeatureMatrix constant = m;
    for (auto& r : constant.rows) r[0] = 1;
    const auto corr2 = correlation_matrix(constant);
    CHECK(corr2[0][0] == doctest::Approx(1.0));
    CHECK(corr2[0][1] == doctest::Approx(0.0));
    CHECK(corr2[0][2] == doctest::Approx(0.0));
}

TEST_CASE("pruning drops the later feature of a high-correlation pair") {
    FeatureMatrix m;
    m.spec = {{"a", FeatureKind::Binary, FeatureSpec::Source::BlockPresence,
               ResultBlockType::Map},
              {"b", FeatureKind::Binary, FeatureSpec::Source::BlockPresence,
               ResultBlockType::Images},
              {"c", FeatureKind::Binary, FeatureSpec::Source::BlockPresence,
               ResultBlockType::Videos}};
    m.queries = {"q1", "q2", "q3", "q4"};
    m.rows = {{1, 1, 0}, {0, 0, 1}, {1, 1, 1}, {0, 0, 0}};

    const auto pruned = prune_correlated(m, 0.95);
    CHECK(pruned.dropped == std::vector<std::string>{"b"});
    REQUIRE(pruned.matrix.n_features() == 2);
    CHECK(pruned.matrix.spec[0].name == "a");
    CHECK(pruned.matrix.spec[1].name == "c");
    CHECK(pruned.matrix.rows[0] == std::vector<double>{1, 0});

    CHECK_THROWS_AS(prune_correlated(m, 1.1), PreconditionError);
    CHECK_THROWS_AS(prune_correlated(m, 0.0), PreconditionError);

    FeatureMatrix weaker = m;
    weaker.rows = {{1, 1, 0}, {0, 0, 1}, {1, 1, 1}, {0, 1, 0}};
    const auto kept = prune_correlated(weaker, 0.95);
    CHECK(kept.dropped.empty());
    CHECK(kept.matrix.n_features() == 3);
}
