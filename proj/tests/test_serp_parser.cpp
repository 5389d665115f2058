#include <doctest.h>

#include <json.hpp>

#include "serpmine/serp_parser.hpp"
#include "test_support.hpp"

using namespace serpmine;
using test::fixture_path;
using test::read_file;

namespace {

SelectorConfig fixture_selectors() {
    return SelectorConfig::load(test::config_path("selectors.json"));
}

}  // namespace

TEST_CASE("selector config requires every block type") {
    const std::string config = R"({
        "blocks": {"knowledge_graph": {"container_selector": "div.kg"}},
        "captcha_markers": ["captcha"]
    })";
    CHECK_THROWS_AS(SelectorConfig::from_json(config), SchemaError);
}

TEST_CASE("selector config rejects unknown block names and empty marker list") {
    nlohmann::json j;
    for (const auto t : all_block_types())
        j["blocks"][std::string(block_type_name(t))] = {{"container_selector", "div.x"}};
    j["captcha_markers"] = nlohmann::json::array({"captcha"});

    auto bad_extra = j;
    bad_extra["blocks"]["mystery_block"] = {{"container_selector", "div.y"}};
    CHECK_THROWS_AS(SelectorConfig::from_json(bad_extra.dump()), SchemaError);

    auto bad_markers = j;
    bad_markers["captcha_markers"] = nlohmann::json::array();
    CHECK_THROWS_AS(SelectorConfig::from_json(bad_markers.dump()), SchemaError);

    CHECK_NOTHROW(SelectorConfig::from_json(j.dump()));
}

TEST_CASE("captcha detection is a case insensitive substring scan") {
    const auto cfg = fixture_selectors();
    CHECK(detect_captcha("<p>Unusual Traffic detected</p>", cfg));
    CHECK(detect_captcha("please solve this CAPTCHA", cfg));
    CHECK_FALSE(detect_captcha("<p>ordinary results page</p>", cfg));
}

TEST_CASE("empty query is rejected before parsing") {
    const auto cfg = fixture_selectors();
    CHECK_THROWS_AS(parse_html("<html></html>", "", cfg, "2025-11-04T09:00:00Z"), EmptyQuery);
    CHECK_THROWS_AS(parse_html("<html></html>", "   ", cfg, "2025-11-04T09:00:00Z"), EmptyQuery);
}

TEST_CASE("every fixture page round trips to its frozen canonical form") {
    const auto cfg = fixture_selectors();
    const auto manifest =
        nlohmann::json::parse(read_file(fixture_path("serp/manifest.json")));

    int checked = 0;
    for (const auto& entry : manifest.at("fixtures")) {
        const std::string file = entry.at("file").get<std::string>();
        const std::string query = entry.at("query").get<std::string>();
        const std::string fetched_at = entry.at("fetched_at").get<std::string>();
        const std::string markup = read_file(fixture_path("serp/" + file));

        CAPTURE(file);
        if (entry.value("captcha", false)) {
            CHECK_THROWS_AS(parse_html(markup, query, cfg, fetched_at), CaptchaDetected);
            continue;
        }
        const auto [doc, report] = parse_html(markup, query, cfg, fetched_at);
        const std::string expected =
            read_file(fixture_path("serp/" + entry.at("expected").get<std::string>()));
        CHECK(serialize_document(doc) == expected);
        ++checked;
    }
    CHECK(checked >= 15);
}

TEST_CASE("positions follow document order across block types") {
    const auto cfg = fixture_selectors();
    const std::string markup = read_file(fixture_path("serp/kitchen_sink.html"));
    const auto [doc, report] =
        parse_html(markup, "seattle weather today", cfg, "2025-11-04T09:00:00Z");

    REQUIRE(doc.blocks.size() == 20);
    for (size_t i = 0; i < doc.blocks.size(); ++i)
        CHECK(doc.blocks[i].position == static_cast<int>(i) + 1);
    CHECK(doc.blocks.front().block_type == ResultBlockType::TopButtonAds);
    CHECK(doc.blocks.back().block_type == ResultBlockType::OtherCards);
    CHECK(doc.parse_warnings.empty());
    CHECK(report.blocks_found.at(ResultBlockType::NaturalResults) == 1);
}

TEST_CASE("missing block types produce one warning each") {
    const auto cfg = fixture_selectors();
    const auto [doc, report] =
        parse_html("<div><p>nothing recognizable</p></div>", "anything", cfg,
                   "2025-11-04T09:00:00Z");
    CHECK(doc.blocks.empty());
    CHECK(doc.parse_warnings.size() == kResultBlockTypeCount);
    CHECK(doc.parse_warnings.front() == "no knowledge_graph blocks matched");
    CHECK(doc.parse_warnings.back() == "no other_cards blocks matched");
}

TEST_CASE("malformed markup still yields the recovered blocks") {
    const auto cfg = fixture_selectors();
    const std::string markup = read_file(fixture_path("serp/multi_block.html"));
    const auto [doc, report] =
        parse_html(markup, "fish & chips recipe", cfg, "2025-11-04T09:16:00Z");

    REQUIRE(doc.blocks.size() == 3);
    CHECK(doc.blocks[0].block_type == ResultBlockType::NaturalResults);
    CHECK(doc.blocks[0].title == "Results for fish & chips");
    REQUIRE(doc.blocks[0].items.size() == 2);
    CHECK(doc.blocks[0].items[1] == "Classic recipe collection");
    CHECK(doc.blocks[1].block_type == ResultBlockType::OtherCards);
    CHECK(doc.blocks[1].title == "Street food guide\xE2\x80\x99s pick");
    CHECK(doc.blocks[2].block_type == ResultBlockType::NaturalResults);
    CHECK_FALSE(doc.blocks[2].title.has_value());
}
