#include "serpmine/serp_schema.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

namespace serpmine {

namespace {

struct BlockTypeEntry {
    ResultBlockType type;
    std::string_view name;
};

constexpr std::array<BlockTypeEntry, kResultBlockTypeCount> kBlockTypeTable{{
    {ResultBlockType::KnowledgeGraph, "knowledge_graph"},
    {ResultBlockType::Calculator, "calculator"},
    {ResultBlockType::DirectAnswer, "direct_answer"},
    {ResultBlockType::Map, "map"},
    {ResultBlockType::LocalResult, "local_result"},
    {ResultBlockType::CommercialSponsored, "commercial_sponsored"},
    {ResultBlockType::Twitter, "twitter"},
    {ResultBlockType::TopStories, "top_stories"},
    {ResultBlockType::Videos, "videos"},
    {ResultBlockType::Images, "images"},
    {ResultBlockType::ContentNavigationBar, "content_navigation_bar"},
    {ResultBlockType::FeaturedSnippet, "featured_snippet"},
    {ResultBlockType::RichSnippets, "rich_snippets"},
    {ResultBlockType::PeopleAlsoAsked, "people_also_asked"},
    {ResultBlockType::SimilarEntity, "similar_entity"},
    {ResultBlockType::Translator, "translator"},
    {ResultBlockType::TopButtonAds, "top_button_ads"},
    {ResultBlockType::NaturalResults, "natural_results"},
    {ResultBlockType::PartnersBlock, "partners_block"},
    {ResultBlockType::OtherCards, "other_cards"},
}};

std::string lower_copy(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

const std::array<ResultBlockType, kResultBlockTypeCount>& all_block_types() {
    static const auto types = [] {
        std::array<ResultBlockType, kResultBlockTypeCount> a{};
        for (size_t i = 0; i < kBlockTypeTable.size(); ++i) a[i] = kBlockTypeTable[i].type;
        return a;
    }();
    return types;
}

std::string_view block_type_name(ResultBlockType t) {
    return kBlockTypeTable[static_cast<size_t>(t)].name;
}

ResultBlockType block_type_from_name(std::string_view name) {
    for (const auto& e : kBlockTypeTable) {
        if (e.name == name) return e.type;
    }
    throw SchemaError("unknown result block type: \"" + std::string(name) + "\"");
}

std::string_view manual_intent_name(ManualIntent m) {
    switch (m) {
        case ManualIntent::Informational: return "informational";
        case ManualIntent::Navigational: return "navigational";
        case ManualIntent::Transactional: return "transactional";
    }
    throw SchemaError("invalid ManualIntent value");
}

ManualIntent manual_intent_from_name(std::string_view name) {
    const std::string low = lower_copy(name);
    if (low == "informational") return ManualIntent::Informational;
    if (low == "navigational") return ManualIntent::Navigational;
    if (low == "transactional") return ManualIntent::Transactional;
    throw SchemaError("unknown manual intent label: \"" + std::string(name) + "\"");
}

const std::array<ClusterIntent, kClusterIntentCount>& all_cluster_intents() {
    static const std::array<ClusterIntent, kClusterIntentCount> intents{
        ClusterIntent::Informational, ClusterIntent::LocalPlace, ClusterIntent::SexualRacism};
    return intents;
}

std::string_view cluster_intent_name(ClusterIntent c) {
    switch (c) {
        case ClusterIntent::Informational: return "informational";
        case ClusterIntent::LocalPlace: return "local_place";
        case ClusterIntent::SexualRacism: return "sexual_racism";
    }
    throw SchemaError("invalid ClusterIntent value");
}

ClusterIntent cluster_intent_from_name(std::string_view name) {
    const std::string low = lower_copy(name);
    if (low == "informational") return ClusterIntent::Informational;
    if (low == "local_place") return ClusterIntent::LocalPlace;
    if (low == "sexual_racism") return ClusterIntent::SexualRacism;
    throw SchemaError("unknown cluster intent name: \"" + std::string(name) + "\"");
}

bool higher_priority(ClusterIntent a, ClusterIntent b) {
    return static_cast<int>(a) < static_cast<int>(b);
}

std::string trim_copy(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool is_rfc3339_utc(std::string_view s) {
    // YYYY-MM-DDTHH:MM:SSZ, no fractional seconds.
    if (s.size() != 20) return false;
    auto digit = [&](size_t i) { return std::isdigit(static_cast<unsigned char>(s[i])) != 0; };
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u, 11u, 12u, 14u, 15u, 17u, 18u})
        if (!digit(i)) return false;
    return s[4] == '-' && s[7] == '-' && s[10] == 'T' && s[13] == ':' && s[16] == ':' &&
           s[19] == 'Z';
}

void validate_document(const SerpDocument& doc) {
    if (trim_copy(doc.query).empty()) throw SchemaError("document query is empty");
    if (!is_rfc3339_utc(doc.fetched_at))
        throw SchemaError("fetched_at is not an RFC 3339 UTC timestamp: \"" + doc.fetched_at +
                          "\"");
    int prev = 0;
    for (const auto& b : doc.blocks) {
        if (b.position < 1) throw SchemaError("block position must be >= 1");
        if (b.position < prev) throw SchemaError("blocks are not ordered by position");
        prev = b.position;
    }
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json block_to_json(const ResultBlock& b) {
    ordered_json j;
    j["block_type"] = std::string(block_type_name(b.block_type));
    j["position"] = b.position;
    j["title"] = b.title ? ordered_json(*b.title) : ordered_json(nullptr);
    j["snippet"] = b.snippet ? ordered_json(*b.snippet) : ordered_json(nullptr);
    j["url"] = b.url ? ordered_json(*b.url) : ordered_json(nullptr);
    j["items"] = b.items;
    return j;
}

std::optional<std::string> optional_string_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw SchemaError(std::string("block is missing field \"") + key + "\"");
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_string()) throw SchemaError(std::string("block field \"") + key + "\" must be a string or null");
    return v.get<std::string>();
}

std::vector<std::string> string_array_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw SchemaError(std::string("missing field \"") + key + "\"");
    const auto& v = j.at(key);
    if (!v.is_array()) throw SchemaError(std::string("field \"") + key + "\" must be an array");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_string())
            throw SchemaError(std::string("field \"") + key + "\" must contain only strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

}  // namespace

std::string serialize_document(const SerpDocument& doc) {
    validate_document(doc);
    ordered_json j;
    j["query"] = doc.query;
    j["fetched_at"] = doc.fetched_at;
    j["blocks"] = ordered_json::array();
    for (const auto& b : doc.blocks) j["blocks"].push_back(block_to_json(b));
    j["related_searches"] = doc.related_searches;
    j["parse_warnings"] = doc.parse_warnings;
    return j.dump(2) + "\n";
}

SerpDocument deserialize_document(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("document must be a JSON object");

    SerpDocument doc;
    if (!j.contains("query") || !j.at("query").is_string())
        throw SchemaError("missing or non-string field \"query\"");
    doc.query = j.at("query").get<std::string>();
    if (!j.contains("fetched_at") || !j.at("fetched_at").is_string())
        throw SchemaError("missing or non-string field \"fetched_at\"");
    doc.fetched_at = j.at("fetched_at").get<std::string>();

    if (!j.contains("blocks") || !j.at("blocks").is_array())
        throw SchemaError("missing or non-array field \"blocks\"");
    for (const auto& bj : j.at("blocks")) {
        if (!bj.is_object()) throw SchemaError("block entries must be objects");
        ResultBlock b;
        if (!bj.contains("block_type") || !bj.at("block_type").is_string())
            throw SchemaError("block is missing field \"block_type\"");
        b.block_type = block_type_from_name(bj.at("block_type").get<std::string>());
        if (!bj.contains("position") || !bj.at("position").is_number_integer())
            throw SchemaError("block is missing integer field \"position\"");
        b.position = bj.at("position").get<int>();
        b.title = optional_string_field(bj, "title");
        b.snippet = optional_string_field(bj, "snippet");
        b.url = optional_string_field(bj, "url");
        b.items = string_array_field(bj, "items");
        doc.blocks.push_back(std::move(b));
    }
    doc.related_searches = string_array_field(j, "related_searches");
    doc.parse_warnings = string_array_field(j, "parse_warnings");

    validate_document(doc);
    return doc;
}

}  // namespace serpmine
