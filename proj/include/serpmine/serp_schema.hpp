#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "serpmine/errors.hpp"

namespace serpmine {

// The result-block taxonomy of a Google-style results page. Serialized
// names are stable lower_snake_case strings; see block_type_name().
enum class ResultBlockType {
    KnowledgeGraph,
    Calculator,
    DirectAnswer,
    Map,
    LocalResult,
    CommercialSponsored,
    Twitter,
    TopStories,
    Videos,
    Images,
    ContentNavigationBar,
    FeaturedSnippet,
    RichSnippets,
    PeopleAlsoAsked,
    SimilarEntity,
    Translator,
    TopButtonAds,
    NaturalResults,
    PartnersBlock,
    OtherCards,
};

inline constexpr int kResultBlockTypeCount = 20;

// All 20 variants in declaration order.
const std::array<ResultBlockType, kResultBlockTypeCount>& all_block_types();

std::string_view block_type_name(ResultBlockType t);
// Throws SchemaError on an unknown name; never maps silently.
ResultBlockType block_type_from_name(std::string_view name);

// Human-annotated intent labels carried by the input dataset.
enum class ManualIntent { Informational, Navigational, Transactional };

std::string_view manual_intent_name(ManualIntent m);
ManualIntent manual_intent_from_name(std::string_view name);  // case-insensitive

// Intents discovered by clustering. Total priority order for tie-breaking
// is Informational > LocalPlace > SexualRacism (highest first), which is
// also the declaration order.
enum class ClusterIntent { Informational, LocalPlace, SexualRacism };

inline constexpr int kClusterIntentCount = 3;

const std::array<ClusterIntent, kClusterIntentCount>& all_cluster_intents();
std::string_view cluster_intent_name(ClusterIntent c);
ClusterIntent cluster_intent_from_name(std::string_view name);

// true when a outranks b (a has strictly higher priority).
bool higher_priority(ClusterIntent a, ClusterIntent b);

// One typed block on a results page. items holds sub-entries (PAA
// questions, organic links, image captions); empty when irrelevant,
// never "absent".
struct ResultBlock {
    ResultBlockType block_type = ResultBlockType::NaturalResults;
    int position = 1;  // 1-based rank on the page
    std::optional<std::string> title;
    std::optional<std::string> snippet;
    std::optional<std::string> url;
    std::vector<std::string> items;
};

// Canonical parsed representation of one results page.
// Invariants: query non-empty after trimming; blocks ordered by
// non-decreasing position; fetched_at is an RFC 3339 UTC timestamp.
struct SerpDocument {
    std::string query;
    std::string fetched_at;
    std::vector<ResultBlock> blocks;
    std::vector<std::string> related_searches;
    std::vector<std::string> parse_warnings;
};

struct QueryRecord {
    std::string query;
    std::optional<ManualIntent> manual_label;
};

// Throws SchemaError when the document violates an invariant.
void validate_document(const SerpDocument& doc);

// Canonical JSON text for the document: fixed key order, 2-space indent,
// trailing newline. Serialization of a valid document is deterministic
// and round-trips through deserialize_document.
std::string serialize_document(const SerpDocument& doc);

// Parses and validates canonical JSON. Throws JsonError on malformed
// text and SchemaError on schema/invariant violations.
SerpDocument deserialize_document(const std::string& json_text);

std::string trim_copy(std::string_view s);
bool is_rfc3339_utc(std::string_view s);

}  // namespace serpmine
