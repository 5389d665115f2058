#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "serpmine/errors.hpp"
#include "serpmine/serp_schema.hpp"

namespace serpmine {

// Whether repeated occurrences of a keyword in one query add to the
// match count or count once.
enum class MatchSemantics { Multiplicity, Unique };

// Per-intent keyword sets. Intents missing from the map have no
// keywords. Priority between intents is fixed by enum order
// (Informational first).
struct IntentLexicon {
    std::map<ClusterIntent, std::set<std::string>> keywords;
};

// Throws SchemaError when two intents share a keyword.
void validate_lexicon(const IntentLexicon& lexicon);

// Parses the JSON produced by the keyword extraction step: an object
// of intent name to keyword array.
IntentLexicon lexicon_from_json(const std::string& json_text);
IntentLexicon load_lexicon(const std::string& path);

struct TagResult {
    ClusterIntent intent = ClusterIntent::Informational;
    std::array<int, kClusterIntentCount> match_counts{};  // indexed by enum order
};

// Tokenizes the query, counts keyword hits per intent, and returns the
// intent with the maximum count; ties (including all-zero) go to the
// highest-priority tied intent. Throws EmptyQuery.
TagResult tag_query(const std::string& query, const IntentLexicon& lexicon,
                    const std::set<std::string>& stopwords,
                    MatchSemantics semantics = MatchSemantics::Multiplicity);

struct BatchTag {
    std::string query;
    TagResult result;
};

struct TagReport {
    std::vector<BatchTag> tags;
    std::vector<std::string> warnings;  // one per skipped empty query
};

// Order-preserving tag_query over the records; empty queries are
// skipped with a warning instead of failing the batch.
TagReport tag_batch(const std::vector<QueryRecord>& records, const IntentLexicon& lexicon,
                    const std::set<std::string>& stopwords,
                    MatchSemantics semantics = MatchSemantics::Multiplicity);

// CSV with header query,predicted_intent,info_count,local_count,sexrac_count.
std::string tags_to_csv(const TagReport& report);
std::vector<std::pair<std::string, ClusterIntent>> tags_from_csv(const std::string& csv_text);
std::vector<std::pair<std::string, ClusterIntent>> load_tags(const std::string& path);

}  // namespace serpmine
