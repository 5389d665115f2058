#include "serpmine/tagger.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "serpmine/characterize.hpp"
#include "serpmine/csv.hpp"

namespace serpmine {

void validate_lexicon(const IntentLexicon& lexicon) {
    std::map<std::string, ClusterIntent> seen;
    for (const auto& [intent, words] : lexicon.keywords)
        for (const auto& w : words) {
            const auto [it, inserted] = seen.emplace(w, intent);
            if (!inserted && it->second != intent)
                throw SchemaError("keyword \"" + w + "\" appears under both " +
                                  std::string(cluster_intent_name(it->second)) + " and " +
                                  std::string(cluster_intent_name(intent)));
        }
}

IntentLexicon lexicon_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonError(std::string("lexicon is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("lexicon must be a JSON object");

    IntentLexicon lex;
    for (const auto& [key, value] : j.items()) {
        const ClusterIntent intent = cluster_intent_from_name(key);
        if (!value.is_array())
            throw SchemaError("lexicon entry for " + key + " must be an array");
        auto& words = lex.keywords[intent];
        for (const auto& w : value) {
            if (!w.is_string())
                throw SchemaError("lexicon entry for " + key + " holds a non-string keyword");
            words.insert(w.get<std::string>());
        }
    }
    validate_lexicon(lex);
    return lex;
}

IntentLexicon load_lexicon(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read lexicon: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return lexicon_from_json(ss.str());
}

TagResult tag_query(const std::string& query, const IntentLexicon& lexicon,
                    const std::set<std::string>& stopwords, MatchSemantics semantics) {
    if (trim_copy(query).empty()) throw EmptyQuery("cannot tag an empty query");

    std::vector<std::string> tokens = tokenize(query, stopwords);
    if (semantics == MatchSemantics::Unique) {
        std::set<std::string> unique(tokens.begin(), tokens.end());
        tokens.assign(unique.begin(), unique.end());
    }

    TagResult res;
    for (const auto& tok : tokens)
        for (const auto& [intent, words] : lexicon.keywords)
            if (words.count(tok)) res.match_counts[static_cast<size_t>(intent)]++;

    res.intent = ClusterIntent::Informational;
    for (const ClusterIntent c : all_cluster_intents())
        if (res.match_counts[static_cast<size_t>(c)] >
            res.match_counts[static_cast<size_t>(res.intent)])
            res.intent = c;
    return res;
}

TagReport tag_batch(const std::vector<QueryRecord>& records, const IntentLexicon& lexicon,
                    const std::set<std::string>& stopwords, MatchSemantics semantics) {
    TagReport report;
    report.tags.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        if (trim_copy(records[i].query).empty()) {
            report.warnings.push_back("record " + std::to_string(i + 1) +
                                      ": empty query skipped");
            continue;
        }
        report.tags.push_back({records[i].query,
                               tag_query(records[i].query, lexicon, stopwords, semantics)});
    }
    return report;
}

std::string tags_to_csv(const TagReport& report) {
    std::string out = "query,predicted_intent,info_count,local_count,sexrac_count\n";
    for (const auto& t : report.tags)
        out += csv::join_row({t.query, std::string(cluster_intent_name(t.result.intent)),
                              std::to_string(t.result.match_counts[0]),
                              std::to_string(t.result.match_counts[1]),
                              std::to_string(t.result.match_counts[2])}) +
               "\n";
    return out;
}

std::vector<std::pair<std::string, ClusterIntent>> tags_from_csv(const std::string& csv_text) {
    const auto rows = csv::parse(csv_text);
    if (rows.empty() || rows[0].size() != 5 || rows[0][0] != "query" ||
        rows[0][1] != "predicted_intent")
        throw SchemaError("tags CSV needs the query,predicted_intent,... header");
    std::vector<std::pair<std::string, ClusterIntent>> out;
    out.reserve(rows.size() - 1);
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 5)
            throw SchemaError("tags CSV row has wrong arity at line " + std::to_string(i + 1));
        out.emplace_back(rows[i][0], cluster_intent_from_name(rows[i][1]));
    }
    return out;
}

std::vector<std::pair<std::string, ClusterIntent>> load_tags(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read tags: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return tags_from_csv(ss.str());
}

}  // namespace serpmine
