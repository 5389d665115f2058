#include "serpmine/characterize.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "serpmine/csv.hpp"

namespace serpmine {

namespace {

std::string format_value(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

bool is_pure_digits(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

std::optional<double> ClusterProfile::stat(const std::string& feature_name) const {
    for (const auto& [name, v] : binary_pct)
        if (name == feature_name) return v;
    for (const auto& [name, v] : numeric_mean)
        if (name == feature_name) return v;
    return std::nullopt;
}

std::vector<ClusterProfile> profile_clusters(const FeatureMatrix& m,
                                             const std::vector<int>& assignments, int k) {
    if (assignments.size() != m.rows.size())
        throw LengthMismatch("assignments are not aligned with the matrix rows");
    if (k < 1) throw PreconditionError("k must be >= 1");

    std::vector<ClusterProfile> profiles(static_cast<size_t>(k));
    std::vector<std::vector<double>> sums(static_cast<size_t>(k),
                                          std::vector<double>(m.spec.size(), 0.0));
    for (int c = 0; c < k; ++c) profiles[static_cast<size_t>(c)].cluster_id = c;

    for (size_t i = 0; i < m.rows.size(); ++i) {
        const int c = assignments[i];
        if (c < 0 || c >= k)
            throw PreconditionError("assignment out of range: " + std::to_string(c));
        profiles[static_cast<size_t>(c)].size++;
        for (size_t j = 0; j < m.spec.size(); ++j)
            sums[static_cast<size_t>(c)][j] += m.rows[i][j];
    }

    for (int c = 0; c < k; ++c) {
        auto& p = profiles[static_cast<size_t>(c)];
        const double denom = p.size > 0 ? static_cast<double>(p.size) : 1.0;
        for (size_t j = 0; j < m.spec.size(); ++j) {
            const double mean = sums[static_cast<size_t>(c)][j] / denom;
            if (m.spec[j].kind == FeatureKind::Binary)
                p.binary_pct.emplace_back(m.spec[j].name, mean);
            else
                p.numeric_mean.emplace_back(m.spec[j].name, mean);
        }
    }
    return profiles;
}

std::vector<std::string> tokenize(const std::string& query,
                                  const std::set<std::string>& stopwords) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2 && !is_pure_digits(cur) && !stopwords.count(cur))
            tokens.push_back(cur);
        cur.clear();
    };
    for (const char ch : query) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c))
            cur.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    return tokens;
}

std::vector<WordFrequency> word_frequencies(
    const std::vector<std::vector<std::string>>& queries_per_cluster,
    const std::set<std::string>& stopwords) {
    std::vector<WordFrequency> freqs;
    freqs.reserve(queries_per_cluster.size());
    for (size_t c = 0; c < queries_per_cluster.size(); ++c) {
        WordFrequency wf;
        wf.cluster_id = static_cast<int>(c);
        for (const auto& q : queries_per_cluster[c])
            for (const auto& tok : tokenize(q, stopwords)) wf.counts[tok]++;
        freqs.push_back(std::move(wf));
    }
    return freqs;
}

std::vector<KeywordSet> extract_keywords(const std::vector<WordFrequency>& freqs,
                                         const std::set<std::string>& exclusions,
                                         const std::map<int, ClusterIntent>& naming,
                                         int top_n, int min_count) {
    if (top_n < 1) throw PreconditionError("top_n must be >= 1");
    if (min_count < 1) throw PreconditionError("min_count must be >= 1");

    for (const auto& wf : freqs)
        if (!naming.count(wf.cluster_id))
            throw UnnamedCluster("cluster " + std::to_string(wf.cluster_id) +
                                 " has no intent mapping");

    std::map<std::string, std::size_t> totals;
    for (const auto& wf : freqs)
        for (const auto& [tok, n] : wf.counts) totals[tok] += n;

    struct Scored {
        std::string token;
        double specificity;
        std::size_t count;
    };
    std::vector<std::vector<Scored>> assigned(freqs.size());

    for (const auto& [tok, total] : totals) {
        if (exclusions.count(tok)) continue;
        bool have_winner = false;
        size_t win_idx = 0;
        double win_spec = 0.0;
        std::size_t win_count = 0;
        for (size_t f = 0; f < freqs.size(); ++f) {
            const auto it = freqs[f].counts.find(tok);
            if (it == freqs[f].counts.end()) continue;
            const std::size_t n = it->second;
            if (n < static_cast<std::size_t>(min_count)) continue;
            const double spec = static_cast<double>(n) / static_cast<double>(total);
            if (!have_winner || spec > win_spec ||
                (spec == win_spec && n > win_count)) {
                have_winner = true;
                win_idx = f;
                win_spec = spec;
                win_count = n;
            }
        }
        if (have_winner) assigned[win_idx].push_back({tok, win_spec, win_count});
    }

    std::vector<KeywordSet> sets;
    sets.reserve(freqs.size());
    for (size_t f = 0; f < freqs.size(); ++f) {
        auto& cand = assigned[f];
        std::sort(cand.begin(), cand.end(), [](const Scored& a, const Scored& b) {
            if (a.specificity != b.specificity) return a.specificity > b.specificity;
            if (a.count != b.count) return a.count > b.count;
            return a.token > b.token;
        });
        if (cand.size() > static_cast<size_t>(top_n)) cand.resize(static_cast<size_t>(top_n));

        KeywordSet ks;
        ks.intent = naming.at(freqs[f].cluster_id);
        for (const auto& s : cand) {
            ks.keywords.insert(s.token);
            ks.provenance[s.token] = s.specificity;
        }
        sets.push_back(std::move(ks));
    }
    return sets;
}

std::map<int, ClusterIntent> name_clusters(const std::vector<ClusterProfile>& profiles,
                                           const std::map<int, ClusterIntent>& mapping) {
    std::set<ClusterIntent> used;
    for (const auto& p : profiles) {
        const auto it = mapping.find(p.cluster_id);
        if (it == mapping.end())
            throw NonBijectiveMapping("cluster " + std::to_string(p.cluster_id) +
                                      " is not mapped to an intent");
        if (!used.insert(it->second).second)
            throw NonBijectiveMapping("intent " +
                                      std::string(cluster_intent_name(it->second)) +
                                      " is mapped to more than one cluster");
    }
    return mapping;
}

std::set<std::string> parse_wordlist(const std::string& text) {
    std::set<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string word = trim_copy(line);
        if (word.empty() || word[0] == '#') continue;
        out.insert(word);
    }
    return out;
}

std::set<std::string> load_wordlist(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read wordlist: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_wordlist(ss.str());
}

std::map<int, ClusterIntent> cluster_intent_map_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonError(std::string("cluster intent map is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("cluster intent map must be a JSON object");

    std::map<int, ClusterIntent> out;
    for (const auto& [key, value] : j.items()) {
        int id = 0;
        const auto res = std::from_chars(key.data(), key.data() + key.size(), id);
        if (res.ec != std::errc{} || res.ptr != key.data() + key.size() || id < 0)
            throw SchemaError("cluster intent map key is not a cluster id: " + key);
        if (!value.is_string())
            throw SchemaError("cluster intent map value for " + key + " must be a string");
        out[id] = cluster_intent_from_name(value.get<std::string>());
    }
    return out;
}

std::map<int, ClusterIntent> load_cluster_intent_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read cluster intent map: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return cluster_intent_map_from_json(ss.str());
}

std::string profiles_to_csv(const std::vector<ClusterProfile>& profiles) {
    std::string out = "cluster,size,feature,kind,value\n";
    for (const auto& p : profiles) {
        for (const auto& [name, v] : p.binary_pct)
            out += csv::join_row({std::to_string(p.cluster_id), std::to_string(p.size), name,
                                  "binary", format_value(v)}) +
                   "\n";
        for (const auto& [name, v] : p.numeric_mean)
            out += csv::join_row({std::to_string(p.cluster_id), std::to_string(p.size), name,
                                  "numeric", format_value(v)}) +
                   "\n";
    }
    return out;
}

std::string word_frequencies_to_csv(const std::vector<WordFrequency>& freqs) {
    std::string out = "cluster,token,count\n";
    for (const auto& wf : freqs)
        for (const auto& [tok, n] : wf.counts)
            out += csv::join_row({std::to_string(wf.cluster_id), tok, std::to_string(n)}) + "\n";
    return out;
}

std::string lexicon_to_json(const std::vector<KeywordSet>& sets) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const ClusterIntent intent :
         {ClusterIntent::Informational, ClusterIntent::LocalPlace, ClusterIntent::SexualRacism}) {
        for (const auto& ks : sets) {
            if (ks.intent != intent) continue;
            j[std::string(cluster_intent_name(intent))] =
                std::vector<std::string>(ks.keywords.begin(), ks.keywords.end());
        }
    }
    return j.dump(2) + "\n";
}

}  // namespace serpmine
