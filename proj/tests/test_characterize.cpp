#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "serpmine/characterize.hpp"
#include "serpmine/errors.hpp"
#include "serpmine/features.hpp"
#include "test_support.hpp"

using namespace serpmine;
using serpmine::test::config_path;

namespace {

FeatureMatrix tiny_matrix() {
    FeatureMatrix m;
    m.spec = {
        {"has_kg", FeatureKind::Binary, FeatureSpec::Source::BlockPresence,
         ResultBlockType::KnowledgeGraph},
        {"has_map", FeatureKind::Binary, FeatureSpec::Source::BlockPresence,
         ResultBlockType::Map},
        {"paa", FeatureKind::Numeric, FeatureSpec::Source::BlockItemCount,
         ResultBlockType::PeopleAlsoAsked},
    };
    m.queries = {"q0", "q1", "q2", "q3"};
    m.rows = {
        {1.0, 0.0, 4.0},
        {1.0, 1.0, 2.0},
        {0.0, 0.0, 0.0},
        {0.0, 1.0, 6.0},
    };
    return m;
}

}  // namespace

TEST_CASE("cluster profiles average raw values per cluster") {
    const auto m = tiny_matrix();
    const std::vector<int> assignments{0, 0, 1, 1};
    const auto profiles = profile_clusters(m, assignments, 2);

    REQUIRE(profiles.size() == 2);
    CHECK(profiles[0].cluster_id == 0);
    CHECK(profiles[1].cluster_id == 1);
    CHECK(profiles[0].size == 2);
    CHECK(profiles[1].size == 2);

    REQUIRE(profiles[0].binary_pct.size() == 2);
    REQUIRE(profiles[0].numeric_mean.size() == 1);
    CHECK(profiles[0].binary_pct[0].first == "has_kg");
    CHECK(profiles[0].binary_pct[0].second == doctest::Approx(1.0));
    CHECK(profiles[0].binary_pct[1].second == doctest::Approx(0.5));
    CHECK(profiles[0].numeric_mean[0].first == "paa");
    CHECK(profiles[0].numeric_mean[0].second == doctest::Approx(3.0));

    CHECK(profiles[1].binary_pct[0].second == doctest::Approx(0.0));
    CHECK(profiles[1].binary_pct[1].second == doctest::Approx(0.5));
    CHECK(profiles[1].numeric_mean[0].second == doctest::Approx(3.0));

    CHECK(profiles[0].stat("has_kg") == doctest::Approx(1.0));
    CHECK(profiles[0].stat("paa") == doctest::Approx(3.0));
    CHECK_FALSE(profiles[0].stat("nope").has_value());
}

TEST_CASE("empty clusters profile to size zero with zero stats") {
    const auto m = tiny_matrix();
    const std::vector<int> assignments{0, 0, 0, 0};
    const auto profiles = profile_clusters(m, assignments, 3);

    REQUIRE(profiles.size() == 3);
    CHECK(profiles[1].size == 0);
    CHECK(profiles[2].size == 0);
    CHECK(profiles[1].stat("has_kg") == doctest::Approx(0.0));
    CHECK(profiles[1].stat("paa") == doctest::Approx(0.0));
}

TEST_CASE("cluster profiling validates its inputs") {
    const auto m = tiny_matrix();
    CHECK_THROWS_AS(profile_clusters(m, {0, 1}, 2), LengthMismatch);
    CHECK_THROWS_AS(profile_clusters(m, {0, 0, 0, 0}, 0), PreconditionError);
    CHECK_THROWS_AS(profile_clusters(m, {0, 0, 0, 2}, 2), PreconditionError);
    CHECK_THROWS_AS(profile_clusters(m, {0, 0, 0, -1}, 2), PreconditionError);
}

TEST_CASE("tokenize lowercases, splits and filters") {
    const std::set<std::string> stop{"who", "is", "the", "of"};
    CHECK(tokenize("Who is the President of the USA", stop) ==
          std::vector<std::string>{"president", "usa"});

    const std::set<std::string> none;
    CHECK(tokenize("fish&chips near-me", none) ==
          std::vector<std::string>{"fish", "chips", "near", "me"});
    CHECK(tokenize("top 10 movies 2024", none) ==
          std::vector<std::string>{"top", "movies"});
    CHECK(tokenize("mp3 to wav", none) == std::vector<std::string>{"mp3", "to", "wav"});
    CHECK(tokenize("a b c", none).empty());
    CHECK(tokenize("", none).empty());
    CHECK(tokenize("new york new york", none) ==
          std::vector<std::string>{"new", "york", "new", "york"});
}

TEST_CASE("tokenize keeps non-ascii bytes inside words") {
    const std::set<std::string> none;
    const auto toks = tokenize("caf\xC3\xA9 menu", none);
    REQUIRE(toks.size() == 2);
    CHECK(toks[0] == "caf\xC3\xA9");
    CHECK(toks[1] == "menu");
}

TEST_CASE("tokenize drops stopword fragments from contractions") {
    const std::set<std::string> stop{"don", "ll"};
    CHECK(tokenize("don't stop, she'll run", stop) ==
          std::vector<std::string>{"stop", "she", "run"});
}

TEST_CASE("word frequencies count tokens per cluster") {
    const std::set<std::string> stop{"the"};
    const std::vector<std::vector<std::string>> queries{
        {"best coffee", "coffee beans", "the coffee"},
        {"tax help"},
    };
    const auto freqs = word_frequencies(queries, stop);
    REQUIRE(freqs.size() == 2);
    CHECK(freqs[0].cluster_id == 0);
    CHECK(freqs[1].cluster_id == 1);
    CHECK(freqs[0].counts.at("coffee") == 3);
    CHECK(freqs[0].counts.at("best") == 1);
    CHECK(freqs[0].counts.at("beans") == 1);
    CHECK(freqs[0].counts.count("the") == 0);
    CHECK(freqs[1].counts.at("tax") == 1);
    CHECK(freqs[1].counts.at("help") == 1);
}

TEST_CASE("keyword extraction assigns each token to its most specific cluster") {
    std::vector<WordFrequency> freqs(3);
    for (int c = 0; c < 3; ++c) freqs[static_cast<size_t>(c)].cluster_id = c;
    freqs[0].counts = {{"alpha", 6}, {"beta", 3}, {"epsilon", 2}, {"zeta", 10}, {"low", 2}};
    freqs[1].counts = {{"alpha", 3}, {"beta", 3}, {"gamma", 4}, {"epsilon", 3}};
    freqs[2].counts = {{"gamma", 2}, {"delta", 5}};

    const std::set<std::string> exclusions{"zeta"};
    const std::map<int, ClusterIntent> naming{
        {0, ClusterIntent::Informational},
        {1, ClusterIntent::LocalPlace},
        {2, ClusterIntent::SexualRacism},
    };
    const auto sets = extract_keywords(freqs, exclusions, naming, 50, 3);

    REQUIRE(sets.size() == 3);
    CHECK(sets[0].intent == ClusterIntent::Informational);
    CHECK(sets[1].intent == ClusterIntent::LocalPlace);
    CHECK(sets[2].intent == ClusterIntent::SexualRacism);

    // alpha: 6 of 9 in cluster 0. beta: even 3/3 split, lower index wins.
    CHECK(sets[0].keywords == std::set<std::string>{"alpha", "beta"});
    // gamma's cluster 2 count is below min_count, so cluster 1 takes it;
    // epsilon's cluster 0 count is below min_count as well.
    CHECK(sets[1].keywords == std::set<std::string>{"gamma", "epsilon"});
    CHECK(sets[2].keywords == std::set<std::string>{"delta"});

    CHECK(sets[0].provenance.at("alpha") == doctest::Approx(6.0 / 9.0));
    CHECK(sets[0].provenance.at("beta") == doctest::Approx(0.5));
    CHECK(sets[1].provenance.at("gamma") == doctest::Approx(4.0 / 6.0));
    CHECK(sets[1].provenance.at("epsilon") == doctest::Approx(3.0 / 5.0));
    CHECK(sets[2].provenance.at("delta") == doctest::Approx(1.0));

    size_t total = 0;
    std::set<std::string> all;
    for (const auto& s : sets) {
        total += s.keywords.size();
        all.insert(s.keywords.begin(), s.keywords.end());
    }
    CHECK(all.size() == total);
    CHECK(all.count("zeta") == 0);
    CHECK(all.count("low") == 0);
}

TEST_CASE("keyword extraction keeps the top_n best candidates") {
    std::vector<WordFrequency> freqs(1);
    freqs[0].cluster_id = 0;
    freqs[0].counts = {{"aa", 3}, {"bb", 3}, {"cc", 4}};
    const std::map<int, ClusterIntent> naming{{0, ClusterIntent::Informational}};

    const auto sets = extract_keywords(freqs, {}, naming, 2, 3);
    REQUIRE(sets.size() == 1);
    // All three tie on specificity 1.0; cc wins on count, then bb beats aa
    // on the descending token tiebreak.
    CHECK(sets[0].keywords == std::set<std::string>{"bb", "cc"});

    const auto all = extract_keywords(freqs, {}, naming, 50, 3);
    CHECK(all[0].keywords == std::set<std::string>{"aa", "bb", "cc"});
}

TEST_CASE("keyword extraction rejects unnamed clusters and bad limits") {
    std::vector<WordFrequency> freqs(2);
    freqs[0].cluster_id = 0;
    freqs[1].cluster_id = 1;
    freqs[0].counts = {{"alpha", 5}};
    const std::map<int, ClusterIntent> partial{{0, ClusterIntent::Informational}};
    CHECK_THROWS_AS(extract_keywords(freqs, {}, partial, 50, 3), UnnamedCluster);

    const std::map<int, ClusterIntent> naming{
        {0, ClusterIntent::Informational}, {1, ClusterIntent::LocalPlace}};
    CHECK_THROWS_AS(extract_keywords(freqs, {}, naming, 0, 3), PreconditionError);
    CHECK_THROWS_AS(extract_keywords(freqs, {}, naming, 50, 0), PreconditionError);
}

TEST_CASE("cluster naming requires a bijective mapping") {
    std::vector<ClusterProfile> profiles(2);
    profiles[0].cluster_id = 0;
    profiles[1].cluster_id = 1;

    const std::map<int, ClusterIntent> good{
        {0, ClusterIntent::LocalPlace}, {1, ClusterIntent::Informational}};
    CHECK(name_clusters(profiles, good) == good);

    const std::map<int, ClusterIntent> missing{{0, ClusterIntent::Informational}};
    CHECK_THROWS_AS(name_clusters(profiles, missing), NonBijectiveMapping);

    const std::map<int, ClusterIntent> repeated{
        {0, ClusterIntent::Informational}, {1, ClusterIntent::Informational}};
    CHECK_THROWS_AS(name_clusters(profiles, repeated), NonBijectiveMapping);
}

TEST_CASE("wordlists skip comments and blank lines") {
    const auto words = parse_wordlist("# header\n\n  coffee  \ntea\r\ntea\n#x\n");
    CHECK(words == std::set<std::string>{"coffee", "tea"});
    CHECK(parse_wordlist("").empty());
}

TEST_CASE("shipped wordlist configs load") {
    const auto stop = load_wordlist(config_path("stopwords.txt"));
    CHECK(stop.count("the") == 1);
    CHECK(stop.count("who") == 1);
    CHECK(stop.count("don") == 1);
    CHECK(stop.count("coffee") == 0);

    const auto excl = load_wordlist(config_path("exclusions.txt"));
    CHECK(excl.count("www") == 1);
    CHECK_THROWS_AS(load_wordlist(config_path("missing.txt")), IoError);
}

TEST_CASE("cluster intent maps parse from json") {
    const auto m = cluster_intent_map_from_json(
        R"({"0": "informational", "2": "local_place", "1": "sexual_racism"})");
    REQUIRE(m.size() == 3);
    CHECK(m.at(0) == ClusterIntent::Informational);
    CHECK(m.at(1) == ClusterIntent::SexualRacism);
    CHECK(m.at(2) == ClusterIntent::LocalPlace);

    CHECK_THROWS_AS(cluster_intent_map_from_json("{"), JsonError);
    CHECK_THROWS_AS(cluster_intent_map_from_json("[]"), SchemaError);
    CHECK_THROWS_AS(cluster_intent_map_from_json(R"({"x": "informational"})"), SchemaError);
    CHECK_THROWS_AS(cluster_intent_map_from_json(R"({"-1": "informational"})"), SchemaError);
    CHECK_THROWS_AS(cluster_intent_map_from_json(R"({"1x": "informational"})"), SchemaError);
    CHECK_THROWS_AS(cluster_intent_map_from_json(R"({"0": 3})"), SchemaError);
    CHECK_THROWS_AS(cluster_intent_map_from_json(R"({"0": "shopping"})"), SchemaError);

    const auto shipped = load_cluster_intent_map(config_path("cluster_intents.json"));
    CHECK(shipped.size() == 3);
}

TEST_CASE("profiles serialize to csv") {
    FeatureMatrix m;
    m.spec = {
        {"has_kg", FeatureKind::Binary, FeatureSpec::Source::BlockPresence,
         ResultBlockType::KnowledgeGraph},
        {"paa", FeatureKind::Numeric, FeatureSpec::Source::BlockItemCount,
         ResultBlockType::PeopleAlsoAsked},
    };
    m.queries = {"a", "b"};
    m.rows = {{1.0, 4.0}, {0.0, 1.0}};
    const auto profiles = profile_clusters(m, {0, 0}, 1);
    CHECK(profiles_to_csv(profiles) ==
          "cluster,size,feature,kind,value\n"
          "0,2,has_kg,binary,0.5\n"
          "0,2,paa,numeric,2.5\n");
}

TEST_CASE("word frequencies serialize to csv sorted by cluster then token") {
    std::vector<WordFrequency> freqs(2);
    freqs[0].cluster_id = 0;
    freqs[0].counts = {{"zeta", 2}, {"alpha", 1}};
    freqs[1].cluster_id = 1;
    freqs[1].counts = {{"beta", 7}};
    CHECK(word_frequencies_to_csv(freqs) ==
          "cluster,token,count\n"
          "0,alpha,1\n"
          "0,zeta,2\n"
          "1,beta,7\n");
}

TEST_CASE("lexicons serialize in intent priority order with sorted keywords") {
    std::vector<KeywordSet> sets(3);
    sets[0].intent = ClusterIntent::SexualRacism;
    sets[0].keywords = {"nude", "adult"};
    sets[1].intent = ClusterIntent::Informational;
    sets[1].keywords = {"tax"};
    sets[2].intent = ClusterIntent::LocalPlace;
    sets[2].keywords = {"coffee", "beach"};

    CHECK(lexicon_to_json(sets) ==
          "{\n"
          "  \"informational\": [\n"
          "    \"tax\"\n"
          "  ],\n"
          "  \"local_place\": [\n"
          "    \"beach\",\n"
          "    \"coffee\"\n"
          "  ],\n"
          "  \"sexual_racism\": [\n"
          "    \"adult\",\n"
          "    \"nude\"\n"
          "  ]\n"
          "}\n");
}
