#include "serpmine/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "serpmine/csv.hpp"

namespace serpmine {

std::vector<FeatureSpec> default_feature_spec() {
    using S = FeatureSpec::Source;
    std::vector<FeatureSpec> spec;
    const ResultBlockType binary_types[] = {
        ResultBlockType::KnowledgeGraph,       ResultBlockType::Calculator,
        ResultBlockType::DirectAnswer,         ResultBlockType::Map,
        ResultBlockType::LocalResult,          ResultBlockType::CommercialSponsored,
        ResultBlockType::Twitter,              ResultBlockType::TopStories,
        ResultBlockType::Videos,               ResultBlockType::Images,
        ResultBlockType::ContentNavigationBar, ResultBlockType::FeaturedSnippet,
        ResultBlockType::RichSnippets,         ResultBlockType::SimilarEntity,
        ResultBlockType::PartnersBlock,        ResultBlockType::OtherCards,
    };
    for (ResultBlockType t : binary_types) {
        spec.push_back({std::string(block_type_name(t)), FeatureKind::Binary, S::BlockPresence, t});
    }
    spec.push_back({"paa_count", FeatureKind::Numeric, S::BlockItemCount,
                    ResultBlockType::PeopleAlsoAsked});
    spec.push_back({"related_searches_count", FeatureKind::Numeric, S::RelatedSearchesCount,
                    std::nullopt});
    spec.push_back({"natural_results_count", FeatureKind::Numeric, S::BlockItemCount,
                    ResultBlockType::NaturalResults});
    return spec;
}

namespace {

void check_spec(const std::vector<FeatureSpec>& spec) {
    std::set<std::string> names;
    for (const auto& f : spec) {
        if (f.name.empty()) throw SpecMismatch("feature with empty name");
        if (!names.insert(f.name).second)
            throw SpecMismatch("duplicate feature name: " + f.name);
        if (f.source == FeatureSpec::Source::RelatedSearchesCount) {
            if (f.kind != FeatureKind::Numeric)
                throw SpecMismatch("related_searches feature must be numeric: " + f.name);
        } else if (!f.block_type) {
            throw SpecMismatch("feature missing block_type: " + f.name);
        }
        if (f.kind == FeatureKind::Binary && f.source != FeatureSpec::Source::BlockPresence)
            throw SpecMismatch("binary feature must be a block presence flag: " + f.name);
    }
}

}  // namespace

std::vector<FeatureSpec> feature_spec_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonError(std::string("feature spec is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) throw SpecMismatch("feature spec must be a JSON array");

    std::vector<FeatureSpec> spec;
    for (const auto& e : j) {
        if (!e.is_object()) throw SpecMismatch("feature spec entries must be objects");
        FeatureSpec f;
        if (!e.contains("name") || !e.at("name").is_string())
            throw SpecMismatch("feature entry missing \"name\"");
        f.name = e.at("name").get<std::string>();
        const std::string kind = e.value("kind", std::string());
        if (kind == "binary")
            f.kind = FeatureKind::Binary;
        else if (kind == "numeric")
            f.kind = FeatureKind::Numeric;
        else
            throw SpecMismatch("feature \"" + f.name + "\" has unknown kind \"" + kind + "\"");

        const bool has_block = e.contains("block_type");
        const bool has_source = e.contains("source");
        if (has_block == has_source)
            throw SpecMismatch("feature \"" + f.name +
                               "\" must have exactly one of block_type or source");
        if (has_block) {
            try {
                f.block_type = block_type_from_name(e.at("block_type").get<std::string>());
            } catch (const SchemaError& err) {
                throw SpecMismatch(std::string("feature \"") + f.name + "\": " + err.what());
            }
            f.source = (f.kind == FeatureKind::Binary) ? FeatureSpec::Source::BlockPresence
                                                       : FeatureSpec::Source::BlockItemCount;
        } else {
            const std::string source = e.at("source").get<std::string>();
            if (source != "related_searches")
                throw SpecMismatch("feature \"" + f.name + "\" has unknown source \"" + source +
                                   "\"");
            f.source = FeatureSpec::Source::RelatedSearchesCount;
        }
        spec.push_back(std::move(f));
    }
    check_spec(spec);
    return spec;
}

std::vector<FeatureSpec> load_feature_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open feature spec: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return feature_spec_from_json(ss.str());
}

std::string feature_spec_to_json(const std::vector<FeatureSpec>& spec) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& f : spec) {
        nlohmann::ordered_json e;
        e["name"] = f.name;
        e["kind"] = (f.kind == FeatureKind::Binary) ? "binary" : "numeric";
        if (f.source == FeatureSpec::Source::RelatedSearchesCount)
            e["source"] = "related_searches";
        else
            e["block_type"] = std::string(block_type_name(*f.block_type));
        j.push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

FeatureVector extract_features(const SerpDocument& doc, const std::vector<FeatureSpec>& spec) {
    check_spec(spec);
    FeatureVector fv;
    fv.query = doc.query;
    fv.values.reserve(spec.size());
    for (const auto& f : spec) {
        double v = 0.0;
        switch (f.source) {
            case FeatureSpec::Source::BlockPresence:
                for (const auto& b : doc.blocks) {
                    if (b.block_type == *f.block_type) {
                        v = 1.0;
                        break;
                    }
                }
                break;
            case FeatureSpec::Source::BlockItemCount:
                for (const auto& b : doc.blocks) {
                    if (b.block_type == *f.block_type) v += static_cast<double>(b.items.size());
                }
                break;
            case FeatureSpec::Source::RelatedSearchesCount:
                v = static_cast<double>(doc.related_searches.size());
                break;
        }
        fv.values.push_back(v);
    }
    return fv;
}

FeatureMatrix build_matrix(const std::vector<SerpDocument>& docs,
                           const std::vector<FeatureSpec>& spec) {
    if (docs.empty()) throw EmptyInput("build_matrix requires at least one document");
    FeatureMatrix m;
    m.spec = spec;
    m.queries.reserve(docs.size());
    m.rows.reserve(docs.size());
    for (const auto& doc : docs) {
        FeatureVector fv = extract_features(doc, spec);
        m.queries.push_back(fv.query);
        m.rows.push_back(std::move(fv.values));
    }
    return m;
}

std::vector<std::vector<double>> correlation_matrix(const FeatureMatrix& m) {
    if (m.n_rows() < 2) throw TooFewRows("correlation needs at least 2 rows");
    const size_t n = m.n_rows();
    const size_t d = m.n_features();

    std::vector<double> mean(d, 0.0);
    for (const auto& row : m.rows)
        for (size_t j = 0; j < d; ++j) mean[j] += row[j];
    for (auto& v : mean) v /= static_cast<double>(n);

    std::vector<double> var(d, 0.0);
    for (const auto& row : m.rows)
        for (size_t j = 0; j < d; ++j) {
            const double c = row[j] - mean[j];
            var[j] += c * c;
        }

    std::vector<std::vector<double>> r(d, std::vector<double>(d, 0.0));
    for (size_t a = 0; a < d; ++a) {
        r[a][a] = 1.0;
        for (size_t b = a + 1; b < d; ++b) {
            if (var[a] <= 0.0 || var[b] <= 0.0) continue;  // constant column rule
            double cov = 0.0;
            for (const auto& row : m.rows) cov += (row[a] - mean[a]) * (row[b] - mean[b]);
            const double val = cov / std::sqrt(var[a] * var[b]);
            r[a][b] = val;
            r[b][a] = val;
        }
    }
    return r;
}

PruneResult prune_correlated(const FeatureMatrix& m, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw PreconditionError("prune threshold must be in (0,1]");
    const auto r = correlation_matrix(m);
    const size_t d = m.n_features();

    std::vector<bool> dropped(d, false);
    for (size_t a = 0; a < d; ++a) {
        if (dropped[a]) continue;
        for (size_t b = a + 1; b < d; ++b) {
            if (dropped[b]) continue;
            if (std::fabs(r[a][b]) >= threshold) dropped[b] = true;
        }
    }

    PruneResult out;
    out.matrix.queries = m.queries;
    for (size_t j = 0; j < d; ++j) {
        if (dropped[j])
            out.dropped.push_back(m.spec[j].name);
        else
            out.matrix.spec.push_back(m.spec[j]);
    }
    out.matrix.rows.reserve(m.n_rows());
    for (const auto& row : m.rows) {
        std::vector<double> kept;
        kept.reserve(out.matrix.spec.size());
        for (size_t j = 0; j < d; ++j)
            if (!dropped[j]) kept.push_back(row[j]);
        out.matrix.rows.push_back(std::move(kept));
    }
    return out;
}

namespace {

std::string format_count(double v) {
    // feature values are integral by construction
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(std::llround(v)));
    return std::string(buf, p);
}

}  // namespace

std::string matrix_to_csv(const FeatureMatrix& m) {
    std::string out;
    std::vector<std::string> header;
    header.push_back("query");
    for (const auto& f : m.spec) header.push_back(f.name);
    out += csv::join_row(header);
    out.push_back('\n');
    for (size_t i = 0; i < m.n_rows(); ++i) {
        std::vector<std::string> row;
        row.push_back(m.queries[i]);
        for (double v : m.rows[i]) row.push_back(format_count(v));
        out += csv::join_row(row);
        out.push_back('\n');
    }
    return out;
}

FeatureMatrix matrix_from_csv(const std::string& csv_text,
                              const std::vector<FeatureSpec>& spec) {
    check_spec(spec);
    const auto rows = csv::parse(csv_text);
    if (rows.empty()) throw EmptyInput("matrix CSV is empty");
    const auto& header = rows.front();
    if (header.size() != spec.size() + 1 || header.front() != "query")
        throw SpecMismatch("matrix CSV header does not match the feature spec");
    for (size_t j = 0; j < spec.size(); ++j) {
        if (header[j + 1] != spec[j].name)
            throw SpecMismatch("matrix CSV column \"" + header[j + 1] +
                               "\" does not match feature \"" + spec[j].name + "\"");
    }
    FeatureMatrix m;
    m.spec = spec;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != spec.size() + 1)
            throw SchemaError("matrix CSV row has wrong arity at line " + std::to_string(i + 1));
        m.queries.push_back(r.front());
        std::vector<double> vals;
        vals.reserve(spec.size());
        for (size_t j = 1; j < r.size(); ++j) {
            double v = 0.0;
            auto [_, ec] = std::from_chars(r[j].data(), r[j].data() + r[j].size(), v);
            if (ec != std::errc())
                throw SchemaError("bad numeric value \"" + r[j] + "\" at line " +
                                  std::to_string(i + 1));
            vals.push_back(v);
        }
        m.rows.push_back(std::move(vals));
    }
    return m;
}

void save_matrix(const FeatureMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write matrix: " + path);
    out << matrix_to_csv(m);
}

FeatureMatrix load_matrix(const std::string& path, const std::vector<FeatureSpec>& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open matrix: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return matrix_from_csv(ss.str(), spec);
}

FeatureMatrix matrix_from_csv_subset(const std::string& csv_text,
                                     const std::vector<FeatureSpec>& spec) {
    check_spec(spec);
    const size_t eol = csv_text.find('\n');
    const auto header = csv::split_row(
        eol == std::string::npos ? std::string_view(csv_text)
                                 : std::string_view(csv_text).substr(0, eol));
    if (header.empty() || header.front() != "query")
        throw SpecMismatch("matrix CSV must start with a query column");

    std::vector<FeatureSpec> subset;
    for (size_t j = 1; j < header.size(); ++j) {
        const auto it = std::find_if(spec.begin(), spec.end(), [&](const FeatureSpec& f) {
            return f.name == header[j];
        });
        if (it == spec.end())
            throw SpecMismatch("matrix CSV column \"" + header[j] +
                               "\" is not in the feature spec");
        subset.push_back(*it);
    }
    return matrix_from_csv(csv_text, subset);
}

FeatureMatrix load_matrix_subset(const std::string& path,
                                 const std::vector<FeatureSpec>& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open matrix: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return matrix_from_csv_subset(ss.str(), spec);
}

}  // namespace serpmine
