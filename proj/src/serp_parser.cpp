#include "serpmine/serp_parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace serpmine {

namespace {

std::string lower_copy(const std::string& s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<html::Selector> compile(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return html::Selector::parse(text);
}

}  // namespace

SelectorConfig SelectorConfig::from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonError(std::string("selector config is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("blocks") || !j.at("blocks").is_object())
        throw SchemaError("selector config must have an object field \"blocks\"");

    SelectorConfig cfg;
    const auto& blocks = j.at("blocks");
    for (ResultBlockType t : all_block_types()) {
        const std::string name(block_type_name(t));
        if (!blocks.contains(name))
            throw SchemaError("selector config is missing block type \"" + name + "\"");
        const auto& e = blocks.at(name);
        if (!e.is_object())
            throw SchemaError("selector entry for \"" + name + "\" must be an object");
        SelectorEntry entry;
        entry.container_selector = e.value("container_selector", std::string());
        entry.title_selector = e.value("title_selector", std::string());
        entry.snippet_selector = e.value("snippet_selector", std::string());
        entry.url_selector = e.value("url_selector", std::string());
        entry.item_selector = e.value("item_selector", std::string());
        cfg.entries_[static_cast<size_t>(t)] = entry;
        auto& comp = cfg.compiled_[static_cast<size_t>(t)];
        comp.container = compile(entry.container_selector);
        comp.title = compile(entry.title_selector);
        comp.snippet = compile(entry.snippet_selector);
        comp.url = compile(entry.url_selector);
        comp.item = compile(entry.item_selector);
    }
    for (const auto& [key, _] : blocks.items()) {
        block_type_from_name(key);  // rejects unknown keys
    }

    if (!j.contains("captcha_markers") || !j.at("captcha_markers").is_array())
        throw SchemaError("selector config must have an array field \"captcha_markers\"");
    for (const auto& m : j.at("captcha_markers")) {
        if (!m.is_string()) throw SchemaError("captcha_markers must contain only strings");
        cfg.captcha_markers_.push_back(m.get<std::string>());
    }
    if (cfg.captcha_markers_.empty()) throw SchemaError("captcha_markers must be non-empty");

    cfg.related_searches_selector_ = j.value("related_searches_selector", std::string());
    cfg.related_sel_ = compile(cfg.related_searches_selector_);
    return cfg;
}

SelectorConfig SelectorConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open selector config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

const std::optional<html::Selector>& SelectorConfig::container(ResultBlockType t) const {
    return compiled_[static_cast<size_t>(t)].container;
}
const std::optional<html::Selector>& SelectorConfig::title(ResultBlockType t) const {
    return compiled_[static_cast<size_t>(t)].title;
}
const std::optional<html::Selector>& SelectorConfig::snippet(ResultBlockType t) const {
    return compiled_[static_cast<size_t>(t)].snippet;
}
const std::optional<html::Selector>& SelectorConfig::url(ResultBlockType t) const {
    return compiled_[static_cast<size_t>(t)].url;
}
const std::optional<html::Selector>& SelectorConfig::item(ResultBlockType t) const {
    return compiled_[static_cast<size_t>(t)].item;
}

bool detect_captcha(const std::string& markup, const SelectorConfig& config) {
    const std::string low = lower_copy(markup);
    for (const auto& marker : config.captcha_markers()) {
        if (low.find(lower_copy(marker)) != std::string::npos) return true;
    }
    return false;
}

namespace {

// A matched container element before position assignment.
struct BlockDraft {
    ResultBlockType type;
    size_t source_offset;
    ResultBlock block;
};

std::optional<std::string> first_match_text(const std::optional<html::Selector>& sel,
                                            const html::Node& scope) {
    if (!sel) return std::nullopt;
    auto hits = sel->select_all(scope);
    if (hits.empty()) return std::nullopt;
    return html::text_content(*hits.front());
}

std::optional<std::string> first_match_url(const std::optional<html::Selector>& sel,
                                           const html::Node& scope) {
    if (!sel) return std::nullopt;
    auto hits = sel->select_all(scope);
    if (hits.empty()) return std::nullopt;
    if (const std::string* href = hits.front()->attr("href")) return *href;
    return html::text_content(*hits.front());
}

}  // namespace

std::pair<SerpDocument, ParseReport> parse_html(const std::string& markup,
                                                const std::string& query,
                                                const SelectorConfig& config,
                                                const std::string& fetched_at) {
    if (trim_copy(query).empty()) throw EmptyQuery("query is empty");
    if (detect_captcha(markup, config))
        throw CaptchaDetected("markup contains a captcha marker; parsing refused");

    const auto root = html::parse(markup);

    ParseReport report;
    std::vector<BlockDraft> drafts;
    for (ResultBlockType t : all_block_types()) {
        const auto& container = config.container(t);
        if (!container) continue;  // type not configured for this dialect
        const auto hits = container->select_all(*root);
        report.blocks_found[t] = static_cast<int>(hits.size());
        if (hits.empty()) {
            report.warnings.push_back("no " + std::string(block_type_name(t)) +
                                      " blocks matched");
            continue;
        }
        for (const html::Node* el : hits) {
            BlockDraft d;
            d.type = t;
            d.source_offset = el->source_offset;
            d.block.block_type = t;
            d.block.title = first_match_text(config.title(t), *el);
            d.block.snippet = first_match_text(config.snippet(t), *el);
            d.block.url = first_match_url(config.url(t), *el);
            if (const auto& item_sel = config.item(t)) {
                for (const html::Node* item : item_sel->select_all(*el))
                    d.block.items.push_back(html::text_content(*item));
            }
            drafts.push_back(std::move(d));
        }
    }

    std::stable_sort(drafts.begin(), drafts.end(),
                     [](const BlockDraft& a, const BlockDraft& b) {
                         return a.source_offset < b.source_offset;
                     });

    SerpDocument doc;
    doc.query = query;
    doc.fetched_at = fetched_at;
    int position = 1;
    for (auto& d : drafts) {
        d.block.position = position++;
        doc.blocks.push_back(std::move(d.block));
    }
    if (const auto& rel = config.related_searches()) {
        for (const html::Node* el : rel->select_all(*root))
            doc.related_searches.push_back(html::text_content(*el));
    }
    doc.parse_warnings = report.warnings;

    validate_document(doc);
    return {std::move(doc), std::move(report)};
}

}  // namespace serpmine
