#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "serpmine/html.hpp"
#include "serpmine/serp_schema.hpp"

namespace serpmine {

// Selectors for one block type. An empty container selector means the
// type is never matched on this page dialect.
struct SelectorEntry {
    std::string container_selector;
    std::string title_selector;
    std::string snippet_selector;
    std::string url_selector;
    std::string item_selector;
};

// External selector configuration driving parse_html. Every one of the
// 20 block types must have an entry; captcha_markers must be non-empty.
class SelectorConfig {
public:
    // Throws SchemaError on a structurally bad config (missing type,
    // empty captcha markers) and SelectorError on bad selector text.
    static SelectorConfig from_json(const std::string& json_text);
    static SelectorConfig load(const std::string& path);

    const SelectorEntry& entry(ResultBlockType t) const {
        return entries_[static_cast<size_t>(t)];
    }
    const std::vector<std::string>& captcha_markers() const { return captcha_markers_; }
    const std::string& related_searches_selector() const { return related_searches_selector_; }

    // Pre-parsed selectors; nullopt when the selector text is empty.
    const std::optional<html::Selector>& container(ResultBlockType t) const;
    const std::optional<html::Selector>& title(ResultBlockType t) const;
    const std::optional<html::Selector>& snippet(ResultBlockType t) const;
    const std::optional<html::Selector>& url(ResultBlockType t) const;
    const std::optional<html::Selector>& item(ResultBlockType t) const;
    const std::optional<html::Selector>& related_searches() const { return related_sel_; }

private:
    struct CompiledEntry {
        std::optional<html::Selector> container, title, snippet, url, item;
    };
    std::array<SelectorEntry, kResultBlockTypeCount> entries_{};
    std::array<CompiledEntry, kResultBlockTypeCount> compiled_{};
    std::vector<std::string> captcha_markers_;
    std::string related_searches_selector_;
    std::optional<html::Selector> related_sel_;
};

struct ParseReport {
    std::map<ResultBlockType, int> blocks_found;
    std::vector<std::string> warnings;
};

// true iff any configured captcha marker occurs in the markup,
// case-insensitively.
bool detect_captcha(const std::string& markup, const SelectorConfig& config);

// Converts raw SERP markup into a canonical document. Selector misses
// only produce warnings; the error set is exactly {CaptchaDetected,
// EmptyQuery}. Positions are 1-based ranks of the container elements in
// source order across all matched blocks.
std::pair<SerpDocument, ParseReport> parse_html(const std::string& markup,
                                                const std::string& query,
                                                const SelectorConfig& config,
                                                const std::string& fetched_at);

}  // namespace serpmine
