#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "serpmine/errors.hpp"
#include "serpmine/serp_parser.hpp"

namespace serpmine {

// Injected time source so rate-limit behavior is testable without
// real waiting.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() = 0;
    virtual void sleep_ms(std::int64_t ms) = 0;
};

class SystemClock : public Clock {
public:
    std::int64_t now_ms() override;
    void sleep_ms(std::int64_t ms) override;
};

// Manual clock: sleeping advances time instantly.
class VirtualClock : public Clock {
public:
    explicit VirtualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
    std::int64_t now_ms() override;
    void sleep_ms(std::int64_t ms) override;
    void advance_ms(std::int64_t ms);

private:
    std::mutex mu_;
    std::int64_t now_;
};

struct HttpRequest {
    std::string endpoint_url;  // scheme://host[:port][/path]
    std::string query;         // raw text; the transport URL-encodes it
    std::string user_agent;
    std::string proxy_url;  // empty = direct connection
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    // absent on transport failure (refused connection, timeout)
    virtual std::optional<HttpResponse> get(const HttpRequest& req) = 0;
};

// Real transport. Issues GET <path>?q=<encoded query> against the
// endpoint host.
class HttplibTransport : public HttpTransport {
public:
    std::optional<HttpResponse> get(const HttpRequest& req) override;
};

struct ParsedUrl {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;  // always starts with '/'
};

// Accepts http:// and https:// URLs; throws Error on anything else.
ParsedUrl parse_url(const std::string& url);

// Percent-encodes everything outside RFC 3986 unreserved characters.
std::string url_encode(const std::string& text);

// Round-robin proxy rotation with per-proxy earliest-next-use
// timestamps. Thread-safe.
class ProxyPool {
public:
    ProxyPool() = default;
    explicit ProxyPool(std::vector<std::string> proxies);

    // First proxy at or after the cursor whose cooldown has passed,
    // advancing the cursor past it; absent when the pool is empty or
    // every proxy is cooling down.
    std::optional<std::string> next_proxy(std::int64_t now_ms);

    // Cooldowns only ever move forward.
    void mark_used(const std::string& proxy, std::int64_t now_ms, std::int64_t min_delay_ms);
    void mark_captcha(const std::string& proxy, std::int64_t now_ms, std::int64_t cooldown_ms);

    // Smallest cooldown timestamp; absent when the pool is empty.
    std::optional<std::int64_t> earliest_ready() const;

    std::size_t size() const;
    std::size_t cooling_count(std::int64_t now_ms) const;
    std::vector<std::string> proxies() const;

private:
    mutable std::mutex mu_;
    std::vector<std::string> proxies_;
    std::vector<std::int64_t> cooldowns_;
    std::size_t cursor_ = 0;
};

struct FetchConfig {
    std::string endpoint_url;
    std::int64_t min_delay_ms = 1000;
    int max_retries = 2;
    std::int64_t captcha_cooldown_s = 300;
    std::vector<std::string> user_agents = {"serpmine/1.0"};
    std::string output_dir = ".";
};

enum class FetchStatus { Ok, Captcha, NetworkError };

std::string_view fetch_status_name(FetchStatus s);

struct FetchResult {
    std::string query;
    FetchStatus status = FetchStatus::NetworkError;
    std::optional<std::string> body;      // present iff status == Ok
    std::optional<std::string> proxy_used;
    int attempts = 0;
    std::string fetched_at;  // UTC timestamp of the last attempt
};

class Fetcher {
public:
    // All dependencies are borrowed and must outlive the Fetcher.
    Fetcher(FetchConfig config, const SelectorConfig& selectors, ProxyPool& pool,
            HttpTransport& transport, Clock& clock);

    // Never throws for server-side conditions; throws EmptyQuery on a
    // blank query. Retries captchas and transport failures on the next
    // proxy up to max_retries extra attempts.
    FetchResult fetch_query(const std::string& query);

    // Runs fetch_query over the queries on up to `workers` threads;
    // results are in input order. Throws EmptyQuery up front if any
    // query is blank.
    std::vector<FetchResult> fetch_batch(const std::vector<std::string>& queries, int workers);

private:
    // Reserves the next allowed start slot; returns the proxy to use
    // (absent = direct) after any required wait.
    std::optional<std::string> acquire_lane();

    FetchConfig config_;
    const SelectorConfig& selectors_;
    ProxyPool& pool_;
    HttpTransport& transport_;
    Clock& clock_;
    std::atomic<std::size_t> ua_cursor_{0};
    std::mutex lane_mu_;
    std::int64_t direct_next_ok_ = 0;
};

std::string sha256_hex(const std::string& data);

// First 16 hex characters of sha256(query) + ".json".
std::string raw_result_filename(const std::string& query);

// Writes {"query", "fetched_at", "body"} to
// <output_dir>/<raw_result_filename(query)>, overwriting any previous
// file, and returns the path. Throws PreconditionError unless
// status == Ok; IoError on write failure.
std::string persist_raw(const FetchResult& result, const std::string& output_dir);

std::string format_rfc3339_utc(std::int64_t epoch_ms);

// Comma-separated proxy list; entries are trimmed, empties dropped.
std::vector<std::string> parse_proxy_list(const std::string& csv_text);

// Reads the SERP_PROXIES environment variable (empty list when unset).
std::vector<std::string> proxies_from_env();

}  // namespace serpmine
