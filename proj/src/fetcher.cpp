#include "serpmine/fetcher.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

namespace serpmine {

std::int64_t SystemClock::now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void SystemClock::sleep_ms(std::int64_t ms) {
    if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

std::int64_t VirtualClock::now_ms() {
    std::lock_guard<std::mutex> lock(mu_);
    return now_;
}

void VirtualClock::sleep_ms(std::int64_t ms) {
    advance_ms(ms);
}

void VirtualClock::advance_ms(std::int64_t ms) {
    if (ms <= 0) return;
    std::lock_guard<std::mutex> lock(mu_);
    now_ += ms;
}

ParsedUrl parse_url(const std::string& url) {
    ParsedUrl out;
    size_t rest;
    if (url.rfind("http://", 0) == 0) {
        out.scheme = "http";
        out.port = 80;
        rest = 7;
    } else if (url.rfind("https://", 0) == 0) {
        out.scheme = "https";
        out.port = 443;
        rest = 8;
    } else {
        throw Error("unsupported URL (expected http:// or https://): " + url);
    }
    const size_t slash = url.find('/', rest);
    std::string authority =
        slash == std::string::npos ? url.substr(rest) : url.substr(rest, slash - rest);
    out.path = slash == std::string::npos ? "/" : url.substr(slash);
    const size_t colon = authority.rfind(':');
    if (colon != std::string::npos) {
        const std::string port_text = authority.substr(colon + 1);
        int port = 0;
        const auto res =
            std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
        if (res.ec != std::errc{} || res.ptr != port_text.data() + port_text.size() ||
            port < 1 || port > 65535)
            throw Error("bad port in URL: " + url);
        out.port = port;
        authority.resize(colon);
    }
    if (authority.empty()) throw Error("missing host in URL: " + url);
    out.host = authority;
    return out;
}

std::string url_encode(const std::string& text) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size());
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(ch);
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

std::optional<HttpResponse> HttplibTransport::get(const HttpRequest& req) {
    ParsedUrl endpoint;
    try {
        endpoint = parse_url(req.endpoint_url);
    } catch (const Error&) {
        return std::nullopt;
    }

    httplib::Client client(endpoint.scheme + "://" + endpoint.host + ":" +
                           std::to_string(endpoint.port));
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(10, 0);
    if (!req.proxy_url.empty()) {
        try {
            const ParsedUrl proxy = parse_url(req.proxy_url);
            client.set_proxy(proxy.host, proxy.port);
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    httplib::Headers headers;
    if (!req.user_agent.empty()) headers.emplace("User-Agent", req.user_agent);
    const std::string target =
        endpoint.path + (endpoint.path.find('?') == std::string::npos ? "?" : "&") +
        "q=" + url_encode(req.query);
    const httplib::Result res = client.Get(target, headers);
    if (!res) return std::nullopt;
    return HttpResponse{res->status, res->body};
}

ProxyPool::ProxyPool(std::vector<std::string> proxies)
    : proxies_(std::move(proxies)), cooldowns_(proxies_.size(), 0) {}

std::optional<std::string> ProxyPool::next_proxy(std::int64_t now_ms) {
    std::lock_guard<std::mutex> lock(mu_);
    const size_t n = proxies_.size();
    for (size_t step = 0; step < n; ++step) {
        const size_t i = (cursor_ + step) % n;
        if (cooldowns_[i] <= now_ms) {
            cursor_ = (i + 1) % n;
            return proxies_[i];
        }
    }
    return std::nullopt;
}

void ProxyPool::mark_used(const std::string& proxy, std::int64_t now_ms,
                          std::int64_t min_delay_ms) {
    std::lock_guard<std::mutex> lock(mu_);
    for (size_t i = 0; i < proxies_.size(); ++i)
        if (proxies_[i] == proxy)
            cooldowns_[i] = std::max(cooldowns_[i], now_ms + min_delay_ms);
}

void ProxyPool::mark_captcha(const std::string& proxy, std::int64_t now_ms,
                             std::int64_t cooldown_ms) {
    std::lock_guard<std::mutex> lock(mu_);
    for (size_t i = 0; i < proxies_.size(); ++i)
        if (proxies_[i] == proxy)
            cooldowns_[i] = std::max(cooldowns_[i], now_ms + cooldown_ms);
}

std::optional<std::int64_t> ProxyPool::earliest_ready() const {
    std::lock_guard<std::mutex> lock(mu_);
    if (cooldowns_.empty()) return std::nullopt;
    return *std::min_element(cooldowns_.begin(), cooldowns_.end());
}

std::size_t ProxyPool::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return proxies_.size();
}

std::size_t ProxyPool::cooling_count(std::int64_t now_ms) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::size_t n = 0;
    for (const auto cd : cooldowns_)
        if (cd > now_ms) ++n;
    return n;
}

std::vector<std::string> ProxyPool::proxies() const {
    std::lock_guard<std::mutex> lock(mu_);
    return proxies_;
}

std::string_view fetch_status_name(FetchStatus s) {
    switch (s) {
        case FetchStatus::Ok: return "ok";
        case FetchStatus::Captcha: return "captcha";
        case FetchStatus::NetworkError: return "network_error";
    }
    return "network_error";
}

Fetcher::Fetcher(FetchConfig config, const SelectorConfig& selectors, ProxyPool& pool,
                 HttpTransport& transport, Clock& clock)
    : config_(std::move(config)),
      selectors_(selectors),
      pool_(pool),
      transport_(transport),
      clock_(clock) {
    if (config_.user_agents.empty())
        throw PreconditionError("fetch config needs at least one user agent");
    if (config_.min_delay_ms < 0 || config_.max_retries < 0 || config_.captcha_cooldown_s < 0)
        throw PreconditionError("fetch config delays and retries must be non-negative");
}

std::optional<std::string> Fetcher::acquire_lane() {
    std::unique_lock<std::mutex> lock(lane_mu_);
    if (pool_.size() == 0) {
        const std::int64_t now = clock_.now_ms();
        const std::int64_t start = std::max(now, direct_next_ok_);
        direct_next_ok_ = start + config_.min_delay_ms;
        lock.unlock();
        clock_.sleep_ms(start - now);
        return std::nullopt;
    }

    for (;;) {
        const std::int64_t now = clock_.now_ms();
        if (auto proxy = pool_.next_proxy(now)) {
            pool_.mark_used(*proxy, now, config_.min_delay_ms);
            return proxy;
        }
        const auto ready_at = pool_.earliest_ready();
        const std::int64_t wait = ready_at ? std::max<std::int64_t>(*ready_at - now, 1) : 1;
        lock.unlock();
        clock_.sleep_ms(wait);
        lock.lock();
    }
}

FetchResult Fetcher::fetch_query(const std::string& query) {
    if (trim_copy(query).empty()) throw EmptyQuery("cannot fetch an empty query");

    FetchResult result;
    result.query = query;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        const std::optional<std::string> proxy = acquire_lane();

        HttpRequest req;
        req.endpoint_url = config_.endpoint_url;
        req.query = query;
        req.user_agent =
            config_.user_agents[ua_cursor_.fetch_add(1) % config_.user_agents.size()];
        req.proxy_url = proxy.value_or("");

        const std::optional<HttpResponse> response = transport_.get(req);
        const std::int64_t now = clock_.now_ms();
        result.attempts = attempt + 1;
        result.fetched_at = format_rfc3339_utc(now);
        result.proxy_used = proxy;
        result.body.reset();

        if (!response || response->status != 200) {
            result.status = FetchStatus::NetworkError;
            continue;
        }
        if (detect_captcha(response->body, selectors_)) {
            result.status = FetchStatus::Captcha;
            if (proxy) pool_.mark_captcha(*proxy, now, config_.captcha_cooldown_s * 1000);
            continue;
        }
        result.status = FetchStatus::Ok;
        result.body = response->body;
        break;
    }
    return result;
}

std::vector<FetchResult> Fetcher::fetch_batch(const std::vector<std::string>& queries,
                                              int workers) {
    for (const auto& q : queries)
        if (trim_copy(q).empty()) throw EmptyQuery("batch contains an empty query");
    if (workers < 1) workers = 1;

    std::vector<FetchResult> results(queries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= queries.size()) return;
            results[i] = fetch_query(queries[i]);
        }
    };

    const auto lanes = static_cast<std::size_t>(
        std::min<std::size_t>(static_cast<std::size_t>(workers), queries.size()));
    std::vector<std::thread> threads;
    threads.reserve(lanes);
    for (std::size_t t = 0; t < lanes; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return results;
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string raw_result_filename(const std::string& query) {
    return sha256_hex(query).substr(0, 16) + ".json";
}

std::string persist_raw(const FetchResult& result, const std::string& output_dir) {
    if (result.status != FetchStatus::Ok)
        throw PreconditionError("only ok results can be persisted");

    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);

    const std::filesystem::path path =
        std::filesystem::path(output_dir) / raw_result_filename(result.query);
    nlohmann::ordered_json j;
    j["query"] = result.query;
    j["fetched_at"] = result.fetched_at;
    j["body"] = result.body.value_or("");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write raw result: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("short write on raw result: " + path.string());
    return path.string();
}

std::string format_rfc3339_utc(std::int64_t epoch_ms) {
    const auto secs = static_cast<std::time_t>(epoch_ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> parse_proxy_list(const std::string& csv_text) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= csv_text.size()) {
        const size_t comma = csv_text.find(',', start);
        const std::string item = trim_copy(
            comma == std::string::npos ? csv_text.substr(start)
                                       : csv_text.substr(start, comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<std::string> proxies_from_env() {
    const char* env = std::getenv("SERP_PROXIES");
    return env ? parse_proxy_list(env) : std::vector<std::string>{};
}

}  // namespace serpmine
