#include "newsframe/fetch.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <thread>

#include <curl/curl.h>
#include <nlohmann/json.hpp>

#include "newsframe/errors.hpp"

namespace newsframe {

namespace {

std::size_t append_body(char* data, std::size_t size, std::size_t nmemb, void* user) {
    static_cast<std::string*>(user)->append(data, size * nmemb);
    return size * nmemb;
}

struct CurlGlobal {
    CurlGlobal() { curl_global_init(CURL_GLOBAL_DEFAULT); }
    ~CurlGlobal() { curl_global_cleanup(); }
};

/// One download attempt; returns an error string or empty on success.
std::string download(const std::string& url, const FetchOptions& opt, std::string& body) {
    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
    if (!curl) return "curl_easy_init failed";
    body.clear();
    const auto timeout_ms = static_cast<long>(opt.timeout_seconds * 1000.0);
    curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_MAXREDIRS, 10L);
    curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT_MS, timeout_ms);
    curl_easy_setopt(curl.get(), CURLOPT_CONNECTTIMEOUT_MS, timeout_ms);
    curl_easy_setopt(curl.get(), CURLOPT_NOSIGNAL, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_USERAGENT, opt.user_agent.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, append_body);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &body);
    const CURLcode rc = curl_easy_perform(curl.get());
    if (rc != CURLE_OK) return std::string("transfer failed: ") + curl_easy_strerror(rc);
    long status = 0;
    curl_easy_getinfo(curl.get(), CURLINFO_RESPONSE_CODE, &status);
    if (status >= 400) return "HTTP status " + std::to_string(status);
    if (body.empty()) return "empty response body";
    if (!looks_like_image(body)) return "response is not a recognised image format";
    return {};
}

}  // namespace

bool looks_like_image(const std::string& b) {
    auto starts = [&](std::string_view sig) { return b.size() >= sig.size() && b.compare(0, sig.size(), sig) == 0; };
    if (starts("\xFF\xD8\xFF")) return true;                 // JPEG
    if (starts("\x89PNG\r\n\x1A\n")) return true;            // PNG
    if (starts("GIF87a") || starts("GIF89a")) return true;   // GIF
    if (starts("BM")) return true;                           // BMP
    if (starts(std::string_view("II*\0", 4)) || starts(std::string_view("MM\0*", 4))) return true;  // TIFF
    return b.size() >= 12 && starts("RIFF") && b.compare(8, 4, "WEBP") == 0;
}

FetchReport fetch_images(std::vector<ImageRecord>& records, const FetchOptions& opt) {
    static CurlGlobal curl_global;
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(opt.cache_dir, ec);
    if (ec || !fs::is_directory(opt.cache_dir)) {
        throw DataError("cache directory " + opt.cache_dir.string() + " is not writable");
    }

    FetchReport report;
    std::mutex mu;
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& r = records[i];
        const auto cache_file = image_cache_path(opt.cache_dir, r.article_id);
        if (r.local_path && fs::is_regular_file(*r.local_path, ec) && fs::file_size(*r.local_path, ec) > 0) {
            ++report.cached;
        } else if (fs::is_regular_file(cache_file, ec) && fs::file_size(cache_file, ec) > 0) {
            r.local_path = cache_file;
            ++report.cached;
        } else {
            pending.push_back(i);
        }
    }

    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        std::string body;
        for (;;) {
            const std::size_t slot = cursor.fetch_add(1);
            if (slot >= pending.size()) return;
            auto& r = records[pending[slot]];
            std::string error;
            if (r.image_uri.empty()) {
                error = "record has no image_uri";
            } else {
                for (int attempt = 0; attempt <= opt.retries; ++attempt) {
                    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(250 * attempt));
                    error = download(r.image_uri, opt, body);
                    if (error.empty()) break;
                }
            }
            if (error.empty()) {
                const auto target = image_cache_path(opt.cache_dir, r.article_id);
                auto tmp = target;
                tmp += ".part";
                {
                    std::ofstream out(tmp, std::ios::binary);
                    out.write(body.data(), static_cast<std::streamsize>(body.size()));
                    if (!out) error = "cannot write cache file " + tmp.string();
                }
                std::error_code rename_ec;
                if (error.empty()) {
                    fs::rename(tmp, target, rename_ec);
                    if (rename_ec) error = "cannot move cache file into place: " + rename_ec.message();
                }
                if (error.empty()) r.local_path = target;
            }
            std::lock_guard lock(mu);
            if (error.empty()) {
                ++report.fetched;
            } else {
                ++report.failed;
                report.failures[r.article_id] = error;
            }
        }
    };

    const auto n_workers = static_cast<std::size_t>(std::max(1, opt.max_concurrency));
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n_workers, pending.size()); ++w) pool.emplace_back(worker);
    pool.clear();
    return report;
}

void to_json(nlohmann::json& j, const FetchReport& r) {
    j = nlohmann::json{{"fetched", r.fetched}, {"cached", r.cached}, {"failed", r.failed}, {"failures", r.failures}};
}

}  // namespace newsframe
