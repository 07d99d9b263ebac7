#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsframe/corpus.hpp"

namespace newsframe {

struct FetchOptions {
    std::filesystem::path cache_dir;
    double timeout_seconds = 20.0;
    int retries = 2;          ///< extra attempts after the first failure
    int max_concurrency = 4;  ///< simultaneous downloads
    std::string user_agent = "newsframe-fetch/1.0";
};

struct FetchReport {
    int fetched = 0;
    int cached = 0;
    int failed = 0;
    std::map<std::string, std::string> failures;  ///< article_id -> reason
};

/// Downloads each record's image_uri into the cache (keyed by article_id)
/// and sets local_path on success. Records whose local_path or cache file
/// already exists are counted as cached without touching the network.
/// Failures are collected per record and never abort the batch.
FetchReport fetch_images(std::vector<ImageRecord>& records, const FetchOptions& options);

/// True when the bytes start with a JPEG, PNG, GIF, BMP, WebP or TIFF signature.
bool looks_like_image(const std::string& bytes);

void to_json(nlohmann::json& j, const FetchReport& r);

}  // namespace newsframe
