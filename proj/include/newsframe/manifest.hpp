#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace newsframe {

inline constexpr const char* kManifestFile = "manifest.json";

struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    nlohmann::json config = nlohmann::json::object();
    std::string corpus_checksum;
    std::vector<std::string> encoders;
    std::vector<std::uint64_t> seeds;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_now();

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& dir);

}  // namespace newsframe
