#include "newsframe/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "newsframe/errors.hpp"

namespace newsframe {

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void to_json(nlohmann::json& j, const RunManifest& m) {
    j = nlohmann::json{{"command", m.command},     {"argv", m.argv},
                       {"config", m.config},       {"corpus_checksum", m.corpus_checksum},
                       {"encoders", m.encoders},   {"seeds", m.seeds},
                       {"started_at", m.started_at}, {"finished_at", m.finished_at},
                       {"outputs", m.outputs}};
}

void from_json(const nlohmann::json& j, RunManifest& m) {
    m.command = j.at("command").get<std::string>();
    m.argv = j.value("argv", std::vector<std::string>{});
    m.config = j.value("config", nlohmann::json::object());
    m.corpus_checksum = j.value("corpus_checksum", "");
    m.encoders = j.value("encoders", std::vector<std::string>{});
    m.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    m.outputs = j.value("outputs", std::vector<std::string>{});
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / kManifestFile);
    if (!out) throw DataError("cannot write manifest in " + dir.string());
    out << nlohmann::json(m).dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& dir) {
    std::ifstream in(dir / kManifestFile);
    if (!in) throw DataError("no " + std::string(kManifestFile) + " in " + dir.string());
    try {
        return nlohmann::json::parse(in).get<RunManifest>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed manifest in " + dir.string() + ": " + e.what());
    }
}

}  // namespace newsframe
