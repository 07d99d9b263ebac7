#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "newsframe/frames.hpp"

namespace newsframe {

struct Article {
    std::string article_id;
    std::string headline;
    std::string url;
    Frame frame;
    std::string summary;  ///< pre-computed extractive summary, may be empty
    std::string first3;   ///< first three sentences of the body, may be empty
    std::optional<std::string> body;
};

struct ImageRecord {
    std::string article_id;
    std::string image_uri;
    std::optional<std::filesystem::path> local_path;
    std::vector<std::string> api_tags;  ///< ranked, source order preserved
    std::string caption;
    int subject_id = 16;
    int re_id = 17;
    bool relevant = false;
};

/// Immutable after loading; images are looked up by article id.
class Corpus {
public:
    Corpus() = default;
    Corpus(std::vector<Article> articles, std::vector<ImageRecord> images);

    const std::vector<Article>& articles() const { return articles_; }
    const std::vector<ImageRecord>& images() const { return images_; }

    const Article* find_article(std::string_view id) const;
    const ImageRecord* image_for(std::string_view article_id) const;

    std::size_t size() const { return articles_.size(); }
    bool empty() const { return articles_.empty(); }

    /// Articles whose lead image is annotated relevant, with their images.
    Corpus relevant_only() const;

    /// Returns a copy with local_path filled in for every image whose cache
    /// file exists under cache_dir.
    Corpus with_image_cache(const std::filesystem::path& cache_dir) const;

private:
    std::vector<Article> articles_;
    std::vector<ImageRecord> images_;
    std::vector<std::size_t> image_index_;  // article position -> image position or npos
    std::unordered_map<std::string, std::size_t> position_;
};

inline constexpr std::string_view kSchemaVersion = "gvfc-mm/1";

/// Column order of the annotation CSV.
inline constexpr std::string_view kCorpusColumns[] = {
    "article_id", "headline", "url",     "frame_id",   "summary", "first3",
    "image_uri",  "api_tags", "caption", "subject_id", "re_id",   "relevant"};

/// Reads and validates an annotation CSV. Rows with an empty image_uri carry
/// no ImageRecord. Errors name the 1-based data row (header excluded).
Corpus load_corpus(const std::filesystem::path& path,
                   std::string_view schema_version = kSchemaVersion);
Corpus parse_corpus(std::istream& in, std::string_view schema_version = kSchemaVersion);

void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

/// Cache file for an article's lead image.
std::filesystem::path image_cache_path(const std::filesystem::path& cache_dir,
                                       std::string_view article_id);

/// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path& path);

}  // namespace newsframe
