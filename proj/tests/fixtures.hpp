#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "newsframe/corpus.hpp"
#include "newsframe/frames.hpp"

namespace fixtures {

using namespace newsframe;

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("newsframe-" + tag + "-" + std::to_string(rd()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Article article(const std::string& id, const std::string& headline, int frame_id) {
    Article a;
    a.article_id = id;
    a.headline = headline;
    a.url = "https://news.example/" + id;
    a.frame = frame_from_id(frame_id);
    a.summary = "summary of " + id;
    a.first3 = "first sentences of " + id;
    return a;
}

inline ImageRecord image(const std::string& id, int subject_id, int re_id, bool relevant) {
    ImageRecord im;
    im.article_id = id;
    im.image_uri = "https://img.example/" + id + ".jpg";
    im.api_tags = {"tag one", "tag two"};
    im.caption = "a photo for " + id;
    im.subject_id = subject_id;
    im.re_id = re_id;
    im.relevant = relevant;
    return im;
}

/// Articles and relevant counts per frame as published for the gun
/// violence frame corpus.
inline constexpr int kTable1Articles[kNumFrames] = {373, 237, 215, 137, 80, 114, 65, 38, 41};
inline constexpr int kTable1Relevant[kNumFrames] = {241, 147, 93, 68, 46, 34, 28, 13, 4};

inline Corpus table1_corpus() {
    std::vector<Article> arts;
    std::vector<ImageRecord> ims;
    for (int f = 0; f < kNumFrames; ++f) {
        for (int i = 0; i < kTable1Articles[f]; ++i) {
            const auto id = "f" + std::to_string(f + 1) + "-" + std::to_string(i);
            arts.push_back(article(id, "headline " + id, f + 1));
            ims.push_back(image(id, 1 + i % 16, 17 + i % 3, i < kTable1Relevant[f]));
        }
    }
    return Corpus(std::move(arts), std::move(ims));
}

/// Headlines that contain the gold frame's name verbatim among filler words.
inline Corpus frame_named_corpus(int n, std::uint64_t seed = 7) {
    static const std::vector<std::string> filler{"report", "says", "new", "week", "city", "officials", "after",
                                                 "latest", "story", "update", "monday", "local"};
    std::mt19937_64 gen(seed);
    std::vector<Article> arts;
    std::vector<ImageRecord> ims;
    for (int i = 0; i < n; ++i) {
        const int f = 1 + i % kNumFrames;
        std::string h = filler[gen() % filler.size()] + " " + std::string(frame_from_id(f).name) + " " +
                        filler[gen() % filler.size()];
        const auto id = "n" + std::to_string(i);
        arts.push_back(article(id, h, f));
        ims.push_back(image(id, f, 17, i % 2 == 0));
    }
    return Corpus(std::move(arts), std::move(ims));
}

/// The image's subject category equals the frame id, so SRE separates frames.
inline Corpus subject_separable_corpus(int n) {
    std::vector<Article> arts;
    std::vector<ImageRecord> ims;
    for (int i = 0; i < n; ++i) {
        const int f = 1 + i % kNumFrames;
        const auto id = "s" + std::to_string(i);
        arts.push_back(article(id, "unrelated words " + std::to_string(i), f));
        ims.push_back(image(id, f, 17 + i % 3, i % 3 != 0));
    }
    return Corpus(std::move(arts), std::move(ims));
}

}  // namespace fixtures
