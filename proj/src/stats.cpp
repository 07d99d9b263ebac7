#include "newsframe/stats.hpp"

#include <nlohmann/json.hpp>

namespace newsframe {

int whole_percent(int num, int den) {
    if (den <= 0) return 0;
    return (200 * num + den) / (2 * den);
}

StatsTable corpus_stats(const Corpus& corpus) {
    StatsTable t;
    for (const auto& f : kFrames) t.rows.push_back(StatsRow{f});
    for (const auto& a : corpus.articles()) {
        auto& row = t.rows[static_cast<std::size_t>(a.frame.id - 1)];
        ++row.articles;
        ++t.total_articles;
        if (const auto* im = corpus.image_for(a.article_id); im && im->relevant) {
            ++row.relevant;
            ++t.total_relevant;
        }
    }
    for (auto& row : t.rows) {
        row.ratio = row.articles ? static_cast<double>(row.relevant) / row.articles : 0.0;
        row.percent = whole_percent(row.relevant, row.articles);
    }
    t.overall_ratio = t.total_articles ? static_cast<double>(t.total_relevant) / t.total_articles : 0.0;
    t.overall_percent = whole_percent(t.total_relevant, t.total_articles);
    return t;
}

void to_json(nlohmann::json& j, const StatsTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"frame_id", r.frame.id},
                        {"frame", std::string(r.frame.name)},
                        {"articles", r.articles},
                        {"relevant_images", r.relevant},
                        {"relevance_ratio", r.ratio},
                        {"relevance_percent", r.percent}});
    }
    j = nlohmann::json{{"frames", rows},
                       {"overall",
                        {{"articles", t.total_articles},
                         {"relevant_images", t.total_relevant},
                         {"relevance_ratio", t.overall_ratio},
                         {"relevance_percent", t.overall_percent}}}};
}

}  // namespace newsframe
