#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsframe/corpus.hpp"

namespace newsframe {

struct StatsRow {
    Frame frame;
    int articles = 0;
    int relevant = 0;
    double ratio = 0.0;  ///< relevant / articles, 0 when the frame has no articles
    int percent = 0;     ///< ratio as a whole percent, halves rounded up
};

struct StatsTable {
    std::vector<StatsRow> rows;  ///< one per frame, frame-id order
    int total_articles = 0;
    int total_relevant = 0;
    double overall_ratio = 0.0;
    int overall_percent = 0;

    const StatsRow& row(int frame_id) const { return rows.at(static_cast<std::size_t>(frame_id - 1)); }
};

StatsTable corpus_stats(const Corpus& corpus);

/// Exact integer rounding of 100 * num / den to the nearest whole percent.
int whole_percent(int num, int den);

void to_json(nlohmann::json& j, const StatsTable& t);

}  // namespace newsframe
