#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsframe/corpus.hpp"

namespace newsframe {

enum class StratifyBy { Frame, Relevance };

std::string to_string(StratifyBy s);
StratifyBy stratify_from_string(const std::string& s);

struct FoldPlan {
    int k = 4;
    std::map<std::string, int> assignments;  ///< article_id -> fold in [0, k)
    StratifyBy stratify_by = StratifyBy::Frame;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;

    int fold_of(const std::string& article_id) const;
    /// Ids in the given fold, in the order they were supplied to make_folds.
    std::vector<std::string> members(int fold, const std::vector<std::string>& order) const;
};

/// Stratified k-fold assignment. Each stratum is shuffled with the seed and
/// dealt round-robin, continuing the deal position across strata, so fold
/// sizes differ by at most one both within each stratum and overall. A
/// stratum smaller than k is still dealt but leaves some folds without that
/// label; this is reported in FoldPlan::warnings.
FoldPlan make_folds(const std::vector<std::string>& ids, const std::vector<int>& labels, int k,
                    StratifyBy stratify_by, std::uint64_t seed);

/// Labels are frame ids or relevance flags taken from the corpus. Relevance
/// stratification requires every article to have an image record.
FoldPlan make_folds(const Corpus& corpus, int k, StratifyBy stratify_by, std::uint64_t seed);

std::vector<int> stratification_labels(const Corpus& corpus, StratifyBy stratify_by);

/// Splits positions [0, labels.size()) into (train, holdout) with the holdout
/// drawn proportionally from every stratum. The holdout has
/// max(1, round(fraction * n)) members when n >= 2.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(
    const std::vector<int>& labels, double fraction, std::uint64_t seed);

void to_json(nlohmann::json& j, const FoldPlan& plan);

}  // namespace newsframe
