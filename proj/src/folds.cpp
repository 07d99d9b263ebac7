#include "newsframe/folds.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "newsframe/errors.hpp"
#include "newsframe/rng.hpp"

namespace newsframe {

std::string to_string(StratifyBy s) { return s == StratifyBy::Frame ? "frame" : "relevance"; }

StratifyBy stratify_from_string(const std::string& s) {
    if (s == "frame") return StratifyBy::Frame;
    if (s == "relevance") return StratifyBy::Relevance;
    throw UsageError("unknown stratification label '" + s + "'");
}

int FoldPlan::fold_of(const std::string& article_id) const {
    auto it = assignments.find(article_id);
    if (it == assignments.end()) throw DataError("article " + article_id + " is not in the fold plan");
    return it->second;
}

std::vector<std::string> FoldPlan::members(int fold, const std::vector<std::string>& order) const {
    std::vector<std::string> out;
    for (const auto& id : order) {
        if (fold_of(id) == fold) out.push_back(id);
    }
    return out;
}

FoldPlan make_folds(const std::vector<std::string>& ids, const std::vector<int>& labels, int k,
                    StratifyBy stratify_by, std::uint64_t seed) {
    if (k < 2) throw UsageError("fold count must be at least 2, got " + std::to_string(k));
    if (ids.size() != labels.size()) throw UsageError("ids and labels differ in length");

    std::map<int, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < ids.size(); ++i) strata[labels[i]].push_back(i);

    FoldPlan plan;
    plan.k = k;
    plan.stratify_by = stratify_by;
    plan.seed = seed;

    Rng rng(seed);
    int deal = 0;
    for (auto& [label, members] : strata) {
        if (static_cast<int>(members.size()) < k) {
            plan.warnings.push_back("stratum " + to_string(stratify_by) + "=" + std::to_string(label) +
                                    " has " + std::to_string(members.size()) + " member(s), fewer than k=" +
                                    std::to_string(k) + "; some folds will not contain it");
        }
        rng.shuffle(std::span(members));
        for (auto idx : members) {
            if (!plan.assignments.emplace(ids[idx], deal).second) {
                throw DataError("duplicate id " + ids[idx] + " in fold input");
            }
            deal = (deal + 1) % k;
        }
    }
    return plan;
}

std::vector<int> stratification_labels(const Corpus& corpus, StratifyBy stratify_by) {
    std::vector<int> labels;
    labels.reserve(corpus.size());
    for (const auto& a : corpus.articles()) {
        if (stratify_by == StratifyBy::Frame) {
            labels.push_back(a.frame.id);
        } else {
            const auto* im = corpus.image_for(a.article_id);
            if (!im) throw DataError("article " + a.article_id + " has no image record to stratify by relevance");
            labels.push_back(im->relevant ? 1 : 0);
        }
    }
    return labels;
}

FoldPlan make_folds(const Corpus& corpus, int k, StratifyBy stratify_by, std::uint64_t seed) {
    std::vector<std::string> ids;
    ids.reserve(corpus.size());
    for (const auto& a : corpus.articles()) ids.push_back(a.article_id);
    return make_folds(ids, stratification_labels(corpus, stratify_by), k, stratify_by, seed);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(
    const std::vector<int>& labels, double fraction, std::uint64_t seed) {
    const std::size_t n = labels.size();
    std::vector<std::size_t> train, holdout;
    if (n < 2 || fraction <= 0.0) {
        for (std::size_t i = 0; i < n; ++i) train.push_back(i);
        return {train, holdout};
    }
    const auto n_holdout = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))), 1, n - 1);

    std::map<int, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < n; ++i) strata[labels[i]].push_back(i);

    // Systematic proportional allocation: rank every item by its relative
    // position inside its shuffled stratum; ties go to a random stratum order.
    Rng rng(seed);
    std::vector<int> stratum_order;
    for (auto& [label, members] : strata) {
        rng.shuffle(std::span(members));
        stratum_order.push_back(label);
    }
    rng.shuffle(std::span(stratum_order));
    std::map<int, std::size_t> stratum_rank;
    for (std::size_t r = 0; r < stratum_order.size(); ++r) stratum_rank[stratum_order[r]] = r;

    struct Keyed {
        double key;
        std::size_t rank;
        std::size_t index;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(n);
    for (const auto& [label, members] : strata) {
        for (std::size_t j = 0; j < members.size(); ++j) {
            keyed.push_back({(static_cast<double>(j) + 0.5) / static_cast<double>(members.size()),
                             stratum_rank[label], members[j]});
        }
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        return a.key != b.key ? a.key < b.key : a.rank < b.rank;
    });
    std::vector<bool> in_holdout(n, false);
    for (std::size_t i = 0; i < n_holdout; ++i) in_holdout[keyed[i].index] = true;
    for (std::size_t i = 0; i < n; ++i) (in_holdout[i] ? holdout : train).push_back(i);
    return {train, holdout};
}

void to_json(nlohmann::json& j, const FoldPlan& plan) {
    j = nlohmann::json{{"k", plan.k},
                       {"stratify_by", to_string(plan.stratify_by)},
                       {"seed", plan.seed},
                       {"assignments", plan.assignments},
                       {"warnings", plan.warnings}};
}

}  // namespace newsframe
