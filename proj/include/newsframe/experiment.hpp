#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsframe/corpus.hpp"
#include "newsframe/encoders.hpp"
#include "newsframe/features.hpp"
#include "newsframe/folds.hpp"
#include "newsframe/metrics.hpp"
#include "newsframe/models.hpp"

namespace newsframe {

inline constexpr const char* kReportSchema = "newsframe-eval/1";

enum class Subset { All, RelevantOnly };

std::string to_string(Subset s);
Subset subset_from_string(const std::string& s);

std::vector<std::uint64_t> default_seeds();  ///< 0..24

struct ExperimentSpec {
    Task task = Task::Frame;
    Subset subset = Subset::All;
    ModalitySpec modality;
    int folds = 4;
    std::uint64_t fold_seed = 0;
    std::vector<std::uint64_t> seeds = default_seeds();
    TrainConfig train;
    EncoderSpec encoders;
    double val_fraction = 0.1;
    /// The relevance task on the relevant-only subset has a single class;
    /// it is refused unless this is set.
    bool allow_degenerate_subset = false;

    StratifyBy stratify_by() const { return task == Task::Frame ? StratifyBy::Frame : StratifyBy::Relevance; }
    /// Throws UsageError for inconsistent settings.
    void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentSpec& s);
void from_json(const nlohmann::json& j, ExperimentSpec& s);

struct RunKey {
    int fold = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const RunKey&, const RunKey&) = default;
};

struct RunResult {
    RunKey key;
    double accuracy = 0.0;
    int n_train = 0;
    int n_val = 0;
    int best_epoch = 0;
    std::vector<EpochLog> log;
    std::vector<std::string> article_ids;  ///< test items, fold order
    std::vector<int> gold;                 ///< class indices
    std::vector<int> pred;
    std::vector<std::string> warnings;
};

void to_json(nlohmann::json& j, const RunResult& r);
void from_json(const nlohmann::json& j, RunResult& r);

/// Everything a run needs that does not depend on (fold, seed).
struct ExperimentData {
    ExperimentSpec spec;
    Corpus corpus;  ///< after subsetting
    std::vector<Example> examples;
    FoldPlan plan;
    /// Texts the built-in tokenizer vocabulary is built from.
    std::vector<std::string> vocab_texts;
};

/// Subsets the corpus, builds examples and the fold plan. Throws DataError
/// when the corpus lacks an input the modality needs.
ExperimentData prepare_experiment(const ExperimentSpec& spec, const Corpus& corpus);

/// Fold-major, then seeds in spec order.
std::vector<RunKey> plan_runs(const ExperimentSpec& spec);

/// Trains on the other folds (minus a stratified validation holdout) and
/// evaluates on `key.fold`. Saves the model under `model_dir` when given.
/// Training errors are rethrown with the fold and seed in the message.
RunResult execute_run(const ExperimentData& data, const RunKey& key, const EncoderSource& source,
                      const std::optional<std::filesystem::path>& model_dir = std::nullopt);

struct Misclassification {
    std::string article_id;
    int gold = 0;  ///< external class id
    int pred = 0;
};

struct EvalReport {
    ExperimentSpec spec;
    std::string corpus_checksum;
    int n_articles = 0;
    std::vector<int> fold_sizes;
    std::vector<std::string> fold_warnings;
    std::vector<RunResult> runs;  ///< plan_runs order
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    /// One-vs-rest scores per class index, over the predictions of all runs.
    std::vector<ClassScore> per_class;
    std::vector<std::vector<long>> confusion;
    /// Test errors of the first seed across all folds.
    std::vector<Misclassification> misclassified;
};

/// Merges finished runs into a report. Runs are reordered into plan_runs
/// order; throws UsageError when any planned run is missing or duplicated.
EvalReport assemble_report(const ExperimentData& data, std::vector<RunResult> runs);
EvalReport assemble_report(const ExperimentSpec& spec, int n_articles, std::vector<int> fold_sizes,
                           std::vector<std::string> fold_warnings, std::vector<RunResult> runs);

void to_json(nlohmann::json& j, const EvalReport& r);
/// Reads a report, recomputing every aggregate from its runs.
EvalReport report_from_json(const nlohmann::json& j);

using RunCallback = std::function<void(const RunResult&)>;

/// Runs every (fold, seed) in-process, in plan order.
EvalReport run_experiment(const ExperimentSpec& spec, const Corpus& corpus,
                          const std::optional<std::filesystem::path>& model_root = std::nullopt,
                          const RunCallback& on_run = {});

/// Relevance task; with_frame_label adds the gold frame name to the inputs.
EvalReport run_relevance(ExperimentSpec spec, bool with_frame_label, const Corpus& corpus,
                         const std::optional<std::filesystem::path>& model_root = std::nullopt,
                         const RunCallback& on_run = {});

/// Accuracy of always predicting the corpus majority class (lowest class
/// index on ties).
double constant_baseline(const Corpus& corpus, Task task);

}  // namespace newsframe
