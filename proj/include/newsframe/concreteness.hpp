#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>
#include <torch/nn.h>

#include "newsframe/corpus.hpp"
#include "newsframe/encoders.hpp"
#include "newsframe/experiment.hpp"
#include "newsframe/stats.hpp"

namespace newsframe {

inline constexpr double kMinConcreteness = 1.0;
inline constexpr double kMaxConcreteness = 5.0;
inline constexpr double kNamedEntityConcreteness = 5.0;

struct ConcretenessLexicon {
    std::map<std::string, double> entries;  ///< lowercased word -> rating in [1, 5]

    std::size_t size() const { return entries.size(); }
};

/// Two-column CSV (word, rating). A first row whose rating is not a number
/// is taken as a header. Throws DataError naming the row for ratings outside
/// [1, 5], unparsable ratings and duplicate words.
ConcretenessLexicon load_lexicon(const std::filesystem::path& path);
ConcretenessLexicon parse_lexicon(std::istream& in);

struct RegressorConfig {
    std::int64_t hidden = 256;
    int epochs = 200;
    int batch_size = 256;
    double learning_rate = 1e-3;
    int patience = 20;  ///< epochs without val improvement before stopping
    std::uint64_t seed = 0;
    double val_fraction = 0.05;
    double test_fraction = 0.05;
};

void to_json(nlohmann::json& j, const RegressorConfig& c);

/// Mean of the per-word-piece last-four-layer vectors of `word` encoded on
/// its own. Returns nullopt when the word yields no word pieces.
std::optional<torch::Tensor> word_embedding(TextEncoder& encoder, const std::string& word);

struct ConcretenessModel {
    torch::nn::Sequential net{nullptr};  ///< 4H -> hidden -> 1
    torch::Tensor input_mean, input_std;
    double target_mean = 0.0, target_std = 1.0;
    std::vector<std::string> train_words, val_words, test_words;
    int skipped = 0;  ///< lexicon words without word pieces
    double test_pearson = 0.0;
    double val_pearson = 0.0;
    std::string encoder_id;
    RegressorConfig config;

    /// Unclamped prediction for a batch of embeddings [N, 4H].
    torch::Tensor raw(const torch::Tensor& embeddings) const;
};

/// Fits the regressor on embedding/rating pairs after a seeded 90/5/5
/// split. Throws UsageError when fewer than three words remain.
ConcretenessModel train_concreteness(const std::vector<std::string>& words, const torch::Tensor& embeddings,
                                     const std::vector<double>& ratings, const RegressorConfig& cfg);
ConcretenessModel train_concreteness(const ConcretenessLexicon& lexicon, TextEncoder& encoder,
                                     const RegressorConfig& cfg);

void save_concreteness_model(const ConcretenessModel& m, const std::filesystem::path& dir);
ConcretenessModel load_concreteness_model(const std::filesystem::path& dir);

/// Anything that gives an unclamped concreteness estimate for a word.
class ConcretenessScorer {
public:
    virtual ~ConcretenessScorer() = default;
    virtual double raw_score(const std::string& word) = 0;
};

/// Scores words with a trained regressor over isolated-word embeddings,
/// caching per lowercased word.
class ModelScorer : public ConcretenessScorer {
public:
    ModelScorer(const ConcretenessModel& model, TextEncoder encoder);
    double raw_score(const std::string& word) override;

private:
    const ConcretenessModel& model_;
    TextEncoder encoder_;
    std::unordered_map<std::string, double> cache_;
};

/// Named entities score exactly 5 without consulting the scorer; other
/// words get the scorer's value clamped to [1, 5].
double word_concreteness(ConcretenessScorer& scorer, const std::string& word, bool is_named_entity);

/// Flags which headline tokens are named entities.
class NeTagger {
public:
    virtual ~NeTagger() = default;
    virtual std::vector<bool> tag(const std::string& headline, const std::vector<std::string>& tokens) const = 0;
    virtual std::string name() const = 0;
};

/// Capitalisation heuristic. In sentence-case headlines a capitalised token
/// other than the first is an entity; in title-case headlines, where every
/// content word is capitalised, only all-caps tokens of two or more letters
/// (acronyms) count.
class CapitalizationTagger : public NeTagger {
public:
    std::vector<bool> tag(const std::string& headline, const std::vector<std::string>& tokens) const override;
    std::string name() const override { return "capitalization"; }
};

/// Tokens whose lowercased form is in a fixed list.
class GazetteerTagger : public NeTagger {
public:
    explicit GazetteerTagger(std::set<std::string> entries);
    static GazetteerTagger from_file(const std::filesystem::path& path);  ///< one entry per line
    std::vector<bool> tag(const std::string& headline, const std::vector<std::string>& tokens) const override;
    std::string name() const override { return "gazetteer"; }

private:
    std::set<std::string> entries_;
};

/// Union of several taggers.
class UnionTagger : public NeTagger {
public:
    explicit UnionTagger(std::vector<std::shared_ptr<const NeTagger>> taggers);
    std::vector<bool> tag(const std::string& headline, const std::vector<std::string>& tokens) const override;
    std::string name() const override;

private:
    std::vector<std::shared_ptr<const NeTagger>> taggers_;
};

/// Whitespace tokens with surrounding punctuation stripped; tokens made only
/// of punctuation are dropped.
std::vector<std::string> headline_tokens(const std::string& headline);

bool is_stopword(const std::string& lowercase_word);

struct FrameConcreteness {
    Frame frame;
    std::optional<double> mean;  ///< nullopt when the frame has no scored tokens
    int headlines = 0;
    int tokens = 0;
    int named_entities = 0;
};

struct FrameConcretenessOptions {
    bool exclude_stopwords = false;
};

/// Token-weighted mean word concreteness over each frame's headlines.
std::vector<FrameConcreteness> frame_concreteness(const Corpus& corpus, ConcretenessScorer& scorer,
                                                  const NeTagger& tagger, FrameConcretenessOptions opts = {});

/// Product-moment correlation. Throws UsageError for fewer than two points,
/// unequal lengths or a series with zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct Correlation {
    std::string name;
    std::string x, y;
    std::optional<double> r;  ///< nullopt when fewer than two frames or no variance remain
    int n = 0;
    std::vector<int> dropped_frames;
    double reference = 0.0;
};

struct CorrelationReport {
    std::vector<FrameConcreteness> concreteness;
    std::vector<double> relevance_ratio;                 ///< per frame
    std::vector<std::optional<double>> f1_relevant, f1_all;  ///< mean per-frame F1 over the given reports
    std::vector<Correlation> correlations;
};

/// Frame-level correlations between concreteness, relevance ratio and mean
/// per-frame F1 on each subset. Frame-task reports are split by subset and
/// their per-frame F1 averaged; frames without a value are dropped from the
/// affected correlations and listed.
CorrelationReport correlation_report(const StatsTable& stats, const std::vector<FrameConcreteness>& concreteness,
                                     const std::vector<EvalReport>& reports);

void to_json(nlohmann::json& j, const CorrelationReport& r);

/// Bars for relevance ratio, a line for concreteness on a second axis,
/// frames in id order.
std::string render_concreteness_chart(const CorrelationReport& r);

}  // namespace newsframe
