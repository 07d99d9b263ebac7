#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>
#include <torch/nn.h>

#include "newsframe/encoders.hpp"
#include "newsframe/features.hpp"

namespace newsframe {

enum class HeadKind {
    TextFineTune,      ///< text encoder + linear layer
    ImageClassifier,   ///< image encoder (512 + dropout) + linear layer
    SreLogReg,         ///< multinomial logistic regression over SRE one-hots
    Fusion,            ///< [image 512 ; text 4H] -> 3-layer feed-forward, trained with the image encoder
    SreAugmentedText,  ///< [text 4H ; SRE 19] -> 1 linear layer, trained with the text encoder
};

std::string to_string(HeadKind k);
HeadKind head_kind_from_string(const std::string& s);

/// Model family implied by a modality: image+text -> Fusion, sre+text ->
/// SreAugmentedText, image -> ImageClassifier, sre -> SreLogReg, text ->
/// TextFineTune. Image combined with SRE is not supported.
HeadKind head_kind_for(const ModalitySpec& spec);

enum class LossKind { CrossEntropy, Focal };

struct TrainConfig {
    int epochs = 10;
    int batch_size = 4;
    double learning_rate = 2e-5;
    double weight_decay = 0.01;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::CrossEntropy;
    double focal_gamma = 2.0;
    int early_stop_patience = 5;  ///< fusion models only
    bool deterministic = true;
    /// Keep the frame-tuned text encoder fixed while the fusion head and
    /// image encoder train.
    bool freeze_text_in_fusion = true;
    /// Logistic regression: L-BFGS iterations and inverse L2 strength.
    int logreg_max_iter = 100;
    double logreg_c = 1.0;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

/// Base of every head. forward() returns unnormalised class scores [B, C].
class ClassifierImpl : public torch::nn::Module {
public:
    ClassifierImpl(HeadKind kind, std::int64_t num_classes) : kind_(kind), num_classes_(num_classes) {}

    virtual torch::Tensor forward(std::span<const Example* const> batch) = 0;

    HeadKind kind() const { return kind_; }
    std::int64_t num_classes() const { return num_classes_; }
    torch::ScalarType dtype() const;

    /// Parameters the optimiser should update (requires_grad only).
    std::vector<torch::Tensor> trainable_parameters();

private:
    HeadKind kind_;
    std::int64_t num_classes_;
};

class TextClassifierImpl : public ClassifierImpl {
public:
    TextClassifierImpl(TextEncoder encoder, std::int64_t num_classes);
    torch::Tensor forward(std::span<const Example* const> batch) override;

    TextEncoder text_encoder{nullptr};
    torch::nn::Dropout dropout{nullptr};
    torch::nn::Linear classifier{nullptr};
};

class ImageClassifierImpl : public ClassifierImpl {
public:
    ImageClassifierImpl(ImageEncoder encoder, std::int64_t num_classes);
    torch::Tensor forward(std::span<const Example* const> batch) override;

    ImageEncoder image_encoder{nullptr};
    torch::nn::Linear classifier{nullptr};
};

class SreLogRegImpl : public ClassifierImpl {
public:
    SreLogRegImpl(std::int64_t input_dim, std::int64_t num_classes);
    torch::Tensor forward(std::span<const Example* const> batch) override;

    torch::nn::Linear linear{nullptr};
};

/// Widths of the fusion feed-forward stack after the concatenated input.
inline constexpr std::array<std::int64_t, 2> kFusionHidden{512, 128};

class FusionClassifierImpl : public ClassifierImpl {
public:
    FusionClassifierImpl(ImageEncoder image, TextEncoder text, std::int64_t num_classes);
    torch::Tensor forward(std::span<const Example* const> batch) override;
    /// Head alone over precomputed features.
    torch::Tensor head_forward(const torch::Tensor& image_features, const torch::Tensor& text_features);

    ImageEncoder image_encoder{nullptr};
    TextEncoder text_encoder{nullptr};
    torch::nn::Sequential head{nullptr};
};

class SreTextClassifierImpl : public ClassifierImpl {
public:
    SreTextClassifierImpl(TextEncoder encoder, std::int64_t num_classes);
    torch::Tensor forward(std::span<const Example* const> batch) override;
    torch::Tensor head_forward(const torch::Tensor& text_features, const torch::Tensor& sre);

    TextEncoder text_encoder{nullptr};
    torch::nn::Dropout dropout{nullptr};
    torch::nn::Linear classifier{nullptr};
};

/// Untrained model for a spec. Encoders come from `source`; the head layers
/// are initialised from `seed`.
std::shared_ptr<ClassifierImpl> make_classifier(HeadKind kind, const ModalitySpec& spec, const EncoderSource& source,
                                                std::uint64_t seed);

struct EpochLog {
    int epoch = 0;  ///< 1-based
    double train_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainedModel {
    HeadKind kind = HeadKind::TextFineTune;
    ModalitySpec spec;
    TrainConfig config;
    EncoderSpec encoders;
    std::shared_ptr<ClassifierImpl> net;
    std::vector<EpochLog> log;
    /// Fusion only: the text fine-tuning stage that precedes joint training.
    std::vector<EpochLog> text_stage_log;
    int best_epoch = 0;
    std::vector<std::string> warnings;
};

/// Trains a head on train_set, choosing the epoch with the best validation
/// accuracy (first best wins). Early stopping applies to fusion models only.
/// Throws TrainingError on empty splits or labels outside the task's range.
TrainedModel train(HeadKind kind, const ModalitySpec& spec, std::span<const Example> train_set,
                   std::span<const Example> val_set, const TrainConfig& cfg, const EncoderSource& source);

/// Seeds torch and, when requested, pins it to deterministic single-threaded kernels.
void seed_everything(std::uint64_t seed, bool deterministic);

struct Prediction {
    int label = 0;  ///< class index, ties resolved toward the lowest index
    std::vector<double> probabilities;
};

/// Softmax over logits in double precision with lowest-index tie breaking.
Prediction prediction_from_logits(std::span<const double> logits);

Prediction predict(const TrainedModel& model, const Example& item);
std::vector<Prediction> predict(const TrainedModel& model, std::span<const Example> items, int batch_size = 16);
double accuracy(const TrainedModel& model, std::span<const Example> items);

/// Mean focal loss over a batch of logits; gamma = 0 is cross-entropy.
torch::Tensor focal_loss(const torch::Tensor& logits, const torch::Tensor& targets, double gamma);
/// (1 - p_t)^gamma * -ln p_t for one probability vector.
double focal_loss(std::span<const double> probabilities, int target, double gamma);

/// Directory layout: weights.safetensors, manifest.json, and the text
/// vocabulary when the model has a text encoder.
void save_model(const TrainedModel& model, const std::filesystem::path& dir, const nlohmann::json& extra);
TrainedModel load_model(const std::filesystem::path& dir);

void to_json(nlohmann::json& j, const EpochLog& e);

}  // namespace newsframe
