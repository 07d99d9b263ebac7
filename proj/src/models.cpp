#include "newsframe/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include <ATen/Context.h>
#include <ATen/Parallel.h>
#include <nlohmann/json.hpp>
#include <torch/optim.h>

#include "newsframe/errors.hpp"
#include "newsframe/rng.hpp"

namespace newsframe {

namespace fs = std::filesystem;

namespace {

constexpr struct {
    HeadKind kind;
    const char* name;
} kHeadNames[] = {
    {HeadKind::TextFineTune, "text_finetune"},
    {HeadKind::ImageClassifier, "image_classifier"},
    {HeadKind::SreLogReg, "sre_logreg"},
    {HeadKind::Fusion, "fusion"},
    {HeadKind::SreAugmentedText, "sre_augmented_text"},
};

std::vector<std::string> batch_texts(std::span<const Example* const> batch) {
    std::vector<std::string> texts;
    texts.reserve(batch.size());
    for (const auto* ex : batch) texts.push_back(ex->text);
    return texts;
}

torch::Tensor batch_dense(std::span<const Example* const> batch, std::int64_t dim, torch::ScalarType dtype) {
    const auto B = static_cast<std::int64_t>(batch.size());
    auto out = torch::zeros({B, dim}, torch::kFloat32);
    auto a = out.accessor<float, 2>();
    for (std::int64_t b = 0; b < B; ++b) {
        const auto& d = batch[static_cast<std::size_t>(b)]->dense;
        if (static_cast<std::int64_t>(d.size()) != dim) {
            throw DataError("example " + batch[static_cast<std::size_t>(b)]->article_id + " has " +
                            std::to_string(d.size()) + " dense features, expected " + std::to_string(dim));
        }
        for (std::int64_t i = 0; i < dim; ++i) a[b][i] = d[static_cast<std::size_t>(i)];
    }
    return out.to(dtype);
}

torch::Tensor batch_images(std::span<const Example* const> batch, torch::ScalarType dtype) {
    std::vector<std::shared_ptr<const ImageTensor>> owned;
    std::vector<const ImageTensor*> ptrs;
    for (const auto* ex : batch) {
        if (ex->pixels) {
            ptrs.push_back(ex->pixels.get());
        } else if (ex->image_path) {
            owned.push_back(std::make_shared<ImageTensor>(preprocess_image(*ex->image_path, ex->article_id)));
            ptrs.push_back(owned.back().get());
        } else {
            throw DataError("example " + ex->article_id + " carries no image");
        }
    }
    return image_batch(ptrs, dtype);
}

torch::Tensor labels_of(std::span<const Example* const> batch) {
    std::vector<std::int64_t> y;
    y.reserve(batch.size());
    for (const auto* ex : batch) y.push_back(ex->label);
    return torch::tensor(y, torch::kLong);
}

std::vector<const Example*> pointers(std::span<const Example> items) {
    std::vector<const Example*> out;
    out.reserve(items.size());
    for (const auto& e : items) out.push_back(&e);
    return out;
}

}  // namespace

std::string to_string(HeadKind k) {
    for (const auto& n : kHeadNames) {
        if (n.kind == k) return n.name;
    }
    return "?";
}

HeadKind head_kind_from_string(const std::string& s) {
    for (const auto& n : kHeadNames) {
        if (s == n.name) return n.kind;
    }
    throw DataError("unknown head kind '" + s + "'");
}

HeadKind head_kind_for(const ModalitySpec& spec) {
    const bool image = spec.has(Part::Image);
    const bool sre = spec.has(Part::Sre);
    // A frame label alone rides as a one-hot next to SRE, not as text.
    const bool text = spec.has_text() && !(sre && spec.text_parts().size() == 1 && spec.has(Part::FrameLabel));
    if (image && sre) throw UsageError("modality '" + spec.key() + "' combines image and SRE, which no model supports");
    if (image) return text ? HeadKind::Fusion : HeadKind::ImageClassifier;
    if (sre) return text ? HeadKind::SreAugmentedText : HeadKind::SreLogReg;
    if (!text) throw UsageError("modality '" + spec.key() + "' has no usable input");
    return HeadKind::TextFineTune;
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = nlohmann::json{{"epochs", c.epochs},
                       {"batch_size", c.batch_size},
                       {"learning_rate", c.learning_rate},
                       {"weight_decay", c.weight_decay},
                       {"optimizer", "adamw"},
                       {"seed", c.seed},
                       {"loss", c.loss == LossKind::Focal ? "focal" : "cross_entropy"},
                       {"focal_gamma", c.focal_gamma},
                       {"early_stop_patience", c.early_stop_patience},
                       {"deterministic", c.deterministic},
                       {"freeze_text_in_fusion", c.freeze_text_in_fusion},
                       {"logreg_max_iter", c.logreg_max_iter},
                       {"logreg_c", c.logreg_c},
                       {"class_weighting", "none"}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
    TrainConfig d;
    c.epochs = j.value("epochs", d.epochs);
    c.batch_size = j.value("batch_size", d.batch_size);
    c.learning_rate = j.value("learning_rate", d.learning_rate);
    c.weight_decay = j.value("weight_decay", d.weight_decay);
    c.seed = j.value("seed", d.seed);
    const auto loss = j.value("loss", std::string("cross_entropy"));
    if (loss == "focal") {
        c.loss = LossKind::Focal;
    } else if (loss == "cross_entropy") {
        c.loss = LossKind::CrossEntropy;
    } else {
        throw DataError("unknown loss '" + loss + "'");
    }
    c.focal_gamma = j.value("focal_gamma", d.focal_gamma);
    c.early_stop_patience = j.value("early_stop_patience", d.early_stop_patience);
    c.deterministic = j.value("deterministic", d.deterministic);
    c.freeze_text_in_fusion = j.value("freeze_text_in_fusion", d.freeze_text_in_fusion);
    c.logreg_max_iter = j.value("logreg_max_iter", d.logreg_max_iter);
    c.logreg_c = j.value("logreg_c", d.logreg_c);
}

void to_json(nlohmann::json& j, const EpochLog& e) {
    j = nlohmann::json{{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_accuracy", e.val_accuracy}};
}

torch::ScalarType ClassifierImpl::dtype() const {
    for (const auto& p : parameters()) return p.scalar_type();
    return torch::kFloat32;
}

std::vector<torch::Tensor> ClassifierImpl::trainable_parameters() {
    std::vector<torch::Tensor> out;
    for (auto& p : parameters()) {
        if (p.requires_grad()) out.push_back(p);
    }
    return out;
}

TextClassifierImpl::TextClassifierImpl(TextEncoder encoder, std::int64_t num_classes)
    : ClassifierImpl(HeadKind::TextFineTune, num_classes) {
    text_encoder = register_module("text_encoder", std::move(encoder));
    dropout = register_module("dropout", torch::nn::Dropout(text_encoder->config().hidden_dropout_prob));
    classifier = register_module("classifier", torch::nn::Linear(text_encoder->output_dim(), num_classes));
}

torch::Tensor TextClassifierImpl::forward(std::span<const Example* const> batch) {
    return classifier(dropout(text_encoder->encode_pooled(batch_texts(batch))));
}

ImageClassifierImpl::ImageClassifierImpl(ImageEncoder encoder, std::int64_t num_classes)
    : ClassifierImpl(HeadKind::ImageClassifier, num_classes) {
    image_encoder = register_module("image_encoder", std::move(encoder));
    classifier = register_module("classifier", torch::nn::Linear(image_encoder->feature_dim(), num_classes));
}

torch::Tensor ImageClassifierImpl::forward(std::span<const Example* const> batch) {
    return classifier(image_encoder->forward(batch_images(batch, dtype())));
}

SreLogRegImpl::SreLogRegImpl(std::int64_t input_dim, std::int64_t num_classes)
    : ClassifierImpl(HeadKind::SreLogReg, num_classes) {
    linear = register_module("linear", torch::nn::Linear(input_dim, num_classes));
}

torch::Tensor SreLogRegImpl::forward(std::span<const Example* const> batch) {
    return linear(batch_dense(batch, linear->options.in_features(), dtype()));
}

FusionClassifierImpl::FusionClassifierImpl(ImageEncoder image, TextEncoder text, std::int64_t num_classes)
    : ClassifierImpl(HeadKind::Fusion, num_classes) {
    image_encoder = register_module("image_encoder", std::move(image));
    text_encoder = register_module("text_encoder", std::move(text));
    const auto in = image_encoder->feature_dim() + text_encoder->output_dim();
    head = register_module(
        "head", torch::nn::Sequential(torch::nn::Linear(in, kFusionHidden[0]), torch::nn::ReLU(),
                                      torch::nn::Dropout(0.5), torch::nn::Linear(kFusionHidden[0], kFusionHidden[1]),
                                      torch::nn::ReLU(), torch::nn::Dropout(0.5),
                                      torch::nn::Linear(kFusionHidden[1], num_classes)));
}

torch::Tensor FusionClassifierImpl::head_forward(const torch::Tensor& image_features, const torch::Tensor& text_features) {
    return head->forward(torch::cat({image_features, text_features}, 1));
}

torch::Tensor FusionClassifierImpl::forward(std::span<const Example* const> batch) {
    auto image = image_encoder->forward(batch_images(batch, dtype()));
    auto text = text_encoder->encode_pooled(batch_texts(batch));
    return head_forward(image, text);
}

SreTextClassifierImpl::SreTextClassifierImpl(TextEncoder encoder, std::int64_t num_classes)
    : ClassifierImpl(HeadKind::SreAugmentedText, num_classes) {
    text_encoder = register_module("text_encoder", std::move(encoder));
    dropout = register_module("dropout", torch::nn::Dropout(text_encoder->config().hidden_dropout_prob));
    classifier =
        register_module("classifier", torch::nn::Linear(text_encoder->output_dim() + kSreLength, num_classes));
}

torch::Tensor SreTextClassifierImpl::head_forward(const torch::Tensor& text_features, const torch::Tensor& sre) {
    return classifier(torch::cat({dropout(text_features), sre}, 1));
}

torch::Tensor SreTextClassifierImpl::forward(std::span<const Example* const> batch) {
    auto text = text_encoder->encode_pooled(batch_texts(batch));
    return head_forward(text, batch_dense(batch, kSreLength, text.scalar_type()));
}

std::shared_ptr<ClassifierImpl> make_classifier(HeadKind kind, const ModalitySpec& spec, const EncoderSource& source,
                                                std::uint64_t seed) {
    const auto C = static_cast<std::int64_t>(num_classes(spec.task));
    switch (kind) {
        case HeadKind::TextFineTune: {
            auto enc = source.make_text();
            torch::manual_seed(seed);
            return std::make_shared<TextClassifierImpl>(enc, C);
        }
        case HeadKind::ImageClassifier: {
            auto enc = source.make_image();
            torch::manual_seed(seed);
            return std::make_shared<ImageClassifierImpl>(enc, C);
        }
        case HeadKind::SreLogReg: {
            torch::manual_seed(seed);
            return std::make_shared<SreLogRegImpl>(static_cast<std::int64_t>(dense_dim(spec)), C);
        }
        case HeadKind::Fusion: {
            auto image = source.make_image();
            auto text = source.make_text();
            torch::manual_seed(seed);
            return std::make_shared<FusionClassifierImpl>(image, text, C);
        }
        case HeadKind::SreAugmentedText: {
            auto enc = source.make_text();
            torch::manual_seed(seed);
            return std::make_shared<SreTextClassifierImpl>(enc, C);
        }
    }
    throw UsageError("unhandled head kind");
}

void seed_everything(std::uint64_t seed, bool deterministic) {
    torch::manual_seed(seed);
    if (deterministic) {
        at::set_num_threads(1);
        at::globalContext().setDeterministicAlgorithms(true, /*warn_only=*/false);
    }
}

Prediction prediction_from_logits(std::span<const double> logits) {
    Prediction p;
    if (logits.empty()) return p;
    const double top = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    p.probabilities.reserve(logits.size());
    for (double l : logits) {
        p.probabilities.push_back(std::exp(l - top));
        z += p.probabilities.back();
    }
    for (auto& v : p.probabilities) v /= z;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (logits[i] == top) {
            p.label = static_cast<int>(i);
            break;
        }
    }
    return p;
}

torch::Tensor focal_loss(const torch::Tensor& logits, const torch::Tensor& targets, double gamma) {
    auto log_p = torch::log_softmax(logits, 1).gather(1, targets.unsqueeze(1)).squeeze(1);
    if (gamma == 0.0) return -log_p.mean();
    auto weight = torch::pow(1.0 - log_p.exp(), gamma);
    return -(weight * log_p).mean();
}

double focal_loss(std::span<const double> probabilities, int target, double gamma) {
    if (target < 0 || static_cast<std::size_t>(target) >= probabilities.size()) {
        throw UsageError("focal loss target " + std::to_string(target) + " out of range");
    }
    if (gamma < 0.0) throw UsageError("focal loss gamma must be non-negative");
    const double p = probabilities[static_cast<std::size_t>(target)];
    if (p >= 1.0) return 0.0;
    return std::pow(1.0 - p, gamma) * -std::log(p);
}

namespace {

double batch_accuracy(ClassifierImpl& net, std::span<const Example> items, int batch_size) {
    if (items.empty()) return 0.0;
    torch::NoGradGuard no_grad;
    const bool was_training = net.is_training();
    net.eval();
    auto ptrs = pointers(items);
    std::size_t correct = 0;
    for (std::size_t start = 0; start < ptrs.size(); start += static_cast<std::size_t>(batch_size)) {
        const auto end = std::min(ptrs.size(), start + static_cast<std::size_t>(batch_size));
        std::span<const Example* const> batch(ptrs.data() + start, end - start);
        auto logits = net.forward(batch).to(torch::kDouble).contiguous();
        for (std::size_t b = 0; b < batch.size(); ++b) {
            auto row = logits[static_cast<std::int64_t>(b)];
            std::span<const double> l(row.data_ptr<double>(), static_cast<std::size_t>(row.numel()));
            if (prediction_from_logits(l).label == batch[b]->label) ++correct;
        }
    }
    net.train(was_training);
    return static_cast<double>(correct) / static_cast<double>(items.size());
}

struct Snapshot {
    std::vector<torch::Tensor> tensors;

    static Snapshot of(torch::nn::Module& m) {
        Snapshot s;
        for (auto& p : m.parameters()) s.tensors.push_back(p.detach().clone());
        for (auto& b : m.buffers()) s.tensors.push_back(b.detach().clone());
        return s;
    }

    void restore(torch::nn::Module& m) const {
        torch::NoGradGuard no_grad;
        std::size_t i = 0;
        for (auto& p : m.parameters()) p.copy_(tensors[i++]);
        for (auto& b : m.buffers()) b.copy_(tensors[i++]);
    }
};

torch::Tensor loss_for(const TrainConfig& cfg, const torch::Tensor& logits, const torch::Tensor& y) {
    if (cfg.loss == LossKind::Focal) return focal_loss(logits, y, cfg.focal_gamma);
    return torch::nn::functional::cross_entropy(logits, y);
}

/// Mini-batch AdamW with per-epoch validation and best-epoch restore.
std::vector<EpochLog> fit(ClassifierImpl& net, std::span<const Example> train_set, std::span<const Example> val_set,
                          const TrainConfig& cfg, bool early_stop, int& best_epoch) {
    auto params = net.trainable_parameters();
    if (params.empty()) throw TrainingError("model has no trainable parameters");
    torch::optim::AdamW opt(params, torch::optim::AdamWOptions(cfg.learning_rate).weight_decay(cfg.weight_decay));

    Rng order_rng(cfg.seed);
    std::vector<const Example*> order = pointers(train_set);
    std::vector<EpochLog> log;
    double best_acc = -1.0;
    best_epoch = 0;
    Snapshot best = Snapshot::of(net);
    const auto bs = static_cast<std::size_t>(std::max(1, cfg.batch_size));

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        net.train();
        order_rng.shuffle(std::span(order));
        double loss_sum = 0.0;
        std::size_t steps = 0;
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const auto end = std::min(order.size(), start + bs);
            std::span<const Example* const> batch(order.data() + start, end - start);
            opt.zero_grad();
            auto loss = loss_for(cfg, net.forward(batch), labels_of(batch));
            if (!std::isfinite(loss.item<double>())) {
                throw TrainingError("loss became non-finite in epoch " + std::to_string(epoch));
            }
            loss.backward();
            opt.step();
            loss_sum += loss.item<double>();
            ++steps;
        }
        // Without a validation split, selection falls back to training accuracy.
        const double acc = val_set.empty() ? batch_accuracy(net, train_set, 16) : batch_accuracy(net, val_set, 16);
        log.push_back({epoch, loss_sum / static_cast<double>(std::max<std::size_t>(1, steps)), acc});
        if (acc > best_acc) {
            best_acc = acc;
            best_epoch = epoch;
            best = Snapshot::of(net);
        } else if (early_stop && epoch - best_epoch >= cfg.early_stop_patience) {
            break;
        }
    }
    best.restore(net);
    net.eval();
    return log;
}

/// Full-batch L-BFGS on mean cross-entropy plus ||W||^2 / (2 C n); the bias
/// is not penalised.
std::vector<EpochLog> fit_logreg(SreLogRegImpl& net, std::span<const Example> train_set,
                                 std::span<const Example> val_set, const TrainConfig& cfg) {
    net.train();
    auto ptrs = pointers(train_set);
    auto x = batch_dense(ptrs, net.linear->options.in_features(), net.dtype());
    auto y = labels_of(ptrs);
    const double l2 = 1.0 / (2.0 * cfg.logreg_c * static_cast<double>(train_set.size()));
    torch::optim::LBFGS opt(net.parameters(), torch::optim::LBFGSOptions(1.0)
                                                  .max_iter(cfg.logreg_max_iter)
                                                  .tolerance_grad(1e-6)
                                                  .tolerance_change(1e-9)
                                                  .history_size(10)
                                                  .line_search_fn("strong_wolfe"));
    auto closure = [&] {
        opt.zero_grad();
        auto loss = torch::nn::functional::cross_entropy(net.linear(x), y) + l2 * net.linear->weight.pow(2).sum();
        loss.backward();
        return loss;
    };
    opt.step(closure);
    torch::NoGradGuard no_grad;
    const double loss = torch::nn::functional::cross_entropy(net.linear(x), y).item<double>();
    net.eval();
    const double acc = val_set.empty() ? batch_accuracy(net, train_set, 64) : batch_accuracy(net, val_set, 64);
    return {EpochLog{1, loss, acc}};
}

void check_split(std::span<const Example> set, std::int64_t C, const char* name) {
    for (const auto& e : set) {
        if (e.label < 0 || e.label >= C) {
            throw TrainingError(std::string(name) + " example " + e.article_id + " has label " +
                                std::to_string(e.label) + " outside the " + std::to_string(C) + "-class space");
        }
    }
}

}  // namespace

TrainedModel train(HeadKind kind, const ModalitySpec& spec, std::span<const Example> train_set,
                   std::span<const Example> val_set, const TrainConfig& cfg, const EncoderSource& source) {
    if (train_set.empty()) throw TrainingError("training split is empty");
    const auto C = static_cast<std::int64_t>(num_classes(spec.task));
    check_split(train_set, C, "training");
    check_split(val_set, C, "validation");

    TrainedModel model;
    model.kind = kind;
    model.spec = spec;
    model.config = cfg;
    model.encoders = source.spec();

    std::vector<int> counts(static_cast<std::size_t>(C), 0);
    for (const auto& e : train_set) ++counts[static_cast<std::size_t>(e.label)];
    for (std::int64_t c = 0; c < C; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) {
            model.warnings.push_back("class '" + class_name(spec.task, static_cast<int>(c)) +
                                     "' is absent from the training split");
        }
    }
    for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';

    seed_everything(cfg.seed, cfg.deterministic);

    if (kind == HeadKind::SreLogReg) {
        auto net = std::static_pointer_cast<SreLogRegImpl>(make_classifier(kind, spec, source, cfg.seed));
        model.log = fit_logreg(*net, train_set, val_set, cfg);
        model.best_epoch = 1;
        model.net = net;
        return model;
    }

    if (kind == HeadKind::Fusion) {
        // Stage 1: fine-tune the text encoder for the task on the text parts.
        auto text_net = std::static_pointer_cast<TextClassifierImpl>(
            make_classifier(HeadKind::TextFineTune, spec, source, cfg.seed));
        torch::manual_seed(cfg.seed);
        int text_best = 0;
        model.text_stage_log = fit(*text_net, train_set, val_set, cfg, /*early_stop=*/false, text_best);

        auto image = source.make_image();
        auto text = text_net->text_encoder;
        text->set_frozen(cfg.freeze_text_in_fusion);
        torch::manual_seed(cfg.seed);
        auto net = std::make_shared<FusionClassifierImpl>(image, text, C);
        torch::manual_seed(cfg.seed);
        model.log = fit(*net, train_set, val_set, cfg, /*early_stop=*/true, model.best_epoch);
        model.net = net;
        return model;
    }

    model.net = make_classifier(kind, spec, source, cfg.seed);
    torch::manual_seed(cfg.seed);
    model.log = fit(*model.net, train_set, val_set, cfg, /*early_stop=*/false, model.best_epoch);
    return model;
}

std::vector<Prediction> predict(const TrainedModel& model, std::span<const Example> items, int batch_size) {
    if (!model.net) throw TrainingError("model has not been trained");
    torch::NoGradGuard no_grad;
    model.net->eval();
    auto ptrs = pointers(items);
    std::vector<Prediction> out;
    out.reserve(items.size());
    const auto bs = static_cast<std::size_t>(std::max(1, batch_size));
    for (std::size_t start = 0; start < ptrs.size(); start += bs) {
        const auto end = std::min(ptrs.size(), start + bs);
        std::span<const Example* const> batch(ptrs.data() + start, end - start);
        auto logits = model.net->forward(batch).to(torch::kDouble).contiguous();
        for (std::size_t b = 0; b < batch.size(); ++b) {
            auto row = logits[static_cast<std::int64_t>(b)];
            out.push_back(prediction_from_logits(
                std::span<const double>(row.data_ptr<double>(), static_cast<std::size_t>(row.numel()))));
        }
    }
    return out;
}

Prediction predict(const TrainedModel& model, const Example& item) {
    return predict(model, std::span<const Example>(&item, 1), 1).front();
}

double accuracy(const TrainedModel& model, std::span<const Example> items) {
    if (items.empty()) return 0.0;
    auto preds = predict(model, items);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < items.size(); ++i) correct += preds[i].label == items[i].label;
    return static_cast<double>(correct) / static_cast<double>(items.size());
}

namespace {

TextEncoder* text_encoder_of(ClassifierImpl& net) {
    if (auto* t = dynamic_cast<TextClassifierImpl*>(&net)) return &t->text_encoder;
    if (auto* f = dynamic_cast<FusionClassifierImpl*>(&net)) return &f->text_encoder;
    if (auto* s = dynamic_cast<SreTextClassifierImpl*>(&net)) return &s->text_encoder;
    return nullptr;
}

ImageEncoder* image_encoder_of(ClassifierImpl& net) {
    if (auto* i = dynamic_cast<ImageClassifierImpl*>(&net)) return &i->image_encoder;
    if (auto* f = dynamic_cast<FusionClassifierImpl*>(&net)) return &f->image_encoder;
    return nullptr;
}

constexpr const char* kModelFormat = "newsframe-model/1";

}  // namespace

void save_model(const TrainedModel& model, const fs::path& dir, const nlohmann::json& extra) {
    if (!model.net) throw TrainingError("cannot save an untrained model");
    fs::create_directories(dir);
    nlohmann::json m = extra.is_object() ? extra : nlohmann::json::object();
    m["format"] = kModelFormat;
    m["head"] = to_string(model.kind);
    m["task"] = to_string(model.spec.task);
    m["modality"] = model.spec.key();
    m["num_classes"] = model.net->num_classes();
    m["dense_dim"] = dense_dim(model.spec);
    m["train_config"] = model.config;
    m["encoders"] = model.encoders;
    m["seed"] = model.config.seed;
    m["best_epoch"] = model.best_epoch;
    m["log"] = model.log;
    m["text_stage_log"] = model.text_stage_log;
    m["warnings"] = model.warnings;
    m["text_encoder"] = nullptr;
    m["image_encoder"] = nullptr;
    if (auto* t = text_encoder_of(*model.net)) {
        m["text_encoder"] = {{"identifier", (*t)->identifier()}, {"config", (*t)->config()}, {"max_len", (*t)->max_len()}};
        (*t)->tokenizer().save(dir / "vocab.txt");
    }
    if (auto* i = image_encoder_of(*model.net)) {
        m["image_encoder"] = {{"identifier", (*i)->identifier()}, {"config", (*i)->config()}};
    }
    safetensors::TensorMap tensors;
    for (const auto& item : model.net->named_parameters(true)) tensors.emplace(item.key(), item.value());
    for (const auto& item : model.net->named_buffers(true)) tensors.emplace(item.key(), item.value());
    safetensors::save(dir / "weights.safetensors", tensors, {{"format", kModelFormat}});
    std::ofstream(dir / "manifest.json") << m.dump(2) << '\n';
}

TrainedModel load_model(const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw DataError("no manifest.json in " + dir.string());
    const auto m = nlohmann::json::parse(in);
    if (m.value("format", "") != kModelFormat) throw DataError(dir.string() + " is not a saved model");

    TrainedModel model;
    model.kind = head_kind_from_string(m.at("head").get<std::string>());
    model.spec = ModalitySpec::parse(task_from_string(m.at("task").get<std::string>()),
                                     m.at("modality").get<std::string>());
    model.config = m.at("train_config").get<TrainConfig>();
    model.encoders = m.at("encoders").get<EncoderSpec>();
    model.best_epoch = m.value("best_epoch", 0);
    for (const auto& e : m.value("log", nlohmann::json::array())) {
        model.log.push_back(
            {e.at("epoch").get<int>(), e.at("train_loss").get<double>(), e.at("val_accuracy").get<double>()});
    }
    model.warnings = m.value("warnings", std::vector<std::string>{});
    const auto C = m.at("num_classes").get<std::int64_t>();

    auto text = [&] {
        const auto& t = m.at("text_encoder");
        return TextEncoder(t.at("identifier").get<std::string>(), t.at("config").get<BertConfig>(),
                           WordPieceTokenizer::from_file(dir / "vocab.txt"), t.at("max_len").get<std::int64_t>());
    };
    auto image = [&] {
        const auto& i = m.at("image_encoder");
        return ImageEncoder(i.at("identifier").get<std::string>(), i.at("config").get<ResNetConfig>());
    };
    switch (model.kind) {
        case HeadKind::TextFineTune: model.net = std::make_shared<TextClassifierImpl>(text(), C); break;
        case HeadKind::ImageClassifier: model.net = std::make_shared<ImageClassifierImpl>(image(), C); break;
        case HeadKind::SreLogReg:
            model.net = std::make_shared<SreLogRegImpl>(m.at("dense_dim").get<std::int64_t>(), C);
            break;
        case HeadKind::Fusion: model.net = std::make_shared<FusionClassifierImpl>(image(), text(), C); break;
        case HeadKind::SreAugmentedText: model.net = std::make_shared<SreTextClassifierImpl>(text(), C); break;
    }
    const auto weights = safetensors::load(dir / "weights.safetensors");
    const auto report = load_matching(*model.net, weights);
    if (!report.missing.empty() || !report.mismatched.empty()) {
        throw DataError("weights in " + dir.string() + " do not match the model described by its manifest");
    }
    model.net->eval();
    return model;
}

}  // namespace newsframe
