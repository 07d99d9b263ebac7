#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "fixtures.hpp"
#include "newsframe/errors.hpp"
#include "newsframe/models.hpp"

using namespace newsframe;

namespace {

std::vector<std::string> texts_of(const Corpus& c) {
    std::vector<std::string> out;
    for (const auto& a : c.articles()) out.push_back(a.headline);
    return out;
}

std::shared_ptr<const ImageTensor> noise_image(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<float> d(0.0f, 1.0f);
    auto t = std::make_shared<ImageTensor>();
    t->pixels.resize(ImageTensor::kSize);
    for (auto& v : t->pixels) v = d(gen);
    return t;
}

/// Examples for any head: headline text, SRE one-hot and a noise image.
std::vector<Example> mixed_examples(const Corpus& c, const ModalitySpec& spec) {
    auto without = spec;
    std::erase(without.parts, Part::Image);
    if (without.parts.empty()) without.parts.push_back(Part::Headline);
    auto ex = build_examples(c, without);
    if (spec.has(Part::Image)) {
        for (std::size_t i = 0; i < ex.size(); ++i) ex[i].pixels = noise_image(i);
    }
    return ex;
}

std::vector<const Example*> ptrs(const std::vector<Example>& ex) {
    std::vector<const Example*> out;
    for (const auto& e : ex) out.push_back(&e);
    return out;
}

torch::Tensor labels(const std::vector<Example>& ex) {
    std::vector<std::int64_t> y;
    for (const auto& e : ex) y.push_back(e.label);
    return torch::tensor(y, torch::kLong);
}

double softmax_ce(const std::vector<double>& logits, int target) {
    double m = *std::max_element(logits.begin(), logits.end());
    double z = 0;
    for (double l : logits) z += std::exp(l - m);
    return -(logits[static_cast<std::size_t>(target)] - m - std::log(z));
}

}  // namespace

TEST_CASE("head kinds follow the modality") {
    CHECK(head_kind_for(ModalitySpec::parse(Task::Frame, "headline")) == HeadKind::TextFineTune);
    CHECK(head_kind_for(ModalitySpec::parse(Task::Frame, "resnet")) == HeadKind::ImageClassifier);
    CHECK(head_kind_for(ModalitySpec::parse(Task::Frame, "sre")) == HeadKind::SreLogReg);
    CHECK(head_kind_for(ModalitySpec::parse(Task::Frame, "resnet+headline")) == HeadKind::Fusion);
    CHECK(head_kind_for(ModalitySpec::parse(Task::Frame, "sre+headline")) == HeadKind::SreAugmentedText);
    CHECK(head_kind_for(ModalitySpec::parse(Task::Relevance, "sre+frame")) == HeadKind::SreLogReg);
    CHECK_THROWS_AS(head_kind_for(ModalitySpec::parse(Task::Frame, "resnet+sre")), UsageError);
    for (auto k : {HeadKind::TextFineTune, HeadKind::ImageClassifier, HeadKind::SreLogReg, HeadKind::Fusion,
                   HeadKind::SreAugmentedText}) {
        CHECK(head_kind_from_string(to_string(k)) == k);
    }
}

TEST_CASE("focal loss values") {
    const std::vector<double> half{0.5, 0.5};
    CHECK(focal_loss(half, 0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(focal_loss(half, 1, 2.0) == doctest::Approx(0.25 * std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(focal_loss(half, 2, 2.0), UsageError);
    CHECK_THROWS_AS(focal_loss(half, 0, -1.0), UsageError);

    std::mt19937_64 gen(3);
    std::normal_distribution<double> d(0.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int C = 2 + static_cast<int>(gen() % 8);
        const int B = 1 + static_cast<int>(gen() % 5);
        const double gamma = (gen() % 4) * 0.5;
        auto logits = torch::empty({B, C}, torch::kDouble);
        std::vector<std::int64_t> y;
        double oracle = 0;
        double ce = 0;
        for (int b = 0; b < B; ++b) {
            std::vector<double> row;
            for (int c = 0; c < C; ++c) {
                row.push_back(d(gen));
                logits[b][c] = row.back();
            }
            const int t = static_cast<int>(gen() % static_cast<std::uint64_t>(C));
            y.push_back(t);
            const double l = softmax_ce(row, t);
            const double p = std::exp(-l);
            oracle += std::pow(1.0 - p, gamma) * l;
            ce += l;
        }
        oracle /= B;
        ce /= B;
        const auto yt = torch::tensor(y, torch::kLong);
        CHECK(std::abs(focal_loss(logits, yt, gamma).item<double>() - oracle) <= 1e-9);
        CHECK(std::abs(focal_loss(logits, yt, 0.0).item<double>() - ce) <= 1e-9);
        CHECK(std::abs(torch::nn::functional::cross_entropy(logits, yt).item<double>() - ce) <= 1e-9);
    }
}

TEST_CASE("predictions from logits") {
    const std::vector<double> tie{1.0, 3.0, 3.0, -2.0};
    const auto p = prediction_from_logits(tie);
    CHECK(p.label == 1);
    double sum = 0;
    for (double v : p.probabilities) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.probabilities[1] == p.probabilities[2]);
    const std::vector<double> huge{1000.0, 999.0};
    const auto q = prediction_from_logits(huge);
    CHECK(q.label == 0);
    CHECK(std::isfinite(q.probabilities[1]));
}

TEST_CASE("train config round-trips through JSON") {
    TrainConfig c;
    c.epochs = 3;
    c.loss = LossKind::Focal;
    c.focal_gamma = 1.5;
    c.seed = 77;
    const nlohmann::json j = c;
    const auto back = j.get<TrainConfig>();
    CHECK(back.epochs == 3);
    CHECK(back.loss == LossKind::Focal);
    CHECK(back.focal_gamma == 1.5);
    CHECK(back.seed == 77);
}

TEST_CASE("every head lowers its loss over ten steps") {
    const auto corpus = fixtures::frame_named_corpus(12);
    const EncoderSource source(EncoderSpec{}, texts_of(corpus));
    for (const std::string key : {"headline", "resnet", "sre", "resnet+headline", "sre+headline"}) {
        CAPTURE(key);
        const auto spec = ModalitySpec::parse(Task::Frame, key);
        const auto ex = mixed_examples(corpus, spec);
        auto net = make_classifier(head_kind_for(spec), spec, source, 1);
        net->eval();
        torch::optim::Adam opt(net->trainable_parameters(), torch::optim::AdamOptions(1e-3));
        const auto p = ptrs(ex);
        const auto y = labels(ex);
        double first = 0;
        double last = 0;
        for (int step = 0; step <= 10; ++step) {
            opt.zero_grad();
            auto loss = torch::nn::functional::cross_entropy(net->forward(p), y);
            if (step == 0) first = loss.item<double>();
            last = loss.item<double>();
            if (step < 10) {
                loss.backward();
                opt.step();
            }
        }
        CHECK(last < first);
    }
}

TEST_CASE("fusion and SRE-augmented heads pass a finite-difference gradient check") {
    const auto corpus = fixtures::subject_separable_corpus(6);
    const EncoderSource source(EncoderSpec{}, texts_of(corpus));
    for (const std::string key : {"resnet+headline", "sre+headline"}) {
        CAPTURE(key);
        const auto spec = ModalitySpec::parse(Task::Frame, key);
        const auto ex = mixed_examples(corpus, spec);
        auto net = make_classifier(head_kind_for(spec), spec, source, 5);
        net->to(torch::kDouble);
        if (auto* f = dynamic_cast<FusionClassifierImpl*>(net.get())) {
            f->image_encoder->set_frozen(true);
            f->text_encoder->set_frozen(true);
        } else if (auto* s = dynamic_cast<SreTextClassifierImpl*>(net.get())) {
            s->text_encoder->set_frozen(true);
        }
        net->eval();
        const auto p = ptrs(ex);
        const auto y = labels(ex);
        auto loss_fn = [&] { return torch::nn::functional::cross_entropy(net->forward(p), y); };

        auto params = net->trainable_parameters();
        REQUIRE_FALSE(params.empty());
        for (const auto& t : net->parameters()) {
            if (!t.requires_grad()) continue;
            bool in_encoder = false;
            for (const auto& named : net->named_parameters()) {
                if (named.value().is_same(t) && named.key().find("_encoder") != std::string::npos) in_encoder = true;
            }
            CHECK_FALSE(in_encoder);
        }
        net->zero_grad();
        loss_fn().backward();

        std::mt19937_64 gen(9);
        int probes = 0;
        const double h = 1e-6;
        for (int attempt = 0; attempt < 500 && probes < 5; ++attempt) {
            auto& w = params[gen() % params.size()];
            auto flat = w.view({-1});
            const auto i = static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(flat.numel()));
            const double analytic = w.grad().view({-1})[i].item<double>();
            if (std::abs(analytic) < 1e-6) continue;
            double plus = 0;
            double minus = 0;
            {
                torch::NoGradGuard ng;
                const double orig = flat[i].item<double>();
                flat[i] = orig + h;
                plus = loss_fn().item<double>();
                flat[i] = orig - h;
                minus = loss_fn().item<double>();
                flat[i] = orig;
            }
            const double numeric = (plus - minus) / (2 * h);
            const double rel = std::abs(analytic - numeric) / std::max(std::abs(analytic), std::abs(numeric));
            CHECK(rel <= 1e-4);
            ++probes;
        }
        CHECK(probes == 5);
    }
}

TEST_CASE("logistic regression separates a subject-separable fixture") {
    const auto corpus = fixtures::subject_separable_corpus(36);
    const auto spec = ModalitySpec::parse(Task::Frame, "sre");
    const auto ex = build_examples(corpus, spec);
    const EncoderSource source(EncoderSpec{}, {});
    const auto model = train(HeadKind::SreLogReg, spec, ex, {}, TrainConfig{}, source);
    CHECK(accuracy(model, ex) == 1.0);
    for (const auto& pr : predict(model, ex)) {
        double s = 0;
        for (double v : pr.probabilities) s += v;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(pr.probabilities.size() == 9);
    }
}

TEST_CASE("training rejects bad splits") {
    const auto corpus = fixtures::subject_separable_corpus(9);
    const auto spec = ModalitySpec::parse(Task::Frame, "sre");
    auto ex = build_examples(corpus, spec);
    const EncoderSource source(EncoderSpec{}, {});
    CHECK_THROWS_AS(train(HeadKind::SreLogReg, spec, {}, ex, TrainConfig{}, source), TrainingError);
    ex[0].label = 9;
    CHECK_THROWS_AS(train(HeadKind::SreLogReg, spec, ex, {}, TrainConfig{}, source), TrainingError);
}

TEST_CASE("frozen SRE-augmented training is deterministic and survives save and load") {
    fixtures::TempDir dir("model");
    const auto corpus = fixtures::subject_separable_corpus(18);
    const auto spec = ModalitySpec::parse(Task::Frame, "sre+headline");
    const auto ex = build_examples(corpus, spec);
    const EncoderSource source(EncoderSpec{}, texts_of(corpus));
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.learning_rate = 1e-3;
    cfg.seed = 4;
    const std::span<const Example> all(ex);
    const auto a = train(HeadKind::SreAugmentedText, spec, all.subspan(0, 12), all.subspan(12), cfg, source);
    const auto b = train(HeadKind::SreAugmentedText, spec, all.subspan(0, 12), all.subspan(12), cfg, source);
    const auto pa = predict(a, ex);
    const auto pb = predict(b, ex);
    for (std::size_t i = 0; i < ex.size(); ++i) CHECK(pa[i].probabilities == pb[i].probabilities);
    CHECK(a.log.size() == 2);

    save_model(a, dir.path(), nlohmann::json{{"note", "x"}});
    const auto back = load_model(dir.path());
    CHECK(back.kind == HeadKind::SreAugmentedText);
    CHECK(back.spec == spec);
    const auto pc = predict(back, ex);
    for (std::size_t i = 0; i < ex.size(); ++i) CHECK(pa[i].probabilities == pc[i].probabilities);
}
