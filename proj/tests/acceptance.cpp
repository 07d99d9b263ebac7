#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <string>

#include <nlohmann/json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <torch/torch.h>

#include "fixtures.hpp"
#include "newsframe/agreement.hpp"
#include "newsframe/concreteness.hpp"
#include "newsframe/errors.hpp"
#include "newsframe/experiment.hpp"
#include "newsframe/features.hpp"
#include "newsframe/metrics.hpp"
#include "newsframe/models.hpp"
#include "newsframe/stats.hpp"
#include "oracles.hpp"

using namespace newsframe;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status = Status::Fail;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

const char* env(const char* name) {
    const char* v = std::getenv(name);
    return v && *v ? v : nullptr;
}

// 1 -------------------------------------------------------------------------

Outcome metric_oracles() {
    constexpr int kTrials = 25;
    constexpr double kTol = 1e-9;
    std::mt19937_64 gen(2024);
    std::normal_distribution<double> normal;
    double worst_acc = 0, worst_f1 = 0, worst_r = 0, worst_focal = 0, worst_alpha = 0;

    for (int t = 0; t < kTrials; ++t) {
        const std::size_t n = 2 + gen() % 40;
        const int C = 2 + static_cast<int>(gen() % 8);
        std::vector<int> g(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = static_cast<int>(gen() % static_cast<std::uint64_t>(C));
            p[i] = static_cast<int>(gen() % static_cast<std::uint64_t>(C));
        }
        worst_acc = std::max(worst_acc, std::abs(micro_accuracy(g, p) - oracles::accuracy(g, p)));
        for (int c = 0; c < C; ++c) {
            worst_f1 = std::max(worst_f1, std::abs(per_class_f1(g, p, c).f1 - oracles::f1(g, p, c)));
        }

        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = normal(gen);
            y[i] = 0.3 * x[i] + normal(gen);
        }
        worst_r = std::max(worst_r, std::abs(pearson(x, y) - oracles::pearson(x, y)));

        std::vector<double> logits(static_cast<std::size_t>(C));
        for (auto& l : logits) l = 2.0 * normal(gen);
        const int target = static_cast<int>(gen() % static_cast<std::uint64_t>(C));
        const double gamma = static_cast<double>(gen() % 5) * 0.5;
        const auto lt = torch::tensor(logits, torch::kDouble).unsqueeze(0);
        const auto tt = torch::tensor({static_cast<std::int64_t>(target)}, torch::kLong);
        const double want = oracles::focal(logits, target, gamma);
        worst_focal = std::max(worst_focal, std::abs(focal_loss(lt, tt, gamma).item<double>() - want));
        const auto probs = prediction_from_logits(logits).probabilities;
        worst_focal = std::max(worst_focal, std::abs(focal_loss(probs, target, gamma) - want));

        const int coders = 2 + static_cast<int>(gen() % 4);
        const int items = 3 + static_cast<int>(gen() % 20);
        const int values = 2 + static_cast<int>(gen() % 4);
        Codings codings(static_cast<std::size_t>(coders));
        for (auto& coder : codings) {
            for (int i = 0; i < items; ++i) {
                if (gen() % 5 == 0) {
                    coder.emplace_back();
                } else {
                    coder.emplace_back(std::to_string(gen() % static_cast<std::uint64_t>(values)));
                }
            }
        }
        codings[0][0] = "0";
        codings[1][0] = "1";
        worst_alpha = std::max(worst_alpha, std::abs(agreement(codings).alpha - oracles::alpha(codings)));
    }

    // Reliability data with missing values, as transcribed from the published
    // worked example; alpha = 0.743.
    const char* rows[] = {"1 2 3 3 2 1 4 1 2 . . .", "1 2 3 3 2 2 4 1 2 5 . 3", ". 3 3 3 2 3 4 2 2 5 1 .",
                          "1 2 3 3 2 4 4 1 2 5 1 ."};
    Codings example;
    for (const char* r : rows) {
        std::vector<std::optional<std::string>> coder;
        for (const char* ch = r; *ch; ++ch) {
            if (*ch == ' ') continue;
            if (*ch == '.') {
                coder.emplace_back();
            } else {
                coder.emplace_back(std::string(1, *ch));
            }
        }
        example.push_back(coder);
    }
    const double published = agreement(example).alpha;

    const bool ok = worst_acc <= kTol && worst_f1 <= kTol && worst_r <= kTol && worst_focal <= kTol &&
                    worst_alpha <= kTol && std::abs(published - 0.743) <= 1e-3;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%d fixtures each; max err acc %.1e f1 %.1e r %.1e focal %.1e alpha %.1e; worked example %.4f",
                  kTrials, worst_acc, worst_f1, worst_r, worst_focal, worst_alpha, published);
    return verdict(ok, buf);
}

// 2 -------------------------------------------------------------------------

Outcome encoding_invariants() {
    int pairs = 0;
    int good = 0;
    for (int s = 1; s <= kNumSubjects; ++s) {
        for (int re = kFirstReId; re <= kLastReId; ++re) {
            const auto v = encode_sre(s, re);
            ++pairs;
            good += v.sum() == 2 && v.at_position(s) == 1 && v.at_position(re) == 1;
        }
    }

    std::mt19937_64 gen(17);
    const auto art = fixtures::article("x", "Senate passes bill", 1);
    const auto api = ModalitySpec::parse(Task::Frame, "api");
    const auto with_frame = ModalitySpec::parse(Task::Relevance, "headline+api+frame");
    int trials = 0;
    int text_ok = 0;
    for (; trials < 200; ++trials) {
        auto im = fixtures::image("x", 1, 17, true);
        im.api_tags.clear();
        const std::size_t n = gen() % 30;
        for (std::size_t i = 0; i < n; ++i) im.api_tags.push_back("tag" + std::to_string(gen() % 997));
        std::string top;
        for (std::size_t i = 0; i < std::min<std::size_t>(kMaxApiTags, n); ++i) top += (i ? " " : "") + im.api_tags[i];
        const Frame other = frame_from_id(1 + static_cast<int>(gen() % kNumFrames));
        const auto t1 = build_text(art, &im, api);
        const auto t2 = build_text(art, &im, with_frame);
        const auto t3 = build_text(art, &im, with_frame, other);
        const std::string gold_suffix = " [SEP] " + std::string(art.frame.name);
        const std::string other_suffix = " [SEP] " + std::string(other.name);
        text_ok += t1 == top && t2 == "Senate passes bill [SEP] " + top + gold_suffix &&
                   t3 == "Senate passes bill [SEP] " + top + other_suffix;
    }
    const bool ok = pairs == 48 && good == 48 && text_ok == trials;
    return verdict(ok, std::to_string(good) + "/48 SRE pairs sum to 2; " + std::to_string(text_ok) + "/" +
                           std::to_string(trials) + " randomized tag lists");
}

// 3 -------------------------------------------------------------------------

Outcome synthetic_end_to_end() {
    ExperimentSpec text;
    text.task = Task::Frame;
    text.modality = ModalitySpec::parse(Task::Frame, "headline");
    text.seeds = {0};
    text.train.epochs = 10;
    text.train.batch_size = 1;
    text.train.learning_rate = 1e-3;
    text.val_fraction = 0.0;
    text.encoders.text_id = "builtin:bert-tiny";
    const auto tr = run_experiment(text, fixtures::frame_named_corpus(40), std::nullopt);
    std::string folds;
    bool all_text = true;
    for (const auto& r : tr.runs) {
        folds += (folds.empty() ? "" : " ") + fmt("%.2f", r.accuracy);
        all_text = all_text && r.accuracy == 1.0;
    }

    ExperimentSpec sre = text;
    sre.modality = ModalitySpec::parse(Task::Frame, "sre");
    const auto sr = run_experiment(sre, fixtures::subject_separable_corpus(40), std::nullopt);
    bool all_sre = true;
    for (const auto& r : sr.runs) all_sre = all_sre && r.accuracy == 1.0;

    return verdict(all_text && all_sre, "headline folds [" + folds + "]; sre mean " +
                                            fmt("%.3f", sr.mean_accuracy) + " over " +
                                            std::to_string(sr.runs.size()) + " folds");
}

// 4 -------------------------------------------------------------------------

std::shared_ptr<const ImageTensor> noise_image(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<float> d(0.0f, 1.0f);
    auto t = std::make_shared<ImageTensor>();
    t->pixels.resize(ImageTensor::kSize);
    for (auto& v : t->pixels) v = d(gen);
    return t;
}

Outcome gradient_check() {
    constexpr int kProbes = 5;
    constexpr double kTol = 1e-4;
    constexpr double kStep = 1e-6;
    const auto corpus = fixtures::subject_separable_corpus(6);
    std::vector<std::string> texts;
    for (const auto& a : corpus.articles()) texts.push_back(a.headline);
    const EncoderSource source(EncoderSpec{}, texts);

    double worst = 0;
    int probes = 0;
    for (const std::string key : {"resnet+headline", "sre+headline"}) {
        const auto spec = ModalitySpec::parse(Task::Frame, key);
        auto ex = build_examples(corpus, ModalitySpec::parse(Task::Frame, key == "resnet+headline" ? "headline" : key));
        if (spec.has(Part::Image)) {
            for (std::size_t i = 0; i < ex.size(); ++i) ex[i].pixels = noise_image(i);
        }
        auto net = make_classifier(head_kind_for(spec), spec, source, 3);
        net->to(torch::kDouble);
        if (auto* f = dynamic_cast<FusionClassifierImpl*>(net.get())) {
            f->image_encoder->set_frozen(true);
            f->text_encoder->set_frozen(true);
        } else if (auto* s = dynamic_cast<SreTextClassifierImpl*>(net.get())) {
            s->text_encoder->set_frozen(true);
        }
        net->eval();
        std::vector<const Example*> ptrs;
        std::vector<std::int64_t> y;
        for (const auto& e : ex) {
            ptrs.push_back(&e);
            y.push_back(e.label);
        }
        const auto yt = torch::tensor(y, torch::kLong);
        auto loss = [&] { return torch::nn::functional::cross_entropy(net->forward(ptrs), yt); };
        auto params = net->trainable_parameters();
        net->zero_grad();
        loss().backward();

        std::mt19937_64 gen(11);
        int done = 0;
        for (int attempt = 0; attempt < 1000 && done < kProbes; ++attempt) {
            auto& w = params[gen() % params.size()];
            auto flat = w.view({-1});
            const auto i = static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(flat.numel()));
            const double analytic = w.grad().view({-1})[i].item<double>();
            if (std::abs(analytic) < 1e-6) continue;
            torch::NoGradGuard ng;
            const double orig = flat[i].item<double>();
            flat[i] = orig + kStep;
            const double plus = loss().item<double>();
            flat[i] = orig - kStep;
            const double minus = loss().item<double>();
            flat[i] = orig;
            const double numeric = (plus - minus) / (2 * kStep);
            worst = std::max(worst, std::abs(analytic - numeric) / std::max(std::abs(analytic), std::abs(numeric)));
            ++done;
        }
        probes += done;
    }
    return verdict(probes == 2 * kProbes && worst <= kTol,
                   std::to_string(probes) + " probes over fusion and SRE-augmented heads; max relative error " +
                       fmt("%.2e", worst));
}

// 5 -------------------------------------------------------------------------

Outcome determinism() {
    fixtures::TempDir cache("accept-images");
    auto corpus = fixtures::frame_named_corpus(24, 3);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        cv::Mat m(48, 48, CV_8UC3);
        cv::randu(m, 0, 256);
        std::vector<unsigned char> png;
        cv::imencode(".png", m, png);
        std::ofstream(image_cache_path(cache.path(), corpus.articles()[i].article_id), std::ios::binary)
            .write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
    }
    corpus = corpus.with_image_cache(cache.path());

    std::vector<std::string> same;
    bool ok = true;
    for (const std::string key : {"headline", "sre+headline", "sre", "resnet+headline"}) {
        ExperimentSpec s;
        s.modality = ModalitySpec::parse(Task::Frame, key);
        s.seeds = {0, 1};
        s.train.epochs = 2;
        s.train.learning_rate = 1e-3;
        s.train.deterministic = true;
        const auto a = nlohmann::json(run_experiment(s, corpus)).dump();
        const auto b = nlohmann::json(run_experiment(s, corpus)).dump();
        if (a == b) {
            same.push_back(key);
        } else {
            ok = false;
        }
    }
    std::string list;
    for (const auto& k : same) list += (list.empty() ? "" : ", ") + k;
    return verdict(ok, "identical reports for: " + list);
}

// 6 -------------------------------------------------------------------------

class FixedScorer : public ConcretenessScorer {
public:
    double raw_score(const std::string& w) override {
        ++calls;
        return w == "tall" ? 5.7 : w == "mall" ? 3.2 : -1.0;
    }
    int calls = 0;
};

Outcome concreteness_pipeline() {
    std::mt19937_64 gen(5);
    std::set<std::string> unique;
    while (unique.size() < 4000) {
        std::string w;
        const int len = 4 + static_cast<int>(gen() % 5);
        for (int i = 0; i < len; ++i) w += static_cast<char>('a' + gen() % 26);
        unique.insert(w);
    }
    const std::vector<std::string> words(unique.begin(), unique.end());
    EncoderSource source(EncoderSpec{}, words);
    auto enc = source.make_text();
    enc->eval();
    enc->set_frozen(true);

    std::vector<torch::Tensor> rows;
    for (const auto& w : words) rows.push_back(*word_embedding(enc, w));
    const auto E = torch::stack(rows).to(torch::kDouble);
    torch::manual_seed(5);
    const auto dir = torch::randn({E.size(1)}, torch::kDouble);
    const auto s = torch::matmul(E, dir);
    const auto rating = 1.0 + 4.0 * (s - s.min()) / (s.max() - s.min());
    ConcretenessLexicon lex;
    for (std::size_t i = 0; i < words.size(); ++i) lex.entries[words[i]] = rating[static_cast<std::int64_t>(i)].item<double>();

    RegressorConfig cfg;
    cfg.epochs = 300;
    cfg.batch_size = 64;
    cfg.patience = 40;
    const auto model = train_concreteness(lex, enc, cfg);

    FixedScorer scorer;
    const bool rules = word_concreteness(scorer, "tall", false) == 5.0 &&
                       word_concreteness(scorer, "mall", false) == 3.2 &&
                       word_concreteness(scorer, "other", false) == 1.0 &&
                       word_concreteness(scorer, "mall", true) == kNamedEntityConcreteness && scorer.calls == 3;

    return verdict(model.test_pearson >= 0.999 && rules,
                   "held-out r " + fmt("%.5f", model.test_pearson) + " on " +
                       std::to_string(model.test_words.size()) + " words; NE and clamp rules " +
                       (rules ? "exact" : "violated"));
}

// 7-10 ----------------------------------------------------------------------

struct FullScale {
    Corpus corpus;
    EncoderSpec encoders;
};

std::optional<FullScale> full_scale_inputs() {
    const char* csv = env("NEWSFRAME_CORPUS");
    const char* text = env("NEWSFRAME_TEXT_ENCODER");
    if (!csv || !text) return std::nullopt;
    FullScale f;
    f.corpus = load_corpus(csv);
    if (const char* cache = env("NEWSFRAME_IMAGE_CACHE")) f.corpus = f.corpus.with_image_cache(cache);
    f.encoders.text_id = text;
    if (const char* image = env("NEWSFRAME_IMAGE_ENCODER")) f.encoders.image_id = image;
    return f;
}

const Outcome kSkip{Status::Skip, "set NEWSFRAME_CORPUS and NEWSFRAME_TEXT_ENCODER to run"};

ExperimentSpec full_spec(const FullScale& f, Task task, Subset subset, const std::string& modality) {
    ExperimentSpec s;
    s.task = task;
    s.subset = subset;
    s.modality = ModalitySpec::parse(task, modality);
    s.encoders = f.encoders;
    return s;
}

Outcome within(double got, double want, double tol, const std::string& what) {
    return verdict(std::abs(got - want) <= tol,
                   what + " " + fmt("%.2f", got) + " (target " + fmt("%.1f", want) + " +/- " + fmt("%.1f", tol) + ")");
}

Outcome full_headline(const std::optional<FullScale>& f) {
    if (!f) return kSkip;
    const auto r = run_experiment(full_spec(*f, Task::Frame, Subset::All, "headline"), f->corpus);
    return within(100.0 * r.mean_accuracy, 81.9, 2.0, "headline, all articles:");
}

Outcome full_headline_api(const std::optional<FullScale>& f) {
    if (!f) return kSkip;
    const auto r = run_experiment(full_spec(*f, Task::Frame, Subset::RelevantOnly, "headline+api"), f->corpus);
    const double acc = 100.0 * r.mean_accuracy;
    const double politics = 100.0 * r.per_class.at(0).f1;
    const bool ok = std::abs(acc - 87.0) <= 2.5 && std::abs(politics - 96.6) <= 3.0;
    return verdict(ok, "headline+api, relevant: " + fmt("%.2f", acc) + " (87.0 +/- 2.5); Politics F1 " +
                           fmt("%.2f", politics) + " (96.6 +/- 3.0)");
}

Outcome full_relevance(const std::optional<FullScale>& f) {
    if (!f) return kSkip;
    const auto with = run_relevance(full_spec(*f, Task::Relevance, Subset::All, "headline+api"), true, f->corpus);
    const auto sre = run_relevance(full_spec(*f, Task::Relevance, Subset::All, "sre"), false, f->corpus);
    const double a = 100.0 * with.mean_accuracy;
    const double b = 100.0 * sre.mean_accuracy;
    return verdict(std::abs(a - 74.2) <= 3.0 && std::abs(b - 68.1) <= 3.0,
                   "headline+api+frame " + fmt("%.2f", a) + " (74.2 +/- 3.0); sre " + fmt("%.2f", b) +
                       " (68.1 +/- 3.0)");
}

Outcome full_concreteness(const std::optional<FullScale>& f) {
    const char* lexicon = env("NEWSFRAME_LEXICON");
    if (!f || !lexicon) return {Status::Skip, "set NEWSFRAME_CORPUS, NEWSFRAME_TEXT_ENCODER and NEWSFRAME_LEXICON to run"};
    EncoderSource source(f->encoders, {});
    auto enc = source.make_text();
    enc->eval();
    enc->set_frozen(true);
    const auto model = train_concreteness(load_lexicon(lexicon), enc, RegressorConfig{});
    ModelScorer scorer(model, enc);
    const auto conc = frame_concreteness(f->corpus, scorer, CapitalizationTagger{});
    const auto report = correlation_report(corpus_stats(f->corpus), conc, {});
    const auto& r = report.correlations.front().r;
    const bool ok = model.test_pearson >= 0.93 && r && std::abs(*r - 0.69) <= 0.1;
    return verdict(ok, "regressor r " + fmt("%.4f", model.test_pearson) + " (>= 0.93); concreteness vs ratio r " +
                           (r ? fmt("%.3f", *r) : std::string("n/a")) + " (0.69 +/- 0.1)");
}

}  // namespace

int main() {
    seed_everything(0, true);
    const auto full = full_scale_inputs();
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;  // 0: none
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "metric oracles", 60, metric_oracles},
        {2, "encoding invariants", 60, encoding_invariants},
        {3, "synthetic end-to-end", 1200, synthetic_end_to_end},
        {4, "gradient check", 300, gradient_check},
        {5, "determinism", 0, determinism},
        {6, "concreteness pipeline", 0, concreteness_pipeline},
        {7, "full scale: headline frame accuracy", 0, [&] { return full_headline(full); }},
        {8, "full scale: headline+api relevant", 0, [&] { return full_headline_api(full); }},
        {9, "full scale: relevance", 0, [&] { return full_relevance(full); }},
        {10, "full scale: concreteness", 0, [&] { return full_concreteness(full); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Status::Fail, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.status == Status::Pass && c.limit_seconds > 0 && secs > c.limit_seconds) {
            o.status = Status::Fail;
            o.detail += "; over the " + fmt("%.0f", c.limit_seconds) + " s budget";
        }
        const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Skip ? "SKIP" : "FAIL";
        failed += o.status == Status::Fail;
        std::printf("%s [%d] %s: %s (%.1f s)\n", tag, c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
