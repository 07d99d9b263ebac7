#include "newsframe/experiment.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "newsframe/errors.hpp"

namespace newsframe {

namespace fs = std::filesystem;

std::string to_string(Subset s) { return s == Subset::All ? "all" : "relevant"; }

Subset subset_from_string(const std::string& s) {
    if (s == "all") return Subset::All;
    if (s == "relevant" || s == "relevant_only") return Subset::RelevantOnly;
    throw UsageError("unknown subset '" + s + "' (expected all or relevant)");
}

std::vector<std::uint64_t> default_seeds() {
    std::vector<std::uint64_t> s(25);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
    return s;
}

void ExperimentSpec::validate() const {
    if (modality.task != task) throw UsageError("modality was parsed for a different task");
    if (modality.parts.empty()) throw UsageError("empty modality");
    if (folds < 2) throw UsageError("need at least 2 folds, got " + std::to_string(folds));
    if (seeds.empty()) throw UsageError("no seeds given");
    if (std::set(seeds.begin(), seeds.end()).size() != seeds.size()) throw UsageError("seeds repeat");
    if (val_fraction < 0.0 || val_fraction >= 1.0) throw UsageError("validation fraction must be in [0, 1)");
    if (train.epochs < 1) throw UsageError("epochs must be positive");
    if (train.batch_size < 1) throw UsageError("batch size must be positive");
    if (task == Task::Relevance && subset == Subset::RelevantOnly && !allow_degenerate_subset) {
        throw UsageError("the relevance task on the relevant subset has one class; pass the override to run it anyway");
    }
    head_kind_for(modality);
}

void to_json(nlohmann::json& j, const ExperimentSpec& s) {
    j = nlohmann::json{{"task", to_string(s.task)},
                       {"subset", to_string(s.subset)},
                       {"modality", s.modality.key()},
                       {"head", to_string(head_kind_for(s.modality))},
                       {"folds", s.folds},
                       {"fold_seed", s.fold_seed},
                       {"stratify_by", to_string(s.stratify_by())},
                       {"seeds", s.seeds},
                       {"train_config", s.train},
                       {"encoders", s.encoders},
                       {"val_fraction", s.val_fraction},
                       {"allow_degenerate_subset", s.allow_degenerate_subset}};
}

void from_json(const nlohmann::json& j, ExperimentSpec& s) {
    s.task = task_from_string(j.at("task").get<std::string>());
    s.subset = subset_from_string(j.at("subset").get<std::string>());
    s.modality = ModalitySpec::parse(s.task, j.at("modality").get<std::string>());
    s.folds = j.at("folds").get<int>();
    s.fold_seed = j.at("fold_seed").get<std::uint64_t>();
    s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    s.train = j.at("train_config").get<TrainConfig>();
    s.encoders = j.at("encoders").get<EncoderSpec>();
    s.val_fraction = j.value("val_fraction", 0.1);
    s.allow_degenerate_subset = j.value("allow_degenerate_subset", false);
}

void to_json(nlohmann::json& j, const RunResult& r) {
    j = nlohmann::json{{"fold", r.key.fold},     {"seed", r.key.seed},     {"accuracy", r.accuracy},
                       {"n_train", r.n_train},   {"n_val", r.n_val},       {"n_test", r.gold.size()},
                       {"best_epoch", r.best_epoch}, {"log", r.log},       {"article_ids", r.article_ids},
                       {"gold", r.gold},         {"pred", r.pred},         {"warnings", r.warnings}};
}

void from_json(const nlohmann::json& j, RunResult& r) {
    r.key.fold = j.at("fold").get<int>();
    r.key.seed = j.at("seed").get<std::uint64_t>();
    r.accuracy = j.at("accuracy").get<double>();
    r.n_train = j.at("n_train").get<int>();
    r.n_val = j.at("n_val").get<int>();
    r.best_epoch = j.at("best_epoch").get<int>();
    r.log.clear();
    for (const auto& e : j.at("log")) {
        r.log.push_back(
            {e.at("epoch").get<int>(), e.at("train_loss").get<double>(), e.at("val_accuracy").get<double>()});
    }
    r.article_ids = j.at("article_ids").get<std::vector<std::string>>();
    r.gold = j.at("gold").get<std::vector<int>>();
    r.pred = j.at("pred").get<std::vector<int>>();
    r.warnings = j.value("warnings", std::vector<std::string>{});
    if (r.gold.size() != r.pred.size() || r.gold.size() != r.article_ids.size()) {
        throw DataError("run fold " + std::to_string(r.key.fold) + " seed " + std::to_string(r.key.seed) +
                        " has mismatched prediction lists");
    }
}

ExperimentData prepare_experiment(const ExperimentSpec& spec, const Corpus& corpus) {
    spec.validate();
    ExperimentData d;
    d.spec = spec;
    d.corpus = spec.subset == Subset::RelevantOnly ? corpus.relevant_only() : corpus;
    if (d.corpus.empty()) throw DataError("the " + to_string(spec.subset) + " subset is empty");
    if (static_cast<int>(d.corpus.size()) < spec.folds) {
        throw DataError("corpus has " + std::to_string(d.corpus.size()) + " articles, fewer than " +
                        std::to_string(spec.folds) + " folds");
    }
    d.examples = build_examples(d.corpus, spec.modality);
    d.plan = make_folds(d.corpus, spec.folds, spec.stratify_by(), spec.fold_seed);
    for (const auto& e : d.examples) {
        if (!e.text.empty()) d.vocab_texts.push_back(e.text);
    }
    return d;
}

std::vector<RunKey> plan_runs(const ExperimentSpec& spec) {
    std::vector<RunKey> keys;
    for (int f = 0; f < spec.folds; ++f) {
        for (auto s : spec.seeds) keys.push_back({f, s});
    }
    return keys;
}

RunResult execute_run(const ExperimentData& data, const RunKey& key, const EncoderSource& source,
                      const std::optional<fs::path>& model_dir) {
    const auto& spec = data.spec;
    std::vector<std::size_t> rest, test;
    for (std::size_t i = 0; i < data.examples.size(); ++i) {
        (data.plan.fold_of(data.examples[i].article_id) == key.fold ? test : rest).push_back(i);
    }
    if (test.empty()) throw DataError("fold " + std::to_string(key.fold) + " is empty");

    std::vector<int> rest_labels;
    for (auto i : rest) rest_labels.push_back(data.examples[i].label);
    const auto [train_pos, val_pos] = stratified_holdout(rest_labels, spec.val_fraction, key.seed);

    std::vector<Example> train_set, val_set, test_set;
    for (auto p : train_pos) train_set.push_back(data.examples[rest[p]]);
    for (auto p : val_pos) val_set.push_back(data.examples[rest[p]]);
    for (auto i : test) test_set.push_back(data.examples[i]);

    auto cfg = spec.train;
    cfg.seed = key.seed;
    const auto context = "fold " + std::to_string(key.fold) + ", seed " + std::to_string(key.seed);
    TrainedModel model;
    try {
        model = train(head_kind_for(spec.modality), spec.modality, train_set, val_set, cfg, source);
    } catch (const TrainingError& e) {
        throw TrainingError(context + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(context + ": " + e.what());
    }

    RunResult r;
    r.key = key;
    r.n_train = static_cast<int>(train_set.size());
    r.n_val = static_cast<int>(val_set.size());
    r.best_epoch = model.best_epoch;
    r.log = model.log;
    r.warnings = model.warnings;
    const auto preds = predict(model, test_set);
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        r.article_ids.push_back(test_set[i].article_id);
        r.gold.push_back(test_set[i].label);
        r.pred.push_back(preds[i].label);
    }
    r.accuracy = micro_accuracy(r.gold, r.pred);
    if (model_dir) {
        save_model(model, *model_dir,
                   {{"fold", key.fold}, {"test_accuracy", r.accuracy}, {"experiment", spec}});
    }
    return r;
}

EvalReport assemble_report(const ExperimentSpec& spec, int n_articles, std::vector<int> fold_sizes,
                           std::vector<std::string> fold_warnings, std::vector<RunResult> runs) {
    const auto keys = plan_runs(spec);
    std::vector<RunResult> ordered;
    ordered.reserve(keys.size());
    for (const auto& k : keys) {
        auto it = std::find_if(runs.begin(), runs.end(), [&](const RunResult& r) { return r.key == k; });
        if (it == runs.end()) {
            throw UsageError("missing run for fold " + std::to_string(k.fold) + ", seed " + std::to_string(k.seed));
        }
        if (std::count_if(runs.begin(), runs.end(), [&](const RunResult& r) { return r.key == k; }) > 1) {
            throw UsageError("duplicate run for fold " + std::to_string(k.fold) + ", seed " + std::to_string(k.seed));
        }
        ordered.push_back(std::move(*it));
    }
    if (ordered.size() != runs.size()) throw UsageError("report contains runs outside the experiment plan");

    EvalReport rep;
    rep.spec = spec;
    rep.n_articles = n_articles;
    rep.fold_sizes = std::move(fold_sizes);
    rep.fold_warnings = std::move(fold_warnings);
    rep.runs = std::move(ordered);

    std::vector<double> acc;
    std::vector<int> gold, pred;
    for (const auto& r : rep.runs) {
        acc.push_back(r.accuracy);
        gold.insert(gold.end(), r.gold.begin(), r.gold.end());
        pred.insert(pred.end(), r.pred.begin(), r.pred.end());
    }
    rep.mean_accuracy = mean(acc);
    rep.std_accuracy = stddev(acc);
    const int C = num_classes(spec.task);
    for (int c = 0; c < C; ++c) rep.per_class.push_back(per_class_f1(gold, pred, c));
    rep.confusion = confusion_matrix(gold, pred, C);

    const auto first_seed = spec.seeds.front();
    for (const auto& r : rep.runs) {
        if (r.key.seed != first_seed) continue;
        for (std::size_t i = 0; i < r.gold.size(); ++i) {
            if (r.gold[i] != r.pred[i]) {
                rep.misclassified.push_back(
                    {r.article_ids[i], class_id(spec.task, r.gold[i]), class_id(spec.task, r.pred[i])});
            }
        }
    }
    return rep;
}

EvalReport assemble_report(const ExperimentData& data, std::vector<RunResult> runs) {
    std::vector<int> sizes(static_cast<std::size_t>(data.spec.folds), 0);
    for (const auto& [id, f] : data.plan.assignments) ++sizes[static_cast<std::size_t>(f)];
    return assemble_report(data.spec, static_cast<int>(data.corpus.size()), sizes, data.plan.warnings,
                           std::move(runs));
}

void to_json(nlohmann::json& j, const EvalReport& r) {
    const int C = num_classes(r.spec.task);
    nlohmann::json per_class = nlohmann::json::array();
    for (int c = 0; c < C; ++c) {
        const auto& s = r.per_class[static_cast<std::size_t>(c)];
        per_class.push_back({{"class_id", class_id(r.spec.task, c)},
                             {"name", class_name(r.spec.task, c)},
                             {"f1", s.f1},
                             {"precision", s.precision},
                             {"recall", s.recall},
                             {"defined", s.defined},
                             {"support", s.support}});
    }
    nlohmann::json mis = nlohmann::json::array();
    for (const auto& m : r.misclassified) {
        mis.push_back({{"article_id", m.article_id}, {"gold", m.gold}, {"predicted", m.pred}});
    }
    j = nlohmann::json{{"schema", kReportSchema},
                       {"experiment", r.spec},
                       {"corpus_checksum", r.corpus_checksum},
                       {"n_articles", r.n_articles},
                       {"fold_sizes", r.fold_sizes},
                       {"fold_warnings", r.fold_warnings},
                       {"aggregate",
                        {{"mean_accuracy", r.mean_accuracy},
                         {"std_accuracy", r.std_accuracy},
                         {"n_runs", r.runs.size()}}},
                       {"per_class", per_class},
                       {"confusion", r.confusion},
                       {"misclassified_first_seed", mis},
                       {"runs", r.runs}};
}

EvalReport report_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != kReportSchema) {
        throw DataError("not an evaluation report (schema '" + j.value("schema", "") + "')");
    }
    auto rep = assemble_report(j.at("experiment").get<ExperimentSpec>(), j.at("n_articles").get<int>(),
                               j.at("fold_sizes").get<std::vector<int>>(),
                               j.value("fold_warnings", std::vector<std::string>{}),
                               j.at("runs").get<std::vector<RunResult>>());
    rep.corpus_checksum = j.value("corpus_checksum", "");
    return rep;
}

EvalReport run_experiment(const ExperimentSpec& spec, const Corpus& corpus, const std::optional<fs::path>& model_root,
                          const RunCallback& on_run) {
    const auto data = prepare_experiment(spec, corpus);
    EncoderSource source(spec.encoders, data.vocab_texts);
    std::vector<RunResult> runs;
    for (const auto& key : plan_runs(spec)) {
        std::optional<fs::path> dir;
        if (model_root) {
            dir = *model_root / ("fold" + std::to_string(key.fold) + "_seed" + std::to_string(key.seed));
        }
        runs.push_back(execute_run(data, key, source, dir));
        if (on_run) on_run(runs.back());
    }
    return assemble_report(data, std::move(runs));
}

EvalReport run_relevance(ExperimentSpec spec, bool with_frame_label, const Corpus& corpus,
                         const std::optional<fs::path>& model_root, const RunCallback& on_run) {
    if (spec.task != Task::Relevance) throw UsageError("run_relevance needs the relevance task");
    for (const auto& a : corpus.articles()) {
        if (!corpus.image_for(a.article_id)) {
            throw DataError("article " + a.article_id + " has no image record with a relevance label");
        }
    }
    if (with_frame_label && !spec.modality.has(Part::FrameLabel)) spec.modality.parts.push_back(Part::FrameLabel);
    if (!with_frame_label && spec.modality.has(Part::FrameLabel)) {
        std::erase(spec.modality.parts, Part::FrameLabel);
    }
    return run_experiment(spec, corpus, model_root, on_run);
}

double constant_baseline(const Corpus& corpus, Task task) {
    if (corpus.empty()) throw DataError("empty corpus");
    std::vector<int> counts(static_cast<std::size_t>(num_classes(task)), 0);
    for (const auto& a : corpus.articles()) {
        ++counts[static_cast<std::size_t>(class_index(task, a, corpus.image_for(a.article_id)))];
    }
    const int best = *std::max_element(counts.begin(), counts.end());
    return static_cast<double>(best) / static_cast<double>(corpus.size());
}

}  // namespace newsframe
