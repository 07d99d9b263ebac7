// newsframe: corpus ingestion, image fetching, cross-validated training,
// concreteness analysis and report emission.

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <c10/util/Exception.h>
#include <nlohmann/json.hpp>

#include "newsframe/concreteness.hpp"
#include "newsframe/corpus.hpp"
#include "newsframe/errors.hpp"
#include "newsframe/experiment.hpp"
#include "newsframe/fetch.hpp"
#include "newsframe/manifest.hpp"
#include "newsframe/report.hpp"
#include "newsframe/stats.hpp"

extern char** environ;

namespace fs = std::filesystem;
using nlohmann::json;
using namespace newsframe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTraining = 3;

constexpr const char* kCorpusFile = "corpus.csv";
constexpr const char* kReportFile = "report.json";
constexpr const char* kCacheEnv = "NEWSFRAME_CACHE";

struct Store {
    Corpus corpus;
    std::string checksum;
    fs::path file;
};

/// A corpus store is a directory holding corpus.csv, or the CSV itself.
Store open_store(const fs::path& p) {
    Store s;
    s.file = fs::is_directory(p) ? p / kCorpusFile : p;
    if (!fs::exists(s.file)) throw DataError("no corpus at " + s.file.string() + "; run ingest first");
    s.corpus = load_corpus(s.file);
    s.checksum = file_sha256(s.file);
    return s;
}

fs::path cache_dir_or_default(const std::string& flag, const fs::path& corpus_dir) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
    return (fs::is_directory(corpus_dir) ? corpus_dir : corpus_dir.parent_path()) / "images";
}

void write_json(const fs::path& path, const json& j) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

RunManifest start_manifest(const std::string& command, const std::vector<std::string>& argv) {
    RunManifest m;
    m.command = command;
    m.argv = argv;
    m.started_at = utc_now();
    return m;
}

// ---- train ----

struct TrainArgs {
    std::string corpus;
    std::string cache;
    std::string task = "frame";
    std::string modality;
    std::string subset = "all";
    int folds = 4;
    int seeds = 25;
    std::vector<std::uint64_t> seed_list;
    std::uint64_t fold_seed = 0;
    int epochs = 10;
    int batch_size = 4;
    double lr = 2e-5;
    double weight_decay = 0.01;
    std::string loss = "cross_entropy";
    double focal_gamma = 2.0;
    int patience = 5;
    bool deterministic = true;
    bool unfreeze_text = false;
    std::string text_encoder = EncoderSpec{}.text_id;
    std::string image_encoder = EncoderSpec{}.image_id;
    std::int64_t max_len = 0;
    std::uint64_t init_seed = 0;
    double val_fraction = 0.1;
    bool allow_degenerate = false;
    int workers = 1;
    bool save_models = false;
    std::string out;
};

ExperimentSpec spec_from(const TrainArgs& a) {
    ExperimentSpec s;
    s.task = task_from_string(a.task);
    s.subset = subset_from_string(a.subset);
    s.modality = ModalitySpec::parse(s.task, a.modality);
    s.folds = a.folds;
    s.fold_seed = a.fold_seed;
    if (!a.seed_list.empty()) {
        s.seeds = a.seed_list;
    } else {
        if (a.seeds < 1) throw UsageError("--seeds must be positive");
        s.seeds.clear();
        for (int i = 0; i < a.seeds; ++i) s.seeds.push_back(static_cast<std::uint64_t>(i));
    }
    s.train.epochs = a.epochs;
    s.train.batch_size = a.batch_size;
    s.train.learning_rate = a.lr;
    s.train.weight_decay = a.weight_decay;
    s.train.loss = a.loss == "focal" ? LossKind::Focal : LossKind::CrossEntropy;
    s.train.focal_gamma = a.focal_gamma;
    s.train.early_stop_patience = a.patience;
    s.train.deterministic = a.deterministic;
    s.train.freeze_text_in_fusion = !a.unfreeze_text;
    s.encoders.text_id = a.text_encoder;
    s.encoders.image_id = a.image_encoder;
    s.encoders.max_len = a.max_len;
    s.encoders.init_seed = a.init_seed;
    s.val_fraction = a.val_fraction;
    s.allow_degenerate_subset = a.allow_degenerate;
    s.validate();
    return s;
}

Corpus corpus_for(const Store& store, const ExperimentSpec& spec, const fs::path& cache) {
    return spec.modality.has(Part::Image) ? store.corpus.with_image_cache(cache) : store.corpus;
}

std::string run_name(const RunKey& k) { return "fold" + std::to_string(k.fold) + "_seed" + std::to_string(k.seed); }

/// Runs every planned (fold, seed) in worker processes, at most `workers`
/// at a time, each writing its RunResult JSON into runs_dir.
std::vector<RunResult> run_in_workers(const fs::path& spec_file, const fs::path& corpus, const fs::path& cache,
                                      const fs::path& runs_dir, const std::optional<fs::path>& models,
                                      const std::vector<RunKey>& keys, int workers) {
    const auto self = fs::read_symlink("/proc/self/exe").string();
    std::deque<RunKey> pending(keys.begin(), keys.end());
    std::map<pid_t, RunKey> running;
    int worst = kExitOk;
    std::string failed;
    auto launch = [&](const RunKey& k) {
        std::vector<std::string> args{self,
                                      "run-one",
                                      "--spec",
                                      spec_file.string(),
                                      "--corpus",
                                      corpus.string(),
                                      "--cache",
                                      cache.string(),
                                      "--fold",
                                      std::to_string(k.fold),
                                      "--seed",
                                      std::to_string(k.seed),
                                      "--out",
                                      (runs_dir / (run_name(k) + ".json")).string()};
        if (models) {
            args.push_back("--model-dir");
            args.push_back((*models / run_name(k)).string());
        }
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);
        pid_t pid = 0;
        if (posix_spawn(&pid, self.c_str(), nullptr, nullptr, argv.data(), environ) != 0) {
            throw std::runtime_error("cannot start worker process");
        }
        running.emplace(pid, k);
    };
    while (!pending.empty() || !running.empty()) {
        while (!pending.empty() && static_cast<int>(running.size()) < workers && worst == kExitOk) {
            launch(pending.front());
            pending.pop_front();
        }
        if (running.empty()) break;
        int status = 0;
        const pid_t pid = wait(&status);
        if (pid < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error("wait failed");
        }
        auto it = running.find(pid);
        if (it == running.end()) continue;
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : kExitTraining;
        if (code != kExitOk && worst == kExitOk) {
            worst = code;
            failed = run_name(it->second);
        }
        running.erase(it);
    }
    if (worst == kExitData) throw DataError("worker for " + failed + " failed");
    if (worst == kExitUsage) throw UsageError("worker for " + failed + " rejected its arguments");
    if (worst != kExitOk) throw TrainingError("worker for " + failed + " failed");

    std::vector<RunResult> runs;
    for (const auto& k : keys) runs.push_back(read_json(runs_dir / (run_name(k) + ".json")).get<RunResult>());
    return runs;
}

int cmd_train(const TrainArgs& a, const std::vector<std::string>& argv) {
    auto manifest = start_manifest("train", argv);
    const auto spec = spec_from(a);
    const auto store = open_store(a.corpus);
    const auto cache = cache_dir_or_default(a.cache, a.corpus);
    const fs::path out = a.out;
    fs::create_directories(out);

    const auto data = prepare_experiment(spec, corpus_for(store, spec, cache));
    const auto keys = plan_runs(spec);
    const auto runs_dir = out / "runs";
    fs::create_directories(runs_dir);
    std::optional<fs::path> models;
    if (a.save_models) models = out / "models";

    std::vector<RunResult> runs;
    if (a.workers <= 1) {
        EncoderSource source(spec.encoders, data.vocab_texts);
        for (const auto& k : keys) {
            std::optional<fs::path> dir;
            if (models) dir = *models / run_name(k);
            runs.push_back(execute_run(data, k, source, dir));
            write_json(runs_dir / (run_name(k) + ".json"), runs.back());
            std::cerr << run_name(k) << ": accuracy " << runs.back().accuracy << '\n';
        }
    } else {
        const auto spec_file = runs_dir / "experiment.json";
        write_json(spec_file, spec);
        runs = run_in_workers(spec_file, store.file, cache, runs_dir, models, keys, a.workers);
    }

    auto report = assemble_report(data, std::move(runs));
    report.corpus_checksum = store.checksum;
    write_json(out / kReportFile, report);

    manifest.config = spec;
    manifest.config["workers"] = a.workers;
    manifest.config["corpus"] = store.file.string();
    manifest.config["cache"] = cache.string();
    manifest.corpus_checksum = store.checksum;
    manifest.encoders = {spec.encoders.text_id, spec.encoders.image_id};
    manifest.seeds = spec.seeds;
    manifest.outputs = {(out / kReportFile).string(), runs_dir.string()};
    if (models) manifest.outputs.push_back(models->string());
    manifest.finished_at = utc_now();
    write_manifest(out, manifest);
    std::cout << spec.modality.key() << " (" << to_string(spec.subset) << "): mean accuracy "
              << report.mean_accuracy << " +/- " << report.std_accuracy << " over " << report.runs.size()
              << " runs\n";
    return kExitOk;
}

struct RunOneArgs {
    std::string spec, corpus, cache, out, model_dir;
    int fold = 0;
    std::uint64_t seed = 0;
};

int cmd_run_one(const RunOneArgs& a) {
    const auto spec = read_json(a.spec).get<ExperimentSpec>();
    const auto store = open_store(a.corpus);
    const auto data = prepare_experiment(spec, corpus_for(store, spec, a.cache));
    EncoderSource source(spec.encoders, data.vocab_texts);
    std::optional<fs::path> dir;
    if (!a.model_dir.empty()) dir = a.model_dir;
    const auto r = execute_run(data, {a.fold, a.seed}, source, dir);
    write_json(a.out, r);
    return kExitOk;
}

// ---- ingest / fetch ----

int cmd_ingest(const std::string& data, const std::string& out_dir, const std::vector<std::string>& argv) {
    auto manifest = start_manifest("ingest", argv);
    const auto corpus = load_corpus(data);
    const fs::path out = out_dir;
    fs::create_directories(out);
    save_corpus(out / kCorpusFile, corpus);
    const auto stats = corpus_stats(corpus);
    write_json(out / "stats.json", stats);
    manifest.config = {{"data", data}, {"out", out_dir}, {"schema", kSchemaVersion}};
    manifest.corpus_checksum = file_sha256(out / kCorpusFile);
    manifest.outputs = {(out / kCorpusFile).string(), (out / "stats.json").string()};
    manifest.finished_at = utc_now();
    write_manifest(out, manifest);
    std::cout << corpus.size() << " articles, " << corpus.images().size() << " image records, "
              << stats.total_relevant << " relevant (" << stats.overall_percent << "%)\n";
    return kExitOk;
}

int cmd_fetch(const std::string& corpus_dir, const std::string& cache_flag, double timeout, int retries,
              int concurrency, const std::vector<std::string>& argv) {
    auto manifest = start_manifest("fetch", argv);
    const auto store = open_store(corpus_dir);
    FetchOptions opts;
    opts.cache_dir = cache_dir_or_default(cache_flag, corpus_dir);
    opts.timeout_seconds = timeout;
    opts.retries = retries;
    opts.max_concurrency = concurrency;
    auto records = store.corpus.images();
    const auto report = fetch_images(records, opts);
    write_json(opts.cache_dir / "fetch_report.json", report);
    manifest.config = {{"corpus", store.file.string()},
                       {"cache", opts.cache_dir.string()},
                       {"timeout_seconds", timeout},
                       {"retries", retries},
                       {"max_concurrency", concurrency}};
    manifest.corpus_checksum = store.checksum;
    manifest.outputs = {(opts.cache_dir / "fetch_report.json").string()};
    manifest.finished_at = utc_now();
    write_manifest(opts.cache_dir, manifest);
    const auto total = report.fetched + report.cached + report.failed;
    std::cout << report.fetched << " fetched, " << report.cached << " cached, " << report.failed << " failed of "
              << total << '\n';
    if (total > 0 && (report.fetched + report.cached) * 10 < total * 9) {
        std::cerr << "warning: fewer than 90% of images are available; image results are not comparable\n";
    }
    return kExitOk;
}

// ---- report / concreteness ----

std::vector<EvalReport> load_reports(const std::vector<std::string>& dirs, std::string& checksum) {
    std::vector<EvalReport> reports;
    checksum.clear();
    for (const auto& d : dirs) {
        const auto m = read_manifest(d);
        auto r = report_from_json(read_json(fs::path(d) / kReportFile));
        if (r.corpus_checksum != m.corpus_checksum) {
            throw DataError(d + ": report and manifest disagree on the corpus checksum");
        }
        if (checksum.empty()) {
            checksum = r.corpus_checksum;
        } else if (r.corpus_checksum != checksum) {
            throw DataError(d + " was trained on a different corpus (checksum " + r.corpus_checksum + " vs " +
                            checksum + ")");
        }
        reports.push_back(std::move(r));
    }
    return reports;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& format, const std::string& out_dir,
               const std::vector<std::string>& argv) {
    auto manifest = start_manifest("report", argv);
    const auto fmt = report_format_from_string(format);
    std::string checksum;
    const auto reports = load_reports(runs, checksum);
    const auto files = emit_report(reports, fmt, out_dir);
    manifest.config = {{"runs", runs}, {"format", format}, {"out", out_dir}};
    manifest.corpus_checksum = checksum;
    for (const auto& r : reports) {
        for (const auto& id : {r.spec.encoders.text_id, r.spec.encoders.image_id}) {
            if (std::find(manifest.encoders.begin(), manifest.encoders.end(), id) == manifest.encoders.end()) {
                manifest.encoders.push_back(id);
            }
        }
    }
    for (const auto& f : files) manifest.outputs.push_back(f.string());
    manifest.finished_at = utc_now();
    write_manifest(out_dir, manifest);
    for (const auto& f : files) std::cout << f.string() << '\n';
    return kExitOk;
}

struct ConcretenessArgs {
    std::string lexicon, corpus, out, gazetteer;
    std::string text_encoder = "builtin:bert-tiny";
    std::uint64_t init_seed = 0;
    std::vector<std::string> runs;
    bool exclude_stopwords = false;
    RegressorConfig regressor;
};

int cmd_concreteness(const ConcretenessArgs& a, const std::vector<std::string>& argv) {
    auto manifest = start_manifest("concreteness", argv);
    const auto lexicon = load_lexicon(a.lexicon);
    const auto store = open_store(a.corpus);
    std::string checksum;
    const auto reports = load_reports(a.runs, checksum);
    if (!checksum.empty() && checksum != store.checksum) {
        throw DataError("the evaluation runs were trained on a different corpus than " + store.file.string());
    }

    std::vector<std::string> vocab;
    for (const auto& [w, r] : lexicon.entries) vocab.push_back(w);
    for (const auto& art : store.corpus.articles()) vocab.push_back(art.headline);
    EncoderSpec es;
    es.text_id = a.text_encoder;
    es.init_seed = a.init_seed;
    EncoderSource source(es, vocab);
    auto encoder = source.make_text();
    encoder->set_frozen(true);

    const auto model = train_concreteness(lexicon, encoder, a.regressor);
    const fs::path out = a.out;
    save_concreteness_model(model, out / "regressor");

    std::vector<std::shared_ptr<const NeTagger>> taggers{std::make_shared<CapitalizationTagger>()};
    if (!a.gazetteer.empty()) {
        taggers.push_back(std::make_shared<GazetteerTagger>(GazetteerTagger::from_file(a.gazetteer)));
    }
    UnionTagger tagger(taggers);
    ModelScorer scorer(model, encoder);
    const auto fc = frame_concreteness(store.corpus, scorer, tagger, {a.exclude_stopwords});
    const auto corr = correlation_report(corpus_stats(store.corpus), fc, reports);

    json j = corr;
    j["regressor"] = {{"test_pearson", std::isnan(model.test_pearson) ? json() : json(model.test_pearson)},
                      {"lexicon_size", lexicon.size()},
                      {"skipped_words", model.skipped},
                      {"encoder", model.encoder_id}};
    j["ne_tagger"] = tagger.name();
    j["exclude_stopwords"] = a.exclude_stopwords;
    write_json(out / "correlation.json", j);
    {
        std::ofstream svg(out / "concreteness.svg");
        svg << render_concreteness_chart(corr);
    }
    manifest.config = {{"lexicon", a.lexicon},        {"corpus", store.file.string()},
                       {"runs", a.runs},              {"regressor", a.regressor},
                       {"ne_tagger", tagger.name()},  {"gazetteer", a.gazetteer},
                       {"exclude_stopwords", a.exclude_stopwords}, {"init_seed", a.init_seed}};
    manifest.corpus_checksum = store.checksum;
    manifest.encoders = {a.text_encoder};
    manifest.seeds = {a.regressor.seed};
    manifest.outputs = {(out / "regressor").string(), (out / "correlation.json").string(),
                        (out / "concreteness.svg").string()};
    manifest.finished_at = utc_now();
    write_manifest(out, manifest);
    std::cout << "held-out pearson r " << model.test_pearson << '\n';
    for (const auto& c : corr.correlations) {
        std::cout << c.name << ": " << (c.r ? std::to_string(*c.r) : std::string("n/a")) << " (published "
                  << c.reference << ")\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Multimodal news frame classification toolkit"};
    app.require_subcommand(1);

    std::string data, out, corpus, cache;
    auto* ingest = app.add_subcommand("ingest", "Validate a corpus CSV and store it");
    ingest->add_option("--data", data, "Corpus CSV")->required()->check(CLI::ExistingFile);
    ingest->add_option("--out", out, "Store directory")->required();

    double timeout = 20.0;
    int retries = 2, concurrency = 4;
    auto* fetch = app.add_subcommand("fetch", "Download lead images into the cache");
    fetch->add_option("--corpus", corpus, "Corpus store")->required();
    fetch->add_option("--cache", cache, std::string("Image cache (default $") + kCacheEnv + " or <corpus>/images)");
    fetch->add_option("--timeout", timeout, "Per-request timeout in seconds")->check(CLI::PositiveNumber);
    fetch->add_option("--retries", retries, "Extra attempts per image")->check(CLI::NonNegativeNumber);
    fetch->add_option("--concurrency", concurrency, "Simultaneous downloads")->check(CLI::PositiveNumber);

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Cross-validated training and evaluation");
    train->add_option("--corpus", ta.corpus, "Corpus store")->required();
    train->add_option("--cache", ta.cache, "Image cache");
    train->add_option("--task", ta.task, "frame or relevance")->check(CLI::IsMember({"frame", "relevance"}));
    train->add_option("--modality", ta.modality, "Modality key, e.g. headline+api")->required();
    train->add_option("--subset", ta.subset, "all or relevant")->check(CLI::IsMember({"all", "relevant"}));
    train->add_option("--folds", ta.folds, "Number of folds")->check(CLI::Range(2, 100));
    train->add_option("--seeds", ta.seeds, "Use seeds 0..N-1");
    train->add_option("--seed-list", ta.seed_list, "Explicit seeds")->delimiter(',');
    train->add_option("--fold-seed", ta.fold_seed, "Seed of the fold assignment");
    train->add_option("--epochs", ta.epochs)->check(CLI::PositiveNumber);
    train->add_option("--batch-size", ta.batch_size)->check(CLI::PositiveNumber);
    train->add_option("--lr", ta.lr)->check(CLI::PositiveNumber);
    train->add_option("--weight-decay", ta.weight_decay)->check(CLI::NonNegativeNumber);
    train->add_option("--loss", ta.loss)->check(CLI::IsMember({"cross_entropy", "focal"}));
    train->add_option("--focal-gamma", ta.focal_gamma)->check(CLI::NonNegativeNumber);
    train->add_option("--patience", ta.patience, "Fusion early stopping patience")->check(CLI::PositiveNumber);
    train->add_flag("--deterministic,!--no-deterministic", ta.deterministic, "Deterministic kernels (default on)");
    train->add_flag("--unfreeze-text", ta.unfreeze_text, "Keep training the text encoder inside fusion models");
    train->add_option("--text-encoder", ta.text_encoder, "Text encoder identifier or directory");
    train->add_option("--image-encoder", ta.image_encoder, "Image encoder identifier or directory");
    train->add_option("--max-len", ta.max_len, "Maximum word pieces per input (0: encoder limit)");
    train->add_option("--init-seed", ta.init_seed, "Seed for built-in encoder initialisation");
    train->add_option("--val-fraction", ta.val_fraction, "Validation holdout taken from the training folds");
    train->add_flag("--allow-degenerate-subset", ta.allow_degenerate, "Permit relevance on the relevant subset");
    train->add_option("--workers", ta.workers, "Parallel worker processes")->check(CLI::PositiveNumber);
    train->add_flag("--save-models", ta.save_models, "Keep every trained model");
    train->add_option("--out", ta.out, "Output directory")->required();

    RunOneArgs ro;
    auto* run_one = app.add_subcommand("run-one", "Worker entry point for one (fold, seed) run");
    run_one->group("");
    run_one->add_option("--spec", ro.spec)->required();
    run_one->add_option("--corpus", ro.corpus)->required();
    run_one->add_option("--cache", ro.cache)->required();
    run_one->add_option("--fold", ro.fold)->required();
    run_one->add_option("--seed", ro.seed)->required();
    run_one->add_option("--out", ro.out)->required();
    run_one->add_option("--model-dir", ro.model_dir);

    ConcretenessArgs ca;
    auto* conc = app.add_subcommand("concreteness", "Train the concreteness regressor and correlate with frames");
    conc->add_option("--lexicon", ca.lexicon, "word,rating CSV")->required()->check(CLI::ExistingFile);
    conc->add_option("--corpus", ca.corpus, "Corpus store")->required();
    conc->add_option("--runs", ca.runs, "Train output directories supplying per-frame F1");
    conc->add_option("--text-encoder", ca.text_encoder, "Text encoder identifier or directory");
    conc->add_option("--init-seed", ca.init_seed, "Seed for built-in encoder initialisation");
    conc->add_option("--gazetteer", ca.gazetteer, "Extra named entities, one per line")->check(CLI::ExistingFile);
    conc->add_flag("--exclude-stopwords", ca.exclude_stopwords, "Leave stopwords out of frame averages");
    conc->add_option("--seed", ca.regressor.seed, "Lexicon split and regressor seed");
    conc->add_option("--epochs", ca.regressor.epochs, "Regressor epochs")->check(CLI::PositiveNumber);
    conc->add_option("--hidden", ca.regressor.hidden, "Regressor hidden width")->check(CLI::PositiveNumber);
    conc->add_option("--out", ca.out, "Output directory")->required();

    std::vector<std::string> runs;
    std::string format = "table";
    auto* report = app.add_subcommand("report", "Tables and figures from training runs");
    report->add_option("--runs", runs, "Train output directories")->required();
    report->add_option("--format", format, "json, table or figure");
    report->add_option("--out", out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*ingest) return cmd_ingest(data, out, args);
        if (*fetch) return cmd_fetch(corpus, cache, timeout, retries, concurrency, args);
        if (*train) return cmd_train(ta, args);
        if (*run_one) return cmd_run_one(ro);
        if (*conc) return cmd_concreteness(ca, args);
        if (*report) return cmd_report(runs, format, out, args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const TrainingError& e) {
        std::cerr << "training failed: " << e.what() << '\n';
        return kExitTraining;
    } catch (const c10::Error& e) {
        std::cerr << "training failed: " << e.what_without_backtrace() << '\n';
        return kExitTraining;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
