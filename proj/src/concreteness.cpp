#include "newsframe/concreteness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>
#include <torch/optim.h>

#include "newsframe/csv.hpp"
#include "newsframe/errors.hpp"
#include "newsframe/rng.hpp"
#include "newsframe/svg.hpp"

namespace newsframe {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

double pearson_or_nan(const std::vector<double>& x, const std::vector<double>& y) {
    try {
        return pearson(x, y);
    } catch (const UsageError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

ConcretenessLexicon parse_lexicon(std::istream& in) {
    ConcretenessLexicon lex;
    csv::Reader reader(in);
    int row = 0;
    while (auto fields = reader.next()) {
        ++row;
        if (fields->size() == 1 && trim((*fields)[0]).empty()) continue;
        if (fields->size() < 2) throw DataError("lexicon row " + std::to_string(row) + ": expected word,rating");
        const auto word = lower(trim((*fields)[0]));
        const auto rating = parse_number(trim((*fields)[1]));
        if (!rating) {
            if (row == 1) continue;
            throw DataError("lexicon row " + std::to_string(row) + ": rating '" + (*fields)[1] + "' is not a number");
        }
        if (word.empty()) throw DataError("lexicon row " + std::to_string(row) + ": empty word");
        if (*rating < kMinConcreteness || *rating > kMaxConcreteness) {
            throw DataError("lexicon row " + std::to_string(row) + ": rating " + (*fields)[1] + " outside [1, 5]");
        }
        if (!lex.entries.emplace(word, *rating).second) {
            throw DataError("lexicon row " + std::to_string(row) + ": duplicate word '" + word + "'");
        }
    }
    return lex;
}

ConcretenessLexicon load_lexicon(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open lexicon " + path.string());
    return parse_lexicon(in);
}

void to_json(nlohmann::json& j, const RegressorConfig& c) {
    j = nlohmann::json{{"hidden", c.hidden},         {"epochs", c.epochs},
                       {"batch_size", c.batch_size}, {"learning_rate", c.learning_rate},
                       {"optimizer", "adam"},        {"loss", "mse"},
                       {"patience", c.patience},     {"seed", c.seed},
                       {"val_fraction", c.val_fraction}, {"test_fraction", c.test_fraction}};
}

namespace {

/// [N, 4H] mean word-piece vectors; rows of words without pieces are left
/// zero and flagged false.
std::pair<torch::Tensor, std::vector<bool>> word_embeddings(TextEncoder& encoder, const std::vector<std::string>& words,
                                                            std::size_t batch = 64) {
    torch::NoGradGuard no_grad;
    encoder->eval();
    const auto D = encoder->output_dim();
    auto out = torch::zeros({static_cast<std::int64_t>(words.size()), D}, torch::kFloat32);
    std::vector<bool> ok(words.size(), false);
    for (std::size_t start = 0; start < words.size(); start += batch) {
        std::vector<std::string> chunk;
        std::vector<std::size_t> where;
        for (std::size_t i = start; i < std::min(words.size(), start + batch); ++i) {
            if (encoder->tokenizer().ids(words[i]).empty()) continue;
            chunk.push_back(words[i]);
            where.push_back(i);
        }
        if (chunk.empty()) continue;
        const auto tb = encoder->tokenize(chunk);
        const auto hidden = encoder->bert->forward(tb.input_ids, tb.attention_mask);
        const auto n = hidden.size();
        auto last4 = torch::cat({hidden[n - 4], hidden[n - 3], hidden[n - 2], hidden[n - 1]}, 2).to(torch::kFloat32);
        auto inner = tb.attention_mask.clone();
        inner.select(1, 0).zero_();
        const auto lengths = tb.attention_mask.sum(1);
        for (std::int64_t b = 0; b < inner.size(0); ++b) inner[b][lengths[b].item<std::int64_t>() - 1] = 0;
        auto w = inner.to(torch::kFloat32).unsqueeze(2);
        auto means = (last4 * w).sum(1) / w.sum(1);
        for (std::size_t k = 0; k < where.size(); ++k) {
            out[static_cast<std::int64_t>(where[k])] = means[static_cast<std::int64_t>(k)];
            ok[where[k]] = true;
        }
    }
    return {out, ok};
}

torch::nn::Sequential make_regressor(std::int64_t in, std::int64_t hidden) {
    return torch::nn::Sequential(torch::nn::Linear(in, hidden), torch::nn::ReLU(), torch::nn::Linear(hidden, 1));
}

}  // namespace

std::optional<torch::Tensor> word_embedding(TextEncoder& encoder, const std::string& word) {
    auto [emb, ok] = word_embeddings(encoder, {word});
    if (!ok[0]) return std::nullopt;
    return emb[0];
}

torch::Tensor ConcretenessModel::raw(const torch::Tensor& embeddings) const {
    torch::NoGradGuard no_grad;
    torch::nn::Sequential n = net;
    n->eval();
    auto x = (embeddings.to(torch::kFloat32) - input_mean) / input_std;
    return n->forward(x).squeeze(1).to(torch::kDouble) * target_std + target_mean;
}

ConcretenessModel train_concreteness(const std::vector<std::string>& words, const torch::Tensor& embeddings,
                                     const std::vector<double>& ratings, const RegressorConfig& cfg) {
    const auto n = words.size();
    if (embeddings.size(0) != static_cast<std::int64_t>(n) || ratings.size() != n) {
        throw UsageError("words, embeddings and ratings differ in length");
    }
    if (n < 3) throw UsageError("a lexicon of " + std::to_string(n) + " words cannot be split into train/val/test");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(cfg.seed);
    rng.shuffle(std::span(order));
    auto share = [&](double f) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(f * static_cast<double>(n))));
    };
    const auto n_test = share(cfg.test_fraction);
    const auto n_val = std::min(share(cfg.val_fraction), n - n_test - 1);
    std::vector<std::int64_t> train_idx, val_idx, test_idx;
    for (std::size_t k = 0; k < n; ++k) {
        auto& dst = k < n_test ? test_idx : k < n_test + n_val ? val_idx : train_idx;
        dst.push_back(static_cast<std::int64_t>(order[k]));
    }

    ConcretenessModel m;
    m.config = cfg;
    for (auto i : train_idx) m.train_words.push_back(words[static_cast<std::size_t>(i)]);
    for (auto i : val_idx) m.val_words.push_back(words[static_cast<std::size_t>(i)]);
    for (auto i : test_idx) m.test_words.push_back(words[static_cast<std::size_t>(i)]);

    const auto X = embeddings.to(torch::kFloat32);
    const auto Y = torch::tensor(ratings, torch::kDouble).to(torch::kFloat32);
    auto take = [](const torch::Tensor& t, const std::vector<std::int64_t>& idx) {
        return t.index_select(0, torch::tensor(idx, torch::kLong));
    };
    const auto x_train = take(X, train_idx), y_train = take(Y, train_idx);
    m.input_mean = x_train.mean(0);
    m.input_std = x_train.size(0) > 1 ? x_train.std(0).clamp_min(1e-6) : torch::ones_like(m.input_mean);
    m.target_mean = y_train.mean().item<double>();
    m.target_std = y_train.size(0) > 1 ? std::max(1e-6, y_train.std().item<double>()) : 1.0;

    torch::manual_seed(cfg.seed);
    m.net = make_regressor(X.size(1), cfg.hidden);
    torch::optim::Adam opt(m.net->parameters(), torch::optim::AdamOptions(cfg.learning_rate));
    const auto xs = (x_train - m.input_mean) / m.input_std;
    const auto ys = (y_train - m.target_mean) / m.target_std;
    const auto x_val = take(X, val_idx);
    const auto y_val = take(Y, val_idx).to(torch::kDouble);

    std::vector<std::int64_t> batch_order(train_idx.size());
    for (std::size_t i = 0; i < batch_order.size(); ++i) batch_order[i] = static_cast<std::int64_t>(i);
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    std::vector<torch::Tensor> best_params;
    const auto bs = static_cast<std::size_t>(std::max(1, cfg.batch_size));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        m.net->train();
        rng.shuffle(std::span(batch_order));
        for (std::size_t s = 0; s < batch_order.size(); s += bs) {
            const auto e = std::min(batch_order.size(), s + bs);
            auto idx = torch::tensor(std::vector<std::int64_t>(batch_order.begin() + static_cast<std::ptrdiff_t>(s),
                                                               batch_order.begin() + static_cast<std::ptrdiff_t>(e)),
                                     torch::kLong);
            opt.zero_grad();
            auto loss = torch::mse_loss(m.net->forward(xs.index_select(0, idx)).squeeze(1), ys.index_select(0, idx));
            loss.backward();
            opt.step();
        }
        const double val_mse = (m.raw(x_val) - y_val).pow(2).mean().item<double>();
        if (val_mse < best) {
            best = val_mse;
            since_best = 0;
            best_params.clear();
            for (const auto& p : m.net->parameters()) best_params.push_back(p.detach().clone());
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    {
        torch::NoGradGuard no_grad;
        auto params = m.net->parameters();
        for (std::size_t i = 0; i < params.size(); ++i) params[i].copy_(best_params[i]);
    }
    m.net->eval();

    auto clamped = [&](const std::vector<std::int64_t>& idx) {
        auto p = m.raw(take(X, idx)).clamp(kMinConcreteness, kMaxConcreteness).contiguous();
        return std::vector<double>(p.data_ptr<double>(), p.data_ptr<double>() + p.numel());
    };
    auto truth = [&](const std::vector<std::int64_t>& idx) {
        std::vector<double> out;
        for (auto i : idx) out.push_back(ratings[static_cast<std::size_t>(i)]);
        return out;
    };
    m.test_pearson = pearson_or_nan(clamped(test_idx), truth(test_idx));
    m.val_pearson = pearson_or_nan(clamped(val_idx), truth(val_idx));
    return m;
}

ConcretenessModel train_concreteness(const ConcretenessLexicon& lexicon, TextEncoder& encoder,
                                     const RegressorConfig& cfg) {
    if (lexicon.entries.empty()) throw UsageError("empty concreteness lexicon");
    std::vector<std::string> all;
    for (const auto& [w, r] : lexicon.entries) all.push_back(w);
    auto [emb, ok] = word_embeddings(encoder, all);
    std::vector<std::string> words;
    std::vector<double> ratings;
    std::vector<std::int64_t> keep;
    int skipped = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!ok[i]) {
            ++skipped;
            continue;
        }
        words.push_back(all[i]);
        ratings.push_back(lexicon.entries.at(all[i]));
        keep.push_back(static_cast<std::int64_t>(i));
    }
    auto m = train_concreteness(words, emb.index_select(0, torch::tensor(keep, torch::kLong)), ratings, cfg);
    m.skipped = skipped;
    m.encoder_id = encoder->identifier();
    return m;
}

void save_concreteness_model(const ConcretenessModel& m, const fs::path& dir) {
    fs::create_directories(dir);
    safetensors::TensorMap t;
    for (const auto& p : m.net->named_parameters()) t.emplace("net." + p.key(), p.value());
    t.emplace("input_mean", m.input_mean);
    t.emplace("input_std", m.input_std);
    safetensors::save(dir / "regressor.safetensors", t);
    nlohmann::json j{{"format", "newsframe-concreteness/1"},
                     {"encoder", m.encoder_id},
                     {"config", m.config},
                     {"input_dim", m.input_mean.size(0)},
                     {"target_mean", m.target_mean},
                     {"target_std", m.target_std},
                     {"skipped_words", m.skipped},
                     {"test_pearson", std::isnan(m.test_pearson) ? nlohmann::json() : nlohmann::json(m.test_pearson)},
                     {"val_pearson", std::isnan(m.val_pearson) ? nlohmann::json() : nlohmann::json(m.val_pearson)},
                     {"split",
                      {{"train", m.train_words.size()}, {"val", m.val_words}, {"test", m.test_words}}}};
    std::ofstream(dir / "concreteness.json") << j.dump(2) << '\n';
}

ConcretenessModel load_concreteness_model(const fs::path& dir) {
    std::ifstream in(dir / "concreteness.json");
    if (!in) throw DataError("no concreteness.json in " + dir.string());
    const auto j = nlohmann::json::parse(in);
    ConcretenessModel m;
    m.encoder_id = j.at("encoder").get<std::string>();
    const auto& c = j.at("config");
    m.config.hidden = c.at("hidden").get<std::int64_t>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.target_mean = j.at("target_mean").get<double>();
    m.target_std = j.at("target_std").get<double>();
    m.skipped = j.value("skipped_words", 0);
    auto nan_or = [](const nlohmann::json& v) {
        return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
    };
    m.test_pearson = nan_or(j.at("test_pearson"));
    m.val_pearson = nan_or(j.at("val_pearson"));
    m.val_words = j.at("split").at("val").get<std::vector<std::string>>();
    m.test_words = j.at("split").at("test").get<std::vector<std::string>>();
    m.net = make_regressor(j.at("input_dim").get<std::int64_t>(), m.config.hidden);
    auto t = safetensors::load(dir / "regressor.safetensors");
    torch::NoGradGuard no_grad;
    for (auto& p : m.net->named_parameters()) {
        auto it = t.find("net." + p.key());
        if (it == t.end() || it->second.sizes() != p.value().sizes()) {
            throw DataError("regressor weights in " + dir.string() + " do not match its manifest");
        }
        p.value().copy_(it->second);
    }
    m.input_mean = t.at("input_mean");
    m.input_std = t.at("input_std");
    m.net->eval();
    return m;
}

ModelScorer::ModelScorer(const ConcretenessModel& model, TextEncoder encoder)
    : model_(model), encoder_(std::move(encoder)) {}

double ModelScorer::raw_score(const std::string& word) {
    const auto key = lower(word);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const auto emb = word_embedding(encoder_, key);
    const double v = emb ? model_.raw(emb->unsqueeze(0))[0].item<double>() : model_.target_mean;
    cache_.emplace(key, v);
    return v;
}

double word_concreteness(ConcretenessScorer& scorer, const std::string& word, bool is_named_entity) {
    if (is_named_entity) return kNamedEntityConcreteness;
    return std::clamp(scorer.raw_score(word), kMinConcreteness, kMaxConcreteness);
}

namespace {

bool has_letter(const std::string& t) {
    return std::any_of(t.begin(), t.end(), [](unsigned char c) { return std::isalpha(c); });
}

bool starts_upper(const std::string& t) { return !t.empty() && std::isupper(static_cast<unsigned char>(t[0])); }

bool all_caps(const std::string& t) {
    int letters = 0;
    for (unsigned char c : t) {
        if (std::islower(c)) return false;
        letters += std::isupper(c) != 0;
    }
    return letters >= 2;
}

}  // namespace

std::vector<bool> CapitalizationTagger::tag(const std::string&, const std::vector<std::string>& tokens) const {
    std::vector<bool> out(tokens.size(), false);
    int words = 0, capitalised = 0, shouted = 0;
    for (const auto& t : tokens) {
        if (!has_letter(t) || !std::isalpha(static_cast<unsigned char>(t[0]))) continue;
        ++words;
        capitalised += starts_upper(t);
        shouted += all_caps(t);
    }
    if (words > 0 && shouted * 5 >= words * 4) return out;
    const bool title_case = words >= 2 && capitalised * 5 >= words * 4;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        out[i] = all_caps(t) || (!title_case && i > 0 && starts_upper(t));
    }
    return out;
}

GazetteerTagger::GazetteerTagger(std::set<std::string> entries) {
    for (const auto& e : entries) entries_.insert(lower(e));
}

GazetteerTagger GazetteerTagger::from_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open gazetteer " + path.string());
    std::set<std::string> entries;
    for (std::string line; std::getline(in, line);) {
        line = trim(line);
        if (!line.empty()) entries.insert(line);
    }
    return GazetteerTagger(std::move(entries));
}

std::vector<bool> GazetteerTagger::tag(const std::string&, const std::vector<std::string>& tokens) const {
    std::vector<bool> out(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) out[i] = entries_.contains(lower(tokens[i]));
    return out;
}

UnionTagger::UnionTagger(std::vector<std::shared_ptr<const NeTagger>> taggers) : taggers_(std::move(taggers)) {}

std::vector<bool> UnionTagger::tag(const std::string& headline, const std::vector<std::string>& tokens) const {
    std::vector<bool> out(tokens.size(), false);
    for (const auto& t : taggers_) {
        const auto flags = t->tag(headline, tokens);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] || flags[i];
    }
    return out;
}

std::string UnionTagger::name() const {
    std::string n;
    for (const auto& t : taggers_) n += (n.empty() ? "" : "+") + t->name();
    return n;
}

namespace {

// Multi-byte punctuation commonly found in headlines.
constexpr std::string_view kUnicodePunct[] = {"‘", "’", "“", "”", "–", "—", "…"};

bool strip_front(std::string& t) {
    if (t.empty()) return false;
    if (std::ispunct(static_cast<unsigned char>(t.front()))) {
        t.erase(0, 1);
        return true;
    }
    for (auto p : kUnicodePunct) {
        if (t.starts_with(p)) {
            t.erase(0, p.size());
            return true;
        }
    }
    return false;
}

bool strip_back(std::string& t) {
    if (t.empty()) return false;
    if (std::ispunct(static_cast<unsigned char>(t.back()))) {
        t.pop_back();
        return true;
    }
    for (auto p : kUnicodePunct) {
        if (t.ends_with(p)) {
            t.resize(t.size() - p.size());
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<std::string> headline_tokens(const std::string& headline) {
    std::vector<std::string> out;
    std::istringstream in(headline);
    for (std::string t; in >> t;) {
        while (strip_front(t)) {}
        while (strip_back(t)) {}
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

bool is_stopword(const std::string& w) {
    static const std::set<std::string> kStop{
        "a",     "about", "above", "after",  "again", "against", "all",   "am",    "an",    "and",   "any",
        "are",   "as",    "at",    "be",     "because", "been",  "before", "being", "below", "between", "both",
        "but",   "by",    "can",   "could",  "did",   "do",      "does",  "doing", "down",  "during", "each",
        "few",   "for",   "from",  "further", "had",  "has",     "have",  "having", "he",   "her",   "here",
        "hers",  "herself", "him", "himself", "his",  "how",     "i",     "if",    "in",    "into",  "is",
        "it",    "its",   "itself", "just",  "me",    "more",    "most",  "my",    "myself", "no",   "nor",
        "not",   "now",   "of",    "off",    "on",    "once",    "only",  "or",    "other", "our",   "ours",
        "ourselves", "out", "over", "own",   "same",  "she",     "should", "so",   "some",  "such",  "than",
        "that",  "the",   "their", "theirs", "them",  "themselves", "then", "there", "these", "they", "this",
        "those", "through", "to",  "too",    "under", "until",   "up",    "very",  "was",   "we",    "were",
        "what",  "when",  "where", "which",  "while", "who",     "whom",  "why",   "will",  "with",  "would",
        "you",   "your",  "yours", "yourself", "yourselves"};
    return kStop.contains(w);
}

std::vector<FrameConcreteness> frame_concreteness(const Corpus& corpus, ConcretenessScorer& scorer,
                                                  const NeTagger& tagger, FrameConcretenessOptions opts) {
    std::vector<FrameConcreteness> out;
    std::vector<double> sums(kNumFrames, 0.0);
    for (const auto& f : kFrames) out.push_back({f, std::nullopt, 0, 0, 0});
    for (const auto& a : corpus.articles()) {
        auto& fc = out[static_cast<std::size_t>(a.frame.id - 1)];
        ++fc.headlines;
        const auto tokens = headline_tokens(a.headline);
        const auto ne = tagger.tag(a.headline, tokens);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (!ne[i] && opts.exclude_stopwords && is_stopword(lower(tokens[i]))) continue;
            sums[static_cast<std::size_t>(a.frame.id - 1)] += word_concreteness(scorer, tokens[i], ne[i]);
            ++fc.tokens;
            fc.named_entities += ne[i];
        }
    }
    for (std::size_t f = 0; f < out.size(); ++f) {
        if (out[f].tokens > 0) out[f].mean = sums[f] / out[f].tokens;
    }
    return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw UsageError("pearson: series differ in length");
    if (x.size() < 2) throw UsageError("pearson: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw UsageError("pearson: a series has zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationReport correlation_report(const StatsTable& stats, const std::vector<FrameConcreteness>& concreteness,
                                     const std::vector<EvalReport>& reports) {
    CorrelationReport r;
    r.concreteness = concreteness;
    auto f1_for = [&](Subset subset) {
        std::vector<std::optional<double>> out(kNumFrames);
        for (int f = 0; f < kNumFrames; ++f) {
            double sum = 0;
            int n = 0;
            for (const auto& rep : reports) {
                if (rep.spec.task != Task::Frame || rep.spec.subset != subset) continue;
                const auto& s = rep.per_class[static_cast<std::size_t>(f)];
                if (s.support == 0 && !s.defined) continue;
                sum += s.f1;
                ++n;
            }
            if (n > 0) out[static_cast<std::size_t>(f)] = sum / n;
        }
        return out;
    };
    r.f1_relevant = f1_for(Subset::RelevantOnly);
    r.f1_all = f1_for(Subset::All);
    std::vector<std::optional<double>> conc(kNumFrames), ratio(kNumFrames);
    for (int f = 0; f < kNumFrames; ++f) {
        const auto& row = stats.row(f + 1);
        r.relevance_ratio.push_back(row.ratio);
        if (row.articles > 0) ratio[static_cast<std::size_t>(f)] = row.ratio;
        for (const auto& c : concreteness) {
            if (c.frame.id == f + 1) conc[static_cast<std::size_t>(f)] = c.mean;
        }
    }
    auto correlate = [&](std::string name, std::string xn, const std::vector<std::optional<double>>& x, std::string yn,
                         const std::vector<std::optional<double>>& y, double reference) {
        Correlation c{std::move(name), std::move(xn), std::move(yn), std::nullopt, 0, {}, reference};
        std::vector<double> xs, ys;
        for (int f = 0; f < kNumFrames; ++f) {
            const auto& a = x[static_cast<std::size_t>(f)];
            const auto& b = y[static_cast<std::size_t>(f)];
            if (a && b) {
                xs.push_back(*a);
                ys.push_back(*b);
            } else {
                c.dropped_frames.push_back(f + 1);
            }
        }
        c.n = static_cast<int>(xs.size());
        const double v = pearson_or_nan(xs, ys);
        if (!std::isnan(v)) c.r = v;
        r.correlations.push_back(std::move(c));
    };
    correlate("concreteness_vs_relevance_ratio", "concreteness", conc, "relevance_ratio", ratio, 0.69);
    correlate("concreteness_vs_f1_relevant", "concreteness", conc, "f1_relevant", r.f1_relevant, 0.93);
    correlate("concreteness_vs_f1_all", "concreteness", conc, "f1_all", r.f1_all, 0.94);
    correlate("relevance_ratio_vs_f1_relevant", "relevance_ratio", ratio, "f1_relevant", r.f1_relevant, 0.81);
    correlate("relevance_ratio_vs_f1_all", "relevance_ratio", ratio, "f1_all", r.f1_all, 0.67);
    return r;
}

void to_json(nlohmann::json& j, const CorrelationReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
    nlohmann::json frames = nlohmann::json::array();
    for (int f = 0; f < kNumFrames; ++f) {
        const auto i = static_cast<std::size_t>(f);
        nlohmann::json row{{"frame_id", f + 1},
                           {"frame", std::string(kFrames[i].name)},
                           {"relevance_ratio", r.relevance_ratio[i]},
                           {"f1_relevant", opt(r.f1_relevant[i])},
                           {"f1_all", opt(r.f1_all[i])}};
        for (const auto& c : r.concreteness) {
            if (c.frame.id != f + 1) continue;
            row["concreteness"] = opt(c.mean);
            row["headlines"] = c.headlines;
            row["tokens"] = c.tokens;
            row["named_entities"] = c.named_entities;
            row["excluded"] = !c.mean.has_value();
        }
        frames.push_back(row);
    }
    nlohmann::json corr = nlohmann::json::array();
    nlohmann::json refs = nlohmann::json::object();
    for (const auto& c : r.correlations) {
        corr.push_back({{"name", c.name},
                        {"x", c.x},
                        {"y", c.y},
                        {"r", opt(c.r)},
                        {"n", c.n},
                        {"dropped_frames", c.dropped_frames}});
        refs[c.name] = c.reference;
    }
    j = nlohmann::json{{"frames", frames}, {"correlations", corr}, {"published_reference", refs}};
}

std::string render_concreteness_chart(const CorrelationReport& r) {
    const double left = 60, top = 40, plot_w = 540, plot_h = 300, right = 60;
    const double group = plot_w / kNumFrames;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg::num(left + plot_w + right, 0) << "\" height=\""
      << svg::num(top + plot_h + 140, 0) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << svg::num(left, 0) << "\" y=\"20\" font-size=\"14\">Frame relevance ratio and average concreteness</text>\n";
    for (int t = 0; t <= 4; ++t) {
        const double y = top + plot_h - plot_h * t / 4.0;
        s << "<line x1=\"" << svg::num(left, 0) << "\" x2=\"" << svg::num(left + plot_w, 0) << "\" y1=\"" << svg::num(y)
          << "\" y2=\"" << svg::num(y) << "\" stroke=\"#ddd\"/>\n";
        s << "<text x=\"" << svg::num(left - 6, 0) << "\" y=\"" << svg::num(y + 4) << "\" text-anchor=\"end\">"
          << svg::num(t / 4.0, 2) << "</text>\n";
        s << "<text x=\"" << svg::num(left + plot_w + 6, 0) << "\" y=\"" << svg::num(y + 4) << "\">"
          << svg::num(1.0 + t, 0) << "</text>\n";
    }
    std::string points;
    for (int f = 0; f < kNumFrames; ++f) {
        const auto i = static_cast<std::size_t>(f);
        const double x = left + group * f;
        const double h = plot_h * r.relevance_ratio[i];
        s << "<rect x=\"" << svg::num(x + group * 0.15) << "\" y=\"" << svg::num(top + plot_h - h) << "\" width=\""
          << svg::num(group * 0.7) << "\" height=\"" << svg::num(h) << "\" fill=\"" << svg::colour(0)
          << "\"><title>" << svg::num(r.relevance_ratio[i], 3) << "</title></rect>\n";
        s << "<text transform=\"translate(" << svg::num(x + group / 2) << "," << svg::num(top + plot_h + 10)
          << ") rotate(40)\">" << svg::escape(kFrames[i].name) << "</text>\n";
        for (const auto& c : r.concreteness) {
            if (c.frame.id != f + 1 || !c.mean) continue;
            const double y = top + plot_h - plot_h * (*c.mean - 1.0) / 4.0;
            points += svg::num(x + group / 2) + "," + svg::num(y) + " ";
            s << "<circle cx=\"" << svg::num(x + group / 2) << "\" cy=\"" << svg::num(y) << "\" r=\"3\" fill=\""
              << svg::colour(1) << "\"><title>" << svg::num(*c.mean, 2) << "</title></circle>\n";
        }
    }
    s << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\"" << svg::colour(1) << "\" stroke-width=\"2\"/>\n";
    const double ly = top + plot_h + 120;
    s << "<rect x=\"" << svg::num(left, 0) << "\" y=\"" << svg::num(ly - 10) << "\" width=\"12\" height=\"12\" fill=\""
      << svg::colour(0) << "\"/><text x=\"" << svg::num(left + 18, 0) << "\" y=\"" << svg::num(ly)
      << "\">relevance ratio (left)</text>\n";
    s << "<line x1=\"" << svg::num(left + 180, 0) << "\" x2=\"" << svg::num(left + 196, 0) << "\" y1=\""
      << svg::num(ly - 4) << "\" y2=\"" << svg::num(ly - 4) << "\" stroke=\"" << svg::colour(1)
      << "\" stroke-width=\"2\"/><text x=\"" << svg::num(left + 202, 0) << "\" y=\"" << svg::num(ly)
      << "\">concreteness (right)</text>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace newsframe
