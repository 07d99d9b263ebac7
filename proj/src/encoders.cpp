#include "newsframe/encoders.hpp"

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "newsframe/errors.hpp"

namespace newsframe {

namespace fs = std::filesystem;

TextEncoderImpl::TextEncoderImpl(std::string identifier, const BertConfig& config, WordPieceTokenizer tokenizer,
                                 std::int64_t max_len)
    : identifier_(std::move(identifier)),
      tokenizer_(std::move(tokenizer)),
      max_len_(max_len > 0 ? std::min(max_len, config.max_position_embeddings) : config.max_position_embeddings) {
    if (config.num_hidden_layers < 3) {
        throw DataError("text encoder needs at least 3 layers to expose four hidden states");
    }
    if (static_cast<std::int64_t>(tokenizer_.size()) > config.vocab_size) {
        throw DataError("vocabulary has " + std::to_string(tokenizer_.size()) + " entries but the encoder only " +
                        std::to_string(config.vocab_size));
    }
    if (max_len_ < 3) throw DataError("maximum sequence length must be at least 3");
    bert = register_module("bert", BertModel(config));
}

TokenBatch TextEncoderImpl::tokenize(const std::vector<std::string>& texts) const {
    std::vector<std::vector<std::int64_t>> seqs;
    seqs.reserve(texts.size());
    std::size_t longest = 0;
    const auto budget = static_cast<std::size_t>(max_len_ - 2);
    for (const auto& t : texts) {
        auto ids = tokenizer_.ids(t);
        if (ids.empty()) throw DataError("text produced no tokens: '" + t + "'");
        if (ids.size() > budget) ids.resize(budget);
        std::vector<std::int64_t> seq;
        seq.reserve(ids.size() + 2);
        seq.push_back(tokenizer_.cls_id());
        seq.insert(seq.end(), ids.begin(), ids.end());
        seq.push_back(tokenizer_.sep_id());
        longest = std::max(longest, seq.size());
        seqs.push_back(std::move(seq));
    }
    const auto B = static_cast<std::int64_t>(seqs.size());
    const auto T = static_cast<std::int64_t>(longest);
    auto ids = torch::full({B, T}, tokenizer_.pad_id(), torch::kLong);
    auto mask = torch::zeros({B, T}, torch::kLong);
    auto ids_a = ids.accessor<std::int64_t, 2>();
    auto mask_a = mask.accessor<std::int64_t, 2>();
    for (std::int64_t b = 0; b < B; ++b) {
        const auto& s = seqs[static_cast<std::size_t>(b)];
        for (std::size_t t = 0; t < s.size(); ++t) {
            ids_a[b][static_cast<std::int64_t>(t)] = s[t];
            mask_a[b][static_cast<std::int64_t>(t)] = 1;
        }
    }
    return {ids, mask};
}

std::vector<torch::Tensor> TextEncoderImpl::hidden_states(const TokenBatch& batch) {
    if (frozen_) {
        torch::NoGradGuard no_grad;
        return bert->forward(batch.input_ids, batch.attention_mask);
    }
    return bert->forward(batch.input_ids, batch.attention_mask);
}

torch::Tensor TextEncoderImpl::encode_pooled(const std::vector<std::string>& texts) {
    auto hidden = hidden_states(tokenize(texts));
    const auto n = hidden.size();
    std::vector<torch::Tensor> cls;
    for (std::size_t i = n - 4; i < n; ++i) cls.push_back(hidden[i].select(1, 0));
    return torch::cat(cls, 1);
}

torch::Tensor TextEncoderImpl::encode_tokens(const std::string& text) {
    auto batch = tokenize({text});
    auto hidden = hidden_states(batch);
    const auto n = hidden.size();
    const auto T = batch.input_ids.size(1);
    std::vector<torch::Tensor> layers;
    for (std::size_t i = n - 4; i < n; ++i) layers.push_back(hidden[i][0].slice(0, 1, T - 1));
    return torch::cat(layers, 1);
}

void TextEncoderImpl::set_frozen(bool frozen) {
    frozen_ = frozen;
    for (auto& p : parameters()) p.set_requires_grad(!frozen);
    if (frozen) torch::nn::Module::train(false);
}

void TextEncoderImpl::train(bool on) { torch::nn::Module::train(on && !frozen_); }

ImageEncoderImpl::ImageEncoderImpl(std::string identifier, const ResNetConfig& config, double dropout_rate)
    : identifier_(std::move(identifier)) {
    resnet = register_module("resnet", ResNetTrunk(config));
    embed = register_module("embed", torch::nn::Linear(config.output_channels(), kFeatureDim));
    dropout = register_module("dropout", torch::nn::Dropout(dropout_rate));
}

torch::Tensor ImageEncoderImpl::forward(const torch::Tensor& images) {
    if (images.dim() != 4 || images.size(1) != 3 || images.size(2) != kImageSide || images.size(3) != kImageSide) {
        throw DataError("image encoder expects [B, 3, 224, 224] input");
    }
    auto x = images.to(embed->weight.scalar_type());
    auto run = [&] { return dropout(torch::relu(embed(resnet(x)))); };
    if (frozen_) {
        torch::NoGradGuard no_grad;
        return run();
    }
    return run();
}

torch::Tensor ImageEncoderImpl::encode(const std::vector<const ImageTensor*>& images) {
    return forward(image_batch(images, embed->weight.scalar_type()));
}

void ImageEncoderImpl::set_frozen(bool frozen) {
    frozen_ = frozen;
    for (auto& p : parameters()) p.set_requires_grad(!frozen);
    if (frozen) torch::nn::Module::train(false);
}

void ImageEncoderImpl::train(bool on) { torch::nn::Module::train(on && !frozen_); }

torch::Tensor encode_text(TextEncoder& encoder, const std::string& text, PoolMode mode) {
    if (mode == PoolMode::PooledLast4) return encoder->encode_pooled({text})[0];
    return encoder->encode_tokens(text);
}

torch::Tensor encode_image(ImageEncoder& encoder, const ImageTensor& image) { return encoder->encode({&image})[0]; }

torch::Tensor image_batch(const std::vector<const ImageTensor*>& images, torch::ScalarType dtype) {
    const auto B = static_cast<std::int64_t>(images.size());
    auto out = torch::empty({B, 3, kImageSide, kImageSide}, torch::kFloat32);
    for (std::int64_t b = 0; b < B; ++b) {
        const auto* im = images[static_cast<std::size_t>(b)];
        if (!im || im->pixels.size() != ImageTensor::kSize) {
            throw DataError("image tensor must hold 3x224x224 values");
        }
        std::memcpy(out[b].data_ptr<float>(), im->pixels.data(), ImageTensor::kSize * sizeof(float));
    }
    return dtype == torch::kFloat32 ? out : out.to(dtype);
}

LoadReport load_matching(torch::nn::Module& module, const safetensors::TensorMap& weights,
                         const std::vector<std::string>& prefixes) {
    LoadReport report;
    torch::NoGradGuard no_grad;
    auto visit = [&](const std::string& name, torch::Tensor& target) {
        const safetensors::TensorMap::value_type* found = nullptr;
        if (auto it = weights.find(name); it != weights.end()) found = &*it;
        for (const auto& p : prefixes) {
            if (found) break;
            if (auto it = weights.find(p + name); it != weights.end()) found = &*it;
        }
        if (!found) {
            if (!name.ends_with("num_batches_tracked")) report.missing.push_back(name);
            return;
        }
        if (found->second.sizes() != target.sizes()) {
            report.mismatched.push_back(name);
            return;
        }
        target.copy_(found->second.to(target.scalar_type()));
        report.loaded.push_back(name);
    };
    for (auto& item : module.named_parameters(true)) visit(item.key(), item.value());
    for (auto& item : module.named_buffers(true)) visit(item.key(), item.value());
    return report;
}

void to_json(nlohmann::json& j, const EncoderSpec& s) {
    j = nlohmann::json{{"text", s.text_id}, {"image", s.image_id}, {"max_len", s.max_len}, {"init_seed", s.init_seed}};
}

void from_json(const nlohmann::json& j, EncoderSpec& s) {
    EncoderSpec d;
    s.text_id = j.value("text", d.text_id);
    s.image_id = j.value("image", d.image_id);
    s.max_len = j.value("max_len", d.max_len);
    s.init_seed = j.value("init_seed", d.init_seed);
}

namespace {

constexpr std::string_view kBuiltin = "builtin:";

std::optional<BertConfig> builtin_bert(const std::string& id) {
    BertConfig c;
    if (id == "builtin:bert-tiny") {
        c.hidden_size = 32;
        c.num_hidden_layers = 4;
        c.num_attention_heads = 4;
        c.intermediate_size = 128;
        c.max_position_embeddings = 128;
    } else if (id == "builtin:bert-mini") {
        c.hidden_size = 128;
        c.num_hidden_layers = 4;
        c.num_attention_heads = 4;
        c.intermediate_size = 512;
        c.max_position_embeddings = 256;
    } else if (id == "builtin:bert-base") {
        // defaults
    } else {
        return std::nullopt;
    }
    return c;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw DataError("cannot open " + p.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(p.string() + ": " + e.what());
    }
}

void require_complete(const LoadReport& r, const std::string& what) {
    if (r.missing.empty() && r.mismatched.empty()) return;
    std::string msg = what + " checkpoint is incomplete:";
    for (const auto& m : r.missing) msg += " missing " + m + ";";
    for (const auto& m : r.mismatched) msg += " shape mismatch " + m + ";";
    throw DataError(msg);
}

}  // namespace

fs::path resolve_model_dir(const std::string& identifier) {
    if (fs::is_directory(identifier)) return identifier;
    if (const char* root = std::getenv("NEWSFRAME_MODEL_DIR")) {
        fs::path p = fs::path(root) / identifier;
        if (fs::is_directory(p)) return p;
    }
    throw DataError("encoder '" + identifier +
                    "' is neither a built-in variant nor a local model directory (set NEWSFRAME_MODEL_DIR)");
}

EncoderSource::EncoderSource(EncoderSpec spec, std::vector<std::string> vocab_texts)
    : spec_(std::move(spec)), vocab_texts_(std::move(vocab_texts)) {}

TextEncoder EncoderSource::make_text() const {
    std::lock_guard lock(mu_);
    if (auto cfg = builtin_bert(spec_.text_id)) {
        if (!tokenizer_) tokenizer_ = std::make_shared<WordPieceTokenizer>(WordPieceTokenizer::build(vocab_texts_));
        cfg->vocab_size = static_cast<std::int64_t>(tokenizer_->size());
        torch::manual_seed(spec_.init_seed);
        return TextEncoder(spec_.text_id, *cfg, *tokenizer_, spec_.max_len);
    }
    if (spec_.text_id.starts_with(kBuiltin)) throw DataError("unknown built-in text encoder " + spec_.text_id);
    const auto dir = resolve_model_dir(spec_.text_id);
    auto cfg = read_json(dir / "config.json").get<BertConfig>();
    if (!tokenizer_) tokenizer_ = std::make_shared<WordPieceTokenizer>(WordPieceTokenizer::from_file(dir / "vocab.txt"));
    if (!text_weights_) text_weights_ = std::make_shared<safetensors::TensorMap>(safetensors::load(dir / "model.safetensors"));
    torch::manual_seed(spec_.init_seed);
    TextEncoder enc(spec_.text_id, cfg, *tokenizer_, spec_.max_len);
    require_complete(load_matching(*enc->bert, *text_weights_, {"bert."}), "text encoder");
    return enc;
}

ImageEncoder EncoderSource::make_image() const {
    std::lock_guard lock(mu_);
    if (spec_.image_id.starts_with(kBuiltin)) {
        const auto cfg = ResNetConfig::named(spec_.image_id.substr(kBuiltin.size()));
        torch::manual_seed(spec_.init_seed);
        return ImageEncoder(spec_.image_id, cfg);
    }
    const auto dir = resolve_model_dir(spec_.image_id);
    ResNetConfig cfg = ResNetConfig::named("resnet50");
    if (fs::exists(dir / "config.json")) cfg = read_json(dir / "config.json").get<ResNetConfig>();
    if (!image_weights_) {
        image_weights_ = std::make_shared<safetensors::TensorMap>(safetensors::load(dir / "model.safetensors"));
    }
    torch::manual_seed(spec_.init_seed);
    ImageEncoder enc(spec_.image_id, cfg);
    require_complete(load_matching(*enc->resnet, *image_weights_, {"resnet."}), "image encoder");
    // A saved encoder directory also carries the projection layer.
    load_matching(*enc->embed, *image_weights_, {"embed."});
    return enc;
}

void save_text_encoder(TextEncoder& encoder, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream(dir / "config.json") << nlohmann::json(encoder->config()).dump(2) << '\n';
    encoder->tokenizer().save(dir / "vocab.txt");
    safetensors::TensorMap tensors;
    for (const auto& item : encoder->bert->named_parameters(true)) tensors.emplace(item.key(), item.value());
    safetensors::save(dir / "model.safetensors", tensors);
}

void save_image_encoder(ImageEncoder& encoder, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream(dir / "config.json") << nlohmann::json(encoder->config()).dump(2) << '\n';
    safetensors::TensorMap tensors;
    for (const auto& item : encoder->resnet->named_parameters(true)) tensors.emplace(item.key(), item.value());
    for (const auto& item : encoder->resnet->named_buffers(true)) tensors.emplace(item.key(), item.value());
    for (const auto& item : encoder->embed->named_parameters(true)) tensors.emplace("embed." + item.key(), item.value());
    safetensors::save(dir / "model.safetensors", tensors);
}

}  // namespace newsframe
