#include <doctest.h>

#include <torch/torch.h>

#include "fixtures.hpp"
#include "newsframe/encoders.hpp"
#include "newsframe/errors.hpp"

using namespace newsframe;

namespace {

const std::vector<std::string> kTexts{"senate passes gun bill", "shooting at the mall", "police respond [SEP] crowd"};

EncoderSource source(std::int64_t max_len = 0, std::uint64_t init = 0) {
    EncoderSpec s;
    s.max_len = max_len;
    s.init_seed = init;
    return EncoderSource(s, kTexts);
}

ImageTensor constant_image(float v) {
    ImageTensor t;
    t.pixels.assign(ImageTensor::kSize, v);
    return t;
}

}  // namespace

TEST_CASE("text encoder shapes") {
    auto enc = source().make_text();
    enc->eval();
    CHECK(enc->output_dim() == 4 * enc->hidden_size());
    const auto pooled = enc->encode_pooled(kTexts);
    CHECK(pooled.sizes() == torch::IntArrayRef{3, enc->output_dim()});
    const auto tokens = enc->encode_tokens("shooting at the mall");
    CHECK(tokens.size(0) == 4);
    CHECK(tokens.size(1) == enc->output_dim());
    CHECK(encode_text(enc, "shooting", PoolMode::PooledLast4).sizes() == torch::IntArrayRef{enc->output_dim()});
}

TEST_CASE("tokenization adds specials, truncates and pads") {
    auto enc = source(5).make_text();
    const auto b = enc->tokenize({"shooting at the mall", "senate"});
    CHECK(b.input_ids.sizes() == torch::IntArrayRef{2, 5});
    CHECK(b.attention_mask[0].sum().item<std::int64_t>() == 5);
    CHECK(b.attention_mask[1].sum().item<std::int64_t>() == 3);
    CHECK(b.input_ids[0][0].item<std::int64_t>() == enc->tokenizer().cls_id());
    CHECK(b.input_ids[0][4].item<std::int64_t>() == enc->tokenizer().sep_id());
    CHECK(b.input_ids[1][3].item<std::int64_t>() == enc->tokenizer().pad_id());
    CHECK_THROWS_AS(enc->tokenize({""}), DataError);
}

TEST_CASE("encoders are deterministic in their init seed") {
    auto a = source(0, 1).make_text();
    auto b = source(0, 1).make_text();
    auto c = source(0, 2).make_text();
    a->eval();
    b->eval();
    c->eval();
    CHECK(torch::equal(a->encode_pooled(kTexts), b->encode_pooled(kTexts)));
    CHECK_FALSE(torch::equal(a->encode_pooled(kTexts), c->encode_pooled(kTexts)));
}

TEST_CASE("batched encoding matches one at a time") {
    auto enc = source().make_text();
    enc->eval();
    torch::NoGradGuard no_grad;
    const auto batch = enc->encode_pooled(kTexts);
    for (std::size_t i = 0; i < kTexts.size(); ++i) {
        const auto single = enc->encode_pooled({kTexts[i]});
        CHECK(torch::allclose(batch[static_cast<std::int64_t>(i)], single[0], 1e-5, 1e-5));
    }
}

TEST_CASE("frozen text encoder stays fixed in training mode") {
    auto enc = source().make_text();
    enc->set_frozen(true);
    enc->train(true);
    CHECK_FALSE(enc->is_training());
    for (const auto& p : enc->parameters()) CHECK_FALSE(p.requires_grad());
    const auto x = enc->encode_pooled(kTexts);
    CHECK_FALSE(x.requires_grad());
    CHECK(torch::equal(x, enc->encode_pooled(kTexts)));
    enc->set_frozen(false);
    enc->train(true);
    CHECK(enc->is_training());
    CHECK(enc->encode_pooled(kTexts).requires_grad());
}

TEST_CASE("image encoder") {
    auto enc = source().make_image();
    const auto a = constant_image(0.1f);
    const auto b = constant_image(-0.4f);
    SUBCASE("shape") {
        enc->eval();
        const auto f = enc->encode({&a, &b});
        CHECK(f.sizes() == torch::IntArrayRef{2, ImageEncoderImpl::kFeatureDim});
        CHECK(encode_image(enc, a).sizes() == torch::IntArrayRef{ImageEncoderImpl::kFeatureDim});
        CHECK_THROWS_AS(enc->forward(torch::zeros({1, 3, 100, 100})), DataError);
    }
    SUBCASE("dropout is active only in training") {
        enc->eval();
        const auto e1 = enc->encode({&a});
        CHECK(torch::equal(e1, enc->encode({&a})));
        enc->set_frozen(true);
        enc->train(true);
        CHECK(torch::equal(e1, enc->encode({&a})));
        for (const auto& p : enc->parameters()) CHECK_FALSE(p.requires_grad());
    }
    SUBCASE("identical construction") {
        auto other = source().make_image();
        enc->eval();
        other->eval();
        CHECK(torch::equal(enc->encode({&a}), other->encode({&a})));
    }
}

TEST_CASE("saved encoders load back with the same outputs") {
    fixtures::TempDir dir("enc");
    auto text = source().make_text();
    auto image = source().make_image();
    save_text_encoder(text, dir / "text");
    save_image_encoder(image, dir / "image");

    EncoderSpec spec;
    spec.text_id = (dir / "text").string();
    spec.image_id = (dir / "image").string();
    spec.init_seed = 99;
    EncoderSource loaded(spec, {});
    auto text2 = loaded.make_text();
    auto image2 = loaded.make_image();
    text->eval();
    text2->eval();
    image->eval();
    image2->eval();
    CHECK(torch::equal(text->encode_pooled(kTexts), text2->encode_pooled(kTexts)));
    const auto img = constant_image(0.3f);
    CHECK(torch::equal(image->encode({&img}), image2->encode({&img})));
    CHECK_THROWS_AS(resolve_model_dir("no-such-model-anywhere"), DataError);
}
