#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "fixtures.hpp"
#include "newsframe/errors.hpp"
#include "newsframe/features.hpp"
#include "newsframe/image.hpp"

using namespace newsframe;

TEST_CASE("SRE one-hot encoding over every valid pair") {
    int pairs = 0;
    for (int s = 1; s <= kNumSubjects; ++s) {
        for (int re = kFirstReId; re <= kLastReId; ++re) {
            const auto v = encode_sre(s, re);
            CHECK(v.sum() == 2);
            CHECK(v.at_position(s) == 1);
            CHECK(v.at_position(re) == 1);
            ++pairs;
        }
    }
    CHECK(pairs == 48);
    CHECK_THROWS_AS(encode_sre(0, 17), DataError);
    CHECK_THROWS_AS(encode_sre(17, 17), DataError);
    CHECK_THROWS_AS(encode_sre(1, 16), DataError);
    CHECK_THROWS_AS(encode_sre(1, 20), DataError);
}

TEST_CASE("modality keys") {
    const auto m = ModalitySpec::parse(Task::Frame, "resnet+headline+caption");
    CHECK(m.key() == "resnet+headline+caption");
    CHECK(m.has(Part::Image));
    CHECK((m.text_parts() == std::vector<Part>{Part::Headline, Part::Caption}));
    CHECK(ModalitySpec::parse(Task::Frame, "headline+3sentences").key() == "headline+first3");
    CHECK_THROWS_AS(ModalitySpec::parse(Task::Frame, "headline+bogus"), UsageError);
    CHECK_THROWS_AS(ModalitySpec::parse(Task::Frame, ""), UsageError);
    CHECK_THROWS_AS(ModalitySpec::parse(Task::Frame, "headline+headline"), UsageError);
    CHECK_THROWS_AS(ModalitySpec::parse(Task::Frame, "headline+frame"), UsageError);
    CHECK(ModalitySpec::parse(Task::Relevance, "headline+api+frame").has(Part::FrameLabel));
}

TEST_CASE("build_text keeps the first ten API tags") {
    std::mt19937_64 gen(11);
    const auto art = fixtures::article("x", "Shooting at mall", 4);
    const auto spec = ModalitySpec::parse(Task::Frame, "api");
    for (int trial = 0; trial < 50; ++trial) {
        auto im = fixtures::image("x", 1, 17, true);
        im.api_tags.clear();
        const auto n = gen() % 25;
        for (std::size_t i = 0; i < n; ++i) im.api_tags.push_back("t" + std::to_string(gen() % 1000) + "_" + std::to_string(i));
        std::string expected;
        for (std::size_t i = 0; i < std::min<std::size_t>(10, n); ++i) expected += (i ? " " : "") + im.api_tags[i];
        CHECK(build_text(art, &im, spec) == expected);
    }
}

TEST_CASE("build_text joins parts with the separator and appends the frame name last") {
    std::mt19937_64 gen(5);
    const auto art = fixtures::article("x", "Senate passes bill", 1);
    auto im = fixtures::image("x", 1, 17, true);
    im.caption = "Lawmakers gather";
    CHECK(build_text(art, &im, ModalitySpec::parse(Task::Frame, "headline+caption")) ==
          "Senate passes bill [SEP] Lawmakers gather");
    for (int trial = 0; trial < 30; ++trial) {
        im.api_tags.clear();
        for (std::size_t i = 0; i < gen() % 15; ++i) im.api_tags.push_back("tag" + std::to_string(i));
        const auto spec = ModalitySpec::parse(Task::Relevance, "headline+api+frame");
        const auto text = build_text(art, &im, spec);
        const std::string suffix = " [SEP] Politics";
        REQUIRE(text.size() > suffix.size());
        CHECK(text.substr(text.size() - suffix.size()) == suffix);
        CHECK(text.starts_with("Senate passes bill [SEP] "));
        const auto other = build_text(art, &im, spec, frame_from_id(7));
        CHECK(other.ends_with(" [SEP] Mental Health"));
    }
    CHECK_THROWS_AS(build_text(art, nullptr, ModalitySpec::parse(Task::Frame, "api")), DataError);
}

TEST_CASE("examples and dense features") {
    const auto c = fixtures::subject_separable_corpus(9);
    const auto sre = ModalitySpec::parse(Task::Frame, "sre");
    CHECK(dense_dim(sre) == 19);
    const auto ex = build_examples(c, sre);
    REQUIRE(ex.size() == 9);
    CHECK(ex[3].label == 3);
    CHECK(ex[3].dense[3] == 1.0f);
    CHECK(ex[3].text.empty());

    const auto sre_frame = ModalitySpec::parse(Task::Relevance, "sre+frame");
    CHECK(dense_dim(sre_frame) == 28);
    const auto rex = build_examples(c, sre_frame);
    CHECK(rex[2].dense.size() == 28);
    CHECK(rex[2].dense[19 + 2] == 1.0f);
    CHECK(rex[2].text.empty());
    CHECK(rex[0].label == 0);
    CHECK(rex[1].label == 1);

    const auto sre_text = ModalitySpec::parse(Task::Relevance, "sre+headline+api+frame");
    CHECK(dense_dim(sre_text) == 19);
    CHECK(build_examples(c, sre_text)[0].text.ends_with("[SEP] Politics"));

    const auto img = ModalitySpec::parse(Task::Frame, "resnet");
    CHECK_THROWS_AS(build_examples(c, img), DataError);
}

TEST_CASE("image preprocessing") {
    fixtures::TempDir dir("img");
    const float gray = 128.0f / 255.0f;

    SUBCASE("uniform colour image is standardised per channel") {
        cv::Mat m(448, 448, CV_8UC3, cv::Scalar(128, 128, 128));
        const auto p = dir / "g.png";
        cv::imwrite(p.string(), m);
        const auto t = preprocess_image(p);
        REQUIRE(t.pixels.size() == ImageTensor::kSize);
        for (int c = 0; c < 3; ++c) {
            const float want = (gray - kImageNetMean[c]) / kImageNetStd[c];
            CHECK(t.at(c, 0, 0) == doctest::Approx(want).epsilon(1e-5));
            CHECK(t.at(c, 223, 111) == doctest::Approx(want).epsilon(1e-5));
        }
    }
    SUBCASE("channels come out in RGB order") {
        cv::Mat m(224, 224, CV_8UC3, cv::Scalar(0, 0, 255));  // pure red in BGR
        const auto p = dir / "r.png";
        cv::imwrite(p.string(), m);
        const auto t = preprocess_image(p);
        CHECK(t.at(0, 10, 10) == doctest::Approx((1.0f - kImageNetMean[0]) / kImageNetStd[0]).epsilon(1e-5));
        CHECK(t.at(2, 10, 10) == doctest::Approx((0.0f - kImageNetMean[2]) / kImageNetStd[2]).epsilon(1e-5));
    }
    SUBCASE("an image already at 224 keeps its pixels") {
        cv::Mat m(224, 224, CV_8UC3);
        cv::randu(m, 0, 256);
        const auto p = dir / "n.png";
        cv::imwrite(p.string(), m);
        const auto t = preprocess_image(p);
        for (int r : {0, 57, 223}) {
            const auto px = m.at<cv::Vec3b>(r, r);
            CHECK(t.at(0, r, r) == doctest::Approx((px[2] / 255.0f - kImageNetMean[0]) / kImageNetStd[0]).epsilon(1e-5));
            CHECK(t.at(1, r, r) == doctest::Approx((px[1] / 255.0f - kImageNetMean[1]) / kImageNetStd[1]).epsilon(1e-5));
        }
    }
    SUBCASE("grayscale input becomes three identical channels") {
        cv::Mat m(100, 50, CV_8UC1, cv::Scalar(128));
        const auto p = dir / "gray.png";
        cv::imwrite(p.string(), m);
        const auto t = preprocess_image(p);
        for (int c = 0; c < 3; ++c) {
            CHECK(t.at(c, 5, 5) == doctest::Approx((gray - kImageNetMean[c]) / kImageNetStd[c]).epsilon(1e-5));
        }
    }
    SUBCASE("undecodable file names the article") {
        const auto p = dir / "bad.jpg";
        std::ofstream(p) << "not an image";
        try {
            preprocess_image(p, "article-77");
            FAIL("expected an error");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("article-77") != std::string::npos);
        }
    }
}
