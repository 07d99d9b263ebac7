#include "newsframe/image.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "newsframe/errors.hpp"

namespace newsframe {

namespace {

ImageTensor standardise(const cv::Mat& rgb8) {
    cv::Mat resized;
    if (rgb8.cols == kImageSide && rgb8.rows == kImageSide) {
        resized = rgb8;
    } else {
        cv::resize(rgb8, resized, cv::Size(kImageSide, kImageSide), 0, 0, cv::INTER_LINEAR);
    }
    ImageTensor t;
    t.pixels.resize(ImageTensor::kSize);
    const std::size_t plane = static_cast<std::size_t>(kImageSide) * kImageSide;
    for (int r = 0; r < kImageSide; ++r) {
        const auto* row = resized.ptr<unsigned char>(r);
        for (int c = 0; c < kImageSide; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                const float v = static_cast<float>(row[3 * c + ch]) / 255.0f;
                t.pixels[static_cast<std::size_t>(ch) * plane + static_cast<std::size_t>(r) * kImageSide + c] =
                    (v - kImageNetMean[ch]) / kImageNetStd[ch];
            }
        }
    }
    return t;
}

}  // namespace

ImageTensor preprocess_image(const std::filesystem::path& path, std::string_view article_id) {
    const std::string who = article_id.empty() ? path.string() : "article " + std::string(article_id);
    cv::Mat bgr;
    try {
        bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    } catch (const cv::Exception& e) {
        throw DataError("cannot decode image for " + who + ": " + e.what());
    }
    if (bgr.empty()) throw DataError("cannot decode image for " + who + " (" + path.string() + ")");
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    return standardise(rgb);
}

ImageTensor preprocess_rgb(std::span<const unsigned char> rgb, int width, int height) {
    if (width <= 0 || height <= 0 || rgb.size() != static_cast<std::size_t>(width) * height * 3) {
        throw DataError("RGB buffer size does not match its dimensions");
    }
    cv::Mat view(height, width, CV_8UC3, const_cast<unsigned char*>(rgb.data()));
    return standardise(view);
}

}  // namespace newsframe
