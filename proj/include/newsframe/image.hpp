#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace newsframe {

inline constexpr int kImageSide = 224;
inline constexpr std::array<float, 3> kImageNetMean{0.485f, 0.456f, 0.406f};
inline constexpr std::array<float, 3> kImageNetStd{0.229f, 0.224f, 0.225f};

/// RGB, channel-major (3 x 224 x 224), standardised per channel.
struct ImageTensor {
    std::vector<float> pixels;

    static constexpr std::size_t kSize = 3 * kImageSide * kImageSide;

    float at(int channel, int row, int col) const {
        return pixels[(static_cast<std::size_t>(channel) * kImageSide + row) * kImageSide + col];
    }
};

/// Decodes an image file (grayscale and alpha inputs become RGB), resizes it
/// to 224x224 with bilinear interpolation ignoring aspect ratio, scales to
/// [0,1] and standardises with the ImageNet channel statistics. Throws
/// DataError naming `article_id` when the file cannot be decoded.
ImageTensor preprocess_image(const std::filesystem::path& path, std::string_view article_id = {});

/// Same pipeline for an 8-bit interleaved RGB buffer of the given size.
ImageTensor preprocess_rgb(std::span<const unsigned char> rgb, int width, int height);

}  // namespace newsframe
