#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newsframe/corpus.hpp"
#include "newsframe/image.hpp"

namespace newsframe {

enum class Task { Frame, Relevance };

std::string to_string(Task t);
Task task_from_string(std::string_view s);
/// 9 for the frame task, 2 for relevance.
int num_classes(Task t);

/// 19 binary slots: positions 1..16 one-hot subject, 17..19 one-hot
/// race/ethnicity. Index p-1 holds position p.
struct SreVector {
    std::array<std::uint8_t, kSreLength> values{};

    std::uint8_t at_position(int position) const { return values.at(static_cast<std::size_t>(position - 1)); }
    int sum() const;
};

/// Throws DataError for ids outside 1..16 / 17..19.
SreVector encode_sre(int subject_id, int re_id);

enum class Part { Headline, Api, Caption, Summary, First3, Sre, Image, FrameLabel };

std::string_view part_key(Part p);

/// Which inputs a model consumes, in order. Canonical text form joins part
/// keys with '+', e.g. "headline+api", "resnet+headline+caption", "sre".
struct ModalitySpec {
    Task task = Task::Frame;
    std::vector<Part> parts;

    /// Throws UsageError on unknown or repeated keys, an empty key, or a
    /// frame label on the frame task.
    static ModalitySpec parse(Task task, std::string_view key);

    std::string key() const;
    bool has(Part p) const;
    bool has_text() const;
    std::vector<Part> text_parts() const;
    /// api, caption, sre and image parts read the article's ImageRecord.
    bool needs_image_record() const;

    friend bool operator==(const ModalitySpec&, const ModalitySpec&) = default;
};

/// Separator placed between text parts: the text encoder's sentence
/// separator token.
inline constexpr std::string_view kTextSeparator = "[SEP]";
inline constexpr std::size_t kMaxApiTags = 10;

/// First min(10, n) tags joined by single spaces.
std::string top_api_tags(const std::vector<std::string>& tags);

/// Joins the spec's text parts in spec order as "a [SEP] b". The frame part
/// renders the frame's canonical name: `frame` when given, otherwise the
/// article's gold frame. Throws DataError when an image-derived part is
/// requested without an ImageRecord and UsageError for a frame label on the
/// frame task.
std::string build_text(const Article& article, const ImageRecord* image, const ModalitySpec& spec,
                       std::optional<Frame> frame = std::nullopt);

/// Class index (0-based) of an article for a task: frame id - 1, or the
/// relevance flag. Throws DataError when relevance is requested for an
/// article without an image record.
int class_index(Task task, const Article& article, const ImageRecord* image);
/// External class id of a class index: frame ids 1..9, relevance 0/1.
int class_id(Task task, int index);
std::string class_name(Task task, int index);

/// One fully assembled model input.
struct Example {
    std::string article_id;
    std::string text;          ///< joined text parts; empty when the spec has none
    std::vector<float> dense;  ///< SRE one-hot, plus a frame one-hot for SRE-only relevance specs
    std::optional<std::filesystem::path> image_path;
    std::shared_ptr<const ImageTensor> pixels;  ///< preloaded image, takes precedence over image_path
    int label = 0;                               ///< class index
};

/// Builds one Example per article. Throws DataError when an article lacks
/// an input the spec needs (image record, cached image file).
std::vector<Example> build_examples(const Corpus& corpus, const ModalitySpec& spec);
Example build_example(const Article& article, const ImageRecord* image, const ModalitySpec& spec);

/// Length of Example::dense for a spec.
std::size_t dense_dim(const ModalitySpec& spec);

}  // namespace newsframe
