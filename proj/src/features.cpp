#include "newsframe/features.hpp"

#include <algorithm>

#include "newsframe/errors.hpp"

namespace newsframe {

std::string to_string(Task t) { return t == Task::Frame ? "frame" : "relevance"; }

Task task_from_string(std::string_view s) {
    if (s == "frame") return Task::Frame;
    if (s == "relevance") return Task::Relevance;
    throw UsageError("unknown task '" + std::string(s) + "' (expected frame or relevance)");
}

int num_classes(Task t) { return t == Task::Frame ? kNumFrames : 2; }

int SreVector::sum() const {
    int s = 0;
    for (auto v : values) s += v;
    return s;
}

SreVector encode_sre(int subject_id, int re_id) {
    if (!valid_subject_id(subject_id)) {
        throw DataError("subject id " + std::to_string(subject_id) + " outside 1..16");
    }
    if (!valid_re_id(re_id)) {
        throw DataError("race/ethnicity id " + std::to_string(re_id) + " outside 17..19");
    }
    SreVector v;
    v.values[static_cast<std::size_t>(subject_id - 1)] = 1;
    v.values[static_cast<std::size_t>(re_id - 1)] = 1;
    return v;
}

namespace {

struct PartName {
    Part part;
    std::string_view key;
};

constexpr PartName kPartNames[] = {
    {Part::Headline, "headline"}, {Part::Api, "api"},   {Part::Caption, "caption"},
    {Part::Summary, "summary"},   {Part::First3, "first3"}, {Part::Sre, "sre"},
    {Part::Image, "resnet"},      {Part::FrameLabel, "frame"},
};

constexpr PartName kAliases[] = {
    {Part::First3, "3sentences"}, {Part::Image, "image"}, {Part::FrameLabel, "frame_label"},
};

bool is_text(Part p) { return p != Part::Sre && p != Part::Image; }

}  // namespace

std::string_view part_key(Part p) {
    for (const auto& n : kPartNames) {
        if (n.part == p) return n.key;
    }
    return "?";
}

ModalitySpec ModalitySpec::parse(Task task, std::string_view key) {
    ModalitySpec spec;
    spec.task = task;
    if (key.empty()) throw UsageError("empty modality key");
    std::size_t start = 0;
    while (start <= key.size()) {
        const auto end = std::min(key.find('+', start), key.size());
        const auto token = key.substr(start, end - start);
        std::optional<Part> part;
        for (const auto& n : kPartNames) {
            if (n.key == token) part = n.part;
        }
        for (const auto& n : kAliases) {
            if (n.key == token) part = n.part;
        }
        if (!part) throw UsageError("unknown modality part '" + std::string(token) + "' in '" + std::string(key) + "'");
        if (spec.has(*part)) throw UsageError("modality part '" + std::string(token) + "' repeated");
        spec.parts.push_back(*part);
        start = end + 1;
    }
    if (task == Task::Frame && spec.has(Part::FrameLabel)) {
        throw UsageError("the frame label cannot be an input for the frame task");
    }
    return spec;
}

std::string ModalitySpec::key() const {
    std::string out;
    for (auto p : parts) {
        if (!out.empty()) out += '+';
        out += part_key(p);
    }
    return out;
}

bool ModalitySpec::has(Part p) const { return std::find(parts.begin(), parts.end(), p) != parts.end(); }

bool ModalitySpec::has_text() const { return std::any_of(parts.begin(), parts.end(), is_text); }

std::vector<Part> ModalitySpec::text_parts() const {
    std::vector<Part> out;
    std::copy_if(parts.begin(), parts.end(), std::back_inserter(out), is_text);
    return out;
}

bool ModalitySpec::needs_image_record() const {
    return has(Part::Api) || has(Part::Caption) || has(Part::Sre) || has(Part::Image);
}

std::string top_api_tags(const std::vector<std::string>& tags) {
    std::string out;
    const auto n = std::min(tags.size(), kMaxApiTags);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += tags[i];
    }
    return out;
}

std::string build_text(const Article& article, const ImageRecord* image, const ModalitySpec& spec,
                       std::optional<Frame> frame) {
    std::string out;
    bool first = true;
    for (auto p : spec.parts) {
        if (!is_text(p)) continue;
        if ((p == Part::Api || p == Part::Caption) && !image) {
            throw DataError("article " + article.article_id + " has no image record for modality '" +
                            std::string(part_key(p)) + "'");
        }
        if (p == Part::FrameLabel && spec.task == Task::Frame) {
            throw UsageError("the frame label cannot be an input for the frame task");
        }
        if (!first) {
            out += ' ';
            out += kTextSeparator;
            out += ' ';
        }
        first = false;
        switch (p) {
            case Part::Headline: out += article.headline; break;
            case Part::Api: out += top_api_tags(image->api_tags); break;
            case Part::Caption: out += image->caption; break;
            case Part::Summary: out += article.summary; break;
            case Part::First3: out += article.first3; break;
            case Part::FrameLabel: out += (frame ? *frame : article.frame).name; break;
            default: break;
        }
    }
    return out;
}

int class_index(Task task, const Article& article, const ImageRecord* image) {
    if (task == Task::Frame) return article.frame.id - 1;
    if (!image) throw DataError("article " + article.article_id + " has no image record, so no relevance label");
    return image->relevant ? 1 : 0;
}

int class_id(Task task, int index) { return task == Task::Frame ? index + 1 : index; }

std::string class_name(Task task, int index) {
    if (task == Task::Frame) return std::string(frame_from_id(index + 1).name);
    return index == 1 ? "relevant" : "not relevant";
}

std::size_t dense_dim(const ModalitySpec& spec) {
    if (!spec.has(Part::Sre)) return 0;
    // A frame label rides in the text when there is text; otherwise one-hot.
    const bool frame_one_hot = spec.has(Part::FrameLabel) && spec.text_parts().size() == 1;
    return kSreLength + (frame_one_hot ? kNumFrames : 0);
}

Example build_example(const Article& article, const ImageRecord* image, const ModalitySpec& spec) {
    if (spec.needs_image_record() && !image) {
        throw DataError("article " + article.article_id + " has no image record but modality '" + spec.key() +
                        "' needs one");
    }
    Example ex;
    ex.article_id = article.article_id;
    ex.label = class_index(spec.task, article, image);
    const auto dim = dense_dim(spec);
    const bool text_has_content =
        spec.has_text() && !(spec.text_parts().size() == 1 && spec.has(Part::FrameLabel) && dim > kSreLength);
    if (text_has_content) ex.text = build_text(article, image, spec);
    if (dim > 0) {
        const auto sre = encode_sre(image->subject_id, image->re_id);
        ex.dense.assign(sre.values.begin(), sre.values.end());
        if (dim > kSreLength) {
            ex.dense.resize(dim, 0.0f);
            ex.dense[kSreLength + static_cast<std::size_t>(article.frame.id - 1)] = 1.0f;
        }
    }
    if (spec.has(Part::Image)) {
        if (!image->local_path) {
            throw DataError("lead image for article " + article.article_id + " is not cached; run fetch first");
        }
        ex.image_path = image->local_path;
    }
    return ex;
}

std::vector<Example> build_examples(const Corpus& corpus, const ModalitySpec& spec) {
    std::vector<Example> out;
    out.reserve(corpus.size());
    for (const auto& a : corpus.articles()) out.push_back(build_example(a, corpus.image_for(a.article_id), spec));
    return out;
}

}  // namespace newsframe
