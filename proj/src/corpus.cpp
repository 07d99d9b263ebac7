#include "newsframe/corpus.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "newsframe/csv.hpp"
#include "newsframe/errors.hpp"

namespace newsframe {

namespace {

constexpr std::size_t kNoImage = static_cast<std::size_t>(-1);
constexpr std::size_t kNumColumns = std::size(kCorpusColumns);

enum Column : std::size_t {
    kArticleId,
    kHeadline,
    kUrl,
    kFrameId,
    kSummary,
    kFirst3,
    kImageUri,
    kApiTags,
    kCaption,
    kSubjectId,
    kReId,
    kRelevant,
};

[[noreturn]] void row_error(std::size_t row, const std::string& what) {
    throw DataError("row " + std::to_string(row) + ": " + what);
}

int parse_int(const std::string& s, std::size_t row, std::string_view column) {
    int value = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || s.empty()) {
        row_error(row, std::string(column) + " is not an integer: '" + s + "'");
    }
    return value;
}

std::vector<std::string> parse_tags(const std::string& s, std::size_t row) {
    if (s.empty()) return {};
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(s);
    } catch (const nlohmann::json::parse_error& e) {
        row_error(row, std::string("api_tags is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) row_error(row, "api_tags must be a JSON array");
    std::vector<std::string> tags;
    tags.reserve(j.size());
    for (const auto& t : j) {
        if (!t.is_string()) row_error(row, "api_tags entries must be strings");
        tags.push_back(t.get<std::string>());
    }
    return tags;
}

}  // namespace

Corpus::Corpus(std::vector<Article> articles, std::vector<ImageRecord> images)
    : articles_(std::move(articles)), images_(std::move(images)) {
    std::unordered_map<std::string_view, std::size_t> by_id;
    by_id.reserve(articles_.size());
    for (std::size_t i = 0; i < articles_.size(); ++i) {
        const auto& a = articles_[i];
        if (a.article_id.empty()) throw DataError("article with empty article_id");
        if (a.headline.empty()) throw DataError("article " + a.article_id + " has an empty headline");
        if (a.frame.id < 1 || a.frame.id > kNumFrames) {
            throw DataError("article " + a.article_id + " has no valid frame");
        }
        if (!by_id.emplace(a.article_id, i).second) {
            throw DataError("duplicate article_id " + a.article_id);
        }
    }
    image_index_.assign(articles_.size(), kNoImage);
    for (std::size_t j = 0; j < images_.size(); ++j) {
        const auto& im = images_[j];
        auto it = by_id.find(im.article_id);
        if (it == by_id.end()) {
            throw DataError("image record refers to unknown article " + im.article_id);
        }
        if (!valid_subject_id(im.subject_id) || !valid_re_id(im.re_id)) {
            throw DataError("image record for " + im.article_id + " has SRE ids out of range");
        }
        if (image_index_[it->second] != kNoImage) {
            throw DataError("article " + im.article_id + " has more than one image record");
        }
        image_index_[it->second] = j;
    }
    for (std::size_t i = 0; i < articles_.size(); ++i) position_.emplace(articles_[i].article_id, i);
}

const Article* Corpus::find_article(std::string_view id) const {
    auto it = position_.find(std::string(id));
    return it == position_.end() ? nullptr : &articles_[it->second];
}

const ImageRecord* Corpus::image_for(std::string_view article_id) const {
    auto it = position_.find(std::string(article_id));
    if (it == position_.end() || image_index_[it->second] == kNoImage) return nullptr;
    return &images_[image_index_[it->second]];
}

Corpus Corpus::relevant_only() const {
    std::vector<Article> arts;
    std::vector<ImageRecord> ims;
    for (std::size_t i = 0; i < articles_.size(); ++i) {
        if (image_index_[i] == kNoImage) continue;
        const auto& im = images_[image_index_[i]];
        if (!im.relevant) continue;
        arts.push_back(articles_[i]);
        ims.push_back(im);
    }
    return Corpus(std::move(arts), std::move(ims));
}

Corpus Corpus::with_image_cache(const std::filesystem::path& cache_dir) const {
    auto ims = images_;
    for (auto& im : ims) {
        auto p = image_cache_path(cache_dir, im.article_id);
        std::error_code ec;
        if (std::filesystem::is_regular_file(p, ec) && std::filesystem::file_size(p, ec) > 0) {
            im.local_path = p;
        }
    }
    return Corpus(articles_, std::move(ims));
}

Corpus parse_corpus(std::istream& in, std::string_view schema_version) {
    if (schema_version != kSchemaVersion) {
        throw DataError("unsupported corpus schema version '" + std::string(schema_version) +
                        "' (expected " + std::string(kSchemaVersion) + ")");
    }
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header) throw DataError("corpus file is empty (missing header)");
    if (!header->empty() && header->front().starts_with("\xEF\xBB\xBF")) {
        header->front().erase(0, 3);
    }
    if (header->size() != kNumColumns) {
        throw DataError("header has " + std::to_string(header->size()) + " columns, expected " +
                        std::to_string(kNumColumns));
    }
    for (std::size_t c = 0; c < kNumColumns; ++c) {
        if ((*header)[c] != kCorpusColumns[c]) {
            throw DataError("header column " + std::to_string(c + 1) + " is '" + (*header)[c] +
                            "', expected '" + std::string(kCorpusColumns[c]) + "'");
        }
    }

    std::vector<Article> articles;
    std::vector<ImageRecord> images;
    std::unordered_map<std::string, std::size_t> seen;
    std::size_t row_no = 0;
    while (auto row = reader.next()) {
        ++row_no;
        if (row->size() == 1 && row->front().empty()) continue;  // blank line
        if (row->size() != kNumColumns) {
            row_error(row_no, "has " + std::to_string(row->size()) + " fields, expected " +
                                  std::to_string(kNumColumns));
        }
        auto& r = *row;
        Article a;
        a.article_id = r[kArticleId];
        if (a.article_id.empty()) row_error(row_no, "article_id is empty");
        if (auto [it, inserted] = seen.emplace(a.article_id, row_no); !inserted) {
            row_error(row_no, "duplicate article_id '" + a.article_id + "' (first seen in row " +
                                  std::to_string(it->second) + ")");
        }
        a.headline = r[kHeadline];
        if (a.headline.empty()) row_error(row_no, "headline is empty");
        a.url = r[kUrl];
        const int frame_id = parse_int(r[kFrameId], row_no, "frame_id");
        if (frame_id < 1 || frame_id > kNumFrames) {
            row_error(row_no, "frame_id " + std::to_string(frame_id) + " outside 1..9");
        }
        a.frame = frame_from_id(frame_id);
        a.summary = r[kSummary];
        a.first3 = r[kFirst3];

        if (r[kImageUri].empty()) {
            for (auto c : {kApiTags, kCaption, kSubjectId, kReId, kRelevant}) {
                if (!r[c].empty()) {
                    row_error(row_no, std::string(kCorpusColumns[c]) + " given without image_uri");
                }
            }
        } else {
            ImageRecord im;
            im.article_id = a.article_id;
            im.image_uri = r[kImageUri];
            im.api_tags = parse_tags(r[kApiTags], row_no);
            im.caption = r[kCaption];
            im.subject_id = parse_int(r[kSubjectId], row_no, "subject_id");
            if (!valid_subject_id(im.subject_id)) {
                row_error(row_no, "subject_id " + std::to_string(im.subject_id) + " outside 1..16");
            }
            im.re_id = parse_int(r[kReId], row_no, "re_id");
            if (!valid_re_id(im.re_id)) {
                row_error(row_no, "re_id " + std::to_string(im.re_id) + " outside 17..19");
            }
            if (r[kRelevant] == "1") {
                im.relevant = true;
            } else if (r[kRelevant] == "0") {
                im.relevant = false;
            } else {
                row_error(row_no, "relevant must be 0 or 1, got '" + r[kRelevant] + "'");
            }
            images.push_back(std::move(im));
        }
        articles.push_back(std::move(a));
    }
    return Corpus(std::move(articles), std::move(images));
}

Corpus load_corpus(const std::filesystem::path& path, std::string_view schema_version) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file " + path.string());
    return parse_corpus(in, schema_version);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
    csv::Row header(std::begin(kCorpusColumns), std::end(kCorpusColumns));
    csv::write_row(out, header);
    for (const auto& a : corpus.articles()) {
        csv::Row r(kNumColumns);
        r[kArticleId] = a.article_id;
        r[kHeadline] = a.headline;
        r[kUrl] = a.url;
        r[kFrameId] = std::to_string(a.frame.id);
        r[kSummary] = a.summary;
        r[kFirst3] = a.first3;
        if (const auto* im = corpus.image_for(a.article_id)) {
            r[kImageUri] = im->image_uri;
            r[kApiTags] = nlohmann::json(im->api_tags).dump();
            r[kCaption] = im->caption;
            r[kSubjectId] = std::to_string(im->subject_id);
            r[kReId] = std::to_string(im->re_id);
            r[kRelevant] = im->relevant ? "1" : "0";
        }
        csv::write_row(out, r);
    }
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write corpus file " + path.string());
    write_corpus(out, corpus);
}

std::filesystem::path image_cache_path(const std::filesystem::path& cache_dir,
                                       std::string_view article_id) {
    std::string name;
    for (unsigned char ch : article_id) {
        if (std::isalnum(ch) || ch == '-' || ch == '_' || ch == '.') {
            name.push_back(static_cast<char>(ch));
        } else {
            static constexpr char hex[] = "0123456789ABCDEF";
            name.push_back('%');
            name.push_back(hex[ch >> 4]);
            name.push_back(hex[ch & 0xF]);
        }
    }
    if (name == "." || name == "..") name = "%2E" + name.substr(1);
    return cache_dir / (name + ".img");
}

std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

}  // namespace newsframe
