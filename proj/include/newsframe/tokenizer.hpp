#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace newsframe {

/// Uncased BERT-style tokenizer: whitespace and punctuation splitting,
/// ASCII lowercasing, then greedy longest-match WordPiece. Bracketed special
/// tokens such as "[SEP]" that appear verbatim in the text are kept whole.
class WordPieceTokenizer {
public:
    static constexpr std::string_view kPad = "[PAD]";
    static constexpr std::string_view kUnk = "[UNK]";
    static constexpr std::string_view kCls = "[CLS]";
    static constexpr std::string_view kSep = "[SEP]";
    static constexpr std::string_view kMask = "[MASK]";

    WordPieceTokenizer() = default;
    explicit WordPieceTokenizer(std::vector<std::string> vocab);

    static WordPieceTokenizer from_file(const std::filesystem::path& vocab_txt);
    /// Vocabulary covering every lowercased word of `texts` plus every single
    /// character (bare and "##"-prefixed), so any word built from seen
    /// characters tokenizes without [UNK].
    static WordPieceTokenizer build(const std::vector<std::string>& texts);

    void save(const std::filesystem::path& vocab_txt) const;

    /// Whitespace/punctuation split with lowercasing (no WordPiece).
    std::vector<std::string> basic_tokens(std::string_view text) const;
    std::vector<std::string> wordpieces(std::string_view text) const;
    std::vector<std::int64_t> ids(std::string_view text) const;

    std::int64_t id_of(std::string_view token) const;
    std::int64_t pad_id() const { return id_of(kPad); }
    std::int64_t cls_id() const { return id_of(kCls); }
    std::int64_t sep_id() const { return id_of(kSep); }
    std::size_t size() const { return vocab_.size(); }
    const std::vector<std::string>& vocab() const { return vocab_; }

private:
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, std::int64_t> index_;
};

}  // namespace newsframe
