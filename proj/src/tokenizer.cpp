#include "newsframe/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "newsframe/errors.hpp"

namespace newsframe {

namespace {

constexpr std::size_t kMaxWordChars = 100;

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_punct(unsigned char c) {
    return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) || (c >= 123 && c <= 126);
}

bool is_control(unsigned char c) { return (c < 32 && !is_space(c)) || c == 127; }

constexpr std::string_view kSpecials[] = {WordPieceTokenizer::kPad, WordPieceTokenizer::kUnk,
                                          WordPieceTokenizer::kCls, WordPieceTokenizer::kSep,
                                          WordPieceTokenizer::kMask};

/// Length of a UTF-8 sequence from its lead byte (1 for stray bytes).
std::size_t utf8_len(unsigned char lead) {
    if (lead >= 0xF0) return 4;
    if (lead >= 0xE0) return 3;
    if (lead >= 0xC0) return 2;
    return 1;
}

}  // namespace

WordPieceTokenizer::WordPieceTokenizer(std::vector<std::string> vocab) : vocab_(std::move(vocab)) {
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        index_.emplace(vocab_[i], static_cast<std::int64_t>(i));
    }
    for (auto s : kSpecials) {
        if (!index_.contains(std::string(s))) {
            throw DataError("vocabulary lacks special token " + std::string(s));
        }
    }
}

WordPieceTokenizer WordPieceTokenizer::from_file(const std::filesystem::path& vocab_txt) {
    std::ifstream in(vocab_txt);
    if (!in) throw DataError("cannot open vocabulary " + vocab_txt.string());
    std::vector<std::string> vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        vocab.push_back(line);
    }
    return WordPieceTokenizer(std::move(vocab));
}

WordPieceTokenizer WordPieceTokenizer::build(const std::vector<std::string>& texts) {
    std::vector<std::string> vocab(std::begin(kSpecials), std::end(kSpecials));
    // basic_tokens does not consult the vocabulary.
    WordPieceTokenizer probe;
    std::set<std::string> words;
    std::set<std::string> chars;
    for (const auto& t : texts) {
        for (auto& w : probe.basic_tokens(t)) {
            for (std::size_t i = 0; i < w.size();) {
                const auto n = std::min(utf8_len(static_cast<unsigned char>(w[i])), w.size() - i);
                chars.insert(w.substr(i, n));
                i += n;
            }
            words.insert(std::move(w));
        }
    }
    for (const auto& s : kSpecials) words.erase(std::string(s));
    std::set<std::string> all(words.begin(), words.end());
    for (const auto& c : chars) {
        all.insert(c);
        all.insert("##" + c);
    }
    vocab.insert(vocab.end(), all.begin(), all.end());
    return WordPieceTokenizer(std::move(vocab));
}

void WordPieceTokenizer::save(const std::filesystem::path& vocab_txt) const {
    std::ofstream out(vocab_txt);
    if (!out) throw DataError("cannot write vocabulary " + vocab_txt.string());
    for (const auto& v : vocab_) out << v << '\n';
}

std::vector<std::string> WordPieceTokenizer::basic_tokens(std::string_view text) const {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (c == '[') {
            bool special = false;
            for (auto s : kSpecials) {
                if (text.substr(i, s.size()) == s) {
                    flush();
                    out.emplace_back(s);
                    i += s.size() - 1;
                    special = true;
                    break;
                }
            }
            if (special) continue;
        }
        if (is_space(c)) {
            flush();
        } else if (is_control(c) || c == 0) {
            continue;
        } else if (is_punct(c)) {
            flush();
            out.emplace_back(1, static_cast<char>(c));
        } else {
            cur.push_back(c < 128 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
        }
    }
    flush();
    return out;
}

std::vector<std::string> WordPieceTokenizer::wordpieces(std::string_view text) const {
    std::vector<std::string> out;
    for (const auto& word : basic_tokens(text)) {
        if (index_.contains(word)) {
            out.push_back(word);
            continue;
        }
        if (word.size() > kMaxWordChars) {
            out.emplace_back(kUnk);
            continue;
        }
        std::vector<std::string> pieces;
        std::size_t start = 0;
        bool bad = false;
        while (start < word.size()) {
            std::size_t end = word.size();
            std::string found;
            while (start < end) {
                std::string sub = word.substr(start, end - start);
                if (start > 0) sub = "##" + sub;
                if (index_.contains(sub)) {
                    found = std::move(sub);
                    break;
                }
                // step back one whole UTF-8 character
                do {
                    --end;
                } while (end > start && (static_cast<unsigned char>(word[end]) & 0xC0) == 0x80);
            }
            if (found.empty()) {
                bad = true;
                break;
            }
            pieces.push_back(std::move(found));
            start = end;
        }
        if (bad) {
            out.emplace_back(kUnk);
        } else {
            out.insert(out.end(), pieces.begin(), pieces.end());
        }
    }
    return out;
}

std::vector<std::int64_t> WordPieceTokenizer::ids(std::string_view text) const {
    std::vector<std::int64_t> out;
    for (const auto& p : wordpieces(text)) out.push_back(id_of(p));
    return out;
}

std::int64_t WordPieceTokenizer::id_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it != index_.end()) return it->second;
    return index_.at(std::string(kUnk));
}

}  // namespace newsframe
