#include "rex/retrieval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_set>

#include "rex/error.hpp"

namespace rex::retrieval {
namespace {

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = {
        "a",  "an", "and", "are", "as",  "at", "be",  "by",  "for", "from", "in", "is",
        "it", "of", "on",  "or",  "the", "to", "was", "were", "with"};
    return words;
}

// Harman S-stemmer: conservative plural stripping.
std::string s_stem(std::string token) {
    auto ends_with = [&token](std::string_view suffix) {
        return token.size() >= suffix.size() &&
               token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with("ies") && !ends_with("eies") && !ends_with("aies")) {
        token.replace(token.size() - 3, 3, "y");
    } else if (ends_with("es") && !ends_with("aes") && !ends_with("ees") && !ends_with("oes")) {
        token.erase(token.size() - 1);
    } else if (ends_with("s") && token.size() > 1 && !ends_with("ss") && !ends_with("us")) {
        token.erase(token.size() - 1);
    }
    return token;
}

bool is_word_char(unsigned char c) {
    // Letters, digits, underscore; bytes >= 0x80 pass through so multi-byte
    // UTF-8 sequences stay inside one token.
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizeOptions& opts) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        std::string token = std::move(current);
        current.clear();
        if (opts.strip_stopwords && stopwords().count(token) > 0) return;
        if (opts.stem) token = s_stem(std::move(token));
        if (!token.empty()) tokens.push_back(std::move(token));
    };
    for (unsigned char c : text) {
        if (is_word_char(c)) {
            current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                                   : static_cast<char>(c));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::size_t InvertedIndex::document_frequency(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    return it == postings_.end() ? 0 : it->second.size();
}

std::size_t InvertedIndex::doc_length(const std::string& item_id) const {
    return item(item_id).tokens.size();
}

const std::vector<Posting>& InvertedIndex::postings(std::string_view term) const {
    static const std::vector<Posting> empty;
    auto it = postings_.find(std::string(term));
    return it == postings_.end() ? empty : it->second;
}

bool InvertedIndex::contains(const std::string& item_id) const {
    return id_to_doc_.count(item_id) > 0;
}

const corpus::ResponseItem& InvertedIndex::item(const std::string& item_id) const {
    auto it = id_to_doc_.find(item_id);
    if (it == id_to_doc_.end()) {
        throw ValidationError("item id not in index: " + item_id);
    }
    return items_[it->second];
}

InvertedIndex build_index(const std::vector<corpus::ResponseItem>& items) {
    InvertedIndex index;
    index.items_ = items;
    std::size_t total_length = 0;
    for (std::size_t doc = 0; doc < items.size(); ++doc) {
        const auto& item = items[doc];
        if (!index.id_to_doc_.emplace(item.id, doc).second) {
            throw ValidationError("duplicate item id: " + item.id);
        }
        total_length += item.tokens.size();

        std::unordered_map<std::string, int> counts;
        for (const auto& token : item.tokens) ++counts[token];
        for (const auto& [term, tf] : counts) {
            index.postings_[term].push_back(Posting{doc, tf});
        }
    }
    index.avg_doc_length_ =
        items.empty() ? 0.0 : static_cast<double>(total_length) / static_cast<double>(items.size());
    return index;
}

double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                  const std::vector<std::string>& query_tokens, const std::string& item_id) {
    const corpus::ResponseItem& item = index.item(item_id);  // throws on unknown id
    const double doc_len = static_cast<double>(item.tokens.size());

    std::unordered_map<std::string, int> counts;
    for (const auto& token : item.tokens) ++counts[token];

    double score = 0.0;
    for (const auto& q : query_tokens) {
        auto it = counts.find(q);
        if (it == counts.end()) continue;
        const std::size_t df = index.document_frequency(q);
        score += bm25_term(bm25_idf(index.size(), df), static_cast<double>(it->second), doc_len,
                           index.avg_doc_length(), params);
    }
    return score;
}

std::vector<ScoredItem> retrieve_topk(const InvertedIndex& index, const Bm25Params& params,
                                      const corpus::Query& query, std::size_t m) {
    if (m == 0) {
        throw ValidationError("retrieve_topk: m must be >= 1");
    }
    const auto query_tokens = tokenize(query.text);

    std::vector<double> scores(index.size(), 0.0);
    std::vector<char> matched(index.size(), 0);
    for (const auto& q : query_tokens) {
        const auto& plist = index.postings(q);
        if (plist.empty()) continue;
        const double idf_value = bm25_idf(index.size(), plist.size());
        for (const auto& posting : plist) {
            const double doc_len = static_cast<double>(index.items()[posting.doc].tokens.size());
            scores[posting.doc] += bm25_term(idf_value, posting.term_frequency, doc_len,
                                             index.avg_doc_length(), params);
            matched[posting.doc] = 1;
        }
    }

    std::vector<std::size_t> docs;
    for (std::size_t doc = 0; doc < index.size(); ++doc) {
        if (matched[doc]) docs.push_back(doc);
    }
    std::sort(docs.begin(), docs.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return index.items()[a].id < index.items()[b].id;
    });
    if (docs.size() > m) docs.resize(m);

    std::vector<ScoredItem> out;
    out.reserve(docs.size());
    for (std::size_t doc : docs) {
        out.push_back(ScoredItem{index.items()[doc], scores[doc]});
    }
    return out;
}

}  // namespace rex::retrieval
