#include "rex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "rex/error.hpp"
#include "rex/retrieval.hpp"

namespace rex::metrics {
namespace {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ull ^ seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

HashedNgramEmbedding::HashedNgramEmbedding(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {}

std::vector<double> HashedNgramEmbedding::embed(std::string_view token) const {
    std::vector<double> v(dim_, 0.0);
    std::string padded;
    padded.reserve(token.size() + 2);
    padded.push_back('^');
    padded.append(token);
    padded.push_back('$');
    if (padded.size() < 3) {
        v[fnv1a64(padded, seed_) % dim_] += 1.0;
        return v;
    }
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
        v[fnv1a64(std::string_view(padded).substr(i, 3), seed_) % dim_] += 1.0;
    }
    return v;
}

const EmbeddingProvider& default_embedding_provider() {
    static const HashedNgramEmbedding provider;
    return provider;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ValidationError("cosine: dimension mismatch");
    }
    double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        norm_a += a[i] * a[i];
        norm_b += b[i] * b[i];
    }
    if (norm_a <= 0.0 || norm_b <= 0.0) return 0.0;
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

std::vector<double> mean_embedding(const std::vector<std::string>& tokens,
                                   const EmbeddingProvider& provider) {
    std::vector<double> mean(provider.dimensionality(), 0.0);
    if (tokens.empty()) return mean;
    for (const auto& token : tokens) {
        const auto e = provider.embed(token);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += e[i];
    }
    const double inv = 1.0 / static_cast<double>(tokens.size());
    for (double& x : mean) x *= inv;
    return mean;
}

double ndcg_at_k(const std::vector<std::string>& system_order,
                 const std::map<std::string, int>& relevance, std::size_t k) {
    if (k == 0) {
        throw ValidationError("ndcg_at_k: k must be >= 1");
    }
    std::vector<int> gains;
    gains.reserve(system_order.size());
    for (const auto& id : system_order) {
        auto it = relevance.find(id);
        if (it == relevance.end()) {
            throw ValidationError("ndcg_at_k: no relevance for item '" + id + "'");
        }
        gains.push_back(it->second);
    }

    const std::size_t cutoff = std::min(k, gains.size());
    double dcg = 0.0;
    for (std::size_t p = 0; p < cutoff; ++p) {
        dcg += static_cast<double>(gains[p]) / std::log2(static_cast<double>(p) + 2.0);
    }

    std::vector<int> ideal = gains;
    std::sort(ideal.begin(), ideal.end(), std::greater<int>());
    double idcg = 0.0;
    for (std::size_t p = 0; p < cutoff; ++p) {
        idcg += static_cast<double>(ideal[p]) / std::log2(static_cast<double>(p) + 2.0);
    }
    if (idcg <= 0.0) return 0.0;  // every item irrelevant
    return dcg / idcg;
}

namespace {

std::unordered_map<std::string, int> ngram_counts(const std::vector<std::string>& tokens,
                                                  std::size_t n) {
    std::unordered_map<std::string, int> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key;
        for (std::size_t j = 0; j < n; ++j) {
            key += tokens[i + j];
            key.push_back('\x1f');
        }
        ++counts[key];
    }
    return counts;
}

}  // namespace

double bleu(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
            std::size_t max_n) {
    if (candidate.empty()) return 0.0;
    const std::size_t top_n = std::min(max_n, candidate.size());

    double log_precision_sum = 0.0;
    for (std::size_t n = 1; n <= top_n; ++n) {
        const auto cand = ngram_counts(candidate, n);
        const auto ref = ngram_counts(reference, n);
        long total = 0;
        long clipped = 0;
        for (const auto& [gram, count] : cand) {
            total += count;
            auto it = ref.find(gram);
            if (it != ref.end()) clipped += std::min(count, it->second);
        }
        double precision;
        if (clipped == 0) {
            if (n == 1) return 0.0;  // no unigram overlap at all
            precision = 1.0 / (static_cast<double>(total) + 1.0);  // add-1 smoothing
        } else {
            precision = static_cast<double>(clipped) / static_cast<double>(total);
        }
        log_precision_sum += std::log(precision);
    }

    const double c = static_cast<double>(candidate.size());
    const double r = static_cast<double>(reference.size());
    const double brevity = c >= r ? 1.0 : std::exp(1.0 - r / c);
    return brevity * std::exp(log_precision_sum / static_cast<double>(top_n));
}

RougeL rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference) {
    RougeL result;
    if (candidate.empty() || reference.empty()) return result;

    const std::size_t n = candidate.size();
    const std::size_t m = reference.size();
    std::vector<std::size_t> prev(m + 1, 0), curr(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            if (candidate[i - 1] == reference[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    const double lcs = static_cast<double>(prev[m]);
    if (lcs == 0.0) return result;
    result.precision = lcs / static_cast<double>(n);
    result.recall = lcs / static_cast<double>(m);
    result.f1 = 2.0 * result.precision * result.recall / (result.precision + result.recall);
    return result;
}

double cosine_similarity(const std::string& text_a, const std::string& text_b,
                         const EmbeddingProvider& provider) {
    const auto tokens_a = retrieval::tokenize(text_a);
    const auto tokens_b = retrieval::tokenize(text_b);
    if (tokens_a.empty() || tokens_b.empty()) {
        throw ValidationError("cosine_similarity: text tokenizes to nothing");
    }
    return cosine(mean_embedding(tokens_a, provider), mean_embedding(tokens_b, provider));
}

double bertscore_f1(const std::vector<std::string>& candidate,
                    const std::vector<std::string>& reference,
                    const EmbeddingProvider& provider) {
    if (candidate.empty() || reference.empty()) {
        throw ValidationError("bertscore_f1: empty token sequence");
    }
    std::vector<std::vector<double>> cand_emb, ref_emb;
    cand_emb.reserve(candidate.size());
    ref_emb.reserve(reference.size());
    for (const auto& t : candidate) cand_emb.push_back(provider.embed(t));
    for (const auto& t : reference) ref_emb.push_back(provider.embed(t));

    auto greedy = [](const std::vector<std::vector<double>>& from,
                     const std::vector<std::vector<double>>& to) {
        double sum = 0.0;
        for (const auto& f : from) {
            double best = 0.0;
            bool first = true;
            for (const auto& t : to) {
                const double sim = cosine(f, t);
                if (first || sim > best) {
                    best = sim;
                    first = false;
                }
            }
            sum += best;
        }
        return sum / static_cast<double>(from.size());
    };

    const double precision = greedy(cand_emb, ref_emb);
    const double recall = greedy(ref_emb, cand_emb);
    if (precision + recall <= 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

std::string report_csv(const std::vector<std::pair<std::string, MetricReport>>& rows) {
    std::ostringstream out;
    out << "Model,NDCG@5,NDCG@10,Cos. Sim.,BERTScore,BLEU,Rouge-L\n";
    char buf[128];
    for (const auto& [label, report] : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", label.c_str(),
                      report.ndcg5, report.ndcg10, report.cosine, report.bertscore, report.bleu,
                      report.rouge_l);
        out << buf << '\n';
    }
    return out.str();
}

}  // namespace rex::metrics
