#include <algorithm>
#include <map>

#include "rex/error.hpp"
#include "rex/metrics.hpp"
#include "rex/rerank.hpp"
#include "rex/retrieval.hpp"

namespace rex::metrics {

MetricReport evaluate_run(
    const std::vector<std::pair<rerank::RerankedList, corpus::ExpertRanking>>& paired,
    const EmbeddingProvider& provider) {
    if (paired.empty()) {
        throw ValidationError("evaluate_run: nothing to evaluate");
    }

    MetricReport report;
    for (const auto& [system, truth] : paired) {
        std::map<std::string, int> relevance;
        for (const auto& judged : truth.judged) {
            relevance[judged.item.id] = judged.relevance;
        }
        std::vector<std::string> order;
        order.reserve(system.entries.size());
        for (const auto& entry : system.entries) order.push_back(entry.item.id);

        // Expert top-1: highest relevance, ties by ascending item id (the
        // same convention the pair builder uses).
        const corpus::JudgedItem* expert_top = nullptr;
        for (const auto& judged : truth.judged) {
            if (expert_top == nullptr || judged.relevance > expert_top->relevance ||
                (judged.relevance == expert_top->relevance &&
                 judged.item.id < expert_top->item.id)) {
                expert_top = &judged;
            }
        }
        if (expert_top == nullptr || system.entries.empty()) {
            throw ValidationError("evaluate_run: empty ranking for query '" + truth.query.id +
                                  "'");
        }
        const corpus::ResponseItem& system_top = system.entries.front().item;

        QueryMetrics q;
        q.query_id = truth.query.id;
        q.ndcg5 = ndcg_at_k(order, relevance, 5);
        q.ndcg10 = ndcg_at_k(order, relevance, 10);
        q.cosine = cosine_similarity(system_top.summary, expert_top->item.summary, provider);
        q.bertscore = bertscore_f1(system_top.tokens, expert_top->item.tokens, provider);
        q.bleu = bleu(system_top.tokens, expert_top->item.tokens);
        q.rouge_l = rouge_l(system_top.tokens, expert_top->item.tokens).f1;
        report.per_query.push_back(q);

        report.ndcg5 += q.ndcg5;
        report.ndcg10 += q.ndcg10;
        report.cosine += q.cosine;
        report.bertscore += q.bertscore;
        report.bleu += q.bleu;
        report.rouge_l += q.rouge_l;
    }

    const double inv = 1.0 / static_cast<double>(paired.size());
    report.ndcg5 *= inv;
    report.ndcg10 *= inv;
    report.cosine *= inv;
    report.bertscore *= inv;
    report.bleu *= inv;
    report.rouge_l *= inv;
    return report;
}

}  // namespace rex::metrics
