#include "rex/training.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "rex/error.hpp"
#include "rex/io.hpp"

namespace rex::training {
namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// -log sigmoid(z), stable on both tails.
double softplus_neg(double z) {
    if (z >= 0.0) return std::log1p(std::exp(-z));
    return -z + std::log1p(std::exp(z));
}

double dot(const std::vector<double>& w, const scorer::FeatureVector& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < scorer::kFeatureDim; ++i) s += w[i] * f.values[i];
    return s;
}

scorer::FeatureVector diff(const PreferenceExample& pair) {
    scorer::FeatureVector d;
    for (std::size_t i = 0; i < scorer::kFeatureDim; ++i) {
        d.values[i] = pair.positive.values[i] - pair.negative.values[i];
    }
    return d;
}

void require_dim(const std::vector<double>& w, const char* what) {
    if (w.size() != scorer::kFeatureDim) {
        throw ValidationError(std::string(what) + " has dimension " + std::to_string(w.size()) +
                              ", expected " + std::to_string(scorer::kFeatureDim));
    }
}

}  // namespace

std::string objective_name(Objective o) {
    switch (o) {
        case Objective::pointwise_sft: return "pointwise_sft";
        case Objective::pairwise_reward: return "pairwise_reward";
        case Objective::pairwise_dpo: return "pairwise_dpo";
        case Objective::ppo_proximal: return "ppo_proximal";
    }
    return "unknown";
}

std::optional<Objective> objective_from_name(std::string_view name) {
    if (name == "pointwise_sft") return Objective::pointwise_sft;
    if (name == "pairwise_reward") return Objective::pairwise_reward;
    if (name == "pairwise_dpo") return Objective::pairwise_dpo;
    if (name == "ppo_proximal") return Objective::ppo_proximal;
    return std::nullopt;
}

void validate(const TrainConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
    if (cfg.epochs < 0) throw ValidationError("epochs must be >= 0");
    if (cfg.batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (!(cfg.beta > 0.0)) throw ValidationError("beta must be > 0");
    if (cfg.lambda_prox < 0.0) throw ValidationError("lambda_prox must be >= 0");
}

std::vector<PointwiseExample> to_pointwise(const std::vector<corpus::ExpertRanking>& data,
                                           const retrieval::InvertedIndex& index,
                                           const retrieval::Bm25Params& params) {
    std::vector<PointwiseExample> out;
    for (const auto& ranking : data) {
        for (const auto& judged : ranking.judged) {
            out.push_back(PointwiseExample{
                scorer::extract_features(ranking.query, judged.item, index, params),
                static_cast<double>(judged.relevance)});
        }
    }
    return out;
}

std::vector<PreferenceExample> to_preference(const std::vector<corpus::PreferencePair>& pairs,
                                             const retrieval::InvertedIndex& index,
                                             const retrieval::Bm25Params& params) {
    std::vector<PreferenceExample> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
        out.push_back(PreferenceExample{
            scorer::extract_features(pair.query, pair.positive, index, params),
            scorer::extract_features(pair.query, pair.negative, index, params)});
    }
    return out;
}

double ObjectiveInstance::loss(const std::vector<double>& weights) const {
    require_dim(weights, "weights");
    double total = 0.0;
    std::size_t count = 0;
    switch (objective) {
        case Objective::pointwise_sft:
            for (const auto& ex : pointwise) {
                const double e = dot(weights, ex.features) - ex.relevance / 9.0;
                total += e * e;
            }
            count = pointwise.size();
            break;
        case Objective::pairwise_reward:
            for (const auto& pair : pairs) {
                total += softplus_neg(dot(weights, diff(pair)));
            }
            count = pairs.size();
            break;
        case Objective::pairwise_dpo:
            for (const auto& pair : pairs) {
                const double anchored = dot(weights, diff(pair)) - dot(reference, diff(pair));
                total += softplus_neg(beta * anchored);
            }
            count = pairs.size();
            break;
        case Objective::ppo_proximal: {
            for (const auto& pair : pairs) {
                // relabel by the reward model's preference
                const double d_reward = dot(reward, diff(pair));
                const double z = dot(weights, diff(pair));
                total += softplus_neg(d_reward >= 0.0 ? z : -z);
            }
            count = pairs.size();
            break;
        }
    }
    double mean = count > 0 ? total / static_cast<double>(count) : 0.0;
    if (objective == Objective::ppo_proximal) {
        double prox = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const double d = weights[i] - reference[i];
            prox += d * d;
        }
        mean += lambda_prox * prox;
    }
    return mean;
}

std::vector<double> ObjectiveInstance::gradient(const std::vector<double>& weights) const {
    require_dim(weights, "weights");
    std::vector<double> g(scorer::kFeatureDim, 0.0);
    std::size_t count = 0;
    switch (objective) {
        case Objective::pointwise_sft:
            for (const auto& ex : pointwise) {
                const double e = dot(weights, ex.features) - ex.relevance / 9.0;
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += 2.0 * e * ex.features[i];
            }
            count = pointwise.size();
            break;
        case Objective::pairwise_reward:
            for (const auto& pair : pairs) {
                const auto d = diff(pair);
                const double c = -sigmoid(-dot(weights, d));
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * d.values[i];
            }
            count = pairs.size();
            break;
        case Objective::pairwise_dpo:
            for (const auto& pair : pairs) {
                const auto d = diff(pair);
                const double anchored = dot(weights, d) - dot(reference, d);
                const double c = -sigmoid(-beta * anchored) * beta;
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * d.values[i];
            }
            count = pairs.size();
            break;
        case Objective::ppo_proximal:
            for (const auto& pair : pairs) {
                auto d = diff(pair);
                if (dot(reward, d) < 0.0) {
                    for (double& x : d.values) x = -x;
                }
                const double c = -sigmoid(-dot(weights, d));
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * d.values[i];
            }
            count = pairs.size();
            break;
    }
    if (count > 0) {
        const double inv = 1.0 / static_cast<double>(count);
        for (double& x : g) x *= inv;
    }
    if (objective == Objective::ppo_proximal) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] += 2.0 * lambda_prox * (weights[i] - reference[i]);
        }
    }
    return g;
}

double gradient_check(const ObjectiveInstance& instance, const std::vector<double>& weights,
                      double epsilon) {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
    const auto analytic = instance.gradient(weights);
    double worst = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        std::vector<double> plus = weights, minus = weights;
        plus[i] += epsilon;
        minus[i] -= epsilon;
        const double fd = (instance.loss(plus) - instance.loss(minus)) / (2.0 * epsilon);
        const double denom = std::max({1.0, std::abs(analytic[i]), std::abs(fd)});
        worst = std::max(worst, std::abs(analytic[i] - fd) / denom);
    }
    return worst;
}

double dpo_logit(const scorer::LinearScorer& s, const scorer::LinearScorer& reference,
                 const PreferenceExample& pair, double beta) {
    require_dim(s.weights, "scorer");
    require_dim(reference.weights, "reference scorer");
    const auto d = diff(pair);
    return beta * (dot(s.weights, d) - dot(reference.weights, d));
}

double pairwise_accuracy(const scorer::LinearScorer& s,
                         const std::vector<PreferenceExample>& pairs) {
    if (pairs.empty()) return 0.0;
    double correct = 0.0;
    for (const auto& pair : pairs) {
        const double sp = scorer::score(s, pair.positive);
        const double sn = scorer::score(s, pair.negative);
        if (sp > sn) {
            correct += 1.0;
        } else if (sp == sn) {
            correct += 0.5;
        }
    }
    return correct / static_cast<double>(pairs.size());
}

namespace {

// Mini-batch gradient descent shared by all objectives. The per-batch
// gradient is the mean over the shuffled batch in a fixed accumulation
// order; the ppo objective applies its quadratic term as a proximal step,
// which stays contractive for arbitrarily large lambda.
TrainResult run_descent(const ObjectiveInstance& instance, const TrainConfig& cfg,
                        std::vector<double> weights) {
    validate(cfg);
    const std::size_t n = instance.objective == Objective::pointwise_sft
                              ? instance.pointwise.size()
                              : instance.pairs.size();

    TrainReport report;
    report.objective = instance.objective;
    report.weights_before = weights;
    report.initial_loss = instance.loss(weights);

    ObjectiveInstance batch_view = instance;  // reuses beta/lambda/refs
    const bool proximal = instance.objective == Objective::ppo_proximal;
    if (proximal) batch_view.lambda_prox = 0.0;  // handled by the proximal step

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(cfg.seed);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
        }
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t end = std::min(n, start + cfg.batch_size);
            if (instance.objective == Objective::pointwise_sft) {
                batch_view.pointwise.clear();
                for (std::size_t i = start; i < end; ++i) {
                    batch_view.pointwise.push_back(instance.pointwise[order[i]]);
                }
            } else {
                batch_view.pairs.clear();
                for (std::size_t i = start; i < end; ++i) {
                    batch_view.pairs.push_back(instance.pairs[order[i]]);
                }
            }
            const auto g = batch_view.gradient(weights);
            for (std::size_t i = 0; i < weights.size(); ++i) {
                weights[i] -= cfg.learning_rate * g[i];
            }
            if (proximal) {
                const double shrink = 2.0 * instance.lambda_prox * cfg.learning_rate;
                for (std::size_t i = 0; i < weights.size(); ++i) {
                    weights[i] = (weights[i] + shrink * instance.reference[i]) / (1.0 + shrink);
                }
            }
        }
        const double epoch_loss = instance.loss(weights);
        if (!std::isfinite(epoch_loss)) {
            throw Error("training diverged: non-finite loss after epoch " +
                        std::to_string(epoch + 1) + " (objective " +
                        objective_name(instance.objective) + ", lr " +
                        std::to_string(cfg.learning_rate) + ")");
        }
        report.epoch_losses.push_back(epoch_loss);
    }

    TrainResult result;
    result.scorer.weights = std::move(weights);
    result.scorer.feature_spec = scorer::kFeatureSpecId;
    if (instance.objective == Objective::pointwise_sft) {
        // All-pairs ordering accuracy over the labelled examples.
        double correct = 0.0;
        std::size_t total = 0;
        for (std::size_t i = 0; i < instance.pointwise.size(); ++i) {
            for (std::size_t j = i + 1; j < instance.pointwise.size(); ++j) {
                const auto& a = instance.pointwise[i];
                const auto& b = instance.pointwise[j];
                if (a.relevance == b.relevance) continue;
                ++total;
                const double sa = scorer::score(result.scorer, a.features);
                const double sb = scorer::score(result.scorer, b.features);
                const bool want_a = a.relevance > b.relevance;
                if (sa == sb) {
                    correct += 0.5;
                } else if ((sa > sb) == want_a) {
                    correct += 1.0;
                }
            }
        }
        report.pairwise_accuracy = total > 0 ? correct / static_cast<double>(total) : 0.0;
    } else {
        report.pairwise_accuracy = pairwise_accuracy(result.scorer, instance.pairs);
    }
    report.weights_after = result.scorer.weights;
    result.report = std::move(report);
    return result;
}

}  // namespace

TrainResult train_pointwise_sft(const std::vector<PointwiseExample>& data,
                                const TrainConfig& cfg) {
    if (data.empty()) throw ValidationError("train_pointwise_sft: no data");
    ObjectiveInstance instance;
    instance.objective = Objective::pointwise_sft;
    instance.pointwise = data;
    return run_descent(instance, cfg, std::vector<double>(scorer::kFeatureDim, 0.0));
}

TrainResult train_pairwise_reward(const std::vector<PreferenceExample>& pairs,
                                  const TrainConfig& cfg) {
    if (pairs.empty()) throw ValidationError("train_pairwise_reward: no pairs");
    ObjectiveInstance instance;
    instance.objective = Objective::pairwise_reward;
    instance.pairs = pairs;
    return run_descent(instance, cfg, std::vector<double>(scorer::kFeatureDim, 0.0));
}

TrainResult train_pairwise_dpo(const std::vector<PreferenceExample>& pairs,
                               const TrainConfig& cfg, const scorer::LinearScorer& reference) {
    if (pairs.empty()) throw ValidationError("train_pairwise_dpo: no pairs");
    require_dim(reference.weights, "reference scorer");
    ObjectiveInstance instance;
    instance.objective = Objective::pairwise_dpo;
    instance.pairs = pairs;
    instance.beta = cfg.beta;
    instance.reference = reference.weights;
    return run_descent(instance, cfg, reference.weights);
}

TrainResult train_ppo_proximal(const std::vector<PreferenceExample>& pairs,
                               const TrainConfig& cfg, const scorer::LinearScorer& reward,
                               const scorer::LinearScorer& reference) {
    if (pairs.empty()) throw ValidationError("train_ppo_proximal: no pairs");
    require_dim(reward.weights, "reward scorer");
    require_dim(reference.weights, "reference scorer");
    ObjectiveInstance instance;
    instance.objective = Objective::ppo_proximal;
    instance.pairs = pairs;
    instance.lambda_prox = cfg.lambda_prox;
    instance.reward = reward.weights;
    instance.reference = reference.weights;
    return run_descent(instance, cfg, reference.weights);
}

std::string report_json(const TrainReport& report) {
    nlohmann::ordered_json j;
    j["objective"] = objective_name(report.objective);
    j["initial_loss"] = report.initial_loss;
    j["epoch_losses"] = report.epoch_losses;
    j["pairwise_accuracy"] = report.pairwise_accuracy;
    j["weights_before"] = report.weights_before;
    j["weights_after"] = report.weights_after;
    return j.dump();
}

std::string report_csv_row(const TrainReport& report) {
    const double final_loss =
        report.epoch_losses.empty() ? report.initial_loss : report.epoch_losses.back();
    std::ostringstream out;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f", objective_name(report.objective).c_str(),
                  final_loss, report.pairwise_accuracy);
    out << buf;
    return out.str();
}

std::string epoch_losses_csv(const TrainReport& report) {
    std::ostringstream out;
    out << "objective,epoch,loss\n";
    for (std::size_t e = 0; e < report.epoch_losses.size(); ++e) {
        out << objective_name(report.objective) << ',' << (e + 1) << ','
            << io::format_double(report.epoch_losses[e]) << '\n';
    }
    return out.str();
}

}  // namespace rex::training
