#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rex/corpus.hpp"
#include "rex/retrieval.hpp"
#include "rex/scorer.hpp"

namespace rex::training {

enum class Objective {
    pointwise_sft,    // MSE regression of the score toward relevance/9
    pairwise_reward,  // Bradley-Terry: -log sigmoid(s(pos) - s(neg))
    pairwise_dpo,     // reference-anchored pairwise logistic loss
    ppo_proximal,     // reward-relabelled surrogate + quadratic proximity
};

std::string objective_name(Objective o);
std::optional<Objective> objective_from_name(std::string_view name);

struct TrainConfig {
    // The published recipe pins lr 2e-5 / 8 epochs / batch 4 / max seq 2048
    // for billion-parameter rankers; 1e-2 is the working default for this
    // linear head. max_sequence_length is recorded for config fidelity and
    // has no effect on a linear scorer.
    double learning_rate = 1e-2;
    int epochs = 8;
    int batch_size = 4;
    std::uint64_t seed = 0;
    double beta = 1.0;         // pairwise temperature (DPO)
    double lambda_prox = 0.1;  // proximity penalty weight (PPO)
    int max_sequence_length = 2048;
    Objective objective = Objective::pairwise_dpo;
};

/// Throws ValidationError when a field is out of range (lr > 0, epochs >= 0,
/// batch >= 1, beta > 0, lambda >= 0). epochs == 0 is allowed and performs
/// no updates.
void validate(const TrainConfig& cfg);

struct PointwiseExample {
    scorer::FeatureVector features;
    double relevance = 0.0;  // expert grade on the 0..9 scale
};

struct PreferenceExample {
    scorer::FeatureVector positive;
    scorer::FeatureVector negative;
};

/// Feature extraction adapters from the corpus domain types.
std::vector<PointwiseExample> to_pointwise(const std::vector<corpus::ExpertRanking>& data,
                                           const retrieval::InvertedIndex& index,
                                           const retrieval::Bm25Params& params = {});
std::vector<PreferenceExample> to_preference(const std::vector<corpus::PreferencePair>& pairs,
                                             const retrieval::InvertedIndex& index,
                                             const retrieval::Bm25Params& params = {});

struct TrainReport {
    Objective objective = Objective::pointwise_sft;
    double initial_loss = 0.0;
    std::vector<double> epoch_losses;  // full-data loss after each epoch
    double pairwise_accuracy = 0.0;
    std::vector<double> weights_before;
    std::vector<double> weights_after;
};

std::string report_json(const TrainReport& report);
/// Table-1 shaped row: objective,loss,accuracy (final epoch loss).
std::string report_csv_row(const TrainReport& report);
/// objective,epoch,loss rows for the whole trace.
std::string epoch_losses_csv(const TrainReport& report);

struct TrainResult {
    scorer::LinearScorer scorer;
    TrainReport report;
};

/// Mini-batch gradient descent on mean squared error between the score and
/// relevance/9. Weights start at zero. Deterministic given cfg.seed.
/// Throws ValidationError on empty data and rex::Error on a non-finite
/// loss.
TrainResult train_pointwise_sft(const std::vector<PointwiseExample>& data,
                                const TrainConfig& cfg);

/// Bradley-Terry reward model on preference pairs; weights start at zero.
/// The report carries pairwise accuracy on the training pairs.
TrainResult train_pairwise_reward(const std::vector<PreferenceExample>& pairs,
                                  const TrainConfig& cfg);

/// Reference-anchored pairwise logistic loss
///   -log sigmoid(beta * [(s(pos) - s_ref(pos)) - (s(neg) - s_ref(neg))])
/// with weights initialized at the reference. At the reference every
/// pair's loss is ln 2 exactly.
TrainResult train_pairwise_dpo(const std::vector<PreferenceExample>& pairs,
                               const TrainConfig& cfg, const scorer::LinearScorer& reference);

/// Relabels each pair by the reward model's preferred ordering, then
/// minimizes the pairwise logistic surrogate plus lambda*||w - w_ref||^2.
/// The quadratic term is applied as a proximal step, so the iteration stays
/// stable for arbitrarily large lambda and w -> w_ref as lambda grows. At
/// lambda = 0 the update (and loss trace) reduces to train_pairwise_reward
/// on the relabelled pairs started from the reference.
TrainResult train_ppo_proximal(const std::vector<PreferenceExample>& pairs,
                               const TrainConfig& cfg, const scorer::LinearScorer& reward,
                               const scorer::LinearScorer& reference);

/// Fraction of pairs scored in the preferred order; ties count 0.5.
double pairwise_accuracy(const scorer::LinearScorer& s,
                         const std::vector<PreferenceExample>& pairs);

/// The reference-anchored margin fed to the sigmoid for one pair:
///   beta * [(s(pos) - s_ref(pos)) - (s(neg) - s_ref(neg))]
/// Linear in beta; zero when s equals the reference.
double dpo_logit(const scorer::LinearScorer& s, const scorer::LinearScorer& reference,
                 const PreferenceExample& pair, double beta);

/// Bundles everything needed to evaluate one objective's loss and analytic
/// gradient at a weight vector (the verification surface for
/// gradient_check).
struct ObjectiveInstance {
    Objective objective = Objective::pointwise_sft;
    std::vector<PointwiseExample> pointwise;
    std::vector<PreferenceExample> pairs;
    double beta = 1.0;
    double lambda_prox = 0.0;
    std::vector<double> reference;  // DPO anchor / PPO proximity center
    std::vector<double> reward;     // PPO relabelling model

    double loss(const std::vector<double>& weights) const;
    std::vector<double> gradient(const std::vector<double>& weights) const;
};

/// Max over coordinates of |analytic - central difference| /
/// max(1, |analytic|, |central|). Central differences use the given
/// epsilon.
double gradient_check(const ObjectiveInstance& instance, const std::vector<double>& weights,
                      double epsilon);

}  // namespace rex::training
