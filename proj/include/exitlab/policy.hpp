#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "exitlab/features.hpp"
#include "exitlab/game.hpp"

namespace exitlab {

// Weight vector of one linear softmax policy. The apprentice and the CEE
// exploration policy each own a separate instance per player.
struct PolicyParams {
  Player player = kPlayer1;
  std::vector<double> theta;

  static PolicyParams zeros(Player player, int dimension) {
    return PolicyParams{player, std::vector<double>(dimension, 0.0)};
  }
};

// theta . phi(s, a)
double action_logit(const Game& game, const GameState& s, const Action& a,
                    const FeatureSet& fs, std::span<const double> theta);

// Softmax probabilities over the given legal actions (max-shifted).
// Throws std::invalid_argument when s is terminal.
std::vector<double> action_distribution(const Game& game, const GameState& s,
                                        std::span<const Action> legal,
                                        const PolicyParams& params,
                                        const FeatureSet& fs);
std::vector<double> action_distribution(const Game& game, const GameState& s,
                                        const PolicyParams& params,
                                        const FeatureSet& fs);

// Softmax of explicit logits; shared by everything that samples actions.
std::vector<double> softmax(std::span<const double> logits);

// Weighted mean of per-sample cross-entropies -expert . log(apprentice),
// combined in the weighted-importance-sampling form sum(w l) / sum(w).
// log terms are clamped below at log(1e-12).
double cross_entropy_loss(
    std::span<const std::pair<std::vector<double>, std::vector<double>>> batch,
    std::span<const double> weights);

// Gradient of one sample's cross-entropy w.r.t. theta:
//   sum_a (pi(a) - expert(a)) phi(s, a),
// returned dense and unscaled; the caller applies any sample weight.
std::vector<double> cross_entropy_gradient(
    std::span<const FeatureVector> action_features,
    std::span<const double> expert, std::span<const double> apprentice);

// grad log softmax(features)[chosen] = phi(chosen) - sum_b pi(b) phi(b)
std::vector<double> grad_log_policy(std::span<const FeatureVector> features,
                                    std::span<const double> probs, int chosen);

struct RmsPropConfig {
  double eta = 0.005;
  double rho = 0.9;
  double epsilon = 1e-8;
};

// Centred RMSProp accumulators (gradient mean and squared-gradient mean).
struct OptimizerState {
  std::vector<double> grad_mean;
  std::vector<double> sq_mean;

  explicit OptimizerState(int dimension = 0)
      : grad_mean(dimension, 0.0), sq_mean(dimension, 0.0) {}
};

// g~ <- rho g~ + (1-rho) g;  n <- rho n + (1-rho) g^2;
// theta <- theta - eta g / sqrt(n - g~^2 + eps).
// The accumulator difference is clamped at zero before adding eps.
// A non-finite result rejects the whole update and throws.
void rmsprop_step(std::vector<double>& theta, OptimizerState& opt,
                  std::span<const double> gradient, const RmsPropConfig& cfg);

// One step of an episode as seen by the REINFORCE explorer.
struct ReinforceStep {
  Player mover = kPlayer1;
  int action_index = 0;
  double reward = 0.0;  // R_{t+1}
  std::vector<FeatureVector> action_features;
};

// Sequential per-step REINFORCE:
//   theta_mu <- theta_mu + eta_mu gamma^t G_t grad log mu(S_t, A_t)
// applied to the mover's parameters at each step; rewards come from all
// steps regardless of mover. Empty trajectories are a no-op.
void reinforce_update(std::span<const ReinforceStep> trajectory,
                      PolicyParams& mu_p1, PolicyParams& mu_p2, double gamma,
                      double eta_mu);

// Checkpoint file: versioned header, game name, per-player feature set
// description and weights (decimal text), training-episode count.
struct Checkpoint {
  std::string game;
  int episodes = 0;
  std::vector<FeatureSet> feature_sets;  // [player1, player2]
  std::vector<std::vector<double>> theta;

  bool operator==(const Checkpoint&) const = default;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace exitlab
