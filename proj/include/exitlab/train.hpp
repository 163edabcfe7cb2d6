#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "exitlab/game.hpp"
#include "exitlab/policy.hpp"
#include "exitlab/replay.hpp"
#include "exitlab/search.hpp"

namespace exitlab {

struct TrainConfig {
  std::string game = "tictactoe";
  bool wed = false;
  bool per = false;
  bool cee = false;
  bool cee_is = false;
  int episodes = 200;
  int iterations = 800;
  double c_puct = 2.5;
  int buffer_capacity = 2500;
  int batch_size = 30;
  double per_alpha = 0.5;
  double per_beta = 0.5;
  double cee_mix = 0.1;       // behaviour = (1-mix) M_s + mix mu
  double cee_gamma = 0.99;
  double trunc_low = 0.1;     // CEE ratio-product truncation
  double trunc_high = 2.0;
  std::vector<int> checkpoint_schedule = {1, 51, 101, 151, 200};
  std::uint64_t seed = 1;
  RmsPropConfig optimizer;
  double eta_mu = 0.005;

  void validate() const;
};

// The six run presets; returns flags on top of the given base config.
extern const std::vector<std::string> kVariantNames;
void apply_variant(TrainConfig& cfg, const std::string& variant);
std::string variant_name(const TrainConfig& cfg);

// Applies "key = value" overrides with TrainConfig field names.
void apply_config_overrides(TrainConfig& cfg,
                            const std::map<std::string, std::string>& kv);

struct EpisodeStep {
  GameState state;
  Action action;
  int action_index = 0;
  std::vector<double> expert;   // M_s over the legal actions
  double behaviour_prob = 0.0;  // probability the chosen action was sampled at
  double cee_reward = 0.0;      // valid iff the run trains CEE
};

struct EpisodeRecord {
  std::vector<EpisodeStep> steps;
  Outcome outcome;
  int duration = 0;
  bool has_cee_rewards = false;
};

struct TrainStepReport {
  bool executed = false;  // false while the mover's buffer is still empty
  double loss = 0.0;
  double weight_sum = 0.0;
};

// sum(w g) / sum(w) over per-sample gradients (the WIS form).
std::vector<double> weighted_batch_gradient(
    std::span<const std::vector<double>> gradients,
    std::span<const double> weights);

// Sum of absolute expert/apprentice differences (CEE reward, PER priority).
double distribution_gap(std::span<const double> expert,
                        std::span<const double> apprentice);

// Per-step truncated products of M_s(a) / behaviour(a) over the episode
// prefix; each entry is clamped into [low, high].
std::vector<double> cee_is_factors(const EpisodeRecord& episode, double low,
                                   double high);

// Self-play training state for one run: per-player parameters, buffers and
// duration trackers, plus the two expert search trees.
class Trainer {
 public:
  explicit Trainer(TrainConfig cfg);

  // Plays one full self-play game, performing a train_step after every time
  // step, then finalizes tuples into the buffers and (with CEE) updates the
  // exploration policy. episode_index is 1-based and seeds the episode.
  EpisodeRecord play_episode(int episode_index);

  // One batched gradient-descent update for the given player.
  TrainStepReport train_step(Player player, Rng& rng);

  const TrainConfig& config() const { return cfg_; }
  const Game& game() const { return *game_; }
  const ExperienceBuffer& buffer(Player p) const { return buffers_[p - 1]; }
  const DurationTracker& tracker(Player p) const { return trackers_[p - 1]; }
  const FeatureSet& features(Player p) const { return features_[p - 1]; }
  const PolicyParams& params(Player p) const { return params_[p - 1]; }
  const PolicyParams& mu_params(Player p) const { return mu_[p - 1]; }
  Checkpoint checkpoint(int episodes_completed) const;

  // Mean loss over the executed train steps of the last played episode.
  double last_episode_mean_loss() const { return last_mean_loss_; }

 private:
  TrainConfig cfg_;
  std::shared_ptr<const Game> game_;
  std::vector<FeatureSet> features_;
  std::vector<PolicyParams> params_;
  std::vector<OptimizerState> opt_;
  std::vector<PolicyParams> mu_;
  std::vector<ExperienceBuffer> buffers_;
  std::vector<DurationTracker> trackers_;
  PolicyHandles handles_;
  double last_mean_loss_ = 0.0;
};

struct RunArtifacts {
  std::vector<std::string> checkpoint_paths;
  std::string metrics_path;
};

// Runs cfg.episodes games of self-play, writing checkpoints on the schedule
// and a per-episode metrics CSV (episode, duration, mean_loss, mean_priority,
// t_hat) under out_dir.
RunArtifacts run_training(const TrainConfig& cfg, const std::string& out_dir);

}  // namespace exitlab
