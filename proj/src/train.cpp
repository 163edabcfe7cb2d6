#include "exitlab/train.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "exitlab/games.hpp"
#include "exitlab/text_io.hpp"

namespace exitlab {

namespace {

int to_int(const std::string& v) {
  std::size_t pos = 0;
  int out = std::stoi(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("bad integer: " + v);
  return out;
}

double to_double(const std::string& v) {
  std::size_t pos = 0;
  double out = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("bad number: " + v);
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("bad bool: " + v);
}

std::vector<int> to_int_list(const std::string& v) {
  std::vector<int> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(to_int(item));
  return out;
}

int sample_index(std::span<const double> probs, Rng& rng) {
  double u = rand_unit(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

void TrainConfig::validate() const {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (buffer_capacity < 1) {
    throw std::invalid_argument("buffer_capacity must be >= 1");
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (cee_mix < 0.0 || cee_mix > 1.0) {
    throw std::invalid_argument("cee_mix must lie in [0, 1]");
  }
  if (!(trunc_low < trunc_high)) {
    throw std::invalid_argument("trunc_low must be < trunc_high");
  }
  if (cee_is && !cee) {
    throw std::invalid_argument("cee_is requires cee");
  }
  make_game(game);  // throws on unknown game names
}

const std::vector<std::string> kVariantNames = {
    "exit", "wed", "per", "cee", "cee-nois", "wed-per-cee-nois"};

void apply_variant(TrainConfig& cfg, const std::string& variant) {
  cfg.wed = cfg.per = cfg.cee = cfg.cee_is = false;
  if (variant == "exit") return;
  if (variant == "wed") {
    cfg.wed = true;
  } else if (variant == "per") {
    cfg.per = true;
  } else if (variant == "cee") {
    cfg.cee = cfg.cee_is = true;
  } else if (variant == "cee-nois") {
    cfg.cee = true;
  } else if (variant == "wed-per-cee-nois") {
    cfg.wed = cfg.per = cfg.cee = true;
  } else {
    throw std::invalid_argument("unknown variant: " + variant);
  }
}

std::string variant_name(const TrainConfig& cfg) {
  if (cfg.wed && cfg.per && cfg.cee && !cfg.cee_is) return "wed-per-cee-nois";
  if (!cfg.wed && !cfg.per && !cfg.cee) return "exit";
  if (cfg.wed && !cfg.per && !cfg.cee) return "wed";
  if (!cfg.wed && cfg.per && !cfg.cee) return "per";
  if (!cfg.wed && !cfg.per && cfg.cee) return cfg.cee_is ? "cee" : "cee-nois";
  return "custom";
}

void apply_config_overrides(TrainConfig& cfg,
                            const std::map<std::string, std::string>& kv) {
  // the variant presets reset the four flags, so apply them first
  if (auto it = kv.find("variant"); it != kv.end()) {
    apply_variant(cfg, it->second);
  }
  for (const auto& [key, value] : kv) {
    if (key == "variant") continue;
    if (key == "game") cfg.game = value;
    else if (key == "wed") cfg.wed = to_bool(value);
    else if (key == "per") cfg.per = to_bool(value);
    else if (key == "cee") cfg.cee = to_bool(value);
    else if (key == "cee_is") cfg.cee_is = to_bool(value);
    else if (key == "episodes") cfg.episodes = to_int(value);
    else if (key == "iterations") cfg.iterations = to_int(value);
    else if (key == "c_puct") cfg.c_puct = to_double(value);
    else if (key == "buffer_capacity") cfg.buffer_capacity = to_int(value);
    else if (key == "batch_size") cfg.batch_size = to_int(value);
    else if (key == "per_alpha" || key == "alpha") cfg.per_alpha = to_double(value);
    else if (key == "per_beta" || key == "beta") cfg.per_beta = to_double(value);
    else if (key == "cee_mix") cfg.cee_mix = to_double(value);
    else if (key == "cee_gamma") cfg.cee_gamma = to_double(value);
    else if (key == "trunc_low") cfg.trunc_low = to_double(value);
    else if (key == "trunc_high") cfg.trunc_high = to_double(value);
    else if (key == "checkpoints") cfg.checkpoint_schedule = to_int_list(value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "eta") cfg.optimizer.eta = to_double(value);
    else if (key == "rho_opt") cfg.optimizer.rho = to_double(value);
    else if (key == "epsilon") cfg.optimizer.epsilon = to_double(value);
    else if (key == "eta_mu") cfg.eta_mu = to_double(value);
    else throw std::invalid_argument("unknown config key: " + key);
  }
}

std::vector<double> weighted_batch_gradient(
    std::span<const std::vector<double>> gradients,
    std::span<const double> weights) {
  if (gradients.empty() || gradients.size() != weights.size()) {
    throw std::invalid_argument("weighted_batch_gradient: size mismatch");
  }
  std::vector<double> out(gradients.front().size(), 0.0);
  double weight_sum = 0.0;
  for (std::size_t k = 0; k < gradients.size(); ++k) {
    weight_sum += weights[k];
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] += weights[k] * gradients[k][i];
    }
  }
  if (weight_sum <= 0.0) {
    throw std::invalid_argument("weighted_batch_gradient: zero total weight");
  }
  for (double& x : out) x /= weight_sum;
  return out;
}

double distribution_gap(std::span<const double> expert,
                        std::span<const double> apprentice) {
  if (expert.size() != apprentice.size()) {
    throw std::invalid_argument("distribution_gap: support mismatch");
  }
  double gap = 0.0;
  for (std::size_t a = 0; a < expert.size(); ++a) {
    gap += std::abs(expert[a] - apprentice[a]);
  }
  return gap;
}

std::vector<double> cee_is_factors(const EpisodeRecord& episode, double low,
                                   double high) {
  std::vector<double> factors(episode.steps.size());
  double product = 1.0;
  for (std::size_t t = 0; t < episode.steps.size(); ++t) {
    const EpisodeStep& step = episode.steps[t];
    product *= step.expert[step.action_index] / step.behaviour_prob;
    factors[t] = std::clamp(product, low, high);
  }
  return factors;
}

Trainer::Trainer(TrainConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  game_ = make_game(cfg_.game);
  features_.reserve(2);
  params_.reserve(2);
  opt_.reserve(2);
  mu_.reserve(2);
  buffers_.reserve(2);
  trackers_.resize(2);
  for (Player p : {kPlayer1, kPlayer2}) {
    features_.push_back(FeatureSet::atomic(*game_, p));
    int dim = features_.back().dimension();
    params_.push_back(PolicyParams::zeros(p, dim));
    opt_.emplace_back(dim);
    mu_.push_back(PolicyParams::zeros(p, dim));
    buffers_.emplace_back(p, cfg_.buffer_capacity, cfg_.per_alpha);
  }
  for (int p = 0; p < 2; ++p) {
    handles_.features[p] = &features_[p];
    handles_.theta[p] = &params_[p].theta;
  }
}

EpisodeRecord Trainer::play_episode(int episode_index) {
  const std::uint64_t episode_seed = derive_seed(cfg_.seed, episode_index);
  Rng episode_rng(derive_seed(episode_seed, 0));

  SearchConfig search_cfg;
  search_cfg.kind = AgentKind::kExit;
  search_cfg.iterations = cfg_.iterations;
  search_cfg.c_puct = cfg_.c_puct;

  SearchTree trees[2];
  std::vector<Action> pending[2];

  EpisodeRecord record;
  record.has_cee_rewards = cfg_.cee;
  std::vector<ExperienceTuple> staged;
  double loss_sum = 0.0;
  int loss_count = 0;

  GameState s = game_->initial_state();
  while (!s.is_terminal()) {
    const Player mover = s.mover;
    const int pi = mover - 1;
    for (const Action& a : pending[pi]) advance_root(trees[pi], a);
    pending[pi].clear();

    Rng search_rng(derive_seed(episode_seed, 1, s.ply));
    SearchResult result =
        run_mcts(trees[pi], *game_, s, search_cfg, &handles_, search_rng);
    std::vector<double> expert = visit_count_policy(result);

    std::vector<double> apprentice;
    std::vector<double> behaviour = expert;
    if (cfg_.cee) {
      std::vector<double> mu_dist = action_distribution(
          *game_, s, result.actions, mu_[pi], features_[pi]);
      for (std::size_t i = 0; i < behaviour.size(); ++i) {
        behaviour[i] =
            (1.0 - cfg_.cee_mix) * expert[i] + cfg_.cee_mix * mu_dist[i];
      }
      apprentice = action_distribution(*game_, s, result.actions, params_[pi],
                                       features_[pi]);
    }
    int pick = sample_index(behaviour, episode_rng);

    EpisodeStep step;
    step.state = s;
    step.action = result.actions[pick];
    step.action_index = pick;
    step.expert = expert;
    step.behaviour_prob = behaviour[pick];
    if (cfg_.cee) step.cee_reward = distribution_gap(expert, apprentice);
    record.steps.push_back(std::move(step));

    ExperienceTuple tuple;
    tuple.player = mover;
    tuple.expert = expert;
    tuple.action_features.reserve(result.actions.size());
    for (const Action& a : result.actions) {
      tuple.action_features.push_back(featurize(*game_, s, a, features_[pi]));
    }
    staged.push_back(std::move(tuple));

    TrainStepReport report = train_step(mover, episode_rng);
    if (report.executed) {
      loss_sum += report.loss;
      ++loss_count;
    }

    const Action chosen = result.actions[pick];
    pending[0].push_back(chosen);
    pending[1].push_back(chosen);
    s = game_->apply(s, chosen);
  }

  record.outcome = game_->utilities(s);
  record.duration = static_cast<int>(record.steps.size());
  last_mean_loss_ =
      loss_count > 0 ? loss_sum / loss_count : std::nan("");

  std::vector<double> factors;
  if (cfg_.cee && cfg_.cee_is) {
    factors = cee_is_factors(record, cfg_.trunc_low, cfg_.trunc_high);
  }
  for (std::size_t t = 0; t < staged.size(); ++t) {
    staged[t].duration = record.duration;
    if (!factors.empty()) staged[t].rho_cee = factors[t];
    Player owner = staged[t].player;
    buffers_[owner - 1].add(std::move(staged[t]));
  }
  trackers_[0].update(record.duration);
  trackers_[1].update(record.duration);

  if (cfg_.cee) {
    std::vector<ReinforceStep> trajectory;
    trajectory.reserve(record.steps.size());
    for (const EpisodeStep& step : record.steps) {
      ReinforceStep rs;
      rs.mover = step.state.mover;
      rs.action_index = step.action_index;
      rs.reward = step.cee_reward;
      auto legal = game_->legal_actions(step.state);
      rs.action_features.reserve(legal.size());
      for (const Action& a : legal) {
        rs.action_features.push_back(
            featurize(*game_, step.state, a, features_[step.state.mover - 1]));
      }
      trajectory.push_back(std::move(rs));
    }
    reinforce_update(trajectory, mu_[0], mu_[1], cfg_.cee_gamma, cfg_.eta_mu);
  }
  return record;
}

TrainStepReport Trainer::train_step(Player player, Rng& rng) {
  ExperienceBuffer& buf = buffers_[player - 1];
  if (buf.empty()) return TrainStepReport{};  // early episodes: skipped

  std::vector<int> slots;
  std::vector<double> per_ratios;
  if (cfg_.per) {
    auto sampled = buf.sample_prioritized(cfg_.batch_size, rng);
    std::vector<double> probs;
    probs.reserve(sampled.size());
    for (const auto& [slot, prob] : sampled) {
      slots.push_back(slot);
      probs.push_back(prob);
    }
    per_ratios = per_is_ratios(probs, buf.size(), cfg_.per_beta);
  } else {
    slots = buf.sample_uniform(cfg_.batch_size, rng);
  }

  std::vector<std::vector<double>> gradients;
  std::vector<std::vector<double>> apprentice_dists;
  std::vector<double> weights;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> loss_batch;
  gradients.reserve(slots.size());
  weights.reserve(slots.size());
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const ExperienceTuple& tuple = buf.at(slots[k]);
    std::vector<double> logits(tuple.action_features.size(), 0.0);
    for (std::size_t a = 0; a < tuple.action_features.size(); ++a) {
      for (int i : tuple.action_features[a].active) {
        logits[a] += params_[player - 1].theta[i];
      }
    }
    std::vector<double> apprentice = softmax(logits);
    gradients.push_back(
        cross_entropy_gradient(tuple.action_features, tuple.expert, apprentice));
    double w = tuple.rho_cee;
    if (cfg_.wed) w *= wed_ratio(trackers_[player - 1], tuple);
    if (cfg_.per) w *= per_ratios[k];
    weights.push_back(w);
    loss_batch.emplace_back(tuple.expert, apprentice);
    apprentice_dists.push_back(std::move(apprentice));
  }

  std::vector<double> grad = weighted_batch_gradient(gradients, weights);
  rmsprop_step(params_[player - 1].theta, opt_[player - 1], grad,
               cfg_.optimizer);

  if (cfg_.per) {
    for (std::size_t k = 0; k < slots.size(); ++k) {
      buf.update_priority(slots[k], buf.at(slots[k]).expert,
                          apprentice_dists[k]);
    }
  }

  TrainStepReport report;
  report.executed = true;
  report.loss = cross_entropy_loss(loss_batch, weights);
  for (double w : weights) report.weight_sum += w;
  return report;
}

Checkpoint Trainer::checkpoint(int episodes_completed) const {
  Checkpoint ckpt;
  ckpt.game = cfg_.game;
  ckpt.episodes = episodes_completed;
  ckpt.feature_sets = features_;
  ckpt.theta = {params_[0].theta, params_[1].theta};
  return ckpt;
}

RunArtifacts run_training(const TrainConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  Trainer trainer(cfg);
  RunArtifacts artifacts;
  std::ostringstream metrics;
  metrics << "episode,duration,mean_loss,mean_priority,t_hat\n";
  for (int e = 1; e <= cfg.episodes; ++e) {
    EpisodeRecord record = trainer.play_episode(e);
    const ExperienceBuffer& b1 = trainer.buffer(kPlayer1);
    const ExperienceBuffer& b2 = trainer.buffer(kPlayer2);
    double mean_priority =
        (b1.mean_priority() * b1.size() + b2.mean_priority() * b2.size()) /
        std::max(1, b1.size() + b2.size());
    metrics << e << ',' << record.duration << ','
            << format_double(trainer.last_episode_mean_loss()) << ','
            << format_double(mean_priority) << ','
            << format_double(trainer.tracker(kPlayer1).t_hat()) << '\n';
    if (std::find(cfg.checkpoint_schedule.begin(),
                  cfg.checkpoint_schedule.end(),
                  e) != cfg.checkpoint_schedule.end()) {
      std::string path = out_dir + "/checkpoint-" + std::to_string(e) + ".txt";
      save_checkpoint(path, trainer.checkpoint(e));
      artifacts.checkpoint_paths.push_back(path);
    }
  }
  artifacts.metrics_path = out_dir + "/metrics.csv";
  write_file_atomic(artifacts.metrics_path, metrics.str());
  return artifacts;
}

}  // namespace exitlab
