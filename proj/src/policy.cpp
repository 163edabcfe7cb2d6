#include "exitlab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "exitlab/text_io.hpp"

namespace exitlab {

namespace {

constexpr double kLogFloor = -27.631021115928547;  // log(1e-12)

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

double action_logit(const Game& game, const GameState& s, const Action& a,
                    const FeatureSet& fs, std::span<const double> theta) {
  double z = 0.0;
  for_each_active(game, s, a, fs, [&](int i) { z += theta[i]; });
  return z;
}

std::vector<double> softmax(std::span<const double> logits) {
  double max_z = -std::numeric_limits<double>::infinity();
  for (double z : logits) max_z = std::max(max_z, z);
  std::vector<double> probs(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - max_z);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<double> action_distribution(const Game& game, const GameState& s,
                                        std::span<const Action> legal,
                                        const PolicyParams& params,
                                        const FeatureSet& fs) {
  if (s.is_terminal()) {
    throw std::invalid_argument("action_distribution: terminal state");
  }
  std::vector<double> logits(legal.size());
  for (std::size_t i = 0; i < legal.size(); ++i) {
    logits[i] = action_logit(game, s, legal[i], fs, params.theta);
  }
  return softmax(logits);
}

std::vector<double> action_distribution(const Game& game, const GameState& s,
                                        const PolicyParams& params,
                                        const FeatureSet& fs) {
  auto legal = game.legal_actions(s);
  return action_distribution(game, s, legal, params, fs);
}

double cross_entropy_loss(
    std::span<const std::pair<std::vector<double>, std::vector<double>>> batch,
    std::span<const double> weights) {
  if (batch.size() != weights.size()) {
    throw std::invalid_argument("cross_entropy_loss: batch/weight mismatch");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& [expert, apprentice] = batch[k];
    if (expert.size() != apprentice.size()) {
      throw std::invalid_argument("cross_entropy_loss: support mismatch");
    }
    double sample = 0.0;
    for (std::size_t a = 0; a < expert.size(); ++a) {
      if (expert[a] == 0.0) continue;
      sample -= expert[a] * std::max(std::log(apprentice[a]), kLogFloor);
    }
    num += weights[k] * sample;
    den += weights[k];
  }
  if (den <= 0.0) {
    throw std::invalid_argument("cross_entropy_loss: zero total weight");
  }
  return num / den;
}

std::vector<double> cross_entropy_gradient(
    std::span<const FeatureVector> action_features,
    std::span<const double> expert, std::span<const double> apprentice) {
  if (action_features.size() != expert.size() ||
      expert.size() != apprentice.size()) {
    throw std::invalid_argument("cross_entropy_gradient: support mismatch");
  }
  if (action_features.empty()) {
    throw std::invalid_argument("cross_entropy_gradient: empty support");
  }
  std::vector<double> grad(action_features.front().dimension, 0.0);
  for (std::size_t a = 0; a < action_features.size(); ++a) {
    if (action_features[a].dimension != static_cast<int>(grad.size())) {
      throw std::invalid_argument("cross_entropy_gradient: dimension mismatch");
    }
    double coeff = apprentice[a] - expert[a];
    for (int i : action_features[a].active) grad[i] += coeff;
  }
  return grad;
}

std::vector<double> grad_log_policy(std::span<const FeatureVector> features,
                                    std::span<const double> probs,
                                    int chosen) {
  std::vector<double> grad(features[chosen].dimension, 0.0);
  for (int i : features[chosen].active) grad[i] += 1.0;
  for (std::size_t b = 0; b < features.size(); ++b) {
    for (int i : features[b].active) grad[i] -= probs[b];
  }
  return grad;
}

void rmsprop_step(std::vector<double>& theta, OptimizerState& opt,
                  std::span<const double> gradient, const RmsPropConfig& cfg) {
  if (gradient.size() != theta.size() ||
      opt.grad_mean.size() != theta.size()) {
    throw std::invalid_argument("rmsprop_step: dimension mismatch");
  }
  if (!all_finite(gradient)) {
    throw std::invalid_argument("rmsprop_step: non-finite gradient");
  }
  std::vector<double> theta_old = theta;
  std::vector<double> gm_old = opt.grad_mean;
  std::vector<double> sq_old = opt.sq_mean;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double g = gradient[i];
    opt.grad_mean[i] = cfg.rho * opt.grad_mean[i] + (1.0 - cfg.rho) * g;
    opt.sq_mean[i] = cfg.rho * opt.sq_mean[i] + (1.0 - cfg.rho) * g * g;
    double centred =
        opt.sq_mean[i] - opt.grad_mean[i] * opt.grad_mean[i];
    theta[i] -= cfg.eta * g / std::sqrt(std::max(centred, 0.0) + cfg.epsilon);
  }
  if (!all_finite(theta)) {
    theta = std::move(theta_old);
    opt.grad_mean = std::move(gm_old);
    opt.sq_mean = std::move(sq_old);
    throw std::runtime_error("rmsprop_step: non-finite update rejected");
  }
}

void reinforce_update(std::span<const ReinforceStep> trajectory,
                      PolicyParams& mu_p1, PolicyParams& mu_p2, double gamma,
                      double eta_mu) {
  if (trajectory.empty()) return;
  const std::size_t n = trajectory.size();
  // G_t = sum_{k>=t} gamma^{k-t} R_{k+1}
  std::vector<double> returns(n, 0.0);
  double acc = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    acc = trajectory[t].reward + gamma * acc;
    returns[t] = acc;
  }
  double discount = 1.0;  // gamma^t
  for (std::size_t t = 0; t < n; ++t) {
    const ReinforceStep& step = trajectory[t];
    PolicyParams& mu = step.mover == kPlayer1 ? mu_p1 : mu_p2;
    std::vector<double> logits(step.action_features.size(), 0.0);
    for (std::size_t b = 0; b < step.action_features.size(); ++b) {
      for (int i : step.action_features[b].active) logits[b] += mu.theta[i];
    }
    std::vector<double> probs = softmax(logits);
    std::vector<double> grad =
        grad_log_policy(step.action_features, probs, step.action_index);
    double scale = eta_mu * discount * returns[t];
    for (std::size_t i = 0; i < mu.theta.size(); ++i) {
      mu.theta[i] += scale * grad[i];
    }
    discount *= gamma;
  }
}

// ----------------------------------------------------------- checkpoint io

namespace {

constexpr const char* kCheckpointHeader = "exitlab-checkpoint v1";

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out << kCheckpointHeader << '\n';
  out << "game " << ckpt.game << '\n';
  out << "episodes " << ckpt.episodes << '\n';
  for (int p = 0; p < 2; ++p) {
    const FeatureSet& fs = ckpt.feature_sets[p];
    out << "player " << (p + 1) << '\n';
    out << "patterns " << fs.dimension() << '\n';
    out << fs.describe();
    out << "theta " << ckpt.theta[p].size() << '\n';
    for (double w : ckpt.theta[p]) out << format_double(w) << '\n';
  }
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  auto fail = [](const std::string& what) -> std::runtime_error {
    return std::runtime_error("checkpoint: " + what);
  };
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointHeader) {
    throw fail("bad header");
  }
  Checkpoint ckpt;
  std::string key;
  if (!(in >> key >> ckpt.game) || key != "game") throw fail("missing game");
  if (!(in >> key >> ckpt.episodes) || key != "episodes") {
    throw fail("missing episodes");
  }
  for (int p = 1; p <= 2; ++p) {
    int player = 0, count = 0;
    if (!(in >> key >> player) || key != "player" || player != p) {
      throw fail("missing player section");
    }
    if (!(in >> key >> count) || key != "patterns" || count <= 0) {
      throw fail("missing patterns");
    }
    std::getline(in, line);
    std::vector<std::string> lines;
    for (int i = 0; i < count; ++i) {
      if (!std::getline(in, line)) throw fail("truncated pattern list");
      lines.push_back(line);
    }
    ckpt.feature_sets.push_back(FeatureSet::parse(p, lines));
    if (!(in >> key >> count) || key != "theta" ||
        count != ckpt.feature_sets.back().dimension()) {
      throw fail("bad theta length");
    }
    std::vector<double> theta(count);
    for (double& w : theta) {
      if (!(in >> w)) throw fail("truncated theta");
    }
    ckpt.theta.push_back(std::move(theta));
  }
  if (!(in >> key) || key != "end") throw fail("missing end marker");
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ostringstream out;
  write_checkpoint(out, ckpt);
  write_file_atomic(path, out.str());
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  return read_checkpoint(in);
}

}  // namespace exitlab
