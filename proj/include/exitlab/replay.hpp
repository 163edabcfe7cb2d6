#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "exitlab/features.hpp"
#include "exitlab/game.hpp"
#include "exitlab/rng.hpp"

namespace exitlab {

// One self-play state owned by a single player's buffer.
struct ExperienceTuple {
  Player player = kPlayer1;
  std::uint64_t sequence = 0;                    // set on insertion
  std::vector<FeatureVector> action_features;    // one per legal action
  std::vector<double> expert;                    // M_s over legal actions
  int duration = 0;                              // episode length T (plies)
  double priority = 0.0;                         // PER p_i
  double rho_cee = 1.0;                          // CEE correction factor
};

// Complete binary tree over capacity leaves; internal nodes hold children
// sums, giving O(log n) proportional sampling.
class SumTree {
 public:
  explicit SumTree(int capacity);

  int capacity() const { return capacity_; }
  double total() const { return nodes_[0]; }
  double leaf(int i) const { return nodes_[base_ + i]; }
  void set(int i, double value);

  // Proportional draw for u in [0, 1); requires total() > 0.
  int sample(double u) const;

  // Largest |node - (left + right)| over the internal nodes.
  double max_node_discrepancy() const;

 private:
  int capacity_;
  int base_;
  std::vector<double> nodes_;
};

// Limited-capacity FIFO buffer for one player's experience. Priorities are
// mirrored into a sum tree as p_i^alpha for prioritized sampling.
class ExperienceBuffer {
 public:
  ExperienceBuffer(Player player, int capacity, double per_alpha);

  Player player() const { return player_; }
  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(count_); }
  bool empty() const { return count_ == 0; }

  const ExperienceTuple& at(int slot) const { return slots_[slot]; }

  // Appends, evicting the oldest tuple when full. The new tuple's priority is
  // the maximum existing priority (1.0 for an empty buffer).
  void add(ExperienceTuple tuple);

  // n draws with replacement, each slot equiprobable.
  std::vector<int> sample_uniform(int n, Rng& rng) const;

  // n draws with probability P(i) = p_i^alpha / sum_k p_k^alpha, returned as
  // (slot, P(i)). Falls back to uniform when every priority is zero.
  std::vector<std::pair<int, double>> sample_prioritized(int n, Rng& rng) const;

  // Sets p_i = sum_a |expert(a) - apprentice(a)| and refreshes the tree.
  double update_priority(int slot, std::span<const double> expert,
                         std::span<const double> apprentice);

  double max_priority() const;
  double mean_priority() const;

  // One tuple per line: seq, T, p_i, expert distribution.
  void debug_dump(std::ostream& out) const;

 private:
  Player player_;
  int capacity_;
  double per_alpha_;
  std::vector<ExperienceTuple> slots_;
  std::size_t next_ = 0;   // slot receiving the next insertion
  std::size_t count_ = 0;
  std::uint64_t sequence_ = 0;
  SumTree tree_;
};

// Eq.-(13)-style corrections: rho_i = (1 / (N P(i)))^beta, then every ratio
// is divided by the batch maximum.
std::vector<double> per_is_ratios(std::span<const double> probabilities,
                                  int buffer_size, double beta);

// Recency-weighted moving average of episode durations:
//   u <- 0.95 u + 1;  T^ <- T^ + (T - T^) / u.
class DurationTracker {
 public:
  void update(int duration);
  double t_hat() const { return t_hat_; }
  double weight() const { return u_; }
  int updates() const { return updates_; }

 private:
  double u_ = 0.0;
  double t_hat_ = 0.0;
  int updates_ = 0;
};

// T^ / T for a finalized tuple.
double wed_ratio(const DurationTracker& tracker, const ExperienceTuple& tuple);

// Ordinary importance sampling: sum(rho x) / n.
double is_estimate(std::span<const std::pair<double, double>> samples);

// Weighted importance sampling: sum(rho x) / sum(rho).
double wis_estimate(std::span<const std::pair<double, double>> samples);

}  // namespace exitlab
