#include "exitlab/replay.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "exitlab/text_io.hpp"

namespace exitlab {

SumTree::SumTree(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("SumTree: capacity < 1");
  base_ = 1;
  while (base_ < capacity) base_ *= 2;
  nodes_.assign(static_cast<std::size_t>(2 * base_), 0.0);
  base_ -= 1;  // children of node i are 2i+1, 2i+2; leaves start at base_
}

void SumTree::set(int i, double value) {
  if (i < 0 || i >= capacity_) throw std::out_of_range("SumTree::set");
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("SumTree::set: value must be finite and >= 0");
  }
  int node = base_ + i;
  double delta = value - nodes_[node];
  nodes_[node] = value;
  while (node > 0) {
    node = (node - 1) / 2;
    nodes_[node] += delta;
  }
}

int SumTree::sample(double u) const {
  double target = u * total();
  int node = 0;
  while (node < base_) {
    int left = 2 * node + 1;
    if (target < nodes_[left]) {
      node = left;
    } else {
      target -= nodes_[left];
      node = left + 1;
    }
  }
  int leaf = node - base_;
  return std::min(leaf, capacity_ - 1);
}

double SumTree::max_node_discrepancy() const {
  double worst = 0.0;
  for (int node = 0; node < base_; ++node) {
    double delta =
        std::abs(nodes_[node] - (nodes_[2 * node + 1] + nodes_[2 * node + 2]));
    worst = std::max(worst, delta);
  }
  return worst;
}

ExperienceBuffer::ExperienceBuffer(Player player, int capacity,
                                   double per_alpha)
    : player_(player),
      capacity_(capacity),
      per_alpha_(per_alpha),
      tree_(capacity) {
  if (capacity < 1) throw std::invalid_argument("buffer capacity < 1");
  slots_.reserve(capacity);
}

void ExperienceBuffer::add(ExperienceTuple tuple) {
  tuple.sequence = ++sequence_;
  tuple.priority = count_ == 0 ? 1.0 : max_priority();
  if (count_ < static_cast<std::size_t>(capacity_)) {
    slots_.push_back(std::move(tuple));
    ++count_;
  } else {
    slots_[next_] = std::move(tuple);  // overwrites the oldest entry
  }
  std::size_t slot = next_;
  next_ = (next_ + 1) % capacity_;
  tree_.set(static_cast<int>(slot),
            std::pow(slots_[slot].priority, per_alpha_));
}

std::vector<int> ExperienceBuffer::sample_uniform(int n, Rng& rng) const {
  if (empty()) throw std::runtime_error("sample_uniform: empty buffer");
  std::vector<int> out(static_cast<std::size_t>(std::max(n, 0)));
  for (int& slot : out) slot = rand_index(rng, size());
  return out;
}

std::vector<std::pair<int, double>> ExperienceBuffer::sample_prioritized(
    int n, Rng& rng) const {
  if (empty()) throw std::runtime_error("sample_prioritized: empty buffer");
  std::vector<std::pair<int, double>> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  if (tree_.total() <= 0.0) {
    // all-zero priorities: uniform fallback
    for (int k = 0; k < n; ++k) {
      out.emplace_back(rand_index(rng, size()), 1.0 / size());
    }
    return out;
  }
  for (int k = 0; k < n; ++k) {
    int slot = std::min(tree_.sample(rand_unit(rng)), size() - 1);
    out.emplace_back(slot, tree_.leaf(slot) / tree_.total());
  }
  return out;
}

double ExperienceBuffer::update_priority(int slot,
                                         std::span<const double> expert,
                                         std::span<const double> apprentice) {
  if (slot < 0 || slot >= size()) {
    throw std::out_of_range("update_priority: bad slot");
  }
  if (expert.size() != apprentice.size()) {
    throw std::invalid_argument("update_priority: support mismatch");
  }
  double p = 0.0;
  for (std::size_t a = 0; a < expert.size(); ++a) {
    p += std::abs(expert[a] - apprentice[a]);
  }
  slots_[slot].priority = p;
  tree_.set(slot, std::pow(p, per_alpha_));
  return p;
}

double ExperienceBuffer::max_priority() const {
  double best = 0.0;
  for (std::size_t i = 0; i < count_; ++i) {
    best = std::max(best, slots_[i].priority);
  }
  return best;
}

double ExperienceBuffer::mean_priority() const {
  if (empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < count_; ++i) sum += slots_[i].priority;
  return sum / count_;
}

void ExperienceBuffer::debug_dump(std::ostream& out) const {
  // ordered oldest first
  std::vector<const ExperienceTuple*> ordered;
  ordered.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) ordered.push_back(&slots_[i]);
  std::sort(ordered.begin(), ordered.end(),
            [](auto* a, auto* b) { return a->sequence < b->sequence; });
  for (const ExperienceTuple* t : ordered) {
    out << t->sequence << ' ' << t->duration << ' '
        << format_double(t->priority);
    for (double m : t->expert) out << ' ' << format_double(m);
    out << '\n';
  }
}

std::vector<double> per_is_ratios(std::span<const double> probabilities,
                                  int buffer_size, double beta) {
  std::vector<double> ratios(probabilities.size());
  double max_ratio = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) {
      throw std::invalid_argument("per_is_ratios: P(i) must be > 0");
    }
    ratios[i] = std::pow(1.0 / (buffer_size * probabilities[i]), beta);
    max_ratio = std::max(max_ratio, ratios[i]);
  }
  for (double& r : ratios) r /= max_ratio;
  return ratios;
}

void DurationTracker::update(int duration) {
  u_ = 0.95 * u_ + 1.0;
  t_hat_ += (duration - t_hat_) / u_;
  ++updates_;
}

double wed_ratio(const DurationTracker& tracker, const ExperienceTuple& tuple) {
  if (tracker.updates() == 0) {
    throw std::runtime_error("wed_ratio: tracker has no episodes");
  }
  if (tuple.duration < 1) {
    throw std::runtime_error("wed_ratio: tuple duration not finalized");
  }
  return tracker.t_hat() / tuple.duration;
}

double is_estimate(std::span<const std::pair<double, double>> samples) {
  if (samples.empty()) throw std::invalid_argument("is_estimate: empty input");
  double sum = 0.0;
  for (const auto& [rho, x] : samples) sum += rho * x;
  return sum / static_cast<double>(samples.size());
}

double wis_estimate(std::span<const std::pair<double, double>> samples) {
  double num = 0.0, den = 0.0;
  for (const auto& [rho, x] : samples) {
    num += rho * x;
    den += rho;
  }
  if (den <= 0.0) {
    throw std::invalid_argument("wis_estimate: zero total weight");
  }
  return num / den;
}

}  // namespace exitlab
