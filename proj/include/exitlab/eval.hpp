#pragma once

#include <string>
#include <vector>

#include "exitlab/game.hpp"
#include "exitlab/search.hpp"

namespace exitlab {

// Evaluation participant: a trained checkpoint or a non-learning baseline.
struct AgentSpec {
  AgentKind kind = AgentKind::kUct;
  std::string checkpoint_path;  // kExit only
  std::string name;
};

// "uct", "mc-grave", or a checkpoint path (named by its file stem).
AgentSpec parse_agent_spec(const std::string& arg);

struct MatchSpec {
  std::string game;
  AgentSpec agent_a;
  AgentSpec agent_b;
  int games = 120;  // each agent plays each side in half of them
  int iterations = 800;
  double c_puct = 2.5;
  std::uint64_t seed = 0;
};

struct GameRecord {
  int index = 0;
  int p1_agent = 0;  // 0 = agent_a, 1 = agent_b
  int winner = 0;    // 0 draw, else winning player number
};

// Plays spec.games games with alternating seats (agent_a is player 1 in
// even-indexed games) and greedy visit-count move selection.
std::vector<GameRecord> play_match(const MatchSpec& spec);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Agresti-Coull interval for a binomial proportion, clipped to [0, 1].
Interval agresti_coull(int wins, int n, double z = 1.96);

struct PairCounts {
  int p1_wins = 0;
  int p2_wins = 0;
  int draws = 0;
  int games() const { return p1_wins + p2_wins + draws; }
};

// Pairwise results over a pool of agents; counts[i][j] covers the games
// where agent i held seat 1 against agent j in seat 2.
struct PayoffTable {
  std::vector<std::string> agents;
  std::vector<std::vector<PairCounts>> counts;

  // Row agent's win rate as player 1, draws worth 0.5; 0.5 when no games
  // were recorded for the orientation.
  double payoff(int i, int j) const;
  std::vector<std::vector<double>> payoff_matrix() const;
};

// All unordered pairs including self-pairs, independently seeded per pair
// and played on a worker pool of the given size (<=1 for sequential).
PayoffTable tournament(const std::vector<AgentSpec>& agents,
                       const std::string& game, int games_per_pair,
                       int iterations, double c_puct, std::uint64_t seed,
                       int threads = 1);

struct AlphaRankConfig {
  double intensity = 100.0;  // ranking-intensity alpha
  int population = 50;       // m in the fixation probability
  double damping = 1e-10;
  double residual_target = 1e-12;
  long max_sweeps = 200000;
};

struct AlphaRankResult {
  int num_strategies = 0;
  double intensity = 0.0;
  int population = 0;
  std::vector<double> stationary;  // profile (i, j) at index i * K + j
  std::vector<double> agent_mass;  // role-averaged marginal per agent
  double residual = 0.0;
  bool sweep_warning = false;      // no stable plateau found
};

// Fixation probability (1 - e^{-a d}) / (1 - e^{-a m d}); 1/m when d = 0.
double fixation_probability(double intensity, int population, double delta);

// Two-population Markov chain over strategy profiles built from the folded
// payoff matrix; stationary distribution via damped power iteration.
AlphaRankResult alpha_rank(const std::vector<std::vector<double>>& payoffs,
                           const AlphaRankConfig& cfg);

// Geometric grid 1e-2..1e4 (25 points); returns the result at the smallest
// intensity whose top-ranked profile set persists through the rest of the
// grid (plateau of at least two points, else warning + largest intensity).
AlphaRankResult alpha_sweep(const std::vector<std::vector<double>>& payoffs,
                            int population = 50);

// Table-style aggregate across games: top-rank counts (two per game) and
// per-agent strategy mass averaged over games.
struct RankAggregate {
  std::vector<std::string> agents;
  std::vector<int> top_ranks;
  std::vector<double> avg_mass;
};

RankAggregate aggregate_ranks(const std::vector<std::string>& agents,
                              const std::vector<AlphaRankResult>& results);

// Payoff CSV: header row of agent names, one matrix row per agent.
std::string payoff_table_csv(const PayoffTable& table);
void parse_payoff_csv(const std::string& text,
                      std::vector<std::string>& agents,
                      std::vector<std::vector<double>>& payoffs);

}  // namespace exitlab
