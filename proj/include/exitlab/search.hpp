#pragma once

#include <deque>
#include <memory>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "exitlab/game.hpp"
#include "exitlab/policy.hpp"
#include "exitlab/rng.hpp"

namespace exitlab {

enum class AgentKind { kExit, kUct, kMcGrave };

AgentKind agent_kind_from_string(const std::string& name);
std::string agent_kind_name(AgentKind kind);

struct SearchConfig {
  AgentKind kind = AgentKind::kExit;
  int iterations = 800;
  double c_puct = 2.5;
  double uct_c = std::numbers::sqrt2;
  int grave_ref = 100;      // closest ancestor with this many visits
  double grave_bias = 1e-6;
};

// Live views of the apprentice policy per player, used by the expert for
// priors and playouts. Entries stay owned by the caller.
struct PolicyHandles {
  const FeatureSet* features[2] = {nullptr, nullptr};
  const std::vector<double>* theta[2] = {nullptr, nullptr};
};

struct AmafStat {
  long n = 0;
  double w = 0.0;
};

struct SearchNode {
  GameState state;
  std::vector<Action> actions;   // empty iff state is terminal
  std::vector<double> priors;    // expert only
  std::vector<int> edge_n;       // N(s,a)
  std::vector<double> edge_w;    // W(s,a), from state.mover's perspective
  std::vector<std::unique_ptr<SearchNode>> children;
  long edge_total = 0;           // sum of edge_n
  long node_n = 0;               // backprop visits through this node
  double node_w = 0.0;
  std::unordered_map<int, AmafStat> amaf;  // MC-GRAVE only, by action key

  // Value estimate handed to unvisited child edges.
  double parent_estimate() const { return node_n > 0 ? node_w / node_n : 0.0; }
  double q_value(int edge) const {
    return edge_n[edge] > 0 ? edge_w[edge] / edge_n[edge] : parent_estimate();
  }
};

struct SearchTree {
  std::unique_ptr<SearchNode> root;
};

struct SearchResult {
  Player mover = kPlayer1;
  std::vector<Action> actions;
  std::vector<int> visits;
  std::vector<double> q_values;
  int iterations = 0;
};

// Packs (from, to) into a game-wide stable integer, used for AMAF tables.
inline int action_key(const Game& game, const Action& a) {
  return (a.from + 1) * game.cell_count() + a.to;
}

// Builds an expanded node for the given state (legal actions, priors).
std::unique_ptr<SearchNode> make_search_node(const Game& game, GameState state,
                                             const SearchConfig& cfg,
                                             const PolicyHandles* policies);

// Eq.-(5)-style selection: argmax Q + c prior sqrt(sum N) / (1 + N); ties
// broken uniformly at random; unvisited edges use the parent estimate.
int puct_select(const SearchNode& node, double c_puct, Rng& rng);

// UCB1 over mean values in [-1,1]; unvisited edges are tried first.
int uct_select(const SearchNode& node, double exploration, Rng& rng);

// Greedy GRAVE value without exploration term; unvisited edges score 10000.
int grave_select(const SearchNode& node, const SearchNode& ref,
                 const Game& game, double bias, Rng& rng);

// (1-beta) q + beta amaf_q with beta = an / (n + an + bias n an).
double grave_blend(double q, long n, double amaf_q, long amaf_n, double bias);

// Runs the configured iteration loop from root_state, reusing tree.root when
// it matches (otherwise the tree is rebuilt fresh). Throws on terminal roots.
SearchResult run_mcts(SearchTree& tree, const Game& game,
                      const GameState& root_state, const SearchConfig& cfg,
                      const PolicyHandles* policies, Rng& rng);

// M_s(s, a) = N(s, a) / sum N; throws when no visits were recorded.
std::vector<double> visit_count_policy(const SearchResult& result);

// Re-roots the tree at the child reached by the action (statistics
// preserved); a missing child leaves an empty tree.
void advance_root(SearchTree& tree, const Action& action);

// Keeps the grandchild subtree after our move and the opponent's reply.
void reuse_tree(SearchTree& tree, const Action& chosen,
                const Action& opponent_reply);

// One playing agent: search tree, RNG stream and (for the expert) policy
// storage. note_move() must see every move of the real game, in order, so
// that searches can reuse the relevant subtree.
class MctsAgent {
 public:
  MctsAgent(std::shared_ptr<const Game> game, SearchConfig cfg,
            std::uint64_t seed);
  MctsAgent(std::shared_ptr<const Game> game, SearchConfig cfg,
            const PolicyHandles& borrowed, std::uint64_t seed);
  MctsAgent(std::shared_ptr<const Game> game, SearchConfig cfg,
            Checkpoint checkpoint, std::uint64_t seed);

  SearchResult search(const GameState& s);
  void note_move(const Action& a);
  void reset(std::uint64_t seed);

  const Game& game() const { return *game_; }
  const SearchConfig& config() const { return cfg_; }
  Rng& rng() { return rng_; }

 private:
  struct OwnedPolicies {
    std::vector<FeatureSet> features;
    std::vector<std::vector<double>> theta;
  };

  std::shared_ptr<const Game> game_;
  SearchConfig cfg_;
  std::unique_ptr<OwnedPolicies> owned_;
  PolicyHandles handles_;
  bool has_policies_ = false;
  SearchTree tree_;
  std::deque<Action> pending_;
  Rng rng_;
};

}  // namespace exitlab
