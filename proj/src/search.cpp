#include "exitlab/search.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace exitlab {

namespace {

constexpr double kGraveUnvisited = 10000.0;

int sample_index(std::span<const double> probs, Rng& rng) {
  double u = rand_unit(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

int argmax_random_ties(std::span<const double> scores, Rng& rng) {
  double best = -std::numeric_limits<double>::infinity();
  int count = 0, pick = -1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > best) {
      best = scores[i];
      count = 1;
      pick = static_cast<int>(i);
    } else if (scores[i] == best) {
      ++count;
    }
  }
  if (count <= 1) return pick;
  int target = rand_index(rng, count);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] == best && target-- == 0) return static_cast<int>(i);
  }
  return pick;
}

void require_selectable(const SearchNode& node, const char* who) {
  if (node.state.is_terminal()) {
    throw std::invalid_argument(std::string(who) + ": terminal node");
  }
}

Outcome playout(const Game& game, GameState s, const SearchConfig& cfg,
                const PolicyHandles* policies, Rng& rng,
                std::vector<std::pair<Player, int>>* moves) {
  std::vector<double> logits;
  while (!s.is_terminal()) {
    auto legal = game.legal_actions(s);
    int pick;
    if (cfg.kind == AgentKind::kExit) {
      const FeatureSet& fs = *policies->features[s.mover - 1];
      const std::vector<double>& theta = *policies->theta[s.mover - 1];
      logits.resize(legal.size());
      for (std::size_t i = 0; i < legal.size(); ++i) {
        logits[i] = action_logit(game, s, legal[i], fs, theta);
      }
      pick = sample_index(softmax(logits), rng);
    } else {
      pick = rand_index(rng, static_cast<int>(legal.size()));
    }
    if (moves) moves->emplace_back(s.mover, action_key(game, legal[pick]));
    s = game.apply(s, legal[pick]);
  }
  return game.utilities(s);
}

void update_amaf(SearchNode* node,
                 std::span<const std::pair<Player, int>> moves,
                 std::size_t from, const Outcome& outcome) {
  Player mover = node->state.mover;
  double value = outcome.for_player(mover);
  for (std::size_t k = from; k < moves.size(); ++k) {
    if (moves[k].first != mover) continue;
    AmafStat& stat = node->amaf[moves[k].second];
    stat.n += 1;
    stat.w += value;
  }
}

}  // namespace

AgentKind agent_kind_from_string(const std::string& name) {
  if (name == "exit") return AgentKind::kExit;
  if (name == "uct") return AgentKind::kUct;
  if (name == "mc-grave") return AgentKind::kMcGrave;
  throw std::invalid_argument("unknown agent kind: " + name);
}

std::string agent_kind_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::kExit: return "exit";
    case AgentKind::kUct: return "uct";
    case AgentKind::kMcGrave: return "mc-grave";
  }
  return "?";
}

std::unique_ptr<SearchNode> make_search_node(const Game& game, GameState state,
                                             const SearchConfig& cfg,
                                             const PolicyHandles* policies) {
  auto node = std::make_unique<SearchNode>();
  node->state = std::move(state);
  if (node->state.is_terminal()) return node;
  node->actions = game.legal_actions(node->state);
  const std::size_t n = node->actions.size();
  node->edge_n.assign(n, 0);
  node->edge_w.assign(n, 0.0);
  node->children.resize(n);
  if (cfg.kind == AgentKind::kExit) {
    Player mover = node->state.mover;
    std::vector<double> logits(n);
    for (std::size_t i = 0; i < n; ++i) {
      logits[i] = action_logit(game, node->state, node->actions[i],
                               *policies->features[mover - 1],
                               *policies->theta[mover - 1]);
    }
    node->priors = softmax(logits);
  }
  return node;
}

int puct_select(const SearchNode& node, double c_puct, Rng& rng) {
  require_selectable(node, "puct_select");
  double parent_q = node.parent_estimate();
  double sqrt_total = std::sqrt(static_cast<double>(node.edge_total));
  std::vector<double> scores(node.actions.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    double q = node.edge_n[i] > 0 ? node.edge_w[i] / node.edge_n[i] : parent_q;
    scores[i] = q + c_puct * node.priors[i] * sqrt_total / (1.0 + node.edge_n[i]);
  }
  return argmax_random_ties(scores, rng);
}

int uct_select(const SearchNode& node, double exploration, Rng& rng) {
  require_selectable(node, "uct_select");
  double parent_q = node.parent_estimate();
  double log_total =
      node.edge_total > 0 ? std::log(static_cast<double>(node.edge_total)) : 0.0;
  std::vector<double> scores(node.actions.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (node.edge_n[i] == 0) {
      scores[i] = std::numeric_limits<double>::infinity();
      (void)parent_q;
    } else {
      scores[i] = node.edge_w[i] / node.edge_n[i] +
                  exploration * std::sqrt(log_total / node.edge_n[i]);
    }
  }
  return argmax_random_ties(scores, rng);
}

double grave_blend(double q, long n, double amaf_q, long amaf_n, double bias) {
  if (amaf_n == 0) return q;
  double an = static_cast<double>(amaf_n);
  double nn = static_cast<double>(n);
  double beta = an / (nn + an + bias * nn * an);
  return (1.0 - beta) * q + beta * amaf_q;
}

int grave_select(const SearchNode& node, const SearchNode& ref,
                 const Game& game, double bias, Rng& rng) {
  require_selectable(node, "grave_select");
  std::vector<double> scores(node.actions.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (node.edge_n[i] == 0) {
      scores[i] = kGraveUnvisited;
      continue;
    }
    double q = node.edge_w[i] / node.edge_n[i];
    auto it = ref.amaf.find(action_key(game, node.actions[i]));
    if (it == ref.amaf.end()) {
      scores[i] = q;
    } else {
      double amaf_q = it->second.n > 0 ? it->second.w / it->second.n : 0.0;
      scores[i] = grave_blend(q, node.edge_n[i], amaf_q, it->second.n, bias);
    }
  }
  return argmax_random_ties(scores, rng);
}

SearchResult run_mcts(SearchTree& tree, const Game& game,
                      const GameState& root_state, const SearchConfig& cfg,
                      const PolicyHandles* policies, Rng& rng) {
  if (root_state.is_terminal()) {
    throw std::invalid_argument("run_mcts: terminal root");
  }
  if (cfg.iterations < 1) {
    throw std::invalid_argument("run_mcts: iterations must be >= 1");
  }
  if (cfg.kind == AgentKind::kExit &&
      (policies == nullptr || policies->features[0] == nullptr)) {
    throw std::invalid_argument("run_mcts: expert search needs policies");
  }
  if (!tree.root || !(tree.root->state == root_state)) {
    tree.root = make_search_node(game, root_state, cfg, policies);
  }
  const bool grave = cfg.kind == AgentKind::kMcGrave;

  struct PathEntry {
    SearchNode* node;
    int edge;
  };
  std::vector<PathEntry> path;
  std::vector<std::pair<Player, int>> moves;

  for (int it = 0; it < cfg.iterations; ++it) {
    path.clear();
    moves.clear();
    SearchNode* node = tree.root.get();
    SearchNode* ref = tree.root.get();
    SearchNode* expanded = nullptr;
    std::size_t expanded_depth = 0;
    Outcome outcome;
    for (;;) {
      if (grave && node->node_n >= cfg.grave_ref) ref = node;
      int edge;
      switch (cfg.kind) {
        case AgentKind::kExit: edge = puct_select(node, cfg.c_puct, rng); break;
        case AgentKind::kUct: edge = uct_select(node, cfg.uct_c, rng); break;
        case AgentKind::kMcGrave:
          edge = grave_select(node, *ref, game, cfg.grave_bias, rng);
          break;
      }
      path.push_back({node, edge});
      if (grave) {
        moves.emplace_back(node->state.mover,
                           action_key(game, node->actions[edge]));
      }
      if (node->children[edge]) {
        SearchNode* child = node->children[edge].get();
        if (child->state.is_terminal()) {
          outcome = game.utilities(child->state);
          break;
        }
        node = child;
        continue;
      }
      // expand a single node, then play out from it
      GameState child_state = game.apply(node->state, node->actions[edge]);
      node->children[edge] =
          make_search_node(game, std::move(child_state), cfg, policies);
      SearchNode* child = node->children[edge].get();
      expanded = child;
      expanded_depth = path.size();
      outcome = child->state.is_terminal()
                    ? game.utilities(child->state)
                    : playout(game, child->state, cfg, policies, rng,
                              grave ? &moves : nullptr);
      child->node_n += 1;
      child->node_w += outcome.for_player(child->state.mover);
      break;
    }
    for (const PathEntry& entry : path) {
      double v = outcome.for_player(entry.node->state.mover);
      entry.node->edge_n[entry.edge] += 1;
      entry.node->edge_w[entry.edge] += v;
      entry.node->edge_total += 1;
      entry.node->node_n += 1;
      entry.node->node_w += v;
    }
    if (grave) {
      for (std::size_t d = 0; d < path.size(); ++d) {
        update_amaf(path[d].node, moves, d, outcome);
      }
      if (expanded && !expanded->state.is_terminal()) {
        update_amaf(expanded, moves, expanded_depth, outcome);
      }
    }
  }

  SearchResult result;
  const SearchNode& root = *tree.root;
  result.mover = root.state.mover;
  result.actions = root.actions;
  result.visits = root.edge_n;
  result.q_values.resize(root.actions.size());
  for (std::size_t i = 0; i < root.actions.size(); ++i) {
    result.q_values[i] = root.q_value(static_cast<int>(i));
  }
  result.iterations = cfg.iterations;
  return result;
}

std::vector<double> visit_count_policy(const SearchResult& result) {
  long total = 0;
  for (int n : result.visits) total += n;
  if (total <= 0) {
    throw std::invalid_argument("visit_count_policy: no visits");
  }
  std::vector<double> probs(result.visits.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = static_cast<double>(result.visits[i]) / total;
  }
  return probs;
}

void advance_root(SearchTree& tree, const Action& action) {
  if (!tree.root) return;
  SearchNode& root = *tree.root;
  for (std::size_t i = 0; i < root.actions.size(); ++i) {
    if (root.actions[i] == action) {
      std::unique_ptr<SearchNode> child = std::move(root.children[i]);
      tree.root = std::move(child);  // may be null: fresh root next search
      return;
    }
  }
  tree.root.reset();
}

void reuse_tree(SearchTree& tree, const Action& chosen,
                const Action& opponent_reply) {
  advance_root(tree, chosen);
  advance_root(tree, opponent_reply);
}

// ------------------------------------------------------------------- agent

MctsAgent::MctsAgent(std::shared_ptr<const Game> game, SearchConfig cfg,
                     std::uint64_t seed)
    : game_(std::move(game)), cfg_(cfg), rng_(seed) {
  if (cfg_.kind == AgentKind::kExit) {
    throw std::invalid_argument("expert agent needs a policy");
  }
}

MctsAgent::MctsAgent(std::shared_ptr<const Game> game, SearchConfig cfg,
                     const PolicyHandles& borrowed, std::uint64_t seed)
    : game_(std::move(game)),
      cfg_(cfg),
      handles_(borrowed),
      has_policies_(true),
      rng_(seed) {}

MctsAgent::MctsAgent(std::shared_ptr<const Game> game, SearchConfig cfg,
                     Checkpoint checkpoint, std::uint64_t seed)
    : game_(std::move(game)), cfg_(cfg), rng_(seed) {
  if (checkpoint.game != game_->name()) {
    throw std::runtime_error("checkpoint is for game '" + checkpoint.game +
                             "', expected '" + game_->name() + "'");
  }
  owned_ = std::make_unique<OwnedPolicies>();
  owned_->features = std::move(checkpoint.feature_sets);
  owned_->theta = std::move(checkpoint.theta);
  for (int p = 0; p < 2; ++p) {
    handles_.features[p] = &owned_->features[p];
    handles_.theta[p] = &owned_->theta[p];
  }
  has_policies_ = true;
}

SearchResult MctsAgent::search(const GameState& s) {
  while (!pending_.empty()) {
    advance_root(tree_, pending_.front());
    pending_.pop_front();
  }
  return run_mcts(tree_, *game_, s, cfg_, has_policies_ ? &handles_ : nullptr,
                  rng_);
}

void MctsAgent::note_move(const Action& a) { pending_.push_back(a); }

void MctsAgent::reset(std::uint64_t seed) {
  tree_.root.reset();
  pending_.clear();
  rng_.seed(seed);
}

}  // namespace exitlab
