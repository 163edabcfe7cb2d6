#include "exitlab/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "exitlab/games.hpp"
#include "exitlab/text_io.hpp"

namespace exitlab {

namespace {

int greedy_visit_argmax(const SearchResult& result, Rng& rng) {
  int best = -1, best_n = -1, ties = 0;
  for (std::size_t i = 0; i < result.visits.size(); ++i) {
    if (result.visits[i] > best_n) {
      best_n = result.visits[i];
      best = static_cast<int>(i);
      ties = 1;
    } else if (result.visits[i] == best_n) {
      ++ties;
    }
  }
  if (ties <= 1) return best;
  int target = rand_index(rng, ties);
  for (std::size_t i = 0; i < result.visits.size(); ++i) {
    if (result.visits[i] == best_n && target-- == 0) {
      return static_cast<int>(i);
    }
  }
  return best;
}

MctsAgent build_agent(std::shared_ptr<const Game> game, const AgentSpec& spec,
                      const SearchConfig& base, std::uint64_t seed) {
  SearchConfig cfg = base;
  cfg.kind = spec.kind;
  if (spec.kind == AgentKind::kExit) {
    return MctsAgent(std::move(game), cfg,
                     load_checkpoint(spec.checkpoint_path), seed);
  }
  return MctsAgent(std::move(game), cfg, seed);
}

}  // namespace

AgentSpec parse_agent_spec(const std::string& arg) {
  AgentSpec spec;
  if (arg == "uct" || arg == "mc-grave") {
    spec.kind = agent_kind_from_string(arg);
    spec.name = arg;
    return spec;
  }
  spec.kind = AgentKind::kExit;
  spec.checkpoint_path = arg;
  spec.name = std::filesystem::path(arg).stem().string();
  return spec;
}

std::vector<GameRecord> play_match(const MatchSpec& spec) {
  std::shared_ptr<const Game> game = make_game(spec.game);
  SearchConfig base;
  base.iterations = spec.iterations;
  base.c_puct = spec.c_puct;

  MctsAgent agent_a = build_agent(game, spec.agent_a, base, 0);
  MctsAgent agent_b = build_agent(game, spec.agent_b, base, 0);

  std::vector<GameRecord> records;
  records.reserve(spec.games);
  for (int g = 0; g < spec.games; ++g) {
    agent_a.reset(derive_seed(spec.seed, g, 0));
    agent_b.reset(derive_seed(spec.seed, g, 1));
    GameRecord record;
    record.index = g;
    record.p1_agent = g % 2;  // seats alternate
    MctsAgent* seats[2] = {&agent_a, &agent_b};
    if (record.p1_agent == 1) std::swap(seats[0], seats[1]);

    GameState s = game->initial_state();
    while (!s.is_terminal()) {
      MctsAgent* agent = seats[s.mover - 1];
      SearchResult result = agent->search(s);
      int pick = greedy_visit_argmax(result, agent->rng());
      const Action chosen = result.actions[pick];
      agent_a.note_move(chosen);
      agent_b.note_move(chosen);
      s = game->apply(s, chosen);
    }
    record.winner =
        s.terminal.kind == ResultKind::kWin ? s.terminal.winner : 0;
    records.push_back(record);
  }
  return records;
}

Interval agresti_coull(int wins, int n, double z) {
  if (n < 1) throw std::invalid_argument("agresti_coull: n must be >= 1");
  if (wins < 0 || wins > n) {
    throw std::invalid_argument("agresti_coull: wins must lie in [0, n]");
  }
  double n_tilde = n + z * z;
  double p_tilde = (wins + z * z / 2.0) / n_tilde;
  double half = z * std::sqrt(p_tilde * (1.0 - p_tilde) / n_tilde);
  return Interval{std::max(0.0, p_tilde - half), std::min(1.0, p_tilde + half)};
}

double PayoffTable::payoff(int i, int j) const {
  const PairCounts& c = counts[i][j];
  if (c.games() == 0) return 0.5;
  return (c.p1_wins + 0.5 * c.draws) / c.games();
}

std::vector<std::vector<double>> PayoffTable::payoff_matrix() const {
  std::vector<std::vector<double>> m(agents.size(),
                                     std::vector<double>(agents.size()));
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = 0; j < agents.size(); ++j) {
      m[i][j] = payoff(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return m;
}

PayoffTable tournament(const std::vector<AgentSpec>& agents,
                       const std::string& game, int games_per_pair,
                       int iterations, double c_puct, std::uint64_t seed,
                       int threads) {
  if (agents.empty()) throw std::invalid_argument("tournament: no agents");
  const int k = static_cast<int>(agents.size());
  struct Pair {
    int a, b;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) pairs.push_back({i, j});
  }

  std::vector<std::vector<GameRecord>> results(pairs.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t p = cursor.fetch_add(1);
      if (p >= pairs.size()) return;
      MatchSpec spec;
      spec.game = game;
      spec.agent_a = agents[pairs[p].a];
      spec.agent_b = agents[pairs[p].b];
      spec.games = games_per_pair;
      spec.iterations = iterations;
      spec.c_puct = c_puct;
      spec.seed = derive_seed(seed, p);  // pair-id derived: thread-count free
      results[p] = play_match(spec);
    }
  };
  int pool = std::clamp(threads, 1, static_cast<int>(pairs.size()));
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> team;
    team.reserve(pool);
    for (int t = 0; t < pool; ++t) team.emplace_back(worker);
    for (std::thread& t : team) t.join();
  }

  PayoffTable table;
  for (const AgentSpec& a : agents) table.agents.push_back(a.name);
  table.counts.assign(k, std::vector<PairCounts>(k));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    int ids[2] = {pairs[p].a, pairs[p].b};
    for (const GameRecord& record : results[p]) {
      int p1 = ids[record.p1_agent];
      int p2 = ids[1 - record.p1_agent];
      PairCounts& c = table.counts[p1][p2];
      if (record.winner == kPlayer1) ++c.p1_wins;
      else if (record.winner == kPlayer2) ++c.p2_wins;
      else ++c.draws;
    }
  }
  return table;
}

double fixation_probability(double intensity, int population, double delta) {
  double x = intensity * delta;
  if (std::abs(x) < 1e-12) return 1.0 / population;
  if (x > 0.0) {
    return -std::expm1(-x) / -std::expm1(-population * x);
  }
  double y = -x;
  if (population * y > 700.0) {
    double t = (population - 1) * y;
    return t > 700.0 ? 0.0 : std::exp(-t);
  }
  return std::expm1(y) / std::expm1(population * y);
}

AlphaRankResult alpha_rank(const std::vector<std::vector<double>>& payoffs,
                           const AlphaRankConfig& cfg) {
  const int k = static_cast<int>(payoffs.size());
  if (k < 1) throw std::invalid_argument("alpha_rank: empty payoff table");
  for (const auto& row : payoffs) {
    if (static_cast<int>(row.size()) != k) {
      throw std::invalid_argument("alpha_rank: payoff table not square");
    }
  }
  AlphaRankResult result;
  result.num_strategies = k;
  result.intensity = cfg.intensity;
  result.population = cfg.population;

  const int s = k * k;
  if (k == 1) {
    result.stationary = {1.0};
    result.agent_mass = {1.0};
    result.residual = 0.0;
    return result;
  }

  // Row-stochastic chain over profiles; from (i, j) one role mutates, the
  // candidate mutation chosen uniformly among the 2(k-1) possibilities.
  std::vector<double> chain(static_cast<std::size_t>(s) * s, 0.0);
  const double eta = 1.0 / (2.0 * (k - 1));
  auto pid = [k](int i, int j) { return i * k + j; };
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const int row = pid(i, j);
      double out = 0.0;
      for (int mut = 0; mut < k; ++mut) {
        if (mut != i) {  // role-1 incumbent i challenged by mut
          double delta = payoffs[mut][j] - payoffs[i][j];
          double p = eta * fixation_probability(cfg.intensity, cfg.population,
                                                delta);
          chain[static_cast<std::size_t>(row) * s + pid(mut, j)] += p;
          out += p;
        }
        if (mut != j) {  // role-2 payoffs are one minus the row payoff
          double delta = (1.0 - payoffs[i][mut]) - (1.0 - payoffs[i][j]);
          double p = eta * fixation_probability(cfg.intensity, cfg.population,
                                                delta);
          chain[static_cast<std::size_t>(row) * s + pid(i, mut)] += p;
          out += p;
        }
      }
      chain[static_cast<std::size_t>(row) * s + row] = 1.0 - out;
    }
  }
  // uniform damping guarantees a unique stationary distribution
  for (double& value : chain) {
    value = (1.0 - cfg.damping) * value + cfg.damping / s;
  }

  std::vector<double> pi(s, 1.0 / s), next(s, 0.0);
  double residual = 1.0;
  for (long sweep = 0; sweep < cfg.max_sweeps && residual > cfg.residual_target;
       ++sweep) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int row = 0; row < s; ++row) {
      const double weight = pi[row];
      if (weight == 0.0) continue;
      const double* row_ptr = chain.data() + static_cast<std::size_t>(row) * s;
      for (int col = 0; col < s; ++col) next[col] += weight * row_ptr[col];
    }
    residual = 0.0;
    for (int col = 0; col < s; ++col) {
      residual = std::max(residual, std::abs(next[col] - pi[col]));
    }
    pi.swap(next);
  }
  if (residual > cfg.residual_target) {
    throw std::runtime_error("alpha_rank: power iteration did not converge");
  }

  result.stationary = pi;
  result.residual = residual;
  result.agent_mass.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      result.agent_mass[i] += 0.5 * pi[pid(i, j)];
      result.agent_mass[j] += 0.5 * pi[pid(i, j)];
    }
  }
  return result;
}

namespace {

std::vector<int> top_profiles(const AlphaRankResult& r, double tol = 1e-9) {
  double best = *std::max_element(r.stationary.begin(), r.stationary.end());
  std::vector<int> top;
  for (std::size_t p = 0; p < r.stationary.size(); ++p) {
    if (r.stationary[p] >= best - tol) top.push_back(static_cast<int>(p));
  }
  return top;
}

}  // namespace

AlphaRankResult alpha_sweep(const std::vector<std::vector<double>>& payoffs,
                            int population) {
  constexpr int kPoints = 25;
  std::vector<AlphaRankResult> results;
  std::vector<std::vector<int>> tops;
  AlphaRankConfig cfg;
  cfg.population = population;
  for (int p = 0; p < kPoints; ++p) {
    cfg.intensity = std::pow(10.0, -2.0 + 6.0 * p / (kPoints - 1));
    results.push_back(alpha_rank(payoffs, cfg));
    tops.push_back(top_profiles(results.back()));
  }
  // smallest intensity whose top set persists through the rest of the grid;
  // a single-point "plateau" at the end does not count
  for (int start = 0; start + 1 < kPoints; ++start) {
    bool stable = true;
    for (int p = start + 1; p < kPoints && stable; ++p) {
      stable = tops[p] == tops[start];
    }
    if (stable) return results[start];
  }
  AlphaRankResult fallback = results.back();
  fallback.sweep_warning = true;
  return fallback;
}

RankAggregate aggregate_ranks(const std::vector<std::string>& agents,
                              const std::vector<AlphaRankResult>& results) {
  RankAggregate agg;
  agg.agents = agents;
  agg.top_ranks.assign(agents.size(), 0);
  agg.avg_mass.assign(agents.size(), 0.0);
  if (results.empty()) return agg;
  const int k = static_cast<int>(agents.size());
  for (const AlphaRankResult& r : results) {
    if (r.num_strategies != k) {
      throw std::invalid_argument("aggregate_ranks: table size mismatch");
    }
    int best = static_cast<int>(std::distance(
        r.stationary.begin(),
        std::max_element(r.stationary.begin(), r.stationary.end())));
    agg.top_ranks[best / k] += 1;  // role-1 top
    agg.top_ranks[best % k] += 1;  // role-2 top
    for (int i = 0; i < k; ++i) agg.avg_mass[i] += r.agent_mass[i];
  }
  for (double& m : agg.avg_mass) m /= results.size();
  return agg;
}

std::string payoff_table_csv(const PayoffTable& table) {
  std::ostringstream out;
  out << "agent";
  for (const std::string& name : table.agents) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < table.agents.size(); ++i) {
    out << table.agents[i];
    for (std::size_t j = 0; j < table.agents.size(); ++j) {
      out << ','
          << format_double(table.payoff(static_cast<int>(i),
                                        static_cast<int>(j)));
    }
    out << '\n';
  }
  return out.str();
}

void parse_payoff_csv(const std::string& text,
                      std::vector<std::string>& agents,
                      std::vector<std::vector<double>>& payoffs) {
  agents.clear();
  payoffs.clear();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) -> std::runtime_error {
    return std::runtime_error("payoff csv line " + std::to_string(lineno) +
                              ": " + what);
  };
  if (!std::getline(in, line)) throw fail("empty file");
  ++lineno;
  std::vector<std::string> header = csv_split(line);
  if (header.size() < 2 || header[0] != "agent") {
    throw fail("expected header 'agent,<names...>'");
  }
  agents.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields = csv_split(line);
    if (fields.size() != agents.size() + 1) throw fail("wrong field count");
    std::size_t row = payoffs.size();
    if (row >= agents.size() || fields[0] != agents[row]) {
      throw fail("row label does not match header order");
    }
    std::vector<double> values;
    for (std::size_t j = 1; j < fields.size(); ++j) {
      try {
        values.push_back(std::stod(fields[j]));
      } catch (const std::exception&) {
        throw fail("bad number '" + fields[j] + "'");
      }
    }
    payoffs.push_back(std::move(values));
  }
  if (payoffs.size() != agents.size()) {
    throw std::runtime_error("payoff csv: expected " +
                             std::to_string(agents.size()) + " rows, got " +
                             std::to_string(payoffs.size()));
  }
}

}  // namespace exitlab
