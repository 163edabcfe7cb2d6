// exitlab: self-play training, tournament evaluation and alpha-rank
// reporting for the built-in board games.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exitlab/eval.hpp"
#include "exitlab/games.hpp"
#include "exitlab/text_io.hpp"
#include "exitlab/train.hpp"

namespace {

using exitlab::TrainConfig;
using json = nlohmann::json;

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string default_out_dir() {
  const char* env = std::getenv("EXITLAB_OUT_DIR");
  return env != nullptr ? env : "out";
}

json config_json(const TrainConfig& cfg) {
  json j;
  j["game"] = cfg.game;
  j["wed"] = cfg.wed;
  j["per"] = cfg.per;
  j["cee"] = cfg.cee;
  j["cee_is"] = cfg.cee_is;
  j["episodes"] = cfg.episodes;
  j["iterations"] = cfg.iterations;
  j["c_puct"] = cfg.c_puct;
  j["buffer_capacity"] = cfg.buffer_capacity;
  j["batch_size"] = cfg.batch_size;
  j["per_alpha"] = cfg.per_alpha;
  j["per_beta"] = cfg.per_beta;
  j["cee_mix"] = cfg.cee_mix;
  j["cee_gamma"] = cfg.cee_gamma;
  j["trunc_low"] = cfg.trunc_low;
  j["trunc_high"] = cfg.trunc_high;
  j["checkpoints"] = cfg.checkpoint_schedule;
  j["seed"] = cfg.seed;
  j["eta"] = cfg.optimizer.eta;
  j["rho_opt"] = cfg.optimizer.rho;
  j["epsilon"] = cfg.optimizer.epsilon;
  j["eta_mu"] = cfg.eta_mu;
  return j;
}

// "--key=value" leftovers become TrainConfig overrides.
std::map<std::string, std::string> overrides_from_extras(
    const std::vector<std::string>& extras) {
  std::map<std::string, std::string> kv;
  for (const std::string& arg : extras) {
    if (arg.rfind("--", 0) != 0) {
      throw std::invalid_argument("unexpected argument: " + arg);
    }
    auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 2) {
      throw std::invalid_argument("expected --key=value, got: " + arg);
    }
    kv[arg.substr(2, eq - 2)] = arg.substr(eq + 1);
  }
  return kv;
}

int cmd_train(const std::string& game, const std::string& variant,
              int episodes, std::uint64_t seed, std::string out_dir,
              const std::string& config_path,
              const std::vector<std::string>& extras) {
  TrainConfig cfg;
  if (!config_path.empty()) {
    auto kv = exitlab::load_config_file(config_path);
    exitlab::apply_config_overrides(cfg, kv);
  }
  cfg.game = game;
  exitlab::apply_variant(cfg, variant);
  cfg.episodes = episodes;
  cfg.seed = seed;
  exitlab::apply_config_overrides(cfg, overrides_from_extras(extras));
  cfg.validate();
  if (out_dir.empty()) out_dir = default_out_dir();

  json manifest;
  manifest["run_id"] = cfg.game + "-" + exitlab::variant_name(cfg) + "-s" +
                       std::to_string(cfg.seed);
  manifest["game"] = cfg.game;
  manifest["variant"] = exitlab::variant_name(cfg);
  manifest["seed"] = cfg.seed;
  manifest["config"] = config_json(cfg);
  manifest["status"] = "incomplete";
  manifest["started_at"] = iso_timestamp();
  manifest["checkpoints"] = json::array();
  const std::string manifest_path = out_dir + "/manifest.json";
  exitlab::write_file_atomic(manifest_path, manifest.dump(2) + "\n");

  exitlab::RunArtifacts artifacts = exitlab::run_training(cfg, out_dir);

  manifest["status"] = "complete";
  manifest["finished_at"] = iso_timestamp();
  manifest["checkpoints"] = artifacts.checkpoint_paths;
  manifest["metrics"] = artifacts.metrics_path;
  exitlab::write_file_atomic(manifest_path, manifest.dump(2) + "\n");

  std::cout << "run complete: " << artifacts.checkpoint_paths.size()
            << " checkpoint(s), metrics at " << artifacts.metrics_path << '\n';
  return 0;
}

int cmd_evaluate(const std::string& game,
                 const std::vector<std::string>& agent_args,
                 int games_per_pair, int iterations, double c_puct,
                 std::uint64_t seed, std::string out_dir, int threads) {
  std::vector<exitlab::AgentSpec> agents;
  for (const std::string& arg : agent_args) {
    agents.push_back(exitlab::parse_agent_spec(arg));
  }
  for (const exitlab::AgentSpec& spec : agents) {
    if (spec.kind == exitlab::AgentKind::kExit &&
        !std::filesystem::exists(spec.checkpoint_path)) {
      throw std::runtime_error("missing checkpoint file: " +
                               spec.checkpoint_path);
    }
  }
  if (out_dir.empty()) out_dir = default_out_dir();

  exitlab::PayoffTable table = exitlab::tournament(
      agents, game, games_per_pair, iterations, c_puct, seed, threads);

  exitlab::write_file_atomic(out_dir + "/payoffs.csv",
                             exitlab::payoff_table_csv(table));

  // per unordered pair: pooled wins over both seats with Agresti-Coull bounds
  std::ostringstream rates;
  rates << "agent_a,agent_b,games,a_wins,b_wins,draws,a_score,ci_low,ci_high\n";
  const int k = static_cast<int>(agents.size());
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const auto& ij = table.counts[i][j];
      const auto& ji = table.counts[j][i];
      int a_wins = ij.p1_wins + (i == j ? 0 : ji.p2_wins);
      int b_wins = ij.p2_wins + (i == j ? 0 : ji.p1_wins);
      int draws = ij.draws + (i == j ? 0 : ji.draws);
      int games = a_wins + b_wins + draws;
      if (games == 0) continue;
      exitlab::Interval ci = exitlab::agresti_coull(a_wins, games);
      rates << table.agents[i] << ',' << table.agents[j] << ',' << games << ','
            << a_wins << ',' << b_wins << ',' << draws << ','
            << exitlab::format_double((a_wins + 0.5 * draws) / games) << ','
            << exitlab::format_double(ci.low) << ','
            << exitlab::format_double(ci.high) << '\n';
    }
  }
  exitlab::write_file_atomic(out_dir + "/winrates.csv", rates.str());
  std::cout << "evaluated " << k << " agent(s): " << out_dir
            << "/payoffs.csv, " << out_dir << "/winrates.csv\n";
  return 0;
}

int cmd_rank(const std::vector<std::string>& payoff_paths, int population,
             double alpha, bool sweep, std::string out_dir) {
  if (out_dir.empty()) out_dir = default_out_dir();
  std::vector<std::string> agents;
  std::vector<exitlab::AlphaRankResult> results;
  for (const std::string& path : payoff_paths) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> payoffs;
    try {
      exitlab::parse_payoff_csv(exitlab::read_file(path), names, payoffs);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": " + e.what());
    }
    if (agents.empty()) {
      agents = names;
    } else if (agents != names) {
      throw std::runtime_error(path + ": agent list differs from " +
                               payoff_paths.front());
    }
    exitlab::AlphaRankResult result;
    if (sweep) {
      result = exitlab::alpha_sweep(payoffs, population);
      if (result.sweep_warning) {
        std::cerr << "warning: " << path
                  << ": no stable plateau in the intensity sweep; using the "
                     "largest intensity\n";
      }
    } else {
      exitlab::AlphaRankConfig cfg;
      cfg.intensity = alpha;
      cfg.population = population;
      result = exitlab::alpha_rank(payoffs, cfg);
    }
    results.push_back(std::move(result));

    const int k = static_cast<int>(agents.size());
    std::vector<int> order(k * k);
    for (int p = 0; p < k * k; ++p) order[p] = p;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const auto& mass = results.back().stationary;
      return mass[a] != mass[b] ? mass[a] > mass[b] : a < b;
    });
    std::ostringstream report;
    report << "rank,role1,role2,mass\n";
    for (int r = 0; r < k * k; ++r) {
      int p = order[r];
      report << (r + 1) << ',' << agents[p / k] << ',' << agents[p % k] << ','
             << exitlab::format_double(results.back().stationary[p]) << '\n';
    }
    std::string stem = std::filesystem::path(path).stem().string();
    exitlab::write_file_atomic(out_dir + "/alpharank-" + stem + ".csv",
                               report.str());
  }

  exitlab::RankAggregate agg = exitlab::aggregate_ranks(agents, results);
  std::ostringstream out;
  out << "agent,num_top_ranks,avg_strategy_mass\n";
  int total_ranks = 0;
  double total_mass = 0.0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    out << agents[i] << ',' << agg.top_ranks[i] << ','
        << exitlab::format_double(agg.avg_mass[i]) << '\n';
    total_ranks += agg.top_ranks[i];
    total_mass += agg.avg_mass[i];
  }
  out << "total," << total_ranks << ',' << exitlab::format_double(total_mass)
      << '\n';
  exitlab::write_file_atomic(out_dir + "/aggregate.csv", out.str());
  std::cout << "ranked " << payoff_paths.size() << " game(s): " << out_dir
            << "/aggregate.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expert-iteration self-play laboratory"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "run self-play training");
  train->allow_extras();  // --key=value TrainConfig overrides
  std::string game = "tictactoe", variant = "exit", config_path;
  std::string train_out;
  int episodes = 200;
  std::uint64_t seed = 1;
  train->add_option("--game", game, "game id")
      ->check(CLI::IsMember(exitlab::game_names()));
  train->add_option("--variant", variant, "training variant")
      ->check(CLI::IsMember(exitlab::kVariantNames));
  train->add_option("--episodes", episodes, "self-play games");
  train->add_option("--seed", seed, "master seed");
  train->add_option("--out-dir", train_out, "output directory");
  train->add_option("--config", config_path, "key = value config file");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "round-robin tournament");
  std::vector<std::string> agent_args;
  std::string eval_game, eval_out;
  int games_per_pair = 120, eval_iterations = 800, threads = 1;
  double eval_c_puct = 2.5;
  std::uint64_t eval_seed = 1;
  evaluate->add_option("--game", eval_game, "game id")
      ->required()
      ->check(CLI::IsMember(exitlab::game_names()));
  evaluate
      ->add_option("--agents", agent_args,
                   "checkpoint paths and/or uct, mc-grave")
      ->required()
      ->expected(-1);
  evaluate->add_option("--games-per-pair", games_per_pair, "games per pair");
  evaluate->add_option("--iterations", eval_iterations, "search iterations");
  evaluate->add_option("--c-puct", eval_c_puct, "PUCT exploration constant");
  evaluate->add_option("--seed", eval_seed, "tournament seed");
  evaluate->add_option("--out", eval_out, "output directory");
  evaluate->add_option("--threads", threads, "match worker threads");

  // rank
  auto* rank = app.add_subcommand("rank", "alpha-rank payoff tables");
  std::vector<std::string> payoff_paths;
  std::string rank_out;
  int population = 50;
  double alpha = 100.0;
  bool sweep = false;
  rank->add_option("--payoffs", payoff_paths, "payoff CSVs, one per game")
      ->required()
      ->expected(-1);
  rank->add_option("--m", population, "alpha-rank population size");
  rank->add_option("--alpha", alpha, "fixed ranking intensity");
  rank->add_flag("--sweep", sweep, "sweep the ranking intensity");
  rank->add_option("--out", rank_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (train->parsed()) {
      return cmd_train(game, variant, episodes, seed, train_out, config_path,
                       train->remaining());
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_game, agent_args, games_per_pair,
                          eval_iterations, eval_c_puct, eval_seed, eval_out,
                          threads);
    }
    if (rank->parsed()) {
      return cmd_rank(payoff_paths, population, alpha, sweep, rank_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
