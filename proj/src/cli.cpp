#include "attestgame/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "attestgame/attestation_model.hpp"
#include "attestgame/best_response.hpp"
#include "attestgame/defender_optimal.hpp"
#include "attestgame/errors.hpp"
#include "attestgame/game_model.hpp"
#include "attestgame/random.hpp"
#include "attestgame/scenario.hpp"

namespace attestgame::cli {

namespace {

using nlohmann::json;

constexpr double kOracleMargin = -1e-6;

std::string fixed6(double v) {
  if (std::abs(v) < 5e-7) v = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::uint64_t entropy_seed() {
  std::random_device device;
  return (static_cast<std::uint64_t>(device()) << 32) ^ device();
}

// Writes `text` to `path`, or to `out` when no path was given.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  file << text;
  if (!file) throw std::runtime_error("failed writing " + path);
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::optional<std::size_t> devices;
  std::optional<std::size_t> classes;
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out;
  bool general_sum = false;
};

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  ScenarioConfig config;
  const bool from_file = !args.config_path.empty();
  if (from_file) config = config_from_json(read_json_file(args.config_path));

  auto override_note = [&](const char* flag) {
    if (from_file) err << "note: " << flag << " overrides the config file value\n";
  };
  if (args.devices) {
    override_note("--devices");
    config.device_count = *args.devices;
  }
  if (args.classes) {
    override_note("--classes");
    config.class_count = *args.classes;
  }
  if (args.general_sum) {
    override_note("--general-sum");
    config.zero_sum = false;
  }
  if (args.seed) {
    override_note("--seed");
    config.seed = *args.seed;
  } else if (!from_file || !read_json_file(args.config_path).contains("seed")) {
    config.seed = entropy_seed();
  }

  const Environment env = generate(config);
  const std::string text = environment_to_json(env, config).dump(2) + "\n";
  emit(text, args.out, out);
  // Keep stdout parseable when the document itself goes there.
  (args.out.empty() ? err : out) << "seed: " << config.seed << "\n";
  return kSuccess;
}

// ------------------------------------------------------------------- solve

struct SolveArgs {
  std::string env_path;
  std::string out;
  double epsilon = 0.0;
  bool oracle_check = false;
  std::size_t samples = 100000;
  std::optional<std::uint64_t> seed;
};

std::string solve_summary(const Environment& env, const DefenderSolution& s) {
  std::ostringstream line;
  line << "modes:";
  for (std::size_t c = 0; c < env.class_count(); ++c) {
    line << ' ' << env.classes()[c].id << '=' << to_string(s.mode_per_class[c]);
  }
  line << " | defender_utility=" << fixed6(s.defender_utility)
       << " attacker_utility=" << fixed6(s.attacker_best_response.attack_utility)
       << (s.attacker_best_response.is_tie ? " (attacker indifferent)" : "");
  return line.str();
}

json solution_to_json(const Environment& env, const DefenderSolution& s,
                      double epsilon) {
  json modes = json::object();
  json candidates = json::array();
  for (std::size_t c = 0; c < env.class_count(); ++c) {
    const auto& log = s.candidate_log[c];
    modes[env.classes()[c].id] = std::string(to_string(s.mode_per_class[c]));
    json entry = {{"class_id", env.classes()[c].id},
                  {"non_deter_utility", log.non_deter_utility},
                  {"deter_utility", log.deter_utility ? json(*log.deter_utility)
                                                      : json(nullptr)}};
    candidates.push_back(std::move(entry));
  }
  return json{
      {"strategy", defender_strategy_to_json(s.strategy, env)},
      {"attack", attacker_strategy_to_json(s.attacker_best_response.canonical_attack, env)},
      {"modes", std::move(modes)},
      {"candidates", std::move(candidates)},
      {"defender_utility", s.defender_utility},
      {"attacker_utility", s.attacker_best_response.attack_utility},
      {"attacker_indifferent", s.attacker_best_response.is_tie},
      {"epsilon", epsilon},
  };
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  const Environment env = load_environment(args.env_path).environment;
  if (env.method_count() != 1)
    throw UnsupportedCase("unsupported: optimal solver requires a single method");

  const DefenderSolution solution =
      optimal_strategy(env, SolverOptions{args.epsilon});
  const json doc = solution_to_json(env, solution, args.epsilon);
  if (!args.out.empty()) emit(doc.dump(2) + "\n", args.out, out);
  out << solve_summary(env, solution) << "\n";

  if (args.oracle_check) {
    const std::uint64_t seed = args.seed ? *args.seed : entropy_seed();
    if (!args.seed) err << "seed: " << seed << "\n";
    const auto sampled = randomized_search_check(env, args.samples, seed);
    if (!sampled) {
      out << "oracle: no samples drawn\n";
      return kSuccess;
    }
    const double margin = solution.defender_utility - sampled->defender_utility;
    out << "oracle: samples=" << args.samples << " seed=" << seed
        << " best_sampled=" << fixed6(sampled->defender_utility)
        << " margin=" << fixed6(margin) << (margin >= kOracleMargin ? " ok" : " FAILED")
        << "\n";
    if (margin < kOracleMargin) return kValidation;
  }
  return kSuccess;
}

// ----------------------------------------------------------- best-response

struct BestResponseArgs {
  std::string env_path;
  std::string strategy_path;
  std::string out;
  bool brute_force = false;
};

int cmd_best_response(const BestResponseArgs& args, std::ostream& out,
                      std::ostream&) {
  const Environment env = load_environment(args.env_path).environment;
  const DefenderStrategy p =
      defender_strategy_from_json(read_json_file(args.strategy_path), env);

  AttackerStrategy attack;
  double utility = 0.0;
  bool tie = false;
  if (args.brute_force) {
    const auto r = brute_force_best_response(p, env);
    attack = r.attack;
    utility = r.utility;
  } else {
    if (env.method_count() != 1)
      throw UnsupportedCase(
          "unsupported: closed-form best response requires a single method "
          "(use --brute-force)");
    const auto r = best_response(p, env);
    attack = r.canonical_attack;
    utility = r.attack_utility;
    tie = r.is_tie;
  }
  if (!args.out.empty())
    emit(attacker_strategy_to_json(attack, env).dump(2) + "\n", args.out, out);
  out << "attacked=" << attack.attacked_count() << "/" << env.device_count()
      << " attacker_utility=" << fixed6(utility)
      << " defender_utility=" << fixed6(defender_utility(p, attack, env))
      << (tie ? " (attacker indifferent)" : "") << "\n";
  return kSuccess;
}

// ----------------------------------------------------------------- compare

struct CompareArgs {
  std::string env_path;
  std::string out;
  std::size_t replicates = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> devices;
  std::optional<std::size_t> classes;
};

struct Row {
  std::string strategy;
  std::string response;
  double defender = 0.0;
  double attacker = 0.0;
};

std::vector<Row> comparison_rows(const Environment& env, std::ostream& err) {
  if (env.method_count() != 1)
    throw UnsupportedCase("unsupported: optimal solver requires a single method");

  const DefenderSolution optimal = optimal_strategy(env);
  std::vector<std::vector<double>> non_deter, deter;
  for (std::size_t c = 0; c < env.class_count(); ++c) {
    non_deter.push_back(optimal.candidate_log[c].non_deter);
    if (optimal.candidate_log[c].deter) {
      deter.push_back(*optimal.candidate_log[c].deter);
    } else {
      // No deterring vector exists; fall back to the strongest effort.
      err << "note: class " << env.classes()[c].id
          << " cannot be deterred; pD uses the per-device upper bounds\n";
      const auto& method = env.methods().front();
      std::vector<double> bounds;
      for (std::size_t d : env.members(c)) {
        const double t = method.detection_rate > 0.0
                             ? threshold_without_class_cost(env.devices()[d], method)
                             : 0.0;
        bounds.push_back(std::clamp(t, 0.0, 1.0));
      }
      deter.push_back(std::move(bounds));
    }
  }

  const std::vector<std::pair<std::string, DefenderStrategy>> strategies = {
      {"p0", baseline_never(env)},
      {"p1", baseline_always(env)},
      {"uniform", baseline_optimal_uniform(env).strategy},
      {"optimal", optimal.strategy},
      {"pND", assemble_strategy(env, non_deter)},
      {"pD", assemble_strategy(env, deter)},
  };
  const AttackerStrategy all(env.device_count(), true);
  const AttackerStrategy none(env.device_count(), false);

  std::vector<Row> rows;
  for (const auto& [label, p] : strategies) {
    const AttackerStrategy best = best_response(p, env).canonical_attack;
    rows.push_back({label, "best", defender_utility(p, best, env),
                    attacker_utility(p, best, env)});
  }
  for (const auto* response : {"attack_all", "no_attack"}) {
    const AttackerStrategy& a = std::string(response) == "attack_all" ? all : none;
    for (const auto& [label, p] : strategies) {
      rows.push_back({label, response, defender_utility(p, a, env),
                      attacker_utility(p, a, env)});
    }
  }
  return rows;
}

std::string rows_to_csv(const std::vector<Row>& rows) {
  std::string csv = "strategy,response,defender_utility,attacker_utility\n";
  for (const auto& r : rows) {
    csv += r.strategy + "," + r.response + "," + fixed6(r.defender) + "," +
           fixed6(r.attacker) + "\n";
  }
  return csv;
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<Row> rows;
  if (args.replicates == 0) {
    if (args.env_path.empty())
      throw ConfigError("compare needs an environment file or --replicates");
    rows = comparison_rows(load_environment(args.env_path).environment, err);
  } else {
    if (!args.env_path.empty())
      throw ConfigError("--replicates generates its own instances; drop the environment file");
    const std::uint64_t seed = args.seed ? *args.seed : entropy_seed();
    err << "seed: " << seed << "\n";
    ScenarioConfig config;
    if (args.devices) config.device_count = *args.devices;
    if (args.classes) config.class_count = *args.classes;

    // Per-replicate rows are kept in replicate order and summed afterwards,
    // so the mean does not depend on evaluation order.
    std::vector<std::vector<Row>> per_replicate(args.replicates);
    for (std::size_t r = 0; r < args.replicates; ++r) {
      ScenarioConfig c = config;
      c.seed = derive_stream_seed(seed, 1000 + r);
      per_replicate[r] = comparison_rows(generate(c), err);
    }
    rows = per_replicate.front();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double d = 0.0, a = 0.0;
      for (const auto& rep : per_replicate) {
        d += rep[i].defender;
        a += rep[i].attacker;
      }
      rows[i].defender = d / static_cast<double>(args.replicates);
      rows[i].attacker = a / static_cast<double>(args.replicates);
    }
  }
  emit(rows_to_csv(rows), args.out, out);
  return kSuccess;
}

// ---------------------------------------------------------- sweep-coverage

struct SweepArgs {
  std::string env_path;
  std::string grid;
  std::string calibration_path;
  double cost_scale = 1.0;
  std::string out;
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.empty()) {
    for (int i = 1; i <= 10; ++i) grid.push_back(i / 10.0);
    return grid;
  }
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size() || !(v >= 0.0 && v <= 1.0))
      throw ConfigError("--grid entries must be fractions in [0, 1], got '" + cell + "'");
    grid.push_back(v);
  }
  if (grid.empty()) throw ConfigError("--grid is empty");
  return grid;
}

int cmd_sweep_coverage(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  const Environment env = load_environment(args.env_path).environment;
  if (env.method_count() != 1)
    throw UnsupportedCase("unsupported: optimal solver requires a single method");
  const std::vector<double> grid = parse_grid(args.grid);

  CoverageCalibration calibration;
  if (args.calibration_path.empty()) {
    calibration = default_calibration();
    err << "note: synthetic default calibration (identity detection, "
        << "10 ms at full coverage); not measured data\n";
  } else {
    std::ifstream in(args.calibration_path);
    if (!in) throw ParseError("cannot open " + args.calibration_path);
    const auto points = read_calibration_csv(in);
    calibration = calibrate(points);
  }

  std::string csv = "coverage,detection_rate,run_cost,defender_utility\n";
  for (double coverage : grid) {
    const AttestationMethod method = method_from_coverage(
        coverage, calibration, args.cost_scale, env.methods().front().id);
    const Environment swept(env.devices(), env.classes(), {method}, env.zero_sum());
    const DefenderSolution s = optimal_strategy(swept);
    csv += fixed6(coverage) + "," + fixed6(method.detection_rate) + "," +
           fixed6(method.run_cost) + "," + fixed6(s.defender_utility) + "\n";
  }
  emit(csv, args.out, out);
  return kSuccess;
}

// ------------------------------------------------------- simulate-checksum

struct SimulateArgs {
  std::uint64_t blocks = 0;
  std::uint64_t modified = 1;
  std::uint64_t covered = 0;
  std::uint64_t trials = 500;
  std::uint64_t block_size = 500;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_simulate_checksum(const SimulateArgs& args, std::ostream& out,
                          std::ostream& err) {
  const MemoryLayout layout{args.blocks, args.block_size};
  const std::uint64_t seed = args.seed ? *args.seed : entropy_seed();
  if (!args.seed) err << "seed: " << seed << "\n";
  const double exact = checksum_detection_probability(layout, args.modified, args.covered);
  const double simulated =
      simulate_attestation(layout, args.modified, args.covered, args.trials, seed);
  const double coverage =
      static_cast<double>(args.covered) / static_cast<double>(args.blocks);
  std::string text = "blocks,block_size_bytes,modified,covered,coverage,trials,seed,exact,simulated\n";
  text += std::to_string(args.blocks) + "," + std::to_string(args.block_size) + "," +
          std::to_string(args.modified) + "," + std::to_string(args.covered) + "," +
          fixed6(coverage) + "," + std::to_string(args.trials) + "," +
          std::to_string(seed) + "," + fixed6(exact) + "," + fixed6(simulated) + "\n";
  emit(text, args.out, out);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Remote-attestation Stackelberg game solver", "attestgame"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Generate a random game instance");
  generate_cmd->add_option("--devices", gen.devices, "Number of devices (default 50)");
  generate_cmd->add_option("--classes", gen.classes, "Number of device classes (default 5)");
  generate_cmd->add_option("--seed", gen.seed, "Generator seed (drawn and printed if omitted)");
  generate_cmd->add_option("--config", gen.config_path, "Scenario config JSON; flags override it");
  generate_cmd->add_option("--out", gen.out, "Output environment JSON (stdout if omitted)");
  generate_cmd->add_flag("--general-sum", gen.general_sum, "Draw losses independently of gains");

  SolveArgs solve;
  std::optional<std::uint64_t> unused_seed;
  auto* solve_cmd = app.add_subcommand("solve", "Compute the defender's optimal strategy");
  solve_cmd->add_option("environment", solve.env_path, "Environment JSON")->required();
  solve_cmd->add_option("--out", solve.out, "Solution JSON");
  solve_cmd->add_option("--epsilon", solve.epsilon, "Extra probability on deterring devices")
      ->check(CLI::Range(0.0, 1.0));
  solve_cmd->add_flag("--oracle-check", solve.oracle_check,
                      "Compare against randomized search with exhaustive best responses");
  solve_cmd->add_option("--samples", solve.samples, "Oracle sample count (default 100000)");
  solve_cmd->add_option("--seed", solve.seed, "Oracle seed");

  BestResponseArgs br;
  auto* br_cmd = app.add_subcommand("best-response", "Attacker best response to a strategy");
  br_cmd->add_option("environment", br.env_path, "Environment JSON")->required();
  br_cmd->add_option("--strategy", br.strategy_path, "Defender strategy JSON")->required();
  br_cmd->add_option("--out", br.out, "Attack JSON");
  br_cmd->add_flag("--brute-force", br.brute_force, "Enumerate all attack vectors");
  br_cmd->add_option("--seed", unused_seed, "Accepted for uniformity; unused");

  CompareArgs cmp;
  auto* compare_cmd =
      app.add_subcommand("compare", "Optimal vs naive strategies as CSV");
  compare_cmd->add_option("environment", cmp.env_path, "Environment JSON");
  compare_cmd->add_option("--out", cmp.out, "Output CSV (stdout if omitted)");
  compare_cmd->add_option("--replicates", cmp.replicates,
                          "Average over this many generated instances");
  compare_cmd->add_option("--seed", cmp.seed, "Seed for --replicates");
  compare_cmd->add_option("--devices", cmp.devices, "Devices per replicate");
  compare_cmd->add_option("--classes", cmp.classes, "Classes per replicate");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand(
      "sweep-coverage", "Re-solve across checksum memory coverage levels");
  sweep_cmd->add_option("environment", sweep.env_path, "Environment JSON")->required();
  sweep_cmd->add_option("--grid", sweep.grid, "Comma-separated coverages (default 0.1..1.0)");
  sweep_cmd->add_option("--calibration", sweep.calibration_path,
                        "CSV coverage,detection_rate,runtime_ms");
  sweep_cmd->add_option("--cost-scale", sweep.cost_scale, "Cost units per millisecond")
      ->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--out", sweep.out, "Output CSV (stdout if omitted)");
  sweep_cmd->add_option("--seed", unused_seed, "Accepted for uniformity; unused");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand(
      "simulate-checksum", "Exact vs simulated pseudo-random checksum detection");
  sim_cmd->add_option("--blocks", sim.blocks, "Total memory blocks")->required();
  sim_cmd->add_option("--modified", sim.modified, "Modified blocks (default 1)");
  sim_cmd->add_option("--covered", sim.covered, "Blocks read per checksum")->required();
  sim_cmd->add_option("--trials", sim.trials, "Checksum runs (default 500)");
  sim_cmd->add_option("--block-size", sim.block_size, "Bytes per block (default 500)");
  sim_cmd->add_option("--seed", sim.seed, "Simulation seed");
  sim_cmd->add_option("--out", sim.out, "Output CSV (stdout if omitted)");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());

  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*generate_cmd) return cmd_generate(gen, out, err);
    if (*solve_cmd) return cmd_solve(solve, out, err);
    if (*br_cmd) return cmd_best_response(br, out, err);
    if (*compare_cmd) return cmd_compare(cmp, out, err);
    if (*sweep_cmd) return cmd_sweep_coverage(sweep, out, err);
    if (*sim_cmd) return cmd_simulate_checksum(sim, out, err);
  } catch (const UnsupportedCase& e) {
    err << e.what() << "\n";
    return kUnsupported;
  } catch (const EnumerationLimit& e) {
    err << "unsupported: " << e.what() << "\n";
    return kUnsupported;
  } catch (const ValidationError& e) {
    err << e.what() << "\n";
    return kValidation;
  } catch (const ParseError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const DegenerateFit& e) {
    err << "calibration: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace attestgame::cli
