#include "mixsdp/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mixsdp/io.hpp"
#include "mixsdp/problems.hpp"
#include "mixsdp/rounding.hpp"
#include "mixsdp/solver.hpp"
#include "mixsdp/validation.hpp"

namespace mixsdp::cli {

namespace {

struct Options {
  std::string input;
  std::size_t n = 0;
  std::size_t m = 0;
  double p = 0.1;
  double snr = 16.0;
  double beta = 0.8;
  std::string schedule = "fixed";
  double alpha = 10.0;
  std::string rule = "cyclic";
  std::string rank = "auto";
  double eps = 1e-5;
  std::size_t max_sweeps = 10000;
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::size_t seeds = 20;
  std::string trace;
  std::string output;
  std::string format = "json";
  bool require_converged = false;
};

// Carries an exit code together with the pipeline stage that failed.
struct StageError : std::runtime_error {
  StageError(int code, const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), code(code) {}
  int code;
};

void add_config_flags(CLI::App& sub, Options& o) {
  sub.add_option("--beta", o.beta, "momentum in [0, 1)")->capture_default_str();
  sub.add_option("--schedule", o.schedule, "fixed | warmup")->capture_default_str();
  sub.add_option("--alpha", o.alpha, "warm-up rate")->capture_default_str();
  sub.add_option("--rule", o.rule, "cyclic | uniform | importance | greedy")->capture_default_str();
  sub.add_option("--rank", o.rank, "INT or auto = ceil(sqrt(2n))")->capture_default_str();
  sub.add_option("--eps", o.eps, "relative stopping tolerance")->capture_default_str();
  sub.add_option("--max-sweeps", o.max_sweeps, "sweep cap")->capture_default_str();
  sub.add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  sub.add_option("--trace", o.trace, "write the per-sweep trace here");
  sub.add_option("--output", o.output, "write the result record here");
  sub.add_option("--format", o.format, "json | csv")->capture_default_str();
  sub.add_flag("--require-converged", o.require_converged, "exit 3 when the sweep cap is hit");
}

SolverConfig make_config(const Options& o) {
  SolverConfig config;
  config.algorithm = Algorithm::Bcm;
  if (!(o.beta >= 0.0 && o.beta < 1.0))
    throw StageError(kUsage, "usage", "--beta must satisfy 0 <= beta < 1 (momentum bound), got " + std::to_string(o.beta));
  config.beta = o.beta;
  if (o.schedule == "warmup") {
    config.schedule = ExponentialWarmup{o.alpha, 0};
  } else if (o.schedule != "fixed") {
    throw StageError(kUsage, "usage", "--schedule must be fixed or warmup");
  }
  const auto rule = parse_rule(o.rule);
  if (!rule) throw StageError(kUsage, "usage", "unknown --rule '" + o.rule + "'");
  config.rule = *rule;
  if (o.rank != "auto") {
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(o.rank.data(), o.rank.data() + o.rank.size(), k);
    if (ec != std::errc{} || ptr != o.rank.data() + o.rank.size() || k == 0)
      throw StageError(kUsage, "usage", "--rank must be a positive integer or auto");
    config.rank = k;
  }
  if (!(o.eps > 0.0)) throw StageError(kUsage, "usage", "--eps must be positive");
  config.epsilon = o.eps;
  config.max_sweeps = o.max_sweeps;
  config.seed = o.seed;
  return config;
}

io::Format make_format(const Options& o) {
  const auto f = io::parse_format(o.format);
  if (!f) throw StageError(kUsage, "usage", "--format must be json or csv");
  return *f;
}

ProblemInstance load(const Options& o, std::ostream& err) {
  try {
    auto parsed = io::load_instance(o.input);
    if (parsed.warnings)
      err << "warning: dropped " << parsed.warnings << " self-loop" << (parsed.warnings > 1 ? "s" : "") << " in "
          << o.input << "\n";
    return std::move(parsed.instance);
  } catch (const io::IoError& e) {
    throw StageError(kInputOutput, "read", e.what());
  } catch (const io::ParseError& e) {
    throw StageError(kInputOutput, "parse", o.input + ": " + e.what());
  }
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

struct Outcome {
  SolveResult result;
  double seconds;
};

Outcome run_solver(const Reduction& red, const SolverConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  try {
    auto result = solve(red.cost, red.value.offset, config);
    return {std::move(result), std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()};
  } catch (const std::invalid_argument& e) {
    throw StageError(kUsage, "solve", e.what());
  }
}

int finish(const Options& o, const SolverConfig& config, const Outcome& run, const std::string& problem,
           std::optional<double> value, std::optional<std::vector<int>> assignment) {
  const auto format = make_format(o);
  try {
    if (!o.trace.empty()) io::write_trace(run.result.trace, o.trace, format);
    if (!o.output.empty()) {
      io::ResultRecord record;
      record.problem = problem;
      record.n = run.result.v.size();
      record.k = run.result.v.rank();
      record.beta = config.beta;
      record.rule = std::string(to_string(config.rule));
      record.sweeps = run.result.sweeps_used;
      record.f = run.result.objective;
      record.bound_or_value = value;
      record.assignment = std::move(assignment);
      if (!o.trace.empty()) record.trace_ref = o.trace;
      io::write_result(record, o.output, format);
    }
  } catch (const io::IoError& e) {
    throw StageError(kInputOutput, "write", e.what());
  }
  if (o.require_converged && !run.result.converged) return kNotConverged;
  return kOk;
}

std::string solve_summary(const Outcome& run) {
  return "f=" + fmt(run.result.objective) + " sweeps=" + std::to_string(run.result.sweeps_used) +
         " converged=" + (run.result.converged ? "yes" : "no") + " seconds=" + fmt(run.seconds);
}

MaxCutInstance as_graph(const ProblemInstance& inst) {
  if (const auto* g = std::get_if<MaxCutInstance>(&inst)) return *g;
  if (const auto* raw = std::get_if<RawInstance>(&inst)) {
    std::vector<Edge> edges;
    for (const auto& t : raw->triplets)
      if (t.row < t.col) edges.push_back({t.row, t.col, t.weight});
    return MaxCutInstance::from_edges(raw->n, edges);
  }
  throw StageError(kInputOutput, "parse", "input is not a graph");
}

MaxCutInstance graph_input(const Options& o, std::ostream& err) {
  if (!o.input.empty()) return as_graph(load(o, err));
  if (o.n == 0) throw StageError(kUsage, "usage", "give --input PATH or --n INT --p FLOAT");
  if (!(o.p >= 0.0 && o.p <= 1.0)) throw StageError(kUsage, "usage", "--p must lie in [0, 1]");
  return erdos_renyi(o.n, o.p, o.seed);
}

int cmd_maxcut(const Options& o, std::ostream& out, std::ostream& err) {
  const auto config = make_config(o);
  const auto graph = graph_input(o, err);
  const auto red = maxcut_to_cost(graph);
  const auto run = run_solver(red, config);
  const auto rounding = round_maxcut(run.result.v, graph, o.trials, o.seed);
  out << "maxcut n=" << graph.n << " edges=" << graph.edges.size() << " " << solve_summary(run)
      << " bound=" << fmt(red.value(run.result.objective)) << " cut=" << fmt(rounding.best_value) << "\n";
  return finish(o, config, run, "maxcut", rounding.best_value, rounding.assignment);
}

int cmd_maxsat(const Options& o, std::ostream& out, std::ostream& err) {
  const auto config = make_config(o);
  MaxSatInstance formula;
  if (!o.input.empty()) {
    auto inst = load(o, err);
    if (!std::holds_alternative<MaxSatInstance>(inst)) throw StageError(kInputOutput, "parse", "maxsat expects a .cnf file");
    formula = std::get<MaxSatInstance>(std::move(inst));
  } else {
    if (o.n < 3 || o.m == 0) throw StageError(kUsage, "usage", "give --input PATH.cnf or --n INT (>= 3) --m INT");
    formula = random_ksat(o.n, o.m, 3, o.seed);
  }
  const auto red = [&] {
    try {
      return maxsat_to_cost(formula);
    } catch (const std::invalid_argument& e) {
      throw StageError(kInputOutput, "build", e.what());
    }
  }();
  const auto run = run_solver(red, config);
  const auto rounding = round_maxsat(run.result.v, formula, o.trials, o.seed);
  out << "maxsat vars=" << formula.num_vars << " clauses=" << formula.clauses.size() << " " << solve_summary(run)
      << " bound=" << fmt(red.value(run.result.objective)) << " satisfied=" << fmt(rounding.best_value) << "\n";
  return finish(o, config, run, "maxsat", rounding.best_value, rounding.assignment);
}

int cmd_mimo(const Options& o, std::ostream& out, std::ostream&) {
  const auto config = make_config(o);
  if (o.m == 0 || o.n == 0 || !(o.snr > 0.0)) throw StageError(kUsage, "usage", "mimo needs --m, --n and --snr > 0");
  const auto sample = simulate_mimo(o.m, o.n, o.snr, o.seed);
  const auto red = mimo_to_cost(sample.instance);
  const auto run = run_solver(red, config);
  const auto detected = detect_mimo(run.result.v, sample.instance);
  const auto zf = validation::zero_forcing_detect(sample.instance);
  auto errors = [&](const std::vector<int>& x) {
    std::size_t e = 0;
    for (std::size_t i = 0; i < x.size(); ++i) e += x[i] != sample.x_true[i];
    return e;
  };
  out << "mimo m=" << o.m << " n=" << o.n << " snr=" << fmt(o.snr) << " " << solve_summary(run)
      << " residual=" << fmt(detected.residual) << " bit_errors=" << errors(detected.x)
      << " zf_bit_errors=" << errors(zf) << "\n";
  return finish(o, config, run, "mimo", detected.residual, detected.x);
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  const auto config = make_config(o);
  RawInstance raw;
  if (!o.input.empty()) {
    auto inst = load(o, err);
    if (auto* r = std::get_if<RawInstance>(&inst)) {
      raw = std::move(*r);
    } else if (auto* g = std::get_if<MaxCutInstance>(&inst)) {
      raw.n = g->n;
      for (const auto& e : g->edges) {
        raw.triplets.push_back({e.u, e.v, e.weight});
        raw.triplets.push_back({e.v, e.u, e.weight});
      }
    } else {
      throw StageError(kInputOutput, "parse", "solve expects a matrix or edge list");
    }
  } else {
    if (o.n == 0) throw StageError(kUsage, "usage", "give --input PATH or --n INT --p FLOAT");
    if (!(o.p >= 0.0 && o.p <= 1.0)) throw StageError(kUsage, "usage", "--p must lie in [0, 1]");
    raw = random_gaussian(o.n, o.p, o.seed);
  }
  const auto red = to_cost(raw);
  const auto run = run_solver(red, config);
  out << "solve n=" << raw.n << " nnz=" << red.cost.nonzeros() << " " << solve_summary(run) << "\n";
  return finish(o, config, run, "raw", run.result.problem_value(), std::nullopt);
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  const auto base = make_config(o);
  const auto graph = graph_input(o, err);
  const auto red = maxcut_to_cost(graph);

  const std::vector<double> betas{0.0, 0.2, 0.4, 0.6, 0.8};
  const std::vector<CoordinateRule> rules{CoordinateRule::Cyclic, CoordinateRule::Uniform,
                                          CoordinateRule::Importance, CoordinateRule::Greedy};
  std::vector<std::string> names;
  std::vector<std::future<SolveResult>> jobs;
  for (auto rule : rules)
    for (double beta : betas) {
      auto config = base;
      config.beta = beta;
      config.rule = rule;
      config.trace_level = TraceLevel::PerSweep;
      names.push_back("b" + fmt(beta) + "_" + std::string(to_string(rule)));
      jobs.push_back(std::async(std::launch::async, [&red, config] { return solve(red.cost, 0.0, config); }));
    }
  std::vector<SolveResult> results;
  for (auto& job : jobs) results.push_back(job.get());

  // Residuals are measured against the best f seen anywhere in the grid.
  double best = std::numeric_limits<double>::infinity();
  std::size_t longest = 0;
  for (const auto& r : results) {
    for (const auto& s : r.trace.sweeps) best = std::min(best, s.f);
    longest = std::max(longest, r.trace.sweeps.size());
  }

  std::ostringstream table;
  table << "sweep";
  for (const auto& name : names) table << "," << name;
  table << "\n";
  for (std::size_t t = 0; t < longest; ++t) {
    table << t;
    for (const auto& r : results) {
      const auto& sweeps = r.trace.sweeps;
      table << ",";
      if (!sweeps.empty()) table << fmt(std::abs(sweeps[std::min(t, sweeps.size() - 1)].f - best));
    }
    table << "\n";
  }
  if (!o.trace.empty()) {
    try {
      io::write_file(o.trace, table.str());
    } catch (const io::IoError& e) {
      throw StageError(kInputOutput, "write", e.what());
    }
    out << "bench cells=" << results.size() << " best_f=" << fmt(best) << " table=" << o.trace << "\n";
  } else {
    out << table.str();
  }
  return kOk;
}

int cmd_check(const Options& o, std::ostream& out) {
  if (o.n < 2) throw StageError(kUsage, "usage", "check needs --n >= 2");
  const auto outcomes = validation::run_invariant_suite(o.n, o.seeds);
  std::size_t passed = 0;
  std::size_t failed = 0;
  for (const auto& c : outcomes) {
    out << (c.failed ? "FAIL " : "PASS ") << c.name << ": " << c.passed << " passed, " << c.failed << " failed\n";
    passed += c.passed;
    failed += c.failed;
  }
  out << "check n=" << o.n << " seeds=" << o.seeds << " passed=" << passed << " failed=" << failed << "\n";
  return failed ? kCheckFailed : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diagonally constrained SDP solver (Mixing Method with momentum)", "mixsdp"};
  app.require_subcommand(1, 1);
  Options o;

  auto* maxcut = app.add_subcommand("maxcut", "MaxCut relaxation with hyperplane rounding");
  maxcut->add_option("--input", o.input, "edge list (n m header, 1-based 'i j w' lines)");
  maxcut->add_option("--n", o.n, "generate G(n, p) instead of reading --input");
  maxcut->add_option("--p", o.p, "edge probability for the generator")->capture_default_str();
  maxcut->add_option("--trials", o.trials, "rounding trials")->check(CLI::PositiveNumber)->capture_default_str();
  add_config_flags(*maxcut, o);

  auto* maxsat = app.add_subcommand("maxsat", "MaxSAT relaxation with truth-column rounding");
  maxsat->add_option("--input", o.input, "DIMACS CNF file");
  maxsat->add_option("--n", o.n, "variables for a random 3-SAT formula");
  maxsat->add_option("--m", o.m, "clauses for a random 3-SAT formula");
  maxsat->add_option("--trials", o.trials, "rounding trials")->check(CLI::PositiveNumber)->capture_default_str();
  add_config_flags(*maxsat, o);

  auto* mimo = app.add_subcommand("mimo", "simulate a +-1 MIMO channel and detect");
  mimo->add_option("--m", o.m, "receive antennas")->required();
  mimo->add_option("--n", o.n, "transmit antennas")->required();
  mimo->add_option("--snr", o.snr, "signal-to-noise ratio")->capture_default_str();
  add_config_flags(*mimo, o);

  auto* raw = app.add_subcommand("solve", "solve a raw cost matrix");
  raw->add_option("--input", o.input, "Matrix Market (.mtx) or edge list");
  raw->add_option("--n", o.n, "generate a random Gaussian matrix of this size");
  raw->add_option("--p", o.p, "density for the generator")->capture_default_str();
  add_config_flags(*raw, o);

  auto* bench = app.add_subcommand("bench", "objective residual tables over a beta x rule grid");
  bench->add_option("--input", o.input, "edge list");
  bench->add_option("--n", o.n, "generate G(n, p)");
  bench->add_option("--p", o.p, "edge probability")->capture_default_str();
  add_config_flags(*bench, o);

  auto* check = app.add_subcommand("check", "run the invariant suite on random instances");
  check->add_option("--n", o.n, "instance size")->required();
  check->add_option("--seeds", o.seeds, "number of random instances")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (maxcut->parsed()) return cmd_maxcut(o, out, err);
    if (maxsat->parsed()) return cmd_maxsat(o, out, err);
    if (mimo->parsed()) return cmd_mimo(o, out, err);
    if (raw->parsed()) return cmd_solve(o, out, err);
    if (bench->parsed()) return cmd_bench(o, out, err);
    if (check->parsed()) return cmd_check(o, out);
  } catch (const StageError& e) {
    err << "error: " << e.what() << "\n";
    return e.code;
  }
  return kUsage;
}

}  // namespace mixsdp::cli
