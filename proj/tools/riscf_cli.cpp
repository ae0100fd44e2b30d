// Command-line front end: solve one scenario, run Monte-Carlo sweeps, run the
// invariant suite, print fronthaul overhead.

#include <riscf/riscf.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace riscf;

struct Overrides {
  std::string config = "default";
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  std::optional<double> eps;
  bool finalize = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "scenario JSON file, or 'default'");
  cmd->add_option("--seed", o.seed, "channel seed");
  cmd->add_option("--max-iters", o.max_iters, "iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--eps", o.eps, "convergence threshold on the sum-rate change")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--finalize-unit-modulus", o.finalize, "project theta to |theta_m| = 1 at the end");
}

ScenarioConfig resolved_config(const Overrides& o) {
  ScenarioConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.max_iters) c.max_iterations = *o.max_iters;
  if (o.eps) c.convergence_eps = *o.eps;
  validate(c);
  return c;
}

MethodId method_or_throw(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw ConfigError("unknown method '" + name + "'");
  return *m;
}

int cmd_solve(const Overrides& o, const std::string& method_name, const std::string& out_path) {
  const ScenarioConfig cfg = resolved_config(o);
  const MethodId method = method_or_throw(method_name);
  const ChannelSet ch = generate_channels(cfg, cfg.seed);
  SolveOptions opts = solve_options(cfg);
  opts.finalize_unit_modulus = o.finalize;
  const auto [state, rep] = run_baseline(method, cfg, ch, opts, cfg.seed);

  std::cout << "method " << rep.method << "  seed " << cfg.seed << "\n";
  std::cout << std::setprecision(9);
  std::cout << "iter  sum_rate_bps_hz  surrogate_nats  max_ap_power_mw  theta_excess  "
               "symbols_paper  symbols_actual\n";
  std::cout << std::setw(4) << 0 << "  " << std::setw(15) << rep.initial_sum_rate << "  "
            << std::setw(14) << rep.initial_surrogate << "\n";
  for (const auto& it : rep.trace)
    std::cout << std::setw(4) << it.index << "  " << std::setw(15) << it.sum_rate << "  "
              << std::setw(14) << it.surrogate << "  " << std::setw(15) << it.ap_power.maxCoeff()
              << "  " << std::setw(12) << it.theta_excess << "  " << std::setw(13) << it.paper_symbols
              << "  " << std::setw(14) << it.actual_symbols << "\n";
  std::cout << "final_sum_rate_bps_hz " << rep.final_sum_rate << "\n"
            << "iterations " << rep.iterations_used << "  converged " << (rep.converged ? "yes" : "no")
            << "\n"
            << "signaling_symbols_paper " << rep.ledger.total_paper_symbols() << "  actual "
            << rep.ledger.total_symbols() << "\n"
            << "wall_time_s " << rep.wall_time << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw Error("cannot open '" + out_path + "' for writing");
    out << to_json(rep).dump(2) << "\n";
  }
  return 0;
}

int cmd_sweep(const Overrides& o, const std::string& spec_path, const std::string& kind,
              const std::vector<std::string>& methods, std::optional<int> seeds, int workers,
              const std::string& out_path, bool quiet) {
  SweepSpec spec;
  if (!spec_path.empty()) spec = sweep_spec_from_json(read_json_file(spec_path));
  if (!kind.empty()) {
    const auto k = parse_sweep_kind(kind);
    if (!k) throw ConfigError("unknown sweep kind '" + kind + "'");
    if (spec_path.empty() || *k != spec.kind) spec.values = default_sweep_values(*k);
    spec.kind = *k;
  }
  if (o.config != "default" || spec_path.empty()) spec.base_config = load_config(o.config);
  if (o.seed) spec.base_config.seed = *o.seed;
  if (o.max_iters) spec.base_config.max_iterations = *o.max_iters;
  if (o.eps) spec.base_config.convergence_eps = *o.eps;
  if (o.finalize) spec.finalize_unit_modulus = true;
  if (!methods.empty()) {
    spec.methods.clear();
    for (const auto& m : methods) spec.methods.push_back(method_or_throw(m));
  }
  if (seeds) spec.num_seeds = *seeds;
  spec.workers = workers;

  auto progress = [&](std::size_t done, std::size_t total) {
    if (!quiet) std::fprintf(stderr, "\rcells %zu/%zu", done, total);
    if (!quiet && done == total) std::fprintf(stderr, "\n");
  };
  const SweepResult res = sweep(spec, progress);
  if (out_path.empty() || out_path == "-")
    write_csv(res, std::cout);
  else
    emit_csv(res, out_path);
  for (const auto& r : res.rows)
    if (!r.ok())
      std::fprintf(stderr, "failed cell: value %g method %s seed %llu: %s\n", r.value, r.method.c_str(),
                   static_cast<unsigned long long>(r.seed), r.error.c_str());
  return res.failures() == 0 ? 0 : 1;
}

int cmd_verify(std::uint64_t seed) {
  int failed = 0;
  for (const auto& c : run_invariant_suite(seed)) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
    failed += c.passed ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all invariants hold\n" : std::to_string(failed) + " invariant(s) violated\n");
  return failed == 0 ? 0 : 1;
}

int cmd_overhead(const Overrides& o, int iterations) {
  const ScenarioConfig c = load_config(o.config);
  const std::int64_t b = c.num_aps, nt = c.antennas_per_ap, k = c.num_users, m = c.ris_elements;
  std::cout << "B=" << b << " N_t=" << nt << " K=" << k << " M=" << m << " I=" << iterations << "\n";
  std::cout << std::left << std::setw(24) << "method" << std::right << std::setw(14) << "symbols"
            << "\n";
  std::cout << std::left << std::setw(24) << "partially_distributed" << std::right << std::setw(14)
            << signaling_formula(b, nt, k, m, iterations) << "\n";
  std::cout << std::left << std::setw(24) << "admm_fully_distributed" << std::right << std::setw(14)
            << admm_formula(b, nt, k, m, iterations) << "\n";
  std::cout << "complexity_estimate " << std::setprecision(6)
            << complexity_estimate(static_cast<double>(b), static_cast<double>(nt), static_cast<double>(k),
                                   static_cast<double>(m), iterations)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for RIS-aided cell-free downlink beamforming"};
  app.require_subcommand(1);

  Overrides solve_o, sweep_o, overhead_o;
  std::string method = "pd_with_ris", solve_out;
  auto* solve = app.add_subcommand("solve", "solve one scenario and print the report");
  add_common(solve, solve_o);
  solve->add_option("--method", method, "pd_with_ris, centralized_with_ris, pd_random_ris, pd_no_ris, zf_no_ris, mrt_no_ris");
  solve->add_option("--out", solve_out, "also write the report as JSON");

  std::string spec_path, kind, sweep_out;
  std::vector<std::string> methods;
  std::optional<int> seeds;
  int workers = 1;
  bool quiet = false;
  auto* sw = app.add_subcommand("sweep", "Monte-Carlo sweep written as CSV");
  add_common(sw, sweep_o);
  sw->add_option("--spec", spec_path, "sweep spec JSON file");
  sw->add_option("--kind", kind, "power, user_location or ris_elements");
  sw->add_option("--method", methods, "restrict to these methods (repeatable)");
  sw->add_option("--seeds", seeds, "Monte-Carlo count")->check(CLI::PositiveNumber);
  sw->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  sw->add_option("--out", sweep_out, "CSV path ('-' for standard output)");
  sw->add_flag("--quiet", quiet, "no progress output");

  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--seed", verify_seed, "seed for the random instances");

  int overhead_iters = 10;
  auto* overhead = app.add_subcommand("overhead", "fronthaul signaling comparison");
  overhead->add_option("--config", overhead_o.config, "scenario JSON file, or 'default'");
  overhead->add_option("--iters", overhead_iters, "iteration count I")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*solve) return cmd_solve(solve_o, method, solve_out);
    if (*sw) return cmd_sweep(sweep_o, spec_path, kind, methods, seeds, workers, sweep_out, quiet);
    if (*verify) return cmd_verify(verify_seed);
    if (*overhead) return cmd_overhead(overhead_o, overhead_iters);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
