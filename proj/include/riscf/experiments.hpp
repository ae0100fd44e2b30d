#pragma once

#include <riscf/baselines.hpp>
#include <riscf/channel.hpp>
#include <riscf/config_io.hpp>
#include <riscf/error.hpp>
#include <riscf/parallel.hpp>
#include <riscf/scenario.hpp>

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace riscf {

enum class SweepKind { kPower, kUserLocation, kRisElements };

inline std::string to_string(SweepKind k) {
  switch (k) {
    case SweepKind::kPower: return "power";
    case SweepKind::kUserLocation: return "user_location";
    case SweepKind::kRisElements: return "ris_elements";
  }
  return "unknown";
}

inline std::optional<SweepKind> parse_sweep_kind(const std::string& s) {
  for (SweepKind k : {SweepKind::kPower, SweepKind::kUserLocation, SweepKind::kRisElements})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::vector<double> default_sweep_values(SweepKind k) {
  switch (k) {
    case SweepKind::kPower: return {0, 5, 10, 15, 20, 25, 30};
    case SweepKind::kUserLocation: return {0, 20, 40, 60, 80, 100, 120};
    case SweepKind::kRisElements: return {20, 40, 60, 80, 100};
  }
  return {};
}

struct SweepSpec {
  SweepKind kind = SweepKind::kPower;
  std::vector<double> values = default_sweep_values(SweepKind::kPower);
  std::vector<MethodId> methods{kAllMethods.begin(), kAllMethods.end()};
  int num_seeds = 50;
  ScenarioConfig base_config;
  bool finalize_unit_modulus = false;
  int workers = 1;
};

inline void validate(const SweepSpec& s) {
  if (s.values.empty()) throw ConfigError("sweep: empty value list");
  if (s.methods.empty()) throw ConfigError("sweep: empty method list");
  if (s.num_seeds <= 0) throw ConfigError("sweep: num_seeds must be positive");
  for (double v : s.values) {
    if (!std::isfinite(v)) throw ConfigError("sweep: non-finite value");
    if (s.kind == SweepKind::kRisElements && (v < 1 || v != std::floor(v)))
      throw ConfigError("sweep: ris_elements values must be positive integers");
  }
  validate(s.base_config);
}

/// Scenario of one sweep point.
inline ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepKind kind, double v) {
  ScenarioConfig c = base;
  switch (kind) {
    case SweepKind::kPower: c.p_max_dbm = v; break;
    case SweepKind::kUserLocation: c.user_circle_center = {v, 0.0}; break;
    case SweepKind::kRisElements: c.ris_elements = static_cast<int>(v); break;
  }
  return c;
}

/// Channel seed of Monte-Carlo index s. The same seeds are reused at every
/// sweep value, so neighbouring points differ only through the swept
/// parameter.
inline std::uint64_t cell_seed(const ScenarioConfig& base, int s) {
  return base.seed + static_cast<std::uint64_t>(s);
}

struct SweepRow {
  double value = 0.0;
  std::string method;
  std::uint64_t seed = 0;
  double sum_rate = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  std::int64_t paper_symbols = 0;
  std::int64_t actual_symbols = 0;
  std::string error;  // nonempty for a failed cell; not written to CSV

  bool ok() const { return error.empty() && std::isfinite(sum_rate); }
};

struct AggregateRow {
  double value = 0.0;
  std::string method;
  std::string stat;  // "mean" or "stderr"
  double sum_rate = 0.0;
  double iterations = 0.0;
  double paper_symbols = 0.0;
  double actual_symbols = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (value, method, seed)
  std::vector<AggregateRow> aggregates;
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.ok() ? 0 : 1;
    return n;
  }
};

/// Mean and standard error of the successful rows per (value, method), in row
/// order of first appearance.
inline std::vector<AggregateRow> aggregate(const std::vector<SweepRow>& rows) {
  struct Acc {
    double value;
    std::string method;
    std::vector<std::array<double, 4>> xs;
  };
  std::vector<Acc> groups;
  std::map<std::pair<double, std::string>, std::size_t> index;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.value, r.method);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      groups.push_back({r.value, r.method, {}});
    }
    if (r.ok())
      groups[it->second].xs.push_back({r.sum_rate, static_cast<double>(r.iterations),
                                       static_cast<double>(r.paper_symbols),
                                       static_cast<double>(r.actual_symbols)});
  }
  std::vector<AggregateRow> out;
  for (const auto& g : groups) {
    const double n = static_cast<double>(g.xs.size());
    std::array<double, 4> mean{}, se{};
    for (const auto& x : g.xs)
      for (int c = 0; c < 4; ++c) mean[c] += x[c];
    for (int c = 0; c < 4; ++c) mean[c] = n > 0 ? mean[c] / n : std::numeric_limits<double>::quiet_NaN();
    if (n > 1) {
      for (const auto& x : g.xs)
        for (int c = 0; c < 4; ++c) se[c] += (x[c] - mean[c]) * (x[c] - mean[c]);
      for (int c = 0; c < 4; ++c) se[c] = std::sqrt(se[c] / (n - 1.0) / n);
    }
    out.push_back({g.value, g.method, "mean", mean[0], mean[1], mean[2], mean[3]});
    out.push_back({g.value, g.method, "stderr", se[0], se[1], se[2], se[3]});
  }
  return out;
}

/// Runs every (value, seed) cell on a worker pool. All methods of a cell see
/// the same ChannelSet. A method that throws leaves an error row.
inline SweepResult sweep(const SweepSpec& spec,
                         const std::function<void(std::size_t, std::size_t)>& progress = {}) {
  validate(spec);
  const std::size_t nv = spec.values.size(), nm = spec.methods.size();
  const std::size_t ns = static_cast<std::size_t>(spec.num_seeds);
  SweepResult res;
  res.rows.resize(nv * nm * ns);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  parallel_for(nv * ns, spec.workers, [&](std::size_t cell) {
    const std::size_t vi = cell / ns, si = cell % ns;
    const double v = spec.values[vi];
    const ScenarioConfig cfg = apply_sweep_value(spec.base_config, spec.kind, v);
    const std::uint64_t seed = cell_seed(spec.base_config, static_cast<int>(si));
    std::optional<ChannelSet> ch;
    std::string channel_error;
    try {
      ch = generate_channels(cfg, seed);
    } catch (const std::exception& e) {
      channel_error = e.what();
    }
    SolveOptions opts = solve_options(cfg);
    opts.finalize_unit_modulus = spec.finalize_unit_modulus;
    for (std::size_t mi = 0; mi < nm; ++mi) {
      SweepRow& row = res.rows[(vi * nm + mi) * ns + si];
      row.value = v;
      row.method = to_string(spec.methods[mi]);
      row.seed = seed;
      if (!ch) {
        row.error = channel_error;
        continue;
      }
      try {
        auto [state, rep] = run_baseline(spec.methods[mi], cfg, *ch, opts, seed);
        row.sum_rate = rep.final_sum_rate;
        row.iterations = rep.iterations_used;
        row.paper_symbols = rep.ledger.total_paper_symbols();
        row.actual_symbols = rep.ledger.total_symbols();
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
    const std::size_t d = done.fetch_add(1) + 1;
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      progress(d, nv * ns);
    }
  });
  res.aggregates = aggregate(res.rows);
  return res;
}

inline const char* kCsvHeader =
    "sweep_value,method,seed,sum_rate_bps_hz,iterations,signaling_symbols_paper,"
    "signaling_symbols_actual";

namespace detail {
inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

inline void write_csv(const SweepResult& res, std::ostream& out) {
  using detail::fmt_double;
  out << kCsvHeader << '\n';
  for (const auto& r : res.rows)
    out << fmt_double(r.value) << ',' << r.method << ',' << r.seed << ','
        << fmt_double(r.ok() ? r.sum_rate : std::numeric_limits<double>::quiet_NaN()) << ','
        << r.iterations << ',' << r.paper_symbols << ',' << r.actual_symbols << '\n';
  for (const auto& a : res.aggregates)
    out << fmt_double(a.value) << ',' << a.method << ',' << a.stat << ',' << fmt_double(a.sum_rate)
        << ',' << fmt_double(a.iterations) << ',' << fmt_double(a.paper_symbols) << ','
        << fmt_double(a.actual_symbols) << '\n';
}

inline void emit_csv(const SweepResult& res, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_csv(res, out);
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
}

inline SweepResult parse_csv(std::istream& in) {
  SweepResult res;
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("csv: unexpected header");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 7) throw ConfigError("csv line " + std::to_string(lineno) + ": expected 7 fields");
    try {
      if (f[2] == "mean" || f[2] == "stderr") {
        res.aggregates.push_back({std::stod(f[0]), f[1], f[2], std::stod(f[3]), std::stod(f[4]),
                                  std::stod(f[5]), std::stod(f[6])});
      } else {
        SweepRow r;
        r.value = std::stod(f[0]);
        r.method = f[1];
        r.seed = std::stoull(f[2]);
        r.sum_rate = std::stod(f[3]);
        r.iterations = std::stoi(f[4]);
        r.paper_symbols = std::stoll(f[5]);
        r.actual_symbols = std::stoll(f[6]);
        if (!std::isfinite(r.sum_rate)) r.error = "failed";
        res.rows.push_back(std::move(r));
      }
    } catch (const std::logic_error&) {
      throw ConfigError("csv line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return res;
}

inline Json to_json(const SweepSpec& s) {
  std::vector<std::string> methods;
  for (MethodId m : s.methods) methods.push_back(to_string(m));
  return Json{{"kind", to_string(s.kind)},          {"values", s.values},
              {"methods", methods},                 {"num_seeds", s.num_seeds},
              {"finalize_unit_modulus", s.finalize_unit_modulus},
              {"base_config", to_json(s.base_config)}};
}

/// Sweep file: kind is required; values default to the grid of the kind,
/// methods to all six, num_seeds to 50, base_config to the defaults.
inline SweepSpec sweep_spec_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("sweep spec must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "kind" && key != "values" && key != "methods" && key != "num_seeds" &&
        key != "base_config" && key != "finalize_unit_modulus")
      throw ConfigError("unknown sweep key '" + key + "'");
  SweepSpec s;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("sweep spec needs a 'kind'");
  const auto kind = parse_sweep_kind(j["kind"].get<std::string>());
  if (!kind) throw ConfigError("unknown sweep kind '" + j["kind"].get<std::string>() + "'");
  s.kind = *kind;
  s.values = default_sweep_values(s.kind);
  detail::read_field(j, "values", s.values);
  detail::read_field(j, "num_seeds", s.num_seeds);
  detail::read_field(j, "finalize_unit_modulus", s.finalize_unit_modulus);
  if (j.contains("methods")) {
    std::vector<std::string> names;
    detail::read_field(j, "methods", names);
    s.methods.clear();
    for (const auto& n : names) {
      const auto m = parse_method(n);
      if (!m) throw ConfigError("unknown method '" + n + "'");
      s.methods.push_back(*m);
    }
  }
  if (j.contains("base_config")) s.base_config = config_from_json(j["base_config"]);
  validate(s);
  return s;
}

}  // namespace riscf
