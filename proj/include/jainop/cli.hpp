#pragma once

// Command-line front end without the argument parser: a RunConfig filled
// from key=value settings (config file, JAINOP_* environment, flags, in that
// order), command runners and the exit-code contract.
//
// Exit codes: 0 ok, 2 invalid config, 3 domain or threshold error,
// 4 a trend or bound assertion failed.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "jainop/analysis.hpp"
#include "jainop/core.hpp"
#include "jainop/functions.hpp"
#include "jainop/operators.hpp"
#include "jainop/report.hpp"

namespace jainop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitAssertion = 4;

class ConfigError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "config"; }
};

enum class Command { Eval, Moments, Converge, Voronovskaja, Bound, Weighted };
enum class OutputFormat { Csv, Json };
enum class Theorem { Direct, Rate };

inline constexpr std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::Eval: return "eval";
    case Command::Moments: return "moments";
    case Command::Converge: return "converge";
    case Command::Voronovskaja: return "voronovskaja";
    case Command::Bound: return "bound";
    case Command::Weighted: return "weighted";
  }
  return "?";
}

inline const std::vector<std::string_view>& command_names() {
  static const std::vector<std::string_view> names{"eval", "moments", "converge", "voronovskaja", "bound", "weighted"};
  return names;
}

struct RunConfig {
  Command command = Command::Eval;
  OperatorKind op = OperatorKind::JainBaskakov;
  OperatorParams params;
  std::string function = "e1";
  std::vector<double> points{0.0, 0.5, 1.0, 2.0};  ///< eval points and direct-bound x values
  double x = 1.0;                                  ///< point for moments, converge and voronovskaja
  double a = 1.0;                                  ///< interval for the rate bound
  double l = 0.0;                                  ///< n beta_n for voronovskaja and weighted
  double lambda = 0.0;
  double constant_m = 2.0;
  std::vector<double> n_values;                    ///< empty: the command's default schedule
  Theorem theorem = Theorem::Rate;
  OutputFormat format = OutputFormat::Csv;
  std::string output;                              ///< base name; empty writes the table to stdout
  EvalConfig eval;
  double gap_tol = 1e-10;                          ///< errors and gaps below this count as resolved
  std::uint64_t seed = 0;
  double jitter = 0.0;                             ///< relative jitter of eval points, 0 disables
};

// ---------------------------------------------------------------------------
// Settings
// ---------------------------------------------------------------------------

namespace detail {

inline std::string normalize_key(std::string_view k) {
  std::string s(k);
  for (char& ch : s) {
    if (ch == '_') ch = '-';
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return s;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T v{};
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size())
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  return v;
}

inline std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number<double>(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

inline const std::vector<std::string>& tolerance_keys() {
  static const std::vector<std::string> keys{"tail-eps",    "quad-rel-tol", "quad-max-nodes", "grid-points",
                                             "domain-cap",  "beta-guard",   "v-max",          "gap-tol"};
  return keys;
}

}  // namespace detail

/// Applies one key=value setting. Keys accept '-' or '_'. Throws ConfigError.
inline void apply_setting(RunConfig& cfg, std::string_view raw_key, std::string_view value) {
  using detail::parse_number;
  const std::string key = detail::normalize_key(detail::trim(raw_key));
  value = detail::trim(value);
  try {
    if (key == "command") {
      const auto& names = command_names();
      const auto it = std::find(names.begin(), names.end(), value);
      if (it == names.end()) throw ConfigError("unknown command '" + std::string(value) + "'");
      cfg.command = static_cast<Command>(it - names.begin());
    } else if (key == "operator") {
      cfg.op = parse_operator_kind(value);
    } else if (key == "function") {
      lookup(value);
      cfg.function = std::string(value);
    } else if (key == "n") {
      cfg.params.n = parse_number<double>(key, value);
    } else if (key == "c") {
      cfg.params.c = parse_number<double>(key, value);
    } else if (key == "beta") {
      cfg.params.beta = parse_number<double>(key, value);
    } else if (key == "points") {
      cfg.points = detail::parse_list(key, value);
    } else if (key == "x") {
      cfg.x = parse_number<double>(key, value);
    } else if (key == "a") {
      cfg.a = parse_number<double>(key, value);
    } else if (key == "l") {
      cfg.l = parse_number<double>(key, value);
    } else if (key == "lambda") {
      cfg.lambda = parse_number<double>(key, value);
    } else if (key == "m") {
      cfg.constant_m = parse_number<double>(key, value);
    } else if (key == "n-values") {
      cfg.n_values = detail::parse_list(key, value);
    } else if (key == "theorem") {
      if (value == "direct")
        cfg.theorem = Theorem::Direct;
      else if (value == "rate")
        cfg.theorem = Theorem::Rate;
      else
        throw ConfigError("theorem must be direct or rate");
    } else if (key == "format") {
      if (value == "csv")
        cfg.format = OutputFormat::Csv;
      else if (value == "json")
        cfg.format = OutputFormat::Json;
      else
        throw ConfigError("format must be csv or json");
    } else if (key == "output") {
      cfg.output = std::string(value);
    } else if (key == "tail-eps") {
      cfg.eval.tail_eps = parse_number<double>(key, value);
    } else if (key == "quad-rel-tol") {
      cfg.eval.quad_rel_tol = parse_number<double>(key, value);
    } else if (key == "quad-max-nodes") {
      cfg.eval.quad_max_nodes = parse_number<int>(key, value);
    } else if (key == "grid-points") {
      cfg.eval.grid_points = parse_number<int>(key, value);
    } else if (key == "domain-cap") {
      cfg.eval.domain_cap = parse_number<double>(key, value);
    } else if (key == "beta-guard") {
      cfg.eval.beta_guard = parse_number<double>(key, value);
    } else if (key == "v-max") {
      cfg.eval.v_max = parse_number<std::int64_t>(key, value);
    } else if (key == "gap-tol") {
      cfg.gap_tol = parse_number<double>(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "jitter") {
      cfg.jitter = parse_number<double>(key, value);
    } else {
      throw ConfigError("unknown setting '" + key + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

/// key = value lines; '#' starts a comment.
inline void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    s = detail::trim(s.substr(0, s.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

/// JAINOP_TAIL_EPS, JAINOP_QUAD_REL_TOL, ... for the tolerance settings.
inline void apply_env(RunConfig& cfg, const std::function<const char*(const char*)>& getenv_fn) {
  for (const auto& key : detail::tolerance_keys()) {
    std::string name = "JAINOP_";
    for (char ch : key) name += ch == '-' ? '_' : static_cast<char>(ch - 'a' + 'A');
    if (const char* v = getenv_fn(name.c_str())) apply_setting(cfg, key, v);
  }
}

inline std::vector<double> default_n_values(Command c) {
  switch (c) {
    case Command::Converge: return {16, 32, 64, 128, 256, 512, 1024};
    case Command::Voronovskaja: return {64, 128, 256, 512, 1024, 2048, 4096};
    case Command::Bound: return {25, 50, 100};
    case Command::Weighted: return {16, 32, 64, 128, 256, 512};
    default: return {};
  }
}

/// Structural checks (exit 2). Mathematical domain checks happen when the
/// command runs and map to exit 3.
inline void validate(const RunConfig& cfg) {
  try {
    lookup(cfg.function);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (cfg.points.empty()) throw ConfigError("points must not be empty");
  const bool sweep = cfg.command != Command::Eval && cfg.command != Command::Moments;
  if (sweep && !cfg.n_values.empty() && cfg.n_values.size() < 2)
    throw ConfigError("sweeps need at least two n values");
  if (!(cfg.jitter >= 0.0 && cfg.jitter < 0.5)) throw ConfigError("jitter must lie in [0, 0.5)");
  if (!(cfg.gap_tol >= 0.0)) throw ConfigError("gap-tol must be nonnegative");
  try {
    cfg.eval.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Rows plus the assertions they violated.
template <class Row>
struct Outcome {
  std::vector<Row> rows;
  std::vector<std::string> failures;
};

namespace detail {

// Uniform in [0, 1) from the top 53 bits, independent of the library's
// distribution implementations.
inline double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1p-53; }

inline std::vector<double> jittered_points(const RunConfig& cfg) {
  std::vector<double> pts = cfg.points;
  if (cfg.jitter == 0.0 || pts.size() < 2) return pts;
  std::sort(pts.begin(), pts.end());
  std::mt19937_64 rng(cfg.seed);
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double left = i == 0 ? pts[1] - pts[0] : pts[i] - pts[i - 1];
    const double right = i + 1 == pts.size() ? left : pts[i + 1] - pts[i];
    const double u = 2.0 * unit_uniform(rng()) - 1.0;
    out[i] = std::max(0.0, pts[i] + cfg.jitter * u * std::min(left, right));
  }
  return out;
}

inline std::string trend_message(std::string_view what, double n_prev, double prev, double n, double cur) {
  return std::string(what) + " rose from " + format_number(prev) + " at n = " + format_number(n_prev) + " to " +
         format_number(cur) + " at n = " + format_number(n);
}

// Non-increasing up to a relative 1e-9, ignoring values at or below tol.
template <class Row, class Get>
void check_decreasing(const std::vector<Row>& rows, Get get, double tol, std::string_view what,
                      std::vector<std::string>& failures) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double prev = get(rows[i - 1]), cur = get(rows[i]);
    if (cur > tol && cur > prev * (1.0 + 1e-9)) failures.push_back(trend_message(what, rows[i - 1].n, prev, rows[i].n, cur));
  }
}

}  // namespace detail

inline Outcome<EvalRow> cmd_eval(const RunConfig& cfg) {
  const auto f = lookup(cfg.function);
  const auto xs = detail::jittered_points(cfg);
  const auto res = eval_grid(cfg.op, cfg.params, f, xs, cfg.eval);
  Outcome<EvalRow> out;
  for (const auto& r : res) {
    const double fx = f(r.x);
    out.rows.push_back({r.x, r.value, fx, std::abs(r.value - fx), r.v_terms_used, r.est_tail_bound, r.quad_error_est});
  }
  return out;
}

inline Outcome<MomentReport> cmd_moments(const RunConfig& cfg) {
  Outcome<MomentReport> out;
  out.rows = moment_report(cfg.op, cfg.params, cfg.x, cfg.eval);
  for (const auto& r : out.rows)
    if (r.formula_class == "exact" && !(r.rel_error <= 1e-6))
      out.failures.push_back(r.kind + " moment of order " + std::to_string(r.order) + " has rel. error " +
                             format_number(r.rel_error));
  return out;
}

inline Outcome<SweepResult> cmd_converge(const RunConfig& cfg) {
  const auto ns = cfg.n_values.empty() ? default_n_values(cfg.command) : cfg.n_values;
  Outcome<SweepResult> out;
  out.rows = convergence_sweep(cfg.op, cfg.params.c, cfg.params.beta, lookup(cfg.function), cfg.x, ns, cfg.eval);
  detail::check_decreasing(out.rows, [](const SweepResult& r) { return r.error; }, cfg.gap_tol, "error",
                           out.failures);
  return out;
}

inline Outcome<VoronovskajaRecord> cmd_voronovskaja(const RunConfig& cfg) {
  const auto ns = cfg.n_values.empty() ? default_n_values(cfg.command) : cfg.n_values;
  Outcome<VoronovskajaRecord> out;
  out.rows = voronovskaja_sweep(cfg.op, cfg.params.c, cfg.l, lookup(cfg.function), cfg.x, ns, cfg.eval);
  std::vector<VoronovskajaRecord> resolved;
  for (const auto& r : out.rows)
    if (!r.noise_dominated) resolved.push_back(r);
  detail::check_decreasing(resolved, [](const VoronovskajaRecord& r) { return r.gap; }, cfg.gap_tol, "gap",
                           out.failures);
  return out;
}

inline Outcome<BoundRow> cmd_bound(const RunConfig& cfg) {
  const auto ns = cfg.n_values.empty() ? default_n_values(cfg.command) : cfg.n_values;
  const auto f = lookup(cfg.function);
  Outcome<BoundRow> out;
  std::vector<std::vector<BoundRow>> per_n;
  for (double n : ns) {
    const OperatorParams p{n, cfg.params.c, cfg.params.beta};
    std::vector<BoundRow> rows;
    if (cfg.theorem == Theorem::Rate) {
      for (const auto& b : rate_bound_profile(p, f, cfg.a, cfg.eval)) rows.push_back(to_row(b));
    } else {
      for (double x : detail::jittered_points(cfg))
        rows.push_back(to_row(check_direct_bound(p, f, x, cfg.eval, cfg.constant_m)));
    }
    per_n.push_back(std::move(rows));
  }
  // Same x grid for every n, so orders pair rows by position.
  for (std::size_t j = 0; j < per_n.front().size(); ++j) {
    std::vector<double> nn, lhs;
    for (const auto& rows : per_n) {
      nn.push_back(rows[j].n);
      lhs.push_back(rows[j].lhs);
    }
    const auto ord = empirical_orders(nn, lhs);
    for (std::size_t i = 0; i < per_n.size(); ++i) per_n[i][j].order = ord[i];
  }
  for (auto& rows : per_n)
    for (auto& r : rows) {
      if (r.slack < -1e-9)
        out.failures.push_back(r.theorem_id + " bound violated at n = " + format_number(r.n) + ", x = " +
                               format_number(r.x) + " (slack " + format_number(r.slack) + ")");
      out.rows.push_back(std::move(r));
    }
  return out;
}

inline Outcome<WeightedRow> cmd_weighted(const RunConfig& cfg) {
  const auto ns = cfg.n_values.empty() ? default_n_values(cfg.command) : cfg.n_values;
  const auto f = lookup(cfg.function);
  std::vector<OperatorParams> seq;
  for (double n : ns) seq.push_back({n, cfg.params.c, cfg.l / n});
  const auto est = weighted_norm_error(seq, f, cfg.lambda, cfg.eval);
  Outcome<WeightedRow> out;
  std::vector<double> vals;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const auto& w = est[i];
    WeightedRow r{w.n, w.beta, w.lambda, w.value, w.argmax, w.domain_cap, w.tail_bound, kNaN, kNaN};
    if (cfg.lambda == 0.0 && cfg.function == "e1") r.majorant = weighted_majorant_e1(seq[i]);
    if (cfg.lambda == 0.0 && cfg.function == "e2") r.majorant = weighted_majorant_e2(seq[i]);
    if (r.value > r.majorant * (1.0 + 1e-9))
      out.failures.push_back("weighted error " + format_number(r.value) + " exceeds the majorant " +
                             format_number(r.majorant) + " at n = " + format_number(r.n));
    vals.push_back(r.value);
    out.rows.push_back(r);
  }
  const auto ord = empirical_orders(ns, vals);
  for (std::size_t i = 0; i < out.rows.size(); ++i) out.rows[i].order = ord[i];
  detail::check_decreasing(out.rows, [](const WeightedRow& r) { return r.value; }, cfg.gap_tol, "weighted error",
                           out.failures);
  return out;
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

/// {"error": {"kind", "message", "exit_code"}} on one line.
inline std::string error_json(std::string_view kind, std::string_view message, int code) {
  nlohmann::json j;
  j["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
  return j.dump();
}

namespace detail {

template <class Row, class X, class Y>
void emit(const RunConfig& cfg, const std::vector<Row>& rows, const Field<Row, X>& xf, const Field<Row, Y>& yf,
          std::ostream& out) {
  const auto name = to_string(cfg.command);
  auto table = [&](std::ostream& os) {
    if (cfg.format == OutputFormat::Json)
      write_json(os, name, rows);
    else
      write_csv(os, rows);
  };
  if (cfg.output.empty()) {
    table(out);
    return;
  }
  const std::string main = cfg.output + (cfg.format == OutputFormat::Json ? ".json" : ".csv");
  std::ofstream os(main, std::ios::binary);
  std::ofstream plot(cfg.output + ".plot.dat", std::ios::binary);
  if (!os || !plot) throw ConfigError("cannot write output " + cfg.output);
  table(os);
  write_plot(plot, rows, xf, yf);
}

template <class Row>
Field<Row, double> column(std::string_view name) {
  Field<Row, double> found{"", nullptr};
  for_each_field<Row>([&](const auto& f) {
    if constexpr (std::is_same_v<std::decay_t<decltype(f)>, Field<Row, double>>)
      if (f.name == name) found = f;
  });
  return found;
}

}  // namespace detail

/// Runs cfg.command, writes its table and returns the exit code. Errors go
/// to err as a JSON object.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    std::vector<std::string> failures;
    auto go = [&](auto outcome, std::string_view xname, std::string_view yname) {
      using Row = typename decltype(outcome.rows)::value_type;
      detail::emit(cfg, outcome.rows, detail::column<Row>(xname), detail::column<Row>(yname), out);
      failures = std::move(outcome.failures);
    };
    switch (cfg.command) {
      case Command::Eval: go(cmd_eval(cfg), "x", "value"); break;
      case Command::Moments: go(cmd_moments(cfg), "closed_form", "numeric"); break;
      case Command::Converge: go(cmd_converge(cfg), "n", "error"); break;
      case Command::Voronovskaja: go(cmd_voronovskaja(cfg), "n", "gap"); break;
      case Command::Bound: go(cmd_bound(cfg), "x", "slack"); break;
      case Command::Weighted: go(cmd_weighted(cfg), "n", "value"); break;
    }
    if (!failures.empty()) {
      std::string msg;
      for (const auto& f : failures) msg += (msg.empty() ? "" : "; ") + f;
      err << error_json("assertion", msg, kExitAssertion) << '\n';
      return kExitAssertion;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << error_json(e.kind(), e.what(), kExitConfig) << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << error_json(e.kind(), e.what(), kExitDomain) << '\n';
    return kExitDomain;
  }
}

}  // namespace jainop::cli
