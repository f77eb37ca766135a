#pragma once

// Tabular output for the command-line front end: CSV with 17 significant
// digits, JSON that parses back into the same records, and two-column plot
// data. Each record type lists its columns once in a Schema specialisation.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "jainop/analysis.hpp"
#include "jainop/core.hpp"
#include "jainop/functions.hpp"
#include "jainop/moments.hpp"
#include "jainop/operators.hpp"

namespace jainop {

// ---------------------------------------------------------------------------
// Row types that exist only for output
// ---------------------------------------------------------------------------

struct EvalRow {
  double x = 0.0;
  double value = 0.0;
  double target = 0.0;  ///< f(x)
  double error = 0.0;   ///< |value - target|
  std::int64_t v_terms_used = 0;
  double est_tail_bound = 0.0;
  double quad_error_est = 0.0;
};

/// One closed-form moment set against the operator applied numerically.
/// rel_error = |closed_form - numeric| / max(1, |closed_form|).
struct MomentReport {
  std::string kind;           ///< raw, central, display or display-central
  int order = 0;
  double x = 0.0;
  double closed_form = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
  std::string formula_class;  ///< "exact" or "asymptotic"
};

struct BoundRow {
  std::string theorem_id;
  double n = 0.0;
  double c = 0.0;
  double beta = 0.0;
  double x = 0.0;
  double a = kNaN;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double numerical_error = 0.0;
  double m_required = kNaN;
  double order = kNaN;  ///< empirical order of lhs against the previous n at the same x
};

struct WeightedRow {
  double n = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double value = 0.0;
  double argmax = 0.0;
  double domain_cap = 0.0;
  double tail_bound = 0.0;
  double majorant = kNaN;  ///< closed-form upper bound when one is known (f = t, t^2 and lambda = 0)
  double order = kNaN;
};

inline BoundRow to_row(const BoundCheck& b) {
  return {b.theorem_id, b.n, b.c, b.beta, b.x, b.a, b.lhs, b.rhs, b.slack, b.numerical_error, b.m_required, kNaN};
}

// ---------------------------------------------------------------------------
// Schemas
// ---------------------------------------------------------------------------

template <class T, class M>
struct Field {
  std::string_view name;
  M T::*member;
};

template <class T, class M>
constexpr Field<T, M> field(std::string_view name, M T::*member) {
  return {name, member};
}

template <class T>
struct Schema;

template <class T>
concept Tabular = requires { Schema<T>::fields; };

template <>
struct Schema<EvalRow> {
  static constexpr auto fields = std::make_tuple(
      field("x", &EvalRow::x), field("value", &EvalRow::value), field("target", &EvalRow::target),
      field("error", &EvalRow::error), field("v_terms_used", &EvalRow::v_terms_used),
      field("est_tail_bound", &EvalRow::est_tail_bound), field("quad_error_est", &EvalRow::quad_error_est));
};

template <>
struct Schema<MomentReport> {
  static constexpr auto fields = std::make_tuple(
      field("kind", &MomentReport::kind), field("order", &MomentReport::order), field("x", &MomentReport::x),
      field("closed_form", &MomentReport::closed_form), field("numeric", &MomentReport::numeric),
      field("rel_error", &MomentReport::rel_error), field("formula_class", &MomentReport::formula_class));
};

template <>
struct Schema<SweepResult> {
  static constexpr auto fields = std::make_tuple(
      field("n", &SweepResult::n), field("beta", &SweepResult::beta), field("x", &SweepResult::x),
      field("value", &SweepResult::value), field("target", &SweepResult::target),
      field("error", &SweepResult::error), field("predicted", &SweepResult::predicted),
      field("order", &SweepResult::order));
};

template <>
struct Schema<VoronovskajaRecord> {
  static constexpr auto fields = std::make_tuple(
      field("n", &VoronovskajaRecord::n), field("beta_n", &VoronovskajaRecord::beta_n),
      field("value", &VoronovskajaRecord::value), field("scaled_error", &VoronovskajaRecord::scaled_error),
      field("predicted_limit", &VoronovskajaRecord::predicted_limit), field("gap", &VoronovskajaRecord::gap),
      field("noise", &VoronovskajaRecord::noise), field("noise_dominated", &VoronovskajaRecord::noise_dominated),
      field("order", &VoronovskajaRecord::order));
};

template <>
struct Schema<BoundRow> {
  static constexpr auto fields = std::make_tuple(
      field("theorem_id", &BoundRow::theorem_id), field("n", &BoundRow::n), field("c", &BoundRow::c),
      field("beta", &BoundRow::beta), field("x", &BoundRow::x), field("a", &BoundRow::a),
      field("lhs", &BoundRow::lhs), field("rhs", &BoundRow::rhs), field("slack", &BoundRow::slack),
      field("numerical_error", &BoundRow::numerical_error), field("m_required", &BoundRow::m_required),
      field("order", &BoundRow::order));
};

template <>
struct Schema<WeightedRow> {
  static constexpr auto fields = std::make_tuple(
      field("n", &WeightedRow::n), field("beta", &WeightedRow::beta), field("lambda", &WeightedRow::lambda),
      field("value", &WeightedRow::value), field("argmax", &WeightedRow::argmax),
      field("domain_cap", &WeightedRow::domain_cap), field("tail_bound", &WeightedRow::tail_bound),
      field("majorant", &WeightedRow::majorant), field("order", &WeightedRow::order));
};

template <Tabular T, class Fn>
void for_each_field(Fn&& fn) {
  std::apply([&](const auto&... f) { (fn(f), ...); }, Schema<T>::fields);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::string csv_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
inline std::string csv_cell(std::int64_t v) { return std::to_string(v); }
inline std::string csv_cell(int v) { return std::to_string(v); }
inline std::string csv_cell(bool v) { return v ? "true" : "false"; }
inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

}  // namespace detail

template <Tabular T>
void write_csv(std::ostream& os, const std::vector<T>& rows) {
  bool first = true;
  for_each_field<T>([&](const auto& f) {
    os << (first ? "" : ",") << f.name;
    first = false;
  });
  os << '\n';
  for (const auto& r : rows) {
    first = true;
    for_each_field<T>([&](const auto& f) {
      os << (first ? "" : ",") << detail::csv_cell(r.*(f.member));
      first = false;
    });
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

template <Tabular T>
void to_json(nlohmann::json& j, const T& r) {
  j = nlohmann::json::object();
  for_each_field<T>([&](const auto& f) {
    const auto& v = r.*(f.member);
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
      if (std::isfinite(v))
        j[std::string(f.name)] = v;
      else if (std::isnan(v))
        j[std::string(f.name)] = nullptr;
      else
        j[std::string(f.name)] = v > 0 ? "inf" : "-inf";
    } else {
      j[std::string(f.name)] = v;
    }
  });
}

template <Tabular T>
void from_json(const nlohmann::json& j, T& r) {
  for_each_field<T>([&](const auto& f) {
    auto& v = r.*(f.member);
    const auto& e = j.at(std::string(f.name));
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
      if (e.is_null())
        v = kNaN;
      else if (e.is_string())
        v = e.template get<std::string>() == "inf" ? kInf : -kInf;
      else
        v = e.template get<double>();
    } else {
      e.get_to(v);
    }
  });
}

/// {"command": ..., "rows": [...]}; NaN becomes null, infinities "inf"/"-inf".
template <Tabular T>
void write_json(std::ostream& os, std::string_view command, const std::vector<T>& rows) {
  nlohmann::json j;
  j["command"] = command;
  j["rows"] = rows;
  os << j.dump(2) << '\n';
}

template <Tabular T>
std::vector<T> read_json_rows(std::string_view text) {
  return nlohmann::json::parse(text).at("rows").template get<std::vector<T>>();
}

// ---------------------------------------------------------------------------
// Plot data
// ---------------------------------------------------------------------------

/// "# xname yname" followed by one "x y" line per row.
template <Tabular T, class X, class Y>
void write_plot(std::ostream& os, const std::vector<T>& rows, const Field<T, X>& xf, const Field<T, Y>& yf) {
  os << "# " << xf.name << ' ' << yf.name << '\n';
  for (const auto& r : rows)
    os << detail::csv_cell(static_cast<double>(r.*(xf.member))) << ' '
       << detail::csv_cell(static_cast<double>(r.*(yf.member))) << '\n';
}

// ---------------------------------------------------------------------------
// Moment report
// ---------------------------------------------------------------------------

namespace detail {

inline MomentReport moment_row(std::string kind, int order, double x, double closed, double numeric,
                               FormulaClass cls) {
  return {std::move(kind), order, x, closed, numeric,
          std::abs(closed - numeric) / std::max(1.0, std::abs(closed)), std::string(to_string(cls))};
}

}  // namespace detail

/// Raw moments 0..4, central moments 1, 2, 4 and the printed display forms,
/// each against the operator evaluated on the matching monomial. Orders whose
/// threshold n > k c fails are left out.
inline std::vector<MomentReport> moment_report(OperatorKind kind, const OperatorParams& p, double x,
                                               const EvalConfig& cfg) {
  p.validate(cfg.beta_guard);
  if (kind != OperatorKind::Jain) p.require(1, "Jain-Baskakov operator");
  std::vector<MomentReport> out;
  auto numeric = [&](const TestFunction& f) { return OperatorEvaluator(kind, p, f, cfg)(x).value; };
  auto ok = [&](int m) { return kind == OperatorKind::Jain || p.exceeds(moment_threshold(kind, m)); };

  std::vector<double> raw(5, kNaN);
  for (int m = 0; m <= 4; ++m) {
    if (!ok(m)) continue;
    raw[m] = numeric(monomial(m));
    out.push_back(detail::moment_row("raw", m, x, raw_moment(kind, p, m, x), raw[m], FormulaClass::Exact));
  }
  for (int k : {1, 2, 4}) {
    if (!ok(k)) continue;
    out.push_back(detail::moment_row("central", k, x, central_moment(kind, p, k, x), numeric(shifted_power(x, k)),
                                     FormulaClass::Exact));
  }
  for (int m : {2, 3, 4}) {
    if (!ok(m)) continue;
    double display = kNaN;
    switch (kind) {
      case OperatorKind::Jain:
        if (m == 2) continue;
        display = jain_moment_display(p, m, x);
        break;
      case OperatorKind::JainBaskakov:
        if (m == 2) continue;
        display = d_moment_display(p, m, x);
        break;
      case OperatorKind::KingJainBaskakov: display = king_moment_display(p, m, x); break;
    }
    const auto cls = kind == OperatorKind::KingJainBaskakov && m == 2 ? FormulaClass::Exact : FormulaClass::Asymptotic;
    out.push_back(detail::moment_row("display", m, x, display, raw[m], cls));
  }
  if (kind == OperatorKind::JainBaskakov && ok(4))
    out.push_back(detail::moment_row("display-central", 4, x, d_mu4_display(p, x), numeric(shifted_power(x, 4)),
                                     FormulaClass::Asymptotic));
  return out;
}

}  // namespace jainop
