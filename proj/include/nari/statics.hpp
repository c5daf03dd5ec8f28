#pragma once

// Comparative statics: the personalization comparison and its governing
// conditions, marginal-cost sweeps, SOSD / mass-polarization orderings,
// competitive-vs-monopoly comparisons, and condition region scans.

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nari/equilibrium.hpp"

namespace nari {

struct ConditionEvaluation {
  bool evaluable = false;
  std::string diagnostic;
  bool assumption2 = false;
  bool star = false;
  double star_lhs = 0.0, star_rhs = 0.0;
  bool doublestar = false;
  int doublestar_branch = -1;  // 0 automatic, 1 base-voter branch, 2 opposition branch
  double ds_lhs = 0.0, ds_rhs = 0.0;
  double xi_b0 = 0.0, xi_p0 = 0.0, xi_p1 = 0.0, xi_pm1 = 0.0;
  double v_L_p1 = 0.0, v_R_p1 = 0.0, v_L_pm1 = 0.0, v_L_b = 0.0;
};

// Baseline (K=1) skewness condition and the personalization condition,
// gated on uniform strict obedience for both technologies. The latitude
// solves behind the personalization condition are skipped when not asked for.
inline ConditionEvaluation evaluate_conditions(const ModelSpec& spec,
                                               const SolverOptions& opt = {},
                                               bool want_doublestar = true) {
  if (spec.K != 1) throw ValidationError("evaluate_conditions: baseline conditions need K=1");
  ConditionEvaluation out;
  const Assumption2Report a2p = assumption2_check(spec, Technology::Personalized, 9, opt);
  const Assumption2Report a2b = assumption2_check(spec, Technology::Broadcast, 9, opt);
  out.assumption2 = a2p.pass && a2b.pass;
  if (!out.assumption2) {
    out.diagnostic = !a2p.pass ? a2p.diagnostic : a2b.diagnostic;
    return out;
  }

  const double t1 = spec.t(1);
  const Marginals pers = solve_marginals(spec, Technology::Personalized, t1, opt);
  const Marginals bcast = solve_marginals(spec, Technology::Broadcast, t1, opt);
  out.v_L_p1 = pers.mu_L(spec, 1);
  out.v_R_p1 = pers.mu_R(spec, 1);
  out.v_L_pm1 = pers.mu_L(spec, -1);
  out.v_L_b = bcast.mu_L(spec, 0);

  out.star_lhs = std::fabs(out.v_L_p1) - out.v_R_p1;
  out.star_rhs = 2.0 * t1;
  out.star = out.star_lhs > out.star_rhs;

  if (want_doublestar) {
    out.xi_b0 = policy_latitude(spec, Technology::Broadcast, {0}, opt).xi;
    out.xi_p0 = policy_latitude(spec, Technology::Personalized, {0}, opt).xi;
    out.xi_p1 = policy_latitude(spec, Technology::Personalized, {1}, opt).xi;
    out.xi_pm1 = policy_latitude(spec, Technology::Personalized, {-1}, opt).xi;
    out.doublestar = out.xi_b0 < std::min(out.xi_p1, out.xi_pm1);

    if (out.xi_b0 <= t1) {
      out.doublestar_branch = 0;
      out.ds_lhs = out.xi_b0;
      out.ds_rhs = t1;
    } else if (out.star) {
      // Opposition voters discipline among the extremes.
      out.doublestar_branch = 2;
      out.ds_lhs = std::fabs(spec.t(-1));
      out.ds_rhs = std::fabs(out.v_L_b) - std::fabs(out.v_L_pm1);
    } else {
      out.doublestar_branch = 1;
      out.ds_lhs = std::fabs(out.v_L_p1) - std::fabs(out.v_L_b);
      out.ds_rhs = t1;
    }
  }
  out.evaluable = true;
  return out;
}

inline std::vector<std::uint32_t> broadcast_star_columns(int n_types) {
  return {0u, (1u << n_types) - 1u};
}

inline std::vector<std::uint32_t> independent_star_columns(int n_types) {
  std::vector<std::uint32_t> cols(1u << n_types);
  for (std::uint32_t c = 0; c < cols.size(); ++c) cols[c] = c;
  return cols;
}

struct PersonalizationReport {
  double a_broadcast = 0.0;
  double a_personalized = 0.0;
  std::string direction;  // "increase" / "decrease" / "equal" (personalized vs broadcast)
  ConditionEvaluation conditions;
  EquilibriumSet broadcast_set;
  EquilibriumSet personalized_set;
};

inline PersonalizationReport compare_personalization(const ModelSpec& spec,
                                                     const SolverOptions& opt = {}) {
  PersonalizationReport rep;
  rep.conditions = evaluate_conditions(spec, opt);
  if (!rep.conditions.assumption2)
    throw AssumptionError("compare_personalization: " + rep.conditions.diagnostic);
  rep.broadcast_set = equilibrium_set(spec, Technology::Broadcast,
                                      broadcast_star_columns(spec.n_types()),
                                      spec.populations, opt);
  rep.personalized_set = equilibrium_set(spec, Technology::Personalized,
                                         independent_star_columns(spec.n_types()),
                                         spec.populations, opt);
  rep.a_broadcast = rep.broadcast_set.a_star;
  rep.a_personalized = rep.personalized_set.a_star;
  if (rep.a_personalized > rep.a_broadcast)
    rep.direction = "increase";
  else if (rep.a_personalized < rep.a_broadcast)
    rep.direction = "decrease";
  else
    rep.direction = "equal";
  return rep;
}

struct SweepRow {
  double lambda = 0.0;
  bool evaluable_broadcast = false;
  bool evaluable_personalized = false;
  double a_broadcast = 0.0;
  double a_personalized = 0.0;
  std::string diagnostic;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool monotone_broadcast = true;     // strictly decreasing over evaluable rows
  bool monotone_personalized = true;
};

inline SweepReport lambda_sweep(const ModelSpec& spec, const std::vector<double>& lambdas,
                                const SolverOptions& opt = {}) {
  SweepReport rep;
  for (double lam : lambdas) {
    ModelSpec s = spec;
    s.lambda = lam;
    s.validate_structure();
    SweepRow row;
    row.lambda = lam;
    try {
      row.a_broadcast = equilibrium_set(s, Technology::Broadcast,
                                        broadcast_star_columns(s.n_types()), s.populations, opt)
                            .a_star;
      row.evaluable_broadcast = true;
    } catch (const std::exception& e) {
      row.diagnostic = e.what();
    }
    try {
      row.a_personalized =
          equilibrium_set(s, Technology::Personalized, independent_star_columns(s.n_types()),
                          s.populations, opt)
              .a_star;
      row.evaluable_personalized = true;
    } catch (const std::exception& e) {
      row.diagnostic = e.what();
    }
    rep.rows.push_back(row);
  }
  const SweepRow* prev_b = nullptr;
  const SweepRow* prev_p = nullptr;
  for (const auto& row : rep.rows) {
    if (row.evaluable_broadcast) {
      if (prev_b && !(row.a_broadcast < prev_b->a_broadcast)) rep.monotone_broadcast = false;
      prev_b = &row;
    }
    if (row.evaluable_personalized) {
      if (prev_p && !(row.a_personalized < prev_p->a_personalized))
        rep.monotone_personalized = false;
      prev_p = &row;
    }
  }
  return rep;
}

// q has second-order stochastic dominance over q_prime: every right tail of q
// is no heavier. Inputs are symmetric population vectors over the same types.
inline bool sosd_compare(const std::vector<double>& q, const std::vector<double>& q_prime) {
  if (q.size() != q_prime.size() || q.size() % 2 == 0)
    throw ValidationError("sosd_compare: mismatched or malformed population functions");
  const int K = static_cast<int>(q.size() / 2);
  auto check = [&](const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) {
      if (!(x > 0.0)) throw ValidationError("sosd_compare: populations must be positive");
      sum += x;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw ValidationError("sosd_compare: must sum to 1");
    for (int k = 1; k <= K; ++k) {
      if (v[static_cast<std::size_t>(K + k)] != v[static_cast<std::size_t>(K - k)])
        throw ValidationError("sosd_compare: population not symmetric");
    }
  };
  check(q);
  check(q_prime);
  for (int m = 1; m <= K; ++m) {
    double tail = 0.0, tail_prime = 0.0;
    for (int k = m; k <= K; ++k) {
      tail += q[static_cast<std::size_t>(K + k)];
      tail_prime += q_prime[static_cast<std::size_t>(K + k)];
    }
    if (tail > tail_prime + 1e-12) return false;
  }
  return true;
}

struct MassPolarizationReport {
  double a_q = 0.0;
  double a_q_prime = 0.0;
  bool ordered = false;  // a_q >= a_q_prime
  bool strict = false;
  bool baseline_strictness_condition = false;  // K=1 only
};

// Mass polarization (an SOSD-ordered spread of the population) weakly lowers
// personalized policy polarization; strict at K=1 exactly when the median
// majority is lost and an extreme type has the smaller latitude.
inline MassPolarizationReport mass_polarization_effect(const ModelSpec& spec,
                                                       const std::vector<std::uint32_t>& chi,
                                                       const std::vector<double>& q,
                                                       const std::vector<double>& q_prime,
                                                       const SolverOptions& opt = {}) {
  if (!sosd_compare(q, q_prime))
    throw ValidationError("mass_polarization_effect: q does not SOSD-dominate q_prime");
  if (spec.K > 1 && spec.cost != CostKind::QuadraticCost)
    throw ValidationError("mass_polarization_effect: general K requires quadratic cost");
  MassPolarizationReport rep;
  const EquilibriumSet eq = equilibrium_set(spec, Technology::Personalized, chi, q, opt);
  const EquilibriumSet eq_prime =
      equilibrium_set(spec, Technology::Personalized, chi, q_prime, opt, false);
  rep.a_q = eq.a_star;
  rep.a_q_prime = eq_prime.a_star;
  rep.ordered = rep.a_q >= rep.a_q_prime - 1e-12;
  rep.strict = rep.a_q > rep.a_q_prime + 1e-12;
  if (spec.K == 1) {
    const double q0 = q[1], q0p = q_prime[1];
    const double xi_p0 = policy_latitude(spec, Technology::Personalized, {0}, opt).xi;
    const double xi_p1 = policy_latitude(spec, Technology::Personalized, {1}, opt).xi;
    const double xi_pm1 = policy_latitude(spec, Technology::Personalized, {-1}, opt).xi;
    rep.baseline_strictness_condition =
        q0 > 0.5 && q0p <= 0.5 && std::min(xi_pm1, xi_p1) < xi_p0;
  }
  return rep;
}

struct CompetitiveComparisonReport {
  double a_competitive = 0.0;
  double a_personalized = 0.0;
  bool competitive_smaller = false;
  std::vector<std::pair<int, double>> xi_competitive;   // per singleton type
  std::vector<std::pair<int, double>> xi_personalized;
};

// Perfect competition between infomediaries: utility-maximizing signals at
// marginal cost lambda, evaluated on a configuration at least as rich as the
// monopoly one. Less Blackwell-informative signals shrink every latitude.
inline CompetitiveComparisonReport competitive_comparison(
    const ModelSpec& spec, const std::vector<std::uint32_t>& chi_competitive,
    const std::vector<std::uint32_t>& chi_personalized, const SolverOptions& opt = {}) {
  if (!is_richer(chi_competitive, chi_personalized))
    throw ValidationError("competitive_comparison: chi_c is not richer than chi_p");
  const Assumption2Report a2c = assumption2_check(spec, Technology::Competitive, 9, opt);
  if (!a2c.pass)
    throw AssumptionError("competitive_comparison: competitive-mode regularity fails: " +
                          a2c.diagnostic);
  CompetitiveComparisonReport rep;
  for (int k = -spec.K; k <= spec.K; ++k) {
    rep.xi_competitive.emplace_back(
        k, policy_latitude(spec, Technology::Competitive, {k}, opt).xi);
    rep.xi_personalized.emplace_back(
        k, policy_latitude(spec, Technology::Personalized, {k}, opt).xi);
  }
  rep.a_competitive =
      equilibrium_set(spec, Technology::Competitive, chi_competitive, spec.populations, opt)
          .a_star;
  rep.a_personalized =
      equilibrium_set(spec, Technology::Personalized, chi_personalized, spec.populations, opt)
          .a_star;
  rep.competitive_smaller = rep.a_competitive < rep.a_personalized;
  return rep;
}

struct Axis {
  std::string name;  // "lambda", "t1" or "a_bar"
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
};

struct RegionGrid {
  Axis x;
  Axis y;
  std::vector<ConditionEvaluation> cells;  // row-major, index = iy * x.n + ix
  std::vector<std::string> checks;

  const ConditionEvaluation& cell(int ix, int iy) const {
    return cells[static_cast<std::size_t>(iy) * static_cast<std::size_t>(x.n) +
                 static_cast<std::size_t>(ix)];
  }
};

inline ModelSpec spec_with_field(const ModelSpec& base, const std::string& field, double value) {
  ModelSpec s = base;
  if (field == "lambda") {
    s.lambda = value;
  } else if (field == "t1") {
    if (base.K != 1) throw ValidationError("region axis t1 requires K=1");
    s.bliss = {-value, 0.0, value};
  } else if (field == "a_bar") {
    s.a_bar = value;
  } else {
    throw ValidationError("unknown region axis field: " + field);
  }
  s.validate_structure();
  return s;
}

inline double axis_value(const Axis& ax, int i) {
  if (ax.n == 1) return ax.lo;
  return ax.lo + (ax.hi - ax.lo) * i / (ax.n - 1);
}

inline RegionGrid region_scan(const ModelSpec& base, const Axis& x, const Axis& y,
                              const std::vector<std::string>& checks,
                              const SolverOptions& opt = {}) {
  if (x.n < 1 || y.n < 1 || !(x.lo <= x.hi) || !(y.lo <= y.hi))
    throw ValidationError("region_scan: malformed axes");
  for (const Axis* ax : {&x, &y}) {
    if (ax->name != "lambda" && ax->name != "t1" && ax->name != "a_bar")
      throw ValidationError("unknown region axis field: " + ax->name);
  }
  RegionGrid grid;
  grid.x = x;
  grid.y = y;
  grid.checks = checks;
  grid.cells.resize(static_cast<std::size_t>(x.n) * static_cast<std::size_t>(y.n));
  bool want_doublestar = false;
  for (const auto& c : checks) want_doublestar = want_doublestar || c == "doublestar";
  parallel_for(grid.cells.size(), [&](std::size_t idx) {
    const int ix = static_cast<int>(idx) % x.n;
    const int iy = static_cast<int>(idx) / x.n;
    ConditionEvaluation cell;
    try {
      const ModelSpec s =
          spec_with_field(spec_with_field(base, x.name, axis_value(x, ix)), y.name,
                          axis_value(y, iy));
      cell = evaluate_conditions(s, opt, want_doublestar);
    } catch (const std::exception& e) {
      cell.evaluable = false;
      cell.diagnostic = e.what();
    }
    grid.cells[idx] = cell;
  });
  return grid;
}

// Plot-ready artifact: one row per cell, "na" where a check is unevaluable.
inline std::string region_csv(const RegionGrid& grid) {
  auto wants = [&](const std::string& c) {
    for (const auto& s : grid.checks)
      if (s == c) return true;
    return false;
  };
  std::ostringstream os;
  os << "x,y,assumption2,star,doublestar\n";
  for (int iy = 0; iy < grid.y.n; ++iy) {
    for (int ix = 0; ix < grid.x.n; ++ix) {
      const ConditionEvaluation& c = grid.cell(ix, iy);
      os << format_double(axis_value(grid.x, ix)) << ',' << format_double(axis_value(grid.y, iy))
         << ',';
      if (wants("assumption2") || wants("star") || wants("doublestar"))
        os << (c.assumption2 ? '1' : '0');
      else
        os << "na";
      os << ',';
      if (wants("star") && c.evaluable)
        os << (c.star ? '1' : '0');
      else
        os << "na";
      os << ',';
      if (wants("doublestar") && c.evaluable)
        os << (c.doublestar ? '1' : '0');
      else
        os << "na";
      os << '\n';
    }
  }
  return os.str();
}

// Seeded draw of a p-consistent configuration: delete symmetric pairs of
// non-canonical columns from the independent configuration, then require that
// nonnegative probability vectors reproducing the marginals exist across the
// policy grid. Returns the surviving column support.
inline std::optional<std::vector<std::uint32_t>> draw_consistent_configuration(
    const ModelSpec& spec, Technology tech, std::mt19937_64& rng, const SolverOptions& opt = {},
    int a_grid = 5) {
  const int n = spec.n_types();
  const std::uint32_t all = (1u << n) - 1u;
  std::vector<std::uint32_t> cols = independent_star_columns(n);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> orbits;
  for (std::uint32_t c = 0; c < cols.size(); ++c) {
    if (c == 0u || c == all) continue;  // canonical columns stay
    const std::uint32_t s = sigma_column(c, n);
    if (c < s) orbits.emplace_back(c, s);
  }
  std::vector<std::uint32_t> keep = {0u, all};
  std::bernoulli_distribution drop(0.5);
  for (const auto& [c, s] : orbits) {
    if (!drop(rng)) {
      keep.push_back(c);
      keep.push_back(s);
    }
  }
  std::sort(keep.begin(), keep.end());
  if (keep.size() < static_cast<std::size_t>(n) + 1) return std::nullopt;
  // Consistency requires strictly positive probability vectors at every
  // policy; columns the solve cannot push off zero anywhere are dropped (in
  // symmetric pairs), and draws whose canonical columns die are discarded.
  try {
    for (int attempt = 0; attempt < 3; ++attempt) {
      std::vector<char> used(keep.size(), 1);
      bool all_ok = true;
      for (double a : linspace(0.0, spec.a_bar, a_grid)) {
        const Marginals marg = solve_marginals(spec, tech, a, opt);
        const ConsistentB b = solve_consistent_b(keep, n, marg.probs(spec), 1e-8, true);
        if (!b.feasible) return std::nullopt;
        for (std::size_t i = 0; i < keep.size(); ++i) {
          if (b.b_plus[i] < 1e-9 || b.b_minus[i] < 1e-9) {
            used[i] = 0;
            all_ok = false;
          }
        }
      }
      if (all_ok) return keep;
      std::vector<std::uint32_t> next;
      for (std::size_t i = 0; i < keep.size(); ++i)
        if (used[i]) next.push_back(keep[i]);
      for (std::uint32_t c : std::vector<std::uint32_t>(next)) {
        const std::uint32_t s = sigma_column(c, n);
        if (std::find(next.begin(), next.end(), s) == next.end())
          next.erase(std::remove(next.begin(), next.end(), c), next.end());
      }
      if (std::find(next.begin(), next.end(), 0u) == next.end() ||
          std::find(next.begin(), next.end(), all) == next.end())
        return std::nullopt;
      if (next.size() < static_cast<std::size_t>(n) + 1 || next.size() == keep.size())
        return std::nullopt;
      keep = std::move(next);
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return std::nullopt;
}

// Builds the full joint distribution on a column support at one policy,
// dropping (in symmetric pairs) columns the probability solve leaves unused.
inline NewsConfiguration configuration_from_columns(std::vector<std::uint32_t> columns,
                                                    const ModelSpec& spec, Technology tech,
                                                    double a, const SolverOptions& opt = {}) {
  const int n = spec.n_types();
  const Marginals marg = solve_marginals(spec, tech, a, opt);
  const MarginalProbs probs = marg.probs(spec);
  for (int attempt = 0; attempt < 4; ++attempt) {
    const ConsistentB b = solve_consistent_b(columns, n, probs, 1e-8, true);
    if (!b.feasible)
      throw ValidationError("configuration_from_columns: support is not consistent at a=" +
                            format_double(a));
    std::vector<std::uint32_t> used;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (b.b_plus[i] > 1e-9) used.push_back(columns[i]);
    }
    std::vector<std::uint32_t> closed = used;
    for (std::uint32_t c : used) {
      const std::uint32_t s = sigma_column(c, n);
      if (std::find(closed.begin(), closed.end(), s) == closed.end()) closed.push_back(s);
    }
    std::sort(closed.begin(), closed.end());
    if (closed.size() == columns.size()) {
      std::vector<double> bp = b.b_plus;
      double sum = 0.0;
      for (double& x : bp) sum += x;
      for (double& x : bp) x /= sum;
      return NewsConfiguration::make(n, columns, bp,
                                     detail::symmetric_b_minus(columns, n, bp));
    }
    columns = closed;
  }
  throw NumericError("configuration_from_columns: support did not stabilize");
}

}  // namespace nari
