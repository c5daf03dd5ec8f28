#pragma once

// Joint news distributions <chi, b+, b->: a 0/1 recommendation matrix over
// voter types together with state-conditional column probabilities. Columns
// are stored as bitmasks, bit i = row i = type k = i - K. Influence of a
// coalition is the rounding test on q' * chi and is independent of b+-.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "nari/model.hpp"
#include "nari/numerics.hpp"

namespace nari {

// Per-type probabilities of an R-endorsement conditional on the state.
struct MarginalProbs {
  int n = 0;  // 2K + 1 types
  std::vector<double> r_plus;
  std::vector<double> r_minus;
};

// The symmetry operator: row k of the result carries the flipped
// recommendation that row -k carried in the input.
inline std::uint32_t sigma_column(std::uint32_t x, int n) {
  std::uint32_t y = 0;
  for (int i = 0; i < n; ++i) {
    if (((x >> (n - 1 - i)) & 1u) == 0u) y |= (1u << i);
  }
  return y;
}

struct NewsConfiguration {
  int n_rows = 0;
  std::vector<std::uint32_t> columns;
  std::vector<double> b_plus;
  std::vector<double> b_minus;

  std::size_t n_columns() const { return columns.size(); }
  bool entry(int row, std::size_t col) const { return (columns[col] >> row) & 1u; }

  static NewsConfiguration make(int n_rows, std::vector<std::uint32_t> columns,
                                std::vector<double> b_plus, std::vector<double> b_minus) {
    NewsConfiguration c;
    c.n_rows = n_rows;
    c.columns = std::move(columns);
    c.b_plus = std::move(b_plus);
    c.b_minus = std::move(b_minus);
    c.validate();
    return c;
  }

  void validate() const {
    if (n_rows < 1 || n_rows > 31) throw ValidationError("configuration: bad row count");
    const std::size_t m = columns.size();
    if (m == 0) throw ValidationError("configuration: no columns");
    if (b_plus.size() != m || b_minus.size() != m)
      throw ValidationError("configuration: probability vector size mismatch");
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (columns[i] == columns[j])
          throw ValidationError("configuration: duplicate columns");
      }
    }
    double sp = 0.0, sm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(b_plus[i] > 0.0) || !(b_minus[i] > 0.0))
        throw ValidationError("configuration: probabilities must be strictly positive");
      sp += b_plus[i];
      sm += b_minus[i];
    }
    if (std::fabs(sp - 1.0) > 1e-12 || std::fabs(sm - 1.0) > 1e-12)
      throw ValidationError("configuration: probabilities must sum to 1");
    for (std::size_t i = 0; i < m; ++i) {
      const std::uint32_t mirror_col = sigma_column(columns[i], n_rows);
      std::size_t j = m;
      for (std::size_t c = 0; c < m; ++c) {
        if (columns[c] == mirror_col) {
          j = c;
          break;
        }
      }
      if (j == m)
        throw ValidationError("configuration: not symmetric (missing mirrored column)");
      if (std::fabs(b_plus[i] - b_minus[j]) > 1e-12)
        throw ValidationError("configuration: not symmetric (b+ / b- mismatch)");
    }
  }
};

// Rounding test: a coalition is influential iff forcing its rows to 1 flips
// the majority outcome of some recommendation profile. Column masses at
// exactly 1/2 have no defined rounding and are rejected.
inline bool is_influential(const std::vector<std::uint32_t>& columns, int n_rows,
                           const std::vector<double>& q, std::uint32_t coalition) {
  if (q.size() != static_cast<std::size_t>(n_rows))
    throw ValidationError("is_influential: population size mismatch");
  for (std::uint32_t col : columns) {
    double mass = 0.0, mass_forced = 0.0;
    const std::uint32_t forced = col | coalition;
    for (int i = 0; i < n_rows; ++i) {
      if ((col >> i) & 1u) mass += q[static_cast<std::size_t>(i)];
      if ((forced >> i) & 1u) mass_forced += q[static_cast<std::size_t>(i)];
    }
    if (std::fabs(mass - 0.5) <= 1e-12 || std::fabs(mass_forced - 0.5) <= 1e-12)
      throw HalfTieError("influence test: column mass exactly 1/2 (rounding undefined)");
    if ((mass > 0.5) != (mass_forced > 0.5)) return true;
  }
  return false;
}

inline bool is_influential(const NewsConfiguration& chi, const std::vector<double>& q,
                           std::uint32_t coalition) {
  return is_influential(chi.columns, chi.n_rows, q, coalition);
}

// All inclusion-minimal influential coalitions; supersets are implied.
inline std::vector<std::uint32_t> enumerate_influential(
    const std::vector<std::uint32_t>& columns, int n_rows, const std::vector<double>& q) {
  if (n_rows > 15) throw ValidationError("enumerate_influential: more than 15 types");
  const std::uint32_t total = 1u << n_rows;
  std::vector<char> influential(total, 0);
  for (std::uint32_t c = 1; c < total; ++c)
    influential[c] = is_influential(columns, n_rows, q, c) ? 1 : 0;
  std::vector<std::uint32_t> minimal;
  for (std::uint32_t c = 1; c < total; ++c) {
    if (!influential[c]) continue;
    bool min = true;
    for (int i = 0; i < n_rows && min; ++i) {
      if ((c >> i) & 1u) {
        if (influential[c & ~(1u << i)]) min = false;
      }
    }
    if (min) minimal.push_back(c);
  }
  return minimal;
}

inline std::vector<std::uint32_t> enumerate_influential(const NewsConfiguration& chi,
                                                        const std::vector<double>& q) {
  return enumerate_influential(chi.columns, chi.n_rows, q);
}

// chi is richer than chi_prime when every column of chi_prime is a column of chi.
inline bool is_richer(const std::vector<std::uint32_t>& chi,
                      const std::vector<std::uint32_t>& chi_prime) {
  for (std::uint32_t c : chi_prime) {
    if (std::find(chi.begin(), chi.end(), c) == chi.end()) return false;
  }
  return true;
}

namespace detail {

inline std::vector<double> symmetric_b_minus(const std::vector<std::uint32_t>& columns,
                                             int n_rows, const std::vector<double>& b_plus) {
  std::vector<double> b_minus(columns.size(), 0.0);
  for (std::size_t m = 0; m < columns.size(); ++m) {
    const std::uint32_t target = sigma_column(columns[m], n_rows);
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j] == target) {
        b_minus[j] = b_plus[m];
        break;
      }
    }
  }
  return b_minus;
}

}  // namespace detail

// chi*: one common recommendation, columns all-L and all-R.
inline NewsConfiguration build_broadcast_configuration(const MarginalProbs& probs) {
  const int n = probs.n;
  for (int i = 0; i < n; ++i) {
    if (std::fabs(probs.r_plus[i] - probs.r_plus[0]) > 1e-12 ||
        std::fabs(probs.r_minus[i] - probs.r_minus[0]) > 1e-12)
      throw ValidationError("broadcast configuration requires identical marginals");
  }
  const double rp = probs.r_plus[0];
  if (!(rp > 0.0 && rp < 1.0))
    throw ValidationError("broadcast configuration: degenerate marginal");
  const std::vector<std::uint32_t> cols = {0u, (1u << n) - 1u};
  const std::vector<double> bp = {1.0 - rp, rp};
  return NewsConfiguration::make(n, cols, bp, detail::symmetric_b_minus(cols, n, bp));
}

// chi**: conditionally independent signals, all 2^n recommendation profiles.
inline NewsConfiguration build_independent_configuration(const MarginalProbs& probs) {
  const int n = probs.n;
  if (n > 15) throw ValidationError("independent configuration: more than 15 types");
  for (int i = 0; i < n; ++i) {
    if (!(probs.r_plus[i] > 0.0 && probs.r_plus[i] < 1.0) ||
        !(probs.r_minus[i] > 0.0 && probs.r_minus[i] < 1.0))
      throw ValidationError("independent configuration: degenerate marginal");
  }
  const std::uint32_t total = 1u << n;
  std::vector<std::uint32_t> cols(total);
  std::vector<double> bp(total);
  for (std::uint32_t c = 0; c < total; ++c) {
    cols[c] = c;
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      const double r = probs.r_plus[static_cast<std::size_t>(i)];
      p *= ((c >> i) & 1u) ? r : 1.0 - r;
    }
    bp[c] = p;
  }
  return NewsConfiguration::make(n, cols, bp, detail::symmetric_b_minus(cols, n, bp));
}

// Max-norm residual of chi b+- against the stacked marginal probabilities.
inline double consistency_residual(const NewsConfiguration& chi, const MarginalProbs& probs) {
  if (chi.n_rows != probs.n) throw ValidationError("consistency: dimension mismatch");
  double worst = 0.0;
  for (int i = 0; i < chi.n_rows; ++i) {
    double rp = 0.0, rm = 0.0;
    for (std::size_t c = 0; c < chi.n_columns(); ++c) {
      if (chi.entry(i, c)) {
        rp += chi.b_plus[c];
        rm += chi.b_minus[c];
      }
    }
    worst = std::max(worst, std::fabs(rp - probs.r_plus[static_cast<std::size_t>(i)]));
    worst = std::max(worst, std::fabs(rm - probs.r_minus[static_cast<std::size_t>(i)]));
  }
  return worst;
}

inline bool check_consistency(const NewsConfiguration& chi, const MarginalProbs& probs,
                              double tol = 1e-10) {
  return consistency_residual(chi, probs) <= tol;
}

// Finds nonnegative b+- reproducing the marginals on a fixed column support;
// used to test whether a bare configuration matrix is <S,a>-consistent.
struct ConsistentB {
  bool feasible = false;
  double residual = 0.0;
  double min_entry = 0.0;
  std::vector<double> b_plus;
  std::vector<double> b_minus;
};

namespace detail {

inline std::vector<std::vector<double>> stacked_columns(
    const std::vector<std::uint32_t>& columns, int n_rows) {
  std::vector<std::vector<double>> a_cols(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    a_cols[c].resize(static_cast<std::size_t>(n_rows) + 1);
    for (int i = 0; i < n_rows; ++i)
      a_cols[c][static_cast<std::size_t>(i)] = ((columns[c] >> i) & 1u) ? 1.0 : 0.0;
    a_cols[c][static_cast<std::size_t>(n_rows)] = 1.0;
  }
  return a_cols;
}

inline double stacked_residual(const std::vector<std::vector<double>>& a_cols,
                               const std::vector<double>& rhs, const std::vector<double>& x) {
  double resid = 0.0;
  for (std::size_t r = 0; r < rhs.size(); ++r) {
    double got = 0.0;
    for (std::size_t c = 0; c < a_cols.size(); ++c) got += a_cols[c][r] * x[c];
    resid = std::max(resid, std::fabs(got - rhs[r]));
  }
  return resid;
}

// NNLS returns a vertex of the solution polytope, which may park unused
// columns at zero even when interior (strictly positive) solutions exist.
// For each column stuck at zero, look for a kernel direction that raises it:
// nonnegative weight on the other zero columns, free sign on the support
// columns (handled by a +- column split), solved as a small NNLS.
inline void interiorize(const std::vector<std::vector<double>>& a_cols,
                        std::vector<double>& x, double floor_mass = 1e-9) {
  const std::size_t m = a_cols.size();
  for (int pass = 0; pass < 6; ++pass) {
    bool changed = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (x[j] >= floor_mass) continue;
      std::vector<std::vector<double>> dir_cols;
      std::vector<std::pair<std::size_t, double>> tags;  // (column index, sign)
      for (std::size_t i = 0; i < m; ++i) {
        if (i == j) continue;
        dir_cols.push_back(a_cols[i]);
        tags.emplace_back(i, 1.0);
        if (x[i] >= floor_mass) {
          std::vector<double> neg = a_cols[i];
          for (double& v : neg) v = -v;
          dir_cols.push_back(std::move(neg));
          tags.emplace_back(i, -1.0);
        }
      }
      std::vector<double> rhs = a_cols[j];
      for (double& v : rhs) v = -v;
      const std::vector<double> w = nnls(dir_cols, rhs);
      std::vector<double> dir(m, 0.0);
      dir[j] = 1.0;
      for (std::size_t i = 0; i < tags.size(); ++i)
        dir[tags[i].first] += tags[i].second * w[i];
      const std::vector<double> zero_rhs(a_cols[j].size(), 0.0);
      if (stacked_residual(a_cols, zero_rhs, dir) > 1e-10) {
        continue;  // every solution keeps this column at zero
      }
      double t_max = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (dir[i] < -1e-15) t_max = std::min(t_max, std::max(x[i], 0.0) / -dir[i]);
      }
      const double t = std::min(0.5 * t_max, 0.25 / static_cast<double>(m));
      if (!(t > 0.0) || !std::isfinite(t)) continue;
      for (std::size_t i = 0; i < m; ++i) x[i] = std::max(x[i] + t * dir[i], 0.0);
      changed = true;
    }
    if (!changed) break;
  }
}

}  // namespace detail

// Nonnegative solve of chi b = marginals, sum(b) = 1. With `interior` set,
// the solution is pushed off the zero faces wherever the polytope allows;
// min_entry then reports how far it got.
inline ConsistentB solve_consistent_b(const std::vector<std::uint32_t>& columns, int n_rows,
                                      const MarginalProbs& probs, double tol = 1e-8,
                                      bool interior = false) {
  ConsistentB out;
  const std::vector<std::vector<double>> a_cols = detail::stacked_columns(columns, n_rows);
  auto solve_side = [&](const std::vector<double>& target) {
    std::vector<double> rhs = target;
    rhs.push_back(1.0);
    std::vector<double> x = nnls(a_cols, rhs);
    if (interior) detail::interiorize(a_cols, x);
    const double resid = detail::stacked_residual(a_cols, rhs, x);
    return std::make_pair(std::move(x), resid);
  };
  auto [bp, rp] = solve_side(probs.r_plus);
  auto [bm, rm] = solve_side(probs.r_minus);
  out.residual = std::max(rp, rm);
  out.b_plus = std::move(bp);
  out.b_minus = std::move(bm);
  out.min_entry = std::numeric_limits<double>::infinity();
  for (double v : out.b_plus) out.min_entry = std::min(out.min_entry, v);
  for (double v : out.b_minus) out.min_entry = std::min(out.min_entry, v);
  out.feasible = out.residual <= tol;
  return out;
}

inline std::vector<int> coalition_types(std::uint32_t mask, int K) {
  std::vector<int> out;
  for (int i = 0; i < 2 * K + 1; ++i) {
    if ((mask >> i) & 1u) out.push_back(i - K);
  }
  return out;
}

inline std::uint32_t coalition_mask(const std::vector<int>& types, int K) {
  std::uint32_t mask = 0;
  for (int k : types) {
    if (k < -K || k > K) throw ValidationError("coalition: type out of range");
    mask |= 1u << (k + K);
  }
  if (mask == 0) throw ValidationError("coalition: empty");
  return mask;
}

}  // namespace nari
