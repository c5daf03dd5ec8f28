#pragma once

// Small numeric toolbox shared by the solvers: bracketing root finders,
// golden-section maximization, a damped 2-D Newton, Lawson-Hanson NNLS,
// a seeded worker pool and round-trip float formatting.

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nari {

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct HalfTieError : std::runtime_error {
  explicit HalfTieError(const std::string& what) : std::runtime_error(what) {}
};

// Assumption violated at runtime; carries the witnessing point in the message.
struct AssumptionError : std::runtime_error {
  explicit AssumptionError(const std::string& what) : std::runtime_error(what) {}
};

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

// Root of f on [lo, hi]; requires a sign change. Plain bisection: every f we
// feed it is cheap and may have kinks, so superlinear methods buy nothing.
template <class F>
double bisect_root(F&& f, double lo, double hi, double tol = 1e-12, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericError("bisect_root: no sign change on [" + format_double(lo) + ", " +
                       format_double(hi) + "], f = (" + format_double(flo) + ", " +
                       format_double(fhi) + ")");
  }
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Maximum of a unimodal (here: concave) f on [lo, hi].
template <class F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi, double tol = 1e-10) {
  constexpr double kInvPhi = 0.6180339887498949;
  if (hi <= lo) return {lo, f(lo)};
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = f(xm);
  if (fm >= f1 && fm >= f2) return {xm, fm};
  return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

// Damped Newton on a 2-D system. Returns false when it fails to reach
// `tol` on the residual within `max_iter` steps; the caller reseeds.
template <class FN, class JAC, class CLAMP>
bool newton2(FN&& fn, JAC&& jac, CLAMP&& clamp, Vec2& x, double tol, int max_iter) {
  auto norm = [](const Vec2& r) { return std::max(std::fabs(r[0]), std::fabs(r[1])); };
  Vec2 r = fn(x);
  double rn = norm(r);
  for (int it = 0; it < max_iter; ++it) {
    if (rn < tol) return true;
    const Mat2 J = jac(x);
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (!std::isfinite(det) || std::fabs(det) < 1e-300) return false;
    const Vec2 step = {(-r[0] * J[1][1] + r[1] * J[0][1]) / det,
                       (-r[1] * J[0][0] + r[0] * J[1][0]) / det};
    double t = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half) {
      Vec2 cand = {x[0] + t * step[0], x[1] + t * step[1]};
      clamp(cand);
      const Vec2 rc = fn(cand);
      const double rcn = norm(rc);
      if (std::isfinite(rcn) && rcn < rn) {
        x = cand;
        r = rc;
        rn = rcn;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) return false;
  }
  return rn < tol;
}

namespace detail {

// Dense least squares on the columns in `passive` via normal equations.
inline std::vector<double> ls_on_subset(const std::vector<std::vector<double>>& cols,
                                        const std::vector<double>& rhs,
                                        const std::vector<int>& passive) {
  const std::size_t p = passive.size();
  std::vector<std::vector<double>> G(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      const auto& ci = cols[passive[i]];
      const auto& cj = cols[passive[j]];
      for (std::size_t r = 0; r < rhs.size(); ++r) s += ci[r] * cj[r];
      G[i][j] = s;
    }
    double s = 0.0;
    for (std::size_t r = 0; r < rhs.size(); ++r) s += cols[passive[i]][r] * rhs[r];
    G[i][p] = s;
  }
  // Gaussian elimination with partial pivoting.
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (std::fabs(G[r][c]) > std::fabs(G[piv][c])) piv = r;
    std::swap(G[c], G[piv]);
    if (std::fabs(G[c][c]) < 1e-14) {
      // Rank deficient subset; nudge so the active-set loop can back off.
      G[c][c] += 1e-12;
    }
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const double m = G[r][c] / G[c][c];
      for (std::size_t k = c; k <= p; ++k) G[r][k] -= m * G[c][k];
    }
  }
  std::vector<double> z(p);
  for (std::size_t i = 0; i < p; ++i) z[i] = G[i][p] / G[i][i];
  return z;
}

}  // namespace detail

// Lawson-Hanson nonnegative least squares: min ||A x - b||, x >= 0.
// `columns[j]` is the j-th column of A. Sizes here are tiny (<= ~32 cols).
inline std::vector<double> nnls(const std::vector<std::vector<double>>& columns,
                                const std::vector<double>& b, int max_iter = 300) {
  const std::size_t n = columns.size();
  const std::size_t m = b.size();
  std::vector<double> x(n, 0.0);
  std::vector<bool> in_p(n, false);
  std::vector<int> passive;

  auto residual = [&]() {
    std::vector<double> r = b;
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] != 0.0)
        for (std::size_t i = 0; i < m; ++i) r[i] -= columns[j][i] * x[j];
    return r;
  };

  for (int outer = 0; outer < max_iter; ++outer) {
    const std::vector<double> r = residual();
    int best = -1;
    double best_w = 1e-11;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_p[j]) continue;
      double w = 0.0;
      for (std::size_t i = 0; i < m; ++i) w += columns[j][i] * r[i];
      if (w > best_w) {
        best_w = w;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) break;
    in_p[best] = true;
    passive.push_back(best);

    for (int inner = 0; inner < max_iter; ++inner) {
      std::vector<double> z = detail::ls_on_subset(columns, b, passive);
      bool all_pos = true;
      for (double zi : z)
        if (zi <= 0.0) all_pos = false;
      if (all_pos) {
        for (std::size_t i = 0; i < passive.size(); ++i) x[passive[i]] = z[i];
        break;
      }
      double alpha = 1.0;
      for (std::size_t i = 0; i < passive.size(); ++i) {
        if (z[i] <= 0.0) {
          const double xi = x[passive[i]];
          if (xi - z[i] > 0.0) alpha = std::min(alpha, xi / (xi - z[i]));
        }
      }
      for (std::size_t i = 0; i < passive.size(); ++i) {
        x[passive[i]] += alpha * (z[i] - x[passive[i]]);
      }
      std::vector<int> kept;
      for (int j : passive) {
        if (x[j] > 1e-14) {
          kept.push_back(j);
        } else {
          x[j] = 0.0;
          in_p[j] = false;
        }
      }
      passive = kept;
      if (passive.empty()) break;
    }
  }
  return x;
}

inline unsigned worker_count() {
  if (const char* env = std::getenv("NARI_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Runs f(i) for i in [0, n). Work items must be independent; results are
// written by index so the output order never depends on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<bool> failed{false};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          f(i);
        } catch (...) {
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) throw NumericError("parallel_for: worker failed");
}

}  // namespace nari
