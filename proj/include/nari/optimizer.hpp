#pragma once

// Solvers for the three signal-design problems:
//   - competitive: max V(Pi) - cost * I(Pi), the utility-maximizing signal;
//   - personalized: max I(Pi) subject to V(Pi) >= lambda * I(Pi), solved by
//     bisecting the effective cost at which the competitive signal makes the
//     participation constraint bind;
//   - broadcast: max I(Pi) * demand(Pi), by enumerating consecutive inclusion
//     windows and solving the window's representative-voter problem.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nari/model.hpp"
#include "nari/signals.hpp"

namespace nari {

enum class SolveRegime { FullDisclosure, BindingParticipation, Interior, Degenerate };

inline std::string to_string(SolveRegime r) {
  switch (r) {
    case SolveRegime::FullDisclosure: return "full_disclosure";
    case SolveRegime::BindingParticipation: return "binding_participation";
    case SolveRegime::Interior: return "interior";
    default: return "degenerate";
  }
}

struct SolverOptions {
  double tol_root = 1e-10;
  double tol_bind = 1e-9;
  int max_iter = 100;
};

struct SignalSolveResult {
  Signal signal;
  SolveRegime regime = SolveRegime::Degenerate;
  double effective_cost = 0.0;  // lambda_tilde for binding solves, cost for competitive
  double attention = 0.0;
  double value = 0.0;
  double slack = 0.0;      // value - lambda * attention (solve cost for competitive)
  bool boundary = false;   // a posterior was pinned at +-1 short of full disclosure
};

namespace detail {

// Gain of a voter on the k <= 0 branch with differential valuation v:
// pi_R * [v + mu_R]^+.
inline double gain_vneg(double v, double mu_L, double mu_R) {
  const double pi_R = -mu_L / (mu_R - mu_L);
  return pi_R * std::max(v + mu_R, 0.0);
}

inline double info_cost(const AttentionSpec& att, double mu_L, double mu_R) {
  const double d = mu_R - mu_L;
  return (mu_R * att.h(mu_L) - mu_L * att.h(mu_R)) / d;
}

struct RawCompetitive {
  bool informative = false;
  double mu_L = 0.0, mu_R = 0.0;
  double value = 0.0;  // V - cost * I; 0 for the null signal
  bool full = false;
  bool boundary = false;
};

// Competitive solve for the k <= 0 gain branch (v <= 0 in all our call sites).
inline RawCompetitive competitive_vneg(const AttentionSpec& att, double v, double cost,
                                       const SolverOptions& opt) {
  RawCompetitive best;  // null signal, value 0
  auto consider = [&](double mu_L, double mu_R, bool full, bool boundary) {
    if (!(mu_L >= -1.0 && mu_L < 0.0 && mu_R > 0.0 && mu_R <= 1.0)) return;
    const double val = gain_vneg(v, mu_L, mu_R) - cost * info_cost(att, mu_L, mu_R);
    if (val > best.value + 0.0) {
      best = {true, mu_L, mu_R, val, full, boundary};
    }
  };

  consider(-1.0, 1.0, true, false);

  if (att.kind == CostKind::QuadraticCost) {
    const double half = 1.0 / (4.0 * cost);
    consider(-v - half, -v + half, false, false);
    // mu_R pinned at 1: interior stationary point of the restricted problem.
    if (-v + half > 1.0 && 1.0 + v > 0.0) {
      const double mu_L = 1.0 - std::sqrt((1.0 + v) / cost);
      consider(mu_L, 1.0, false, true);
    }
  } else {
    // Posterior magnitudes are capped by double precision: past this spread
    // of h' the tangency point is indistinguishable from full disclosure.
    const double cap = att.h_prime(1.0 - 1e-12) - att.h_prime(-(1.0 - 1e-12));
    if (1.0 / cost >= cap) {
      consider(-1.0, 1.0, true, false);
    } else if (v == 0.0) {
      const double m = att.h_prime_inv(0.5 / cost);
      if (m >= 1.0)
        consider(-1.0, 1.0, true, false);
      else
        consider(-m, m, false, false);
    } else {
      const double lo_R = std::max(-v, 0.0);
      auto residuals = [&](const Vec2& x) -> Vec2 {
        const double mu_L = x[0], mu_R = x[1];
        const double dh = att.h(mu_R) - att.h(mu_L);
        const double dmu = mu_R - mu_L;
        return {v + mu_R - cost * (dh - att.h_prime(mu_L) * dmu),
                -(v + mu_L) - cost * (att.h_prime(mu_R) * dmu - dh)};
      };
      auto jacobian = [&](const Vec2& x) -> Mat2 {
        const double mu_L = x[0], mu_R = x[1];
        const double dmu = mu_R - mu_L;
        const double dhp = att.h_prime(mu_R) - att.h_prime(mu_L);
        Mat2 J;
        J[0][0] = cost * att.h_second(mu_L) * dmu;
        J[0][1] = 1.0 - cost * dhp;
        J[1][0] = -1.0 + cost * dhp;
        J[1][1] = -cost * att.h_second(mu_R) * dmu;
        return J;
      };
      auto clamp = [&](Vec2& x) {
        x[0] = std::min(std::max(x[0], -1.0 + 1e-13), -1e-13);
        x[1] = std::min(std::max(x[1], lo_R + 1e-13), 1.0 - 1e-13);
      };

      const double half = 1.0 / (4.0 * cost);
      Vec2 x = {-v - half, -v + half};
      clamp(x);
      bool ok = newton2(residuals, jacobian, clamp, x, opt.tol_root, opt.max_iter);
      if (!ok) {
        // Reseed from a coarse scan of the objective.
        double best_val = -std::numeric_limits<double>::infinity();
        Vec2 seed = x;
        const int n = 200;
        for (int i = 1; i < n; ++i) {
          const double mu_L = -1.0 + static_cast<double>(i) / n;
          for (int j = 1; j < n; ++j) {
            const double mu_R = lo_R + (1.0 - lo_R) * static_cast<double>(j) / n;
            if (mu_L >= 0.0 || mu_R <= lo_R || mu_R >= 1.0) continue;
            const double val = gain_vneg(v, mu_L, mu_R) - cost * info_cost(att, mu_L, mu_R);
            if (val > best_val) {
              best_val = val;
              seed = {mu_L, mu_R};
            }
          }
        }
        if (best_val <= 0.0) return best;  // nothing informative beats the null signal
        x = seed;
        ok = newton2(residuals, jacobian, clamp, x, opt.tol_root, opt.max_iter);
        if (!ok) {
          const Vec2 r = residuals(x);
          throw NumericError("competitive solve: Newton failed, residuals = (" +
                             format_double(r[0]) + ", " + format_double(r[1]) + ") at mu = (" +
                             format_double(x[0]) + ", " + format_double(x[1]) + ")");
        }
      }
      consider(x[0], x[1], false, false);
    }
  }

  if (best.value <= 1e-14) return RawCompetitive{};  // null wins: degenerate
  return best;
}

inline SignalSolveResult pack_competitive(const AttentionSpec& att, double v, double cost,
                                          const RawCompetitive& raw, bool mirrored) {
  SignalSolveResult out;
  out.effective_cost = cost;
  if (!raw.informative) {
    out.regime = SolveRegime::Degenerate;
    return out;
  }
  BinarySignal sig = BinarySignal::make(raw.mu_L, raw.mu_R);
  const double value = gain_vneg(v, raw.mu_L, raw.mu_R);
  const double cost_i = info_cost(att, raw.mu_L, raw.mu_R);
  if (mirrored) sig = mirror(sig);
  out.signal = sig;
  out.attention = cost_i;
  out.value = value;
  out.slack = value - cost * cost_i;
  out.boundary = raw.boundary;
  out.regime = raw.full ? SolveRegime::FullDisclosure : SolveRegime::Interior;
  return out;
}

}  // namespace detail

// Utility-maximizing signal for type k at effective marginal cost `cost`.
// Voters with k > 0 are solved through the mirrored environment, which keeps
// the cross-type symmetry mu_z(k) = -mu_{-z}(-k) exact.
inline SignalSolveResult competitive_signal(const ModelSpec& spec, double a, int k, double cost,
                                            const SolverOptions& opt = {}) {
  if (!(cost > 0.0)) throw ValidationError("competitive_signal: cost must be positive");
  if (!(a >= 0.0 && a <= spec.a_bar))
    throw ValidationError("competitive_signal: policy outside [0, a_bar]");
  const AttentionSpec att = spec.attention();
  const bool mirrored = k > 0;
  const double v = mirrored ? policy_value_diff(spec, -a, a, -k)
                            : policy_value_diff(spec, -a, a, k);
  return detail::pack_competitive(att, v, cost, detail::competitive_vneg(att, v, cost, opt),
                                  mirrored);
}

namespace detail {

// Attention-maximizing personalized signal for the k <= 0 branch.
inline SignalSolveResult personalized_vneg(const AttentionSpec& att, double lambda, double v,
                                           const SolverOptions& opt) {
  SignalSolveResult out;
  const double i_full = att.h(1.0);
  const double v_full = 0.5 * std::max(v + 1.0, 0.0);
  if (v_full >= lambda * i_full) {
    out.signal = full_disclosure_signal();
    out.regime = SolveRegime::FullDisclosure;
    out.effective_cost = 0.0;
    out.attention = i_full;
    out.value = v_full;
    out.slack = v_full - lambda * i_full;
    return out;
  }

  const RawCompetitive at_lambda = competitive_vneg(att, v, lambda, opt);
  if (!at_lambda.informative) {
    out.regime = SolveRegime::Degenerate;
    out.effective_cost = lambda;
    return out;
  }

  struct Eval {
    RawCompetitive raw;
    double g = 0.0;
  };
  auto eval = [&](double lt) {
    Eval e;
    e.raw = competitive_vneg(att, v, lt, opt);
    if (!e.raw.informative) {
      e.g = 0.0;  // boundary case; bisection brackets exclude it in practice
      return e;
    }
    e.g = gain_vneg(v, e.raw.mu_L, e.raw.mu_R) -
          lambda * info_cost(att, e.raw.mu_L, e.raw.mu_R);
    return e;
  };

  const double eps = 1e-10;
  double lo = eps, hi = lambda - eps;
  Eval elo = eval(lo), ehi = eval(hi);
  if (!(elo.g < 0.0) || !(ehi.g > 0.0)) {
    throw NumericError("personalized solve: bisection bracket failure, g = (" +
                       format_double(elo.g) + ", " + format_double(ehi.g) + ")");
  }
  std::vector<std::pair<double, double>> path = {{lo, elo.g}, {hi, ehi.g}};
  Eval emid;
  double mid = hi;
  emid = ehi;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * lambda; ++it) {
    mid = 0.5 * (lo + hi);
    emid = eval(mid);
    path.emplace_back(mid, emid.g);
    if (std::fabs(emid.g) < 1e-13) break;
    if (emid.g < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  if (std::fabs(emid.g) > opt.tol_bind || !emid.raw.informative) {
    emid = eval(hi);
    mid = hi;
    if (std::fabs(emid.g) > opt.tol_bind) {
      throw NumericError("personalized solve: binding residual " + format_double(emid.g) +
                         " exceeds tolerance");
    }
  }
  // The participation gap must be monotone in the effective cost along the
  // path; a violation would mean the inner solves are inconsistent.
  std::sort(path.begin(), path.end());
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (path[i].second < path[i - 1].second - 1e-9) {
      throw NumericError("personalized solve: participation gap not monotone at lambda_tilde=" +
                         format_double(path[i].first));
    }
  }

  out.signal = BinarySignal::make(emid.raw.mu_L, emid.raw.mu_R);
  out.regime = SolveRegime::BindingParticipation;
  out.effective_cost = mid;
  out.attention = info_cost(att, emid.raw.mu_L, emid.raw.mu_R);
  out.value = gain_vneg(v, emid.raw.mu_L, emid.raw.mu_R);
  out.slack = emid.g;
  out.boundary = emid.raw.boundary;
  return out;
}

inline SignalSolveResult mirror_result(const SignalSolveResult& r) {
  SignalSolveResult out = r;
  if (r.signal) out.signal = mirror(*r.signal);
  return out;
}

}  // namespace detail

// Attention-maximizing signal for type k subject to the voter's participation
// constraint. Full disclosure when participation is slack at the true state;
// otherwise the competitive signal at the effective cost where the constraint
// binds; Degenerate when no informative signal attracts the voter.
inline SignalSolveResult optimal_personalized_signal(const ModelSpec& spec, double a, int k,
                                                     const SolverOptions& opt = {}) {
  if (!(a >= 0.0 && a <= spec.a_bar))
    throw ValidationError("optimal_personalized_signal: policy outside [0, a_bar]");
  const AttentionSpec att = spec.attention();
  if (k <= 0) {
    return detail::personalized_vneg(att, spec.lambda, policy_value_diff(spec, -a, a, k), opt);
  }
  return detail::mirror_result(
      detail::personalized_vneg(att, spec.lambda, policy_value_diff(spec, -a, a, -k), opt));
}

enum class ParticipationStatus { Binding, Slack, Excluded };

struct ParticipationEntry {
  int k = 0;
  double value = 0.0;
  double cost = 0.0;  // lambda * I of the offered signal
  ParticipationStatus status = ParticipationStatus::Excluded;
  bool obedient = false;
};

struct BroadcastSolveResult {
  SignalSolveResult solve;   // value/slack refer to the tightest included voter
  int window_lo = 0;
  int window_hi = 0;
  double demand = 0.0;
  double profit = 0.0;
  bool window_tie = false;
  bool excludes_voter = false;
  std::vector<ParticipationEntry> participation;
};

namespace detail {

struct WindowCandidate {
  bool valid = false;
  double mu_L = 0.0, mu_R = 0.0;
  double attention = 0.0;
  SolveRegime regime = SolveRegime::Degenerate;
  double effective_cost = 0.0;
  bool boundary = false;
};

inline double broadcast_gain(const ModelSpec& spec, double a, int k, double mu_L, double mu_R) {
  const double v = policy_value_diff(spec, -a, a, k);
  if (k <= 0) return gain_vneg(v, mu_L, mu_R);
  const double pi_L = mu_R / (mu_R - mu_L);
  return pi_L * std::max(-(v + mu_L), 0.0);
}

// Symmetric representative problem: the most negative mu with
// (1/2) [v(k1) - mu]^+ = lambda h(mu); the other root caps informativeness.
inline WindowCandidate symmetric_window_root(const AttentionSpec& att, double lambda,
                                             double v1) {
  WindowCandidate cand;
  auto psi = [&](double mu) { return lambda * att.h(mu) - 0.5 * (v1 - mu); };
  double mu_min = att.h_prime_inv(-0.5 / lambda);
  if (!(mu_min > -1.0)) mu_min = -1.0 + 1e-12;
  if (mu_min >= 0.0) mu_min = -1e-12;
  if (psi(mu_min) > 0.0) return cand;  // no binary signal satisfies both extremes
  if (psi(-1.0) <= 0.0) {
    cand = {true, -1.0, 1.0, att.h(1.0), SolveRegime::FullDisclosure, 0.0, false};
    return cand;
  }
  const double root = bisect_root(psi, -1.0, mu_min, 1e-15, 300);
  const double m = -root;
  cand.valid = true;
  cand.mu_L = root;
  cand.mu_R = m;
  cand.attention = info_cost(att, root, m);
  cand.regime = SolveRegime::BindingParticipation;
  const double spread = att.h_prime(m) - att.h_prime(root);
  cand.effective_cost = spread > 0.0 ? 1.0 / spread : 0.0;
  return cand;
}

// Asymmetric two-binding representative problem, solved as a constrained
// maximization of I by zooming grid search plus a Newton polish on the
// binding system.
inline WindowCandidate asymmetric_window_solve(const ModelSpec& spec, const AttentionSpec& att,
                                               double a, int k1, int k2,
                                               const SolverOptions& opt) {
  WindowCandidate cand;
  const double lambda = spec.lambda;
  auto feas = [&](double mu_L, double mu_R) {
    const double i = info_cost(att, mu_L, mu_R);
    return std::min(broadcast_gain(spec, a, k1, mu_L, mu_R) - lambda * i,
                    broadcast_gain(spec, a, k2, mu_L, mu_R) - lambda * i);
  };
  double lo_L = -1.0, hi_L = -1e-9, lo_R = 1e-9, hi_R = 1.0;
  Vec2 best{-0.5, 0.5};
  for (int level = 0; level < 6; ++level) {
    const int n = level == 0 ? 240 : 40;
    double found_i = -1.0;
    Vec2 found = best;
    for (int i = 0; i <= n; ++i) {
      const double mu_L = lo_L + (hi_L - lo_L) * i / n;
      if (mu_L >= 0.0 || mu_L < -1.0) continue;
      for (int j = 0; j <= n; ++j) {
        const double mu_R = lo_R + (hi_R - lo_R) * j / n;
        if (mu_R <= 0.0 || mu_R > 1.0) continue;
        if (feas(mu_L, mu_R) < -1e-12) continue;
        const double ic = info_cost(att, mu_L, mu_R);
        if (ic > found_i) {
          found_i = ic;
          found = {mu_L, mu_R};
        }
      }
    }
    if (found_i < 0.0) return cand;  // infeasible window
    best = found;
    const double span_L = (hi_L - lo_L) * 2.0 / n, span_R = (hi_R - lo_R) * 2.0 / n;
    lo_L = std::max(-1.0, best[0] - span_L);
    hi_L = std::min(-1e-12, best[0] + span_L);
    lo_R = std::max(1e-12, best[1] - span_R);
    hi_R = std::min(1.0, best[1] + span_R);
  }
  auto residuals = [&](const Vec2& x) -> Vec2 {
    const double i = info_cost(att, x[0], x[1]);
    return {broadcast_gain(spec, a, k1, x[0], x[1]) - lambda * i,
            broadcast_gain(spec, a, k2, x[0], x[1]) - lambda * i};
  };
  auto jacobian = [&](const Vec2& x) -> Mat2 {
    const double d = 1e-8;
    const Vec2 f0 = residuals(x);
    const Vec2 fL = residuals({x[0] + d, x[1]});
    const Vec2 fR = residuals({x[0], x[1] + d});
    return {{{(fL[0] - f0[0]) / d, (fR[0] - f0[0]) / d},
             {(fL[1] - f0[1]) / d, (fR[1] - f0[1]) / d}}};
  };
  auto clamp = [](Vec2& x) {
    x[0] = std::min(std::max(x[0], -1.0), -1e-12);
    x[1] = std::min(std::max(x[1], 1e-12), 1.0);
  };
  Vec2 x = best;
  if (newton2(residuals, jacobian, clamp, x, opt.tol_root, opt.max_iter)) best = x;
  cand.valid = true;
  cand.mu_L = best[0];
  cand.mu_R = best[1];
  cand.attention = info_cost(att, best[0], best[1]);
  cand.regime = SolveRegime::BindingParticipation;
  const double spread = att.h_prime(best[1]) - att.h_prime(best[0]);
  cand.effective_cost = spread > 0.0 ? 1.0 / spread : 0.0;
  cand.boundary = best[0] <= -1.0 + 1e-12 || best[1] >= 1.0 - 1e-12;
  return cand;
}

inline WindowCandidate from_personalized(const SignalSolveResult& r) {
  WindowCandidate cand;
  if (!r.signal) return cand;
  cand.valid = true;
  cand.mu_L = r.signal->mu_L();
  cand.mu_R = r.signal->mu_R();
  cand.attention = r.attention;
  cand.regime = r.regime;
  cand.effective_cost = r.effective_cost;
  cand.boundary = r.boundary;
  return cand;
}

}  // namespace detail

// Attention-maximizing broadcast signal: enumerates every consecutive
// inclusion window {k1..k2} with k1 <= 0 <= k2 (participation is
// single-peaked in k, so any consumption set has this form), solves the
// window's representative problem and keeps the profit maximizer. Ties go to
// the widest window and are flagged.
inline BroadcastSolveResult optimal_broadcast_signal(const ModelSpec& spec, double a,
                                                     const SolverOptions& opt = {}) {
  if (!(a >= 0.0 && a <= spec.a_bar))
    throw ValidationError("optimal_broadcast_signal: policy outside [0, a_bar]");
  const AttentionSpec att = spec.attention();
  const double lambda = spec.lambda;

  struct Entry {
    int k1, k2;
    detail::WindowCandidate cand;
    double demand = 0.0, profit = 0.0;
  };
  std::vector<Entry> entries;

  for (int k1 = -spec.K; k1 <= 0; ++k1) {
    for (int k2 = 0; k2 <= spec.K; ++k2) {
      const double v1 = policy_value_diff(spec, -a, a, k1);
      std::vector<detail::WindowCandidate> cands;
      const SignalSolveResult pers1 = detail::personalized_vneg(att, lambda, v1, opt);
      if (pers1.signal) {
        const double i1 = pers1.attention;
        if (detail::broadcast_gain(spec, a, k2, pers1.signal->mu_L(), pers1.signal->mu_R()) >=
            lambda * i1 - 1e-12) {
          cands.push_back(detail::from_personalized(pers1));
        }
      }
      if (k2 > 0) {
        const SignalSolveResult pers2 = detail::mirror_result(detail::personalized_vneg(
            att, lambda, policy_value_diff(spec, -a, a, -k2), opt));
        if (pers2.signal) {
          const double i2 = pers2.attention;
          if (detail::broadcast_gain(spec, a, k1, pers2.signal->mu_L(), pers2.signal->mu_R()) >=
              lambda * i2 - 1e-12) {
            cands.push_back(detail::from_personalized(pers2));
          }
        }
        bool have_single = false;
        for (const auto& c : cands) have_single |= c.valid;
        if (!have_single) {
          if (k1 == -k2) {
            cands.push_back(detail::symmetric_window_root(att, lambda, v1));
          } else if (k1 < 0) {
            cands.push_back(detail::asymmetric_window_solve(spec, att, a, k1, k2, opt));
          }
        }
      }
      detail::WindowCandidate best;
      for (const auto& c : cands) {
        if (c.valid && (!best.valid || c.attention > best.attention)) best = c;
      }
      if (!best.valid) continue;
      Entry e{k1, k2, best, 0.0, 0.0};
      for (int k = -spec.K; k <= spec.K; ++k) {
        if (detail::broadcast_gain(spec, a, k, best.mu_L, best.mu_R) >=
            lambda * best.attention - 1e-12) {
          e.demand += spec.q(k);
        }
      }
      e.profit = best.attention * e.demand;
      entries.push_back(e);
    }
  }

  BroadcastSolveResult out;
  if (entries.empty()) {
    out.solve.regime = SolveRegime::Degenerate;
    out.solve.effective_cost = lambda;
    out.excludes_voter = true;
    return out;
  }

  const Entry* best = &entries.front();
  for (const auto& e : entries) {
    const int w_e = e.k2 - e.k1, w_b = best->k2 - best->k1;
    if (e.profit > best->profit + 1e-12 ||
        (std::fabs(e.profit - best->profit) <= 1e-12 && w_e > w_b)) {
      best = &e;
    }
  }
  for (const auto& e : entries) {
    if (&e == best) continue;
    if (std::fabs(e.profit - best->profit) <= 1e-12 &&
        (std::fabs(e.cand.mu_L - best->cand.mu_L) > 1e-9 ||
         std::fabs(e.cand.mu_R - best->cand.mu_R) > 1e-9)) {
      out.window_tie = true;
    }
  }

  const auto& c = best->cand;
  out.window_lo = best->k1;
  out.window_hi = best->k2;
  out.demand = best->demand;
  out.profit = best->profit;
  out.solve.signal = BinarySignal::make(c.mu_L, c.mu_R);
  out.solve.regime = c.regime;
  out.solve.effective_cost = c.effective_cost;
  out.solve.attention = c.attention;
  out.solve.boundary = c.boundary;

  double min_included_value = std::numeric_limits<double>::infinity();
  for (int k = -spec.K; k <= spec.K; ++k) {
    ParticipationEntry pe;
    pe.k = k;
    pe.value = detail::broadcast_gain(spec, a, k, c.mu_L, c.mu_R);
    pe.cost = lambda * c.attention;
    if (pe.value >= pe.cost - 1e-12) {
      pe.status = std::fabs(pe.value - pe.cost) <= opt.tol_bind ? ParticipationStatus::Binding
                                                                : ParticipationStatus::Slack;
      min_included_value = std::min(min_included_value, pe.value);
    } else {
      pe.status = ParticipationStatus::Excluded;
      out.excludes_voter = true;
    }
    pe.obedient = check_strict_obedience(*out.solve.signal, spec, a, k);
    out.participation.push_back(pe);
  }
  out.solve.value = min_included_value;
  out.solve.slack = min_included_value - lambda * c.attention;
  return out;
}

// Marginal solve for one voter under the given technology. Broadcast callers
// that need the participation report should use optimal_broadcast_signal.
inline SignalSolveResult solve_signal(const ModelSpec& spec, Technology tech, double a, int k,
                                      const SolverOptions& opt = {}) {
  switch (tech) {
    case Technology::Personalized: return optimal_personalized_signal(spec, a, k, opt);
    case Technology::Competitive: return competitive_signal(spec, a, k, spec.lambda, opt);
    case Technology::Broadcast: default: return optimal_broadcast_signal(spec, a, opt).solve;
  }
}

struct Assumption2Entry {
  double a = 0.0;
  int k = 0;
  bool pass = true;
  std::string diagnostic;
};

struct Assumption2Report {
  bool pass = true;
  std::string diagnostic;  // first failure
  std::vector<Assumption2Entry> failures;
};

namespace detail {

inline bool interior_signal(const Signal& s) {
  return s && s->mu_L() > -1.0 && s->mu_R() < 1.0;
}

inline void a2_record(Assumption2Report& rep, double a, int k, const std::string& why) {
  rep.pass = false;
  if (rep.diagnostic.empty()) rep.diagnostic = why;
  rep.failures.push_back({a, k, false, why});
}

}  // namespace detail

// Uniform strict obedience, checked on a policy grid: every market segment's
// optimal signal is nondegenerate, consumed by everyone in it, with interior
// posteriors and strictly obedient consumers.
inline Assumption2Report assumption2_check(const ModelSpec& spec, Technology tech,
                                           int grid_n = 9, const SolverOptions& opt = {}) {
  Assumption2Report rep;
  for (double a : linspace(0.0, spec.a_bar, grid_n)) {
    if (tech == Technology::Broadcast) {
      const BroadcastSolveResult b = optimal_broadcast_signal(spec, a, opt);
      if (b.solve.regime == SolveRegime::Degenerate) {
        detail::a2_record(rep, a, 0, "degenerate signal");
        continue;
      }
      if (b.excludes_voter) detail::a2_record(rep, a, 0, "voter excluded");
      if (!detail::interior_signal(b.solve.signal) || b.solve.boundary ||
          b.solve.regime == SolveRegime::FullDisclosure) {
        detail::a2_record(rep, a, 0, "posterior at boundary");
      }
      for (const auto& pe : b.participation) {
        if (pe.status != ParticipationStatus::Excluded && !pe.obedient)
          detail::a2_record(rep, a, pe.k, "obedience violated");
      }
    } else {
      for (int k = -spec.K; k <= spec.K; ++k) {
        const SignalSolveResult r = solve_signal(spec, tech, a, k, opt);
        if (r.regime == SolveRegime::Degenerate) {
          detail::a2_record(rep, a, k, "degenerate signal");
          continue;
        }
        if (!detail::interior_signal(r.signal) || r.boundary ||
            r.regime == SolveRegime::FullDisclosure) {
          detail::a2_record(rep, a, k, "posterior at boundary");
          continue;
        }
        if (!check_strict_obedience(*r.signal, spec, a, k))
          detail::a2_record(rep, a, k, "obedience violated");
      }
    }
  }
  return rep;
}

struct SkewnessTypeRow {
  int k = 0;
  double mu_L = 0.0, mu_R = 0.0, pi_R = 0.0, attention = 0.0;
  bool obedient = false;
};

struct SkewnessReport {
  bool pass = true;
  double broadcast_mu_L = 0.0, broadcast_mu_R = 0.0, broadcast_pi_R = 0.0;
  double broadcast_attention = 0.0;
  bool broadcast_symmetric = false;
  bool median_symmetric = false;
  bool extreme_skew_signs = false;
  bool cross_type_mirror = false;
  bool strict_obedience = false;
  bool bayes_plausible = false;
  bool broadcast_less_attentive = false;
  std::vector<SkewnessTypeRow> personalized;
};

// Structured verification of the skewness characterization: broadcast
// symmetry, median symmetry, own-party bias of extreme voters, cross-type
// mirror symmetry, obedience, Bayes plausibility and the attention ranking.
inline SkewnessReport skewness_report(const ModelSpec& spec, double a,
                                      const SolverOptions& opt = {}) {
  SkewnessReport rep;
  const BroadcastSolveResult b = optimal_broadcast_signal(spec, a, opt);
  if (!b.solve.signal) throw NumericError("skewness_report: degenerate broadcast signal");
  rep.broadcast_mu_L = b.solve.signal->mu_L();
  rep.broadcast_mu_R = b.solve.signal->mu_R();
  rep.broadcast_pi_R = b.solve.signal->pi_R();
  rep.broadcast_attention = b.solve.attention;
  rep.broadcast_symmetric = std::fabs(rep.broadcast_pi_R - 0.5) <= 1e-9 &&
                            std::fabs(rep.broadcast_mu_L + rep.broadcast_mu_R) <= 1e-9;

  std::vector<SignalSolveResult> pers(static_cast<std::size_t>(spec.n_types()));
  for (int k = -spec.K; k <= spec.K; ++k)
    pers[static_cast<std::size_t>(spec.index(k))] = optimal_personalized_signal(spec, a, k, opt);

  rep.median_symmetric = true;
  rep.extreme_skew_signs = true;
  rep.cross_type_mirror = true;
  rep.strict_obedience = true;
  rep.bayes_plausible = true;
  rep.broadcast_less_attentive = true;
  const AttentionSpec att = spec.attention();
  for (int k = -spec.K; k <= spec.K; ++k) {
    const auto& r = pers[static_cast<std::size_t>(spec.index(k))];
    if (!r.signal) throw NumericError("skewness_report: degenerate personalized signal");
    SkewnessTypeRow row;
    row.k = k;
    row.mu_L = r.signal->mu_L();
    row.mu_R = r.signal->mu_R();
    row.pi_R = r.signal->pi_R();
    row.attention = r.attention;
    row.obedient = check_strict_obedience(*r.signal, spec, a, k);
    rep.personalized.push_back(row);

    if (k == 0 &&
        (std::fabs(row.pi_R - 0.5) > 1e-9 || std::fabs(row.mu_L + row.mu_R) > 1e-9)) {
      rep.median_symmetric = false;
    }
    if (a > 0.0) {
      if (k < 0 && !(row.pi_R < 0.5 && -row.mu_L < row.mu_R)) rep.extreme_skew_signs = false;
      if (k > 0 && !(row.pi_R > 0.5 && -row.mu_L > row.mu_R)) rep.extreme_skew_signs = false;
    }
    const auto& m = pers[static_cast<std::size_t>(spec.index(-k))];
    if (std::fabs(-m.signal->mu_L() - r.signal->mu_R()) > 1e-9) rep.cross_type_mirror = false;
    if (!row.obedient) rep.strict_obedience = false;
    const double bp = r.signal->pi_L() * row.mu_L + r.signal->pi_R() * row.mu_R;
    if (std::fabs(bp) > 1e-12) rep.bayes_plausible = false;
    if (!(b.solve.attention < r.attention + 1e-12)) rep.broadcast_less_attentive = false;
    if (a > 0.0 && !(b.solve.attention < r.attention)) rep.broadcast_less_attentive = false;
    (void)att;
  }
  const double bbp = b.solve.signal->pi_L() * rep.broadcast_mu_L +
                     b.solve.signal->pi_R() * rep.broadcast_mu_R;
  if (std::fabs(bbp) > 1e-12) rep.bayes_plausible = false;

  rep.pass = rep.broadcast_symmetric && rep.median_symmetric && rep.extreme_skew_signs &&
             rep.cross_type_mirror && rep.strict_obedience && rep.bayes_plausible &&
             rep.broadcast_less_attentive;
  return rep;
}

}  // namespace nari
