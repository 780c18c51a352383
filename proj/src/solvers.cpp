#include "inertial/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>

#include "inertial/rng.hpp"

namespace inertial {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

constexpr double kCycleMatchTol = 1e-10;

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::CycleDetected: return "CycleDetected";
    case SolveStatus::PreconditionViolated: return "PreconditionViolated";
  }
  return "unknown";
}

SimplexPoint project_simplex(const std::vector<double>& v, double mass) {
  if (v.empty()) throw DimensionMismatch("project_simplex: empty input");
  if (!std::isfinite(mass) || mass <= 0.0) {
    throw InvalidSpec("project_simplex: mass must be positive");
  }
  for (double e : v) {
    if (!std::isfinite(e)) {
      throw InvalidSpec("project_simplex: non-finite input");
    }
  }
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    const double candidate = (running - mass) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    x[i] = std::max(v[i] - theta, 0.0);
  }
  return SimplexPoint(std::move(x), mass);
}

namespace detail {

double sum_squares(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return s;
}

double min_of(const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity();
  for (double e : v) lo = std::min(lo, e);
  return lo;
}

double gap_from(const std::vector<double>& f, const std::vector<double>& x,
                double gamma) {
  double dot = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) dot += f[i] * x[i];
  return dot - gamma * min_of(f);
}

bool states_match(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > kCycleMatchTol) return false;
  }
  return true;
}

BlockPlan block_transfers([[maybe_unused]] const std::vector<double>& u,
                          [[maybe_unused]] const SwitchingCosts& costs,
                          const std::vector<double>& x,
                          const EnvyReport& envy,
                          const RedistributionPolicy& policy) {
  BlockPlan plan;
  plan.delta.assign(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& targets = envy.sets[i];
    if (targets.empty()) continue;
    const double held = x[i];
    double outflow = 0.0;
    std::vector<double> amounts(targets.size(), 0.0);
    switch (policy.kind) {
      case RedistributionPolicy::Kind::EqualShare: {
        const double each =
            policy.tau * held / static_cast<double>(targets.size());
        for (auto& a : amounts) a = each;
        break;
      }
      case RedistributionPolicy::Kind::PerTarget: {
        for (auto& a : amounts) a = policy.tau * held;
        break;
      }
      case RedistributionPolicy::Kind::UtilityWeighted: {
        const auto& wit = envy.witnesses[i];
        double total_margin = 0.0;
        for (const auto& w : wit) {
          total_margin += (w.u_target - w.cost) - w.u_source;
        }
        for (std::size_t t = 0; t < wit.size(); ++t) {
          const double margin = (wit[t].u_target - wit[t].cost) -
                                wit[t].u_source;
          amounts[t] = policy.tau * held * (margin / total_margin);
        }
        break;
      }
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const double amount = amounts[t];
      if (!(amount >= 0.0)) {
        throw BoundViolation("transfer " + std::to_string(i + 1) + " -> " +
                             std::to_string(targets[t] + 1) +
                             " is negative: " + fmt(amount));
      }
      outflow += amount;
      plan.transfers.push_back(
          {static_cast<int>(i), targets[t], amount});
      plan.delta[i] -= amount;
      plan.delta[static_cast<std::size_t>(targets[t])] += amount;
      plan.moved += amount;
    }
    if (outflow > held + 1e-12 * std::max(1.0, held)) {
      throw BoundViolation("action " + std::to_string(i + 1) + " gives up " +
                           fmt(outflow) + " holding only " + fmt(held));
    }
  }
  return plan;
}

}  // namespace detail

namespace {

std::vector<double> apply_delta(const std::vector<double>& x,
                                const std::vector<double>& delta) {
  std::vector<double> next(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    next[i] = x[i] + delta[i];
    if (next[i] < 0.0) next[i] = 0.0;  // rounding residue of full outflow
  }
  return next;
}

// Sequential sweep: shuffled action order, state re-read after each action.
detail::BlockPlan async_sweep(const PopulationGame& game,
                              const std::vector<double>& x,
                              const RedistributionPolicy& policy,
                              double envy_tol, Rng& rng) {
  const std::size_t n = x.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<double> current = x;
  detail::BlockPlan plan;
  plan.delta.assign(n, 0.0);
  for (int source : order) {
    const std::size_t i = static_cast<std::size_t>(source);
    if (!(current[i] > envy_tol)) continue;
    const std::vector<double> u = evaluate_utilities(game, current);
    EnvyReport report;
    report.sets.resize(n);
    report.witnesses.resize(n);
    for (int j = 0; j < static_cast<int>(n); ++j) {
      if (j == source) continue;
      const double c = game.costs.at(source, j);
      if (u[i] < u[static_cast<std::size_t>(j)] - c - envy_tol) {
        report.sets[i].push_back(j);
        report.witnesses[i].push_back(
            EnvyWitness{j, u[i], u[static_cast<std::size_t>(j)], c});
      }
    }
    if (report.sets[i].empty()) continue;
    const detail::BlockPlan local =
        detail::block_transfers(u, game.costs, current, report, policy);
    current = apply_delta(current, local.delta);
    plan.transfers.insert(plan.transfers.end(), local.transfers.begin(),
                          local.transfers.end());
    plan.moved += local.moved;
  }
  for (std::size_t i = 0; i < n; ++i) plan.delta[i] = current[i] - x[i];
  return plan;
}

struct Recorder {
  bool on = false;
  std::vector<TrajectoryRecord<SimplexPoint>>* out = nullptr;
  std::int64_t last_k = -1;

  static bool wanted(std::int64_t k) { return k <= 100000 || k % 100 == 0; }

  void push(std::int64_t k, const TrajectoryRecord<SimplexPoint>& rec,
            bool force = false) {
    if (!on || (!force && !wanted(k)) || k == last_k) return;
    out->push_back(rec);
    last_k = k;
  }
};

TrajectoryRecord<SimplexPoint> make_record(const PopulationGame& game,
                                           std::int64_t k,
                                           const std::vector<double>& x,
                                           double mass, double moved) {
  const std::vector<double> u = evaluate_utilities(game, x);
  const std::vector<double> f = operator_f_values(u, game.costs);
  return TrajectoryRecord<SimplexPoint>{
      k, SimplexPoint(x, mass), detail::min_of(u),
      detail::gap_from(f, x, game.gamma), moved};
}

void check_start(const PopulationGame& game, const SimplexPoint& x0) {
  if (x0.size() != game.n) {
    throw DimensionMismatch("solver: start point has " +
                            std::to_string(x0.size()) + " entries for n = " +
                            std::to_string(game.n));
  }
  if (std::abs(x0.mass() - game.gamma) >
      kSimplexTol * std::max(1.0, game.gamma)) {
    throw MassMismatch("solver: start mass " + fmt(x0.mass()) +
                       " != gamma " + fmt(game.gamma));
  }
}

}  // namespace

std::vector<std::string> projection_preconditions(const PopulationGame& game,
                                                  const ProjectionConfig& cfg) {
  std::vector<std::string> issues;
  if (!std::isfinite(cfg.rho) || cfg.rho <= 0.0) {
    issues.push_back("rho must be positive, got " + fmt(cfg.rho));
  }
  if (game.coupled) {
    issues.push_back("utilities must be separable");
  } else {
    for (int i = 0; i < static_cast<int>(game.utilities.size()); ++i) {
      if (!non_increasing(game.utilities[static_cast<std::size_t>(i)])) {
        issues.push_back("utility " + std::to_string(i + 1) +
                         " is increasing; the ascent guarantee needs "
                         "non-increasing utilities");
      }
    }
    const double L = lipschitz_bounds(game).global;
    if (L > 0.0 && std::isfinite(cfg.rho) && !(cfg.rho < 2.0 / L)) {
      issues.push_back("rho = " + fmt(cfg.rho) + " is not below 2/L = " +
                       fmt(2.0 / L));
    }
  }
  return issues;
}

std::vector<std::string> better_response_preconditions(
    const PopulationGame& game, const RedistributionPolicy& policy,
    const BetterResponseConfig& cfg) {
  std::vector<std::string> issues;
  if (!std::isfinite(policy.tau) || policy.tau <= 0.0 || policy.tau > 1.0) {
    issues.push_back("tau must lie in (0, 1], got " + fmt(policy.tau));
  }
  if (policy.kind == RedistributionPolicy::Kind::PerTarget && game.n > 1 &&
      policy.tau * (game.n - 1) > 1.0 + 1e-12) {
    issues.push_back("per-target policy needs tau*(n-1) <= 1, got " +
                     fmt(policy.tau * (game.n - 1)));
  }
  if (!std::isfinite(cfg.epsilon) || cfg.epsilon <= 0.0) {
    issues.push_back("epsilon must be positive, got " + fmt(cfg.epsilon));
  }
  if (!(cfg.envy_tol > 0.0)) {
    issues.push_back("envy_tol must be positive");
  }
  if (cfg.cycle_window < 1) {
    issues.push_back("cycle_window must be at least 1");
  }
  if (game.coupled) {
    issues.push_back("utilities must be separable");
    return issues;
  }
  for (int i = 0; i < static_cast<int>(game.utilities.size()); ++i) {
    if (!non_increasing(game.utilities[static_cast<std::size_t>(i)])) {
      issues.push_back("utility " + std::to_string(i + 1) +
                       " is increasing; the minimum-utility ascent argument "
                       "needs non-increasing utilities");
    }
  }
  const double c_min = game.costs.min_off_diagonal();
  if (!(c_min > 0.0)) {
    issues.push_back(
        "ZeroCMin: minimum off-diagonal switching cost is zero; the inflow "
        "cap c_min/L - epsilon is empty");
    return issues;
  }
  const double L = lipschitz_bounds(game).global;
  const double cap =
      L > 0.0 ? c_min / L : std::numeric_limits<double>::infinity();
  if (std::isfinite(cap) &&
      policy.tau * game.gamma >
          cap - cfg.epsilon + 1e-12 * std::max(1.0, cap)) {
    issues.push_back("tau*gamma = " + fmt(policy.tau * game.gamma) +
                     " exceeds c_min/L - epsilon = " + fmt(cap - cfg.epsilon));
  }
  return issues;
}

SolveResult<SimplexPoint> projection_solve(const PopulationGame& game,
                                           const SimplexPoint& x0,
                                           const ProjectionConfig& cfg) {
  check_start(game, x0);
  SolveResult<SimplexPoint> res{SolveStatus::MaxIter, x0, 0, 0.0, false,
                                std::nullopt, "", {}};
  {
    std::vector<std::string> issues;
    if (cfg.enforce_guarantee) {
      issues = projection_preconditions(game, cfg);
    } else if (!std::isfinite(cfg.rho) || cfg.rho <= 0.0) {
      issues.push_back("rho must be positive, got " + fmt(cfg.rho));
    }
    if (!issues.empty()) {
      res.status = SolveStatus::PreconditionViolated;
      res.message = join(issues);
      res.gap_final = vi_gap(game, x0);
      res.verified_inertial = false;
      return res;
    }
  }

  const double mass = x0.mass();
  const double L = lipschitz_bounds(game).global;
  const double nash_tol = 10.0 * cfg.tol * std::max(1.0, L);
  std::vector<double> x = x0.values();
  Recorder rec{cfg.record_trajectory, &res.trajectory, -1};
  rec.push(0, make_record(game, 0, x, mass, 0.0));

  std::int64_t k = 0;
  SolveStatus status = SolveStatus::MaxIter;
  while (k < cfg.max_iter) {
    const std::vector<double> u = evaluate_utilities(game, x);
    std::vector<double> target(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      target[i] = x[i] + cfg.rho * u[i];
    }
    const std::vector<double> next = project_simplex(target, mass).values();
    double moved = 0.0;
    double dist2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = next[i] - x[i];
      dist2 += d * d;
      if (d > 0.0) moved += d;
    }
    if (std::sqrt(dist2) <= cfg.tol) {
      // x is a fixed point within tolerance; accept only if it verifies.
      if (is_nash(game, SimplexPoint(x, mass), nash_tol).nash) {
        status = SolveStatus::Converged;
        break;
      }
    }
    x = next;
    ++k;
    rec.push(k, make_record(game, k, x, mass, moved));
  }

  res.status = status;
  res.iterations = k;
  res.x_final = SimplexPoint(x, mass);
  rec.push(k, make_record(game, k, x, mass, 0.0), /*force=*/true);
  res.gap_final = vi_gap(game, res.x_final);
  res.verified_inertial = is_inertial(game, res.x_final).inertial;
  return res;
}

StepResult better_response_step(const PopulationGame& game,
                                const SimplexPoint& x,
                                const RedistributionPolicy& policy,
                                const BetterResponseConfig& cfg) {
  check_start(game, x);
  const std::vector<double> u = evaluate_utilities(game, x);
  const EnvyReport envy =
      envy_sets_from_utilities(u, game.costs, x.values(), cfg.envy_tol);
  const detail::BlockPlan plan =
      detail::block_transfers(u, game.costs, x.values(), envy, policy);
  return StepResult{SimplexPoint(apply_delta(x.values(), plan.delta),
                                 x.mass()),
                    plan.transfers};
}

BoundCheck check_transfer_bounds(const PopulationGame& game,
                                 const SimplexPoint& x,
                                 const std::vector<Transfer>& transfers,
                                 double tau, double epsilon, double envy_tol) {
  BoundCheck out;
  const auto flag = [&out](const std::string& what, double margin) {
    out.ok = false;
    out.issues.push_back({what, margin});
  };
  const EnvyReport envy = envy_sets(game, x, envy_tol);
  const std::size_t n = static_cast<std::size_t>(game.n);
  std::vector<double> outflow(n, 0.0);
  std::vector<double> inflow(n, 0.0);
  for (const auto& t : transfers) {
    if (t.from < 0 || t.to < 0 || t.from >= game.n || t.to >= game.n ||
        t.from == t.to) {
      flag("transfer endpoints out of range", 0.0);
      continue;
    }
    if (t.amount < 0.0) {
      flag("negative transfer " + std::to_string(t.from + 1) + " -> " +
               std::to_string(t.to + 1),
           -t.amount);
      continue;
    }
    const auto& set = envy.sets[static_cast<std::size_t>(t.from)];
    if (std::find(set.begin(), set.end(), t.to) == set.end()) {
      flag("transfer " + std::to_string(t.from + 1) + " -> " +
               std::to_string(t.to + 1) + " is not an envy edge",
           t.amount);
    }
    outflow[static_cast<std::size_t>(t.from)] += t.amount;
    inflow[static_cast<std::size_t>(t.to)] += t.amount;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double held = x[static_cast<int>(i)];
    const double slack = 1e-12 * std::max(1.0, held);
    if (!envy.sets[i].empty()) {
      if (outflow[i] < tau * held - slack) {
        flag("action " + std::to_string(i + 1) + " moves less than tau*x",
             tau * held - outflow[i]);
      }
    }
    if (outflow[i] > held + slack) {
      flag("action " + std::to_string(i + 1) + " moves more than it holds",
           outflow[i] - held);
    }
  }
  const double c_min = game.costs.min_off_diagonal();
  const double L = lipschitz_bounds(game).global;
  if (L > 0.0) {
    const double cap = c_min / L - epsilon;
    for (std::size_t j = 0; j < n; ++j) {
      if (inflow[j] > cap + 1e-12 * std::max(1.0, std::abs(cap))) {
        flag("inflow into action " + std::to_string(j + 1) +
                 " exceeds c_min/L - epsilon",
             inflow[j] - cap);
      }
    }
  }
  return out;
}

SolveResult<SimplexPoint> better_response_solve(
    const PopulationGame& game, const SimplexPoint& x0,
    const RedistributionPolicy& policy, const BetterResponseConfig& cfg) {
  check_start(game, x0);
  SolveResult<SimplexPoint> res{SolveStatus::MaxIter, x0, 0, 0.0, false,
                                std::nullopt, "", {}};
  if (!cfg.unsafe_allow_bound_violation) {
    const auto issues = better_response_preconditions(game, policy, cfg);
    if (!issues.empty()) {
      res.status = SolveStatus::PreconditionViolated;
      res.message = join(issues);
      res.gap_final = vi_gap(game, x0);
      return res;
    }
  }

  const double mass = x0.mass();
  std::vector<double> x = x0.values();
  Recorder rec{cfg.record_trajectory, &res.trajectory, -1};
  rec.push(0, make_record(game, 0, x, mass, 0.0));
  std::deque<std::vector<double>> window;
  window.push_back(x);
  Rng sweep_rng(cfg.async_seed);

  std::int64_t k = 0;
  SolveStatus status = SolveStatus::MaxIter;
  while (true) {
    const std::vector<double> u = evaluate_utilities(game, x);
    const EnvyReport envy =
        envy_sets_from_utilities(u, game.costs, x, cfg.envy_tol);
    if (envy.all_empty()) {
      status = SolveStatus::Converged;
      break;
    }
    if (k >= cfg.max_iter) break;  // status stays MaxIter

    const detail::BlockPlan plan =
        cfg.async ? async_sweep(game, x, policy, cfg.envy_tol, sweep_rng)
                  : detail::block_transfers(u, game.costs, x, envy, policy);
    const std::vector<double> next = apply_delta(x, plan.delta);
    const double disp = std::sqrt(detail::sum_squares(plan.delta));

    bool stop = false;
    if (disp <= cfg.tol) {
      // Sub-tolerance movement: converged only if the new state verifies.
      const std::vector<double> u_next = evaluate_utilities(game, next);
      if (envy_sets_from_utilities(u_next, game.costs, next, cfg.envy_tol)
              .all_empty()) {
        status = SolveStatus::Converged;
        stop = true;
      }
    } else {
      // Recurrence scan skips the immediate predecessor; sub-tolerance
      // oscillation is indistinguishable from slow convergence and is left
      // to the stopping rule above.
      for (std::size_t back = 2; back <= window.size(); ++back) {
        const std::size_t idx = window.size() - back;
        if (detail::states_match(next, window[idx])) {
          status = SolveStatus::CycleDetected;
          res.cycle_period = static_cast<std::int64_t>(back);
          stop = true;
          break;
        }
      }
    }

    x = next;
    ++k;
    window.push_back(x);
    if (window.size() > static_cast<std::size_t>(cfg.cycle_window)) {
      window.pop_front();
    }
    rec.push(k, make_record(game, k, x, mass, plan.moved));
    if (stop) break;
  }

  res.status = status;
  res.iterations = k;
  res.x_final = SimplexPoint(x, mass);
  rec.push(k, make_record(game, k, x, mass, 0.0), /*force=*/true);
  res.gap_final = vi_gap(game, res.x_final);
  res.verified_inertial = is_inertial(game, res.x_final, cfg.envy_tol).inertial;
  return res;
}

double potential_value(const PopulationGame& game,
                       const std::vector<double>& x) {
  if (game.coupled) {
    throw NonSeparable("potential_value: coupled games have no separable "
                       "potential");
  }
  if (x.size() != game.utilities.size()) {
    throw DimensionMismatch("potential_value: point/game size mismatch");
  }
  double theta = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    theta += integral(game.utilities[i], std::max(x[i], 0.0));
  }
  return theta;
}

double potential_value(const PopulationGame& game, const SimplexPoint& x) {
  return potential_value(game, x.values());
}

}  // namespace inertial
