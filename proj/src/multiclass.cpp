#include "inertial/multiclass.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>

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

void check_shape(const MultiClassGame& mc, const StackedPoint& xs) {
  if (xs.num_classes() != mc.num_classes) {
    throw DimensionMismatch("stacked point has " +
                            std::to_string(xs.num_classes()) +
                            " blocks for " + std::to_string(mc.num_classes) +
                            " classes");
  }
  for (int a = 0; a < xs.num_classes(); ++a) {
    if (xs.block(a).size() != mc.n) {
      throw DimensionMismatch("class " + std::to_string(a + 1) + " block has " +
                              std::to_string(xs.block(a).size()) +
                              " entries for n = " + std::to_string(mc.n));
    }
  }
}

void check_masses(const MultiClassGame& mc, const StackedPoint& xs) {
  check_shape(mc, xs);
  for (int a = 0; a < mc.num_classes; ++a) {
    const double gamma = mc.gammas[static_cast<std::size_t>(a)];
    if (std::abs(xs.block(a).mass() - gamma) >
        kSimplexTol * std::max(1.0, gamma)) {
      throw MassMismatch("class " + std::to_string(a + 1) + " mass " +
                         fmt(xs.block(a).mass()) + " != gamma " + fmt(gamma));
    }
  }
}

std::vector<double> reduce_raw(const std::vector<std::vector<double>>& blocks,
                               std::size_t n) {
  std::vector<double> r(n, 0.0);
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < n; ++i) r[i] += b[i];
  }
  return r;
}

std::vector<double> apply_delta(const std::vector<double>& x,
                                const std::vector<double>& delta) {
  std::vector<double> next(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    next[i] = x[i] + delta[i];
    if (next[i] < 0.0) next[i] = 0.0;
  }
  return next;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& blocks) {
  std::vector<double> flat;
  for (const auto& b : blocks) flat.insert(flat.end(), b.begin(), b.end());
  return flat;
}

struct MultiRecorder {
  bool on = false;
  std::vector<TrajectoryRecord<StackedPoint>>* out = nullptr;
  std::int64_t last_k = -1;

  static bool wanted(std::int64_t k) { return k <= 100000 || k % 100 == 0; }

  void push(std::int64_t k, TrajectoryRecord<StackedPoint> rec,
            bool force = false) {
    if (!on || (!force && !wanted(k)) || k == last_k) return;
    out->push_back(std::move(rec));
    last_k = k;
  }
};

StackedPoint stack(const std::vector<std::vector<double>>& blocks,
                   const std::vector<double>& masses) {
  std::vector<SimplexPoint> pts;
  pts.reserve(blocks.size());
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    pts.emplace_back(blocks[a], masses[a]);
  }
  return StackedPoint(std::move(pts));
}

TrajectoryRecord<StackedPoint> make_record(
    const std::vector<PopulationGame>& class_games,
    const std::vector<double>& gammas, std::int64_t k,
    const std::vector<std::vector<double>>& blocks,
    const std::vector<double>& masses, double moved) {
  const std::vector<double> reduced =
      reduce_raw(blocks, blocks.front().size());
  double mu = std::numeric_limits<double>::infinity();
  double gap = 0.0;
  for (std::size_t a = 0; a < class_games.size(); ++a) {
    const std::vector<double> u = evaluate_utilities(class_games[a], reduced);
    const std::vector<double> f = operator_f_values(u, class_games[a].costs);
    mu = std::min(mu, detail::min_of(u));
    gap += detail::gap_from(f, blocks[a], gammas[a]);
  }
  return TrajectoryRecord<StackedPoint>{k, stack(blocks, masses), mu, gap,
                                        moved};
}

}  // namespace

StackedPoint::StackedPoint(std::vector<SimplexPoint> blocks)
    : blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) {
    if (b.size() != blocks_.front().size()) {
      throw DimensionMismatch("stacked point blocks differ in size: " +
                              std::to_string(blocks_.front().size()) +
                              " vs " + std::to_string(b.size()));
    }
  }
}

int StackedPoint::block_size() const {
  return blocks_.empty() ? 0 : blocks_.front().size();
}

std::vector<double> StackedPoint::flat() const {
  std::vector<double> out;
  for (const auto& b : blocks_) {
    out.insert(out.end(), b.values().begin(), b.values().end());
  }
  return out;
}

PopulationGame single_class(const MultiClassGame& mc, int a) {
  if (a < 0 || a >= mc.num_classes) {
    throw DimensionMismatch("class index " + std::to_string(a + 1) +
                            " out of range for " +
                            std::to_string(mc.num_classes) + " classes");
  }
  return PopulationGame{mc.n, mc.utilities[static_cast<std::size_t>(a)],
                        mc.costs[static_cast<std::size_t>(a)],
                        mc.gammas[static_cast<std::size_t>(a)], false};
}

MultiClassGame as_multiclass(const PopulationGame& game) {
  return MultiClassGame{1, game.n, {game.gamma}, {game.utilities},
                        {game.costs}};
}

std::vector<Violation> validate_multiclass(const MultiClassGame& mc) {
  std::vector<Violation> out;
  if (mc.num_classes < 1) {
    out.push_back({ViolationKind::BadActionCount, -1, -1,
                   "class count must be at least 1, got " +
                       std::to_string(mc.num_classes)});
    return out;
  }
  const auto classes = static_cast<std::size_t>(mc.num_classes);
  if (mc.gammas.size() != classes || mc.utilities.size() != classes ||
      mc.costs.size() != classes) {
    out.push_back({ViolationKind::UtilityCount, -1, -1,
                   "per-class containers must all have " +
                       std::to_string(mc.num_classes) + " entries, got " +
                       std::to_string(mc.gammas.size()) + " masses, " +
                       std::to_string(mc.utilities.size()) + " utility rows, " +
                       std::to_string(mc.costs.size()) + " cost matrices"});
    return out;
  }
  for (int a = 0; a < mc.num_classes; ++a) {
    const std::string prefix = "class " + std::to_string(a + 1) + ": ";
    PopulationGame game;
    try {
      game = single_class(mc, a);
    } catch (const DimensionMismatch& e) {
      out.push_back({ViolationKind::CostShape, -1, -1, prefix + e.what()});
      continue;
    }
    for (Violation v : validate_game(game)) {
      v.message = prefix + v.message;
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<double> reduce(const StackedPoint& xs) {
  if (xs.num_classes() == 0) {
    throw DimensionMismatch("reduce: empty stacked point");
  }
  std::vector<double> r(static_cast<std::size_t>(xs.block_size()), 0.0);
  for (int a = 0; a < xs.num_classes(); ++a) {
    const auto& vals = xs.block(a).values();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += vals[i];
  }
  return r;
}

std::vector<double> operator_f_multi(const MultiClassGame& mc,
                                     const StackedPoint& xs) {
  check_masses(mc, xs);
  const std::vector<double> reduced = reduce(xs);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(mc.num_classes * mc.n));
  for (int a = 0; a < mc.num_classes; ++a) {
    const PopulationGame game = single_class(mc, a);
    const std::vector<double> u = evaluate_utilities(game, reduced);
    const std::vector<double> f = operator_f_values(u, game.costs);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

MultiInertialVerdict is_multiclass_inertial(const MultiClassGame& mc,
                                            const StackedPoint& xs,
                                            double tol) {
  check_masses(mc, xs);
  const std::vector<double> reduced = reduce(xs);
  MultiInertialVerdict verdict;
  verdict.inertial = true;
  verdict.reports.reserve(static_cast<std::size_t>(mc.num_classes));
  for (int a = 0; a < mc.num_classes; ++a) {
    const PopulationGame game = single_class(mc, a);
    const std::vector<double> u = evaluate_utilities(game, reduced);
    EnvyReport report =
        envy_sets_from_utilities(u, game.costs, xs.block(a).values(), tol);
    verdict.inertial = verdict.inertial && report.all_empty();
    verdict.reports.push_back(std::move(report));
  }
  return verdict;
}

double vi_gap_multi(const MultiClassGame& mc, const StackedPoint& xs) {
  check_masses(mc, xs);
  const std::vector<double> reduced = reduce(xs);
  double gap = 0.0;
  for (int a = 0; a < mc.num_classes; ++a) {
    const PopulationGame game = single_class(mc, a);
    const std::vector<double> u = evaluate_utilities(game, reduced);
    const std::vector<double> f = operator_f_values(u, game.costs);
    gap += detail::gap_from(f, xs.block(a).values(), game.gamma);
  }
  return gap;
}

std::vector<std::string> better_response_multi_preconditions(
    const MultiClassGame& mc, const RedistributionPolicy& policy,
    const BetterResponseConfig& cfg) {
  std::vector<std::string> issues;
  if (!std::isfinite(policy.tau) || policy.tau <= 0.0 || policy.tau > 1.0) {
    issues.push_back("tau must lie in (0, 1], got " + fmt(policy.tau));
  }
  if (policy.kind == RedistributionPolicy::Kind::PerTarget && mc.n > 1 &&
      policy.tau * (mc.n - 1) > 1.0 + 1e-12) {
    issues.push_back("per-target policy needs tau*(n-1) <= 1, got " +
                     fmt(policy.tau * (mc.n - 1)));
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
  if (cfg.async) {
    issues.push_back("sequential sweeps are supported for single-class games "
                     "only");
  }
  double c_min = std::numeric_limits<double>::infinity();
  double l_max = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < mc.num_classes; ++a) {
    const PopulationGame game = single_class(mc, a);
    const std::string prefix = "class " + std::to_string(a + 1) + " ";
    for (int i = 0; i < static_cast<int>(game.utilities.size()); ++i) {
      if (!non_increasing(game.utilities[static_cast<std::size_t>(i)])) {
        issues.push_back(prefix + "utility " + std::to_string(i + 1) +
                         " is increasing; the minimum-utility ascent "
                         "argument needs non-increasing utilities");
      }
    }
    c_min = std::min(c_min, game.costs.min_off_diagonal());
    l_max = std::max(l_max, lipschitz_bounds(game).global);
  }
  if (!(c_min > 0.0)) {
    issues.push_back(
        "ZeroCMin: minimum off-diagonal switching cost over classes is zero; "
        "the inflow cap c_min/L - epsilon is empty");
    return issues;
  }
  const double cap =
      l_max > 0.0 ? c_min / l_max : std::numeric_limits<double>::infinity();
  double tau_gamma = 0.0;
  for (double gamma : mc.gammas) tau_gamma += policy.tau * gamma;
  if (std::isfinite(cap) &&
      tau_gamma > cap - cfg.epsilon + 1e-12 * std::max(1.0, cap)) {
    issues.push_back("sum of tau*gamma over classes = " + fmt(tau_gamma) +
                     " exceeds c_min/L - epsilon = " + fmt(cap - cfg.epsilon));
  }
  return issues;
}

SolveResult<StackedPoint> better_response_multi_solve(
    const MultiClassGame& mc, const StackedPoint& xs0,
    const RedistributionPolicy& policy, const BetterResponseConfig& cfg) {
  check_masses(mc, xs0);
  SolveResult<StackedPoint> res{SolveStatus::MaxIter, xs0, 0, 0.0, false,
                                std::nullopt, "", {}};
  if (!cfg.unsafe_allow_bound_violation) {
    const auto issues = better_response_multi_preconditions(mc, policy, cfg);
    if (!issues.empty()) {
      res.status = SolveStatus::PreconditionViolated;
      res.message = join(issues);
      res.gap_final = vi_gap_multi(mc, xs0);
      return res;
    }
  } else if (cfg.async) {
    throw InvalidSpec("sequential sweeps are supported for single-class games "
                      "only");
  }

  const auto classes = static_cast<std::size_t>(mc.num_classes);
  std::vector<PopulationGame> class_games;
  class_games.reserve(classes);
  for (int a = 0; a < mc.num_classes; ++a) {
    class_games.push_back(single_class(mc, a));
  }
  std::vector<double> masses(classes);
  std::vector<std::vector<double>> blocks(classes);
  for (std::size_t a = 0; a < classes; ++a) {
    masses[a] = xs0.block(static_cast<int>(a)).mass();
    blocks[a] = xs0.block(static_cast<int>(a)).values();
  }

  MultiRecorder rec{cfg.record_trajectory, &res.trajectory, -1};
  rec.push(0, make_record(class_games, mc.gammas, 0, blocks, masses, 0.0));
  std::deque<std::vector<double>> window;
  window.push_back(flatten(blocks));

  const auto envy_all_empty =
      [&](const std::vector<std::vector<double>>& state,
          std::vector<std::vector<double>>* us,
          std::vector<EnvyReport>* reports) {
        const std::vector<double> reduced =
            reduce_raw(state, static_cast<std::size_t>(mc.n));
        bool empty = true;
        for (std::size_t a = 0; a < classes; ++a) {
          std::vector<double> u = evaluate_utilities(class_games[a], reduced);
          EnvyReport report = envy_sets_from_utilities(
              u, class_games[a].costs, state[a], cfg.envy_tol);
          empty = empty && report.all_empty();
          if (us) (*us)[a] = std::move(u);
          if (reports) (*reports)[a] = std::move(report);
        }
        return empty;
      };

  std::int64_t k = 0;
  SolveStatus status = SolveStatus::MaxIter;
  while (true) {
    std::vector<std::vector<double>> us(classes);
    std::vector<EnvyReport> reports(classes);
    if (envy_all_empty(blocks, &us, &reports)) {
      status = SolveStatus::Converged;
      break;
    }
    if (k >= cfg.max_iter) break;

    std::vector<std::vector<double>> next(classes);
    double disp2 = 0.0;
    double moved = 0.0;
    for (std::size_t a = 0; a < classes; ++a) {
      const detail::BlockPlan plan = detail::block_transfers(
          us[a], class_games[a].costs, blocks[a], reports[a], policy);
      next[a] = apply_delta(blocks[a], plan.delta);
      disp2 += detail::sum_squares(plan.delta);
      moved += plan.moved;
    }
    const double disp = std::sqrt(disp2);
    const std::vector<double> flat_next = flatten(next);

    bool stop = false;
    if (disp <= cfg.tol) {
      if (envy_all_empty(next, nullptr, nullptr)) {
        status = SolveStatus::Converged;
        stop = true;
      }
    } else {
      for (std::size_t back = 2; back <= window.size(); ++back) {
        const std::size_t idx = window.size() - back;
        if (detail::states_match(flat_next, window[idx])) {
          status = SolveStatus::CycleDetected;
          res.cycle_period = static_cast<std::int64_t>(back);
          stop = true;
          break;
        }
      }
    }

    blocks = std::move(next);
    ++k;
    window.push_back(flat_next);
    if (window.size() > static_cast<std::size_t>(cfg.cycle_window)) {
      window.pop_front();
    }
    rec.push(k, make_record(class_games, mc.gammas, k, blocks, masses, moved));
    if (stop) break;
  }

  res.status = status;
  res.iterations = k;
  res.x_final = stack(blocks, masses);
  rec.push(k, make_record(class_games, mc.gammas, k, blocks, masses, 0.0),
           /*force=*/true);
  res.gap_final = vi_gap_multi(mc, res.x_final);
  res.verified_inertial =
      is_multiclass_inertial(mc, res.x_final, cfg.envy_tol).inertial;
  return res;
}

ProbeReport monotonicity_probe_multi(ProbeOperator which,
                                     const MultiClassGame& mc,
                                     std::uint64_t seed, int num_samples,
                                     double tol) {
  const auto violations = validate_multiclass(mc);
  if (!violations.empty()) {
    throw InvalidSpec("monotonicity_probe_multi: invalid game: " +
                      violations.front().message);
  }
  std::vector<PopulationGame> class_games;
  for (int a = 0; a < mc.num_classes; ++a) {
    class_games.push_back(single_class(mc, a));
  }
  const std::size_t n = static_cast<std::size_t>(mc.n);
  const VectorOperator op = [class_games, n,
                             which](const std::vector<double>& flat) {
    std::vector<std::vector<double>> blocks(class_games.size());
    for (std::size_t a = 0; a < class_games.size(); ++a) {
      blocks[a].assign(flat.begin() + static_cast<std::ptrdiff_t>(a * n),
                       flat.begin() + static_cast<std::ptrdiff_t>((a + 1) * n));
    }
    const std::vector<double> reduced = reduce_raw(blocks, n);
    std::vector<double> out;
    out.reserve(flat.size());
    for (const auto& game : class_games) {
      const std::vector<double> u = evaluate_utilities(game, reduced);
      if (which == ProbeOperator::InertialGap) {
        const std::vector<double> f = operator_f_values(u, game.costs);
        out.insert(out.end(), f.begin(), f.end());
      } else {
        for (double v : u) out.push_back(-v);
      }
    }
    return out;
  };
  return probe_monotonicity_generic(op, ProbeDomain{mc.n, mc.gammas}, seed,
                                    num_samples, tol);
}

}  // namespace inertial
