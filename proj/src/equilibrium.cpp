#include "inertial/equilibrium.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "inertial/rng.hpp"

namespace inertial {

bool EnvyReport::all_empty() const {
  for (const auto& s : sets) {
    if (!s.empty()) return false;
  }
  return true;
}

std::optional<std::pair<int, EnvyWitness>> EnvyReport::first() const {
  for (std::size_t i = 0; i < witnesses.size(); ++i) {
    if (!witnesses[i].empty()) {
      return std::make_pair(static_cast<int>(i), witnesses[i].front());
    }
  }
  return std::nullopt;
}

EnvyReport envy_sets_from_utilities(const std::vector<double>& u,
                                    const SwitchingCosts& costs,
                                    const std::vector<double>& x, double tol) {
  const int n = static_cast<int>(x.size());
  if (static_cast<int>(u.size()) != n || costs.size() != n) {
    throw DimensionMismatch("envy_sets: utilities/costs/point disagree");
  }
  EnvyReport report;
  report.sets.resize(x.size());
  report.witnesses.resize(x.size());
  for (int i = 0; i < n; ++i) {
    if (!(x[static_cast<std::size_t>(i)] > tol)) continue;
    const double ui = u[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double uj = u[static_cast<std::size_t>(j)];
      const double c = costs.at(i, j);
      if (ui < uj - c - tol) {
        report.sets[static_cast<std::size_t>(i)].push_back(j);
        report.witnesses[static_cast<std::size_t>(i)].push_back(
            EnvyWitness{j, ui, uj, c});
      }
    }
  }
  return report;
}

EnvyReport envy_sets(const PopulationGame& game, const SimplexPoint& x,
                     double tol) {
  return envy_sets_from_utilities(evaluate_utilities(game, x), game.costs,
                                  x.values(), tol);
}

InertialVerdict is_inertial(const PopulationGame& game, const SimplexPoint& x,
                            double tol) {
  InertialVerdict v;
  v.report = envy_sets(game, x, tol);
  v.inertial = v.report.all_empty();
  return v;
}

NashVerdict is_nash(const PopulationGame& game, const SimplexPoint& x,
                    double tol) {
  const std::vector<double> u = evaluate_utilities(game, x);
  int best = 0;
  for (int j = 1; j < game.n; ++j) {
    if (u[static_cast<std::size_t>(j)] > u[static_cast<std::size_t>(best)]) {
      best = j;
    }
  }
  NashVerdict v;
  v.nash = true;
  for (int i = 0; i < game.n; ++i) {
    if (!(x[i] > tol)) continue;
    if (u[static_cast<std::size_t>(i)] <
        u[static_cast<std::size_t>(best)] - tol) {
      v.nash = false;
      v.witness = NashWitness{i, best, u[static_cast<std::size_t>(i)],
                              u[static_cast<std::size_t>(best)]};
      return v;
    }
  }
  return v;
}

std::vector<double> operator_f_values(const std::vector<double>& u,
                                      const SwitchingCosts& costs) {
  const int n = static_cast<int>(u.size());
  if (costs.size() != n) {
    throw DimensionMismatch("operator_f: utilities/costs disagree");
  }
  std::vector<double> f(u.size());
  for (int i = 0; i < n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      const double v = u[static_cast<std::size_t>(j)] -
                       u[static_cast<std::size_t>(i)] - costs.at(i, j);
      if (v > best) best = v;
    }
    f[static_cast<std::size_t>(i)] = best;
  }
  return f;
}

std::vector<double> operator_f_values(const PopulationGame& game,
                                      const std::vector<double>& x) {
  return operator_f_values(evaluate_utilities(game, x), game.costs);
}

OperatorEval operator_f(const PopulationGame& game, const SimplexPoint& x) {
  const std::vector<double> u = evaluate_utilities(game, x);
  OperatorEval out;
  out.values = operator_f_values(u, game.costs);
  out.argmax_sets.resize(u.size());
  for (int i = 0; i < game.n; ++i) {
    const double best = out.values[static_cast<std::size_t>(i)];
    for (int j = 0; j < game.n; ++j) {
      const double v = u[static_cast<std::size_t>(j)] -
                       u[static_cast<std::size_t>(i)] - game.costs.at(i, j);
      if (v >= best - 1e-12) {
        out.argmax_sets[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }
  double dot = 0.0;
  double lo = out.values[0];
  for (int i = 0; i < game.n; ++i) {
    dot += out.values[static_cast<std::size_t>(i)] * x[i];
    lo = std::min(lo, out.values[static_cast<std::size_t>(i)]);
  }
  out.gap = dot - game.gamma * lo;
  return out;
}

double vi_gap(const PopulationGame& game, const SimplexPoint& x) {
  return operator_f(game, x).gap;
}

namespace {

std::vector<std::vector<double>> fd_jacobian(const VectorOperator& op,
                                             const std::vector<double>& x,
                                             double h) {
  if (!(h > 0.0)) throw StepTooLarge("jacobian: step must be positive");
  const int n = static_cast<int>(x.size());
  for (int j = 0; j < n; ++j) {
    if (x[static_cast<std::size_t>(j)] - h < 0.0) {
      throw StepTooLarge("jacobian: coordinate " + std::to_string(j + 1) +
                         " is closer than h to the boundary");
    }
  }
  std::vector<std::vector<double>> jac(
      static_cast<std::size_t>(n),
      std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<double> probe = x;
  for (int j = 0; j < n; ++j) {
    probe[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + h;
    const std::vector<double> fp = op(probe);
    probe[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] - h;
    const std::vector<double> fm = op(probe);
    probe[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) /
          (2.0 * h);
    }
  }
  return jac;
}

double min_symmetrized_eigenvalue(const std::vector<std::vector<double>>& jac) {
  const int n = static_cast<int>(jac.size());
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s(i, j) = jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                jac[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  return solver.eigenvalues().minCoeff();
}

std::vector<double> draw_domain_point(Rng& rng, const ProbeDomain& domain) {
  std::vector<double> x;
  x.reserve(domain.masses.size() * static_cast<std::size_t>(domain.block_size));
  for (double mass : domain.masses) {
    const std::vector<double> block =
        sample_simplex(rng, domain.block_size, mass);
    x.insert(x.end(), block.begin(), block.end());
  }
  return x;
}

}  // namespace

std::vector<std::vector<double>> jacobian_fd(const PopulationGame& game,
                                             const std::vector<double>& x,
                                             double h) {
  if (static_cast<int>(x.size()) != game.n) {
    throw DimensionMismatch("jacobian_fd: point/game size mismatch");
  }
  return fd_jacobian(
      [&game](const std::vector<double>& p) {
        return operator_f_values(game, p);
      },
      x, h);
}

ProbeReport probe_monotonicity_generic(const VectorOperator& op,
                                       const ProbeDomain& domain,
                                       std::uint64_t seed, int num_samples,
                                       double tol) {
  if (num_samples < 1) {
    throw InvalidSpec("monotonicity probe: need num_samples >= 1");
  }
  if (domain.block_size < 1 || domain.masses.empty()) {
    throw InvalidSpec("monotonicity probe: empty domain");
  }
  constexpr double kStep = 1e-6;
  const double inf = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  ProbeReport report;
  report.worst_pairwise = inf;
  report.worst_eigenvalue = inf;

  for (int s = 0; s < num_samples; ++s) {
    const std::vector<double> x = draw_domain_point(rng, domain);
    const std::vector<double> y = draw_domain_point(rng, domain);
    const std::vector<double> fx = op(x);
    const std::vector<double> fy = op(y);
    double prod = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      prod += (fx[i] - fy[i]) * (x[i] - y[i]);
    }
    if (prod < report.worst_pairwise) {
      report.worst_pairwise = prod;
      report.worst_pair_x = x;
      report.worst_pair_y = y;
    }
  }

  // Interior points only: the central-difference stencil must not cross the
  // boundary, where F's max switches pieces non-smoothly.
  const double least_mass =
      *std::min_element(domain.masses.begin(), domain.masses.end());
  const bool interior_possible = least_mass > 2.0 * kStep * domain.block_size;
  if (interior_possible) {
    for (int s = 0; s < num_samples; ++s) {
      std::vector<double> x;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        x = draw_domain_point(rng, domain);
        const double lo = *std::min_element(x.begin(), x.end());
        if (lo >= 2.0 * kStep) break;
        x.clear();
      }
      if (x.empty()) continue;
      const double eig = min_symmetrized_eigenvalue(fd_jacobian(op, x, kStep));
      if (eig < report.worst_eigenvalue) {
        report.worst_eigenvalue = eig;
        report.worst_eigen_x = x;
      }
    }
  }

  report.verdict = (report.worst_pairwise < -tol ||
                    report.worst_eigenvalue < -tol)
                       ? ProbeVerdict::NotMonotone
                       : ProbeVerdict::MonotoneUpToSampling;
  return report;
}

ProbeReport monotonicity_probe(ProbeOperator which, const PopulationGame& game,
                               std::uint64_t seed, int num_samples,
                               double tol) {
  VectorOperator op;
  if (which == ProbeOperator::InertialGap) {
    op = [&game](const std::vector<double>& p) {
      return operator_f_values(game, p);
    };
  } else {
    op = [&game](const std::vector<double>& p) {
      std::vector<double> u = evaluate_utilities(game, p);
      for (auto& v : u) v = -v;
      return u;
    };
  }
  ProbeDomain domain{game.n, {game.gamma}};
  return probe_monotonicity_generic(op, domain, seed, num_samples, tol);
}

}  // namespace inertial
