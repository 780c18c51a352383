#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "inertial/game.hpp"

namespace inertial {

struct EnvyWitness {
  int target = -1;      // action the source would rather hold
  double u_source = 0;  // utility of the envious action
  double u_target = 0;  // utility of the target
  double cost = 0;      // switching cost source -> target
};

// Per-action envy sets: j is in sets[i] when x_i > tol and
// u_i < u_j - c_ij - tol. Actions at or below tol mass have empty sets,
// and exact ties are never envy.
struct EnvyReport {
  std::vector<std::vector<int>> sets;
  std::vector<std::vector<EnvyWitness>> witnesses;

  bool all_empty() const;
  // First (source, witness) pair in index order, if any set is nonempty.
  std::optional<std::pair<int, EnvyWitness>> first() const;
};

// Kernel over precomputed utilities; shared with the multi-class module.
EnvyReport envy_sets_from_utilities(const std::vector<double>& u,
                                    const SwitchingCosts& costs,
                                    const std::vector<double>& x, double tol);

EnvyReport envy_sets(const PopulationGame& game, const SimplexPoint& x,
                     double tol = kDefaultEnvyTol);

struct InertialVerdict {
  bool inertial = false;
  EnvyReport report;
};

// x is inertial iff every envy set is empty.
InertialVerdict is_inertial(const PopulationGame& game, const SimplexPoint& x,
                            double tol = kDefaultEnvyTol);

struct NashWitness {
  int action = -1;
  int better = -1;
  double u_action = 0;
  double u_better = 0;
};

struct NashVerdict {
  bool nash = false;
  std::optional<NashWitness> witness;
};

// x is Nash iff every action holding mass attains the maximum utility
// (within tol). Every Nash point is inertial since costs are nonnegative.
NashVerdict is_nash(const PopulationGame& game, const SimplexPoint& x,
                    double tol = kDefaultEnvyTol);

// F_i(x) = max_j (u_j(x) - u_i(x) - c_ij). Kernel overload defined on the
// whole nonnegative orthant. F >= 0 everywhere and min_i F_i = 0 exactly,
// attained at any utility-maximizing action.
std::vector<double> operator_f_values(const std::vector<double>& u,
                                      const SwitchingCosts& costs);
std::vector<double> operator_f_values(const PopulationGame& game,
                                      const std::vector<double>& x);

struct OperatorEval {
  std::vector<double> values;
  // Maximizing j per action, every j within 1e-12 of the max.
  std::vector<std::vector<int>> argmax_sets;
  double gap = 0.0;
};

OperatorEval operator_f(const PopulationGame& game, const SimplexPoint& x);

// gap(x) = F(x)'x - gamma * min_i F_i(x); nonnegative, and zero exactly on
// inertial points, because min_y F(x)'y over the simplex is attained at a
// vertex. Checking the gap is therefore an O(n) equilibrium certificate.
double vi_gap(const PopulationGame& game, const SimplexPoint& x);

// Central-difference Jacobian J[i][j] = dF_i/dx_j. F is defined on the
// nonnegative orthant, so x does not need to lie on the simplex; every
// coordinate must stay >= 0 under the stencil or StepTooLarge is thrown.
std::vector<std::vector<double>> jacobian_fd(const PopulationGame& game,
                                             const std::vector<double>& x,
                                             double h = 1e-6);

enum class ProbeOperator {
  InertialGap,  // F
  NegUtility,   // -u
};

enum class ProbeVerdict {
  MonotoneUpToSampling,
  NotMonotone,
};

// Sampling can certify non-monotonicity with a witness but can never prove
// monotonicity, hence the asymmetric verdict names. worst_pairwise is the
// smallest sampled (Op(x) - Op(y))'(x - y); worst_eigenvalue the smallest
// sampled eigenvalue of J + J'. Either below -tol yields NotMonotone.
struct ProbeReport {
  ProbeVerdict verdict = ProbeVerdict::MonotoneUpToSampling;
  double worst_pairwise = 0.0;
  std::vector<double> worst_pair_x;
  std::vector<double> worst_pair_y;
  double worst_eigenvalue = 0.0;
  std::vector<double> worst_eigen_x;
};

// Domain description for the generic probe: one simplex block per entry of
// `masses`, each of dimension `block_size`.
struct ProbeDomain {
  int block_size = 0;
  std::vector<double> masses;
};

using VectorOperator =
    std::function<std::vector<double>(const std::vector<double>&)>;

// num_samples pairwise products plus num_samples Jacobian eigenvalue checks
// at interior points (every coordinate >= 2h, h = 1e-6). Deterministic for
// a fixed seed.
ProbeReport probe_monotonicity_generic(const VectorOperator& op,
                                       const ProbeDomain& domain,
                                       std::uint64_t seed, int num_samples,
                                       double tol);

ProbeReport monotonicity_probe(ProbeOperator which, const PopulationGame& game,
                               std::uint64_t seed, int num_samples,
                               double tol = 1e-9);

}  // namespace inertial
