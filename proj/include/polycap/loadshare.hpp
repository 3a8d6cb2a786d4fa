#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polycap/errors.hpp"
#include "polycap/kinematics.hpp"
#include "polycap/model.hpp"
#include "polycap/vertex_search.hpp"

namespace polycap {

constexpr double kStandardGravity = 9.81;  // m/s^2

/// Two-robot carrying scenario over a recorded configuration trajectory.
struct TrajectoryPoint {
  double t = 0.0;
  JointConfig q1, q2;
};

struct DualArmScenario {
  RobotModel robot1, robot2;
  std::vector<TrajectoryPoint> trajectory;
  double payload_mass = 0.0;                                   // kg
  Eigen::Vector3d gravity_dir = Eigen::Vector3d(0, 0, -1.0);   // unit, points down

  void validate() const {
    robot1.validate();
    robot2.validate();
    if (trajectory.empty()) throw InputError("scenario: trajectory must be non-empty");
    if (!(payload_mass > 0.0)) throw InputError("scenario: payload_mass must be > 0");
    if (std::abs(gravity_dir.norm() - 1.0) > 1e-6)
      throw InputError("scenario: gravity_dir must be a unit vector");
    for (size_t i = 0; i < trajectory.size(); ++i) {
      if (trajectory[i].q1.size() != robot1.dof() || trajectory[i].q2.size() != robot2.dof())
        throw InputError("scenario: trajectory sample " + std::to_string(i) +
                         " has wrong configuration size");
      if (i > 0 && !(trajectory[i].t > trajectory[i - 1].t))
        throw InputError("scenario: trajectory times must be strictly increasing");
    }
  }
};

/// Extreme scalar forces the robot can exert along a task-space direction.
/// `biased_out` is set when the gravity shift pushed some joint interval
/// entirely to one side of zero; `empty` when no force balances the limits.
struct DirectionalCapacity {
  double f_min = 0.0;
  double f_max = 0.0;
  bool biased_out = false;
  bool empty = false;
};

/// One-dimensional force polytope along `direction` (world frame). The
/// projected Jacobian d^T J_lin is a single row; its vertex search reduces
/// to n face sets of two origins each.
inline DirectionalCapacity max_directional_force(const RobotModel& model, const JointConfig& q,
                                                 const Eigen::Vector3d& direction,
                                                 bool include_gravity,
                                                 const SearchOptions& opts = SearchOptions()) {
  const double dn = direction.norm();
  if (dn == 0.0) throw InputError("max_directional_force: zero direction");
  const Eigen::MatrixXd J_lin = jacobian(model, q, TaskFrame::linear_xyz());
  Eigen::MatrixXd row = (direction / dn).transpose() * J_lin;

  // Rank gate relative to the unprojected Jacobian scale: a 1-row matrix is
  // otherwise always "full rank" unless exactly zero.
  const double scale = J_lin.norm();
  if (row.norm() <= opts.sv_tol * std::max(scale, 1e-30)) {
    std::vector<double> sv = {row.norm()};
    throw RankDeficientError("direction is orthogonal to the reachable force space", sv);
  }

  Eigen::VectorXd lo = model.torque_lower();
  Eigen::VectorXd hi = model.torque_upper();
  DirectionalCapacity cap;
  if (include_gravity) {
    const Eigen::VectorXd tau_g = gravity_torque(model, q);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.dof());
    const ResidualLimits shifted = residual_limits(lo, hi, tau_g, zero, zero);
    lo = shifted.lo;
    hi = shifted.hi;
    cap.biased_out = shifted.warning();
  }

  const VertexSet vs = force_polytope_vertices(row, TorqueBox(lo, hi), opts);
  if (vs.vertices.empty()) {
    cap.empty = true;
    return cap;
  }
  cap.f_min = vs.vertices.front()[0];
  cap.f_max = vs.vertices.back()[0];
  return cap;
}

/// Capacity-proportional split. Inputs are nonnegative capacities.
inline double lambda_policy(double f1_max, double f2_max) {
  if (!(f1_max >= 0.0) || !(f2_max >= 0.0))
    throw InputError("lambda_policy: capacities must be nonnegative");
  const double total = f1_max + f2_max;
  if (total <= 0.0) throw CapacityError("lambda_policy: both capacities exhausted");
  return std::clamp(f1_max / total, 0.0, 1.0);
}

struct LoadSharePolicy {
  enum class Kind { Adaptive, Fixed };
  Kind kind = Kind::Adaptive;
  double fixed_lambda = 0.5;

  static LoadSharePolicy adaptive() { return {Kind::Adaptive, 0.5}; }
  static LoadSharePolicy fixed(double lam) { return {Kind::Fixed, lam}; }
};

struct LoadShareStep {
  double t = 0.0;
  double f1_max = 0.0, f2_max = 0.0, F_max = 0.0;  // N, signed capacity extremes
  double lambda = 0.0;                             // split actually applied
  double f1 = 0.0, f2 = 0.0;                       // N, applied upward forces
  bool feasible_adaptive = false;
  bool feasible_half = false;
  Eigen::VectorXd margin1, margin2;  // per-joint distance to the nearer limit
};

struct LoadShareTrace {
  LoadSharePolicy policy;
  std::vector<LoadShareStep> steps;

  int infeasible_adaptive() const {
    int c = 0;
    for (const auto& s : steps) c += s.feasible_adaptive ? 0 : 1;
    return c;
  }
  int infeasible_half() const {
    int c = 0;
    for (const auto& s : steps) c += s.feasible_half ? 0 : 1;
    return c;
  }
};

namespace detail {

struct ArmState {
  Eigen::MatrixXd J_lin;   // 3×n
  Eigen::VectorXd tau_g;   // gravity hold torque
  Eigen::VectorXd lo, hi;  // actuator limits
};

inline ArmState arm_state(const RobotModel& model, const JointConfig& q) {
  ArmState s;
  s.J_lin = jacobian(model, q, TaskFrame::linear_xyz());
  s.tau_g = gravity_torque(model, q);
  s.lo = model.torque_lower();
  s.hi = model.torque_upper();
  return s;
}

/// Torque-level audit of one arm pushing `f` newtons along `up`.
inline bool torque_feasible(const ArmState& s, const Eigen::Vector3d& up, double f,
                            Eigen::VectorXd* margin, double tol = 1e-6) {
  const Eigen::VectorXd tau = s.tau_g + s.J_lin.transpose() * (f * up);
  bool ok = true;
  if (margin) margin->resize(tau.size());
  for (Eigen::Index i = 0; i < tau.size(); ++i) {
    const double m = std::min(s.hi[i] - tau[i], tau[i] - s.lo[i]);
    if (margin) (*margin)[i] = m;
    if (m < -tol) ok = false;
  }
  return ok;
}

}  // namespace detail

/// Replays the carrying task sample by sample: per-robot vertical capacity,
/// load split per policy, and torque-level feasibility of both the adaptive
/// and the fixed-half strategy. Infeasible samples are flagged, never fatal.
inline LoadShareTrace simulate(const DualArmScenario& scenario, const LoadSharePolicy& policy,
                               const SearchOptions& opts = SearchOptions()) {
  scenario.validate();
  const Eigen::Vector3d up = -scenario.gravity_dir;
  const double G = scenario.payload_mass * kStandardGravity;

  LoadShareTrace trace;
  trace.policy = policy;
  trace.steps.reserve(scenario.trajectory.size());

  for (const TrajectoryPoint& pt : scenario.trajectory) {
    LoadShareStep step;
    step.t = pt.t;

    const detail::ArmState a1 = detail::arm_state(scenario.robot1, pt.q1);
    const detail::ArmState a2 = detail::arm_state(scenario.robot2, pt.q2);

    auto capacity = [&](const RobotModel& model, const JointConfig& q) -> double {
      try {
        const DirectionalCapacity c = max_directional_force(model, q, up, true, opts);
        return c.empty ? 0.0 : c.f_max;
      } catch (const RankDeficientError&) {
        return 0.0;  // no upward force authority at a singular projection
      }
    };
    step.f1_max = capacity(scenario.robot1, pt.q1);
    step.f2_max = capacity(scenario.robot2, pt.q2);
    step.F_max = step.f1_max + step.f2_max;

    const double c1 = std::max(0.0, step.f1_max);
    const double c2 = std::max(0.0, step.f2_max);
    const double lambda_adaptive = (c1 + c2 > 0.0) ? c1 / (c1 + c2) : 0.5;

    const double lam =
        policy.kind == LoadSharePolicy::Kind::Adaptive ? lambda_adaptive : policy.fixed_lambda;
    step.lambda = lam;
    step.f1 = lam * G;
    step.f2 = G - step.f1;  // conservation is exact by construction

    auto split_feasible = [&](double lamx, Eigen::VectorXd* m1, Eigen::VectorXd* m2) {
      const double fa = lamx * G;
      const double fb = G - fa;
      const bool ok1 = detail::torque_feasible(a1, up, fa, m1) && fa <= step.f1_max + 1e-6;
      const bool ok2 = detail::torque_feasible(a2, up, fb, m2) && fb <= step.f2_max + 1e-6;
      return ok1 && ok2;
    };
    step.feasible_adaptive = split_feasible(lambda_adaptive, nullptr, nullptr);
    step.feasible_half = split_feasible(0.5, nullptr, nullptr);
    split_feasible(lam, &step.margin1, &step.margin2);  // margins under the applied split
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

}  // namespace polycap
