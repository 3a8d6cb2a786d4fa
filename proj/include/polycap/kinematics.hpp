#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "polycap/errors.hpp"
#include "polycap/model.hpp"

namespace polycap {

/// Frame-to-frame transform for one standard-DH joint at angle q.
inline Eigen::Isometry3d dh_transform(const JointSpec& j, double q) {
  const double ct = std::cos(j.theta_offset + q);
  const double st = std::sin(j.theta_offset + q);
  const double ca = std::cos(j.alpha);
  const double sa = std::sin(j.alpha);
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  T.linear() << ct, -st * ca, st * sa,
                st, ct * ca, -ct * sa,
                0.0, sa, ca;
  T.translation() << j.a * ct, j.a * st, j.d;
  return T;
}

/// World-frame joint axes, joint origins and link COM positions at q.
struct KinematicChain {
  std::vector<Eigen::Vector3d> joint_origin;  // point on axis of joint i
  std::vector<Eigen::Vector3d> joint_axis;    // unit z of frame i-1
  std::vector<Eigen::Vector3d> com_world;     // link i COM, world frame
  Eigen::Isometry3d ee = Eigen::Isometry3d::Identity();
};

inline void check_config(const RobotModel& model, const JointConfig& q) {
  if (q.size() != model.dof())
    throw InputError("configuration has " + std::to_string(q.size()) + " entries, robot '" +
                     model.name + "' has " + std::to_string(model.dof()) + " joints");
  if (!q.allFinite()) throw InputError("configuration must be finite");
}

inline KinematicChain compute_chain(const RobotModel& model, const JointConfig& q) {
  check_config(model, q);
  KinematicChain chain;
  const int n = model.dof();
  chain.joint_origin.reserve(n);
  chain.joint_axis.reserve(n);
  chain.com_world.reserve(n);
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  for (int i = 0; i < n; ++i) {
    const JointSpec& j = model.joints[i];
    chain.joint_origin.push_back(T.translation());
    chain.joint_axis.push_back(T.linear().col(2));
    // COM frame: origin on the joint axis, orientation rotated with the link.
    const double th = j.theta_offset + q[i];
    Eigen::Matrix3d Rz;
    Rz << std::cos(th), -std::sin(th), 0.0,
          std::sin(th), std::cos(th), 0.0,
          0.0, 0.0, 1.0;
    chain.com_world.push_back(T.translation() + T.linear() * (Rz * j.com));
    T = T * dh_transform(j, q[i]);
  }
  chain.ee = T;
  return chain;
}

/// End-effector pose.
inline Eigen::Isometry3d forward_kinematics(const RobotModel& model, const JointConfig& q) {
  return compute_chain(model, q).ee;
}

/// Full 6×n geometric Jacobian at the end-effector origin, world frame,
/// rows ordered [vx vy vz wx wy wz].
inline Eigen::MatrixXd jacobian_full(const RobotModel& model, const JointConfig& q) {
  const KinematicChain chain = compute_chain(model, q);
  const int n = model.dof();
  Eigen::MatrixXd J(6, n);
  const Eigen::Vector3d p = chain.ee.translation();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d& z = chain.joint_axis[i];
    J.block<3, 1>(0, i) = z.cross(p - chain.joint_origin[i]);
    J.block<3, 1>(3, i) = z;
  }
  return J;
}

/// Geometric Jacobian restricted to (and ordered by) the task-frame axes.
inline Eigen::MatrixXd jacobian(const RobotModel& model, const JointConfig& q,
                                const TaskFrame& frame) {
  const Eigen::MatrixXd full = jacobian_full(model, q);
  Eigen::MatrixXd J(frame.dim(), model.dof());
  for (int r = 0; r < frame.dim(); ++r) J.row(r) = full.row(static_cast<int>(frame.axes()[r]));
  return J;
}

/// 3×n linear-velocity Jacobian of link `link`'s COM. Columns of joints
/// beyond the link are zero.
inline Eigen::MatrixXd link_com_jacobian(const RobotModel& model, const JointConfig& q,
                                         int link) {
  const KinematicChain chain = compute_chain(model, q);
  const int n = model.dof();
  if (link < 0 || link >= n) throw InputError("link index out of range");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, n);
  const Eigen::Vector3d& pc = chain.com_world[link];
  for (int i = 0; i <= link; ++i)
    J.col(i) = chain.joint_axis[i].cross(pc - chain.joint_origin[i]);
  return J;
}

/// Actuator torque needed to hold q statically with no external wrench.
/// Point-mass links: tau_g = -sum_i J_ci^T (m_i g).
inline Eigen::VectorXd gravity_torque(const RobotModel& model, const JointConfig& q) {
  const KinematicChain chain = compute_chain(model, q);
  const int n = model.dof();
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(n);
  for (int link = 0; link < n; ++link) {
    const double m = model.joints[link].mass;
    if (m == 0.0) continue;
    const Eigen::Vector3d& pc = chain.com_world[link];
    const Eigen::Vector3d f = m * model.gravity;
    for (int i = 0; i <= link; ++i) {
      const Eigen::Vector3d col = chain.joint_axis[i].cross(pc - chain.joint_origin[i]);
      tau[i] -= col.dot(f);
    }
  }
  return tau;
}

/// Joint-torque limits with the static/dynamic/nominal bias removed.
/// Width is preserved exactly; `biased_out` lists joints whose shifted
/// interval no longer straddles zero (lo' > 0 or hi' < 0).
struct ResidualLimits {
  Eigen::VectorXd lo, hi;
  std::vector<int> biased_out;
  bool warning() const { return !biased_out.empty(); }
};

inline ResidualLimits residual_limits(const Eigen::VectorXd& tau_lo,
                                      const Eigen::VectorXd& tau_hi,
                                      const Eigen::VectorXd& tau_g,
                                      const Eigen::VectorXd& tau_d,
                                      const Eigen::VectorXd& tau_n) {
  const auto n = tau_lo.size();
  if (tau_hi.size() != n || tau_g.size() != n || tau_d.size() != n || tau_n.size() != n)
    throw InputError("residual_limits: all vectors must have equal length");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(tau_lo[i] < tau_hi[i]))
      throw InputError("residual_limits: limits must satisfy lo < hi at joint " +
                       std::to_string(i));
  ResidualLimits out;
  const Eigen::VectorXd bias = tau_g + tau_d + tau_n;
  out.lo = tau_lo - bias;
  out.hi = tau_hi - bias;
  for (Eigen::Index i = 0; i < n; ++i)
    if (out.lo[i] > 0.0 || out.hi[i] < 0.0) out.biased_out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace polycap
