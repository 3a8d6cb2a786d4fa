#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "polycap/errors.hpp"

namespace polycap {

/// One revolute joint plus the rigid link it drives, in standard DH form.
/// The COM is expressed in a frame whose origin sits on the joint axis and
/// whose orientation is the parent frame rotated by (theta_offset + q), so
/// a COM of (L, 0, 0) lies a distance L along the link.
struct JointSpec {
  enum class Kind { Revolute, PlanarRevolute };

  Kind kind = Kind::Revolute;
  double a = 0.0;             // link length, m
  double alpha = 0.0;         // link twist, rad
  double d = 0.0;             // link offset, m
  double theta_offset = 0.0;  // joint angle offset, rad
  double mass = 0.0;          // kg
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  double torque_min = 0.0, torque_max = 0.0;  // N·m
  double vel_min = 0.0, vel_max = 0.0;        // rad/s
};

using JointConfig = Eigen::VectorXd;

/// Serial kinematic chain with actuation limits and a world gravity vector.
struct RobotModel {
  std::string name;
  std::vector<JointSpec> joints;
  Eigen::Vector3d gravity = Eigen::Vector3d(0.0, 0.0, -9.81);  // m/s², world frame

  int dof() const { return static_cast<int>(joints.size()); }

  Eigen::VectorXd torque_lower() const {
    Eigen::VectorXd v(dof());
    for (int i = 0; i < dof(); ++i) v[i] = joints[i].torque_min;
    return v;
  }
  Eigen::VectorXd torque_upper() const {
    Eigen::VectorXd v(dof());
    for (int i = 0; i < dof(); ++i) v[i] = joints[i].torque_max;
    return v;
  }
  Eigen::VectorXd vel_lower() const {
    Eigen::VectorXd v(dof());
    for (int i = 0; i < dof(); ++i) v[i] = joints[i].vel_min;
    return v;
  }
  Eigen::VectorXd vel_upper() const {
    Eigen::VectorXd v(dof());
    for (int i = 0; i < dof(); ++i) v[i] = joints[i].vel_max;
    return v;
  }

  void validate() const {
    if (joints.empty()) throw InputError("robot '" + name + "': needs at least one joint");
    if (!gravity.allFinite()) throw InputError("robot '" + name + "': gravity must be finite");
    for (int i = 0; i < dof(); ++i) {
      const JointSpec& j = joints[i];
      const std::string who = "robot '" + name + "' joint " + std::to_string(i);
      if (!std::isfinite(j.a) || !std::isfinite(j.alpha) || !std::isfinite(j.d) ||
          !std::isfinite(j.theta_offset))
        throw InputError(who + ": non-finite DH parameters");
      if (!(j.mass >= 0.0)) throw InputError(who + ": mass must be >= 0");
      if (!j.com.allFinite()) throw InputError(who + ": non-finite COM");
      if (!std::isfinite(j.torque_min) || !std::isfinite(j.torque_max) ||
          !(j.torque_min < j.torque_max))
        throw InputError(who + ": requires finite torque_min < torque_max");
      if (!std::isfinite(j.vel_min) || !std::isfinite(j.vel_max) || !(j.vel_min < j.vel_max))
        throw InputError(who + ": requires finite vel_min < vel_max");
      if (j.kind == JointSpec::Kind::PlanarRevolute && (j.alpha != 0.0 || j.d != 0.0))
        throw InputError(who + ": planar-revolute requires alpha = 0 and d = 0");
    }
  }
};

/// Task-space axis of the end-effector twist/wrench, world frame.
enum class Axis { X = 0, Y = 1, Z = 2, RX = 3, RY = 4, RZ = 5 };

inline const char* axis_name(Axis a) {
  static const char* names[] = {"x", "y", "z", "rx", "ry", "rz"};
  return names[static_cast<int>(a)];
}

/// Ordered duplicate-free subset of {x, y, z, rx, ry, rz} selecting which
/// rows of the full 6×n Jacobian a query is about.
class TaskFrame {
public:
  explicit TaskFrame(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 6) throw InputError("task frame needs 1..6 axes");
    for (size_t i = 0; i < axes_.size(); ++i)
      for (size_t j = i + 1; j < axes_.size(); ++j)
        if (axes_[i] == axes_[j])
          throw InputError(std::string("duplicate task axis '") + axis_name(axes_[i]) + "'");
  }

  static TaskFrame planar_xy() { return TaskFrame({Axis::X, Axis::Y}); }
  static TaskFrame linear_xyz() { return TaskFrame({Axis::X, Axis::Y, Axis::Z}); }
  static TaskFrame full6() {
    return TaskFrame({Axis::X, Axis::Y, Axis::Z, Axis::RX, Axis::RY, Axis::RZ});
  }

  /// Parses a comma-separated axis list such as "x,y" or "x,y,z,rz".
  static TaskFrame parse(const std::string& text) {
    std::vector<Axis> axes;
    std::string tok;
    auto flush = [&] {
      if (tok.empty()) return;
      if (tok == "x") axes.push_back(Axis::X);
      else if (tok == "y") axes.push_back(Axis::Y);
      else if (tok == "z") axes.push_back(Axis::Z);
      else if (tok == "rx") axes.push_back(Axis::RX);
      else if (tok == "ry") axes.push_back(Axis::RY);
      else if (tok == "rz") axes.push_back(Axis::RZ);
      else throw InputError("unknown task axis '" + tok + "'");
      tok.clear();
    };
    for (char c : text) {
      if (c == ',') flush();
      else if (!std::isspace(static_cast<unsigned char>(c))) tok.push_back(c);
    }
    flush();
    return TaskFrame(axes);
  }

  const std::vector<Axis>& axes() const { return axes_; }
  int dim() const { return static_cast<int>(axes_.size()); }

  std::string to_string() const {
    std::string s;
    for (size_t i = 0; i < axes_.size(); ++i) {
      if (i) s += ",";
      s += axis_name(axes_[i]);
    }
    return s;
  }

private:
  std::vector<Axis> axes_;
};

// ---------------------------------------------------------------------------
// Robot description JSON
// ---------------------------------------------------------------------------

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& key,
                             const std::string& ctx) {
  if (!j.contains(key)) throw InputError(ctx + ": missing key '" + key + "'");
  if (!j[key].is_number()) throw InputError(ctx + ": key '" + key + "' must be a number");
  return j[key].get<double>();
}

inline Eigen::Vector3d require_vec3(const nlohmann::json& j, const std::string& key,
                                    const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3)
    throw InputError(ctx + ": key '" + key + "' must be a 3-element array");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!j[key][i].is_number()) throw InputError(ctx + ": key '" + key + "' must be numeric");
    v[i] = j[key][i].get<double>();
  }
  return v;
}

}  // namespace detail

/// Parses a robot description document. Unknown keys are ignored so fixture
/// files can carry notes.
inline RobotModel parse_robot_model(const nlohmann::json& doc) {
  RobotModel model;
  if (!doc.is_object()) throw InputError("robot description: top level must be an object");
  if (!doc.contains("name") || !doc["name"].is_string())
    throw InputError("robot description: missing string key 'name'");
  model.name = doc["name"].get<std::string>();
  model.gravity = detail::require_vec3(doc, "gravity", "robot '" + model.name + "'");
  if (!doc.contains("joints") || !doc["joints"].is_array())
    throw InputError("robot '" + model.name + "': missing array key 'joints'");

  int idx = 0;
  for (const auto& jj : doc["joints"]) {
    const std::string ctx = "robot '" + model.name + "' joint " + std::to_string(idx);
    JointSpec spec;
    if (!jj.contains("kind") || !jj["kind"].is_string())
      throw InputError(ctx + ": missing string key 'kind'");
    const std::string kind = jj["kind"].get<std::string>();
    if (kind == "revolute") spec.kind = JointSpec::Kind::Revolute;
    else if (kind == "planar-revolute") spec.kind = JointSpec::Kind::PlanarRevolute;
    else throw InputError(ctx + ": unknown kind '" + kind + "'");

    if (!jj.contains("dh") || !jj["dh"].is_array() || jj["dh"].size() != 4)
      throw InputError(ctx + ": key 'dh' must be [a, alpha, d, theta_offset]");
    spec.a = jj["dh"][0].get<double>();
    spec.alpha = jj["dh"][1].get<double>();
    spec.d = jj["dh"][2].get<double>();
    spec.theta_offset = jj["dh"][3].get<double>();

    spec.mass = detail::require_number(jj, "mass", ctx);
    spec.com = detail::require_vec3(jj, "com", ctx);
    spec.torque_min = detail::require_number(jj, "torque_min", ctx);
    spec.torque_max = detail::require_number(jj, "torque_max", ctx);
    spec.vel_min = detail::require_number(jj, "vel_min", ctx);
    spec.vel_max = detail::require_number(jj, "vel_max", ctx);
    model.joints.push_back(spec);
    ++idx;
  }
  model.validate();
  return model;
}

/// Loads and validates a robot description file.
inline RobotModel load_robot_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open robot file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("robot file '" + path.string() + "': " + e.what());
  }
  return parse_robot_model(doc);
}

}  // namespace polycap
