#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polycap/errors.hpp"
#include "polycap/geometry.hpp"
#include "polycap/loadshare.hpp"
#include "polycap/model.hpp"

namespace polycap {

/// Shortest decimal form that parses back to the identical double.
inline std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Polytope documents
// ---------------------------------------------------------------------------

struct PolytopeDoc {
  int task_dim = 0;
  std::vector<std::string> axes;
  std::string kind;
  VertexSet vertices;
  std::vector<std::vector<int>> facets;
};

inline nlohmann::json stats_to_json(const SearchStats& s) {
  return nlohmann::json{{"faces_total", s.faces_total},
                        {"faces_pruned_bounds", s.faces_pruned_bounds},
                        {"faces_singular", s.faces_singular},
                        {"systems_solved", s.systems_solved},
                        {"runtime_ns", s.runtime_ns}};
}

inline nlohmann::json vertexset_to_json(const VertexSet& vs,
                                        const std::vector<std::string>& axes,
                                        const std::string& kind) {
  nlohmann::json doc;
  doc["task_dim"] = vs.task_dim;
  doc["axes"] = axes;
  doc["kind"] = kind;
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : vs.vertices) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
    verts.push_back(row);
  }
  doc["vertices"] = verts;
  doc["stats"] = stats_to_json(vs.stats);
  return doc;
}

inline nlohmann::json polytope_to_json(const Polytope& poly,
                                       const std::vector<std::string>& axes,
                                       const std::string& kind) {
  nlohmann::json doc = vertexset_to_json(poly.vset, axes, kind);
  if (!poly.facets.empty()) doc["facets"] = poly.facets;
  return doc;
}

inline PolytopeDoc polytope_from_json(const nlohmann::json& doc) {
  PolytopeDoc out;
  try {
    out.task_dim = doc.at("task_dim").get<int>();
    out.axes = doc.at("axes").get<std::vector<std::string>>();
    out.kind = doc.at("kind").get<std::string>();
    for (const auto& row : doc.at("vertices")) {
      Eigen::VectorXd v(out.task_dim);
      if (static_cast<int>(row.size()) != out.task_dim)
        throw InputError("polytope document: vertex arity mismatch");
      for (int i = 0; i < out.task_dim; ++i) v[i] = row[i].get<double>();
      out.vertices.vertices.push_back(v);
    }
    out.vertices.task_dim = out.task_dim;
    if (doc.contains("facets")) out.facets = doc["facets"].get<std::vector<std::vector<int>>>();
    const auto& st = doc.at("stats");
    out.vertices.stats.faces_total = st.at("faces_total").get<long>();
    out.vertices.stats.faces_pruned_bounds = st.at("faces_pruned_bounds").get<long>();
    out.vertices.stats.faces_singular = st.at("faces_singular").get<long>();
    out.vertices.stats.systems_solved = st.at("systems_solved").get<long>();
    out.vertices.stats.runtime_ns = st.at("runtime_ns").get<long long>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("polytope document: ") + e.what());
  }
  return out;
}

/// OFF mesh for a 3D polytope with triangulated facets.
inline std::string polytope_to_off(const Polytope& poly) {
  if (poly.dim != 3) throw InputError("OFF export requires a 3-dimensional polytope");
  if (poly.facets.empty()) throw InputError("OFF export requires facets (non-degenerate hull)");
  std::ostringstream os;
  os << "OFF\n" << poly.vertices().size() << " " << poly.facets.size() << " 0\n";
  for (const auto& v : poly.vertices())
    os << fmt_double(v[0]) << " " << fmt_double(v[1]) << " " << fmt_double(v[2]) << "\n";
  for (const auto& f : poly.facets) {
    os << f.size();
    for (int idx : f) os << " " << idx;
    os << "\n";
  }
  return os.str();
}

inline std::string vertices_to_csv(const VertexSet& vs, const std::vector<std::string>& axes) {
  std::ostringstream os;
  for (size_t i = 0; i < axes.size(); ++i) os << (i ? "," : "") << axes[i];
  os << "\n";
  for (const auto& v : vs.vertices) {
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << fmt_double(v[i]);
    os << "\n";
  }
  return os.str();
}

inline std::string vertices_to_csv(const Polytope& poly, const std::vector<std::string>& axes) {
  return vertices_to_csv(poly.vset, axes);
}

// ---------------------------------------------------------------------------
// Load-share scenarios and traces
// ---------------------------------------------------------------------------

/// Loads a dual-arm scenario. Robot paths resolve relative to the scenario
/// file; gravity_dir defaults to the direction of robot1's gravity vector
/// and may be overridden with an optional "gravity_dir" key.
inline DualArmScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("scenario file '" + path.string() + "': " + e.what());
  }

  DualArmScenario sc;
  try {
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
      std::filesystem::path rp(p);
      return rp.is_absolute() ? rp : base / rp;
    };
    sc.robot1 = load_robot_model(resolve(doc.at("robot1").get<std::string>()));
    sc.robot2 = load_robot_model(resolve(doc.at("robot2").get<std::string>()));
    sc.payload_mass = doc.at("payload_mass").get<double>();
    if (doc.contains("gravity_dir")) {
      for (int i = 0; i < 3; ++i) sc.gravity_dir[i] = doc["gravity_dir"][i].get<double>();
    } else {
      const double gn = sc.robot1.gravity.norm();
      if (gn == 0.0)
        throw InputError("scenario: robot1 has zero gravity; supply gravity_dir explicitly");
      sc.gravity_dir = sc.robot1.gravity / gn;
    }
    for (const auto& row : doc.at("trajectory")) {
      TrajectoryPoint pt;
      pt.t = row.at("t").get<double>();
      const auto q1 = row.at("q1").get<std::vector<double>>();
      const auto q2 = row.at("q2").get<std::vector<double>>();
      pt.q1 = Eigen::Map<const Eigen::VectorXd>(q1.data(), q1.size());
      pt.q2 = Eigen::Map<const Eigen::VectorXd>(q2.data(), q2.size());
      sc.trajectory.push_back(std::move(pt));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError("scenario file '" + path.string() + "': " + e.what());
  }
  sc.validate();
  return sc;
}

inline std::string trace_to_csv(const LoadShareTrace& trace) {
  std::ostringstream os;
  os << "t,f1_max,f2_max,F_max,lambda,f1,f2,feasible_adaptive,feasible_half\n";
  for (const auto& s : trace.steps) {
    os << fmt_double(s.t) << "," << fmt_double(s.f1_max) << "," << fmt_double(s.f2_max) << ","
       << fmt_double(s.F_max) << "," << fmt_double(s.lambda) << "," << fmt_double(s.f1) << ","
       << fmt_double(s.f2) << "," << (s.feasible_adaptive ? 1 : 0) << ","
       << (s.feasible_half ? 1 : 0) << "\n";
  }
  return os.str();
}

}  // namespace polycap
