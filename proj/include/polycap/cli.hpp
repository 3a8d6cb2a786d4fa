#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "polycap/polycap.hpp"

namespace polycap::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kRankDeficient = 2,
  kCapacityError = 3,
};

/// Runs a command body and maps the library error taxonomy onto the stable
/// exit-code contract.
template <typename Fn>
int run_guarded(Fn&& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const RankDeficientError& e) {
    err << "error: " << e.what() << "\n";
    return kRankDeficient;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << "\n";
    return kCapacityError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

inline TaskFrame default_frame(const RobotModel& model) {
  for (const auto& j : model.joints)
    if (j.kind != JointSpec::Kind::PlanarRevolute) return TaskFrame::linear_xyz();
  return TaskFrame::planar_xy();
}

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline void write_artifact(const std::string& text, const std::string& output,
                           std::ostream& out) {
  if (output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(output, std::ios::binary);
  if (!f) throw InputError("cannot write output file '" + output + "'");
  f << text;
}

inline std::vector<std::string> axis_names(const TaskFrame& frame) {
  std::vector<std::string> names;
  for (Axis a : frame.axes()) names.emplace_back(axis_name(a));
  return names;
}

// ---------------------------------------------------------------------------
// polytope
// ---------------------------------------------------------------------------

struct PolytopeCmd {
  std::string model_file;
  std::vector<double> q;
  std::string task;            // empty -> default per robot kind
  std::string kind = "force";  // force | velocity | residual
  bool bias_gravity = false;
  std::vector<double> bias_wrench;  // nominal task wrench f_n
  std::string format = "json";      // json | off | csv
  std::string output;
  int threads = 1;
};

inline int cmd_polytope(const PolytopeCmd& cmd, std::ostream& out, std::ostream& err) {
  return run_guarded(
      [&]() -> int {
        const RobotModel model = load_robot_model(cmd.model_file);
        const TaskFrame frame = cmd.task.empty() ? default_frame(model) : TaskFrame::parse(cmd.task);
        const JointConfig q = to_vector(cmd.q);
        check_config(model, q);

        SearchOptions opts;
        opts.threads = cmd.threads;

        const Eigen::MatrixXd J = jacobian(model, q, frame);
        VertexSet vs;
        if (cmd.kind == "velocity") {
          if (cmd.bias_gravity || !cmd.bias_wrench.empty())
            throw InputError("--bias-g/--bias-n apply to force-type polytopes only");
          vs = velocity_polytope_vertices(J, TorqueBox(model.vel_lower(), model.vel_upper()),
                                          opts);
        } else if (cmd.kind == "force" || cmd.kind == "residual") {
          Eigen::VectorXd lo = model.torque_lower();
          Eigen::VectorXd hi = model.torque_upper();
          if (cmd.kind == "residual") {
            if (!cmd.bias_gravity && cmd.bias_wrench.empty())
              throw InputError("--kind residual needs --bias-g and/or --bias-n");
            const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.dof());
            Eigen::VectorXd tau_g = zero, tau_n = zero;
            if (cmd.bias_gravity) tau_g = gravity_torque(model, q);
            if (!cmd.bias_wrench.empty()) {
              if (static_cast<int>(cmd.bias_wrench.size()) != frame.dim())
                throw InputError("--bias-n needs one component per task axis");
              tau_n = J.transpose() * to_vector(cmd.bias_wrench);
            }
            const ResidualLimits rl = residual_limits(lo, hi, tau_g, zero, tau_n);
            if (rl.warning()) {
              err << "warning: bias exceeds one-sided capacity at joint(s)";
              for (int i : rl.biased_out) err << " " << i;
              err << "\n";
            }
            lo = rl.lo;
            hi = rl.hi;
          } else if (cmd.bias_gravity || !cmd.bias_wrench.empty()) {
            throw InputError("--bias-g/--bias-n require --kind residual");
          }
          vs = force_polytope_vertices(J, TorqueBox(lo, hi), opts);
        } else {
          throw InputError("unknown polytope kind '" + cmd.kind + "'");
        }

        err << "model=" << model.name << " n=" << model.dof() << " task=" << frame.to_string()
            << " kind=" << cmd.kind << " vertices=" << vs.size() << "\n";

        // Facets exist for task dims up to 3; JSON and CSV work for any dim.
        if (cmd.format == "json") {
          const nlohmann::json doc =
              vs.task_dim <= 3
                  ? polytope_to_json(polytope_from_vertices(vs), axis_names(frame), cmd.kind)
                  : vertexset_to_json(vs, axis_names(frame), cmd.kind);
          write_artifact(doc.dump(2) + "\n", cmd.output, out);
        } else if (cmd.format == "off") {
          write_artifact(polytope_to_off(polytope_from_vertices(vs)), cmd.output, out);
        } else if (cmd.format == "csv") {
          write_artifact(vertices_to_csv(vs, axis_names(frame)), cmd.output, out);
        } else {
          throw InputError("unknown output format '" + cmd.format + "'");
        }
        return kOk;
      },
      err);
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchCmd {
  std::string model_file;
  std::string task;
  int trials = 1000;
  std::uint64_t seed = 1;
  bool baseline = false;
  int threads = 1;
  std::string csv_output;
};

inline std::string bench_console_row(const BenchRecord& r) {
  std::ostringstream os;
  os << std::left << std::setw(12) << r.robot << std::setw(9) << r.algorithm << "(" << r.n << ","
     << r.m << ")  solved " << std::fixed << std::setprecision(1) << r.systems_mean << "+/-"
     << r.systems_sd << " (" << r.systems_max << ") of " << r.faces_total << "  time[us] "
     << std::setprecision(1) << r.runtime_us_mean << "+/-" << r.runtime_us_sd << " ("
     << r.runtime_us_max << ")";
  return os.str();
}

inline int cmd_bench(const BenchCmd& cmd, std::ostream& out, std::ostream& err) {
  return run_guarded(
      [&]() -> int {
        const RobotModel model = load_robot_model(cmd.model_file);
        const TaskFrame frame = cmd.task.empty() ? default_frame(model) : TaskFrame::parse(cmd.task);
        BenchOptions opts;
        opts.trials = cmd.trials;
        opts.seed = cmd.seed;
        opts.baseline = cmd.baseline;
        opts.threads = cmd.threads;

        const BenchResult res = run_bench(model, frame, opts);
        out << bench_console_row(res.reduced) << "\n";
        if (res.has_full) out << bench_console_row(res.full) << "\n";
        out << "trials=" << res.reduced.trials << " seed=" << res.reduced.seed
            << " rejected_samples=" << res.reduced.rejected_samples
            << " (near-singular resampled at sv ratio 1e-4)\n";
        if (res.has_full) {
          out << "baseline mismatches=" << res.full.mismatches << "\n";
          if (res.full.mismatches > 0) {
            err << "error: reduced and full paths disagree on " << res.full.mismatches
                << " trial(s)\n";
            return kInputError;
          }
        }

        std::string csv = bench_csv_header() + bench_csv_row(res.reduced);
        if (res.has_full) csv += bench_csv_row(res.full);
        if (cmd.csv_output.empty()) out << csv;
        else write_artifact(csv, cmd.csv_output, out);
        return kOk;
      },
      err);
}

// ---------------------------------------------------------------------------
// combine
// ---------------------------------------------------------------------------

struct CombineCmd {
  std::string model1, model2;
  std::vector<double> q1, q2;
  std::string task;
  std::string op = "sum";  // sum | intersect
  std::string format = "json";
  std::string output;
  int threads = 1;
};

inline int cmd_combine(const CombineCmd& cmd, std::ostream& out, std::ostream& err) {
  return run_guarded(
      [&]() -> int {
        const RobotModel m1 = load_robot_model(cmd.model1);
        const RobotModel m2 = load_robot_model(cmd.model2);
        const TaskFrame frame = cmd.task.empty() ? default_frame(m1) : TaskFrame::parse(cmd.task);
        const JointConfig q1 = to_vector(cmd.q1);
        const JointConfig q2 = to_vector(cmd.q2);
        SearchOptions opts;
        opts.threads = cmd.threads;

        const Eigen::MatrixXd J1 = jacobian(m1, q1, frame);
        const Eigen::MatrixXd J2 = jacobian(m2, q2, frame);
        const TorqueBox box1(m1.torque_lower(), m1.torque_upper());
        const TorqueBox box2(m2.torque_lower(), m2.torque_upper());

        Polytope poly;
        if (cmd.op == "sum") {
          const Polytope p1 = polytope_from_vertices(force_polytope_vertices(J1, box1, opts));
          const Polytope p2 = polytope_from_vertices(force_polytope_vertices(J2, box2, opts));
          poly = minkowski_sum(p1, p2);
        } else if (cmd.op == "intersect") {
          poly = intersection_stacked(J1, J2, box1, box2, opts);
        } else {
          throw InputError("unknown combine op '" + cmd.op + "'");
        }

        err << "robots=" << m1.name << "+" << m2.name << " task=" << frame.to_string()
            << " op=" << cmd.op << " vertices=" << poly.vertices().size() << "\n";

        const std::string kind = cmd.op == "sum" ? "minkowski-sum" : "intersection";
        if (cmd.format == "json") {
          write_artifact(polytope_to_json(poly, axis_names(frame), kind).dump(2) + "\n",
                         cmd.output, out);
        } else if (cmd.format == "off") {
          write_artifact(polytope_to_off(poly), cmd.output, out);
        } else if (cmd.format == "csv") {
          write_artifact(vertices_to_csv(poly, axis_names(frame)), cmd.output, out);
        } else {
          throw InputError("unknown output format '" + cmd.format + "'");
        }
        return kOk;
      },
      err);
}

// ---------------------------------------------------------------------------
// loadshare
// ---------------------------------------------------------------------------

struct LoadShareCmd {
  std::string scenario_file;
  std::string policy = "adaptive";  // adaptive | fixed:<lambda>
  std::string output;
};

inline LoadSharePolicy parse_policy(const std::string& text) {
  if (text == "adaptive") return LoadSharePolicy::adaptive();
  if (text.rfind("fixed:", 0) == 0) {
    const double lam = std::stod(text.substr(6));
    if (!(lam >= 0.0 && lam <= 1.0)) throw InputError("fixed lambda must be in [0,1]");
    return LoadSharePolicy::fixed(lam);
  }
  throw InputError("unknown policy '" + text + "' (want adaptive or fixed:<lambda>)");
}

inline int cmd_loadshare(const LoadShareCmd& cmd, std::ostream& out, std::ostream& err) {
  return run_guarded(
      [&]() -> int {
        const DualArmScenario scenario = load_scenario(cmd.scenario_file);
        const LoadSharePolicy policy = parse_policy(cmd.policy);
        const LoadShareTrace trace = simulate(scenario, policy);
        write_artifact(trace_to_csv(trace), cmd.output, out);
        err << "steps=" << trace.steps.size()
            << " infeasible_adaptive=" << trace.infeasible_adaptive()
            << " infeasible_half=" << trace.infeasible_half() << " payload_kg="
            << scenario.payload_mass << "\n";
        return kOk;
      },
      err);
}

}  // namespace polycap::cli
