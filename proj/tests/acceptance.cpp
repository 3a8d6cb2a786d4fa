// Acceptance suite: runs every shipped criterion at its stated tolerance and
// prints one PASS/FAIL line each. Exits nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "polycap/polycap.hpp"

using namespace polycap;

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> body;
};

std::string models_dir = POLYCAP_MODELS_DIR;
std::string scenarios_dir = POLYCAP_SCENARIOS_DIR;

struct FixtureCase {
  std::string file;
  TaskFrame frame;
  long faces;  // C(n, m)
};

std::vector<FixtureCase> oracle_fixtures() {
  return {{"planar3r.json", TaskFrame::planar_xy(), 3},
          {"planar4r.json", TaskFrame::planar_xy(), 6},
          {"ur5_6dof.json", TaskFrame::linear_xyz(), 20},
          {"panda7.json", TaskFrame::linear_xyz(), 35}};
}

bool bit_equal(const VertexSet& a, const VertexSet& b) {
  if (a.vertices.size() != b.vertices.size()) return false;
  for (size_t i = 0; i < a.vertices.size(); ++i)
    if ((a.vertices[i].array() != b.vertices[i].array()).any()) return false;
  return true;
}

// Criteria 1 + 2: the 400 shared cases, oracle match at 1e-7 and
// reduced-vs-full match at 1e-9.
double worst_oracle = 0.0, worst_reduction = 0.0;
bool equivalence_ran = false;

void run_equivalence_cases() {
  if (equivalence_ran) return;
  equivalence_ran = true;
  for (const auto& fc : oracle_fixtures()) {
    RobotModel m = load_robot_model(models_dir + "/" + fc.file);
    const TorqueBox box(m.torque_lower(), m.torque_upper());
    for (int trial = 0; trial < 100; ++trial) {
      int rej = 0;
      const JointConfig q =
          sample_nonsingular_config(m, fc.frame, 0xACCE0000 + trial, &rej);
      const Eigen::MatrixXd J = jacobian(m, q, fc.frame);
      const VertexSet vs = force_polytope_vertices(J, box);
      const VertexSet oracle = oracle_halfspace_enum(J, box);
      const VertexSet full = full_system_solve(J, box);
      worst_oracle = std::max(set_distance(vs, oracle), worst_oracle);
      worst_reduction = std::max(set_distance(vs, full), worst_reduction);
    }
  }
}

}  // namespace

int main() {
  std::vector<Criterion> criteria;

  criteria.push_back({"oracle equivalence (4 fixtures x 100 seeded configs, tol 1e-7)",
                      [](std::string& detail) {
                        const auto t0 = std::chrono::steady_clock::now();
                        run_equivalence_cases();
                        const double secs =
                            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                .count();
                        detail = "max distance " + sci(worst_oracle) + ", " +
                                 sci(secs) + " s";
                        return worst_oracle <= 1e-7 && secs < 60.0;
                      }});

  criteria.push_back({"reduction equivalence (same 400 cases, tol 1e-9)",
                      [](std::string& detail) {
                        run_equivalence_cases();
                        detail = "max distance " + sci(worst_reduction);
                        return worst_reduction <= 1e-9;
                      }});

  criteria.push_back({"complexity bounds (solved <= C(n,m); pruning lowers the mean, never the set)",
                      [](std::string& detail) {
                        bool ok = true;
                        std::string acc;
                        for (const auto& fc : oracle_fixtures()) {
                          if (fc.file == "planar3r.json") continue;  // bench set is (4,2),(6,3),(7,3)
                          RobotModel m = load_robot_model(models_dir + "/" + fc.file);
                          const TorqueBox box(m.torque_lower(), m.torque_upper());
                          long max_solved = 0;
                          double mean_solved = 0.0;
                          const int trials = 100;
                          for (int trial = 0; trial < trials; ++trial) {
                            int rej = 0;
                            const JointConfig q = sample_nonsingular_config(
                                m, fc.frame, 0xBE7C0000 + trial, &rej);
                            const Eigen::MatrixXd J = jacobian(m, q, fc.frame);
                            SearchOptions prune_on, prune_off;
                            prune_off.prune_bounds = false;
                            const VertexSet a = force_polytope_vertices(J, box, prune_on);
                            const VertexSet b = force_polytope_vertices(J, box, prune_off);
                            if (!bit_equal(a, b)) ok = false;
                            if (a.stats.faces_total != fc.faces) ok = false;
                            max_solved = std::max(max_solved, a.stats.systems_solved);
                            mean_solved += static_cast<double>(a.stats.systems_solved) / trials;
                          }
                          if (max_solved > fc.faces) ok = false;
                          if (!(mean_solved < fc.faces)) ok = false;
                          acc += fc.file + " mean " + sci(mean_solved) + " max " +
                                 std::to_string(max_solved) + "/" + std::to_string(fc.faces) +
                                 "; ";
                        }
                        detail = acc;
                        return ok;
                      }});

  criteria.push_back({"timing (7,3) median <= 3 ms; load-share >= 40 eval/s for two 7-DoF arms",
                      [](std::string& detail) {
                        RobotModel m = load_robot_model(models_dir + "/panda7.json");
                        BenchOptions opts;
                        opts.trials = 100;
                        opts.seed = 71;
                        const BenchResult res = run_bench(m, TaskFrame::linear_xyz(), opts);
                        const double median_ms = res.reduced.runtime_us_median / 1000.0;

                        const DualArmScenario sc =
                            load_scenario(scenarios_dir + "/dual_panda_asym.json");
                        const auto t0 = std::chrono::steady_clock::now();
                        int evals = 0;
                        for (int rep = 0; rep < 20; ++rep) {
                          const LoadShareTrace tr = simulate(sc, LoadSharePolicy::adaptive());
                          evals += static_cast<int>(tr.steps.size());
                        }
                        const double secs =
                            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                .count();
                        const double rate = evals / secs;
                        detail = "median " + sci(median_ms) + " ms, " +
                                 sci(rate) + " eval/s";
                        return median_ms <= 3.0 && rate >= 40.0;
                      }});

  criteria.push_back({"ellipsoid underestimation (1000 boundary points x 50 configs per fixture)",
                      [](std::string& detail) {
                        const std::vector<std::pair<std::string, TaskFrame>> cases = {
                            {"planar2r.json", TaskFrame::planar_xy()},
                            {"planar3r.json", TaskFrame::planar_xy()},
                            {"planar4r.json", TaskFrame::planar_xy()},
                            {"ur5_6dof.json", TaskFrame::linear_xyz()},
                            {"panda7.json", TaskFrame::linear_xyz()}};
                        long outside = 0, tested = 0;
                        for (const auto& [file, frame] : cases) {
                          RobotModel m = load_robot_model(models_dir + "/" + file);
                          // symmetric limits premise: symmetrize where a fixture is not
                          Eigen::VectorXd mag =
                              m.torque_upper().cwiseMin(-m.torque_lower()).cwiseAbs();
                          const TorqueBox box = TorqueBox::symmetric(mag);
                          for (int cfg = 0; cfg < 50; ++cfg) {
                            int rej = 0;
                            const JointConfig q = sample_nonsingular_config(
                                m, frame, 0xE111 + cfg, &rej);
                            const Eigen::MatrixXd J = jacobian(m, q, frame);
                            const Polytope P =
                                polytope_from_vertices(force_polytope_vertices(J, box));
                            if (P.degenerate) return false;
                            const Ellipsoid e = ellipsoid(J, box, EllipsoidKind::Force);
                            const double tol =
                                1e-7 * std::max(1.0, detail::bbox_diameter(P.vertices()));
                            detail::SeededUniform rng(0xD1A + cfg);
                            for (int s = 0; s < 1000; ++s) {
                              Eigen::VectorXd u = rng.vector(frame.dim(), -1.0, 1.0);
                              if (u.norm() < 1e-9) u[0] = 1.0;
                              const Eigen::VectorXd x = ellipsoid_boundary_point(e, u);
                              ++tested;
                              if (!contains(P, x, tol)) ++outside;
                            }
                          }
                        }
                        detail = std::to_string(outside) + " of " + std::to_string(tested) +
                                 " samples escaped";
                        return outside == 0;
                      }});

  criteria.push_back({"residual translation (tau_n = J^T f_n shifts by -f_n, 50 cases, tol 1e-7)",
                      [](std::string& detail) {
                        const auto fixtures = oracle_fixtures();
                        double worst = 0.0;
                        for (int trial = 0; trial < 50; ++trial) {
                          const auto& fc = fixtures[trial % fixtures.size()];
                          RobotModel m = load_robot_model(models_dir + "/" + fc.file);
                          const TorqueBox box(m.torque_lower(), m.torque_upper());
                          int rej = 0;
                          const JointConfig q = sample_nonsingular_config(
                              m, fc.frame, 0x7A55 + trial, &rej);
                          const Eigen::MatrixXd J = jacobian(m, q, fc.frame);
                          detail::SeededUniform rng(0xF00 + trial);
                          const Eigen::VectorXd f_n = rng.vector(fc.frame.dim(), -3.0, 3.0);
                          const Eigen::VectorXd tau_n = J.transpose() * f_n;
                          const Eigen::VectorXd z = Eigen::VectorXd::Zero(m.dof());
                          const ResidualLimits rl =
                              residual_limits(box.lo, box.hi, z, z, tau_n);
                          const VertexSet base = force_polytope_vertices(J, box);
                          const VertexSet shifted =
                              force_polytope_vertices(J, TorqueBox(rl.lo, rl.hi));
                          std::vector<Eigen::VectorXd> expect;
                          for (const auto& v : base.vertices) expect.push_back(v - f_n);
                          worst = std::max(worst, set_distance(shifted.vertices, expect));
                        }
                        detail = "max distance " + sci(worst);
                        return worst <= 1e-7;
                      }});

  criteria.push_back({"multi-robot (support additivity on 360 dirs; stacked == halfspace oracle)",
                      [](std::string& detail) {
                        // Minkowski additivity on two planar4r polytopes
                        RobotModel m4 = load_robot_model(models_dir + "/planar4r.json");
                        const TorqueBox box4(m4.torque_lower(), m4.torque_upper());
                        int rej = 0;
                        const JointConfig qa =
                            sample_nonsingular_config(m4, TaskFrame::planar_xy(), 0xA1, &rej);
                        const JointConfig qb =
                            sample_nonsingular_config(m4, TaskFrame::planar_xy(), 0xA2, &rej);
                        const Polytope P = polytope_from_vertices(force_polytope_vertices(
                            jacobian(m4, qa, TaskFrame::planar_xy()), box4));
                        const Polytope Q = polytope_from_vertices(force_polytope_vertices(
                            jacobian(m4, qb, TaskFrame::planar_xy()), box4));
                        const Polytope S = minkowski_sum(P, Q);
                        detail::SeededUniform rng(0xA3);
                        double worst_rel = 0.0;
                        for (int i = 0; i < 360; ++i) {
                          Eigen::VectorXd d = rng.vector(2, -1.0, 1.0);
                          if (d.norm() < 1e-9) d[0] = 1.0;
                          d /= d.norm();
                          const double lhs = support(S, d);
                          const double rhs = support(P, d) + support(Q, d);
                          worst_rel =
                              std::max(worst_rel, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
                        }
                        if (worst_rel > 1e-9) {
                          detail = "support additivity off by " + sci(worst_rel);
                          return false;
                        }

                        // stacked intersection vs combined halfspace oracle, all planar fixtures
                        double worst = 0.0;
                        for (const char* file :
                             {"planar2r.json", "planar3r.json", "planar4r.json"}) {
                          RobotModel m = load_robot_model(models_dir + std::string("/") + file);
                          const TorqueBox box(m.torque_lower(), m.torque_upper());
                          int r2 = 0;
                          const JointConfig q1 = sample_nonsingular_config(
                              m, TaskFrame::planar_xy(), 0xB1, &r2);
                          const JointConfig q2 = sample_nonsingular_config(
                              m, TaskFrame::planar_xy(), 0xB2, &r2);
                          const Eigen::MatrixXd J1 = jacobian(m, q1, TaskFrame::planar_xy());
                          const Eigen::MatrixXd J2 = jacobian(m, q2, TaskFrame::planar_xy());
                          const Polytope I = intersection_stacked(J1, J2, box, box);
                          Eigen::MatrixXd Jcat(2, 2 * m.dof());
                          Jcat << J1, J2;
                          Eigen::VectorXd lo(2 * m.dof()), hi(2 * m.dof());
                          lo << box.lo, box.lo;
                          hi << box.hi, box.hi;
                          const VertexSet oracle =
                              oracle_halfspace_enum(Jcat, TorqueBox(lo, hi));
                          worst = std::max(worst, set_distance(I.vset, oracle));
                        }
                        detail += "intersection max distance " + sci(worst);
                        return worst <= 1e-7;
                      }});

  criteria.push_back({"load share (adaptive always feasible, fixed half saturates; f1+f2 = G)",
                      [](std::string& detail) {
                        const DualArmScenario sc =
                            load_scenario(scenarios_dir + "/dual_panda_asym.json");
                        const double G = sc.payload_mass * kStandardGravity;
                        const LoadShareTrace trace = simulate(sc, LoadSharePolicy::adaptive());
                        bool ok = trace.infeasible_adaptive() == 0 && trace.infeasible_half() >= 1;
                        for (const auto& s : trace.steps) {
                          if (s.f1 + s.f2 != G) ok = false;  // conservation, exact
                          const bool cap_ok = G <= s.F_max + 1e-6;
                          if (s.feasible_adaptive != cap_ok) ok = false;
                        }
                        detail = "adaptive infeasible " +
                                 std::to_string(trace.infeasible_adaptive()) + ", half " +
                                 std::to_string(trace.infeasible_half()) + " of " +
                                 std::to_string(trace.steps.size());
                        return ok;
                      }});

  criteria.push_back({"determinism (bit-identical across runs and worker counts)",
                      [](std::string& detail) {
                        RobotModel m = load_robot_model(models_dir + "/panda7.json");
                        const TorqueBox box(m.torque_lower(), m.torque_upper());
                        bool ok = true;
                        for (int trial = 0; trial < 20; ++trial) {
                          int rej = 0;
                          const JointConfig q = sample_nonsingular_config(
                              m, TaskFrame::linear_xyz(), 0xDE7 + trial, &rej);
                          const Eigen::MatrixXd J = jacobian(m, q, TaskFrame::linear_xyz());
                          SearchOptions one, four;
                          four.threads = 4;
                          const VertexSet a = force_polytope_vertices(J, box, one);
                          const VertexSet b = force_polytope_vertices(J, box, one);
                          const VertexSet c = force_polytope_vertices(J, box, four);
                          if (!bit_equal(a, b) || !bit_equal(a, c)) ok = false;
                          if (a.stats.systems_solved != c.stats.systems_solved) ok = false;
                        }
                        BenchOptions ba, bb;
                        ba.trials = bb.trials = 25;
                        ba.seed = bb.seed = 17;
                        ba.threads = 1;
                        bb.threads = 4;
                        const BenchResult ra = run_bench(m, TaskFrame::linear_xyz(), ba);
                        const BenchResult rb = run_bench(m, TaskFrame::linear_xyz(), bb);
                        if (ra.reduced.systems_mean != rb.reduced.systems_mean ||
                            ra.reduced.systems_max != rb.reduced.systems_max ||
                            ra.reduced.rejected_samples != rb.reduced.rejected_samples)
                          ok = false;
                        detail = "20 searches + seeded bench, 1 vs 4 workers";
                        return ok;
                      }});

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %zu: %s (%s)\n", ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  else std::printf("all %zu criteria passed\n", criteria.size());
  return failures == 0 ? 0 : 1;
}
