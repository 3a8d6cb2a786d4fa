#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "polycap/kinematics.hpp"
#include "polycap/model.hpp"
#include "polycap/serialization.hpp"
#include "polycap/vertex_search.hpp"

namespace polycap {

namespace detail {

// splitmix64: decorrelates per-trial streams from one master seed, so the
// sampled configurations do not depend on how trials are scheduled.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Deterministic uniform double in [lo, hi) from raw generator bits;
/// avoids std::uniform_real_distribution, whose output is
/// implementation-defined.
class SeededUniform {
public:
  explicit SeededUniform(std::uint64_t seed) : state_(seed) {}

  double next(double lo = 0.0, double hi = 1.0) {
    state_ = splitmix64(state_);
    const double u = static_cast<double>(state_ >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  Eigen::VectorXd vector(int n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = next(lo, hi);
    return v;
  }

private:
  std::uint64_t state_;
};

}  // namespace detail

/// Uniform random configuration in [-pi, pi]^n, rejecting samples whose
/// restricted Jacobian is near singular. Returns the accepted configuration
/// and counts the rejections.
inline JointConfig sample_nonsingular_config(const RobotModel& model, const TaskFrame& frame,
                                             std::uint64_t seed, int* rejected = nullptr,
                                             double reject_ratio = 1e-4) {
  detail::SeededUniform rng(detail::splitmix64(seed));
  const int n = model.dof();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const JointConfig q = rng.vector(n, -std::numbers::pi, std::numbers::pi);
    const Eigen::MatrixXd J = jacobian(model, q, frame);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] > reject_ratio * sv[0]) return q;
    if (rejected) ++*rejected;
  }
  throw CapacityError("could not sample a nonsingular configuration for robot '" + model.name +
                      "'");
}

struct BenchOptions {
  int trials = 1000;
  std::uint64_t seed = 1;
  bool baseline = false;  // also run and verify the unreduced full-system path
  int threads = 1;
  int warmup = 5;
  double reject_ratio = 1e-4;
  SearchOptions search;
};

/// One benchmark row: per-trial statistics of solved systems, pruning and
/// latency for one robot/algorithm pair.
struct BenchRecord {
  std::string robot;
  std::string algorithm;  // "reduced" or "full"
  int n = 0, m = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  long faces_total = 0;
  double systems_mean = 0.0, systems_sd = 0.0;
  long systems_max = 0;
  double pruned_mean = 0.0;
  double runtime_us_mean = 0.0, runtime_us_sd = 0.0, runtime_us_max = 0.0;
  double runtime_us_median = 0.0;
  long rejected_samples = 0;
  int mismatches = 0;  // baseline-vs-reduced disagreements (expected 0)
};

namespace detail {

struct Accum {
  std::vector<double> values;
  void add(double v) { values.push_back(v); }
  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return values.empty() ? 0.0 : s / static_cast<double>(values.size());
  }
  double sd() const {
    if (values.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(values.size() - 1));
  }
  double max() const {
    double best = 0.0;
    for (double v : values) best = std::max(best, v);
    return best;
  }
  double median() const {
    if (values.empty()) return 0.0;
    std::vector<double> tmp = values;
    std::sort(tmp.begin(), tmp.end());
    const size_t mid = tmp.size() / 2;
    return tmp.size() % 2 ? tmp[mid] : 0.5 * (tmp[mid - 1] + tmp[mid]);
  }
};

}  // namespace detail

struct BenchResult {
  BenchRecord reduced;
  BenchRecord full;  // populated when baseline requested
  bool has_full = false;
};

/// Runs the vertex search over seeded random configurations and aggregates
/// solve-count and latency statistics. Trials may run on several workers; per-trial
/// seeds derive from the master seed, so the sampled configurations and all
/// non-timing statistics are identical for any worker count.
inline BenchResult run_bench(const RobotModel& model, const TaskFrame& frame,
                             const BenchOptions& opts) {
  if (opts.trials < 1) throw InputError("bench: trials must be >= 1");
  const int n = model.dof();
  const int m = frame.dim();
  const TorqueBox box(model.torque_lower(), model.torque_upper());

  struct Trial {
    long systems = 0, pruned = 0;
    double us = 0.0;
    long systems_full = 0;
    double us_full = 0.0;
    int rejected = 0;
    bool mismatch = false;
  };
  std::vector<Trial> trials(opts.trials);

  auto run_range = [&](int begin, int step) {
    for (int t = begin; t < opts.trials; t += step) {
      const std::uint64_t trial_seed =
          detail::splitmix64(opts.seed ^ (0x51ED2700 + static_cast<std::uint64_t>(t) * 2654435761u));
      Trial& tr = trials[t];
      const JointConfig q =
          sample_nonsingular_config(model, frame, trial_seed, &tr.rejected, opts.reject_ratio);
      const Eigen::MatrixXd J = jacobian(model, q, frame);

      const VertexSet vs = force_polytope_vertices(J, box, opts.search);
      tr.systems = vs.stats.systems_solved;
      tr.pruned = vs.stats.faces_pruned_bounds;
      tr.us = static_cast<double>(vs.stats.runtime_ns) / 1000.0;

      if (opts.baseline) {
        const VertexSet ref = full_system_solve(J, box, opts.search);
        tr.systems_full = ref.stats.systems_solved;
        tr.us_full = static_cast<double>(ref.stats.runtime_ns) / 1000.0;
        const double diam = detail::bbox_diameter(ref.vertices);
        tr.mismatch = set_distance(vs, ref) > 1e-7 * std::max(diam, 1e-12);
      }
    }
  };

  // Warm-up on the first configuration keeps one-time costs out of the stats.
  {
    int scratch = 0;
    const std::uint64_t s0 = detail::splitmix64(opts.seed ^ 0x51ED2700ull);
    const JointConfig q = sample_nonsingular_config(model, frame, s0, &scratch, opts.reject_ratio);
    const Eigen::MatrixXd J = jacobian(model, q, frame);
    for (int w = 0; w < opts.warmup; ++w) force_polytope_vertices(J, box, opts.search);
  }

  const int workers = std::max(1, std::min(opts.threads, opts.trials));
  if (workers == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_range, w, workers);
    for (auto& th : pool) th.join();
  }

  detail::Accum sys, pruned, us, sys_full, us_full;
  long rejected = 0;
  int mismatches = 0;
  for (const Trial& tr : trials) {
    sys.add(static_cast<double>(tr.systems));
    pruned.add(static_cast<double>(tr.pruned));
    us.add(tr.us);
    rejected += tr.rejected;
    if (opts.baseline) {
      sys_full.add(static_cast<double>(tr.systems_full));
      us_full.add(tr.us_full);
      if (tr.mismatch) ++mismatches;
    }
  }

  auto fill = [&](BenchRecord& r, const detail::Accum& s, const detail::Accum& rt,
                  const std::string& algo) {
    r.robot = model.name;
    r.algorithm = algo;
    r.n = n;
    r.m = m;
    r.trials = opts.trials;
    r.seed = opts.seed;
    r.faces_total = detail::binomial(n, m);
    r.systems_mean = s.mean();
    r.systems_sd = s.sd();
    r.systems_max = static_cast<long>(s.max());
    r.pruned_mean = pruned.mean();
    r.runtime_us_mean = rt.mean();
    r.runtime_us_sd = rt.sd();
    r.runtime_us_max = rt.max();
    r.runtime_us_median = rt.median();
    r.rejected_samples = rejected;
    r.mismatches = mismatches;
  };

  BenchResult res;
  fill(res.reduced, sys, us, "reduced");
  if (opts.baseline) {
    fill(res.full, sys_full, us_full, "full");
    res.full.pruned_mean = 0.0;
    res.has_full = true;
  }
  return res;
}

inline std::string bench_csv_header() {
  return "robot,algorithm,n,m,trials,seed,faces_total,systems_mean,systems_sd,systems_max,"
         "pruned_mean,runtime_us_mean,runtime_us_sd,runtime_us_max,runtime_us_median,"
         "rejected_samples,mismatches\n";
}

inline std::string bench_csv_row(const BenchRecord& r) {
  std::ostringstream os;
  os << r.robot << "," << r.algorithm << "," << r.n << "," << r.m << "," << r.trials << ","
     << r.seed << "," << r.faces_total << "," << fmt_double(r.systems_mean) << ","
     << fmt_double(r.systems_sd) << "," << r.systems_max << "," << fmt_double(r.pruned_mean)
     << "," << fmt_double(r.runtime_us_mean) << "," << fmt_double(r.runtime_us_sd) << ","
     << fmt_double(r.runtime_us_max) << "," << fmt_double(r.runtime_us_median) << ","
     << r.rejected_samples << "," << r.mismatches << "\n";
  return os.str();
}

}  // namespace polycap
