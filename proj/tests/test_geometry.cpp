#include <gtest/gtest.h>

#include <cmath>

#include "polycap/polycap.hpp"
#include "test_util.hpp"

using namespace polycap;
using test_util::load_fixture;

namespace {

std::vector<Eigen::VectorXd> square_corners() {
  return {Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, -1), Eigen::Vector2d(1, 1),
          Eigen::Vector2d(-1, 1)};
}

std::vector<Eigen::VectorXd> cube_corners() {
  std::vector<Eigen::VectorXd> pts;
  for (int b = 0; b < 8; ++b)
    pts.push_back(Eigen::Vector3d((b & 1) ? 1 : -1, (b & 2) ? 1 : -1, (b & 4) ? 1 : -1));
  return pts;
}

Polytope fixture_force_polytope(const std::string& file, const TaskFrame& frame,
                                std::uint64_t seed) {
  RobotModel m = load_fixture(file);
  int rejected = 0;
  const JointConfig q = sample_nonsingular_config(m, frame, seed, &rejected);
  const Eigen::MatrixXd J = jacobian(m, q, frame);
  return polytope_from_vertices(
      force_polytope_vertices(J, TorqueBox(m.torque_lower(), m.torque_upper())));
}

Eigen::VectorXd random_direction(detail::SeededUniform& rng, int dim) {
  while (true) {
    Eigen::VectorXd d = rng.vector(dim, -1.0, 1.0);
    if (d.norm() > 1e-3) return d / d.norm();
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// hull
// ---------------------------------------------------------------------------

TEST(Hull, UnitSquare) {
  const Polytope P = hull(square_corners());
  EXPECT_EQ(P.vertices().size(), 4u);
  EXPECT_EQ(P.facets.size(), 4u);
  EXPECT_EQ(P.halfspaces.size(), 4u);
  EXPECT_FALSE(P.degenerate);
}

TEST(Hull, Cube) {
  const Polytope P = hull(cube_corners());
  EXPECT_EQ(P.vertices().size(), 8u);
  EXPECT_EQ(P.facets.size(), 12u);  // triangulated
  EXPECT_EQ(P.halfspaces.size(), 6u);
  EXPECT_FALSE(P.degenerate);
}

TEST(Hull, InteriorCloudDisappears) {
  // 100 random points inside the unit disc plus the square's corners.
  detail::SeededUniform rng(77);
  std::vector<Eigen::VectorXd> pts = square_corners();
  for (int i = 0; i < 100; ++i) {
    while (true) {
      Eigen::Vector2d p(rng.next(-1.0, 1.0), rng.next(-1.0, 1.0));
      if (p.norm() <= 0.999) {
        pts.push_back(p);
        break;
      }
    }
  }
  const Polytope P = hull(pts);
  ASSERT_EQ(P.vertices().size(), 4u);
  // brute-force support check: hull must equal the square on every direction
  const Polytope square = hull(square_corners());
  detail::SeededUniform dir_rng(78);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd d = random_direction(dir_rng, 2);
    EXPECT_NEAR(support(P, d), support(square, d), 1e-12);
  }
}

TEST(Hull, EmptyInputRejected) {
  EXPECT_THROW(hull({}), InputError);
}

TEST(Hull, DegenerateInputsFlagged) {
  std::vector<Eigen::VectorXd> collinear = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1),
                                            Eigen::Vector2d(2, 2)};
  const Polytope P = hull(collinear);
  EXPECT_TRUE(P.degenerate);
  EXPECT_TRUE(P.facets.empty());
  EXPECT_THROW(contains(P, Eigen::Vector2d(0.5, 0.5), 1e-9), DegenerateError);

  std::vector<Eigen::VectorXd> coplanar;
  for (const auto& p : square_corners())
    coplanar.push_back(Eigen::Vector3d(p[0], p[1], 0.0));
  EXPECT_TRUE(hull(coplanar).degenerate);
}

TEST(Hull, Idempotent) {
  detail::SeededUniform rng(11);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 60; ++i) pts.push_back(rng.vector(3, -2.0, 2.0));
  const Polytope P = hull(pts);
  const Polytope Q = hull(P.vertices());
  ASSERT_EQ(P.vertices().size(), Q.vertices().size());
  EXPECT_LE(set_distance(P.vset, Q.vset), 1e-12);
  EXPECT_EQ(P.facets.size(), Q.facets.size());
}

TEST(Hull, FacetNormalsPointOutward) {
  detail::SeededUniform rng(13);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < 40; ++i) pts.push_back(rng.vector(3, -1.0, 1.0));
    const Polytope P = hull(pts);
    ASSERT_FALSE(P.degenerate);
    for (const auto& hs : P.halfspaces)
      for (const auto& v : P.vertices())
        EXPECT_LE(hs.normal.dot(v), hs.offset + 1e-9);
    // facet winding consistent with the outward plane normal
    for (size_t fi = 0; fi < P.facets.size(); ++fi) {
      const auto& f = P.facets[fi];
      const Eigen::Vector3d a = P.vertices()[f[0]].head<3>();
      const Eigen::Vector3d b = P.vertices()[f[1]].head<3>();
      const Eigen::Vector3d c = P.vertices()[f[2]].head<3>();
      Eigen::Vector3d n = (b - a).cross(c - a);
      Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
      for (const auto& v : P.vertices()) centroid += v.head<3>();
      centroid /= static_cast<double>(P.vertices().size());
      EXPECT_GT(n.dot(a - centroid), 0.0) << "facet " << fi;
    }
  }
}

// ---------------------------------------------------------------------------
// minkowski_sum
// ---------------------------------------------------------------------------

TEST(Minkowski, CrossSegmentsMakeSquare) {
  VertexSet s1, s2;
  s1.task_dim = s2.task_dim = 2;
  s1.vertices = {Eigen::Vector2d(-1, 0), Eigen::Vector2d(1, 0)};
  s2.vertices = {Eigen::Vector2d(0, -1), Eigen::Vector2d(0, 1)};
  const Polytope S = minkowski_sum(polytope_from_vertices(s1), polytope_from_vertices(s2));
  ASSERT_EQ(S.vertices().size(), 4u);
  for (const auto& v : S.vertices()) {
    EXPECT_NEAR(std::abs(v[0]), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(v[1]), 1.0, 1e-12);
  }
}

TEST(Minkowski, SinglePointTranslates) {
  const Polytope P = hull(square_corners());
  VertexSet point;
  point.task_dim = 2;
  point.vertices = {Eigen::Vector2d(3.0, -2.0)};
  const Polytope T = minkowski_sum(P, polytope_from_vertices(point));
  ASSERT_EQ(T.vertices().size(), 4u);
  for (size_t i = 0; i < 4; ++i)
    EXPECT_LT((T.vertices()[i] - (P.vertices()[i] + Eigen::Vector2d(3.0, -2.0))).norm(), 1e-12);
}

TEST(Minkowski, SupportAdditivityOnRobotPolytopes) {
  const Polytope P = fixture_force_polytope("planar4r.json", TaskFrame::planar_xy(), 21);
  const Polytope Q = fixture_force_polytope("planar4r.json", TaskFrame::planar_xy(), 22);
  const Polytope S = minkowski_sum(P, Q);
  detail::SeededUniform rng(23);
  for (int i = 0; i < 360; ++i) {
    const Eigen::VectorXd d = random_direction(rng, 2);
    const double lhs = support(S, d);
    const double rhs = support(P, d) + support(Q, d);
    EXPECT_LE(std::abs(lhs - rhs), 1e-9 * std::max(1.0, std::abs(rhs))) << "dir " << i;
  }
}

TEST(Minkowski, DimMismatchRejected) {
  VertexSet seg;
  seg.task_dim = 1;
  seg.vertices = {Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)};
  EXPECT_THROW(minkowski_sum(polytope_from_vertices(seg), hull(square_corners())), InputError);
}

// ---------------------------------------------------------------------------
// intersection_stacked
// ---------------------------------------------------------------------------

TEST(Intersection, SelfIntersectionIsIdentity) {
  RobotModel m = load_fixture("planar3r.json");
  int rej = 0;
  const JointConfig q = sample_nonsingular_config(m, TaskFrame::planar_xy(), 31, &rej);
  const Eigen::MatrixXd J = jacobian(m, q, TaskFrame::planar_xy());
  const TorqueBox box(m.torque_lower(), m.torque_upper());
  const Polytope alone = polytope_from_vertices(force_polytope_vertices(J, box));
  const Polytope both = intersection_stacked(J, J, box, box);
  EXPECT_LE(set_distance(alone.vset, both.vset), 1e-7 * std::max(1.0, test_util::diameter(alone.vset)));
}

TEST(Intersection, SupersetCollapsesToSmaller) {
  RobotModel m = load_fixture("planar3r.json");
  int rej = 0;
  const JointConfig q1 = sample_nonsingular_config(m, TaskFrame::planar_xy(), 41, &rej);
  const JointConfig q2 = sample_nonsingular_config(m, TaskFrame::planar_xy(), 42, &rej);
  const Eigen::MatrixXd J1 = jacobian(m, q1, TaskFrame::planar_xy());
  const Eigen::MatrixXd J2 = jacobian(m, q2, TaskFrame::planar_xy());
  const TorqueBox box1(m.torque_lower(), m.torque_upper());
  const TorqueBox box2(10.0 * m.torque_lower(), 10.0 * m.torque_upper());
  // geometric halfspace oracle: P2 scaled 10x contains P1, so the
  // intersection is P1 itself whenever every P1 vertex satisfies P2's
  // constraints; verify that premise, then the collapse.
  const Polytope P1 = polytope_from_vertices(force_polytope_vertices(J1, box1));
  bool premise = true;
  for (const auto& v : P1.vertices()) {
    const Eigen::VectorXd tau = J2.transpose() * v;
    for (int i = 0; i < 3; ++i)
      premise = premise && tau[i] >= box2.lo[i] - 1e-9 && tau[i] <= box2.hi[i] + 1e-9;
  }
  ASSERT_TRUE(premise);
  const Polytope I = intersection_stacked(J1, J2, box1, box2);
  EXPECT_LE(set_distance(P1.vset, I.vset), 1e-7 * std::max(1.0, test_util::diameter(P1.vset)));
}

TEST(Intersection, MatchesCombinedHalfspaceOracle) {
  const std::vector<std::string> planar = {"planar2r.json", "planar3r.json", "planar4r.json"};
  for (const auto& file : planar) {
    RobotModel m = load_fixture(file);
    int rej = 0;
    const JointConfig q1 = sample_nonsingular_config(m, TaskFrame::planar_xy(), 51, &rej);
    const JointConfig q2 = sample_nonsingular_config(m, TaskFrame::planar_xy(), 52, &rej);
    const Eigen::MatrixXd J1 = jacobian(m, q1, TaskFrame::planar_xy());
    const Eigen::MatrixXd J2 = jacobian(m, q2, TaskFrame::planar_xy());
    const TorqueBox box(m.torque_lower(), m.torque_upper());

    const Polytope I = intersection_stacked(J1, J2, box, box);
    // oracle: vertex enumeration over the union of both 2n-halfspace systems
    Eigen::MatrixXd Jcat(2, m.dof() * 2);
    Jcat << J1, J2;
    Eigen::VectorXd lo(m.dof() * 2), hi(m.dof() * 2);
    lo << box.lo, box.lo;
    hi << box.hi, box.hi;
    const VertexSet oracle = oracle_halfspace_enum(Jcat, TorqueBox(lo, hi));
    EXPECT_LE(set_distance(I.vset, oracle), 1e-7 * std::max(1.0, test_util::diameter(oracle)))
        << file;
  }
}

TEST(Intersection, RankAndDimChecks) {
  Eigen::MatrixXd J1(2, 3), J2(3, 3);
  J1.setOnes();
  J2.setIdentity();
  EXPECT_THROW(intersection_stacked(J1, J2, TorqueBox(-Eigen::Vector3d::Ones(), Eigen::Vector3d::Ones()),
                                    TorqueBox(-Eigen::Vector3d::Ones(), Eigen::Vector3d::Ones())),
               InputError);
}

// ---------------------------------------------------------------------------
// ellipsoid
// ---------------------------------------------------------------------------

TEST(EllipsoidOp, IdentityGivesUnitBall) {
  const Eigen::MatrixXd J = Eigen::MatrixXd::Identity(3, 3);
  const TorqueBox box(-Eigen::Vector3d::Ones(), Eigen::Vector3d::Ones());
  for (EllipsoidKind kind : {EllipsoidKind::Force, EllipsoidKind::Velocity}) {
    const Ellipsoid e = ellipsoid(J, box, kind);
    EXPECT_LT((e.shape - Eigen::Matrix3d::Identity()).norm(), 1e-12);
    EXPECT_LT(e.center.norm(), 1e-12);
  }
}

TEST(EllipsoidOp, DiagonalVelocityCase) {
  Eigen::MatrixXd J(2, 2);
  J << 2.0, 0.0, 0.0, 1.0;
  const TorqueBox box(-Eigen::Vector2d::Ones(), Eigen::Vector2d::Ones());
  const Ellipsoid e = ellipsoid(J, box, EllipsoidKind::Velocity);
  // semi-axes 2 and 1: shape diag(1/4, 1)
  EXPECT_NEAR(e.shape(0, 0), 0.25, 1e-12);
  EXPECT_NEAR(e.shape(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(e.shape(0, 1), 0.0, 1e-12);
}

TEST(EllipsoidOp, ForceEllipsoidInsidePolytope) {
  RobotModel m = load_fixture("planar2r.json");
  int rej = 0;
  const JointConfig q = sample_nonsingular_config(m, TaskFrame::planar_xy(), 61, &rej);
  const Eigen::MatrixXd J = jacobian(m, q, TaskFrame::planar_xy());
  const TorqueBox box(m.torque_lower(), m.torque_upper());
  const Polytope P = polytope_from_vertices(force_polytope_vertices(J, box));
  const Ellipsoid e = ellipsoid(J, box, EllipsoidKind::Force);
  detail::SeededUniform rng(62);
  for (int i = 0; i < 360; ++i) {
    const Eigen::VectorXd x = ellipsoid_boundary_point(e, random_direction(rng, 2));
    EXPECT_TRUE(contains(P, x, 1e-7)) << "sample " << i;
  }
}

TEST(EllipsoidOp, BoundaryPointsSatisfyQuadric) {
  RobotModel m = load_fixture("panda7.json");
  int rej = 0;
  const JointConfig q = sample_nonsingular_config(m, TaskFrame::linear_xyz(), 63, &rej);
  const Eigen::MatrixXd J = jacobian(m, q, TaskFrame::linear_xyz());
  const Ellipsoid e =
      ellipsoid(J, TorqueBox(m.vel_lower(), m.vel_upper()), EllipsoidKind::Velocity);
  detail::SeededUniform rng(64);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd x = ellipsoid_boundary_point(e, random_direction(rng, 3));
    const double r = (x - e.center).dot(e.shape * (x - e.center));
    EXPECT_NEAR(r, 1.0, 1e-9);
  }
}

// ---------------------------------------------------------------------------
// contains / support
// ---------------------------------------------------------------------------

TEST(Contains, UnitSquareCases) {
  const Polytope P = hull(square_corners());
  EXPECT_TRUE(contains(P, Eigen::Vector2d(0, 0), 1e-9));
  EXPECT_FALSE(contains(P, Eigen::Vector2d(2, 0), 1e-9));
  for (const auto& v : P.vertices()) EXPECT_TRUE(contains(P, v, 1e-9));
}

TEST(Support, UnitSquareAndHomogeneity) {
  const Polytope P = hull(square_corners());
  EXPECT_NEAR(support(P, Eigen::Vector2d(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(support(P, Eigen::Vector2d(1, 1)), 2.0, 1e-15);
  // homogeneity under vertex scaling
  std::vector<Eigen::VectorXd> scaled;
  for (const auto& v : P.vertices()) scaled.push_back(2.5 * v);
  const Polytope cP = hull(scaled);
  detail::SeededUniform rng(65);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd d = random_direction(rng, 2);
    EXPECT_NEAR(support(cP, d), 2.5 * support(P, d), 1e-12);
  }
  EXPECT_THROW(support(P, Eigen::Vector2d(0, 0)), InputError);
}
