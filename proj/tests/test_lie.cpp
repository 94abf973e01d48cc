#include <cmath>

#include "doctest.h"
#include "grasplab/lie.hpp"

using namespace grasplab::lie;
using grasplab::RandomStream;

namespace {

Pose random_pose(RandomStream& rng, double rot_scale = 1.0, double trans_scale = 1.0) {
  Twist xi;
  for (int i = 0; i < 3; ++i) xi[i] = trans_scale * rng.normal();
  Vec3 axis(rng.normal(), rng.normal(), rng.normal());
  axis.normalize();
  const double angle = rot_scale * rng.uniform(0.0, M_PI - 0.2);
  xi.tail<3>() = angle * axis;
  return se3_exp(xi);
}

double log_zeta(const Pose& gamma, const Pose& g, double sigma) {
  const Twist xi = se3_log(compose(inverse(g), gamma));
  return -0.5 * xi.squaredNorm() / (sigma * sigma);
}

}  // namespace

TEST_CASE("so3_exp identity and quarter turn") {
  CHECK(so3_exp(Vec3::Zero()).isApprox(Mat3::Identity(), 1e-15));
  // Quarter turn about x maps e_y to e_z.
  const Mat3 R = so3_exp(Vec3(M_PI / 2, 0, 0));
  CHECK((R * Vec3::UnitY() - Vec3::UnitZ()).norm() < 1e-12);
  CHECK(is_valid_rotation(R, 1e-12));
}

TEST_CASE("so3_log basics") {
  CHECK(so3_log(Mat3::Identity()).norm() < 1e-15);
  const Vec3 w = so3_log(so3_exp(Vec3(0, 0, M_PI / 3)));
  CHECK((w - Vec3(0, 0, M_PI / 3)).norm() < 1e-12);
}

TEST_CASE("so3 exp/log roundtrip over 10k tangents") {
  RandomStream rng(101);
  double max_err = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Vec3 axis(rng.normal(), rng.normal(), rng.normal());
    axis.normalize();
    const Vec3 w = rng.uniform(1e-12, M_PI - 0.1) * axis;
    max_err = std::max(max_err, (so3_log(so3_exp(w)) - w).norm());
  }
  CHECK(max_err <= 1e-9);
}

TEST_CASE("so3_log reports angle near pi") {
  const Mat3 R = so3_exp(Vec3(M_PI - 1e-12, 0, 0));
  CHECK_THROWS_AS(so3_log(R), std::domain_error);
}

TEST_CASE("BCH first order: log(exp(a)exp(b)) - (a+b) shrinks quadratically") {
  RandomStream rng(7);
  Vec3 a0(rng.normal(), rng.normal(), rng.normal());
  Vec3 b0(rng.normal(), rng.normal(), rng.normal());
  a0.normalize();
  b0.normalize();
  double prev = -1.0;
  for (double t : {0.2, 0.1, 0.05, 0.025}) {
    const Vec3 a = t * a0, b = t * b0;
    const double err = (so3_log(so3_exp(a) * so3_exp(b)) - (a + b)).norm();
    if (prev > 0) {
      // Quadratic decay: halving t should cut the error by ~4.
      CHECK(err < prev / 2.5);
    }
    prev = err;
  }
}

TEST_CASE("se3 exp/log basics and roundtrip") {
  CHECK(se3_exp(Twist::Zero()).R.isApprox(Mat3::Identity(), 1e-15));
  CHECK(se3_exp(Twist::Zero()).t.norm() < 1e-15);

  Twist pure_t = Twist::Zero();
  pure_t.head<3>() = Vec3(1, 2, 3);
  const Pose g = se3_exp(pure_t);
  CHECK(g.R.isApprox(Mat3::Identity(), 1e-15));
  CHECK((g.t - Vec3(1, 2, 3)).norm() < 1e-15);

  RandomStream rng(5);
  double max_err = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Twist xi;
    for (int k = 0; k < 3; ++k) xi[k] = rng.normal();
    Vec3 axis(rng.normal(), rng.normal(), rng.normal());
    axis.normalize();
    xi.tail<3>() = rng.uniform(0.0, M_PI - 0.1) * axis;
    const Twist back = se3_log(se3_exp(xi));
    max_err = std::max(max_err, (back - xi).norm());
  }
  CHECK(max_err <= 1e-9);
}

TEST_CASE("group axioms") {
  RandomStream rng(13);
  for (int i = 0; i < 100; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    const Pose c = random_pose(rng);

    const Pose ai = compose(a, inverse(a));
    CHECK((ai.R - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ai.t.norm() < 1e-12);

    const Pose ib = compose(Pose::identity(), b);
    CHECK((ib.R - b.R).cwiseAbs().maxCoeff() < 1e-15);

    const Pose ab_c = compose(compose(a, b), c);
    const Pose a_bc = compose(a, compose(b, c));
    CHECK((ab_c.R - a_bc.R).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ab_c.t - a_bc.t).norm() < 1e-12);
  }
}

TEST_CASE("perturb: sigma zero is a no-op; draws are reproducible") {
  RandomStream rng(3);
  const Pose g = random_pose(rng);
  RandomStream r1(77), r2(77);
  const Pose same = perturb(g, 0.0, r1);
  CHECK((same.R - g.R).cwiseAbs().maxCoeff() == 0.0);
  const Pose p1 = perturb(g, 0.3, r1);
  (void)perturb(g, 0.0, r2);  // consume the same draw
  const Pose p2 = perturb(g, 0.3, r2);
  CHECK((p1.R - p2.R).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p1.t - p2.t).norm() == 0.0);
}

TEST_CASE("perturb matches the tangent normal law") {
  RandomStream rng(21);
  const Pose g = random_pose(rng);
  const double sigma = 0.2;
  const int n = 100000;
  Twist sum = Twist::Zero();
  Twist sumsq = Twist::Zero();
  RandomStream draw(2024);
  for (int i = 0; i < n; ++i) {
    const Pose p = perturb(g, sigma, draw);
    const Twist xi = se3_log(compose(inverse(g), p));
    sum += xi;
    sumsq += xi.cwiseProduct(xi);
  }
  const Twist mean = sum / n;
  const double mean_tol = 4.0 * sigma / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < 6; ++k) {
    CHECK(std::abs(mean[k]) < mean_tol);
    const double var = sumsq[k] / n - mean[k] * mean[k];
    CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.05));
  }
}

TEST_CASE("zeta_score vanishes at the kernel mode and scales as 1/sigma^2") {
  RandomStream rng(31);
  const Pose g = random_pose(rng);
  CHECK(zeta_score(g, g, 0.5).norm() < 1e-12);

  const Pose gamma = perturb(g, 0.1, rng);
  const Twist s1 = zeta_score(gamma, g, 0.3);
  const Twist s2 = zeta_score(gamma, g, 0.6);
  CHECK((s1 - 4.0 * s2).norm() < 1e-9 * s1.norm());
}

TEST_CASE("zeta_score matches central finite differences of log zeta") {
  RandomStream rng(47);
  double max_rel = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose g = random_pose(rng, 0.8);
    const double sigma = rng.uniform(0.01, 1.0);
    // Keep the relative twist well inside the principal branch.
    RandomStream sub = rng.fork(i);
    Twist off = sample_tangent_normal(sub) * 0.3;
    const Pose gamma = compose(g, se3_exp(off));
    const Twist score = zeta_score(gamma, g, sigma);
    Twist dir = sample_tangent_normal(sub);
    dir.normalize();
    const double h = 1e-6;
    const double fp = log_zeta(compose(gamma, se3_exp(Twist(h * dir))), g, sigma);
    const double fm = log_zeta(compose(gamma, se3_exp(Twist(-h * dir))), g, sigma);
    const double fd = (fp - fm) / (2 * h);
    const double an = score.dot(dir);
    const double rel = std::abs(fd - an) / std::max(1.0, std::abs(fd));
    max_rel = std::max(max_rel, rel);
  }
  CHECK(max_rel <= 1e-4);
}

TEST_CASE("pose_distance") {
  RandomStream rng(53);
  const Pose a = random_pose(rng);
  const PoseDistance zero = pose_distance(a, a);
  CHECK(zero.angle == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(zero.translation == 0.0);

  Pose b = a;
  b.t += Vec3(0.03, 0, 0);
  const PoseDistance dt = pose_distance(a, b);
  CHECK(dt.angle < 1e-9);
  CHECK(dt.translation == doctest::Approx(0.03));

  for (int i = 0; i < 20; ++i) {
    Vec3 axis(rng.normal(), rng.normal(), rng.normal());
    axis.normalize();
    Pose c = a;
    c.R = a.R * so3_exp(Vec3(M_PI / 6 * axis));
    CHECK(pose_distance(a, c).angle == doctest::Approx(M_PI / 6).epsilon(1e-9));
  }
}
