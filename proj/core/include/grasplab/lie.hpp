#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "grasplab/random.hpp"

namespace grasplab::lie {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Twist = Eigen::Matrix<double, 6, 1>;  // (v, omega): meters, radians
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Angle below which exp/log switch to series expansions.
inline constexpr double kSmallAngle = 1e-8;

/// Rigid transform on SE(3). The rotation block is kept orthonormal by
/// construction; all perturbations compose on the right: g * exp(xi).
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  static Pose identity() { return Pose{}; }
};

Mat3 hat(const Vec3& w);

bool is_valid_rotation(const Mat3& R, double tol = 1e-9);

/// Rodrigues formula; second-order series below kSmallAngle.
Mat3 so3_exp(const Vec3& omega);

/// Principal-branch inverse of so3_exp. Throws std::domain_error when the
/// rotation angle is within 1e-9 of pi (trace <= -1 + 1e-9).
Vec3 so3_log(const Mat3& R);

Mat3 so3_left_jacobian(const Vec3& omega);
Mat3 so3_left_jacobian_inverse(const Vec3& omega);

Pose se3_exp(const Twist& xi);
Twist se3_log(const Pose& g);

Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& a);
Vec3 transform_point(const Pose& g, const Vec3& p);

/// ad_xi for the (v, omega) ordering.
Mat6 se3_ad(const Twist& xi);

/// 6x6 left/right Jacobians of the SE(3) exponential, evaluated by the
/// convergent series sum ad^n/(n+1)!.
Mat6 se3_left_jacobian(const Twist& xi);
Mat6 se3_right_jacobian(const Twist& xi);

/// Standard 6-D normal tangent draw.
Twist sample_tangent_normal(RandomStream& rng);

/// g * exp(sigma * eps), eps ~ N(0, I6). sigma = 0 returns g unchanged.
Pose perturb(const Pose& g, double sigma, RandomStream& rng);

/// Right-trivialized gradient of log zeta(gamma | g, sigma^2 I) where
/// zeta is proportional to exp(-||Log(g^-1 gamma)||^2 / (2 sigma^2)) with
/// respect to Haar measure. Equals -J_r(xi)^-T xi / sigma^2 for
/// xi = Log(g^-1 gamma); the Jacobian transpose factor is what makes
/// finite differences along right perturbations agree exactly.
Twist zeta_score(const Pose& gamma, const Pose& g, double sigma);

/// Right-trivialized gradient of 1/2 ||Log(ref^-1 g)||^2.
Twist squared_geodesic_gradient(const Pose& g, const Pose& ref);

struct PoseDistance {
  double angle = 0.0;        // radians
  double translation = 0.0;  // meters
};

PoseDistance pose_distance(const Pose& a, const Pose& b);

/// Rotation angle of R in [0, pi]; total function (no branch restriction).
double rotation_angle(const Mat3& R);

/// Uniform random rotation (Shoemake quaternion method).
Mat3 random_rotation(RandomStream& rng);

}  // namespace grasplab::lie
