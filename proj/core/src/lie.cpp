#include "grasplab/lie.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace grasplab::lie {

Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return m;
}

bool is_valid_rotation(const Mat3& R, double tol) {
  const Mat3 err = R.transpose() * R - Mat3::Identity();
  return err.cwiseAbs().maxCoeff() < tol && std::abs(R.determinant() - 1.0) < tol;
}

Mat3 so3_exp(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 W = hat(omega);
  if (theta < kSmallAngle) {
    return Mat3::Identity() + W + 0.5 * W * W;
  }
  const double s = std::sin(theta) / theta;
  const double c = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + s * W + c * W * W;
}

Vec3 so3_log(const Mat3& R) {
  const double tr = R.trace();
  if (tr <= -1.0 + 1e-9) {
    throw std::domain_error("so3_log: rotation angle at or near pi, principal branch undefined");
  }
  const double c = std::clamp(0.5 * (tr - 1.0), -1.0, 1.0);
  const double theta = std::acos(c);
  Vec3 axis_unnorm(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  if (theta < kSmallAngle) {
    // log(R) ~ (R - R^T)/2 to second order.
    return 0.5 * axis_unnorm;
  }
  return (theta / (2.0 * std::sin(theta))) * axis_unnorm;
}

Mat3 so3_left_jacobian(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 W = hat(omega);
  if (theta < kSmallAngle) {
    return Mat3::Identity() + 0.5 * W + (1.0 / 6.0) * W * W;
  }
  const double t2 = theta * theta;
  const double a = (1.0 - std::cos(theta)) / t2;
  const double b = (theta - std::sin(theta)) / (t2 * theta);
  return Mat3::Identity() + a * W + b * W * W;
}

Mat3 so3_left_jacobian_inverse(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 W = hat(omega);
  if (theta < kSmallAngle) {
    return Mat3::Identity() - 0.5 * W + (1.0 / 12.0) * W * W;
  }
  const double half = 0.5 * theta;
  const double cot_term = 1.0 / (theta * theta) - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  (void)half;
  return Mat3::Identity() - 0.5 * W + cot_term * W * W;
}

Pose se3_exp(const Twist& xi) {
  const Vec3 v = xi.head<3>();
  const Vec3 w = xi.tail<3>();
  Pose g;
  g.R = so3_exp(w);
  g.t = so3_left_jacobian(w) * v;
  return g;
}

Twist se3_log(const Pose& g) {
  const Vec3 w = so3_log(g.R);
  const Vec3 v = so3_left_jacobian_inverse(w) * g.t;
  Twist xi;
  xi << v, w;
  return xi;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.R = a.R * b.R;
  out.t = a.R * b.t + a.t;
  return out;
}

Pose inverse(const Pose& a) {
  Pose out;
  out.R = a.R.transpose();
  out.t = -(out.R * a.t);
  return out;
}

Vec3 transform_point(const Pose& g, const Vec3& p) { return g.R * p + g.t; }

Mat6 se3_ad(const Twist& xi) {
  const Vec3 v = xi.head<3>();
  const Vec3 w = xi.tail<3>();
  Mat6 ad = Mat6::Zero();
  ad.block<3, 3>(0, 0) = hat(w);
  ad.block<3, 3>(0, 3) = hat(v);
  ad.block<3, 3>(3, 3) = hat(w);
  return ad;
}

Mat6 se3_left_jacobian(const Twist& xi) {
  // J_l = sum_{n>=0} ad^n / (n+1)!. Terms decay factorially; 40 terms is
  // far past double precision for any rotation angle below pi.
  const Mat6 ad = se3_ad(xi);
  Mat6 sum = Mat6::Identity();
  Mat6 term = Mat6::Identity();
  for (int n = 1; n <= 40; ++n) {
    term = term * ad / static_cast<double>(n + 1);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  return sum;
}

Mat6 se3_right_jacobian(const Twist& xi) { return se3_left_jacobian(-xi); }

Twist sample_tangent_normal(RandomStream& rng) {
  Twist eps;
  for (int i = 0; i < 6; ++i) eps[i] = rng.normal();
  return eps;
}

Pose perturb(const Pose& g, double sigma, RandomStream& rng) {
  if (sigma < 0.0) throw std::invalid_argument("perturb: sigma must be nonnegative");
  const Twist eps = sample_tangent_normal(rng);
  if (sigma == 0.0) return g;
  return compose(g, se3_exp(Twist(sigma * eps)));
}

Twist zeta_score(const Pose& gamma, const Pose& g, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("zeta_score: sigma must be positive");
  const Twist xi = se3_log(compose(inverse(g), gamma));
  const Mat6 jr = se3_right_jacobian(xi);
  const Twist jr_inv_t_xi = jr.transpose().partialPivLu().solve(xi);
  return -jr_inv_t_xi / (sigma * sigma);
}

Twist squared_geodesic_gradient(const Pose& g, const Pose& ref) {
  const Twist xi = se3_log(compose(inverse(ref), g));
  const Mat6 jr = se3_right_jacobian(xi);
  return jr.transpose().partialPivLu().solve(xi);
}

double rotation_angle(const Mat3& R) {
  const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  return std::acos(c);
}

PoseDistance pose_distance(const Pose& a, const Pose& b) {
  PoseDistance d;
  d.angle = rotation_angle(Mat3(a.R.transpose() * b.R));
  d.translation = (a.t - b.t).norm();
  return d;
}

Mat3 random_rotation(RandomStream& rng) {
  // Shoemake: uniform quaternion from three uniforms.
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double u3 = rng.uniform();
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  const double qx = a * std::sin(2.0 * M_PI * u2);
  const double qy = a * std::cos(2.0 * M_PI * u2);
  const double qz = b * std::sin(2.0 * M_PI * u3);
  const double qw = b * std::cos(2.0 * M_PI * u3);
  Eigen::Quaterniond q(qw, qx, qy, qz);
  return q.normalized().toRotationMatrix();
}

}  // namespace grasplab::lie
