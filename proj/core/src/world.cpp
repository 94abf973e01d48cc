#include "grasplab/world.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace grasplab::world {

namespace {
constexpr double kRayEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double Primitive::bounding_radius_xy() const {
  switch (kind) {
    case PrimitiveKind::kBox: return std::hypot(size.x(), size.y());
    case PrimitiveKind::kCylinder: return size.x();
    case PrimitiveKind::kSphere: return size.x();
  }
  return 0.0;
}

double Primitive::top_height() const {
  switch (kind) {
    case PrimitiveKind::kBox: return pose.t.z() + size.z();
    case PrimitiveKind::kCylinder: return pose.t.z() + size.z();
    case PrimitiveKind::kSphere: return pose.t.z() + size.x();
  }
  return 0.0;
}

bool Aabb::contains(const Vec3& p, double margin) const {
  return p.x() >= lo.x() + margin && p.x() <= hi.x() - margin && p.y() >= lo.y() + margin &&
         p.y() <= hi.y() - margin && p.z() >= lo.z() + margin && p.z() <= hi.z() - margin;
}

// ---------------------------------------------------------------------------
// SDF
// ---------------------------------------------------------------------------

double sdf_primitive(const Primitive& prim, const Vec3& p) {
  const Vec3 q = prim.pose.R.transpose() * (p - prim.pose.t);
  switch (prim.kind) {
    case PrimitiveKind::kBox: {
      const Vec3 d = q.cwiseAbs() - prim.size;
      const Vec3 dpos = d.cwiseMax(0.0);
      const double outside = dpos.norm();
      const double inside = std::min(std::max({d.x(), d.y(), d.z()}), 0.0);
      return outside + inside;
    }
    case PrimitiveKind::kCylinder: {
      const double dr = std::hypot(q.x(), q.y()) - prim.size.x();
      const double dz = std::abs(q.z()) - prim.size.z();
      const double outr = std::max(dr, 0.0);
      const double outz = std::max(dz, 0.0);
      const double outside = std::hypot(outr, outz);
      const double inside = std::min(std::max(dr, dz), 0.0);
      return outside + inside;
    }
    case PrimitiveKind::kSphere:
      return q.norm() - prim.size.x();
  }
  return kInf;
}

double sdf(const WorldScene& scene, const Vec3& p) {
  double best = kInf;
  for (const Primitive& prim : scene.primitives) {
    best = std::min(best, sdf_primitive(prim, p));
  }
  return best;
}

double sdf_target(const WorldScene& scene, const Vec3& p) {
  return sdf_primitive(scene.target(), p);
}

double sdf_non_target(const WorldScene& scene, const Vec3& p) {
  double best = kInf;
  for (size_t i = 0; i < scene.primitives.size(); ++i) {
    if (static_cast<int>(i) == scene.target_index) continue;
    best = std::min(best, sdf_primitive(scene.primitives[i], p));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Raycasting
// ---------------------------------------------------------------------------

namespace {

struct LocalHit {
  bool hit = false;
  double t = kInf;
  Vec3 normal = Vec3::Zero();  // local frame
};

LocalHit ray_sphere(const Vec3& o, const Vec3& d, double r) {
  LocalHit out;
  const double b = o.dot(d);
  const double c = o.squaredNorm() - r * r;
  const double disc = b * b - c;
  if (disc < 0) return out;
  const double s = std::sqrt(disc);
  double t = -b - s;
  if (t <= kRayEps) t = -b + s;
  if (t <= kRayEps) return out;
  out.hit = true;
  out.t = t;
  out.normal = (o + t * d).normalized();
  return out;
}

LocalHit ray_box(const Vec3& o, const Vec3& d, const Vec3& half) {
  LocalHit out;
  double tmin = -kInf, tmax = kInf;
  int axis_min = -1;
  double sign_min = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-14) {
      if (std::abs(o[a]) > half[a]) return out;
      continue;
    }
    double t1 = (-half[a] - o[a]) / d[a];
    double t2 = (half[a] - o[a]) / d[a];
    double s = -1.0;
    if (t1 > t2) {
      std::swap(t1, t2);
      s = 1.0;
    }
    if (t1 > tmin) {
      tmin = t1;
      axis_min = a;
      sign_min = s;
    }
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return out;
  }
  double t = tmin;
  if (t <= kRayEps) {
    // Origin inside (or behind the entry face): take the exit.
    t = tmax;
    if (t <= kRayEps) return out;
    // Exit-face normal.
    const Vec3 p = o + t * d;
    int a = 0;
    double best = -kInf;
    for (int k = 0; k < 3; ++k) {
      const double depth = std::abs(p[k]) - half[k];
      if (depth > best) {
        best = depth;
        a = k;
      }
    }
    out.hit = true;
    out.t = t;
    out.normal = Vec3::Zero();
    out.normal[a] = p[a] >= 0 ? 1.0 : -1.0;
    return out;
  }
  out.hit = true;
  out.t = t;
  out.normal = Vec3::Zero();
  if (axis_min >= 0) out.normal[axis_min] = sign_min;
  return out;
}

LocalHit ray_cylinder(const Vec3& o, const Vec3& d, double r, double hh) {
  LocalHit best;
  // Side surface.
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 1e-14) {
    const double b = o.x() * d.x() + o.y() * d.y();
    const double c = o.x() * o.x() + o.y() * o.y() - r * r;
    const double disc = b * b - a * c;
    if (disc >= 0) {
      const double s = std::sqrt(disc);
      for (double t : {(-b - s) / a, (-b + s) / a}) {
        if (t > kRayEps && t < best.t) {
          const Vec3 p = o + t * d;
          if (std::abs(p.z()) <= hh) {
            best.hit = true;
            best.t = t;
            best.normal = Vec3(p.x(), p.y(), 0).normalized();
          }
        }
      }
    }
  }
  // Caps.
  if (std::abs(d.z()) > 1e-14) {
    for (double zc : {-hh, hh}) {
      const double t = (zc - o.z()) / d.z();
      if (t > kRayEps && t < best.t) {
        const Vec3 p = o + t * d;
        if (p.x() * p.x() + p.y() * p.y() <= r * r) {
          best.hit = true;
          best.t = t;
          best.normal = Vec3(0, 0, zc > 0 ? 1.0 : -1.0);
        }
      }
    }
  }
  return best;
}

}  // namespace

RayHit raycast(const WorldScene& scene, const Vec3& origin, const Vec3& dir) {
  RayHit out;
  out.t = kInf;
  for (size_t i = 0; i < scene.primitives.size(); ++i) {
    const Primitive& prim = scene.primitives[i];
    const Vec3 o = prim.pose.R.transpose() * (origin - prim.pose.t);
    const Vec3 d = prim.pose.R.transpose() * dir;
    LocalHit lh;
    switch (prim.kind) {
      case PrimitiveKind::kBox: lh = ray_box(o, d, prim.size); break;
      case PrimitiveKind::kCylinder: lh = ray_cylinder(o, d, prim.size.x(), prim.size.z()); break;
      case PrimitiveKind::kSphere: lh = ray_sphere(o, d, prim.size.x()); break;
    }
    if (lh.hit && lh.t < out.t) {
      out.hit = true;
      out.t = lh.t;
      out.primitive_index = static_cast<int>(i);
      out.normal = prim.pose.R * lh.normal;
    }
  }
  if (out.hit) out.point = origin + out.t * dir;
  return out;
}

ViewPose make_look_at(const Vec3& eye, const Vec3& center, int width, int height, double focal) {
  ViewPose v;
  v.width = width;
  v.height = height;
  v.focal = focal;
  v.cx = 0.5 * width;
  v.cy = 0.5 * height;
  const Vec3 z = (center - eye).normalized();
  Vec3 up(0, 0, 1);
  if (std::abs(z.dot(up)) > 0.999) up = Vec3(1, 0, 0);
  const Vec3 x = z.cross(up).normalized();
  const Vec3 y = z.cross(x);
  v.cam_to_world.R.col(0) = x;
  v.cam_to_world.R.col(1) = y;
  v.cam_to_world.R.col(2) = z;
  v.cam_to_world.t = eye;
  return v;
}

void pixel_ray(const ViewPose& view, int px, int py, Vec3* origin, Vec3* dir) {
  const Vec3 d_cam((px + 0.5 - view.cx) / view.focal, (py + 0.5 - view.cy) / view.focal, 1.0);
  *origin = view.cam_to_world.t;
  *dir = (view.cam_to_world.R * d_cam).normalized();
}

std::optional<double> raycast_depth(const WorldScene& scene, const ViewPose& view, int px, int py) {
  Vec3 o, d;
  pixel_ray(view, px, py, &o, &d);
  const RayHit hit = raycast(scene, o, d);
  if (!hit.hit) return std::nullopt;
  // Camera-frame z of the hit point.
  const Vec3 p_cam = view.cam_to_world.R.transpose() * (hit.point - view.cam_to_world.t);
  return p_cam.z();
}

DepthImage render_depth_image(const WorldScene& scene, const ViewPose& view) {
  DepthImage img;
  img.width = view.width;
  img.height = view.height;
  const int64_t n = static_cast<int64_t>(view.width) * view.height;
  img.depth.assign(static_cast<size_t>(n), 0.0);
  img.hit.assign(static_cast<size_t>(n), 0);
  img.semantic.assign(static_cast<size_t>(n), 0);
  for (int py = 0; py < view.height; ++py) {
    for (int px = 0; px < view.width; ++px) {
      Vec3 o, d;
      pixel_ray(view, px, py, &o, &d);
      const RayHit hit = raycast(scene, o, d);
      if (!hit.hit) continue;
      const int64_t i = img.index(px, py);
      const Vec3 p_cam = view.cam_to_world.R.transpose() * (hit.point - view.cam_to_world.t);
      img.depth[static_cast<size_t>(i)] = p_cam.z();
      img.hit[static_cast<size_t>(i)] = 1;
      img.semantic[static_cast<size_t>(i)] =
          (hit.primitive_index == scene.target_index) ? 1 : 0;
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Gripper + oracle
// ---------------------------------------------------------------------------

const std::array<Vec3, 5>& Gripper::anchors() {
  static const std::array<Vec3, 5> a = {
      Vec3(kFingerHalfSpan, 0, 0),  Vec3(-kFingerHalfSpan, 0, 0),
      Vec3(kFingerHalfSpan, 0, kMidFingerZ), Vec3(-kFingerHalfSpan, 0, kMidFingerZ),
      Vec3(0, 0, kPalmZ)};
  return a;
}

std::vector<Vec3> Gripper::skeleton_points(const Pose& grasp) {
  const auto& a = anchors();
  const Vec3 tip_l = a[0], tip_r = a[1], mid_l = a[2], mid_r = a[3], palm = a[4];
  std::vector<Vec3> pts;
  auto add_segment = [&](const Vec3& p, const Vec3& q, int k) {
    for (int i = 0; i <= k; ++i) {
      const double u = static_cast<double>(i) / k;
      pts.push_back(lie::transform_point(grasp, (1.0 - u) * p + u * q));
    }
  };
  add_segment(tip_l, mid_l, 4);
  add_segment(tip_r, mid_r, 4);
  add_segment(mid_l, palm, 4);
  add_segment(mid_r, palm, 4);
  return pts;
}

OracleBreakdown grasp_oracle_detail(const WorldScene& scene, const Pose& grasp) {
  OracleBreakdown out;
  const Vec3 closing = grasp.R.col(0);
  const Vec3 center = grasp.t;
  const Vec3 tip_l = lie::transform_point(grasp, Gripper::anchors()[0]);
  const Vec3 tip_r = lie::transform_point(grasp, Gripper::anchors()[1]);

  // (a) antipodal contact rays from both fingertips toward the closing axis.
  // Fingertips must start outside the target.
  if (sdf_target(scene, tip_l) <= 0.0 || sdf_target(scene, tip_r) <= 0.0) return out;
  const RayHit hit_l = raycast(scene, tip_l, -closing);
  const RayHit hit_r = raycast(scene, tip_r, closing);
  const bool contact_l = hit_l.hit && hit_l.primitive_index == scene.target_index &&
                         hit_l.t <= Gripper::kMaxOpening;
  const bool contact_r = hit_r.hit && hit_r.primitive_index == scene.target_index &&
                         hit_r.t <= Gripper::kMaxOpening;
  out.contact = contact_l && contact_r;
  if (!out.contact) return out;

  // (b) contact normals oppose the closing motion within the friction cone.
  out.friction = hit_l.normal.dot(closing) >= Gripper::kFrictionConeCos &&
                 hit_r.normal.dot(-closing) >= Gripper::kFrictionConeCos;

  // (c) gripper body clear of all non-target geometry.
  out.clearance = true;
  for (const Vec3& p : Gripper::skeleton_points(grasp)) {
    if (sdf_non_target(scene, p) < Gripper::kClearance) {
      out.clearance = false;
      break;
    }
  }

  // (d) grasp center inside the target's graspable band.
  out.band = sdf_target(scene, center) < 0.0 && scene.workspace.contains(center);
  return out;
}

GraspLabel grasp_oracle(const WorldScene& scene, const Pose& grasp) {
  return grasp_oracle_detail(scene, grasp).success() ? GraspLabel::kSuccess
                                                     : GraspLabel::kFailure;
}

// ---------------------------------------------------------------------------
// Scene generation
// ---------------------------------------------------------------------------

WorldScene gen_scene(uint64_t seed, int n_clutter) {
  if (n_clutter < 0) throw std::invalid_argument("gen_scene: n_clutter must be >= 0");
  RandomStream rng(mix_seed(seed, 0x5ce9eull));
  WorldScene scene;
  scene.seed = seed;

  Primitive table;
  table.kind = PrimitiveKind::kBox;
  table.size = Vec3(0.7, 0.7, 0.02);
  table.pose.t = Vec3(0, 0, -0.02);
  table.role = SemanticRole::kTable;
  scene.primitives.push_back(table);

  // Target: graspable thin side (full width <= 0.07 < max opening 0.08).
  Primitive target;
  target.role = SemanticRole::kTarget;
  if (rng.uniform() < 0.6) {
    target.kind = PrimitiveKind::kBox;
    target.size = Vec3(rng.uniform(0.015, 0.03), rng.uniform(0.025, 0.06), rng.uniform(0.03, 0.05));
  } else {
    target.kind = PrimitiveKind::kCylinder;
    const double r = rng.uniform(0.018, 0.032);
    target.size = Vec3(r, r, rng.uniform(0.03, 0.05));
  }
  const double yaw = rng.uniform(0.0, 2.0 * M_PI);
  target.pose.R = lie::so3_exp(Vec3(0, 0, yaw));
  target.pose.t = Vec3(rng.uniform(-0.08, 0.08), rng.uniform(-0.08, 0.08), target.size.z());
  scene.primitives.push_back(target);
  scene.target_index = 1;

  const double target_r = target.bounding_radius_xy();
  for (int i = 0; i < n_clutter; ++i) {
    Primitive c;
    c.role = SemanticRole::kClutter;
    const double kind_draw = rng.uniform();
    if (kind_draw < 0.5) {
      c.kind = PrimitiveKind::kBox;
      c.size = Vec3(rng.uniform(0.015, 0.045), rng.uniform(0.015, 0.045), rng.uniform(0.03, 0.09));
    } else if (kind_draw < 0.8) {
      c.kind = PrimitiveKind::kCylinder;
      const double r = rng.uniform(0.015, 0.04);
      c.size = Vec3(r, r, rng.uniform(0.03, 0.09));
    } else {
      c.kind = PrimitiveKind::kSphere;
      const double r = rng.uniform(0.02, 0.04);
      c.size = Vec3(r, r, r);
    }
    c.pose.R = lie::so3_exp(Vec3(0, 0, rng.uniform(0.0, 2.0 * M_PI)));

    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      // Ring placement around the target; close rings occlude it.
      const double gap = rng.uniform(0.02, 0.06);
      const double radius = target_r + c.bounding_radius_xy() + gap + rng.uniform(0.0, 0.15);
      const double az = rng.uniform(0.0, 2.0 * M_PI);
      const double z = (c.kind == PrimitiveKind::kSphere) ? c.size.x() : c.size.z();
      const Vec3 pos = target.pose.t + Vec3(radius * std::cos(az), radius * std::sin(az), 0);
      const Vec3 at(pos.x(), pos.y(), z);
      const double margin = 0.06;
      if (at.x() < scene.workspace.lo.x() + margin || at.x() > scene.workspace.hi.x() - margin ||
          at.y() < scene.workspace.lo.y() + margin || at.y() > scene.workspace.hi.y() - margin) {
        continue;
      }
      bool clash = false;
      for (size_t j = 2; j < scene.primitives.size(); ++j) {
        const Primitive& other = scene.primitives[j];
        const double d = (Vec3(at.x(), at.y(), 0) - Vec3(other.pose.t.x(), other.pose.t.y(), 0)).norm();
        if (d < c.bounding_radius_xy() + other.bounding_radius_xy() + 0.01) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      c.pose.t = at;
      placed = true;
    }
    if (!placed) {
      throw std::runtime_error("gen_scene: clutter placement failed after 200 attempts");
    }
    scene.primitives.push_back(c);
  }
  return scene;
}

// ---------------------------------------------------------------------------
// Labeled grasp sampling
// ---------------------------------------------------------------------------

std::vector<Pose> scan_seed_grasps(const WorldScene& scene) {
  const Primitive& target = scene.target();
  const Vec3 c = target.pose.t;
  std::vector<Pose> found;

  auto try_grasp = [&](const Pose& g) {
    if (grasp_oracle(scene, g) == GraspLabel::kSuccess) found.push_back(g);
  };

  // Top-down grasps: approach straight down, closing axis swept over yaw.
  const double top = target.top_height();
  for (int yi = 0; yi < 8; ++yi) {
    const double gyaw = yi * M_PI / 8.0;
    for (double dz : {0.6, 0.25}) {
      for (double ox : {-0.015, 0.0, 0.015}) {
        for (double oy : {-0.015, 0.0, 0.015}) {
          Pose g;
          // Approach +z_g pointing down: z_g = -e_z.
          const Vec3 zg(0, 0, -1);
          const Vec3 xg(std::cos(gyaw), std::sin(gyaw), 0);
          const Vec3 yg = zg.cross(xg);
          g.R.col(0) = xg;
          g.R.col(1) = yg;
          g.R.col(2) = zg;
          g.t = Vec3(c.x() + ox, c.y() + oy, std::max(0.012, top - dz * 2.0 * target.size.z() * 0.5));
          try_grasp(g);
        }
      }
    }
  }
  // Side grasps: horizontal approach toward the target center.
  for (int ai = 0; ai < 12; ++ai) {
    const double az = ai * M_PI / 6.0;
    const Vec3 zg(std::cos(az), std::sin(az), 0);  // approach direction
    for (int mode = 0; mode < 2; ++mode) {
      Vec3 xg = (mode == 0) ? Vec3(0, 0, 1) : Vec3(-std::sin(az), std::cos(az), 0);
      const Vec3 yg = zg.cross(xg);
      for (double hz : {0.5, 0.8}) {
        Pose g;
        g.R.col(0) = xg;
        g.R.col(1) = yg;
        g.R.col(2) = zg;
        g.t = Vec3(c.x(), c.y(), hz * 2.0 * target.size.z() * 0.5 + 0.008);
        // March the grasp center slightly toward the approach side.
        for (double back : {0.0, 0.01}) {
          Pose gb = g;
          gb.t -= back * zg;
          try_grasp(gb);
        }
      }
    }
  }
  return found;
}

std::vector<LabeledGrasp> sample_labeled_grasps(const WorldScene& scene, int n, RandomStream& rng,
                                                const GraspSampleOptions& opts) {
  if (n <= 0) throw std::invalid_argument("sample_labeled_grasps: n must be positive");
  const std::vector<Pose> seeds = scan_seed_grasps(scene);

  std::vector<LabeledGrasp> successes;
  std::vector<LabeledGrasp> failures;
  const int want_success = opts.balanced ? n / 2 : n / 4;
  const int want_failure = n - want_success;
  const int max_attempts = opts.max_attempt_factor * n;

  auto random_pose = [&]() {
    Pose g;
    g.R = lie::random_rotation(rng);
    if (rng.uniform() < 0.7) {
      // Near-target draws give informative failures.
      const Vec3 c = scene.target().pose.t;
      g.t = c + Vec3(0.08 * rng.normal(), 0.08 * rng.normal(), std::abs(0.08 * rng.normal()));
    } else {
      g.t = Vec3(rng.uniform(scene.workspace.lo.x(), scene.workspace.hi.x()),
                 rng.uniform(scene.workspace.lo.y(), scene.workspace.hi.y()),
                 rng.uniform(0.0, 0.35));
    }
    g.t.z() = std::max(g.t.z(), 0.005);
    return g;
  };

  int attempts = 0;
  size_t seed_cursor = 0;
  while (static_cast<int>(successes.size()) < want_success ||
         static_cast<int>(failures.size()) < want_failure) {
    if (++attempts > max_attempts) {
      if (successes.empty()) {
        throw std::runtime_error("sample_labeled_grasps: no successful grasp found within budget");
      }
      break;  // fill what we can; callers see the achieved balance
    }
    Pose g;
    if (!seeds.empty() && (attempts % 3 != 0)) {
      const Pose& seed_pose = seeds[seed_cursor % seeds.size()];
      ++seed_cursor;
      const double sigma = (attempts % 2 == 0) ? 0.008 : 0.025;
      g = lie::perturb(seed_pose, sigma, rng);
    } else {
      g = random_pose();
    }
    const GraspLabel label = grasp_oracle(scene, g);
    LabeledGrasp lg{g, label, scene.seed};
    if (label == GraspLabel::kSuccess) {
      if (static_cast<int>(successes.size()) < want_success) successes.push_back(lg);
    } else {
      if (static_cast<int>(failures.size()) < want_failure) failures.push_back(lg);
    }
  }
  if (successes.empty()) {
    throw std::runtime_error("sample_labeled_grasps: no successful grasp found within budget");
  }

  // Deterministic interleaving.
  std::vector<LabeledGrasp> out;
  out.reserve(successes.size() + failures.size());
  size_t si = 0, fi = 0;
  while (si < successes.size() || fi < failures.size()) {
    if (si < successes.size()) out.push_back(successes[si++]);
    if (fi < failures.size()) out.push_back(failures[fi++]);
  }
  if (static_cast<int>(out.size()) > n) out.resize(static_cast<size_t>(n));
  return out;
}

}  // namespace grasplab::world
