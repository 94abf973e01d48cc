#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "grasplab/lie.hpp"
#include "grasplab/random.hpp"

namespace grasplab::world {

using lie::Mat3;
using lie::Pose;
using lie::Vec3;

enum class PrimitiveKind : uint8_t { kBox, kCylinder, kSphere };
enum class SemanticRole : uint8_t { kTable, kTarget, kClutter };

/// Analytic solid. Sizes are meters:
///   box      — size = half extents (x, y, z)
///   cylinder — size.x = radius, size.z = half height (axis = local z)
///   sphere   — size.x = radius
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::kBox;
  Pose pose;
  Vec3 size = Vec3(0.01, 0.01, 0.01);
  SemanticRole role = SemanticRole::kClutter;

  /// Radius of the bounding sphere in the xy plane, used for placement.
  double bounding_radius_xy() const;
  double top_height() const;
};

struct Aabb {
  Vec3 lo = Vec3(-0.5, -0.5, 0.0);
  Vec3 hi = Vec3(0.5, 0.5, 1.0);
  bool contains(const Vec3& p, double margin = 0.0) const;
};

/// Ground-truth procedural scene. Exactly one target primitive; the table is
/// the first primitive. The workspace is the normalized 1 m cube.
struct WorldScene {
  std::vector<Primitive> primitives;
  int target_index = -1;
  Aabb workspace;
  uint64_t seed = 0;

  const Primitive& target() const { return primitives.at(static_cast<size_t>(target_index)); }
};

/// Deterministic scene generation. Throws std::runtime_error when placement
/// rejection sampling exhausts its attempt budget.
WorldScene gen_scene(uint64_t seed, int n_clutter);

double sdf_primitive(const Primitive& prim, const Vec3& p);
/// Union SDF over all primitives (min).
double sdf(const WorldScene& scene, const Vec3& p);
double sdf_target(const WorldScene& scene, const Vec3& p);
double sdf_non_target(const WorldScene& scene, const Vec3& p);

// ---------------------------------------------------------------------------
// Gripper model: parallel jaw, closing axis = gripper x, approach axis = +z
// (palm behind the grasp center at negative z). Anchor skeleton: two
// fingertips, two mid-finger points, one palm point.
// ---------------------------------------------------------------------------
struct Gripper {
  static constexpr double kMaxOpening = 0.08;
  static constexpr double kFingerHalfSpan = 0.04;
  static constexpr double kMidFingerZ = -0.025;
  static constexpr double kPalmZ = -0.055;
  static constexpr double kFrictionConeCos = 0.86602540378443864676;  // cos 30 deg
  static constexpr double kClearance = 0.005;

  static const std::array<Vec3, 5>& anchors();
  /// Points sampled along the finger/palm capsule skeleton, world frame.
  static std::vector<Vec3> skeleton_points(const Pose& grasp);
};

enum class GraspLabel : uint8_t { kFailure = 0, kSuccess = 1 };

/// Deterministic analytic grasp-success oracle: antipodal finger contact on
/// the target within the opening width, friction-cone normals, clearance of
/// the gripper body against non-target geometry, and grasp center inside the
/// target band.
GraspLabel grasp_oracle(const WorldScene& scene, const Pose& grasp);

struct OracleBreakdown {
  bool contact = false;
  bool friction = false;
  bool clearance = false;
  bool band = false;
  bool success() const { return contact && friction && clearance && band; }
};
OracleBreakdown grasp_oracle_detail(const WorldScene& scene, const Pose& grasp);

// ---------------------------------------------------------------------------
// Depth camera
// ---------------------------------------------------------------------------

/// Pinhole camera. cam_to_world maps camera coordinates (z forward, x right,
/// y down) to world coordinates; depth images store camera-frame z.
struct ViewPose {
  Pose cam_to_world;
  double focal = 48.0;
  double cx = 24.0;
  double cy = 24.0;
  int width = 48;
  int height = 48;
};

ViewPose make_look_at(const Vec3& eye, const Vec3& center, int width, int height, double focal);

struct RayHit {
  bool hit = false;
  double t = 0.0;  // distance along the unit ray
  int primitive_index = -1;
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::Zero();  // outward unit normal
};

RayHit raycast(const WorldScene& scene, const Vec3& origin, const Vec3& dir);

/// Camera-frame z depth for one pixel, or nullopt when nothing is hit.
std::optional<double> raycast_depth(const WorldScene& scene, const ViewPose& view, int px, int py);

struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;     // camera-frame z; 0 where hit == 0
  std::vector<uint8_t> hit;      // explicit no-hit encoding
  std::vector<uint8_t> semantic; // 1 where the nearest hit is the target

  int64_t index(int px, int py) const { return static_cast<int64_t>(py) * width + px; }
};

DepthImage render_depth_image(const WorldScene& scene, const ViewPose& view);

/// Unit ray through a pixel center, world frame.
void pixel_ray(const ViewPose& view, int px, int py, Vec3* origin, Vec3* dir);

// ---------------------------------------------------------------------------
// Labeled grasp datasets
// ---------------------------------------------------------------------------

struct LabeledGrasp {
  Pose pose;
  GraspLabel label = GraspLabel::kFailure;
  uint64_t scene_seed = 0;
};

struct GraspSampleOptions {
  bool balanced = true;
  /// Attempt budget multiplier before reporting a barren scene.
  int max_attempt_factor = 60;
};

/// Mixes jittered oracle-successful seed grasps (found by scanning canonical
/// approach directions) with random poses; every label comes from
/// grasp_oracle. Throws std::runtime_error when no successful grasp can be
/// found within the attempt budget.
std::vector<LabeledGrasp> sample_labeled_grasps(const WorldScene& scene, int n, RandomStream& rng,
                                                const GraspSampleOptions& opts = {});

/// Oracle-successful grasps found by the canonical-direction scan (no
/// jitter); used as ground-truth success sets in metrics.
std::vector<Pose> scan_seed_grasps(const WorldScene& scene);

}  // namespace grasplab::world
