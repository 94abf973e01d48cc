#pragma once

#include <Eigen/Core>
#include <vector>

#include "grasplab/lie.hpp"
#include "grasplab/params.hpp"
#include "grasplab/world.hpp"

namespace grasplab::splat {

using lie::Vec3;

/// One isotropic point kernel. Scale, opacity and the semantic channel are
/// stored unconstrained (exp / sigmoid reparameterization keeps s > 0 and
/// alpha, semantic in (0,1)); the flat parameter vector is
/// [mu.x, mu.y, mu.z, log_scale, logit_alpha, logit_sem] per kernel.
struct Kernel {
  Vec3 mu = Vec3::Zero();
  double log_scale = -4.6;
  double logit_alpha = 0.6;
  double logit_sem = 0.0;

  double scale() const { return std::exp(log_scale); }
  double alpha() const { return 1.0 / (1.0 + std::exp(-logit_alpha)); }
  double semantic() const { return 1.0 / (1.0 + std::exp(-logit_sem)); }
};

inline constexpr int kParamsPerKernel = 6;

struct SceneEstimate {
  std::vector<Kernel> kernels;
  std::vector<world::ViewPose> fitted_views;
  double max_range = 1.5;  // background depth composited behind all kernels
  double lambda = 1e-2;    // posterior-precision regularizer

  int64_t param_count() const { return kParamsPerKernel * static_cast<int64_t>(kernels.size()); }
  Eigen::VectorXd params() const;
  void set_params(const Eigen::VectorXd& p);
};

struct PrecisionDiag {
  Eigen::VectorXd entries;  // >= lambda after finalization
  double lambda = 0.0;
};

struct ViewObservation {
  world::ViewPose view;
  world::DepthImage image;
};

struct FitConfig {
  int kernel_count = 1024;
  int steps = 300;
  double lr = 1e-2;          // scale/opacity/semantic logits
  double position_lr = 1e-3; // kernel centers; Adam is per-parameter scale-free,
                             // so meter-valued positions need their own rate
  double init_scale = 0.011;
  double init_alpha = 0.7;
  double semantic_weight = 0.25;
  double lambda = 1e-2;
  double max_range = 1.5;
};

struct RenderedImage {
  Eigen::VectorXd depth;     // expected depth per pixel (row-major)
  Eigen::VectorXd semantic;  // expected semantic per pixel, in [0,1)
};

RenderedImage render_expected(const SceneEstimate& est, const world::ViewPose& view);
Eigen::VectorXd render_expected_depth(const SceneEstimate& est, const world::ViewPose& view);

/// Accumulates d(sum_px ddepth*D + dsem*S)/dparams into grad (size
/// param_count). ddepth/dsem are per-pixel cotangents; dsem may be empty.
void render_backward(const SceneEstimate& est, const world::ViewPose& view,
                     const Eigen::VectorXd& ddepth, const Eigen::VectorXd& dsem,
                     Eigen::VectorXd* grad);

/// Gauss-Newton diagonal mass of one view: per parameter, the sum over
/// pixels of squared depth-Jacobian entries. No regularizer.
Eigen::VectorXd precision_delta(const SceneEstimate& est, const world::ViewPose& view);

/// Sum of per-view data terms plus lambda on every entry.
PrecisionDiag accumulate_precision(const SceneEstimate& est,
                                   const std::vector<world::ViewPose>& views);

/// 1/2 sum log(entries) — the Gaussian posterior negentropy proxy; grows as
/// precision accumulates.
double precision_log_det_half(const PrecisionDiag& prec);

/// Back-projection of all hit pixels into world points with semantics.
struct BackprojectedCloud {
  std::vector<Vec3> points;
  std::vector<uint8_t> semantic;
};
BackprojectedCloud backproject(const std::vector<ViewObservation>& views);

std::vector<int> farthest_point_sample(const std::vector<Vec3>& points, int k, int start = 0);

/// Initialize kernels from back-projected depth (FPS down to the kernel
/// budget), then refine with Adam on the squared depth residual plus
/// binary cross-entropy on rendered semantics. Deterministic.
SceneEstimate fit_from_views(const std::vector<ViewObservation>& views, const FitConfig& cfg);

/// Warm-started refit: keeps the previous kernels (and their parameters),
/// adds back-projections of the new views, re-selects the kernel budget by
/// FPS and optimizes for `steps`.
SceneEstimate refit(const SceneEstimate& prev, const std::vector<ViewObservation>& all_views,
                    const std::vector<ViewObservation>& new_views, const FitConfig& cfg,
                    int steps);

struct ForegroundSplit {
  std::vector<int> foreground;  // kernel indices, FPS-downsampled to <= 512
  std::vector<int> background;
  Vec3 centroid = Vec3::Zero();  // centroid of the winning semantic cluster
};

/// Semantic-cluster foreground extraction: kernels with semantic > 0.5 are
/// clustered by single linkage (distance 0.01, minimum size 50); the largest
/// cluster plus every kernel within `radius` of its centroid form the
/// foreground. Throws std::runtime_error when no qualifying cluster exists.
ForegroundSplit extract_foreground(const SceneEstimate& est, double radius);

inline constexpr int kForegroundPoints = 512;
inline constexpr int kBackgroundPoints = 512;

}  // namespace grasplab::splat
