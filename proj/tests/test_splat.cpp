#include <cmath>

#include "doctest.h"
#include "grasplab/splat.hpp"
#include "testutil.hpp"

using namespace grasplab::splat;
using grasplab::RandomStream;
using grasplab::lie::Vec3;
using grasplab::world::ViewPose;

namespace {

SceneEstimate random_estimate(int n, RandomStream& rng) {
  SceneEstimate est;
  est.max_range = 1.5;
  for (int i = 0; i < n; ++i) {
    Kernel k;
    k.mu = Vec3(rng.uniform(-0.08, 0.08), rng.uniform(-0.08, 0.08), rng.uniform(0.0, 0.12));
    k.log_scale = std::log(rng.uniform(0.008, 0.02));
    k.logit_alpha = rng.uniform(-0.5, 1.5);
    k.logit_sem = rng.uniform(-2.0, 2.0);
    est.kernels.push_back(k);
  }
  return est;
}

ViewPose test_view(int wh = 12, double az = 0.5) {
  return grasplab::world::make_look_at(Vec3(0.35 * std::cos(az), 0.35 * std::sin(az), 0.3),
                                       Vec3(0, 0, 0.04), wh, wh, static_cast<double>(wh));
}

}  // namespace

TEST_CASE("single on-ray kernel with near-unit opacity renders its depth") {
  SceneEstimate est;
  est.max_range = 3.0;
  Kernel k;
  k.mu = Vec3(0, 0, 2.0);
  k.log_scale = std::log(0.02);
  k.logit_alpha = 9.0;  // alpha ~ 0.99988
  est.kernels.push_back(k);

  ViewPose v;
  v.cam_to_world = grasplab::lie::Pose::identity();  // camera at origin looking +z
  v.width = v.height = 3;
  v.cx = v.cy = 1.5;
  v.focal = 3.0;
  const RenderedImage img = render_expected(est, v);
  // Center pixel ray passes within half a pixel of the kernel.
  const double center = img.depth[1 * 3 + 1];
  CHECK(std::abs(center - 2.0) < 1e-3);
}

TEST_CASE("kernel far off every ray leaves the background depth") {
  SceneEstimate est;
  est.max_range = 1.5;
  Kernel k;
  k.mu = Vec3(5.0, 5.0, 0.05);  // far outside the frustum
  k.log_scale = std::log(0.01);
  k.logit_alpha = 3.0;
  est.kernels.push_back(k);
  const RenderedImage img = render_expected(est, test_view());
  for (Eigen::Index i = 0; i < img.depth.size(); ++i) {
    CHECK(img.depth[i] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(img.semantic[i] == 0.0);
  }
}

TEST_CASE("renderer parameter gradients match finite differences") {
  RandomStream rng(404);
  SceneEstimate est = random_estimate(40, rng);
  const ViewPose view = test_view(12);
  const int64_t npx = 12 * 12;

  // Random cotangents over depth and semantic channels.
  Eigen::VectorXd gd(npx), gs(npx);
  for (int64_t i = 0; i < npx; ++i) {
    gd[i] = rng.uniform(-1.0, 1.0);
    gs[i] = rng.uniform(-1.0, 1.0);
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(est.param_count());
  render_backward(est, view, gd, gs, &grad);

  auto loss = [&](const std::vector<double>& flat) {
    SceneEstimate e2 = est;
    Eigen::VectorXd p(static_cast<Eigen::Index>(flat.size()));
    for (size_t i = 0; i < flat.size(); ++i) p[static_cast<Eigen::Index>(i)] = flat[i];
    e2.set_params(p);
    const RenderedImage img = render_expected(e2, view);
    return gd.dot(img.depth) + gs.dot(img.semantic);
  };
  const Eigen::VectorXd p0 = est.params();
  std::vector<double> flat(p0.data(), p0.data() + p0.size());
  const std::vector<double> fd = grasplab::testutil::central_fd(loss, flat, 1e-6);
  std::vector<double> an(grad.data(), grad.data() + grad.size());
  CHECK(grasplab::testutil::max_rel_error(an, fd) <= 1e-4);
}

TEST_CASE("precision with no views equals lambda exactly") {
  RandomStream rng(7);
  SceneEstimate est = random_estimate(20, rng);
  est.lambda = 1e-2;
  const PrecisionDiag prec = accumulate_precision(est, {});
  for (Eigen::Index i = 0; i < prec.entries.size(); ++i) CHECK(prec.entries[i] == 1e-2);
}

TEST_CASE("duplicating a view doubles the data term") {
  RandomStream rng(8);
  SceneEstimate est = random_estimate(30, rng);
  const ViewPose v = test_view();
  const PrecisionDiag one = accumulate_precision(est, {v});
  const PrecisionDiag two = accumulate_precision(est, {v, v});
  for (Eigen::Index i = 0; i < one.entries.size(); ++i) {
    const double data = one.entries[i] - est.lambda;
    CHECK(two.entries[i] == doctest::Approx(est.lambda + 2.0 * data).epsilon(1e-12));
  }
}

TEST_CASE("single-pixel single-kernel precision entry is g^2 + lambda") {
  SceneEstimate est;
  est.lambda = 0.01;
  est.max_range = 1.5;
  Kernel k;
  k.mu = Vec3(0.003, -0.002, 0.4);
  k.log_scale = std::log(0.015);
  k.logit_alpha = 0.8;
  est.kernels.push_back(k);
  ViewPose v;
  v.cam_to_world = grasplab::lie::Pose::identity();
  v.width = v.height = 1;
  v.cx = v.cy = 0.5;
  v.focal = 1.0;

  Eigen::VectorXd gd = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(est.param_count());
  render_backward(est, v, gd, Eigen::VectorXd(), &grad);
  const PrecisionDiag prec = accumulate_precision(est, {v});
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(prec.entries[i] == doctest::Approx(grad[i] * grad[i] + est.lambda).epsilon(1e-12));
  }
  CHECK(prec.entries[5] == est.lambda);  // semantic channel carries no depth mass
}

TEST_CASE("precision entries never decrease as views are added; log-det proxy grows") {
  RandomStream rng(9);
  SceneEstimate est = random_estimate(50, rng);
  std::vector<ViewPose> views;
  PrecisionDiag prev = accumulate_precision(est, views);
  double prev_proxy = precision_log_det_half(prev);
  for (int i = 0; i < 4; ++i) {
    views.push_back(test_view(12, 0.9 * i));
    const PrecisionDiag cur = accumulate_precision(est, views);
    for (Eigen::Index j = 0; j < cur.entries.size(); ++j) {
      CHECK(cur.entries[j] >= prev.entries[j] - 1e-15);
    }
    const double proxy = precision_log_det_half(cur);
    CHECK(proxy >= prev_proxy - 1e-12);
    prev = cur;
    prev_proxy = proxy;
  }
}

TEST_CASE("precision delta: empty-space candidate is exactly zero") {
  RandomStream rng(10);
  SceneEstimate est = random_estimate(30, rng);
  const ViewPose away = grasplab::world::make_look_at(Vec3(0.3, 0.3, 0.3), Vec3(5, 5, 5), 12, 12, 12);
  const Eigen::VectorXd delta = precision_delta(est, away);
  CHECK(delta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("precision delta of an already-fitted view equals that view's data term") {
  RandomStream rng(11);
  SceneEstimate est = random_estimate(30, rng);
  const ViewPose v = test_view();
  const PrecisionDiag acc = accumulate_precision(est, {v});
  const Eigen::VectorXd delta = precision_delta(est, v);
  for (Eigen::Index i = 0; i < delta.size(); ++i) {
    CHECK(delta[i] == doctest::Approx(acc.entries[i] - est.lambda).epsilon(1e-12));
  }
}

TEST_CASE("precision delta is permutation-equivariant under kernel reordering") {
  RandomStream rng(12);
  SceneEstimate est = random_estimate(20, rng);
  const ViewPose v = test_view();
  const Eigen::VectorXd d1 = precision_delta(est, v);
  SceneEstimate shuffled = est;
  std::vector<int> perm(est.kernels.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>((i * 7 + 3) % perm.size());
  for (size_t i = 0; i < perm.size(); ++i) shuffled.kernels[i] = est.kernels[static_cast<size_t>(perm[i])];
  const Eigen::VectorXd d2 = precision_delta(shuffled, v);
  for (size_t i = 0; i < perm.size(); ++i) {
    for (int p = 0; p < kParamsPerKernel; ++p) {
      CHECK(d2[static_cast<Eigen::Index>(i) * kParamsPerKernel + p] ==
            doctest::Approx(d1[static_cast<Eigen::Index>(perm[i]) * kParamsPerKernel + p])
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("fit: zero steps pins kernels to the back-projected points") {
  const grasplab::world::WorldScene scene = grasplab::world::gen_scene(5, 2);
  const ViewPose v = grasplab::world::make_look_at(Vec3(0.3, 0.1, 0.35), scene.target().pose.t, 32,
                                                   32, 32.0);
  const ViewObservation obs{v, grasplab::world::render_depth_image(scene, v)};
  FitConfig cfg;
  cfg.steps = 0;
  cfg.kernel_count = 512;
  const SceneEstimate est = fit_from_views({obs}, cfg);
  const BackprojectedCloud cloud = backproject({obs});
  REQUIRE(!est.kernels.empty());
  for (const Kernel& k : est.kernels) {
    double best = 1e9;
    for (const Vec3& p : cloud.points) best = std::min(best, (p - k.mu).norm());
    CHECK(best == 0.0);
  }
}

TEST_CASE("fit: lone sphere kernels stay near the visible-surface centroid") {
  grasplab::world::WorldScene scene;
  grasplab::world::Primitive s;
  s.kind = grasplab::world::PrimitiveKind::kSphere;
  s.size = Vec3(0.04, 0.04, 0.04);
  s.pose.t = Vec3(0, 0, 0.04);
  s.role = grasplab::world::SemanticRole::kTarget;
  scene.primitives.push_back(s);
  scene.target_index = 0;

  const ViewPose v = grasplab::world::make_look_at(Vec3(0.0, -0.3, 0.25), s.pose.t, 32, 32, 32.0);
  const ViewObservation obs{v, grasplab::world::render_depth_image(scene, v)};
  const BackprojectedCloud cloud = backproject({obs});
  REQUIRE(!cloud.points.empty());
  Vec3 surf_centroid = Vec3::Zero();
  for (const Vec3& p : cloud.points) surf_centroid += p;
  surf_centroid /= static_cast<double>(cloud.points.size());

  FitConfig cfg;
  cfg.steps = 80;
  cfg.kernel_count = 256;
  const SceneEstimate est = fit_from_views({obs}, cfg);
  Vec3 centroid = Vec3::Zero();
  for (const Kernel& k : est.kernels) centroid += k.mu;
  centroid /= static_cast<double>(est.kernels.size());
  CHECK((centroid - surf_centroid).norm() < 0.02);
}

TEST_CASE("fit is bit-deterministic") {
  const grasplab::world::WorldScene scene = grasplab::world::gen_scene(6, 2);
  const ViewPose v = grasplab::world::make_look_at(Vec3(-0.25, 0.2, 0.3), scene.target().pose.t,
                                                   24, 24, 24.0);
  const ViewObservation obs{v, grasplab::world::render_depth_image(scene, v)};
  FitConfig cfg;
  cfg.steps = 25;
  cfg.kernel_count = 128;
  const SceneEstimate a = fit_from_views({obs}, cfg);
  const SceneEstimate b = fit_from_views({obs}, cfg);
  REQUIRE(a.kernels.size() == b.kernels.size());
  const Eigen::VectorXd pa = a.params(), pb = b.params();
  for (Eigen::Index i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
}

TEST_CASE("extract_foreground picks the larger semantic cluster") {
  SceneEstimate est;
  RandomStream rng(77);
  // Cluster A: 200 kernels near the origin; cluster B: 60 kernels far away.
  for (int i = 0; i < 200; ++i) {
    Kernel k;
    k.mu = Vec3(0.002 * (i % 20), 0.002 * (i / 20), 0.05);
    k.logit_sem = 2.0;
    est.kernels.push_back(k);
  }
  for (int i = 0; i < 60; ++i) {
    Kernel k;
    k.mu = Vec3(0.3 + 0.002 * (i % 10), 0.3 + 0.002 * (i / 10), 0.05);
    k.logit_sem = 2.0;
    est.kernels.push_back(k);
  }
  // Background filler.
  for (int i = 0; i < 100; ++i) {
    Kernel k;
    k.mu = Vec3(rng.uniform(-0.4, -0.2), rng.uniform(-0.4, -0.2), 0.02);
    k.logit_sem = -2.0;
    est.kernels.push_back(k);
  }
  const ForegroundSplit split = extract_foreground(est, 0.05);
  CHECK((split.centroid - Vec3(0.019, 0.009, 0.05)).norm() < 0.02);
  // The far cluster is all background.
  int far_in_fg = 0;
  for (int i : split.foreground) {
    if (est.kernels[static_cast<size_t>(i)].mu.x() > 0.2) ++far_in_fg;
  }
  CHECK(far_in_fg == 0);
  CHECK(split.foreground.size() == std::min<size_t>(512, 200));
  CHECK(split.background.size() == std::min<size_t>(512, 160));
}

TEST_CASE("extract_foreground reports when no cluster qualifies") {
  SceneEstimate est;
  for (int i = 0; i < 30; ++i) {  // below the minimum cluster size
    Kernel k;
    k.mu = Vec3(0.001 * i, 0, 0.05);
    k.logit_sem = 2.0;
    est.kernels.push_back(k);
  }
  CHECK_THROWS_AS(extract_foreground(est, 0.05), std::runtime_error);
}

TEST_CASE("extract_foreground: everything within radius leaves no background") {
  SceneEstimate est;
  for (int i = 0; i < 80; ++i) {
    Kernel k;
    k.mu = Vec3(0.002 * (i % 10), 0.002 * (i / 10), 0.05);
    k.logit_sem = (i % 2) ? 2.0 : -2.0;  // half semantic, all within the ball
    est.kernels.push_back(k);
  }
  // 40 semantic kernels do not reach the min cluster size of 50 -> widen.
  for (int i = 80; i < 120; ++i) {
    Kernel k;
    k.mu = Vec3(0.002 * (i % 10), 0.002 * ((i - 80) / 10), 0.052);
    k.logit_sem = 2.0;
    est.kernels.push_back(k);
  }
  const ForegroundSplit split = extract_foreground(est, 0.5);
  CHECK(split.background.empty());
  CHECK(split.foreground.size() == est.kernels.size() /* < 512, all kept */);
}
