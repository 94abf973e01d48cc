#include "grasplab/splat.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "grasplab/graph.hpp"

namespace grasplab::splat {

namespace {

/// Kernel-ray contributions beyond kCutoff * s are culled; exp(-24.5) is
/// below double-precision noise for every downstream consumer, so the cull
/// is invisible to finite-difference probes.
constexpr double kCutoff = 7.0;
constexpr double kMinZ = 0.02;

struct ViewCache {
  Vec3 origin;
  Eigen::Matrix3d R;
  Vec3 fwd;
  double f, cx, cy;
  int W, H;
  std::vector<Vec3> dirs;
};

ViewCache make_cache(const world::ViewPose& view) {
  ViewCache c;
  c.origin = view.cam_to_world.t;
  c.R = view.cam_to_world.R;
  c.fwd = c.R.col(2);
  c.f = view.focal;
  c.cx = view.cx;
  c.cy = view.cy;
  c.W = view.width;
  c.H = view.height;
  c.dirs.resize(static_cast<size_t>(c.W) * c.H);
  for (int py = 0; py < c.H; ++py) {
    for (int px = 0; px < c.W; ++px) {
      const Vec3 d_cam((px + 0.5 - c.cx) / c.f, (py + 0.5 - c.cy) / c.f, 1.0);
      c.dirs[static_cast<size_t>(py) * c.W + px] = (c.R * d_cam).normalized();
    }
  }
  return c;
}

struct Hit {
  int kernel;
  double opacity;
  double z;
};

/// Splat every kernel onto its projected pixel footprint.
void gather_hits(const SceneEstimate& est, const ViewCache& c,
                 std::vector<std::vector<Hit>>* per_pixel) {
  per_pixel->assign(static_cast<size_t>(c.W) * c.H, {});
  for (size_t ki = 0; ki < est.kernels.size(); ++ki) {
    const Kernel& k = est.kernels[ki];
    const Vec3 p_cam = c.R.transpose() * (k.mu - c.origin);
    const double z = p_cam.z();
    if (z <= kMinZ) continue;
    const double s = k.scale();
    const double alpha = k.alpha();
    const double u = c.f * p_cam.x() / z + c.cx;
    const double v = c.f * p_cam.y() / z + c.cy;
    const double cut = kCutoff * s;
    const int rpx = static_cast<int>(std::ceil(1.6 * c.f * cut / z)) + 1;
    const int x0 = std::max(0, static_cast<int>(std::floor(u)) - rpx);
    const int x1 = std::min(c.W - 1, static_cast<int>(std::floor(u)) + rpx);
    const int y0 = std::max(0, static_cast<int>(std::floor(v)) - rpx);
    const int y1 = std::min(c.H - 1, static_cast<int>(std::floor(v)) + rpx);
    const double cut2 = cut * cut;
    const double inv2s2 = 1.0 / (2.0 * s * s);
    const Vec3 w = k.mu - c.origin;
    const double w2 = w.squaredNorm();
    for (int py = y0; py <= y1; ++py) {
      for (int px = x0; px <= x1; ++px) {
        const size_t pi = static_cast<size_t>(py) * c.W + px;
        const Vec3& dir = c.dirs[pi];
        const double t = w.dot(dir);
        if (t <= kMinZ) continue;
        const double d2 = w2 - t * t;
        if (d2 > cut2) continue;
        const double o = alpha * std::exp(-d2 * inv2s2);
        (*per_pixel)[pi].push_back(Hit{static_cast<int>(ki), o, z});
      }
    }
  }
  for (auto& hits : *per_pixel) {
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      return a.z != b.z ? a.z < b.z : a.kernel < b.kernel;
    });
  }
}

struct PixelForward {
  double depth = 0.0;
  double semantic = 0.0;
};

PixelForward composite(const SceneEstimate& est, const std::vector<Hit>& hits,
                       std::vector<double>* transmittance) {
  PixelForward out;
  double T = 1.0;
  if (transmittance) transmittance->resize(hits.size());
  for (size_t i = 0; i < hits.size(); ++i) {
    if (transmittance) (*transmittance)[i] = T;
    const double w = hits[i].opacity * T;
    out.depth += w * hits[i].z;
    out.semantic += w * est.kernels[static_cast<size_t>(hits[i].kernel)].semantic();
    T *= (1.0 - hits[i].opacity);
  }
  out.depth += T * est.max_range;
  return out;
}

/// Per-pixel backward: folds cotangents (gd on depth, gs on semantic) into
/// the flat parameter gradient. When prec != nullptr, instead accumulates
/// squared depth-Jacobian entries (gd/gs ignored).
void pixel_backward(const SceneEstimate& est, const ViewCache& c, size_t pi,
                    const std::vector<Hit>& hits, const std::vector<double>& T, double gd,
                    double gs, Eigen::VectorXd* grad, Eigen::VectorXd* prec) {
  const size_t n = hits.size();
  if (n == 0) return;
  // Suffix masses after each hit (depth includes the background term).
  double rest_d = T[n - 1] * (1.0 - hits[n - 1].opacity) * est.max_range;
  double rest_s = 0.0;
  const Vec3& dir = c.dirs[pi];
  for (size_t ii = n; ii-- > 0;) {
    const Hit& h = hits[ii];
    const Kernel& k = est.kernels[static_cast<size_t>(h.kernel)];
    const double o = h.opacity;
    const double Ti = T[ii];
    const double m = k.semantic();
    const double dD_do = Ti * h.z - rest_d / (1.0 - o);
    const double dS_do = Ti * m - rest_s / (1.0 - o);
    const double dD_dz = o * Ti;

    // Opacity partials.
    const double s = k.scale();
    const Vec3 w = k.mu - c.origin;
    const double t = w.dot(dir);
    const Vec3 perp = w - t * dir;
    const Vec3 do_dmu = -(o / (s * s)) * perp;
    const double d2 = perp.squaredNorm();
    const double do_dls = o * d2 / (s * s);
    const double do_dla = o * (1.0 - k.alpha());

    const int64_t base = kParamsPerKernel * static_cast<int64_t>(h.kernel);
    if (grad) {
      const double A = gd * dD_do + gs * dS_do;
      (*grad)[base + 0] += A * do_dmu.x() + gd * dD_dz * c.fwd.x();
      (*grad)[base + 1] += A * do_dmu.y() + gd * dD_dz * c.fwd.y();
      (*grad)[base + 2] += A * do_dmu.z() + gd * dD_dz * c.fwd.z();
      (*grad)[base + 3] += A * do_dls;
      (*grad)[base + 4] += A * do_dla;
      (*grad)[base + 5] += gs * o * Ti * m * (1.0 - m);
    }
    if (prec) {
      const double jx = dD_do * do_dmu.x() + dD_dz * c.fwd.x();
      const double jy = dD_do * do_dmu.y() + dD_dz * c.fwd.y();
      const double jz = dD_do * do_dmu.z() + dD_dz * c.fwd.z();
      const double jls = dD_do * do_dls;
      const double jla = dD_do * do_dla;
      (*prec)[base + 0] += jx * jx;
      (*prec)[base + 1] += jy * jy;
      (*prec)[base + 2] += jz * jz;
      (*prec)[base + 3] += jls * jls;
      (*prec)[base + 4] += jla * jla;
      // Semantic channel does not enter the depth rendering equation.
    }
    rest_d = Ti * h.z * o + rest_d;
    rest_s = Ti * m * o + rest_s;
  }
}

}  // namespace

Eigen::VectorXd SceneEstimate::params() const {
  Eigen::VectorXd p(param_count());
  for (size_t i = 0; i < kernels.size(); ++i) {
    const int64_t b = kParamsPerKernel * static_cast<int64_t>(i);
    p[b + 0] = kernels[i].mu.x();
    p[b + 1] = kernels[i].mu.y();
    p[b + 2] = kernels[i].mu.z();
    p[b + 3] = kernels[i].log_scale;
    p[b + 4] = kernels[i].logit_alpha;
    p[b + 5] = kernels[i].logit_sem;
  }
  return p;
}

void SceneEstimate::set_params(const Eigen::VectorXd& p) {
  if (p.size() != param_count()) throw std::invalid_argument("SceneEstimate: parameter size mismatch");
  for (size_t i = 0; i < kernels.size(); ++i) {
    const int64_t b = kParamsPerKernel * static_cast<int64_t>(i);
    kernels[i].mu = Vec3(p[b + 0], p[b + 1], p[b + 2]);
    kernels[i].log_scale = p[b + 3];
    kernels[i].logit_alpha = p[b + 4];
    kernels[i].logit_sem = p[b + 5];
  }
}

RenderedImage render_expected(const SceneEstimate& est, const world::ViewPose& view) {
  const ViewCache c = make_cache(view);
  std::vector<std::vector<Hit>> hits;
  gather_hits(est, c, &hits);
  RenderedImage out;
  const int64_t n = static_cast<int64_t>(c.W) * c.H;
  out.depth.resize(n);
  out.semantic.resize(n);
  for (int64_t pi = 0; pi < n; ++pi) {
    const PixelForward f = composite(est, hits[static_cast<size_t>(pi)], nullptr);
    out.depth[pi] = f.depth;
    out.semantic[pi] = f.semantic;
  }
  return out;
}

Eigen::VectorXd render_expected_depth(const SceneEstimate& est, const world::ViewPose& view) {
  return render_expected(est, view).depth;
}

void render_backward(const SceneEstimate& est, const world::ViewPose& view,
                     const Eigen::VectorXd& ddepth, const Eigen::VectorXd& dsem,
                     Eigen::VectorXd* grad) {
  const ViewCache c = make_cache(view);
  std::vector<std::vector<Hit>> hits;
  gather_hits(est, c, &hits);
  std::vector<double> T;
  const int64_t n = static_cast<int64_t>(c.W) * c.H;
  for (int64_t pi = 0; pi < n; ++pi) {
    const auto& h = hits[static_cast<size_t>(pi)];
    if (h.empty()) continue;
    composite(est, h, &T);
    const double gs = dsem.size() ? dsem[pi] : 0.0;
    pixel_backward(est, c, static_cast<size_t>(pi), h, T, ddepth[pi], gs, grad, nullptr);
  }
}

Eigen::VectorXd precision_delta(const SceneEstimate& est, const world::ViewPose& view) {
  const ViewCache c = make_cache(view);
  std::vector<std::vector<Hit>> hits;
  gather_hits(est, c, &hits);
  Eigen::VectorXd prec = Eigen::VectorXd::Zero(est.param_count());
  std::vector<double> T;
  const int64_t n = static_cast<int64_t>(c.W) * c.H;
  for (int64_t pi = 0; pi < n; ++pi) {
    const auto& h = hits[static_cast<size_t>(pi)];
    if (h.empty()) continue;
    composite(est, h, &T);
    pixel_backward(est, c, static_cast<size_t>(pi), h, T, 0.0, 0.0, nullptr, &prec);
  }
  return prec;
}

PrecisionDiag accumulate_precision(const SceneEstimate& est,
                                   const std::vector<world::ViewPose>& views) {
  PrecisionDiag out;
  out.lambda = est.lambda;
  out.entries = Eigen::VectorXd::Constant(est.param_count(), est.lambda);
  for (const auto& v : views) out.entries += precision_delta(est, v);
  return out;
}

double precision_log_det_half(const PrecisionDiag& prec) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < prec.entries.size(); ++i) s += std::log(prec.entries[i]);
  return 0.5 * s;
}

BackprojectedCloud backproject(const std::vector<ViewObservation>& views) {
  BackprojectedCloud cloud;
  for (const auto& vo : views) {
    const world::ViewPose& v = vo.view;
    for (int py = 0; py < v.height; ++py) {
      for (int px = 0; px < v.width; ++px) {
        const auto i = static_cast<size_t>(vo.image.index(px, py));
        if (!vo.image.hit[i]) continue;
        const double z = vo.image.depth[i];
        const Vec3 p_cam((px + 0.5 - v.cx) / v.focal * z, (py + 0.5 - v.cy) / v.focal * z, z);
        cloud.points.push_back(lie::transform_point(v.cam_to_world, p_cam));
        cloud.semantic.push_back(vo.image.semantic[i]);
      }
    }
  }
  return cloud;
}

std::vector<int> farthest_point_sample(const std::vector<Vec3>& points, int k, int start) {
  const int n = static_cast<int>(points.size());
  std::vector<int> picked;
  if (n == 0 || k <= 0) return picked;
  if (k >= n) {
    picked.resize(static_cast<size_t>(n));
    std::iota(picked.begin(), picked.end(), 0);
    return picked;
  }
  std::vector<double> dist(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
  int cur = start;
  picked.push_back(cur);
  for (int round = 1; round < k; ++round) {
    double best = -1.0;
    int arg = 0;
    for (int i = 0; i < n; ++i) {
      const double d = (points[static_cast<size_t>(i)] - points[static_cast<size_t>(cur)]).squaredNorm();
      if (d < dist[static_cast<size_t>(i)]) dist[static_cast<size_t>(i)] = d;
      if (dist[static_cast<size_t>(i)] > best) {
        best = dist[static_cast<size_t>(i)];
        arg = i;
      }
    }
    cur = arg;
    picked.push_back(cur);
  }
  return picked;
}

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

/// Kernel-budget selection: stratified FPS. The target occupies a small
/// fraction of the visible surface, so plain FPS would starve it of kernels;
/// the semantic stratum gets a floor (mirroring how 3DGS densification puts
/// far more splats on detailed objects than uniform coverage would).
std::vector<int> select_kernel_indices(const std::vector<Vec3>& points,
                                       const std::vector<uint8_t>& semantic, int budget) {
  std::vector<Vec3> sem_pts, bg_pts;
  std::vector<int> sem_idx, bg_idx;
  for (size_t i = 0; i < points.size(); ++i) {
    if (semantic[i]) {
      sem_idx.push_back(static_cast<int>(i));
      sem_pts.push_back(points[i]);
    } else {
      bg_idx.push_back(static_cast<int>(i));
      bg_pts.push_back(points[i]);
    }
  }
  const int sem_avail = static_cast<int>(sem_pts.size());
  int sem_budget = std::min(sem_avail, std::max(budget / 4, 192));
  sem_budget = std::min(sem_budget, budget);
  const int bg_budget = budget - sem_budget;
  std::vector<int> out;
  for (int p : farthest_point_sample(sem_pts, sem_budget, 0)) {
    out.push_back(sem_idx[static_cast<size_t>(p)]);
  }
  for (int p : farthest_point_sample(bg_pts, bg_budget, 0)) {
    out.push_back(bg_idx[static_cast<size_t>(p)]);
  }
  return out;
}

SceneEstimate init_estimate(const BackprojectedCloud& cloud, const FitConfig& cfg) {
  if (cloud.points.empty()) {
    throw std::runtime_error("fit_from_views: every view was all-no-hit");
  }
  const std::vector<int> pick = select_kernel_indices(cloud.points, cloud.semantic, cfg.kernel_count);
  SceneEstimate est;
  est.lambda = cfg.lambda;
  est.max_range = cfg.max_range;
  est.kernels.reserve(pick.size());
  for (int i : pick) {
    Kernel k;
    k.mu = cloud.points[static_cast<size_t>(i)];
    k.log_scale = std::log(cfg.init_scale);
    k.logit_alpha = logit(cfg.init_alpha);
    k.logit_sem = cloud.semantic[static_cast<size_t>(i)] ? 1.5 : -1.5;
    est.kernels.push_back(k);
  }
  return est;
}

void optimize(SceneEstimate* est, const std::vector<ViewObservation>& views, const FitConfig& cfg,
              int steps) {
  if (steps <= 0) return;
  const int64_t nk = static_cast<int64_t>(est->kernels.size());
  // Positions and shape logits live in separate stores so they can take
  // different Adam rates.
  ad::ParamStore pos_store, shape_store;
  {
    const Eigen::VectorXd p = est->params();
    std::vector<double> mu(static_cast<size_t>(3 * nk));
    std::vector<double> shape(static_cast<size_t>(3 * nk));
    for (int64_t i = 0; i < nk; ++i) {
      for (int j = 0; j < 3; ++j) mu[static_cast<size_t>(3 * i + j)] = p[6 * i + j];
      for (int j = 0; j < 3; ++j) shape[static_cast<size_t>(3 * i + j)] = p[6 * i + 3 + j];
    }
    pos_store.create("splat.mu", ad::Tensor({3 * nk}, std::move(mu)));
    shape_store.create("splat.shape", ad::Tensor({3 * nk}, std::move(shape)));
  }
  auto load_params = [&] {
    const ad::Tensor& mu = pos_store.value("splat.mu");
    const ad::Tensor& shape = shape_store.value("splat.shape");
    Eigen::VectorXd p(6 * nk);
    for (int64_t i = 0; i < nk; ++i) {
      for (int j = 0; j < 3; ++j) p[6 * i + j] = mu[3 * i + j];
      for (int j = 0; j < 3; ++j) p[6 * i + 3 + j] = shape[3 * i + j];
    }
    est->set_params(p);
  };

  std::vector<ViewCache> caches;
  caches.reserve(views.size());
  for (const auto& vo : views) caches.push_back(make_cache(vo.view));

  const double norm = 1.0 / static_cast<double>(views.size());
  std::vector<std::vector<Hit>> hits;
  std::vector<double> T;
  for (int step = 0; step < steps; ++step) {
    load_params();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(est->param_count());
    for (size_t vi = 0; vi < views.size(); ++vi) {
      const ViewCache& c = caches[vi];
      const world::DepthImage& img = views[vi].image;
      gather_hits(*est, c, &hits);
      const double px_norm = norm / static_cast<double>(c.W * c.H);
      for (int64_t pi = 0; pi < static_cast<int64_t>(c.W) * c.H; ++pi) {
        const auto& h = hits[static_cast<size_t>(pi)];
        if (h.empty()) continue;
        const PixelForward f = composite(*est, h, &T);
        const bool hit_px = img.hit[static_cast<size_t>(pi)] != 0;
        const double d_target = hit_px ? img.depth[static_cast<size_t>(pi)] : est->max_range;
        const double s_target = (hit_px && img.semantic[static_cast<size_t>(pi)]) ? 1.0 : 0.0;
        const double gd = 2.0 * (f.depth - d_target) * px_norm;
        constexpr double kEps = 1e-6;
        const double gs = cfg.semantic_weight * px_norm *
                          (-s_target / (f.semantic + kEps) +
                           (1.0 - s_target) / (1.0 - f.semantic + kEps));
        pixel_backward(*est, c, static_cast<size_t>(pi), h, T, gd, gs, &grad, nullptr);
      }
    }
    ad::Tensor mu_grad({3 * nk});
    ad::Tensor shape_grad({3 * nk});
    for (int64_t i = 0; i < nk; ++i) {
      for (int j = 0; j < 3; ++j) mu_grad[3 * i + j] = grad[6 * i + j];
      for (int j = 0; j < 3; ++j) shape_grad[3 * i + j] = grad[6 * i + 3 + j];
    }
    pos_store.zero_grad();
    shape_store.zero_grad();
    pos_store.accumulate_grad("splat.mu", mu_grad);
    shape_store.accumulate_grad("splat.shape", shape_grad);
    pos_store.adam_step(cfg.position_lr);
    shape_store.adam_step(cfg.lr);
  }
  load_params();
}

}  // namespace

SceneEstimate fit_from_views(const std::vector<ViewObservation>& views, const FitConfig& cfg) {
  if (views.empty()) throw std::invalid_argument("fit_from_views: needs at least one view");
  SceneEstimate est = init_estimate(backproject(views), cfg);
  optimize(&est, views, cfg, cfg.steps);
  est.fitted_views.clear();
  for (const auto& vo : views) est.fitted_views.push_back(vo.view);
  return est;
}

SceneEstimate refit(const SceneEstimate& prev, const std::vector<ViewObservation>& all_views,
                    const std::vector<ViewObservation>& new_views, const FitConfig& cfg,
                    int steps) {
  // Candidate set: surviving kernels first (parameters carried over), then
  // fresh back-projections from the new views.
  const BackprojectedCloud fresh = backproject(new_views);
  std::vector<Vec3> positions;
  std::vector<uint8_t> semantic;
  positions.reserve(prev.kernels.size() + fresh.points.size());
  for (const Kernel& k : prev.kernels) {
    positions.push_back(k.mu);
    semantic.push_back(k.semantic() > 0.5 ? 1 : 0);
  }
  for (size_t i = 0; i < fresh.points.size(); ++i) {
    positions.push_back(fresh.points[i]);
    semantic.push_back(fresh.semantic[i]);
  }

  const std::vector<int> pick = select_kernel_indices(positions, semantic, cfg.kernel_count);
  SceneEstimate est;
  est.lambda = cfg.lambda;
  est.max_range = cfg.max_range;
  for (int i : pick) {
    if (i < static_cast<int>(prev.kernels.size())) {
      est.kernels.push_back(prev.kernels[static_cast<size_t>(i)]);
    } else {
      const size_t fi = static_cast<size_t>(i) - prev.kernels.size();
      Kernel k;
      k.mu = fresh.points[fi];
      k.log_scale = std::log(cfg.init_scale);
      k.logit_alpha = logit(cfg.init_alpha);
      k.logit_sem = fresh.semantic[fi] ? 1.5 : -1.5;
      est.kernels.push_back(k);
    }
  }
  optimize(&est, all_views, cfg, steps);
  est.fitted_views.clear();
  for (const auto& vo : all_views) est.fitted_views.push_back(vo.view);
  return est;
}

ForegroundSplit extract_foreground(const SceneEstimate& est, double radius) {
  const int n = static_cast<int>(est.kernels.size());
  std::vector<int> semantic_idx;
  for (int i = 0; i < n; ++i) {
    if (est.kernels[static_cast<size_t>(i)].semantic() > 0.5) semantic_idx.push_back(i);
  }

  // Single-linkage clustering, distance 0.01, minimum size 50.
  constexpr double kLinkDistance = 0.01;
  constexpr int kMinClusterSize = 50;
  const int m = static_cast<int>(semantic_idx.size());
  std::vector<int> parent(static_cast<size_t>(m));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const double d = (est.kernels[static_cast<size_t>(semantic_idx[static_cast<size_t>(a)])].mu -
                        est.kernels[static_cast<size_t>(semantic_idx[static_cast<size_t>(b)])].mu)
                           .norm();
      if (d <= kLinkDistance) {
        const int ra = find(a), rb = find(b);
        if (ra != rb) parent[static_cast<size_t>(std::max(ra, rb))] = std::min(ra, rb);
      }
    }
  }
  std::vector<int> cluster_size(static_cast<size_t>(m), 0);
  for (int a = 0; a < m; ++a) ++cluster_size[static_cast<size_t>(find(a))];
  int best_root = -1;
  for (int r = 0; r < m; ++r) {
    if (cluster_size[static_cast<size_t>(r)] >= kMinClusterSize &&
        (best_root < 0 ||
         cluster_size[static_cast<size_t>(r)] > cluster_size[static_cast<size_t>(best_root)])) {
      best_root = r;
    }
  }
  if (best_root < 0) {
    throw std::runtime_error("extract_foreground: no semantic cluster of size >= 50");
  }

  ForegroundSplit out;
  Vec3 centroid = Vec3::Zero();
  std::vector<bool> in_fg(static_cast<size_t>(n), false);
  int count = 0;
  for (int a = 0; a < m; ++a) {
    if (find(a) == best_root) {
      const int ki = semantic_idx[static_cast<size_t>(a)];
      in_fg[static_cast<size_t>(ki)] = true;
      centroid += est.kernels[static_cast<size_t>(ki)].mu;
      ++count;
    }
  }
  centroid /= static_cast<double>(count);
  out.centroid = centroid;
  for (int i = 0; i < n; ++i) {
    if ((est.kernels[static_cast<size_t>(i)].mu - centroid).norm() <= radius) {
      in_fg[static_cast<size_t>(i)] = true;
    }
  }

  std::vector<Vec3> fg_pts, bg_pts;
  std::vector<int> fg_idx, bg_idx;
  for (int i = 0; i < n; ++i) {
    if (in_fg[static_cast<size_t>(i)]) {
      fg_idx.push_back(i);
      fg_pts.push_back(est.kernels[static_cast<size_t>(i)].mu);
    } else {
      bg_idx.push_back(i);
      bg_pts.push_back(est.kernels[static_cast<size_t>(i)].mu);
    }
  }
  for (int p : farthest_point_sample(fg_pts, kForegroundPoints, 0)) {
    out.foreground.push_back(fg_idx[static_cast<size_t>(p)]);
  }
  for (int p : farthest_point_sample(bg_pts, kBackgroundPoints, 0)) {
    out.background.push_back(bg_idx[static_cast<size_t>(p)]);
  }
  return out;
}

}  // namespace grasplab::splat
