#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "persym/core.hpp"
#include "persym/groups.hpp"

namespace persym {

/// A finite probe set of isometries, all fixing `center`, closed under
/// inversion.  The sampling parameters are kept so downstream heuristics
/// (such as the near-identity threshold) can see the grid resolution;
/// angle_count is zero for planar samples, where rotation_count is the
/// number of rotation steps on the circle.
struct CandidateSet {
  std::vector<Isometry> candidates;
  Eigen::VectorXd center;
  int mirror_count = 0;
  int rotation_count = 0;
  int angle_count = 0;

  /// Angular spacing of the rotation grid, or zero when no grid is declared.
  double rotation_resolution() const {
    const int n = angle_count > 0 ? angle_count : rotation_count;
    return n > 0 ? 2.0 * pi / n : 0.0;
  }
};

/// Per-candidate asymmetry scores.  standard_defect is the unrestricted
/// transport cost W_p(X, pi X); defect excludes the canonical matching;
/// measure is the normalized correlation in [-1, 1].
struct DefectRecord {
  Isometry candidate;
  double standard_defect = 0.0;
  double defect = 0.0;
  double measure = 0.0;
  bool near_identity_flag = false;
};

/// Birth thresholds of approximate symmetries over centroid truncations.
/// births is keyed by (candidate index, radius index) and holds the smallest
/// threshold epsilon_j dominating the standard defect on the truncation;
/// pairs whose defect exceeds every threshold are absent.  Radius indices
/// with an empty truncation are skipped and recorded here instead.
struct FeatureGrid {
  std::vector<double> radii;
  std::vector<double> thresholds;
  std::map<std::pair<int, int>, double> births;
  std::vector<int> skipped_radii;
};

namespace detail {

inline double rotation_angle_magnitude(const Isometry& iso) {
  const double a = angle_mod_2pi(iso.angle);
  return std::min(a, 2.0 * pi - a);
}

/// Largest singular value, by power iteration on a^T a.
inline double operator_norm(const Eigen::MatrixXd& a, int iterations = 256) {
  if (a.size() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(a.cols(), 1.0, 2.0).normalized();
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = a.transpose() * (a * v);
    const double n = w.norm();
    if (n <= 1e-300) return 0.0;
    v = w / n;
  }
  return (a * v).norm();
}

inline std::vector<int> identity_permutation(int n) {
  std::vector<int> id(n);
  for (int i = 0; i < n; ++i) id[i] = i;
  return id;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Defect and measure
// ---------------------------------------------------------------------------

/// Unrestricted transport distance between X and its image pi(X).
inline double standard_defect(const Configuration& x, const Isometry& pi, double p = 2.0) {
  if (x.dim() != pi.dim()) throw std::invalid_argument("standard_defect: dimension mismatch");
  return wasserstein(x, apply(pi, x), p);
}

/// Minimum p-cost over bijections X -> pi(X) other than the canonical one
/// x -> pi(x).  Returned matching sends x_i to pi(x_perm[i]).
inline std::pair<double, Matching> defect(const Configuration& x, const Isometry& pi,
                                          double p = 2.0) {
  if (x.dim() != pi.dim()) throw std::invalid_argument("defect: dimension mismatch");
  if (x.size() < 2)
    throw std::invalid_argument("defect: a single point admits no alternative bijection");
  if (p < 1.0) throw std::invalid_argument("defect: p must be >= 1");
  const Configuration y = apply(pi, x);
  const Eigen::MatrixXd cost = distance_matrix(x, y).array().pow(p);
  auto [perm, total] = detail::hungarian_excluding(cost, detail::identity_permutation(x.size()));
  Matching m;
  m.permutation = std::move(perm);
  m.cost = std::pow(total, 1.0 / p);
  return {m.cost, m};
}

/// Maximum normalized correlation between pi(X) and X over non-identity
/// bijections, in [-1, 1].  The matching's cost field carries the value.
inline std::pair<double, Matching> measure(const Configuration& x, const Isometry& pi) {
  if (x.dim() != pi.dim()) throw std::invalid_argument("measure: dimension mismatch");
  if (x.size() < 2)
    throw std::invalid_argument("measure: a single point admits no alternative bijection");
  const Configuration y = apply(pi, x);
  const double nx = x.points.squaredNorm();
  const double ny = y.points.squaredNorm();
  if (nx <= 0.0 || ny <= 0.0) throw numeric_error("measure: zero-norm configuration");
  const Eigen::MatrixXd cost = -(y.points.transpose() * x.points);
  auto [perm, total] = detail::hungarian_excluding(cost, detail::identity_permutation(x.size()));
  Matching m;
  m.permutation = std::move(perm);
  m.cost = -total / std::sqrt(nx * ny);
  return {m.cost, m};
}

/// Defect at p = 2 divided by the geometric mean of the centered squared
/// norms of X and pi(X).
inline double normalized_defect(const Configuration& x, const Isometry& pi) {
  auto [mu, matching] = defect(x, pi, 2.0);
  const double nx = centered(x).points.squaredNorm();
  const double ny = centered(apply(pi, x)).points.squaredNorm();
  if (nx <= 0.0 || ny <= 0.0) throw numeric_error("normalized_defect: zero-norm configuration");
  return mu / std::sqrt(nx * ny);
}

/// p-th power mean distance between two isometries evaluated on X.
inline double candidate_metric(const Configuration& x, const Isometry& a, const Isometry& b,
                               double p = 2.0) {
  if (x.dim() != a.dim() || x.dim() != b.dim())
    throw std::invalid_argument("candidate_metric: dimension mismatch");
  if (p < 1.0) throw std::invalid_argument("candidate_metric: p must be >= 1");
  double total = 0.0;
  for (int i = 0; i < x.size(); ++i)
    total += std::pow((a(x.point(i)) - b(x.point(i))).norm(), p);
  return std::pow(total, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Candidate sampling
// ---------------------------------------------------------------------------

/// Golden-angle lattice of n nearly uniform unit vectors on the sphere.
inline std::vector<Eigen::Vector3d> fibonacci_sphere(int n) {
  if (n < 1) throw std::invalid_argument("fibonacci_sphere: need at least one point");
  std::vector<Eigen::Vector3d> pts(n);
  const double golden = pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts[i] = Eigen::Vector3d(rho * std::cos(phi), rho * std::sin(phi), z);
  }
  return pts;
}

/// m reflection axes at angles i * pi / m plus the l - 1 nontrivial
/// rotations by 2 pi j / l, all fixing `center`.
inline CandidateSet sample_candidates_2d(const Eigen::Vector2d& center, int m, int l) {
  if (m < 1) throw std::invalid_argument("sample_candidates_2d: need at least one axis");
  if (l < 2) throw std::invalid_argument("sample_candidates_2d: need at least two rotations");
  CandidateSet out;
  out.center = center;
  out.mirror_count = m;
  out.rotation_count = l;
  out.candidates.reserve(static_cast<size_t>(m + l - 1));
  for (int i = 0; i < m; ++i) out.candidates.push_back(make_reflection_2d(pi * i / m, center));
  for (int j = 1; j < l; ++j)
    out.candidates.push_back(make_rotation_2d(2.0 * pi * j / l, center));
  return out;
}

/// m mirror normals and l rotation axes from Fibonacci lattices, q - 1
/// nontrivial angles 2 pi k / q per axis, and the improper compositions of
/// every sampled rotation with the fixed xOy mirror.  A final pass appends
/// any missing inverses so the set is closed under inversion.
inline CandidateSet sample_candidates_3d(const Eigen::Vector3d& center, int m, int l, int q) {
  if (m < 1) throw std::invalid_argument("sample_candidates_3d: need at least one mirror normal");
  if (l < 1) throw std::invalid_argument("sample_candidates_3d: need at least one axis");
  if (q < 2) throw std::invalid_argument("sample_candidates_3d: need at least two angles");
  CandidateSet out;
  out.center = center;
  out.mirror_count = m;
  out.rotation_count = l;
  out.angle_count = q;
  std::map<std::vector<long long>, int> seen;
  auto push = [&](const Eigen::Matrix3d& a) {
    if (seen.emplace(detail::quantized_matrix(a), 1).second)
      out.candidates.push_back(make_isometry_about(a, center));
  };
  for (const Eigen::Vector3d& n : fibonacci_sphere(m))
    push(Eigen::Matrix3d::Identity() - 2.0 * n * n.transpose());
  Eigen::Matrix3d xy_mirror = Eigen::Matrix3d::Identity();
  xy_mirror(2, 2) = -1.0;
  for (const Eigen::Vector3d& v : fibonacci_sphere(l))
    for (int k = 1; k < q; ++k) {
      const Eigen::Matrix3d r = Eigen::AngleAxisd(2.0 * pi * k / q, v).toRotationMatrix();
      push(r);
      push(xy_mirror * r);
    }
  for (size_t i = 0; i < out.candidates.size(); ++i)
    push(out.candidates[i].linear.transpose());
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps and approximate groups
// ---------------------------------------------------------------------------

/// Evaluate every candidate against X.  A record is flagged near-identity
/// when its candidate is a rotation by less than `near_identity_threshold`
/// (default: the sampling grid's rotation resolution) whose unrestricted
/// optimal matching is the canonical one; such rotations score a deceptively
/// small defect on any configuration.  Records keep the candidate order.
inline std::vector<DefectRecord> defect_sweep(const Configuration& x, const CandidateSet& gamma,
                                              double p = 2.0,
                                              double near_identity_threshold = -1.0,
                                              int threads = 1) {
  if (x.size() < 2) throw std::invalid_argument("defect_sweep: need at least two points");
  if (p < 1.0) throw std::invalid_argument("defect_sweep: p must be >= 1");
  for (const Isometry& c : gamma.candidates)
    if (c.dim() != x.dim()) throw std::invalid_argument("defect_sweep: dimension mismatch");
  if (near_identity_threshold < 0.0) near_identity_threshold = gamma.rotation_resolution();
  const int n = x.size();
  const double nx = x.points.squaredNorm();
  const std::vector<int> id = detail::identity_permutation(n);
  std::vector<DefectRecord> records(gamma.candidates.size());

  auto evaluate = [&](size_t i) {
    const Isometry& c = gamma.candidates[i];
    const Configuration y = apply(c, x);
    const Eigen::MatrixXd cost = distance_matrix(x, y).array().pow(p);
    const std::vector<int> unrestricted = detail::hungarian(cost);
    const bool canonical = unrestricted == id;
    DefectRecord rec;
    rec.candidate = c;
    rec.standard_defect = std::pow(detail::assignment_cost(cost, unrestricted), 1.0 / p);
    rec.defect = std::pow(detail::hungarian_excluding(cost, id).second, 1.0 / p);
    const double ny = y.points.squaredNorm();
    if (nx <= 0.0 || ny <= 0.0) throw numeric_error("defect_sweep: zero-norm configuration");
    const Eigen::MatrixXd corr = -(y.points.transpose() * x.points);
    rec.measure = -detail::hungarian_excluding(corr, id).second / std::sqrt(nx * ny);
    rec.near_identity_flag = c.kind == isometry_kind::rotation && canonical &&
                             detail::rotation_angle_magnitude(c) < near_identity_threshold;
    records[i] = std::move(rec);
  };

  const size_t count = gamma.candidates.size();
  if (threads <= 1 || count < 2) {
    for (size_t i = 0; i < count; ++i) evaluate(i);
    return records;
  }
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      for (size_t i; (i = next.fetch_add(1)) < count;) evaluate(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  const int width = std::min<int>(threads, static_cast<int>(count));
  pool.reserve(static_cast<size_t>(width));
  for (int w = 0; w < width; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return records;
}

/// Best unflagged record by standard defect, or null when every record is
/// flagged.
inline const DefectRecord* best_record(const std::vector<DefectRecord>& records) {
  const DefectRecord* best = nullptr;
  for (const DefectRecord& r : records) {
    if (r.near_identity_flag) continue;
    if (!best || r.standard_defect < best->standard_defect) best = &r;
  }
  return best;
}

/// Candidates whose standard defect against X is at most eps.
inline std::vector<Isometry> approx_sym_group(const Configuration& x, double eps,
                                              const CandidateSet& gamma, double p = 2.0) {
  if (eps < 0.0) throw std::invalid_argument("approx_sym_group: eps must be nonnegative");
  std::vector<Isometry> out;
  for (const Isometry& c : gamma.candidates)
    if (standard_defect(x, c, p) <= eps) out.push_back(c);
  return out;
}

/// Birth thresholds of every candidate on the centroid truncations
/// X_r = {x : |x - centroid| <= r}.  The configuration is centered first and
/// each candidate acts through its linear part, so all candidates are
/// effectively recentered to the centroid of the full configuration.
inline FeatureGrid feature_grid(const Configuration& x, std::vector<double> radii,
                                std::vector<double> epsilons, const CandidateSet& gamma,
                                double p = 2.0) {
  if (radii.empty()) throw std::invalid_argument("feature_grid: need at least one radius");
  if (epsilons.empty()) throw std::invalid_argument("feature_grid: need at least one threshold");
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i - 1] < radii[i]))
      throw std::invalid_argument("feature_grid: radii must be strictly increasing");
  for (size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i - 1] < epsilons[i]))
      throw std::invalid_argument("feature_grid: thresholds must be strictly increasing");
  for (const Isometry& c : gamma.candidates)
    if (c.dim() != x.dim()) throw std::invalid_argument("feature_grid: dimension mismatch");
  const Configuration cx = centered(x);
  std::vector<Isometry> linear;
  linear.reserve(gamma.candidates.size());
  for (const Isometry& c : gamma.candidates)
    linear.push_back(make_isometry(c.linear, Eigen::VectorXd::Zero(c.dim())));
  FeatureGrid grid;
  grid.radii = std::move(radii);
  grid.thresholds = std::move(epsilons);
  for (int ri = 0; ri < static_cast<int>(grid.radii.size()); ++ri) {
    std::vector<int> inside;
    for (int i = 0; i < cx.size(); ++i)
      if (cx.points.col(i).norm() <= grid.radii[ri]) inside.push_back(i);
    if (inside.empty()) {
      grid.skipped_radii.push_back(ri);
      continue;
    }
    const Configuration sub = sub_configuration(cx, inside);
    for (int ci = 0; ci < static_cast<int>(linear.size()); ++ci) {
      const double mu = standard_defect(sub, linear[ci], p);
      auto it = std::lower_bound(grid.thresholds.begin(), grid.thresholds.end(), mu);
      if (it != grid.thresholds.end()) grid.births[{ci, ri}] = *it;
    }
  }
  return grid;
}

/// Single-linkage H0 persistence of the candidate set under the metric
/// d_{X,p}.  Every bar is born at zero; the finite deaths are the minimum
/// spanning tree merge radii, listed in ascending order, followed by the
/// one essential bar.
inline std::vector<std::pair<double, double>> probe_h0(const Configuration& x,
                                                       const CandidateSet& gamma,
                                                       double p = 2.0) {
  const int n = static_cast<int>(gamma.candidates.size());
  if (n < 2) throw std::invalid_argument("probe_h0: need at least two candidates");
  std::vector<Eigen::MatrixXd> images(n);
  for (int i = 0; i < n; ++i) images[i] = apply(gamma.candidates[i], x).points;
  auto metric = [&](int a, int b) {
    double total = 0.0;
    for (int i = 0; i < x.size(); ++i)
      total += std::pow((images[a].col(i) - images[b].col(i)).norm(), p);
    return std::pow(total, 1.0 / p);
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<char> used(n, 0);
  std::vector<double> merges;
  dist[0] = 0.0;
  for (int step = 0; step < n; ++step) {
    int u = -1;
    for (int i = 0; i < n; ++i)
      if (!used[i] && (u < 0 || dist[i] < dist[u])) u = i;
    used[u] = 1;
    if (step > 0) merges.push_back(dist[u]);
    for (int i = 0; i < n; ++i)
      if (!used[i]) dist[i] = std::min(dist[i], metric(u, i));
  }
  std::sort(merges.begin(), merges.end());
  std::vector<std::pair<double, double>> bars;
  bars.reserve(static_cast<size_t>(n));
  for (double w : merges) bars.emplace_back(0.0, w);
  bars.emplace_back(0.0, inf);
  return bars;
}

}  // namespace persym
