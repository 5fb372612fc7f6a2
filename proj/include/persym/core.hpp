#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace persym {

inline constexpr double pi = 3.14159265358979323846;

/// Raised when a computation detects an internal numerical inconsistency
/// (as opposed to invalid input, which raises std::invalid_argument).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double angle_mod_2pi(double a) {
  double r = std::fmod(a, 2.0 * pi);
  if (r < 0) r += 2.0 * pi;
  if (r >= 2.0 * pi) r = 0.0;
  return r;
}

inline double angle_mod_pi(double a) {
  double r = std::fmod(a, pi);
  if (r < 0) r += pi;
  if (r >= pi) r = 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Assignment solvers
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr double forbidden_cost = 1e30;

/// Hungarian algorithm with potentials, O(n^3).  Returns the row -> column
/// permutation minimizing the total cost of a dense square matrix.
inline std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw std::invalid_argument("hungarian: matrix must be square");
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> result(n);
  for (int j = 1; j <= n; ++j) result[p[j] - 1] = j - 1;
  return result;
}

inline double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& perm) {
  double total = 0.0;
  for (int i = 0; i < static_cast<int>(perm.size()); ++i) total += cost(i, perm[i]);
  return total;
}

/// Minimum-cost assignment over all permutations different from `excluded`.
/// Solved by forcing, in turn, each row away from its excluded column.
inline std::pair<std::vector<int>, double> hungarian_excluding(
    const Eigen::MatrixXd& cost, const std::vector<int>& excluded) {
  const int n = static_cast<int>(cost.rows());
  if (n < 2) throw std::invalid_argument("hungarian_excluding: need at least two points");
  std::vector<int> best = hungarian(cost);
  if (best != excluded) return {best, assignment_cost(cost, best)};
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> best_perm;
  Eigen::MatrixXd modified = cost;
  for (int i = 0; i < n; ++i) {
    const double saved = modified(i, excluded[i]);
    modified(i, excluded[i]) = forbidden_cost;
    std::vector<int> perm = hungarian(modified);
    modified(i, excluded[i]) = saved;
    if (perm[i] == excluded[i]) continue;
    double c = assignment_cost(cost, perm);
    if (c < best_cost) {
      best_cost = c;
      best_perm = perm;
    }
  }
  if (best_perm.empty()) throw numeric_error("hungarian_excluding: no alternative assignment found");
  return {best_perm, best_cost};
}

/// Kuhn augmenting-path matching on an explicit bipartite adjacency list.
/// Returns a full row -> column matching, or nothing if none exists.
inline std::optional<std::vector<int>> kuhn_matching(
    const std::vector<std::vector<int>>& adj, int n) {
  std::vector<int> match_col(n, -1);
  std::vector<char> used;
  std::function<bool(int)> try_row = [&](int r) -> bool {
    for (int c : adj[r]) {
      if (used[c]) continue;
      used[c] = 1;
      if (match_col[c] < 0 || try_row(match_col[c])) {
        match_col[c] = r;
        return true;
      }
    }
    return false;
  };
  for (int r = 0; r < n; ++r) {
    used.assign(n, 0);
    if (!try_row(r)) return std::nullopt;
  }
  std::vector<int> row_to_col(n, -1);
  for (int c = 0; c < n; ++c) row_to_col[match_col[c]] = c;
  return row_to_col;
}

}  // namespace detail

/// A bijection on {0..n-1} together with the assignment cost it realizes.
struct Matching {
  std::vector<int> permutation;
  double cost = 0.0;
};

inline bool is_permutation_vector(const std::vector<int>& p) {
  const int n = static_cast<int>(p.size());
  std::vector<char> seen(n, 0);
  for (int v : p) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

inline std::vector<int> compose_perm(const std::vector<int>& a, const std::vector<int>& b) {
  // (a o b)(i) = a[b[i]]
  std::vector<int> r(b.size());
  for (size_t i = 0; i < b.size(); ++i) r[i] = a[b[i]];
  return r;
}

inline std::vector<int> invert_perm(const std::vector<int>& p) {
  std::vector<int> r(p.size());
  for (size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
  return r;
}

inline std::vector<int> identity_perm(int n) {
  std::vector<int> r(n);
  std::iota(r.begin(), r.end(), 0);
  return r;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// A labeled ordered finite point set in R^k, k in {1,2,3}, with an absolute
/// distance tolerance.  Points are columns of `points`.
struct Configuration {
  Eigen::MatrixXd points;           // k x n
  std::vector<std::string> labels;  // n distinct identifiers
  double tol = 0.0;

  int dim() const { return static_cast<int>(points.rows()); }
  int size() const { return static_cast<int>(points.cols()); }
  Eigen::VectorXd point(int i) const { return points.col(i); }
};

inline double diameter(const Eigen::MatrixXd& pts) {
  double d = 0.0;
  for (int i = 0; i < pts.cols(); ++i)
    for (int j = i + 1; j < pts.cols(); ++j)
      d = std::max(d, (pts.col(i) - pts.col(j)).norm());
  return d;
}

inline std::vector<std::string> default_labels(int n) {
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return labels;
}

/// Build a validated configuration.  A negative tol requests the default,
/// 1e-7 times the configuration diameter.
inline Configuration make_configuration(Eigen::MatrixXd pts,
                                        std::vector<std::string> labels = {},
                                        double tol = -1.0) {
  const int k = static_cast<int>(pts.rows());
  const int n = static_cast<int>(pts.cols());
  if (k < 1 || k > 3) throw std::invalid_argument("configuration: dimension must be 1, 2 or 3");
  if (n < 1) throw std::invalid_argument("configuration: need at least one point");
  if (labels.empty()) labels = default_labels(n);
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("configuration: label count must match point count");
  {
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("configuration: labels must be distinct");
  }
  if (tol < 0.0) tol = 1e-7 * diameter(pts);
  double min_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      min_dist = std::min(min_dist, (pts.col(i) - pts.col(j)).norm());
  if (n > 1 && !(min_dist > 2.0 * tol))
    throw std::invalid_argument("configuration: points must be pairwise distinct beyond 2*tol");
  return Configuration{std::move(pts), std::move(labels), tol};
}

inline Configuration make_configuration(const std::vector<Eigen::VectorXd>& pts,
                                        std::vector<std::string> labels = {},
                                        double tol = -1.0) {
  if (pts.empty()) throw std::invalid_argument("configuration: need at least one point");
  Eigen::MatrixXd m(pts.front().size(), pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].size() != m.rows())
      throw std::invalid_argument("configuration: all points must have the same dimension");
    m.col(static_cast<int>(i)) = pts[i];
  }
  return make_configuration(std::move(m), std::move(labels), tol);
}

inline Eigen::VectorXd centroid(const Configuration& x) {
  return x.points.rowwise().mean();
}

// ---------------------------------------------------------------------------
// Isometry
// ---------------------------------------------------------------------------

enum class isometry_kind {
  rotation,        // proper; angle 0 is the identity
  reflection,      // 2D: line at `angle`; 3D: plane with normal `normal`
  rotoreflection,  // 3D improper with nonzero rotation part
};

/// Affine isometry x -> Q x + t with the symmetry descriptor of its
/// orthogonal part.  2D descriptors: rotation angle in [0,2pi) or reflection
/// axis angle in [0,pi).  3D descriptors: rotation angle in [0,pi], unit
/// axis, and unit mirror normal (zero for proper elements); improper
/// elements are rotoreflections about axis = normal.
struct Isometry {
  Eigen::MatrixXd linear;       // k x k orthogonal
  Eigen::VectorXd translation;  // k
  isometry_kind kind = isometry_kind::rotation;
  double angle = 0.0;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();

  int dim() const { return static_cast<int>(linear.rows()); }
  bool is_identity(double tol = 1e-12) const {
    return (linear - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff() <= tol &&
           translation.cwiseAbs().maxCoeff() <= tol;
  }
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return linear * x + translation; }
};

inline Eigen::Matrix2d rotation_matrix_2d(double theta) {
  Eigen::Matrix2d q;
  q << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return q;
}

inline Eigen::Matrix2d reflection_matrix_2d(double alpha) {
  Eigen::Matrix2d q;
  q << std::cos(2 * alpha), std::sin(2 * alpha), std::sin(2 * alpha), -std::cos(2 * alpha);
  return q;
}

inline Eigen::Vector3d canonical_direction(Eigen::Vector3d v, double tol = 1e-12) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) > tol) {
      if (v[i] < 0) v = -v;
      break;
    }
  }
  return v;
}

/// Fill in the descriptor of an isometry from its orthogonal part.
inline void attach_descriptor(Isometry& iso) {
  const int k = iso.dim();
  const double det = iso.linear.determinant();
  if (k == 1) {
    iso.kind = det > 0 ? isometry_kind::rotation : isometry_kind::reflection;
    iso.angle = 0.0;
    return;
  }
  if (k == 2) {
    if (det > 0) {
      iso.kind = isometry_kind::rotation;
      iso.angle = angle_mod_2pi(std::atan2(iso.linear(1, 0), iso.linear(0, 0)));
    } else {
      iso.kind = isometry_kind::reflection;
      iso.angle = angle_mod_pi(0.5 * std::atan2(iso.linear(1, 0), iso.linear(0, 0)));
    }
    return;
  }
  // AngleAxis extracts the unique angle in [0, pi]; the axis sign is only
  // ambiguous at the endpoints, where it may be canonicalized freely.
  Eigen::Matrix3d q = iso.linear;
  if (det > 0) {
    Eigen::AngleAxisd aa(q);
    iso.kind = isometry_kind::rotation;
    iso.angle = aa.angle();
    iso.normal.setZero();
    if (iso.angle <= 1e-12) {
      iso.angle = 0.0;
      iso.axis = Eigen::Vector3d::UnitZ();
    } else if (iso.angle >= pi - 1e-12) {
      iso.angle = pi;
      iso.axis = canonical_direction(aa.axis());
    } else {
      iso.axis = aa.axis();
    }
    return;
  }
  // Improper: every improper element is a rotoreflection about its mirror
  // normal.  With -A = R_v(phi), A = R_{-v}(pi - phi) M(v).
  Eigen::AngleAxisd aa(Eigen::Matrix3d(-q));
  const double phi = aa.angle();
  const double theta = pi - phi;
  if (theta <= 1e-12) {
    iso.kind = isometry_kind::reflection;
    iso.angle = 0.0;
    iso.normal = canonical_direction(aa.axis());
    iso.axis = iso.normal;
  } else if (phi <= 1e-12) {
    iso.kind = isometry_kind::rotoreflection;  // point inversion
    iso.angle = pi;
    iso.axis = Eigen::Vector3d::UnitZ();
    iso.normal = Eigen::Vector3d::UnitZ();
  } else {
    iso.kind = isometry_kind::rotoreflection;
    iso.angle = theta;
    iso.axis = -aa.axis();
    iso.normal = canonical_direction(aa.axis());
  }
}

/// Reconstruct the orthogonal matrix encoded by an isometry's descriptor.
inline Eigen::MatrixXd matrix_from_descriptor(const Isometry& iso) {
  const int k = iso.dim();
  if (k == 1) {
    Eigen::MatrixXd q(1, 1);
    q(0, 0) = iso.kind == isometry_kind::reflection ? -1.0 : 1.0;
    return q;
  }
  if (k == 2) {
    return iso.kind == isometry_kind::reflection ? Eigen::MatrixXd(reflection_matrix_2d(iso.angle))
                                                 : Eigen::MatrixXd(rotation_matrix_2d(iso.angle));
  }
  Eigen::Matrix3d rot = Eigen::AngleAxisd(iso.angle, iso.axis.normalized()).toRotationMatrix();
  if (iso.kind == isometry_kind::rotation) return rot;
  Eigen::Vector3d n = iso.normal.normalized();
  Eigen::Matrix3d mirror = Eigen::Matrix3d::Identity() - 2.0 * n * n.transpose();
  if (iso.kind == isometry_kind::reflection) return mirror;
  return rot * mirror;
}

inline Isometry make_isometry(Eigen::MatrixXd q, Eigen::VectorXd t) {
  if (q.rows() != q.cols() || q.rows() != t.size())
    throw std::invalid_argument("isometry: inconsistent shapes");
  if ((q.transpose() * q - Eigen::MatrixXd::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff() >
      1e-9)
    throw std::invalid_argument("isometry: matrix is not orthogonal");
  Isometry iso;
  iso.linear = std::move(q);
  iso.translation = std::move(t);
  attach_descriptor(iso);
  return iso;
}

/// Isometry fixing `center`: x -> Q (x - center) + center.
inline Isometry make_isometry_about(const Eigen::MatrixXd& q, const Eigen::VectorXd& center) {
  return make_isometry(q, center - q * center);
}

inline Isometry make_rotation_2d(double theta, const Eigen::Vector2d& center = Eigen::Vector2d::Zero()) {
  return make_isometry_about(rotation_matrix_2d(theta), center);
}

inline Isometry make_reflection_2d(double alpha, const Eigen::Vector2d& center = Eigen::Vector2d::Zero()) {
  return make_isometry_about(reflection_matrix_2d(alpha), center);
}

inline Isometry make_rotation_3d(const Eigen::Vector3d& axis, double theta,
                                 const Eigen::Vector3d& center = Eigen::Vector3d::Zero()) {
  Eigen::Matrix3d q = Eigen::AngleAxisd(theta, axis.normalized()).toRotationMatrix();
  return make_isometry_about(q, center);
}

inline Isometry make_reflection_3d(const Eigen::Vector3d& normal,
                                   const Eigen::Vector3d& center = Eigen::Vector3d::Zero()) {
  Eigen::Vector3d n = normal.normalized();
  Eigen::Matrix3d q = Eigen::Matrix3d::Identity() - 2.0 * n * n.transpose();
  return make_isometry_about(q, center);
}

inline Isometry identity_isometry(int k) {
  return make_isometry(Eigen::MatrixXd::Identity(k, k), Eigen::VectorXd::Zero(k));
}

inline Isometry compose(const Isometry& a, const Isometry& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("compose: dimension mismatch");
  return make_isometry(a.linear * b.linear, a.linear * b.translation + a.translation);
}

inline Isometry inverse(const Isometry& a) {
  Eigen::MatrixXd qt = a.linear.transpose();
  return make_isometry(qt, -(qt * a.translation));
}

inline Configuration apply(const Isometry& iso, const Configuration& x) {
  if (iso.dim() != x.dim()) throw std::invalid_argument("apply: dimension mismatch");
  Configuration y = x;
  y.points = (iso.linear * x.points).colwise() + iso.translation;
  return y;
}

// ---------------------------------------------------------------------------
// Matching operations
// ---------------------------------------------------------------------------

inline Eigen::MatrixXd distance_matrix(const Configuration& x, const Configuration& y) {
  Eigen::MatrixXd d(x.size(), y.size());
  for (int i = 0; i < x.size(); ++i)
    for (int j = 0; j < y.size(); ++j) d(i, j) = (x.points.col(i) - y.points.col(j)).norm();
  return d;
}

/// Bijection matching every point of X to a point of Y within `tol`, if one
/// exists.  The min-sum assignment is tried first; an exact bipartite
/// feasibility search decides the residual cases.
inline std::optional<std::vector<int>> match_within(const Configuration& x,
                                                    const Configuration& y, double tol) {
  if (x.size() != y.size() || x.dim() != y.dim()) return std::nullopt;
  const int n = x.size();
  Eigen::MatrixXd d = distance_matrix(x, y);
  std::vector<int> perm = detail::hungarian(d);
  bool ok = true;
  for (int i = 0; i < n; ++i)
    if (d(i, perm[i]) > tol) {
      ok = false;
      break;
    }
  if (ok) return perm;
  std::vector<std::vector<int>> adj(n);
  bool any = true;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (d(i, j) <= tol) adj[i].push_back(j);
    if (adj[i].empty()) any = false;
  }
  if (!any) return std::nullopt;
  return detail::kuhn_matching(adj, n);
}

inline bool set_equal(const Configuration& x, const Configuration& y) {
  if (x.size() != y.size() || x.dim() != y.dim())
    throw std::invalid_argument("set_equal: size or dimension mismatch");
  return match_within(x, y, std::max(x.tol, y.tol)).has_value();
}

inline Matching wasserstein_matching(const Configuration& x, const Configuration& y, double p) {
  if (x.size() != y.size() || x.dim() != y.dim())
    throw std::invalid_argument("wasserstein: size or dimension mismatch");
  if (p < 1.0) throw std::invalid_argument("wasserstein: p must be >= 1");
  Eigen::MatrixXd d = distance_matrix(x, y);
  Eigen::MatrixXd cost = d.array().pow(p);
  std::vector<int> perm = detail::hungarian(cost);
  Matching m;
  m.cost = std::pow(detail::assignment_cost(cost, perm), 1.0 / p);
  m.permutation = std::move(perm);
  return m;
}

inline double wasserstein(const Configuration& x, const Configuration& y, double p) {
  return wasserstein_matching(x, y, p).cost;
}

// ---------------------------------------------------------------------------
// Radial shells
// ---------------------------------------------------------------------------

struct Shell {
  double radius = 0.0;
  std::vector<int> indices;
  Configuration sub;
};

inline Configuration sub_configuration(const Configuration& x, const std::vector<int>& indices) {
  Eigen::MatrixXd pts(x.dim(), indices.size());
  std::vector<std::string> labels(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) {
    pts.col(static_cast<int>(i)) = x.points.col(indices[i]);
    labels[i] = x.labels[indices[i]];
  }
  Configuration sub;
  sub.points = std::move(pts);
  sub.labels = std::move(labels);
  sub.tol = x.tol;
  return sub;
}

/// Partition of X by distance to its centroid.  Radii within 2*tol of each
/// other are merged transitively; shells are sorted by ascending radius.
inline std::vector<Shell> radial_shells(const Configuration& x) {
  const Eigen::VectorXd c = centroid(x);
  const int n = x.size();
  std::vector<std::pair<double, int>> radii(n);
  for (int i = 0; i < n; ++i) radii[i] = {(x.points.col(i) - c).norm(), i};
  std::sort(radii.begin(), radii.end());
  std::vector<Shell> shells;
  size_t start = 0;
  while (start < radii.size()) {
    size_t end = start + 1;
    while (end < radii.size() && radii[end].first - radii[end - 1].first <= 2.0 * x.tol) ++end;
    Shell s;
    double sum = 0.0;
    for (size_t i = start; i < end; ++i) {
      s.indices.push_back(radii[i].second);
      sum += radii[i].first;
    }
    std::sort(s.indices.begin(), s.indices.end());
    s.radius = sum / static_cast<double>(end - start);
    s.sub = sub_configuration(x, s.indices);
    shells.push_back(std::move(s));
    start = end;
  }
  return shells;
}

inline Configuration centered(const Configuration& x) {
  Configuration y = x;
  y.points = x.points.colwise() - centroid(x).eval();
  return y;
}

}  // namespace persym
