#pragma once

#include <persym/core.hpp>

#include <map>
#include <set>
#include <tuple>

namespace persym {

/// A symmetry of a configuration: an isometry fixing the centroid together
/// with the index permutation it induces (iso(x_i) = x_perm[i]).
struct SymmetryElement {
  Isometry iso;
  std::vector<int> perm;
};

struct SymmetryGroup {
  std::vector<SymmetryElement> elements;
  Configuration base;

  int order() const { return static_cast<int>(elements.size()); }
  bool contains_perm(const std::vector<int>& p) const {
    for (auto& e : elements)
      if (e.perm == p) return true;
    return false;
  }
  const SymmetryElement* find_perm(const std::vector<int>& p) const {
    for (auto& e : elements)
      if (e.perm == p) return &e;
    return nullptr;
  }
};

/// Least-squares orthogonal alignment: the Q in O(k) minimizing
/// ||target - Q source||_F.  When the optimum is degenerate (rank-deficient
/// cross-covariance) the SVD's deterministic output breaks the tie.
inline Eigen::MatrixXd orthogonal_procrustes(const Eigen::MatrixXd& source,
                                             const Eigen::MatrixXd& target) {
  Eigen::MatrixXd c = target * source.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

namespace detail {

inline bool perm_preserves_distances(const std::vector<int>& q, const Configuration& y,
                                     double tol) {
  const int n = y.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double before = (y.points.col(i) - y.points.col(j)).norm();
      double after = (y.points.col(q[i]) - y.points.col(q[j])).norm();
      if (std::abs(before - after) > 2.0 * tol) return false;
    }
  return true;
}

inline std::vector<long long> quantized_matrix(const Eigen::MatrixXd& q) {
  std::vector<long long> key;
  key.reserve(q.size());
  for (int i = 0; i < q.rows(); ++i)
    for (int j = 0; j < q.cols(); ++j) key.push_back(llround(q(i, j) * 1e6));
  return key;
}

inline int element_rank(const SymmetryElement& e) {
  if (e.iso.kind == isometry_kind::rotation) return e.iso.angle <= 1e-12 ? 0 : 1;
  if (e.iso.kind == isometry_kind::reflection) return 2;
  return 3;
}

inline bool element_less(const SymmetryElement& a, const SymmetryElement& b) {
  int ra = element_rank(a), rb = element_rank(b);
  if (ra != rb) return ra < rb;
  if (std::abs(a.iso.angle - b.iso.angle) > 1e-9) return a.iso.angle < b.iso.angle;
  for (int i = 0; i < 3; ++i) {
    double d = a.iso.axis[i] - b.iso.axis[i];
    if (std::abs(d) > 1e-9) return d < 0;
  }
  for (int i = 0; i < 3; ++i) {
    double d = a.iso.normal[i] - b.iso.normal[i];
    if (std::abs(d) > 1e-9) return d < 0;
  }
  return a.perm < b.perm;
}

inline std::vector<double> azimuth_spacings(const std::vector<Shell>& shells,
                                            const Eigen::Vector3d& u, double tol) {
  Eigen::Vector3d e1 = u.unitOrthogonal();
  Eigen::Vector3d e2 = u.cross(e1);
  std::set<long long> seen;
  std::vector<double> angles;
  auto push = [&](double theta) {
    theta = angle_mod_2pi(theta);
    if (theta <= 1e-9 || theta >= 2 * pi - 1e-9) return;
    long long key = llround(theta * 1e8);
    if (seen.insert(key).second) angles.push_back(theta);
  };
  push(pi);
  for (auto& shell : shells) {
    std::vector<double> phis;
    for (int idx = 0; idx < shell.sub.size(); ++idx) {
      Eigen::Vector3d p = shell.sub.points.col(idx);
      double px = p.dot(e1), py = p.dot(e2);
      if (std::hypot(px, py) > std::max(10.0 * tol, 1e-9)) phis.push_back(std::atan2(py, px));
    }
    for (double a : phis)
      for (double b : phis) push(b - a);
  }
  return angles;
}

}  // namespace detail

/// All isometries fixing the centroid of X that map X to itself, with a
/// deterministic element order: identity, proper rotations by ascending
/// angle, reflections, improper rotations, each tier ordered by descriptor.
/// Elements are found by verifying a geometric candidate set drawn from the
/// radial shells, then completed under composition.  For configurations that
/// do not affinely span their space the stabilizer is infinite; only the
/// finitely many candidates generated from the shell structure are returned.
inline SymmetryGroup compute_sym_group(const Configuration& x) {
  const int k = x.dim();
  if (k != 2 && k != 3)
    throw std::invalid_argument("compute_sym_group: only 2D and 3D configurations");
  const int n = x.size();
  const Eigen::VectorXd c = centroid(x);
  Configuration xc = centered(x);
  std::vector<Shell> shells = radial_shells(xc);

  std::vector<Eigen::MatrixXd> candidates;
  std::set<std::vector<long long>> candidate_keys;
  auto push_candidate = [&](const Eigen::MatrixXd& q) {
    if (candidate_keys.insert(detail::quantized_matrix(q)).second) candidates.push_back(q);
  };
  push_candidate(Eigen::MatrixXd::Identity(k, k));

  if (k == 2) {
    const Shell* source = nullptr;
    for (auto& s : shells) {
      if (s.indices.size() < 2) continue;
      if (!source || s.indices.size() < source->indices.size() ||
          (s.indices.size() == source->indices.size() && s.radius < source->radius))
        source = &s;
    }
    std::vector<double> point_angles;
    if (source) {
      for (int i = 0; i < source->sub.size(); ++i) {
        Eigen::Vector2d p = source->sub.points.col(i);
        point_angles.push_back(std::atan2(p.y(), p.x()));
      }
    } else {
      for (int i = 0; i < n; ++i) {
        Eigen::Vector2d p = xc.points.col(i);
        if (p.norm() > std::max(10.0 * x.tol, 1e-12)) point_angles.push_back(std::atan2(p.y(), p.x()));
      }
    }
    for (double a : point_angles) {
      push_candidate(reflection_matrix_2d(angle_mod_pi(a)));
      for (double b : point_angles) {
        if (source) push_candidate(rotation_matrix_2d(angle_mod_2pi(b - a)));
        push_candidate(reflection_matrix_2d(angle_mod_pi((a + b) / 2)));
      }
    }
  } else {
    std::vector<Eigen::Vector3d> directions;
    std::set<std::vector<long long>> dir_keys;
    auto push_direction = [&](Eigen::Vector3d v) {
      double norm = v.norm();
      if (norm < std::max(10.0 * x.tol, 1e-9)) return;
      v = canonical_direction(v / norm);
      std::vector<long long> key = {llround(v.x() * 1e7), llround(v.y() * 1e7),
                                    llround(v.z() * 1e7)};
      if (dir_keys.insert(key).second) directions.push_back(v);
    };
    for (int i = 0; i < n; ++i) push_direction(xc.points.col(i));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        push_direction(0.5 * (xc.points.col(i) + xc.points.col(j)));
        push_direction(xc.points.col(i) - xc.points.col(j));
      }
    for (auto& shell : shells) {
      const auto& idx = shell.indices;
      if (idx.size() > 16) continue;
      for (size_t a = 0; a < idx.size(); ++a)
        for (size_t b = a + 1; b < idx.size(); ++b)
          for (size_t cidx = b + 1; cidx < idx.size(); ++cidx) {
            Eigen::Vector3d pa = xc.points.col(idx[a]);
            Eigen::Vector3d pb = xc.points.col(idx[b]);
            Eigen::Vector3d pc = xc.points.col(idx[cidx]);
            push_direction((pb - pa).cross(pc - pa));
          }
    }
    for (const Eigen::Vector3d& u : directions) {
      Eigen::Matrix3d mirror = Eigen::Matrix3d::Identity() - 2.0 * u * u.transpose();
      push_candidate(mirror);
      for (double theta : detail::azimuth_spacings(shells, u, x.tol)) {
        Eigen::Matrix3d rot = Eigen::AngleAxisd(theta, u).toRotationMatrix();
        push_candidate(rot);
        push_candidate(rot * mirror);
      }
    }
  }

  // Elements are deduplicated by their permutation; distinct isometries
  // inducing the same permutation (possible only for non-spanning
  // configurations) are kept apart by a tolerance comparison of matrices.
  std::map<std::vector<int>, std::vector<SymmetryElement>> found;
  auto known = [&](const std::vector<int>& p, const Eigen::MatrixXd& q) {
    auto it = found.find(p);
    if (it == found.end()) return false;
    for (auto& e : it->second)
      if ((e.iso.linear - q).cwiseAbs().maxCoeff() < 1e-6) return true;
    return false;
  };
  auto verify = [&](const Eigen::MatrixXd& q) {
    Isometry iso = make_isometry(q, c - q * c);
    auto perm = match_within(apply(iso, x), x, x.tol);
    if (!perm || known(*perm, q)) return false;
    found[*perm].push_back(SymmetryElement{std::move(iso), std::move(*perm)});
    return true;
  };
  for (auto& q : candidates) verify(q);

  // Complete under composition; products of verified symmetries are
  // symmetries, so this only fills gaps the candidate scan may have missed.
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::pair<Eigen::MatrixXd, std::vector<int>>> current;
    for (auto& [p, bucket] : found)
      for (auto& e : bucket) current.emplace_back(e.iso.linear, e.perm);
    for (auto& [qg, pg] : current)
      for (auto& [qh, ph] : current) {
        Eigen::MatrixXd q = qg * qh;
        std::vector<int> p = compose_perm(pg, ph);
        if (known(p, q)) continue;
        if (verify(q)) grew = true;
      }
  }

  SymmetryGroup group;
  group.base = x;
  for (auto& [p, bucket] : found)
    for (auto& e : bucket) group.elements.push_back(e);
  std::sort(group.elements.begin(), group.elements.end(), detail::element_less);
  return group;
}

inline void check_index_bijection(const std::vector<int>& f, int n, const char* who) {
  if (static_cast<int>(f.size()) != n || !is_permutation_vector(f))
    throw std::invalid_argument(std::string(who) + ": map must be a bijection on indices");
}

/// Push-forward permutation of sigma along f: the permutation f o p o f^-1
/// acting on the codomain configuration.
inline std::vector<int> push_forward_perm(const std::vector<int>& f, const std::vector<int>& p) {
  return compose_perm(f, compose_perm(p, invert_perm(f)));
}

/// The subgroup Sym_f(X) of Sym(X): elements whose push-forward permutation
/// preserves all pairwise distances of Y (and is therefore realized by an
/// isometry of Y).
inline SymmetryGroup restricted_sym_group(const Configuration& x, const std::vector<int>& f,
                                          const Configuration& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("restricted_sym_group: configurations must have equal size");
  check_index_bijection(f, x.size(), "restricted_sym_group");
  SymmetryGroup full = compute_sym_group(x);
  SymmetryGroup restricted;
  restricted.base = x;
  for (auto& e : full.elements) {
    std::vector<int> q = push_forward_perm(f, e.perm);
    if (detail::perm_preserves_distances(q, y, y.tol)) restricted.elements.push_back(e);
  }
  return restricted;
}

/// Realize f o sigma o f^-1 as a symmetry of Y.  The isometry is recovered by
/// orthogonal Procrustes on the matched centered point pairs and accepted
/// only if the alignment residual is at most n * tol^2.
inline SymmetryElement push_forward(const std::vector<int>& f, const SymmetryElement& sigma,
                                    const Configuration& y) {
  check_index_bijection(f, y.size(), "push_forward");
  std::vector<int> q = push_forward_perm(f, sigma.perm);
  if (!detail::perm_preserves_distances(q, y, y.tol))
    throw std::invalid_argument("push_forward: element does not belong to Sym_f");
  const Eigen::VectorXd c = centroid(y);
  Eigen::MatrixXd source = y.points.colwise() - c;
  Eigen::MatrixXd target(y.dim(), y.size());
  for (int i = 0; i < y.size(); ++i) target.col(i) = y.points.col(q[i]) - c;
  Eigen::MatrixXd rot = orthogonal_procrustes(source, target);
  double residual = (target - rot * source).squaredNorm();
  double allowed = y.size() * y.tol * y.tol;
  if (residual > std::max(allowed, 1e-18))
    throw numeric_error("push_forward: alignment residual exceeds tolerance");
  SymmetryElement element;
  element.iso = make_isometry(rot, c - rot * c);
  element.perm = std::move(q);
  return element;
}

// ---------------------------------------------------------------------------
// 2D classification
// ---------------------------------------------------------------------------

struct SymmetryType2D {
  bool dihedral = false;
  int m = 1;                          // rotation order, identity included
  std::vector<double> axis_angles;    // degrees in [0, 180), sorted
};

inline bool operator==(const SymmetryType2D& a, const SymmetryType2D& b) {
  return a.dihedral == b.dihedral && a.m == b.m;
}

inline SymmetryType2D classify_2d(const SymmetryGroup& g) {
  if (g.base.dim() != 2) throw std::invalid_argument("classify_2d: base must be 2D");
  SymmetryType2D type;
  type.m = 0;
  for (auto& e : g.elements) {
    if (e.iso.kind == isometry_kind::rotation) {
      ++type.m;
    } else {
      type.dihedral = true;
      type.axis_angles.push_back(e.iso.angle * 180.0 / pi);
    }
  }
  std::sort(type.axis_angles.begin(), type.axis_angles.end());
  if (type.dihedral && static_cast<int>(type.axis_angles.size()) != type.m)
    throw numeric_error("classify_2d: reflection count does not match rotation order");
  if (g.order() != (type.dihedral ? 2 * type.m : type.m))
    throw numeric_error("classify_2d: group order inconsistent with classification");
  return type;
}

/// Finite subgroups of O(2) of equal kind and order are conjugate, so 2D
/// symmetry types compare by classification alone.  3D comparison is not
/// supported.
inline bool same_symmetry_type(const SymmetryGroup& g, const SymmetryGroup& h) {
  if (g.base.dim() != 2 || h.base.dim() != 2)
    throw std::invalid_argument("same_symmetry_type: only 2D groups are comparable");
  return classify_2d(g) == classify_2d(h);
}

}  // namespace persym
