#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "persym/groups.hpp"
#include "persym/persistence.hpp"

namespace persym {

/// Order statistics of a symmetry group: the total degree, the histogram of
/// element orders, its Shannon entropy (natural log), and the coefficients
/// a_k of the degree polynomial sum_k a_k t^k where a_k counts elements of
/// order k.
struct DegreeProfile {
  int degree = 0;
  std::map<int, int> order_histogram;
  double entropy = 0.0;
  std::map<int, int> polynomial;
};

/// Degree weights along a persistence configuration: one vertex weight per
/// frame and one edge weight per consecutive pair.
struct WeightedPath {
  std::vector<int> vertex_weights;
  std::vector<int> edge_weights;
};

/// Cayley graph of a symmetry group with respect to an inverse-closed,
/// identity-free generator set.  Vertices are keyed by their permutations in
/// group element order; adjacency(a, b) = 1 iff g_a^-1 g_b is a generator.
struct CayleyGraph {
  std::vector<std::vector<int>> vertices;
  std::vector<std::vector<int>> generators;
  Eigen::MatrixXi adjacency;
};

inline int element_order(const SymmetryElement& sigma) {
  const int n = static_cast<int>(sigma.perm.size());
  std::vector<char> seen(n, 0);
  long long order = 1;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    long long length = 0;
    for (int j = i; !seen[j]; j = sigma.perm[j]) {
      seen[j] = 1;
      ++length;
    }
    order = std::lcm(order, length);
  }
  return static_cast<int>(order);
}

inline DegreeProfile degree_profile(const SymmetryGroup& g) {
  if (g.elements.empty()) throw std::invalid_argument("degree_profile: empty group");
  DegreeProfile out;
  for (const SymmetryElement& e : g.elements) {
    const int k = element_order(e);
    out.degree += k;
    out.order_histogram[k] += 1;
  }
  const double total = static_cast<double>(g.order());
  for (const auto& [k, count] : out.order_histogram) {
    const double p = count / total;
    out.entropy -= p * std::log(p);
  }
  out.polynomial = out.order_histogram;
  return out;
}

/// Sum of element orders over the subgroup of Sym(frames[i]) surviving the
/// composite step into frame j.
inline int persistent_degree(const PersistenceConfiguration& pc, int i, int j) {
  if (i < 0 || j < 0 || i >= pc.frame_count() || j >= pc.frame_count())
    throw std::out_of_range("persistent_degree: frame index out of range");
  if (i > j) throw std::invalid_argument("persistent_degree: need i <= j");
  const SymmetryGroup g =
      i == j ? compute_sym_group(pc.frames[i])
             : restricted_sym_group(pc.frames[i], composite_step(pc, i, j), pc.frames[j]);
  int degree = 0;
  for (const SymmetryElement& e : g.elements) degree += element_order(e);
  return degree;
}

inline WeightedPath weighted_path(const PersistenceConfiguration& pc) {
  WeightedPath out;
  for (int k = 0; k < pc.frame_count(); ++k)
    out.vertex_weights.push_back(persistent_degree(pc, k, k));
  for (int k = 0; k + 1 < pc.frame_count(); ++k)
    out.edge_weights.push_back(persistent_degree(pc, k, k + 1));
  return out;
}

inline CayleyGraph cayley(const SymmetryGroup& g, const std::vector<SymmetryElement>& s) {
  CayleyGraph out;
  for (const SymmetryElement& e : g.elements) out.vertices.push_back(e.perm);
  const int n = g.order();

  for (const SymmetryElement& e : s) {
    if (!g.contains_perm(e.perm))
      throw std::invalid_argument("cayley: generator outside the group");
    if (e.perm == identity_perm(static_cast<int>(e.perm.size())))
      throw std::invalid_argument("cayley: generators must exclude the identity");
    if (std::find(out.generators.begin(), out.generators.end(), e.perm) !=
        out.generators.end())
      throw std::invalid_argument("cayley: duplicate generator");
    out.generators.push_back(e.perm);
  }
  for (const std::vector<int>& k : out.generators)
    if (std::find(out.generators.begin(), out.generators.end(), invert_perm(k)) ==
        out.generators.end())
      throw std::invalid_argument("cayley: generator set must be inverse closed");

  out.adjacency = Eigen::MatrixXi::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const std::vector<int> inv = invert_perm(out.vertices[a]);
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const std::vector<int> word = compose_perm(inv, out.vertices[b]);
      if (std::find(out.generators.begin(), out.generators.end(), word) !=
          out.generators.end())
        out.adjacency(a, b) = 1;
    }
  }
  return out;
}

inline std::vector<int> connected_components(const CayleyGraph& g) {
  const int n = static_cast<int>(g.vertices.size());
  std::vector<int> label(n, -1);
  int next = 0;
  for (int start = 0; start < n; ++start) {
    if (label[start] >= 0) continue;
    std::vector<int> stack = {start};
    label[start] = next;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w)
        if (g.adjacency(v, w) && label[w] < 0) {
          label[w] = next;
          stack.push_back(w);
        }
    }
    ++next;
  }
  return label;
}

namespace detail {

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.
inline std::vector<double> symmetric_spectrum(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return {};
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-13 * scale) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        const double apq = a(p, q);
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = c * arp - sn * arq;
          a(r, q) = a(q, r) = sn * arp + c * arq;
        }
      }
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a(i, i);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Ascending eigenvalues of the graph Laplacian L = D - A.
inline std::vector<double> laplacian_spectrum(const CayleyGraph& g) {
  const int n = static_cast<int>(g.vertices.size());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (g.adjacency(i, j)) {
        l(i, i) += 1.0;
        l(i, j) -= 1.0;
      }
  return detail::symmetric_spectrum(std::move(l));
}

/// Cayley graph of the full group of frame i generated by the non-identity
/// symmetries surviving into frame j, optionally keeping only generators of
/// order at most order_bound (0 leaves the set unfiltered).
inline CayleyGraph persistence_cayley(const PersistenceConfiguration& pc, int i, int j,
                                      int order_bound = 0) {
  if (i < 0 || j < 0 || i >= pc.frame_count() || j >= pc.frame_count())
    throw std::out_of_range("persistence_cayley: frame index out of range");
  if (i > j) throw std::invalid_argument("persistence_cayley: need i <= j");
  const SymmetryGroup full = compute_sym_group(pc.frames[i]);
  const SymmetryGroup survivors =
      i == j ? full
             : restricted_sym_group(pc.frames[i], composite_step(pc, i, j), pc.frames[j]);
  std::vector<SymmetryElement> s;
  const std::vector<int> id = identity_perm(pc.frames[i].size());
  for (const SymmetryElement& e : survivors.elements) {
    if (e.perm == id) continue;
    if (order_bound > 0 && element_order(e) > order_bound) continue;
    s.push_back(e);
  }
  return cayley(full, s);
}

}  // namespace persym
