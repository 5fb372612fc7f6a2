#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "persym/core.hpp"

namespace persym {

/// A finite sequence of vector spaces and linear maps V_0 -> V_1 -> ... with
/// maps[i] of shape dims[i+1] x dims[i].
struct PersistenceModuleSeq {
  std::vector<int> dims;
  std::vector<Eigen::MatrixXcd> maps;

  int length() const { return static_cast<int>(dims.size()); }
};

inline PersistenceModuleSeq make_persistence_module_seq(std::vector<int> dims,
                                                        std::vector<Eigen::MatrixXcd> maps) {
  if (dims.empty()) throw std::invalid_argument("module sequence: need at least one frame");
  for (int d : dims)
    if (d < 0) throw std::invalid_argument("module sequence: dimensions must be nonnegative");
  if (maps.size() + 1 != dims.size())
    throw std::invalid_argument("module sequence: expected one map per frame pair");
  for (std::size_t i = 0; i < maps.size(); ++i)
    if (maps[i].rows() != dims[i + 1] || maps[i].cols() != dims[i])
      throw std::invalid_argument("module sequence: map shape does not match the dimensions");
  return PersistenceModuleSeq{std::move(dims), std::move(maps)};
}

inline PersistenceModuleSeq make_persistence_module_seq(std::vector<int> dims,
                                                        const std::vector<Eigen::MatrixXd>& maps) {
  std::vector<Eigen::MatrixXcd> lifted;
  lifted.reserve(maps.size());
  for (const Eigen::MatrixXd& m : maps) lifted.push_back(m.cast<std::complex<double>>());
  return make_persistence_module_seq(std::move(dims), std::move(lifted));
}

/// Composite f_{s,t} = maps[t-1] . ... . maps[s]; the identity when s = t.
inline Eigen::MatrixXcd composite_map(const PersistenceModuleSeq& seq, int s, int t) {
  if (s < 0 || t >= seq.length() || s > t)
    throw std::out_of_range("composite_map: invalid frame index pair");
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Identity(seq.dims[s], seq.dims[s]);
  for (int i = s; i < t; ++i) f = seq.maps[i] * f;
  return f;
}

namespace detail {

inline double max_abs(const Eigen::MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline int numeric_rank(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  // A matrix whose largest singular value sits at roundoff scale is zero;
  // the relative cutoff alone would promote noise to rank.
  if (sv(0) <= 1e-10) return 0;
  const double cutoff = 1e-8 * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

/// Orthonormal basis of the column space, one column per rank.
inline Eigen::MatrixXcd column_space_basis(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0 || m.cols() == 0) return Eigen::MatrixXcd::Zero(m.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 1e-10) return Eigen::MatrixXcd::Zero(m.rows(), 0);
  const double cutoff = 1e-8 * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace detail

/// Multiset of closed index intervals [b, d] with the multiplicity
/// m(b, d) = r(b, d) - r(b-1, d) - r(b, d+1) + r(b-1, d+1), where r(s, t) is
/// the rank of the composite map from frame s to frame t and out-of-range
/// ranks are zero.
inline std::vector<std::pair<int, int>> interval_decomposition(const PersistenceModuleSeq& seq) {
  const int m = seq.length() - 1;
  std::vector<std::vector<int>> r(m + 1, std::vector<int>(m + 1, 0));
  for (int s = 0; s <= m; ++s) {
    r[s][s] = seq.dims[s];
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Identity(seq.dims[s], seq.dims[s]);
    for (int t = s + 1; t <= m; ++t) {
      f = seq.maps[t - 1] * f;
      r[s][t] = detail::numeric_rank(f);
    }
  }
  auto rank_at = [&](int s, int t) { return (s < 0 || t > m) ? 0 : r[s][t]; };

  std::vector<std::pair<int, int>> bars;
  for (int b = 0; b <= m; ++b)
    for (int d = b; d <= m; ++d) {
      const int mult =
          rank_at(b, d) - rank_at(b - 1, d) - rank_at(b, d + 1) + rank_at(b - 1, d + 1);
      if (mult < 0)
        throw numeric_error("interval decomposition: inconsistent ranks across the sequence");
      bars.insert(bars.end(), mult, {b, d});
    }
  std::sort(bars.begin(), bars.end());
  return bars;
}

/// A finite abelian group presented as a product of cyclic factors Z/n_j.
/// The empty factor list is the trivial group.  Characters are indexed by the
/// same product: chi_a(x) = exp(2 pi i sum_j a_j x_j / n_j).
struct AbelianGroupSpec {
  std::vector<int> factors;

  int rank() const { return static_cast<int>(factors.size()); }
  int order() const {
    int n = 1;
    for (int f : factors) n *= f;
    return n;
  }
};

inline AbelianGroupSpec make_abelian_group(std::vector<int> factors) {
  for (int f : factors)
    if (f < 1) throw std::invalid_argument("abelian group: factors must be positive");
  return AbelianGroupSpec{std::move(factors)};
}

/// All element tuples in odometer order, the identity first.
inline std::vector<std::vector<int>> group_elements(const AbelianGroupSpec& g) {
  std::vector<std::vector<int>> out;
  std::vector<int> x(g.factors.size(), 0);
  for (;;) {
    out.push_back(x);
    int j = static_cast<int>(x.size()) - 1;
    while (j >= 0 && ++x[j] == g.factors[j]) x[j--] = 0;
    if (j < 0) break;
  }
  return out;
}

inline std::complex<double> character_value(const AbelianGroupSpec& g,
                                            const std::vector<int>& chi,
                                            const std::vector<int>& x) {
  if (chi.size() != g.factors.size() || x.size() != g.factors.size())
    throw std::invalid_argument("character: index length must match the factor list");
  double phase = 0.0;
  for (std::size_t j = 0; j < g.factors.size(); ++j)
    phase += 2.0 * pi * (static_cast<double>(chi[j]) * static_cast<double>(x[j])) /
             static_cast<double>(g.factors[j]);
  return {std::cos(phase), std::sin(phase)};
}

/// A sequence of representations of one fixed abelian group: the underlying
/// module sequence plus, per frame, one matrix per cyclic generator.
struct PersistenceRepresentation {
  AbelianGroupSpec group;
  PersistenceModuleSeq seq;
  std::vector<std::vector<Eigen::MatrixXcd>> actions;

  int frame_count() const { return seq.length(); }
};

inline PersistenceRepresentation make_persistence_representation(
    AbelianGroupSpec group, PersistenceModuleSeq seq,
    std::vector<std::vector<Eigen::MatrixXcd>> actions) {
  if (static_cast<int>(actions.size()) != seq.length())
    throw std::invalid_argument("persistence representation: one action list per frame");
  for (int t = 0; t < seq.length(); ++t) {
    if (static_cast<int>(actions[t].size()) != group.rank())
      throw std::invalid_argument(
          "persistence representation: one action matrix per cyclic generator");
    const int d = seq.dims[t];
    for (int j = 0; j < group.rank(); ++j) {
      const Eigen::MatrixXcd& a = actions[t][j];
      if (a.rows() != d || a.cols() != d)
        throw std::invalid_argument("persistence representation: action shape mismatch");
      Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(d, d);
      for (int c = 0; c < group.factors[j]; ++c) power = a * power;
      if (detail::max_abs(power - Eigen::MatrixXcd::Identity(d, d)) > 1e-8)
        throw std::invalid_argument(
            "persistence representation: generator order is not respected");
      for (int k = 0; k < j; ++k)
        if (detail::max_abs(a * actions[t][k] - actions[t][k] * a) > 1e-8)
          throw std::invalid_argument("persistence representation: generators must commute");
    }
  }
  for (int t = 0; t + 1 < seq.length(); ++t)
    for (int j = 0; j < group.rank(); ++j)
      if (detail::max_abs(seq.maps[t] * actions[t][j] - actions[t + 1][j] * seq.maps[t]) > 1e-8)
        throw std::invalid_argument(
            "persistence representation: structure maps must be equivariant");
  return PersistenceRepresentation{std::move(group), std::move(seq), std::move(actions)};
}

/// The matrix of rho_t at an arbitrary element tuple.
inline Eigen::MatrixXcd representation_matrix(const PersistenceRepresentation& rep, int t,
                                              const std::vector<int>& x) {
  if (t < 0 || t >= rep.frame_count())
    throw std::out_of_range("representation_matrix: frame index out of range");
  if (x.size() != rep.group.factors.size())
    throw std::invalid_argument("representation_matrix: element length mismatch");
  const int d = rep.seq.dims[t];
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(d, d);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const int n = rep.group.factors[j];
    const int e = ((x[j] % n) + n) % n;
    for (int c = 0; c < e; ++c) out = rep.actions[t][j] * out;
  }
  return out;
}

/// Character projection P_chi = (1/|G|) sum_g conj(chi(g)) rho_t(g).
inline Eigen::MatrixXcd isotypic_projector(const PersistenceRepresentation& rep, int t,
                                           const std::vector<int>& chi) {
  if (t < 0 || t >= rep.frame_count())
    throw std::out_of_range("isotypic_projector: frame index out of range");
  const int d = rep.seq.dims[t];
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
  for (const std::vector<int>& x : group_elements(rep.group))
    p += std::conj(character_value(rep.group, chi, x)) * representation_matrix(rep, t, x);
  return p / static_cast<double>(rep.group.order());
}

/// Bars per character index; characters whose isotypic part is empty
/// everywhere are omitted.
struct IrreducibleBarcode {
  std::map<std::vector<int>, std::vector<std::pair<int, int>>> bars;
};

inline IrreducibleBarcode irreducible_barcode(const PersistenceRepresentation& rep) {
  IrreducibleBarcode out;
  for (const std::vector<int>& chi : group_elements(rep.group)) {
    std::vector<Eigen::MatrixXcd> projectors;
    for (int t = 0; t < rep.frame_count(); ++t)
      projectors.push_back(isotypic_projector(rep, t, chi));
    for (int t = 0; t + 1 < rep.frame_count(); ++t) {
      const Eigen::MatrixXcd& f = rep.seq.maps[t];
      if (detail::max_abs(f * projectors[t] - projectors[t + 1] * f) >
          1e-8 * std::max(1.0, detail::max_abs(f)))
        throw numeric_error("irreducible barcode: restriction is not equivariant");
    }
    std::vector<int> dims;
    std::vector<Eigen::MatrixXcd> bases;
    for (int t = 0; t < rep.frame_count(); ++t) {
      bases.push_back(detail::column_space_basis(projectors[t]));
      dims.push_back(static_cast<int>(bases.back().cols()));
    }
    std::vector<Eigen::MatrixXcd> restricted;
    for (int t = 0; t + 1 < rep.frame_count(); ++t)
      restricted.push_back(bases[t + 1].adjoint() * rep.seq.maps[t] * bases[t]);
    std::vector<std::pair<int, int>> bars =
        interval_decomposition(make_persistence_module_seq(std::move(dims), std::move(restricted)));
    if (!bars.empty()) out.bars[chi] = std::move(bars);
  }
  return out;
}

/// Trace of rho_t(g) restricted to the image of the composite map f_{s,t}.
inline std::complex<double> persistent_character(const PersistenceRepresentation& rep, int s,
                                                 int t, const std::vector<int>& g) {
  if (s < 0 || t >= rep.frame_count() || s > t)
    throw std::out_of_range("persistent_character: invalid frame index pair");
  const Eigen::MatrixXcd image = detail::column_space_basis(composite_map(rep.seq, s, t));
  return (image.adjoint() * representation_matrix(rep, t, g) * image).trace();
}

}  // namespace persym
