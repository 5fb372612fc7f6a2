#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "persym/core.hpp"
#include "persym/persistence.hpp"

namespace persym {

/// Finite union of sorted disjoint closed intervals. The first left endpoint
/// may be -infinity and the last right endpoint +infinity. All metrics below
/// use one set of conventions for the extended reals: x + inf = inf,
/// max(x, inf) = inf, and the gap between two equal-signed infinities is 0
/// while any other infinite/finite mix is infinitely far apart.
struct IntervalSet {
  std::vector<std::pair<double, double>> components;

  bool empty() const { return components.empty(); }
  int size() const { return static_cast<int>(components.size()); }
};

inline IntervalSet make_interval_set(std::vector<std::pair<double, double>> components) {
  for (const auto& c : components) {
    if (std::isnan(c.first) || std::isnan(c.second))
      throw std::invalid_argument("interval set: endpoints must not be NaN");
    if (!(c.first <= c.second))
      throw std::invalid_argument("interval set: need a <= b in every component");
    if (c.first == std::numeric_limits<double>::infinity() ||
        c.second == -std::numeric_limits<double>::infinity())
      throw std::invalid_argument("interval set: component is empty at infinity");
  }
  for (std::size_t i = 1; i < components.size(); ++i)
    if (!(components[i - 1].second < components[i].first))
      throw std::invalid_argument("interval set: components must be sorted and disjoint");
  return IntervalSet{std::move(components)};
}

inline IntervalSet interval_set_from_polybar(const PersistenceConfiguration& pc,
                                             const Polybar& pb,
                                             bool extend_to_inf = false) {
  return make_interval_set(polybar_values(pc, pb, extend_to_inf));
}

inline bool interval_set_contains(const IntervalSet& s, double x) {
  for (const auto& c : s.components)
    if (c.first <= x && x <= c.second) return true;
  return false;
}

namespace detail {

inline double endpoint_gap(double x, double y) {
  if (std::isinf(x) || std::isinf(y))
    return x == y ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(x - y);
}

inline bool left_unbounded(const IntervalSet& s) {
  return !s.components.empty() && std::isinf(s.components.front().first);
}

inline bool right_unbounded(const IntervalSet& s) {
  return !s.components.empty() && std::isinf(s.components.back().second);
}

}  // namespace detail

/// Lebesgue measure of the symmetric difference.
inline double d_sym_diff(const IntervalSet& a, const IntervalSet& b) {
  const double inf = std::numeric_limits<double>::infinity();
  if (detail::left_unbounded(a) != detail::left_unbounded(b)) return inf;
  if (detail::right_unbounded(a) != detail::right_unbounded(b)) return inf;

  std::vector<double> cuts;
  for (const IntervalSet* s : {&a, &b})
    for (const auto& c : s->components) {
      if (std::isfinite(c.first)) cuts.push_back(c.first);
      if (std::isfinite(c.second)) cuts.push_back(c.second);
    }
  if (cuts.empty()) return 0.0;  // both empty, or both the whole line

  const auto [lo_it, hi_it] = std::minmax_element(cuts.begin(), cuts.end());
  cuts.push_back(*lo_it - 1);
  cuts.push_back(*hi_it + 1);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i - 1] + cuts[i]);
    if (interval_set_contains(a, mid) != interval_set_contains(b, mid))
      total += cuts[i] - cuts[i - 1];
  }
  return total;
}

/// Componentwise expansion distance; infinite when component counts differ.
inline double d_expansion(const IntervalSet& a, const IntervalSet& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (int i = 0; i < a.size(); ++i) {
    worst = std::max(worst, detail::endpoint_gap(a.components[i].first, b.components[i].first));
    worst = std::max(worst, detail::endpoint_gap(a.components[i].second, b.components[i].second));
  }
  return worst;
}

/// Largest gap between matched left endpoints.
inline double d_left(const IntervalSet& a, const IntervalSet& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (int i = 0; i < a.size(); ++i)
    worst = std::max(worst, detail::endpoint_gap(a.components[i].first, b.components[i].first));
  return worst;
}

/// Mean of the per-component symmetric difference measures.
inline double d_match_sym(const IntervalSet& a, const IntervalSet& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  if (a.empty()) return 0.0;
  double total = 0;
  for (int i = 0; i < a.size(); ++i)
    total += d_sym_diff(IntervalSet{{a.components[i]}}, IntervalSet{{b.components[i]}});
  return total / a.size();
}

enum class polybar_metric { sym_diff, expansion, left, interleaving };

struct KeyedIntervalSet {
  Isometry key;
  IntervalSet intervals;
};

/// Distance between canonically keyed families of interval sets. Keys match
/// when their orthogonal parts agree within key_tol (and their translations
/// too unless translation_equiv); a key present on one side only is compared
/// against the empty set. The interleaving metric is evaluated as the left
/// expansion distance, which it equals on finite-type polybarcodes.
inline double polybarcode_distance(const std::vector<KeyedIntervalSet>& a,
                                   const std::vector<KeyedIntervalSet>& b,
                                   polybar_metric metric, bool translation_equiv = true,
                                   double key_tol = 1e-9) {
  auto same_key = [&](const Isometry& x, const Isometry& y) {
    if ((x.linear - y.linear).cwiseAbs().maxCoeff() > key_tol) return false;
    if (!translation_equiv && (x.translation - y.translation).cwiseAbs().maxCoeff() > key_tol)
      return false;
    return true;
  };

  std::vector<std::pair<const IntervalSet*, const IntervalSet*>> pairs;
  std::vector<char> used_b(b.size(), 0);
  const IntervalSet empty;
  for (const auto& ea : a) {
    const IntervalSet* mate = &empty;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!used_b[j] && same_key(ea.key, b[j].key)) {
        mate = &b[j].intervals;
        used_b[j] = 1;
        break;
      }
    pairs.emplace_back(&ea.intervals, mate);
  }
  for (std::size_t j = 0; j < b.size(); ++j)
    if (!used_b[j]) pairs.emplace_back(&empty, &b[j].intervals);

  double result = 0;
  for (const auto& [ia, ib] : pairs) {
    double d = 0;
    switch (metric) {
      case polybar_metric::sym_diff:
        d = d_sym_diff(*ia, *ib);
        result += d;
        break;
      case polybar_metric::expansion:
        d = d_expansion(*ia, *ib);
        result = std::max(result, d);
        break;
      case polybar_metric::left:
      case polybar_metric::interleaving:
        d = d_left(*ia, *ib);
        result = std::max(result, d);
        break;
    }
  }
  return result;
}

inline std::vector<KeyedIntervalSet> keyed_interval_sets(const PersistenceConfiguration& pc,
                                                         const Polybarcode& bc,
                                                         bool extend_to_inf = false) {
  std::vector<KeyedIntervalSet> out;
  out.reserve(bc.entries.size());
  for (const auto& e : bc.entries)
    out.push_back(KeyedIntervalSet{e.representative,
                                   interval_set_from_polybar(pc, e.bar, extend_to_inf)});
  return out;
}

inline double polybarcode_distance(const Polybarcode& a, const PersistenceConfiguration& pca,
                                   const Polybarcode& b, const PersistenceConfiguration& pcb,
                                   polybar_metric metric, bool extend_to_inf = false) {
  if (a.translation_equiv != b.translation_equiv)
    throw std::invalid_argument("polybarcode_distance: keying conventions differ");
  double key_tol = 1e-9;
  for (const auto& f : pca.frames) key_tol = std::max(key_tol, f.tol);
  for (const auto& f : pcb.frames) key_tol = std::max(key_tol, f.tol);
  return polybarcode_distance(keyed_interval_sets(pca, a, extend_to_inf),
                              keyed_interval_sets(pcb, b, extend_to_inf), metric,
                              a.translation_equiv, key_tol);
}

/// Bottleneck distance between multisets of birth-death pairs. Bars with
/// infinite death match only among themselves (the diagonal is infinitely far
/// from them); finite bars may be matched to the diagonal at half persistence.
inline double bottleneck(const std::vector<std::pair<double, double>>& a,
                         const std::vector<std::pair<double, double>>& b) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> inf_a, inf_b;
  std::vector<std::pair<double, double>> fin_a, fin_b;
  for (const auto& p : a) {
    if (!(p.first <= p.second)) throw std::invalid_argument("bottleneck: need birth <= death");
    if (std::isinf(p.second)) inf_a.push_back(p.first);
    else fin_a.push_back(p);
  }
  for (const auto& p : b) {
    if (!(p.first <= p.second)) throw std::invalid_argument("bottleneck: need birth <= death");
    if (std::isinf(p.second)) inf_b.push_back(p.first);
    else fin_b.push_back(p);
  }
  if (inf_a.size() != inf_b.size()) return inf;
  std::sort(inf_a.begin(), inf_a.end());
  std::sort(inf_b.begin(), inf_b.end());
  double base = 0;
  for (std::size_t i = 0; i < inf_a.size(); ++i)
    base = std::max(base, std::abs(inf_a[i] - inf_b[i]));

  const std::size_t na = fin_a.size(), nb = fin_b.size();
  if (na + nb == 0) return base;

  auto linf = [](const std::pair<double, double>& p, const std::pair<double, double>& q) {
    return std::max(std::abs(p.first - q.first), std::abs(p.second - q.second));
  };
  auto half = [](const std::pair<double, double>& p) { return 0.5 * (p.second - p.first); };

  std::vector<double> cand = {0};
  for (const auto& p : fin_a) cand.push_back(half(p));
  for (const auto& q : fin_b) cand.push_back(half(q));
  for (const auto& p : fin_a)
    for (const auto& q : fin_b) cand.push_back(linf(p, q));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  // rows: bars of A then diagonal slots for B; cols: bars of B then diagonal
  // slots for A; a perfect matching realizes a partial matching of radius r.
  auto feasible = [&](double r) {
    const int n = static_cast<int>(na + nb);
    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j)
        if (linf(fin_a[i], fin_b[j]) <= r) adj[i].push_back(static_cast<int>(j));
      if (half(fin_a[i]) <= r) adj[i].push_back(static_cast<int>(nb + i));
    }
    for (std::size_t j = 0; j < nb; ++j) {
      auto& row = adj[na + j];
      if (half(fin_b[j]) <= r) row.push_back(static_cast<int>(j));
      for (std::size_t i = 0; i < na; ++i) row.push_back(static_cast<int>(nb + i));
    }
    return detail::kuhn_matching(adj, n).has_value();
  };

  std::size_t lo = 0, hi = cand.size() - 1;
  if (!feasible(cand[hi])) return inf;  // unreachable: full radius always works
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (feasible(cand[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return std::max(base, cand[lo]);
}

inline double bottleneck(const PersistenceConfiguration& pca, const SymmetryBarcode& a,
                         const PersistenceConfiguration& pcb, const SymmetryBarcode& b) {
  std::vector<std::pair<double, double>> pa, pb;
  for (const auto& bar : a.bars) pa.push_back(bar_interval(pca, bar));
  for (const auto& bar : b.bars) pb.push_back(bar_interval(pcb, bar));
  return bottleneck(pa, pb);
}

}  // namespace persym
