#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "persym/core.hpp"
#include "persym/groups.hpp"

namespace persym {

/// A finite filtration sampled on a strictly increasing grid t_0 < ... < t_m.
/// frames[i] is the configuration at t_i and steps[i] the index bijection
/// carrying frame i onto frame i+1, so composites f_{i,j} are well defined.
struct PersistenceConfiguration {
  std::vector<double> grid;
  std::vector<Configuration> frames;
  std::vector<std::vector<int>> steps;

  int frame_count() const { return static_cast<int>(frames.size()); }
};

inline PersistenceConfiguration make_persistence_configuration(
    std::vector<double> grid, std::vector<Configuration> frames,
    std::vector<std::vector<int>> steps = {}) {
  if (frames.empty())
    throw std::invalid_argument("persistence configuration: need at least one frame");
  if (grid.size() != frames.size())
    throw std::invalid_argument("persistence configuration: grid size must match frame count");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i - 1] < grid[i]))
      throw std::invalid_argument("persistence configuration: grid must be strictly increasing");
  const int n = frames.front().size();
  const int k = frames.front().dim();
  for (const auto& f : frames)
    if (f.size() != n || f.dim() != k)
      throw std::invalid_argument("persistence configuration: frames must share size and dimension");
  if (steps.empty() && frames.size() > 1)
    steps.assign(frames.size() - 1, identity_perm(n));
  if (steps.size() + 1 != frames.size())
    throw std::invalid_argument("persistence configuration: expected one step per frame pair");
  for (const auto& s : steps) check_index_bijection(s, n, "persistence configuration");
  return PersistenceConfiguration{std::move(grid), std::move(frames), std::move(steps)};
}

/// Composite bijection f_{i,j} = f_{j-1,j} . ... . f_{i,i+1}; f_{i,i} = id.
inline std::vector<int> composite_step(const PersistenceConfiguration& pc, int i, int j) {
  if (i < 0 || j >= pc.frame_count() || i > j)
    throw std::out_of_range("composite_step: invalid frame index pair");
  std::vector<int> f = identity_perm(pc.frames.front().size());
  for (int s = i; s < j; ++s) f = compose_perm(pc.steps[s], f);
  return f;
}

/// How the right endpoint of a symmetry bar is reported.
/// A tracked symmetry that survives every step up to frame d-1 and fails the
/// step into frame d has been observed alive on [birth, d-1] and dead at d.
/// "maximal" reports d itself (the largest interval consistent with the
/// observations); "confirmed" reports d-1, the last frame where the symmetry
/// was witnessed, clamped so bars keep positive length, and closes bars that
/// survive through the final frame at t_m.
enum class DeathRule { confirmed, maximal };

struct SymmetryBar {
  int birth = 0;
  std::optional<int> death;  // grid index; empty means the bar never dies
  Isometry generator;        // descriptor at the birth frame
  std::vector<int> birth_perm;
};

struct SymmetryBarcode {
  std::vector<SymmetryBar> bars;
};

/// Bar endpoints as grid values; an open death of +infinity marks immortal bars.
inline std::pair<double, double> bar_interval(const PersistenceConfiguration& pc,
                                              const SymmetryBar& bar) {
  const double birth = pc.grid[bar.birth];
  const double death =
      bar.death ? pc.grid[*bar.death] : std::numeric_limits<double>::infinity();
  return {birth, death};
}

inline SymmetryBarcode symmetry_barcode(const PersistenceConfiguration& pc,
                                        DeathRule rule = DeathRule::confirmed,
                                        bool include_identity = false) {
  const int m = pc.frame_count();
  std::vector<SymmetryGroup> groups;
  groups.reserve(m);
  for (const auto& f : pc.frames) groups.push_back(compute_sym_group(f));

  struct Tracked {
    int birth;
    std::vector<int> perm;  // perm at the current frame
    Isometry generator;
    std::vector<int> birth_perm;
    std::optional<int> failure;  // first frame index the push-forward left the group
  };
  std::vector<Tracked> tracked;
  std::vector<std::size_t> alive;

  for (int i = 0; i < m; ++i) {
    if (i > 0) {
      std::vector<std::size_t> survivors;
      for (std::size_t id : alive) {
        std::vector<int> pushed = push_forward_perm(pc.steps[i - 1], tracked[id].perm);
        if (groups[i].find_perm(pushed)) {
          tracked[id].perm = std::move(pushed);
          survivors.push_back(id);
        } else {
          tracked[id].failure = i;
        }
      }
      alive = std::move(survivors);
    }
    for (const auto& el : groups[i].elements) {
      if (!include_identity && el.iso.is_identity(1e-9)) continue;
      bool seen = false;
      for (std::size_t id : alive)
        if (tracked[id].perm == el.perm) {
          seen = true;
          break;
        }
      if (seen) continue;
      tracked.push_back(Tracked{i, el.perm, el.iso, el.perm, std::nullopt});
      alive.push_back(tracked.size() - 1);
    }
  }

  SymmetryBarcode out;
  out.bars.reserve(tracked.size());
  for (auto& t : tracked) {
    SymmetryBar bar;
    bar.birth = t.birth;
    bar.generator = t.generator;
    bar.birth_perm = t.birth_perm;
    if (rule == DeathRule::maximal) {
      bar.death = t.failure;
    } else if (!t.failure) {
      if (t.birth < m - 1) bar.death = m - 1;
    } else {
      bar.death = std::max(*t.failure - 1, t.birth + 1);
    }
    out.bars.push_back(std::move(bar));
  }
  std::sort(out.bars.begin(), out.bars.end(), [](const SymmetryBar& a, const SymmetryBar& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    const int da = a.death ? *a.death : std::numeric_limits<int>::max();
    const int db = b.death ? *b.death : std::numeric_limits<int>::max();
    if (da != db) return da < db;
    return detail::element_less(SymmetryElement{a.generator, a.birth_perm},
                                SymmetryElement{b.generator, b.birth_perm});
  });
  return out;
}

/// Union of closed runs of grid indices on which a single isometry fixes the frame.
struct Polybar {
  std::vector<std::pair<int, int>> runs;  // inclusive index ranges, sorted, disjoint

  bool empty() const { return runs.empty(); }
  bool contains(int index) const {
    for (const auto& r : runs)
      if (r.first <= index && index <= r.second) return true;
    return false;
  }
};

inline bool fixes_frame(const Configuration& frame, const Isometry& pi,
                        bool translation_equiv) {
  if (pi.dim() != frame.dim())
    throw std::invalid_argument("fixes_frame: isometry dimension mismatch");
  if (translation_equiv) return set_equal(centered(apply(pi, frame)), centered(frame));
  return set_equal(apply(pi, frame), frame);
}

inline Polybar polybar(const PersistenceConfiguration& pc, const Isometry& pi,
                       bool translation_equiv = false) {
  Polybar out;
  for (int i = 0; i < pc.frame_count(); ++i) {
    if (!fixes_frame(pc.frames[i], pi, translation_equiv)) continue;
    if (!out.runs.empty() && out.runs.back().second == i - 1)
      out.runs.back().second = i;
    else
      out.runs.emplace_back(i, i);
  }
  return out;
}

/// Runs converted to grid values; with extend_to_inf a run reaching the final
/// grid index is reported as [t_a, +infinity).
inline std::vector<std::pair<double, double>> polybar_values(
    const PersistenceConfiguration& pc, const Polybar& pb, bool extend_to_inf = false) {
  std::vector<std::pair<double, double>> out;
  out.reserve(pb.runs.size());
  for (const auto& run : pb.runs) {
    double hi = pc.grid[run.second];
    if (extend_to_inf && run.second == pc.frame_count() - 1)
      hi = std::numeric_limits<double>::infinity();
    out.emplace_back(pc.grid[run.first], hi);
  }
  return out;
}

namespace detail {

inline int isometry_rank(const Isometry& iso) {
  if (iso.kind == isometry_kind::rotation)
    return iso.angle <= 1e-12 && iso.translation.cwiseAbs().maxCoeff() <= 1e-12 ? 0 : 1;
  return iso.kind == isometry_kind::reflection ? 2 : 3;
}

inline bool isometry_less(const Isometry& a, const Isometry& b) {
  const int ra = isometry_rank(a), rb = isometry_rank(b);
  if (ra != rb) return ra < rb;
  if (std::abs(a.angle - b.angle) > 1e-9) return a.angle < b.angle;
  for (int i = 0; i < a.axis.size(); ++i)
    if (std::abs(a.axis[i] - b.axis[i]) > 1e-9) return a.axis[i] < b.axis[i];
  for (int i = 0; i < a.normal.size(); ++i)
    if (std::abs(a.normal[i] - b.normal[i]) > 1e-9) return a.normal[i] < b.normal[i];
  for (int i = 0; i < a.translation.size(); ++i)
    if (std::abs(a.translation[i] - b.translation[i]) > 1e-9)
      return a.translation[i] < b.translation[i];
  return false;
}

}  // namespace detail

struct PolybarcodeEntry {
  Isometry representative;  // first isometry observed for this canonical key
  Polybar bar;
};

struct Polybarcode {
  std::vector<PolybarcodeEntry> entries;
  bool translation_equiv = true;
};

/// Polybars for the given candidates, or by default for every non-identity
/// isometry appearing in some frame's symmetry group. Keys with matching
/// orthogonal part (and matching translation unless translation_equiv) are
/// merged; empty polybars are dropped.
inline Polybarcode polybarcode(const PersistenceConfiguration& pc,
                               const std::vector<Isometry>& candidates = {},
                               bool translation_equiv = true) {
  double key_tol = 1e-9;
  for (const auto& f : pc.frames) key_tol = std::max(key_tol, f.tol);

  auto same_key = [&](const Isometry& a, const Isometry& b) {
    if ((a.linear - b.linear).cwiseAbs().maxCoeff() > key_tol) return false;
    if (!translation_equiv &&
        (a.translation - b.translation).cwiseAbs().maxCoeff() > key_tol)
      return false;
    return true;
  };

  std::vector<Isometry> keys;
  auto add_key = [&](const Isometry& iso) {
    for (const auto& k : keys)
      if (same_key(k, iso)) return;
    keys.push_back(iso);
  };

  if (!candidates.empty()) {
    for (const auto& c : candidates) add_key(c);
  } else {
    for (const auto& f : pc.frames) {
      SymmetryGroup g = compute_sym_group(f);
      for (const auto& el : g.elements)
        if (!el.iso.is_identity(1e-9)) add_key(el.iso);
    }
  }

  Polybarcode out;
  out.translation_equiv = translation_equiv;
  for (const auto& key : keys) {
    Polybar pb = polybar(pc, key, translation_equiv);
    if (!pb.empty()) out.entries.push_back(PolybarcodeEntry{key, std::move(pb)});
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const PolybarcodeEntry& a, const PolybarcodeEntry& b) {
              return detail::isometry_less(a.representative, b.representative);
            });
  return out;
}

/// Image of Sym_{f_{i,j}}(frames[i]) inside Sym(frames[j]).
inline SymmetryGroup persistent_sym_group(const PersistenceConfiguration& pc, int i, int j) {
  if (i < 0 || j < 0 || i >= pc.frame_count() || j >= pc.frame_count())
    throw std::out_of_range("persistent_sym_group: frame index out of range");
  if (i > j) throw std::invalid_argument("persistent_sym_group: need i <= j");
  if (i == j) return compute_sym_group(pc.frames[i]);

  const std::vector<int> f = composite_step(pc, i, j);
  SymmetryGroup restricted = restricted_sym_group(pc.frames[i], f, pc.frames[j]);

  SymmetryGroup out;
  out.base = pc.frames[j];
  for (const auto& el : restricted.elements) {
    SymmetryElement pushed = push_forward(f, el, pc.frames[j]);
    bool known = false;
    for (const auto& have : out.elements)
      if (have.perm == pushed.perm &&
          (have.iso.linear - pushed.iso.linear).cwiseAbs().maxCoeff() <= 1e-6) {
        known = true;
        break;
      }
    if (!known) out.elements.push_back(std::move(pushed));
  }
  std::sort(out.elements.begin(), out.elements.end(), detail::element_less);

  for (const auto& a : out.elements)
    for (const auto& b : out.elements)
      if (!out.find_perm(compose_perm(a.perm, b.perm)))
        throw numeric_error("persistent_sym_group: image is not closed under composition");
  return out;
}

struct TypeTrajectory {
  std::vector<SymmetryType2D> types;  // one classification per frame
  std::vector<int> transitions;       // frame indices where the type changes
};

inline TypeTrajectory type_trajectory(const PersistenceConfiguration& pc) {
  if (pc.frames.front().dim() != 2)
    throw std::invalid_argument("type_trajectory: frames must be 2D");
  TypeTrajectory out;
  out.types.reserve(pc.frames.size());
  for (const auto& f : pc.frames) out.types.push_back(classify_2d(compute_sym_group(f)));
  for (std::size_t i = 1; i < out.types.size(); ++i)
    if (!(out.types[i] == out.types[i - 1])) out.transitions.push_back(static_cast<int>(i));
  return out;
}

inline std::string type_label(const SymmetryType2D& type) {
  return (type.dihedral ? "D" : "C") + std::to_string(type.m);
}

/// Digraph-of-groups summary: one vertex per frame, one edge per index pair
/// i < j carrying the order of the restricted group Sym_{f_{i,j}}(frames[i]).
struct GroupDigraph {
  struct Vertex {
    int index;
    int order;
    std::string type;  // 2D classification label, empty otherwise
  };
  struct Edge {
    int from;
    int to;
    int order;
    std::string type;
  };
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
};

inline GroupDigraph group_digraph(const PersistenceConfiguration& pc) {
  GroupDigraph out;
  const bool planar = pc.frames.front().dim() == 2;
  for (int i = 0; i < pc.frame_count(); ++i) {
    SymmetryGroup g = compute_sym_group(pc.frames[i]);
    GroupDigraph::Vertex v{i, g.order(), ""};
    if (planar) v.type = type_label(classify_2d(g));
    out.vertices.push_back(std::move(v));
  }
  for (int i = 0; i < pc.frame_count(); ++i)
    for (int j = i + 1; j < pc.frame_count(); ++j) {
      SymmetryGroup g =
          restricted_sym_group(pc.frames[i], composite_step(pc, i, j), pc.frames[j]);
      GroupDigraph::Edge e{i, j, g.order(), ""};
      if (planar) e.type = type_label(classify_2d(g));
      out.edges.push_back(std::move(e));
    }
  return out;
}

}  // namespace persym
