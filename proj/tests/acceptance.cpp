// Acceptance gate: eleven criteria covering the worked values and the
// property suites.  Each criterion prints exactly one PASS or FAIL line;
// the process exits nonzero if any criterion fails.

#include <persym/defect.hpp>
#include <persym/degrees.hpp>
#include <persym/fourier.hpp>
#include <persym/interval_metrics.hpp>
#include <persym/reps.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

using namespace persym;

namespace {

using complexd = std::complex<double>;

const double inf = std::numeric_limits<double>::infinity();

struct Criterion {
  int failures = 0;
  int checks = 0;
  std::string first_failure;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failures;
    if (first_failure.empty()) first_failure = what;
  }
  void expect_near(double got, double want, double margin, const std::string& what) {
    expect(std::abs(got - want) <= margin,
           what + " (expected " + std::to_string(want) + ", got " + std::to_string(got) + ")");
  }
};

Configuration config2(std::initializer_list<std::pair<double, double>> pts) {
  Eigen::MatrixXd m(2, static_cast<int>(pts.size()));
  int c = 0;
  for (const auto& p : pts) {
    m(0, c) = p.first;
    m(1, c) = p.second;
    ++c;
  }
  return make_configuration(std::move(m));
}

Configuration config1(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(1, static_cast<int>(xs.size()));
  int c = 0;
  for (double v : xs) m(0, c++) = v;
  return make_configuration(std::move(m));
}

const double root3 = std::sqrt(3.0);

Configuration unit_square() { return config2({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

Configuration equilateral() {
  return config2({{0.0, 1.0}, {-root3 / 2, -0.5}, {root3 / 2, -0.5}});
}

Configuration scalene() { return config2({{0.0, 0.0}, {1.0, 0.0}, {0.6, 0.7}}); }

Configuration tetrahedron() {
  Eigen::MatrixXd m(3, 4);
  m << 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, -1, -1;
  return make_configuration(std::move(m));
}

Configuration worked_quadrilateral() {
  return config2({{-1.0, 1.0}, {1.0, 1.0}, {1.0, -1.0}, {-1.0, 0.0}});
}

Configuration worked_triangle() { return config2({{0.0, 0.0}, {2.0, 0.0}, {0.0, 1.0}}); }

PersistenceConfiguration quad_pc() {
  return make_persistence_configuration(
      {0, 1, 2}, {config2({{0, -1.2}, {0, 1.2}, {-1, 0}, {1, 0}}),
                  config2({{0, -1}, {0, 1}, {-1, 0}, {1, 0}}),
                  config2({{0, -1}, {0, 1}, {-1, 0}, {1.2, 0}})});
}

double ramp(double t) {
  if (t <= 1) return t;
  if (t <= 2) return 1;
  return t - 1;
}

PersistenceConfiguration four_corner_pc() {
  std::vector<double> grid;
  std::vector<Configuration> frames;
  for (int t = 0; t <= 5; ++t) {
    const double a = 1 + ramp(t);
    const double b = 2 + ramp(t - 1);
    grid.push_back(t);
    frames.push_back(config2({{a, b}, {-a, b}, {a, -b}, {-a, -b}}));
  }
  return make_persistence_configuration(grid, frames);
}

Eigen::MatrixXcd mc(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXcd m(static_cast<int>(rows.size()), static_cast<int>(rows.begin()->size()));
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) m(i, j++) = complexd(v, 0.0);
    ++i;
  }
  return m;
}

Eigen::MatrixXcd diagc(std::initializer_list<double> entries) {
  Eigen::VectorXd d(static_cast<int>(entries.size()));
  int i = 0;
  for (double v : entries) d(i++) = v;
  return d.asDiagonal().toDenseMatrix().cast<complexd>();
}

IntervalSet random_interval_set(std::mt19937& rng, int max_components) {
  std::uniform_int_distribution<int> count(0, max_components);
  const int m = count(rng);
  std::vector<int> marks;
  std::uniform_int_distribution<int> value(0, 40);
  while (static_cast<int>(marks.size()) < 2 * m) {
    const int v = value(rng);
    if (std::find(marks.begin(), marks.end(), v) == marks.end()) marks.push_back(v);
  }
  std::sort(marks.begin(), marks.end());
  std::vector<std::pair<double, double>> comps;
  for (int i = 0; i < m; ++i) comps.emplace_back(0.5 * marks[2 * i], 0.5 * marks[2 * i + 1]);
  std::bernoulli_distribution coin(0.25);
  if (m > 0 && coin(rng)) comps.front().first = -inf;
  if (m > 0 && coin(rng)) comps.back().second = inf;
  if (m > 0 && coin(rng) && std::isfinite(comps.front().first))
    comps.front().second = comps.front().first;
  return make_interval_set(std::move(comps));
}

bool leq_ext(double x, double y) { return x <= y || (std::isinf(x) && std::isinf(y)); }

Isometry random_isometry(std::mt19937& rng, int dim, bool linear_only = false) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd q = oracle::random_orthogonal(rng, dim);
  Eigen::VectorXd t = Eigen::VectorXd::Zero(dim);
  if (!linear_only)
    for (int i = 0; i < dim; ++i) t[i] = gauss(rng);
  return make_isometry(q, t);
}

std::set<int> run_indices(const Polybar& pb) {
  std::set<int> out;
  for (const auto& r : pb.runs)
    for (int i = r.first; i <= r.second; ++i) out.insert(i);
  return out;
}

bool subset_of(const std::set<int>& a, const std::set<int>& b) {
  for (int i : a)
    if (!b.count(i)) return false;
  return true;
}

CyclicPersistenceGroup doubling_chain(int max_exp) {
  std::vector<int> orders;
  for (int t = 0; t <= max_exp; ++t) orders.push_back(1 << t);
  return make_cyclic_persistence_group(std::move(orders), std::vector<int>(max_exp, 2));
}

PersistentFunction wave_function(const CyclicPersistenceGroup& g, bool use_sine) {
  std::vector<Eigen::VectorXcd> values;
  for (int t = 0; t < g.frame_count(); ++t) {
    Eigen::VectorXcd v(g.orders[t]);
    for (int x = 0; x < g.orders[t]; ++x) {
      const double angle = 2.0 * pi * x / g.orders[t];
      v(x) = use_sine ? std::sin(angle) : std::cos(angle);
    }
    values.push_back(std::move(v));
  }
  return make_persistent_function(g, std::move(values));
}

CyclicPersistenceGroup random_chain(std::mt19937& rng, int frames) {
  std::uniform_int_distribution<int> small(1, 10);
  std::uniform_int_distribution<int> mult(0, 5);
  std::vector<int> orders = {small(rng)};
  std::vector<int> multipliers;
  for (int t = 1; t < frames; ++t) {
    const int c = mult(rng);
    const long long product = static_cast<long long>(c) * orders.back();
    std::vector<int> choices;
    if (product == 0) {
      for (int n = 1; n <= 10; ++n) choices.push_back(n);
    } else {
      for (int n = 1; n <= std::min<long long>(product, 24); ++n)
        if (product % n == 0) choices.push_back(n);
    }
    orders.push_back(
        choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)]);
    multipliers.push_back(c);
  }
  return make_cyclic_persistence_group(std::move(orders), std::move(multipliers));
}

PersistentFunction random_function(std::mt19937& rng, const CyclicPersistenceGroup& g) {
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  Eigen::VectorXcd last(g.orders.back());
  for (int x = 0; x < last.size(); ++x) last(x) = complexd(coord(rng), coord(rng));
  return pull_back_function(g, last);
}

double total_signal_energy(const Eigen::VectorXcd& v) {
  double out = 0.0;
  for (int x = 0; x < v.size(); ++x) out += std::norm(v(x));
  return out;
}

const SymmetryElement& find_element(const SymmetryGroup& g, double a, double b, double c,
                                    double d) {
  Eigen::Matrix2d m;
  m << a, b, c, d;
  for (const SymmetryElement& e : g.elements)
    if ((e.iso.linear - m).cwiseAbs().maxCoeff() <= 1e-9) return e;
  throw std::runtime_error("acceptance: named dihedral element not found");
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

void criterion_sym_groups(Criterion& c) {
  const SymmetryGroup square = compute_sym_group(unit_square());
  c.expect(square.order() == 8, "square group order != 8");
  const SymmetryType2D square_type = classify_2d(square);
  c.expect(square_type.dihedral && square_type.m == 4, "square type != D4");

  const SymmetryGroup triangle = compute_sym_group(equilateral());
  c.expect(triangle.order() == 6, "equilateral group order != 6");
  const SymmetryType2D triangle_type = classify_2d(triangle);
  c.expect(triangle_type.dihedral && triangle_type.m == 3, "equilateral type != D3");
  const std::vector<double> expected_axes = {30.0, 90.0, 150.0};
  c.expect(triangle_type.axis_angles.size() == 3, "equilateral axis count != 3");
  for (size_t i = 0; i < expected_axes.size() && i < triangle_type.axis_angles.size(); ++i)
    c.expect_near(triangle_type.axis_angles[i], expected_axes[i], 0.01, "equilateral axis");

  c.expect(compute_sym_group(scalene()).order() == 1, "scalene group not trivial");
  c.expect(compute_sym_group(tetrahedron()).order() == 24, "tetrahedron group order != 24");
}

void criterion_barcode(Criterion& c) {
  const PersistenceConfiguration pc = quad_pc();
  const SymmetryBarcode bc = symmetry_barcode(pc);
  std::vector<std::pair<int, int>> intervals;
  for (const SymmetryBar& bar : bc.bars) {
    c.expect(bar.death.has_value(), "unexpected immortal bar");
    intervals.emplace_back(bar.birth, bar.death.value_or(-1));
  }
  std::sort(intervals.begin(), intervals.end());
  const std::vector<std::pair<int, int>> expected = {{0, 1}, {0, 1}, {0, 2}, {1, 2},
                                                     {1, 2}, {1, 2}, {1, 2}};
  c.expect(intervals == expected, "barcode does not match the worked multiset");
}

void criterion_polybarcode_distances(Criterion& c) {
  const std::vector<Isometry> keys = {
      make_reflection_2d(0),      make_rotation_2d(pi / 2),   make_rotation_2d(pi),
      make_rotation_2d(3 * pi / 2), make_reflection_2d(pi / 4), make_reflection_2d(pi / 2),
      make_reflection_2d(3 * pi / 4)};
  const auto keyed = [&](const std::vector<std::vector<std::pair<double, double>>>& sets) {
    std::vector<KeyedIntervalSet> out;
    for (std::size_t i = 0; i < keys.size(); ++i)
      out.push_back(KeyedIntervalSet{keys[i], make_interval_set(sets[i])});
    return out;
  };
  const std::vector<KeyedIntervalSet> first =
      keyed({{{0, 2}}, {{0, 0}}, {{0, 1}}, {{0, 0}}, {{0, 0}}, {{0, 1}}, {{0, 0}}});
  const std::vector<KeyedIntervalSet> second =
      keyed({{{0, 2}}, {{0, 1}}, {{0, 1}}, {{0, 1}}, {{0, 1}}, {{0, 1}}, {{0, 1}}});

  c.expect(polybarcode_distance(first, second, polybar_metric::sym_diff) == 4.0,
           "d_S != 4");
  c.expect(polybarcode_distance(first, second, polybar_metric::expansion) == 1.0,
           "d_E != 1");
  c.expect(polybarcode_distance(first, second, polybar_metric::left) == 0.0, "d_L != 0");
  c.expect(polybarcode_distance(first, second, polybar_metric::interleaving) == 0.0,
           "d_I != 0");
}

void criterion_defect(Criterion& c) {
  const Configuration x = worked_quadrilateral();
  const Eigen::Vector2d center = centroid(x);
  c.expect_near(defect(x, make_reflection_2d(pi / 2, center)).first, std::sqrt(2.0), 1e-9,
                "mirror defect");
  c.expect_near(defect(x, make_rotation_2d(pi, center)).first, 1.0, 1e-9,
                "half-turn defect");

  const CandidateSet grid = sample_candidates_2d(center, 180, 180);
  const std::vector<DefectRecord> records = defect_sweep(x, grid);
  double best_mirror = inf;
  double best_axis_deg = -1.0;
  for (const DefectRecord& r : records) {
    if (r.candidate.kind != isometry_kind::reflection) continue;
    if (r.defect < best_mirror) {
      best_mirror = r.defect;
      best_axis_deg = r.candidate.angle * 180.0 / pi;
    }
  }
  c.expect_near(best_mirror, 0.6130, 1e-3, "swept minimum mirror defect");
  c.expect_near(best_axis_deg, 171.0, 1.0, "swept best mirror axis");
}

void criterion_measure(Criterion& c) {
  const Configuration t = worked_triangle();
  Eigen::Matrix2d swap;
  swap << 0, 1, 1, 0;
  c.expect(measure(t, make_isometry(swap, Eigen::Vector2d::Zero())).first == 0.8,
           "diagonal mirror measure != 0.8");

  const Eigen::Vector2d center = centroid(t);
  double best = -inf;
  Isometry best_iso;
  for (int i = 0; i < 180; ++i) {
    const Isometry iso = make_reflection_2d(pi * i / 180.0, center);
    const double value = measure(t, iso).first;
    if (value > best) {
      best = value;
      best_iso = iso;
    }
  }
  c.expect_near(best, 0.9899, 1e-4, "swept best measure");
  c.expect_near(best_iso.angle * 180.0 / pi, 168.0, 1.0, "swept best axis");

  const Configuration image = apply(best_iso, t);
  const double printed[3][2] = {{0.1932, 0.9090}, {2.0203, 0.0955}, {-0.2135, -0.0045}};
  for (int i = 0; i < 3; ++i) {
    c.expect_near(image.points(0, i), printed[i][0], 1e-3, "reflected x coordinate");
    c.expect_near(image.points(1, i), printed[i][1], 1e-3, "reflected y coordinate");
  }
}

void criterion_stability_equality(Criterion& c) {
  const Configuration x = config1({-1.0, 1.0});
  const Configuration y = config1({0.0, 2.0});
  Eigen::MatrixXd neg(1, 1);
  neg << -1.0;
  const Isometry flip = make_isometry(neg, Eigen::VectorXd::Zero(1));
  const double gap = std::abs(defect(x, flip, 1.0).first - defect(y, flip, 1.0).first);
  c.expect(gap == 4.0, "defect gap != 4");
  c.expect(wasserstein(x, y, 1.0) == 2.0, "W1 != 2");
  c.expect(gap == 2.0 * wasserstein(x, y, 1.0), "gap != 2 W1");
}

void criterion_degrees(Criterion& c) {
  const DegreeProfile p = degree_profile(compute_sym_group(equilateral()));
  c.expect(p.degree == 13, "D3 degree != 13");
  c.expect(p.polynomial == std::map<int, int>{{1, 1}, {2, 3}, {3, 2}},
           "D3 polynomial != t + 3t^2 + 2t^3");

  const auto frame = [&](double px, double py) {
    return config2({{0.0, 1.0}, {-root3 / 2, -0.5}, {root3 / 2, -0.5}, {px, py}});
  };
  const PersistenceConfiguration pc = make_persistence_configuration(
      {0.0, 1.0, 2.0}, {frame(-root3, 1.0), frame(0.0, 0.0), frame(root3, 1.0)});
  const WeightedPath path = weighted_path(pc);
  c.expect(path.vertex_weights == std::vector<int>{7, 13, 7}, "vertex weights != (7,13,7)");
  c.expect(path.edge_weights == std::vector<int>{3, 3}, "edge weights != (3,3)");
}

void criterion_cayley(Criterion& c) {
  const SymmetryGroup g =
      compute_sym_group(config2({{0, -1}, {0, 1}, {-1, 0}, {1, 0}}));
  const SymmetryElement& e = find_element(g, 1, 0, 0, 1);
  const SymmetryElement& r = find_element(g, 0, -1, 1, 0);
  const SymmetryElement& r2 = find_element(g, -1, 0, 0, -1);
  const SymmetryElement& r3 = find_element(g, 0, 1, -1, 0);
  const SymmetryElement& s = find_element(g, 1, 0, 0, -1);
  const SymmetryElement& sr = find_element(g, 0, -1, -1, 0);
  const SymmetryElement& sr2 = find_element(g, -1, 0, 0, 1);
  const SymmetryElement& sr3 = find_element(g, 0, 1, 1, 0);
  const std::vector<const SymmetryElement*> named = {&e, &r, &r2, &r3, &s, &sr, &sr2, &sr3};

  const CayleyGraph cay = cayley(g, {r2, s, sr2});
  const std::vector<double> spectrum = laplacian_spectrum(cay);
  const std::vector<double> expected = {0, 0, 4, 4, 4, 4, 4, 4};
  c.expect(spectrum.size() == expected.size(), "spectrum size != 8");
  for (size_t i = 0; i < expected.size() && i < spectrum.size(); ++i)
    c.expect_near(spectrum[i], expected[i], 1e-8, "Laplacian eigenvalue");

  const int printed[8][8] = {
      {0, 0, 1, 0, 1, 0, 1, 0}, {0, 0, 0, 1, 0, 1, 0, 1}, {1, 0, 0, 0, 1, 0, 1, 0},
      {0, 1, 0, 0, 0, 1, 0, 1}, {1, 0, 1, 0, 0, 0, 1, 0}, {0, 1, 0, 1, 0, 0, 0, 1},
      {1, 0, 1, 0, 1, 0, 0, 0}, {0, 1, 0, 1, 0, 1, 0, 0}};
  std::vector<int> at(8, -1);
  bool located = true;
  for (int i = 0; i < 8; ++i) {
    const auto it = std::find(cay.vertices.begin(), cay.vertices.end(), named[i]->perm);
    if (it == cay.vertices.end()) located = false;
    else at[i] = static_cast<int>(it - cay.vertices.begin());
  }
  c.expect(located, "named elements missing from the vertex list");
  if (located)
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        c.expect(cay.adjacency(at[i], at[j]) == printed[i][j], "adjacency table mismatch");
}

void criterion_rep_barcode(Criterion& c) {
  PersistenceModuleSeq seq = make_persistence_module_seq(
      {2, 2, 1}, std::vector<Eigen::MatrixXcd>{mc({{1, 0}, {0, 1}}), mc({{1, 0}})});
  std::vector<std::vector<Eigen::MatrixXcd>> actions = {
      {diagc({1, -1})}, {diagc({1, -1})}, {diagc({1})}};
  const PersistenceRepresentation rep = make_persistence_representation(
      make_abelian_group({2}), std::move(seq), std::move(actions));
  const IrreducibleBarcode barcode = irreducible_barcode(rep);
  using Bars = std::vector<std::pair<int, int>>;
  c.expect(barcode.bars.size() == 2, "character count != 2");
  c.expect(barcode.bars.count({0}) && barcode.bars.at({0}) == Bars{{0, 2}},
           "trivial-character bar != [0,2]");
  c.expect(barcode.bars.count({1}) && barcode.bars.at({1}) == Bars{{0, 1}},
           "sign-character bar != [0,1]");

  PersistenceModuleSeq inc_seq = make_persistence_module_seq(
      {2, 3}, std::vector<Eigen::MatrixXcd>{mc({{1, 0}, {0, 1}, {0, 0}})});
  std::vector<std::vector<Eigen::MatrixXcd>> inc_actions = {
      {diagc({1, -1}), Eigen::MatrixXcd::Identity(2, 2)},
      {diagc({1, -1, 1}), diagc({1, 1, -1})}};
  const PersistenceRepresentation inclusion = make_persistence_representation(
      make_abelian_group({2, 2}), std::move(inc_seq), std::move(inc_actions));
  const complexd at_e = persistent_character(inclusion, 0, 1, {0, 0});
  const complexd at_a = persistent_character(inclusion, 0, 1, {1, 0});
  c.expect(at_e == complexd(2.0, 0.0), "persistent character at e != 2");
  c.expect(at_a == complexd(0.0, 0.0), "persistent character at a != 0");
}

void criterion_fourier(Criterion& c) {
  const CyclicPersistenceGroup chain = doubling_chain(6);
  const PersistentFunction cosine = wave_function(chain, false);
  const PersistentFunction sine = wave_function(chain, true);

  for (int s : {3, 4, 5}) {
    const int n = 1 << s;
    const double half = std::pow(2.0, s - 1);
    for (int t = s; t < chain.frame_count(); ++t) {
      const Spectrum spectrum = persistent_ft(chain, cosine, s, t);
      c.expect(static_cast<int>(spectrum.coefficients.size()) == n, "coefficient count");
      for (int k = 0; k < n; ++k) {
        const double target = (k == 1 || k == n - 1) ? half : 0.0;
        c.expect(std::abs(spectrum.coefficients[k] - complexd(target, 0.0)) <= 1e-9,
                 "cosine coefficient at k=" + std::to_string(k));
      }
      c.expect_near(spectrum.entropy, std::log(2.0), 1e-9, "cosine entropy");
      c.expect(std::abs(correlation(chain, cosine, sine, s, t)) <= 1e-9,
               "cos/sin correlation");
    }
  }
}

void criterion_properties(Criterion& c) {
  std::mt19937 rng(20260815);

  // (a) brute-force group oracle equivalence in 2D, n <= 7.
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 6;
    const Configuration x = oracle::random_configuration(rng, 2, n);
    c.expect(oracle::group_perms(compute_sym_group(x)) == oracle::brute_force_sym_group_2d(x),
             "group oracle mismatch on a random configuration");
  }
  for (int m = 3; m <= 7; ++m) {
    Eigen::MatrixXd pts(2, m);
    for (int i = 0; i < m; ++i) {
      const double a = 2.0 * pi * i / m + 0.2 * m;
      pts.col(i) << std::cos(a), std::sin(a);
    }
    const Configuration poly = make_configuration(std::move(pts));
    c.expect(oracle::group_perms(compute_sym_group(poly)) ==
                 oracle::brute_force_sym_group_2d(poly),
             "group oracle mismatch on a regular polygon");
  }

  // (b) triangle inequalities for d_S, d_E, the candidate metric, wasserstein.
  for (int trial = 0; trial < 500; ++trial) {
    const IntervalSet ia = random_interval_set(rng, 3);
    const IntervalSet ib = random_interval_set(rng, 3);
    const IntervalSet ic = random_interval_set(rng, 3);
    c.expect(leq_ext(d_sym_diff(ia, ic), d_sym_diff(ia, ib) + d_sym_diff(ib, ic) + 1e-9),
             "d_S triangle inequality");
    c.expect(leq_ext(d_expansion(ia, ic), d_expansion(ia, ib) + d_expansion(ib, ic) + 1e-9),
             "d_E triangle inequality");

    const int dim = 2 + trial % 2;
    const int n = 3 + trial % 3;
    const double p = 1.0 + trial % 3;
    const Configuration x = oracle::random_configuration(rng, dim, n);
    const Isometry a = random_isometry(rng, dim);
    const Isometry b = random_isometry(rng, dim);
    const Isometry d = random_isometry(rng, dim);
    c.expect(candidate_metric(x, a, d, p) <=
                 candidate_metric(x, a, b, p) + candidate_metric(x, b, d, p) + 1e-9,
             "candidate metric triangle inequality");

    const Configuration y = oracle::random_configuration(rng, dim, n);
    const Configuration z = oracle::random_configuration(rng, dim, n);
    c.expect(wasserstein(x, z, p) <= wasserstein(x, y, p) + wasserstein(y, z, p) + 1e-9,
             "wasserstein triangle inequality");
  }

  // (c) Lipschitz bounds, both forms.
  for (int trial = 0; trial < 500; ++trial) {
    const int dim = 2 + trial % 2;
    const int n = 2 + trial % 5;
    const double p = 1.0 + trial % 3;
    const Configuration x = oracle::random_configuration(rng, dim, n);
    const Configuration y = oracle::random_configuration(rng, dim, n);
    const Isometry a = random_isometry(rng, dim);
    const Isometry b = random_isometry(rng, dim);
    c.expect(std::abs(defect(x, a, p).first - defect(x, b, p).first) <=
                 candidate_metric(x, a, b, p) + 1e-7,
             "candidate-form Lipschitz bound");
    c.expect(std::abs(defect(x, a, p).first - defect(y, a, p).first) <=
                 2.0 * wasserstein(x, y, p) + 1e-7,
             "configuration-form Lipschitz bound");
  }

  // (d) polybar closure laws on the computed polybarcodes.
  for (const PersistenceConfiguration& pc : {quad_pc(), four_corner_pc()}) {
    const std::vector<Isometry> gens = {
        make_rotation_2d(pi / 2),  make_rotation_2d(pi),       make_rotation_2d(3 * pi / 2),
        make_reflection_2d(0),     make_reflection_2d(pi / 4), make_reflection_2d(pi / 2),
        make_reflection_2d(3 * pi / 4)};
    for (const Isometry& a : gens) {
      const std::set<int> ia = run_indices(polybar(pc, a));
      c.expect(run_indices(polybar(pc, inverse(a))) == ia, "polybar inverse law");
      Isometry power = a;
      for (int k = 2; k <= 4; ++k) {
        power = compose(power, a);
        c.expect(subset_of(ia, run_indices(polybar(pc, power))), "polybar power law");
      }
    }
    const Polybarcode bc = polybarcode(pc);
    for (const auto& ea : bc.entries)
      for (const auto& eb : bc.entries) {
        const std::set<int> ia = run_indices(ea.bar);
        const std::set<int> ib = run_indices(eb.bar);
        std::set<int> meet;
        for (int i : ia)
          if (ib.count(i)) meet.insert(i);
        if (meet.empty()) continue;
        const Isometry prod = compose(ea.representative, eb.representative);
        c.expect(subset_of(meet, run_indices(polybar(pc, prod, true))),
                 "polybar composition law");
      }
  }

  // (e) Fourier identities on random abelian instances.
  for (int trial = 0; trial < 200; ++trial) {
    const CyclicPersistenceGroup chain = random_chain(rng, 4);
    const PersistentFunction theta = random_function(rng, chain);
    const int m = chain.frame_count() - 1;

    for (int s = 0; s <= m; ++s) {
      const double signal = total_signal_energy(theta.values[s]);
      for (int t = s; t <= m; ++t) {
        const Spectrum spectrum = persistent_ft(chain, theta, s, t);
        double spectral = 0.0;
        for (double e : spectrum.energies) spectral += e;
        c.expect(std::abs(spectral / chain.orders[s] - signal) <= 1e-9, "Parseval identity");
        const Eigen::VectorXcd rebuilt = inversion(chain, spectrum, s, t);
        c.expect((rebuilt - theta.values[s]).cwiseAbs().maxCoeff() <= 1e-9,
                 "inversion round trip");
      }
    }

    const PersistentFunction eta = random_function(rng, chain);
    const PersistentFunction conv =
        pull_back_function(chain, persistent_convolution(chain, theta, eta, 0, m));
    const Spectrum left = persistent_ft(chain, conv, 0, m);
    const Spectrum fa = persistent_ft(chain, theta, 0, m);
    const Spectrum fb = persistent_ft(chain, eta, 0, m);
    for (int k = 0; k < chain.orders[0]; ++k)
      c.expect(std::abs(left.coefficients[k] - fa.coefficients[k] * fb.coefficients[k]) <=
                   1e-8,
               "convolution-multiplication identity");

    std::uniform_real_distribution<double> weight(0.0, 1.0);
    Eigen::VectorXcd top(chain.orders[m]);
    for (int x = 0; x < top.size(); ++x) top(x) = weight(rng);
    for (int x = 0; x < top.size(); ++x) {
      const int mirror = (static_cast<int>(top.size()) - x) % static_cast<int>(top.size());
      const double even = 0.5 * (top(x).real() + top(mirror).real());
      top(x) = even;
      top(mirror) = even;
    }
    const PersistentFunction even_weights = pull_back_function(chain, top);
    const Eigen::MatrixXcd lap = persistent_laplacian(chain, even_weights, 0, m);
    c.expect((lap - lap.adjoint()).cwiseAbs().maxCoeff() <= 1e-12,
             "Laplacian self-adjointness");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(lap);
    c.expect(solver.eigenvalues().minCoeff() >= -1e-9, "Laplacian positive semidefiniteness");
  }

  // (f) interval decomposition: dimension tiling and basis invariance.
  std::uniform_int_distribution<int> dim_pick(0, 3);
  std::uniform_int_distribution<int> entry(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const int frames = 2 + trial % 4;
    std::vector<int> dims;
    for (int t = 0; t < frames; ++t) dims.push_back(dim_pick(rng));
    std::vector<Eigen::MatrixXcd> maps;
    for (int t = 0; t + 1 < frames; ++t) {
      Eigen::MatrixXd f(dims[t + 1], dims[t]);
      for (int i = 0; i < f.size(); ++i) f.data()[i] = entry(rng);
      maps.push_back(f.cast<complexd>());
    }
    const PersistenceModuleSeq seq = make_persistence_module_seq(dims, maps);
    const std::vector<std::pair<int, int>> bars = interval_decomposition(seq);

    for (int t = 0; t < frames; ++t) {
      int alive = 0;
      for (const auto& [birth, death] : bars)
        if (birth <= t && t <= death) ++alive;
      c.expect(alive == dims[t], "bars do not tile the dimension");
    }

    std::vector<Eigen::MatrixXcd> conjugated = maps;
    std::vector<Eigen::MatrixXd> bases;
    for (int t = 0; t < frames; ++t) {
      for (;;) {
        Eigen::MatrixXd q(dims[t], dims[t]);
        for (int i = 0; i < q.size(); ++i) q.data()[i] = entry(rng);
        if (dims[t] == 0 || std::abs(q.determinant()) >= 1.0) {
          bases.push_back(std::move(q));
          break;
        }
      }
    }
    for (int t = 0; t + 1 < frames; ++t)
      conjugated[t] = bases[t + 1].cast<complexd>() * maps[t] *
                      bases[t].cast<complexd>().inverse();
    std::vector<std::pair<int, int>> moved =
        interval_decomposition(make_persistence_module_seq(dims, conjugated));
    std::sort(moved.begin(), moved.end());
    std::vector<std::pair<int, int>> sorted_bars = bars;
    std::sort(sorted_bars.begin(), sorted_bars.end());
    c.expect(moved == sorted_bars, "barcode changed under a change of basis");
  }

  // (g) interval-set comparison bounds.
  for (int trial = 0; trial < 500; ++trial) {
    const IntervalSet a = random_interval_set(rng, 3);
    const IntervalSet b = random_interval_set(rng, 3);
    c.expect(leq_ext(d_match_sym(a, b), 2.0 * d_expansion(a, b) + 1e-9),
             "d_match_sym <= 2 d_E");
    c.expect(leq_ext(d_left(a, b), d_expansion(a, b) + 1e-12), "d_L <= d_E");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria = {
      {"symmetry groups of the four worked configurations", criterion_sym_groups},
      {"symmetry barcode of the quadrilateral filtration", criterion_barcode},
      {"polybarcode distances of the worked pair", criterion_polybarcode_distances},
      {"defect worked values and the 180-axis sweep", criterion_defect},
      {"measure worked value and the 1-degree sweep", criterion_measure},
      {"stability equality case in one dimension", criterion_stability_equality},
      {"degree profile and the persistent degree path", criterion_degrees},
      {"Cayley adjacency table and Laplacian spectrum", criterion_cayley},
      {"representation barcode and persistent characters", criterion_rep_barcode},
      {"persistent Fourier analysis of the cosine signal", criterion_fourier},
      {"property suites over randomized instances", criterion_properties},
  };

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    if (c.failures == 0) {
      std::printf("PASS criterion %2zu: %s [%d checks]\n", i + 1, criteria[i].first.c_str(),
                  c.checks);
    } else {
      ++failed;
      std::printf("FAIL criterion %2zu: %s [%d check(s) failed; first: %s]\n", i + 1,
                  criteria[i].first.c_str(), c.failures, c.first_failure.c_str());
    }
  }
  return failed == 0 ? 0 : 1;
}
