// persym: persistent symmetry analysis of finite point configurations.
//
// Every subcommand ingests an input document, delegates to one library
// operation family, and emits a deterministic report on standard output or
// at --out: JSON by default, a flat table with --format csv.  Exit codes:
// 0 success, 2 invalid input, 3 numerical inconsistency, 64 unknown command.

#include <persym/defect.hpp>
#include <persym/degrees.hpp>
#include <persym/fourier.hpp>
#include <persym/interval_metrics.hpp>
#include <persym/io.hpp>
#include <persym/reps.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

using namespace persym;

namespace {

struct Options {
  std::string input;
  std::string input_b;
  std::string out;
  std::string format = "json";
  std::string metric = "E";
  double tolerance = -1.0;
  double p = 2.0;
  int axes = 24;
  int rotations = 24;
  int mirrors = 24;
  int angles = 180;
  std::vector<double> radii;
  std::vector<double> epsilons;
  bool translation_equiv = true;
  bool include_identity = false;
  long long seed = 0;
  int threads = 0;
  bool tolerance_set = false;
  bool seed_set = false;
  bool threads_set = false;
};

struct CommandOutput {
  JsonValue inputs = JsonValue::array();
  JsonValue parameters = JsonValue::object();
  JsonValue results = JsonValue::object();
  std::vector<std::string> warnings;
  CsvTable table;
};

int resolve_threads(const Options& opt) {
  if (opt.threads_set && opt.threads > 0) return opt.threads;
  if (const char* env = std::getenv("PERSYM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

InputDocument load_document(const Options& opt, const std::string& path) {
  InputDocument doc = load_input_document(path);
  if (opt.tolerance_set) doc.tolerance = opt.tolerance;
  return doc;
}

Configuration single_frame(const InputDocument& doc, std::vector<std::string>& warnings) {
  if (doc.frame_count() > 1)
    warnings.push_back("input has " + std::to_string(doc.frame_count()) +
                       " frames; using frame 0");
  return frame_configuration(doc, 0);
}

std::string perm_text(const std::vector<int>& p) {
  std::string out;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(p[i]);
  }
  return out;
}

JsonValue json_doubles(const std::vector<double>& v) {
  JsonValue out = JsonValue::array();
  for (double x : v) out.push(JsonValue::of(x));
  return out;
}

JsonValue json_ints(const std::vector<int>& v) {
  JsonValue out = JsonValue::array();
  for (int x : v) out.push(JsonValue::of(x));
  return out;
}

std::string group_type_name(const SymmetryGroup& g) {
  if (g.order() == 1) return "Trivial";
  if (g.base.dim() == 2) {
    const SymmetryType2D type = classify_2d(g);
    return (type.dihedral ? std::string("Dihedral(") : std::string("Cyclic(")) +
           std::to_string(type.m) + ")";
  }
  if (g.base.dim() == 1) return "Cyclic(2)";
  return "Order(" + std::to_string(g.order()) + ")";
}

void echo_tolerance(const Options& opt, JsonValue& parameters) {
  if (opt.tolerance_set) parameters.set("tolerance", JsonValue::of(opt.tolerance));
}

void echo_common(const Options& opt, JsonValue& parameters) {
  if (opt.seed_set) parameters.set("seed", JsonValue::of(opt.seed));
  if (opt.threads_set) parameters.set("threads", JsonValue::of(opt.threads));
  parameters.set("format", JsonValue::of(opt.format));
}

CandidateSet planar_or_spatial_candidates(const Configuration& x, const Options& opt,
                                          const char* who) {
  const Eigen::VectorXd center = centroid(x);
  if (x.dim() == 2)
    return sample_candidates_2d(Eigen::Vector2d(center), opt.axes, opt.rotations);
  if (x.dim() == 3)
    return sample_candidates_3d(Eigen::Vector3d(center), opt.mirrors, opt.axes, opt.angles);
  throw std::invalid_argument(std::string(who) + ": 1D input is not supported");
}

// ---------------------------------------------------------------------------
// sym-group
// ---------------------------------------------------------------------------

CommandOutput run_sym_group(const Options& opt) {
  CommandOutput out;
  const InputDocument doc = load_document(opt, opt.input);
  out.inputs.push(json_input_document(doc));
  out.parameters.set("input", JsonValue::of(opt.input));
  echo_tolerance(opt, out.parameters);

  const Configuration x = single_frame(doc, out.warnings);
  const SymmetryGroup g = compute_sym_group(x);

  int rotations = 0, reflections = 0, rotoreflections = 0;
  JsonValue elements = JsonValue::array();
  out.table.header = {"kind", "angle_deg", "perm"};
  for (const SymmetryElement& e : g.elements) {
    if (e.iso.kind == isometry_kind::rotation) ++rotations;
    else if (e.iso.kind == isometry_kind::reflection) ++reflections;
    else ++rotoreflections;
    JsonValue je = json_isometry(e.iso);
    je.set("perm", json_perm(e.perm));
    elements.push(std::move(je));
    out.table.rows.push_back({isometry_kind_name(e.iso.kind),
                              format_fixed(to_degrees(e.iso.angle)), perm_text(e.perm)});
  }
  out.results.set("order", JsonValue::of(g.order()));
  out.results.set("type", JsonValue::of(group_type_name(g)));
  out.results.set("rotations", JsonValue::of(rotations));
  out.results.set("reflections", JsonValue::of(reflections));
  out.results.set("rotoreflections", JsonValue::of(rotoreflections));
  out.results.set("elements", std::move(elements));
  return out;
}

// ---------------------------------------------------------------------------
// barcode
// ---------------------------------------------------------------------------

CommandOutput run_barcode(const Options& opt) {
  CommandOutput out;
  const InputDocument doc = load_document(opt, opt.input);
  out.inputs.push(json_input_document(doc));
  out.parameters.set("input", JsonValue::of(opt.input));
  out.parameters.set("include_identity", JsonValue::of(opt.include_identity));
  echo_tolerance(opt, out.parameters);

  const PersistenceConfiguration pc = to_persistence_configuration(doc);
  const SymmetryBarcode bc =
      symmetry_barcode(pc, DeathRule::confirmed, opt.include_identity);

  JsonValue bars = JsonValue::array();
  out.table.header = {"birth", "death", "kind", "angle_deg"};
  for (const SymmetryBar& bar : bc.bars) {
    const auto [birth, death] = bar_interval(pc, bar);
    JsonValue jb = JsonValue::object();
    jb.set("birth", JsonValue::of(birth));
    jb.set("death", bar.death ? JsonValue::of(death) : JsonValue::null());
    jb.set("birth_index", JsonValue::of(bar.birth));
    jb.set("death_index", bar.death ? JsonValue::of(*bar.death) : JsonValue::null());
    jb.set("generator", json_isometry(bar.generator));
    bars.push(std::move(jb));
    out.table.rows.push_back({format_significant(birth),
                              bar.death ? format_significant(death) : std::string(),
                              isometry_kind_name(bar.generator.kind),
                              format_fixed(to_degrees(bar.generator.angle))});
  }
  out.results.set("bar_count", JsonValue::of(static_cast<int>(bc.bars.size())));
  out.results.set("bars", std::move(bars));
  return out;
}

// ---------------------------------------------------------------------------
// polybarcode
// ---------------------------------------------------------------------------

CommandOutput run_polybarcode(const Options& opt) {
  CommandOutput out;
  const InputDocument doc = load_document(opt, opt.input);
  out.inputs.push(json_input_document(doc));
  out.parameters.set("input", JsonValue::of(opt.input));
  out.parameters.set("translation_equiv", JsonValue::of(opt.translation_equiv));
  echo_tolerance(opt, out.parameters);

  const PersistenceConfiguration pc = to_persistence_configuration(doc);
  const Polybarcode pb = polybarcode(pc, {}, opt.translation_equiv);
  const std::vector<KeyedIntervalSet> keyed = keyed_interval_sets(pc, pb, false);

  JsonValue entries = JsonValue::array();
  out.table.header = {"kind", "angle_deg", "birth", "death"};
  for (const KeyedIntervalSet& entry : keyed) {
    JsonValue je = JsonValue::object();
    je.set("isometry_key", json_isometry(entry.key));
    JsonValue intervals = JsonValue::array();
    for (const auto& [birth, death] : entry.intervals.components) {
      JsonValue pair = JsonValue::array();
      pair.push(JsonValue::of(birth)).push(JsonValue::of(death));
      intervals.push(std::move(pair));
      out.table.rows.push_back({isometry_kind_name(entry.key.kind),
                                format_fixed(to_degrees(entry.key.angle)),
                                format_significant(birth), format_significant(death)});
    }
    je.set("intervals", std::move(intervals));
    entries.push(std::move(je));
  }
  out.results.set("entry_count", JsonValue::of(static_cast<int>(keyed.size())));
  out.results.set("entries", std::move(entries));
  return out;
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

CommandOutput run_metrics(const Options& opt) {
  CommandOutput out;
  const InputDocument doc_a = load_document(opt, opt.input);
  const InputDocument doc_b = load_document(opt, opt.input_b);
  out.inputs.push(json_input_document(doc_a));
  out.inputs.push(json_input_document(doc_b));
  out.parameters.set("input", JsonValue::of(opt.input));
  out.parameters.set("input_b", JsonValue::of(opt.input_b));
  out.parameters.set("metric", JsonValue::of(opt.metric));
  out.parameters.set("translation_equiv", JsonValue::of(opt.translation_equiv));
  out.parameters.set("include_identity", JsonValue::of(opt.include_identity));
  echo_tolerance(opt, out.parameters);

  const PersistenceConfiguration pca = to_persistence_configuration(doc_a);
  const PersistenceConfiguration pcb = to_persistence_configuration(doc_b);

  double distance = 0.0;
  if (opt.metric == "bottleneck") {
    const SymmetryBarcode a = symmetry_barcode(pca, DeathRule::confirmed, opt.include_identity);
    const SymmetryBarcode b = symmetry_barcode(pcb, DeathRule::confirmed, opt.include_identity);
    distance = bottleneck(pca, a, pcb, b);
  } else {
    polybar_metric metric = polybar_metric::expansion;
    if (opt.metric == "S") metric = polybar_metric::sym_diff;
    else if (opt.metric == "E") metric = polybar_metric::expansion;
    else if (opt.metric == "L") metric = polybar_metric::left;
    else if (opt.metric == "I") metric = polybar_metric::interleaving;
    else throw std::invalid_argument("metrics: unknown metric '" + opt.metric + "'");
    const Polybarcode pba = polybarcode(pca, {}, opt.translation_equiv);
    const Polybarcode pbb = polybarcode(pcb, {}, opt.translation_equiv);
    distance = polybarcode_distance(pba, pca, pbb, pcb, metric);
  }

  const bool finite = std::isfinite(distance);
  if (!finite) out.warnings.push_back("the requested distance is infinite");
  out.results.set("metric", JsonValue::of(opt.metric));
  out.results.set("distance", finite ? JsonValue::of(distance) : JsonValue::null());
  out.table.header = {"metric", "distance"};
  out.table.rows.push_back({opt.metric, finite ? format_significant(distance) : "inf"});
  return out;
}

// ---------------------------------------------------------------------------
// defect-sweep
// ---------------------------------------------------------------------------

JsonValue json_defect_record(const DefectRecord& rec) {
  JsonValue jr = JsonValue::object();
  jr.set("kind", JsonValue::of(isometry_kind_name(rec.candidate.kind)));
  jr.set("angle_deg", JsonValue::angle_from_radians(rec.candidate.angle));
  if (rec.candidate.dim() == 3) {
    if (rec.candidate.kind != isometry_kind::reflection)
      jr.set("axis", json_vector(rec.candidate.axis));
    if (rec.candidate.kind != isometry_kind::rotation)
      jr.set("normal", json_vector(rec.candidate.normal));
  }
  jr.set("standard_defect", JsonValue::of(rec.standard_defect));
  jr.set("defect", JsonValue::of(rec.defect));
  jr.set("measure", JsonValue::of(rec.measure));
  jr.set("near_identity", JsonValue::of(rec.near_identity_flag));
  return jr;
}

CommandOutput run_defect_sweep(const Options& opt) {
  CommandOutput out;
  const InputDocument doc = load_document(opt, opt.input);
  out.inputs.push(json_input_document(doc));
  out.parameters.set("input", JsonValue::of(opt.input));
  out.parameters.set("p", JsonValue::of(opt.p));
  out.parameters.set("axes", JsonValue::of(opt.axes));
  out.parameters.set("rotations", JsonValue::of(opt.rotations));
  out.parameters.set("mirrors", JsonValue::of(opt.mirrors));
  out.parameters.set("angles", JsonValue::of(opt.angles));
  echo_tolerance(opt, out.parameters);

  const Configuration x = single_frame(doc, out.warnings);
  const CandidateSet gamma = planar_or_spatial_candidates(x, opt, "defect-sweep");
  const std::vector<DefectRecord> records =
      defect_sweep(x, gamma, opt.p, -1.0, resolve_threads(opt));

  const DefectRecord* best_mirror = nullptr;
  const DefectRecord* best_rotation = nullptr;
  int flagged = 0;
  for (const DefectRecord& rec : records) {
    if (rec.near_identity_flag) ++flagged;
    if (rec.candidate.kind == isometry_kind::reflection) {
      if (!best_mirror || rec.defect < best_mirror->defect) best_mirror = &rec;
    } else if (rec.candidate.kind == isometry_kind::rotation && !rec.near_identity_flag) {
      if (!best_rotation || rec.defect < best_rotation->defect) best_rotation = &rec;
    }
  }
  if (flagged > 0)
    out.warnings.push_back(std::to_string(flagged) +
                           " near-identity rotations flagged and excluded from the "
                           "best-rotation summary");

  const auto best_block = [](const DefectRecord& rec, const char* angle_key) {
    JsonValue jb = JsonValue::object();
    jb.set(angle_key, JsonValue::angle_from_radians(rec.candidate.angle));
    jb.set("defect", JsonValue::of(rec.defect));
    jb.set("standard_defect", JsonValue::of(rec.standard_defect));
    jb.set("measure", JsonValue::of(rec.measure));
    jb.set("candidate", json_isometry(rec.candidate));
    return jb;
  };
  out.results.set("record_count", JsonValue::of(static_cast<int>(records.size())));
  out.results.set("best_mirror",
                  best_mirror ? best_block(*best_mirror, "axis_deg") : JsonValue::null());
  out.results.set("best_rotation",
                  best_rotation ? best_block(*best_rotation, "angle_deg") : JsonValue::null());

  JsonValue rows = JsonValue::array();
  out.table.header = {"kind", "angle_deg", "standard_defect", "defect", "measure",
                      "near_identity"};
  for (const DefectRecord& rec : records) {
    rows.push(json_defect_record(rec));
    out.table.rows.push_back({isometry_kind_name(rec.candidate.kind),
                              format_fixed(to_degrees(rec.candidate.angle)),
                              format_significant(rec.standard_defect),
                              format_significant(rec.defect),
                              format_significant(rec.measure),
                              rec.near_identity_flag ? "true" : "false"});
  }
  out.results.set("records", std::move(rows));
  return out;
}

// ---------------------------------------------------------------------------
// measure-sweep
// ---------------------------------------------------------------------------

CommandOutput run_measure_sweep(const Options& opt) {
  CommandOutput out;
  const InputDocument doc = load_document(opt, opt.input);
  out.inputs.push(json_input_document(doc));
  out.parameters.set("input", JsonValue::of(opt.input));
  out.parameters.set("angles", JsonValue::of(opt.angles));
  echo_tolerance(opt, out.parameters);

  const Configuration x = single_frame(doc, out.warnings);
  if (x.dim() != 2)
    throw std::invalid_argument("measure-sweep: only 2D input is supported");
  if (opt.angles < 1) throw std::invalid_argument("measure-sweep: need at least one angle");

  const Eigen::Vector2d center = centroid(x);
  JsonValue rows = JsonValue::array();
  out.table.header = {"axis_deg", "measure"};
  double best_value = -std::numeric_limits<double>::infinity();
  Isometry best_iso;
  for (int i = 0; i < opt.angles; ++i) {
    const double alpha = pi * i / opt.angles;
    const Isometry iso = make_reflection_2d(alpha, center);
    const double value = measure(x, iso).first;
    if (value > best_value) {
      best_value = value;
      best_iso = iso;
    }
    JsonValue jr = JsonValue::object();
    jr.set("axis_deg", JsonValue::angle_from_radians(alpha));
    jr.set("measure", JsonValue::of(value));
    rows.push(std::move(jr));
    out.table.rows.push_back({format_fixed(to_degrees(alpha)), format_significant(value)});
  }

  const Configuration reflected = apply(best_iso, x);
  JsonValue reflected_points = JsonValue::array();
  for (int i = 0; i < reflected.size(); ++i)
    reflected_points.push(json_vector(reflected.points.col(i)));
  JsonValue best = JsonValue::object();
  best.set("axis_deg", JsonValue::angle_from_radians(best_iso.angle));
  best.set("measure", JsonValue::of(best_value));
  best.set("reflected_points", std::move(reflected_points));

  out.results.set("angle_count", JsonValue::of(opt.angles));
  out.results.set("best", std::move(best));
  out.results.set("records", std::move(rows));
  return out;
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

CommandOutput run_features(const Options& opt) {
  CommandOutput out;
  const InputDocument doc = load_document(opt, opt.input);
  out.inputs.push(json_input_document(doc));
  out.parameters.set("input", JsonValue::of(opt.input));
  out.parameters.set("p", JsonValue::of(opt.p));
  out.parameters.set("axes", JsonValue::of(opt.axes));
  out.parameters.set("rotations", JsonValue::of(opt.rotations));
  out.parameters.set("mirrors", JsonValue::of(opt.mirrors));
  out.parameters.set("angles", JsonValue::of(opt.angles));
  out.parameters.set("radii", json_doubles(opt.radii));
  out.parameters.set("epsilons", json_doubles(opt.epsilons));
  echo_tolerance(opt, out.parameters);

  const Configuration x = single_frame(doc, out.warnings);
  const CandidateSet gamma = planar_or_spatial_candidates(x, opt, "features");
  const FeatureGrid grid = feature_grid(x, opt.radii, opt.epsilons, gamma, opt.p);

  for (int ri : grid.skipped_radii)
    out.warnings.push_back("radius " + format_significant(grid.radii[ri]) +
                           " covers no points and was skipped");

  JsonValue births = JsonValue::array();
  out.table.header = {"candidate_index", "kind", "angle_deg", "radius", "epsilon"};
  for (const auto& [key, epsilon] : grid.births) {
    const auto& [ci, ri] = key;
    const Isometry& candidate = gamma.candidates[ci];
    JsonValue jb = JsonValue::object();
    jb.set("candidate_index", JsonValue::of(ci));
    jb.set("radius_index", JsonValue::of(ri));
    jb.set("radius", JsonValue::of(grid.radii[ri]));
    jb.set("epsilon", JsonValue::of(epsilon));
    jb.set("kind", JsonValue::of(isometry_kind_name(candidate.kind)));
    jb.set("angle_deg", JsonValue::angle_from_radians(candidate.angle));
    births.push(std::move(jb));
    out.table.rows.push_back({std::to_string(ci), isometry_kind_name(candidate.kind),
                              format_fixed(to_degrees(candidate.angle)),
                              format_significant(grid.radii[ri]),
                              format_significant(epsilon)});
  }
  out.results.set("radii", json_doubles(grid.radii));
  out.results.set("thresholds", json_doubles(grid.thresholds));
  out.results.set("skipped_radii", json_ints(grid.skipped_radii));
  out.results.set("births", std::move(births));
  return out;
}

// ---------------------------------------------------------------------------
// degrees
// ---------------------------------------------------------------------------

std::string polynomial_text(const std::map<int, int>& polynomial) {
  std::string out;
  for (const auto& [order, count] : polynomial) {
    if (!out.empty()) out += " + ";
    if (count != 1) out += std::to_string(count);
    out += "t";
    if (order != 1) out += "^" + std::to_string(order);
  }
  return out.empty() ? "0" : out;
}

CommandOutput run_degrees(const Options& opt) {
  CommandOutput out;
  const InputDocument doc = load_document(opt, opt.input);
  out.inputs.push(json_input_document(doc));
  out.parameters.set("input", JsonValue::of(opt.input));
  echo_tolerance(opt, out.parameters);

  const PersistenceConfiguration pc = to_persistence_configuration(doc);
  const WeightedPath path = weighted_path(pc);

  out.table.header = {"row_type", "index", "value"};
  for (size_t i = 0; i < path.vertex_weights.size(); ++i)
    out.table.rows.push_back({"vertex_weight", std::to_string(i),
                              std::to_string(path.vertex_weights[i])});
  for (size_t i = 0; i < path.edge_weights.size(); ++i)
    out.table.rows.push_back({"edge_weight", std::to_string(i),
                              std::to_string(path.edge_weights[i])});

  JsonValue profiles = JsonValue::array();
  for (int t = 0; t < pc.frame_count(); ++t) {
    const DegreeProfile profile = degree_profile(compute_sym_group(pc.frames[t]));
    JsonValue jp = JsonValue::object();
    jp.set("frame", JsonValue::of(t));
    jp.set("degree", JsonValue::of(profile.degree));
    jp.set("entropy", JsonValue::of(profile.entropy));
    JsonValue histogram = JsonValue::array();
    for (const auto& [order, count] : profile.order_histogram) {
      JsonValue jh = JsonValue::object();
      jh.set("order", JsonValue::of(order));
      jh.set("count", JsonValue::of(count));
      histogram.push(std::move(jh));
    }
    jp.set("histogram", std::move(histogram));
    jp.set("polynomial", JsonValue::of(polynomial_text(profile.polynomial)));
    profiles.push(std::move(jp));
  }

  out.results.set("vertex_weights", json_ints(path.vertex_weights));
  out.results.set("edge_weights", json_ints(path.edge_weights));
  out.results.set("profiles", std::move(profiles));
  return out;
}

// ---------------------------------------------------------------------------
// cayley
// ---------------------------------------------------------------------------

CommandOutput run_cayley(const Options& opt) {
  CommandOutput out;
  const InputDocument doc = load_document(opt, opt.input);
  out.inputs.push(json_input_document(doc));
  out.parameters.set("input", JsonValue::of(opt.input));
  echo_tolerance(opt, out.parameters);

  const PersistenceConfiguration pc = to_persistence_configuration(doc);
  const CayleyGraph graph = persistence_cayley(pc, 0, pc.frame_count() - 1);
  const std::vector<double> spectrum = laplacian_spectrum(graph);
  const std::vector<int> components = connected_components(graph);
  const int component_count =
      components.empty() ? 0 : *std::max_element(components.begin(), components.end()) + 1;

  JsonValue vertices = JsonValue::array();
  for (const std::vector<int>& v : graph.vertices) vertices.push(json_perm(v));
  JsonValue generators = JsonValue::array();
  for (const std::vector<int>& s : graph.generators) generators.push(json_perm(s));
  JsonValue adjacency = JsonValue::array();
  for (int i = 0; i < graph.adjacency.rows(); ++i) {
    JsonValue row = JsonValue::array();
    for (int j = 0; j < graph.adjacency.cols(); ++j)
      row.push(JsonValue::of(graph.adjacency(i, j)));
    adjacency.push(std::move(row));
  }

  out.table.header = {"index", "eigenvalue"};
  for (size_t i = 0; i < spectrum.size(); ++i)
    out.table.rows.push_back({std::to_string(i), format_significant(spectrum[i])});

  out.results.set("vertex_count", JsonValue::of(static_cast<int>(graph.vertices.size())));
  out.results.set("generator_count",
                  JsonValue::of(static_cast<int>(graph.generators.size())));
  out.results.set("vertices", std::move(vertices));
  out.results.set("generators", std::move(generators));
  out.results.set("adjacency", std::move(adjacency));
  out.results.set("laplacian_spectrum", json_doubles(spectrum));
  out.results.set("component_count", JsonValue::of(component_count));
  out.results.set("components", json_ints(components));
  return out;
}

// ---------------------------------------------------------------------------
// rep-barcode
// ---------------------------------------------------------------------------

Eigen::MatrixXd perm_matrix(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) p(perm[i], i) = 1.0;
  return p;
}

/// Surviving symmetries of the first frame under the composite bijection.
SymmetryGroup surviving_group(const PersistenceConfiguration& pc) {
  const int last = pc.frame_count() - 1;
  if (last == 0) return compute_sym_group(pc.frames[0]);
  return restricted_sym_group(pc.frames[0], composite_step(pc, 0, last), pc.frames[last]);
}

CommandOutput run_rep_barcode(const Options& opt) {
  CommandOutput out;
  const InputDocument doc = load_document(opt, opt.input);
  out.inputs.push(json_input_document(doc));
  out.parameters.set("input", JsonValue::of(opt.input));
  echo_tolerance(opt, out.parameters);

  const PersistenceConfiguration pc = to_persistence_configuration(doc);
  const int m = pc.frame_count();
  const int n = pc.frames[0].size();

  const SymmetryGroup survivors = surviving_group(pc);
  std::vector<const SymmetryElement*> rotations;
  for (const SymmetryElement& e : survivors.elements)
    if (e.iso.kind == isometry_kind::rotation) rotations.push_back(&e);

  const SymmetryElement* generator = rotations.front();
  int order = 1;
  for (const SymmetryElement* e : rotations) {
    const int candidate_order = element_order(*e);
    if (candidate_order > order) {
      order = candidate_order;
      generator = e;
    }
  }
  if (order < static_cast<int>(rotations.size()))
    out.warnings.push_back(
        "the surviving rotations are not cyclic; analyzing the cyclic subgroup of order " +
        std::to_string(order));

  std::vector<int> dims(m, n);
  std::vector<Eigen::MatrixXd> maps;
  for (const std::vector<int>& step : pc.steps) maps.push_back(perm_matrix(step));
  std::vector<std::vector<Eigen::MatrixXcd>> actions;
  for (int t = 0; t < m; ++t) {
    const std::vector<int> sigma =
        push_forward_perm(composite_step(pc, 0, t), generator->perm);
    actions.push_back({perm_matrix(sigma).cast<std::complex<double>>()});
  }

  const PersistenceRepresentation rep = make_persistence_representation(
      make_abelian_group({order}), make_persistence_module_seq(dims, maps), actions);
  const IrreducibleBarcode barcode = irreducible_barcode(rep);

  JsonValue bars = JsonValue::array();
  out.table.header = {"character", "birth_index", "death_index"};
  for (const auto& [character, intervals] : barcode.bars) {
    JsonValue jc = JsonValue::object();
    jc.set("character", json_ints(character));
    JsonValue jb = JsonValue::array();
    for (const auto& [birth, death] : intervals) {
      JsonValue bar = JsonValue::object();
      bar.set("birth_index", JsonValue::of(birth));
      bar.set("death_index", JsonValue::of(death));
      bar.set("birth", JsonValue::of(pc.grid[birth]));
      bar.set("death", JsonValue::of(pc.grid[death]));
      jb.push(std::move(bar));
      out.table.rows.push_back({std::to_string(character.front()), std::to_string(birth),
                                std::to_string(death)});
    }
    jc.set("intervals", std::move(jb));
    bars.push(std::move(jc));
  }

  JsonValue characters = JsonValue::array();
  for (int x = 0; x < order; ++x) {
    const std::complex<double> chi = persistent_character(rep, 0, m - 1, {x});
    JsonValue jx = JsonValue::object();
    jx.set("element", JsonValue::of(x));
    jx.set("re", JsonValue::of(chi.real()));
    jx.set("im", JsonValue::of(chi.imag()));
    characters.push(std::move(jx));
  }

  out.results.set("group_order", JsonValue::of(order));
  out.results.set("rotation_count", JsonValue::of(static_cast<int>(rotations.size())));
  out.results.set("generator", json_isometry(generator->iso));
  out.results.set("bars", std::move(bars));
  out.results.set("characters", std::move(characters));
  return out;
}

// ---------------------------------------------------------------------------
// fourier-demo
// ---------------------------------------------------------------------------

/// Proper rotations of a group sorted by angle; in the plane these are the
/// successive powers of the minimal rotation.
std::vector<SymmetryElement> sorted_rotations(const SymmetryGroup& g) {
  std::vector<SymmetryElement> out;
  for (const SymmetryElement& e : g.elements)
    if (e.iso.kind == isometry_kind::rotation) out.push_back(e);
  std::sort(out.begin(), out.end(), [](const SymmetryElement& a, const SymmetryElement& b) {
    return a.iso.angle < b.iso.angle;
  });
  return out;
}

double total_displacement(const Configuration& x, const std::vector<int>& perm) {
  double sum = 0.0;
  for (int i = 0; i < x.size(); ++i)
    sum += (x.points.col(perm[i]) - x.points.col(i)).squaredNorm();
  return sum;
}

CommandOutput run_fourier_demo(const Options& opt) {
  CommandOutput out;
  const InputDocument doc = load_document(opt, opt.input);
  out.inputs.push(json_input_document(doc));
  out.parameters.set("input", JsonValue::of(opt.input));
  echo_tolerance(opt, out.parameters);

  const PersistenceConfiguration pc = to_persistence_configuration(doc);
  if (pc.frames[0].dim() != 2)
    throw std::invalid_argument("fourier-demo: only 2D input is supported");
  const int m = pc.frame_count();
  const Configuration& x = pc.frames[0];

  const std::vector<SymmetryElement> target =
      sorted_rotations(compute_sym_group(pc.frames[m - 1]));
  const int target_order = static_cast<int>(target.size());

  std::vector<int> orders;
  std::vector<int> multipliers;
  std::vector<Eigen::VectorXcd> values;

  if (m == 1) {
    orders = {target_order};
    Eigen::VectorXcd theta(target_order);
    for (int j = 0; j < target_order; ++j)
      theta[j] = total_displacement(x, target[j].perm);
    values.push_back(std::move(theta));
  } else {
    const std::vector<int> composite = composite_step(pc, 0, m - 1);
    const std::vector<int> inverse = invert_perm(composite);

    // Surviving rotations whose push-forward is again a rotation; a finite
    // subgroup of SO(2), hence the sorted list walks a single generator.
    std::vector<std::pair<SymmetryElement, int>> source;
    for (const SymmetryElement& e : sorted_rotations(surviving_group(pc))) {
      const std::vector<int> pushed = push_forward_perm(composite, e.perm);
      for (int j = 0; j < target_order; ++j)
        if (target[j].perm == pushed) {
          source.emplace_back(e, j);
          break;
        }
    }
    const int source_order = static_cast<int>(source.size());
    orders = {source_order, target_order};
    multipliers = {source_order > 1 ? source[1].second : 0};

    Eigen::VectorXcd theta0(source_order);
    for (int j = 0; j < source_order; ++j)
      theta0[j] = total_displacement(x, source[j].first.perm);
    Eigen::VectorXcd theta1(target_order);
    for (int j = 0; j < target_order; ++j) {
      const std::vector<int> pulled =
          compose_perm(inverse, compose_perm(target[j].perm, composite));
      theta1[j] = total_displacement(x, pulled);
    }
    values.push_back(std::move(theta0));
    values.push_back(std::move(theta1));
  }

  const CyclicPersistenceGroup chain = make_cyclic_persistence_group(orders, multipliers);
  const PersistentFunction theta = make_persistent_function(chain, values);
  const int last = chain.frame_count() - 1;
  const Spectrum spectrum = persistent_ft(chain, theta, 0, last);
  const SpectralFeatures features = spectral_features(chain, theta, 0, last);

  const Eigen::VectorXcd recovered = inversion(chain, spectrum, 0, last);
  double scale = 1.0;
  for (int i = 0; i < values[0].size(); ++i) scale = std::max(scale, std::abs(values[0][i]));
  if ((recovered - values[0]).cwiseAbs().maxCoeff() > 1e-6 * scale)
    throw numeric_error("fourier-demo: inversion failed to reconstruct the weight function");

  JsonValue theta_rows = JsonValue::array();
  for (const Eigen::VectorXcd& frame : values) {
    JsonValue row = JsonValue::array();
    for (int i = 0; i < frame.size(); ++i) row.push(JsonValue::of(frame[i].real()));
    theta_rows.push(std::move(row));
  }

  JsonValue coefficients = JsonValue::array();
  out.table.header = {"k", "re", "im", "energy"};
  for (size_t k = 0; k < spectrum.coefficients.size(); ++k) {
    JsonValue jc = JsonValue::object();
    jc.set("k", JsonValue::of(static_cast<int>(k)));
    jc.set("re", JsonValue::of(spectrum.coefficients[k].real()));
    jc.set("im", JsonValue::of(spectrum.coefficients[k].imag()));
    jc.set("energy", JsonValue::of(spectrum.energies[k]));
    coefficients.push(std::move(jc));
    out.table.rows.push_back({std::to_string(k),
                              format_significant(spectrum.coefficients[k].real()),
                              format_significant(spectrum.coefficients[k].imag()),
                              format_significant(spectrum.energies[k])});
  }

  JsonValue trajectory = JsonValue::array();
  for (const std::vector<double>& row : features.trajectory)
    trajectory.push(json_doubles(row));

  out.results.set("orders", json_ints(orders));
  out.results.set("multipliers", json_ints(multipliers));
  out.results.set("theta", std::move(theta_rows));
  out.results.set("spectrum", std::move(coefficients));
  out.results.set("entropy", JsonValue::of(spectrum.entropy));
  out.results.set("weights", json_doubles(spectrum.weights));
  out.results.set("dominant_frequencies", json_ints(features.dominant_frequencies));
  out.results.set("trajectory", std::move(trajectory));
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "sym-group",   "barcode",  "polybarcode", "metrics",     "defect-sweep",
      "measure-sweep", "features", "degrees",     "cayley",      "rep-barcode",
      "fourier-demo"};
  return names;
}

void print_usage(std::ostream& os) {
  os << "usage: persym COMMAND INPUT [INPUT_B] [flags]\n"
     << "commands:\n"
     << "  sym-group      symmetry group of a configuration\n"
     << "  barcode        symmetry barcode of a persistence configuration\n"
     << "  polybarcode    per-isometry interval sets over the filtration\n"
     << "  metrics        distance between two documents (--metric S|E|L|I|bottleneck)\n"
     << "  defect-sweep   symmetry defect over a candidate grid\n"
     << "  measure-sweep  symmetry measure over centroid reflection axes\n"
     << "  features       approximate-symmetry birth thresholds over truncations\n"
     << "  degrees        degree-of-symmetry weights and profiles\n"
     << "  cayley         Cayley graph of the surviving symmetries\n"
     << "  rep-barcode    character decomposition of the permutation action\n"
     << "  fourier-demo   spectrum of the displacement weight on surviving rotations\n"
     << "common flags: --tolerance --p --axes --rotations --mirrors --angles --radii\n"
     << "  --epsilons --translation-equiv --include-identity --metric --out --seed\n"
     << "  --format {json,csv} --threads (PERSYM_THREADS as fallback)\n";
}

bool flag_given(const CLI::App* sub, const std::string& name) {
  try {
    return sub->count(name) > 0;
  } catch (const CLI::OptionNotFound&) {
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    print_usage(std::cerr);
    return 64;
  }
  const std::string first = argv[1];
  const auto& names = command_names();
  if (first != "-h" && first != "--help" &&
      std::find(names.begin(), names.end(), first) == names.end()) {
    std::cerr << "unknown command '" << first << "'\n";
    print_usage(std::cerr);
    return 64;
  }

  CLI::App app{"persistent symmetry analysis"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", opt.input, "input document (JSON or CSV)")->required();
    sub->add_option("--tolerance", opt.tolerance, "coordinate tolerance override");
    sub->add_option("--out", opt.out, "write the report to this path");
    sub->add_option("--seed", opt.seed, "seed for randomized sampling");
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", opt.threads, "worker thread count");
    return sub;
  };

  add_common(app.add_subcommand("sym-group", "symmetry group of a configuration"));

  CLI::App* barcode_cmd =
      add_common(app.add_subcommand("barcode", "symmetry barcode over the filtration"));
  barcode_cmd->add_option("--include-identity", opt.include_identity,
                          "also report the identity bar");

  CLI::App* polybarcode_cmd =
      add_common(app.add_subcommand("polybarcode", "per-isometry interval sets"));
  polybarcode_cmd->add_option("--translation-equiv", opt.translation_equiv,
                              "key isometries by their orthogonal part only");

  CLI::App* metrics_cmd =
      add_common(app.add_subcommand("metrics", "distance between two documents"));
  metrics_cmd->add_option("input_b", opt.input_b, "second input document")->required();
  metrics_cmd->add_option("--metric", opt.metric, "distance to evaluate")
      ->check(CLI::IsMember({"S", "E", "L", "I", "bottleneck"}));
  metrics_cmd->add_option("--translation-equiv", opt.translation_equiv,
                          "key isometries by their orthogonal part only");
  metrics_cmd->add_option("--include-identity", opt.include_identity,
                          "include identity bars in bottleneck barcodes");

  CLI::App* defect_cmd =
      add_common(app.add_subcommand("defect-sweep", "symmetry defect over candidates"));
  defect_cmd->add_option("--p", opt.p, "transport exponent");
  defect_cmd->add_option("--axes", opt.axes, "reflection axes (2D) or rotation axes (3D)");
  defect_cmd->add_option("--rotations", opt.rotations, "rotation count (2D)");
  defect_cmd->add_option("--mirrors", opt.mirrors, "mirror normals (3D)");
  defect_cmd->add_option("--angles", opt.angles, "angles per rotation axis (3D)");

  CLI::App* measure_cmd =
      add_common(app.add_subcommand("measure-sweep", "symmetry measure over axes"));
  measure_cmd->add_option("--angles", opt.angles, "axis angles in [0, 180)");

  CLI::App* features_cmd =
      add_common(app.add_subcommand("features", "approximate-symmetry birth thresholds"));
  features_cmd->add_option("--p", opt.p, "transport exponent");
  features_cmd->add_option("--axes", opt.axes, "reflection axes (2D) or rotation axes (3D)");
  features_cmd->add_option("--rotations", opt.rotations, "rotation count (2D)");
  features_cmd->add_option("--mirrors", opt.mirrors, "mirror normals (3D)");
  features_cmd->add_option("--angles", opt.angles, "angles per rotation axis (3D)");
  features_cmd->add_option("--radii", opt.radii, "truncation radii")
      ->required()
      ->delimiter(',');
  features_cmd->add_option("--epsilons", opt.epsilons, "defect thresholds")
      ->required()
      ->delimiter(',');

  add_common(app.add_subcommand("degrees", "degree-of-symmetry weights and profiles"));
  add_common(app.add_subcommand("cayley", "Cayley graph of the surviving symmetries"));
  add_common(app.add_subcommand("rep-barcode", "character decomposition of the action"));
  add_common(app.add_subcommand("fourier-demo", "spectrum of the displacement weight"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  opt.tolerance_set = flag_given(sub, "--tolerance");
  opt.seed_set = flag_given(sub, "--seed");
  opt.threads_set = flag_given(sub, "--threads");

  try {
    CommandOutput out;
    if (command == "sym-group") out = run_sym_group(opt);
    else if (command == "barcode") out = run_barcode(opt);
    else if (command == "polybarcode") out = run_polybarcode(opt);
    else if (command == "metrics") out = run_metrics(opt);
    else if (command == "defect-sweep") out = run_defect_sweep(opt);
    else if (command == "measure-sweep") out = run_measure_sweep(opt);
    else if (command == "features") out = run_features(opt);
    else if (command == "degrees") out = run_degrees(opt);
    else if (command == "cayley") out = run_cayley(opt);
    else if (command == "rep-barcode") out = run_rep_barcode(opt);
    else out = run_fourier_demo(opt);

    echo_common(opt, out.parameters);
    const std::string payload =
        opt.format == "csv"
            ? dump_csv(out.table)
            : dump_json(make_report(command, std::move(out.inputs), std::move(out.parameters),
                                    std::move(out.results), out.warnings));
    if (opt.out.empty()) {
      std::cout << payload;
    } else {
      std::ofstream file(opt.out, std::ios::binary);
      if (!file) throw std::invalid_argument("cannot open output file: " + opt.out);
      file << payload;
    }
    return 0;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
