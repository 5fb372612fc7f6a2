#pragma once

// Input documents and report serialization for the command line front end.
// JSON is the canonical interchange; CSV covers flat ingestion and
// plot-ready export.  Reports carry floating point values with 12
// significant digits, angles in degrees with 6 decimals, and object keys in
// a fixed order, so identical invocations produce byte-identical documents.

#include <persym/persistence.hpp>

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace persym {

// ---------------------------------------------------------------------------
// Number and string formatting
// ---------------------------------------------------------------------------

inline std::string format_significant(double x) {
  if (std::isnan(x) || std::isinf(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::string format_fixed(double x, int decimals = 6) {
  if (std::isnan(x) || std::isinf(x)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
  return buf;
}

inline double to_degrees(double radians) { return radians * 180.0 / pi; }

inline std::string escape_json(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic JSON emission
// ---------------------------------------------------------------------------

/// Write-only JSON tree.  Objects remember insertion order, numbers print
/// with 12 significant digits, and angle nodes print as fixed six-decimal
/// degrees, which pins the byte-level layout of every report.
struct JsonValue {
  enum class kind { null_value, boolean, integer, number, angle, string, array, object };

  kind k = kind::null_value;
  bool flag = false;
  long long whole = 0;
  double value = 0.0;
  std::string text;
  std::vector<JsonValue> items;
  std::vector<std::pair<std::string, JsonValue>> fields;

  static JsonValue null() { return JsonValue{}; }
  static JsonValue of(bool b) {
    JsonValue v;
    v.k = kind::boolean;
    v.flag = b;
    return v;
  }
  static JsonValue of(int i) { return of(static_cast<long long>(i)); }
  static JsonValue of(long long i) {
    JsonValue v;
    v.k = kind::integer;
    v.whole = i;
    return v;
  }
  static JsonValue of(double d) {
    JsonValue v;
    v.k = kind::number;
    v.value = d;
    return v;
  }
  static JsonValue of(const char* s) { return of(std::string(s)); }
  static JsonValue of(std::string s) {
    JsonValue v;
    v.k = kind::string;
    v.text = std::move(s);
    return v;
  }
  /// Angle given in radians, printed as degrees with six decimals.
  static JsonValue angle_from_radians(double radians) {
    JsonValue v;
    v.k = kind::angle;
    v.value = to_degrees(radians);
    return v;
  }
  static JsonValue array() {
    JsonValue v;
    v.k = kind::array;
    return v;
  }
  static JsonValue object() {
    JsonValue v;
    v.k = kind::object;
    return v;
  }

  JsonValue& push(JsonValue v) {
    items.push_back(std::move(v));
    return *this;
  }
  JsonValue& set(std::string key, JsonValue v) {
    fields.emplace_back(std::move(key), std::move(v));
    return *this;
  }
  bool scalar() const { return k != kind::array && k != kind::object; }
};

namespace detail {

inline void dump_json(const JsonValue& v, std::string& out, int depth) {
  const auto indent = [&](int d) { out.append(static_cast<size_t>(2 * d), ' '); };
  switch (v.k) {
    case JsonValue::kind::null_value: out += "null"; return;
    case JsonValue::kind::boolean: out += v.flag ? "true" : "false"; return;
    case JsonValue::kind::integer: out += std::to_string(v.whole); return;
    case JsonValue::kind::number: out += format_significant(v.value); return;
    case JsonValue::kind::angle: out += format_fixed(v.value, 6); return;
    case JsonValue::kind::string:
      out += '"';
      out += escape_json(v.text);
      out += '"';
      return;
    case JsonValue::kind::array: {
      if (v.items.empty()) {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const JsonValue& item : v.items) flat = flat && item.scalar();
      if (flat) {
        out += '[';
        for (size_t i = 0; i < v.items.size(); ++i) {
          if (i) out += ", ";
          dump_json(v.items[i], out, depth + 1);
        }
        out += ']';
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < v.items.size(); ++i) {
        indent(depth + 1);
        dump_json(v.items[i], out, depth + 1);
        if (i + 1 < v.items.size()) out += ',';
        out += '\n';
      }
      indent(depth);
      out += ']';
      return;
    }
    case JsonValue::kind::object: {
      if (v.fields.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      for (size_t i = 0; i < v.fields.size(); ++i) {
        indent(depth + 1);
        out += '"';
        out += escape_json(v.fields[i].first);
        out += "\": ";
        dump_json(v.fields[i].second, out, depth + 1);
        if (i + 1 < v.fields.size()) out += ',';
        out += '\n';
      }
      indent(depth);
      out += '}';
      return;
    }
  }
}

}  // namespace detail

inline std::string dump_json(const JsonValue& v) {
  std::string out;
  detail::dump_json(v, out, 0);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Domain serializers
// ---------------------------------------------------------------------------

inline JsonValue json_vector(const Eigen::VectorXd& v) {
  JsonValue out = JsonValue::array();
  for (int i = 0; i < v.size(); ++i) out.push(JsonValue::of(v[i]));
  return out;
}

inline JsonValue json_matrix(const Eigen::MatrixXd& m) {
  JsonValue out = JsonValue::array();
  for (int i = 0; i < m.rows(); ++i) out.push(json_vector(m.row(i).transpose()));
  return out;
}

inline JsonValue json_perm(const std::vector<int>& p) {
  JsonValue out = JsonValue::array();
  for (int i : p) out.push(JsonValue::of(i));
  return out;
}

inline const char* isometry_kind_name(isometry_kind k) {
  switch (k) {
    case isometry_kind::rotation: return "rotation";
    case isometry_kind::reflection: return "reflection";
    case isometry_kind::rotoreflection: return "rotoreflection";
  }
  return "rotation";
}

inline JsonValue json_isometry(const Isometry& iso) {
  JsonValue out = JsonValue::object();
  out.set("kind", JsonValue::of(isometry_kind_name(iso.kind)));
  if (iso.dim() >= 2) out.set("angle_deg", JsonValue::angle_from_radians(iso.angle));
  if (iso.dim() == 3) {
    if (iso.kind != isometry_kind::reflection)
      out.set("axis", json_vector(iso.axis));
    if (iso.kind != isometry_kind::rotation)
      out.set("normal", json_vector(iso.normal));
  }
  out.set("matrix", json_matrix(iso.linear));
  out.set("translation", json_vector(iso.translation));
  return out;
}

// ---------------------------------------------------------------------------
// Input documents
// ---------------------------------------------------------------------------

struct InputFrame {
  double t = 0.0;
  std::vector<std::string> labels;
  Eigen::MatrixXd points;  // k x n

  int size() const { return static_cast<int>(points.cols()); }
};

/// Correspondence between consecutive frames, kept both as the full label
/// map (ordered by the source frame's labels) and as the resolved index
/// bijection perm[i] = target index of source point i.
struct InputStep {
  int from_frame = 0;
  std::vector<std::pair<std::string, std::string>> map;
  std::vector<int> perm;
};

struct InputDocument {
  int dimension = 0;
  std::optional<double> tolerance;
  std::vector<InputFrame> frames;
  std::vector<InputStep> steps;
  bool steps_declared = false;

  int frame_count() const { return static_cast<int>(frames.size()); }
};

namespace detail {

struct StepSpec {
  double from_t = 0.0;
  double to_t = 0.0;
  std::map<std::string, std::string> map;
};

inline int find_label(const std::vector<std::string>& labels, const std::string& l) {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == l) return static_cast<int>(i);
  return -1;
}

inline InputStep resolve_step(const InputDocument& doc, int from, const StepSpec* spec) {
  const InputFrame& a = doc.frames[from];
  const InputFrame& b = doc.frames[from + 1];
  if (a.size() != b.size())
    throw std::invalid_argument("input steps: consecutive frames must have equal size");
  InputStep out;
  out.from_frame = from;
  out.perm.resize(a.labels.size());
  std::vector<char> hit(b.labels.size(), 0);
  for (size_t i = 0; i < a.labels.size(); ++i) {
    std::string target = a.labels[i];
    if (spec) {
      auto it = spec->map.find(a.labels[i]);
      if (it != spec->map.end()) target = it->second;
    }
    const int j = find_label(b.labels, target);
    if (j < 0)
      throw std::invalid_argument("input steps: label '" + target +
                                  "' is not present in the target frame");
    if (hit[j])
      throw std::invalid_argument("input steps: step map is not a bijection");
    hit[j] = 1;
    out.perm[i] = j;
    out.map.emplace_back(a.labels[i], target);
  }
  if (spec)
    for (const auto& [key, value] : spec->map)
      if (find_label(a.labels, key) < 0)
        throw std::invalid_argument("input steps: label '" + key +
                                    "' is not present in the source frame");
  return out;
}

/// Materialize one step per consecutive frame pair, matching declared specs
/// by their frame parameters and defaulting to the identity on labels.
inline void attach_steps(InputDocument& doc, const std::vector<StepSpec>& specs) {
  doc.steps.clear();
  if (doc.frame_count() < 2) {
    if (!specs.empty())
      throw std::invalid_argument("input steps: steps listed for a single-frame document");
    return;
  }
  std::vector<const StepSpec*> chosen(doc.frames.size() - 1, nullptr);
  for (const StepSpec& spec : specs) {
    int from = -1;
    for (int i = 0; i + 1 < doc.frame_count(); ++i)
      if (doc.frames[i].t == spec.from_t) from = i;
    if (from < 0 || doc.frames[from + 1].t != spec.to_t)
      throw std::invalid_argument("input steps: from_t/to_t must name consecutive frames");
    if (chosen[from])
      throw std::invalid_argument("input steps: duplicate step for one frame pair");
    chosen[from] = &spec;
  }
  for (int i = 0; i + 1 < doc.frame_count(); ++i)
    doc.steps.push_back(resolve_step(doc, i, chosen[i]));
}

inline void validate_frames(const InputDocument& doc) {
  if (doc.frames.empty()) throw std::invalid_argument("input: need at least one frame");
  for (const InputFrame& f : doc.frames) {
    if (f.size() < 1) throw std::invalid_argument("input: frames must contain points");
    if (f.points.rows() != doc.dimension)
      throw std::invalid_argument("input: point dimension must match the document dimension");
    std::vector<std::string> sorted = f.labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("input: labels must be unique within a frame");
  }
  for (int i = 1; i < doc.frame_count(); ++i)
    if (!(doc.frames[i - 1].t < doc.frames[i].t))
      throw std::invalid_argument("input: frame parameters must be strictly increasing");
  if (doc.frame_count() > 1) {
    const int n = doc.frames.front().size();
    for (const InputFrame& f : doc.frames)
      if (f.size() != n)
        throw std::invalid_argument("input: frames must have equal size");
  }
}

inline double require_number(const nlohmann::json& j, const char* who) {
  if (!j.is_number()) throw std::invalid_argument(std::string(who) + ": expected a number");
  return j.get<double>();
}

}  // namespace detail

inline InputDocument parse_input_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("input json: document must be an object");
  InputDocument doc;
  if (!j.contains("dimension") || !j["dimension"].is_number_integer())
    throw std::invalid_argument("input json: missing integer field 'dimension'");
  doc.dimension = j["dimension"].get<int>();
  if (doc.dimension < 1 || doc.dimension > 3)
    throw std::invalid_argument("input json: dimension must be 1, 2 or 3");
  if (j.contains("tolerance")) {
    const double tol = detail::require_number(j["tolerance"], "input json tolerance");
    if (tol < 0.0) throw std::invalid_argument("input json: tolerance must be nonnegative");
    doc.tolerance = tol;
  }
  if (!j.contains("frames") || !j["frames"].is_array() || j["frames"].empty())
    throw std::invalid_argument("input json: missing nonempty array 'frames'");
  for (const nlohmann::json& jf : j["frames"]) {
    if (!jf.is_object() || !jf.contains("t") || !jf.contains("points"))
      throw std::invalid_argument("input json: frames need fields 't' and 'points'");
    InputFrame frame;
    frame.t = detail::require_number(jf["t"], "input json frame t");
    const nlohmann::json& pts = jf["points"];
    if (!pts.is_array() || pts.empty())
      throw std::invalid_argument("input json: frame points must be a nonempty array");
    frame.points.resize(doc.dimension, static_cast<int>(pts.size()));
    int col = 0;
    for (const nlohmann::json& jp : pts) {
      if (!jp.is_object() || !jp.contains("label") || !jp.contains("coords") ||
          !jp["label"].is_string() || !jp["coords"].is_array())
        throw std::invalid_argument("input json: points need a string label and coords array");
      frame.labels.push_back(jp["label"].get<std::string>());
      const nlohmann::json& coords = jp["coords"];
      if (static_cast<int>(coords.size()) != doc.dimension)
        throw std::invalid_argument("input json: coords length must equal the dimension");
      for (int r = 0; r < doc.dimension; ++r)
        frame.points(r, col) = detail::require_number(coords[r], "input json coordinate");
      ++col;
    }
    doc.frames.push_back(std::move(frame));
  }
  detail::validate_frames(doc);
  std::vector<detail::StepSpec> specs;
  if (j.contains("steps")) {
    if (!j["steps"].is_array())
      throw std::invalid_argument("input json: steps must be an array");
    doc.steps_declared = true;
    for (const nlohmann::json& js : j["steps"]) {
      if (!js.is_object() || !js.contains("from_t") || !js.contains("to_t"))
        throw std::invalid_argument("input json: steps need fields 'from_t' and 'to_t'");
      detail::StepSpec spec;
      spec.from_t = detail::require_number(js["from_t"], "input json step from_t");
      spec.to_t = detail::require_number(js["to_t"], "input json step to_t");
      if (js.contains("map")) {
        if (!js["map"].is_object())
          throw std::invalid_argument("input json: step map must be an object");
        for (auto it = js["map"].begin(); it != js["map"].end(); ++it) {
          if (!it.value().is_string())
            throw std::invalid_argument("input json: step map values must be labels");
          spec.map[it.key()] = it.value().get<std::string>();
        }
      }
      specs.push_back(std::move(spec));
    }
  }
  detail::attach_steps(doc, specs);
  return doc;
}

inline InputDocument parse_input_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("input json: ") + e.what());
  }
  return parse_input_json(j);
}

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(trim(field));
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

/// CSV convenience ingestion.  Rows are label,x[,y[,z]] with an optional
/// trailing frame column; a header row naming columns (label, x, y, z,
/// frame) is recognized when its second field is not a number.  Rows
/// sharing a frame value form one frame, ordered by that value; steps
/// default to the identity on labels.  '#' lines and blank lines are
/// skipped.
inline InputDocument parse_input_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    rows.push_back(detail::split_csv_line(line));
  }
  if (rows.empty()) throw std::invalid_argument("input csv: no data rows");

  int label_col = 0;
  std::vector<int> coord_cols;
  int frame_col = -1;
  size_t width = rows.front().size();
  size_t first_data = 0;

  double probe = 0.0;
  const bool has_header = width >= 2 && !detail::parse_double(rows[0][1], probe);
  if (has_header) {
    label_col = -1;
    int x = -1, y = -1, z = -1;
    for (size_t c = 0; c < width; ++c) {
      const std::string name = detail::lower(rows[0][c]);
      if (name == "label") label_col = static_cast<int>(c);
      else if (name == "x") x = static_cast<int>(c);
      else if (name == "y") y = static_cast<int>(c);
      else if (name == "z") z = static_cast<int>(c);
      else if (name == "frame") frame_col = static_cast<int>(c);
      else throw std::invalid_argument("input csv: unknown column '" + rows[0][c] + "'");
    }
    if (label_col < 0 || x < 0)
      throw std::invalid_argument("input csv: header needs 'label' and 'x' columns");
    if (z >= 0 && y < 0)
      throw std::invalid_argument("input csv: column 'z' requires column 'y'");
    coord_cols.push_back(x);
    if (y >= 0) coord_cols.push_back(y);
    if (z >= 0) coord_cols.push_back(z);
    first_data = 1;
  } else {
    if (width < 2 || width > 5)
      throw std::invalid_argument("input csv: rows must have 2 to 5 columns");
    const int coords = width == 5 ? 3 : static_cast<int>(width) - 1;
    for (int c = 0; c < coords; ++c) coord_cols.push_back(1 + c);
    if (width == 5) frame_col = 4;
  }

  struct Row {
    std::string label;
    Eigen::VectorXd coords;
    double frame = 0.0;
  };
  std::vector<Row> data;
  for (size_t r = first_data; r < rows.size(); ++r) {
    if (rows[r].size() != width)
      throw std::invalid_argument("input csv: inconsistent column count");
    Row row;
    row.label = rows[r][static_cast<size_t>(label_col)];
    row.coords.resize(static_cast<int>(coord_cols.size()));
    for (size_t c = 0; c < coord_cols.size(); ++c)
      if (!detail::parse_double(rows[r][static_cast<size_t>(coord_cols[c])], row.coords[static_cast<int>(c)]))
        throw std::invalid_argument("input csv: invalid number '" +
                                    rows[r][static_cast<size_t>(coord_cols[c])] + "'");
    if (frame_col >= 0 && !detail::parse_double(rows[r][static_cast<size_t>(frame_col)], row.frame))
      throw std::invalid_argument("input csv: invalid frame value");
    data.push_back(std::move(row));
  }
  if (data.empty()) throw std::invalid_argument("input csv: no data rows");

  std::vector<double> grid;
  for (const Row& row : data) grid.push_back(row.frame);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  InputDocument doc;
  doc.dimension = static_cast<int>(coord_cols.size());
  for (double t : grid) {
    InputFrame frame;
    frame.t = t;
    std::vector<Eigen::VectorXd> pts;
    for (const Row& row : data)
      if (row.frame == t) {
        frame.labels.push_back(row.label);
        pts.push_back(row.coords);
      }
    frame.points.resize(doc.dimension, static_cast<int>(pts.size()));
    for (size_t i = 0; i < pts.size(); ++i) frame.points.col(static_cast<int>(i)) = pts[i];
    doc.frames.push_back(std::move(frame));
  }
  detail::validate_frames(doc);
  detail::attach_steps(doc, {});
  return doc;
}

inline InputDocument load_input_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::string ext;
  const size_t dot = path.rfind('.');
  if (dot != std::string::npos) ext = detail::lower(path.substr(dot + 1));
  if (ext == "json") return parse_input_json(text);
  if (ext == "csv") return parse_input_csv(text);
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' ? parse_input_json(text) : parse_input_csv(text);
  }
  throw std::invalid_argument("input file is empty: " + path);
}

// ---------------------------------------------------------------------------
// Document echo and conversion
// ---------------------------------------------------------------------------

/// Canonical JSON form of a document; parsing the echo reproduces the same
/// frames, steps and tolerance.
inline JsonValue json_input_document(const InputDocument& doc) {
  JsonValue out = JsonValue::object();
  out.set("dimension", JsonValue::of(doc.dimension));
  if (doc.tolerance) out.set("tolerance", JsonValue::of(*doc.tolerance));
  JsonValue frames = JsonValue::array();
  for (const InputFrame& f : doc.frames) {
    JsonValue jf = JsonValue::object();
    jf.set("t", JsonValue::of(f.t));
    JsonValue pts = JsonValue::array();
    for (int i = 0; i < f.size(); ++i) {
      JsonValue jp = JsonValue::object();
      jp.set("label", JsonValue::of(f.labels[i]));
      jp.set("coords", json_vector(f.points.col(i)));
      pts.push(std::move(jp));
    }
    jf.set("points", std::move(pts));
    frames.push(std::move(jf));
  }
  out.set("frames", std::move(frames));
  if (doc.steps_declared) {
    JsonValue steps = JsonValue::array();
    for (const InputStep& s : doc.steps) {
      JsonValue js = JsonValue::object();
      js.set("from_t", JsonValue::of(doc.frames[s.from_frame].t));
      js.set("to_t", JsonValue::of(doc.frames[s.from_frame + 1].t));
      JsonValue map = JsonValue::object();
      for (const auto& [from, to] : s.map) map.set(from, JsonValue::of(to));
      js.set("map", std::move(map));
      steps.push(std::move(js));
    }
    out.set("steps", std::move(steps));
  }
  return out;
}

inline Configuration frame_configuration(const InputDocument& doc, int index) {
  if (index < 0 || index >= doc.frame_count())
    throw std::out_of_range("frame_configuration: frame index out of range");
  const InputFrame& f = doc.frames[index];
  return make_configuration(f.points, f.labels, doc.tolerance.value_or(-1.0));
}

inline PersistenceConfiguration to_persistence_configuration(const InputDocument& doc) {
  std::vector<double> grid;
  std::vector<Configuration> frames;
  for (int i = 0; i < doc.frame_count(); ++i) {
    grid.push_back(doc.frames[i].t);
    frames.push_back(frame_configuration(doc, i));
  }
  std::vector<std::vector<int>> steps;
  for (const InputStep& s : doc.steps) steps.push_back(s.perm);
  return make_persistence_configuration(std::move(grid), std::move(frames), std::move(steps));
}

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::string dump_csv(const CsvTable& table) {
  std::string out;
  const auto emit = [&](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline JsonValue make_report(const std::string& command, JsonValue inputs, JsonValue parameters,
                             JsonValue results, const std::vector<std::string>& warnings) {
  JsonValue out = JsonValue::object();
  out.set("command", JsonValue::of(command));
  out.set("inputs", std::move(inputs));
  out.set("parameters", std::move(parameters));
  out.set("results", std::move(results));
  JsonValue w = JsonValue::array();
  for (const std::string& s : warnings) w.push(JsonValue::of(s));
  out.set("warnings", std::move(w));
  return out;
}

}  // namespace persym
