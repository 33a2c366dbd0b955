#include "graver_opt/document.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "graver_opt/linalg.hpp"
#include "graver_opt/oracle.hpp"

namespace graver_opt {

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::kParse, what); }

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) schema_error(std::string("expected an object holding '") + key + "'");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(std::string("missing field '") + key + "'");
  return *it;
}

const Json* optional_field(const Json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

const Json& array_field(const Json& obj, const char* key) {
  const Json& j = field(obj, key);
  if (!j.is_array()) schema_error(std::string("field '") + key + "' must be an array");
  return j;
}

std::size_t size_from_json(const Json& j) {
  const Int v = int_from_json(j);
  if (sgn(v) < 0 || !v.fits_ulong_p()) schema_error("expected a nonnegative size");
  return v.get_ui();
}

std::size_t size_field(const Json& obj, const char* key) { return size_from_json(field(obj, key)); }

std::vector<IntVec> int_rows_from_json(const Json& j) {
  if (!j.is_array()) schema_error("expected an array of arrays");
  std::vector<IntVec> out;
  for (const Json& row : j) out.push_back(int_vec_from_json(row));
  return out;
}

std::vector<RatVec> rat_rows_from_json(const Json& j) {
  if (!j.is_array()) schema_error("expected an array of arrays");
  std::vector<RatVec> out;
  for (const Json& row : j) out.push_back(rat_vec_from_json(row));
  return out;
}

std::vector<std::vector<Univariate>> function_rows_from_json(const Json& j) {
  if (!j.is_array()) schema_error("expected an array of function arrays");
  std::vector<std::vector<Univariate>> out;
  for (const Json& row : j) {
    if (!row.is_array()) schema_error("expected an array of functions");
    std::vector<Univariate> fs;
    for (const Json& f : row) fs.push_back(univariate_from_json(f));
    out.push_back(std::move(fs));
  }
  return out;
}

Json rows_json(const std::vector<IntVec>& rows) {
  Json out = Json::array();
  for (const IntVec& r : rows) out.push_back(to_json(std::span<const Int>(r)));
  return out;
}

Json rows_json(const std::vector<RatVec>& rows) {
  Json out = Json::array();
  for (const RatVec& r : rows) out.push_back(to_json(std::span<const Rat>(r)));
  return out;
}

Json rows_json(const std::vector<std::vector<Univariate>>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json fs = Json::array();
    for (const Univariate& f : r) fs.push_back(to_json(f));
    out.push_back(std::move(fs));
  }
  return out;
}

// Integer or per-entry caps: a scalar or a rows x cols array.
std::vector<IntVec> caps_from_json(const Json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array()) return std::vector<IntVec>(rows, IntVec(cols, int_from_json(j)));
  std::vector<IntVec> out = int_rows_from_json(j);
  if (out.size() != rows) schema_error("caps must have one row per block");
  for (const IntVec& r : out)
    if (r.size() != cols) schema_error("caps row length");
  return out;
}

const std::set<std::string>& known_kinds() {
  static const std::set<std::string> kinds{"ip",    "lp",           "nfold",        "twostage",
                                           "transportation", "table3", "hierarchical", "decode"};
  return kinds;
}

bool is_nfold_model(const std::string& kind) {
  return kind == "nfold" || kind == "transportation" || kind == "table3" || kind == "hierarchical";
}

// Installs a {"kind": "separable", "f": [[...]], "linear": [[...]]} objective.
void apply_separable(NFoldInstance& inst, const Json& obj) {
  if (obj.is_null() || obj.empty()) return;
  const Json& kind = field(obj, "kind");
  if (kind != "separable") schema_error("model objectives have kind 'separable'");
  if (const Json* f = optional_field(obj, "f")) set_separable(inst, function_rows_from_json(*f));
  if (const Json* lin = optional_field(obj, "linear")) inst.linear = rat_rows_from_json(*lin);
}

}  // namespace

// ---------------------------------------------------------------------------
// Scalars

Int int_from_json(const Json& j) {
  if (j.is_number_unsigned()) return Int(std::to_string(j.get<std::uint64_t>()));
  if (j.is_number_integer()) return Int(static_cast<long>(j.get<std::int64_t>()));
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    const std::size_t start = (!s.empty() && s[0] == '-') ? 1 : 0;
    if (s.size() == start || !std::all_of(s.begin() + static_cast<std::ptrdiff_t>(start), s.end(),
                                          [](char c) { return c >= '0' && c <= '9'; })) {
      schema_error("not an integer: '" + s + "'");
    }
    return Int(s);
  }
  schema_error("expected an integer, got " + j.dump());
}

Rat rat_from_json(const Json& j) {
  if (j.is_string()) return parse_rat(j.get<std::string>());
  return Rat(int_from_json(j));
}

Json to_json(const Int& x) {
  if (x.fits_slong_p()) return Json(static_cast<std::int64_t>(x.get_si()));
  return Json(x.get_str());
}

Json to_json(const Rat& q) { return Json(to_string(q)); }

IntVec int_vec_from_json(const Json& j) {
  if (!j.is_array()) schema_error("expected an integer array");
  IntVec out;
  for (const Json& x : j) out.push_back(int_from_json(x));
  return out;
}

RatVec rat_vec_from_json(const Json& j) {
  if (!j.is_array()) schema_error("expected a rational array");
  RatVec out;
  for (const Json& x : j) out.push_back(rat_from_json(x));
  return out;
}

Json to_json(std::span<const Int> v) {
  Json out = Json::array();
  for (const Int& x : v) out.push_back(to_json(x));
  return out;
}

// Integral entries print as integers, the rest as "p/q".
Json to_json(std::span<const Rat> v) {
  Json out = Json::array();
  for (const Rat& x : v) out.push_back(x.get_den() == 1 ? to_json(Int(x.get_num())) : to_json(x));
  return out;
}

IntMat int_mat_from_json(const Json& j, std::size_t cols) {
  std::vector<IntVec> rows = int_rows_from_json(j);
  for (const IntVec& r : rows)
    if (r.size() != cols) schema_error("matrix rows must have " + std::to_string(cols) + " entries");
  return IntMat::from_rows(rows, cols);
}

Json to_json(const IntMat& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(to_json(m.row(r)));
  return out;
}

// ---------------------------------------------------------------------------
// Objectives

Univariate univariate_from_json(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "zero") return Univariate::zero();
  if (kind == "poly") return Univariate::poly(rat_vec_from_json(array_field(j, "coeffs")));
  if (kind == "abs_power") {
    const Json& e = field(j, "exponent");
    if (e.is_string() && e.get<std::string>().find('/') != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "fractional exponents are not supported");
    }
    const Int exponent = int_from_json(e);
    if (exponent < 1 || !exponent.fits_ulong_p()) {
      throw Error(ErrorCode::kInvalidArgument, "exponent must be a positive integer");
    }
    const Json* scale = optional_field(j, "scale");
    const Json* shift = optional_field(j, "shift");
    return Univariate::abs_power(scale ? int_from_json(*scale) : Int(1), exponent.get_ui(),
                                 shift ? int_from_json(*shift) : Int(0));
  }
  if (kind == "table") {
    std::vector<std::pair<Int, Rat>> pts;
    for (const Json& p : array_field(j, "points")) {
      if (!p.is_array() || p.size() != 2) schema_error("table points are [x, value] pairs");
      pts.emplace_back(int_from_json(p[0]), rat_from_json(p[1]));
    }
    return Univariate::table(std::move(pts));
  }
  schema_error("unknown function kind '" + kind + "'");
}

Json to_json(const Univariate& f) {
  switch (f.kind()) {
    case Univariate::Kind::kZero:
      return Json{{"kind", "zero"}};
    case Univariate::Kind::kPoly:
      return Json{{"kind", "poly"}, {"coeffs", to_json(std::span<const Rat>(f.coeffs()))}};
    case Univariate::Kind::kAbsPower:
      return Json{{"kind", "abs_power"},
                  {"scale", to_json(f.scale())},
                  {"exponent", static_cast<std::uint64_t>(f.exponent())},
                  {"shift", to_json(f.shift())}};
    case Univariate::Kind::kTable: {
      Json pts = Json::array();
      for (const auto& [x, v] : f.points()) pts.push_back(Json::array({to_json(x), to_json(v)}));
      return Json{{"kind", "table"}, {"points", pts}};
    }
    case Univariate::Kind::kCallback:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "callback functions cannot be serialized");
}

Objective objective_from_json(const Json& j, std::size_t dim) {
  if (j.is_null() || j.empty()) return Objective::linear(RatVec(dim));
  const std::string kind = field(j, "kind").get<std::string>();
  RatVec c(dim);
  if (const Json* cj = optional_field(j, "c")) {
    c = rat_vec_from_json(*cj);
    if (c.size() != dim) schema_error("objective vector length");
  }
  if (kind == "linear") return Objective::linear(std::move(c));
  if (kind != "composite") schema_error("objective kind must be 'linear' or 'composite'");
  std::vector<ObjectiveRow> rows;
  if (const Json* rj = optional_field(j, "rows")) {
    for (const Json& row : *rj) {
      IntVec coeffs = int_vec_from_json(field(row, "coeffs"));
      if (coeffs.size() != dim) schema_error("objective row length");
      rows.push_back({std::move(coeffs), univariate_from_json(field(row, "f"))});
    }
  }
  return Objective::composite(std::move(c), std::move(rows));
}

Json to_json(const Objective& obj) {
  Json out{{"c", to_json(std::span<const Rat>(obj.linear_part()))}};
  if (obj.is_linear()) {
    out["kind"] = "linear";
    return out;
  }
  out["kind"] = "composite";
  Json rows = Json::array();
  for (const ObjectiveRow& r : obj.rows()) {
    rows.push_back(Json{{"coeffs", to_json(std::span<const Int>(r.coeffs))}, {"f", to_json(r.f)}});
  }
  out["rows"] = std::move(rows);
  return out;
}

// ---------------------------------------------------------------------------
// Documents

InstanceDocument parse_document(const Json& j) {
  if (!j.is_object()) schema_error("document must be a JSON object");
  InstanceDocument doc;
  const Int version = int_from_json(field(j, "format_version"));
  if (version != kFormatVersion) schema_error("unsupported format_version " + version.get_str());
  const Json& kind = field(j, "kind");
  if (!kind.is_string() || !known_kinds().contains(kind.get<std::string>())) {
    schema_error("unknown document kind " + kind.dump());
  }
  doc.kind = kind.get<std::string>();
  doc.payload = field(j, "payload");
  if (!doc.payload.is_object()) schema_error("payload must be an object");
  if (const Json* obj = optional_field(j, "objective")) {
    if (!obj->is_object()) schema_error("objective must be an object");
    doc.objective = *obj;
  }
  if (const Json* meta = optional_field(j, "meta")) {
    if (!meta->is_object()) schema_error("meta must be an object");
    doc.meta = *meta;
  }
  return doc;
}

InstanceDocument parse_document_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    schema_error(std::string("malformed JSON: ") + e.what());
  }
  return parse_document(j);
}

Json to_json(const InstanceDocument& doc) {
  Json out{{"format_version", doc.format_version},
           {"kind", doc.kind},
           {"payload", doc.payload},
           {"objective", doc.objective}};
  if (!doc.meta.empty()) out["meta"] = doc.meta;
  return out;
}

FeasibleBox box_from_document(const InstanceDocument& doc) {
  if (doc.kind != "ip" && doc.kind != "lp") schema_error("expected an ip or lp document");
  const Json& p = doc.payload;
  const Json& aj = array_field(p, "A");
  std::size_t n;
  if (const Json* nj = optional_field(p, "n")) n = size_from_json(*nj);
  else if (!aj.empty() && aj[0].is_array()) n = aj[0].size();
  else schema_error("give 'n' when A has no rows");
  FeasibleBox box;
  box.A = int_mat_from_json(aj, n);
  box.b = int_vec_from_json(field(p, "b"));
  if (box.b.size() != box.A.rows()) schema_error("b length must match the rows of A");
  box.lower = IntVec(n);
  if (const Json* lj = optional_field(p, "lower")) {
    box.lower = int_vec_from_json(*lj);
    if (box.lower.size() != n) schema_error("lower length");
  }
  box.upper.assign(n, std::nullopt);
  if (const Json* uj = optional_field(p, "upper")) {
    if (!uj->is_array() || uj->size() != n) schema_error("upper must list one bound (or null) per variable");
    for (std::size_t i = 0; i < n; ++i)
      if (!(*uj)[i].is_null()) box.upper[i] = rat_from_json((*uj)[i]);
  }
  return box;
}

NFoldInstance nfold_from_document(const InstanceDocument& doc) {
  const Json& p = doc.payload;
  NFoldInstance inst;
  if (doc.kind == "nfold") {
    const std::size_t n = size_field(p, "n");
    inst.A = int_mat_from_json(array_field(p, "A"), n);
    inst.B = int_mat_from_json(array_field(p, "B"), n);
    inst.N = size_field(p, "N");
    inst.b0 = int_vec_from_json(field(p, "b0"));
    inst.b = int_rows_from_json(field(p, "b"));
    inst.upper = int_rows_from_json(field(p, "upper"));
    inst.C = IntMat(0, n);
    const Json& obj = doc.objective;
    if (!obj.empty()) {
      if (field(obj, "kind") != "nfold") schema_error("nfold objectives have kind 'nfold'");
      if (const Json* cj = optional_field(obj, "C")) inst.C = int_mat_from_json(*cj, n);
      if (const Json* lj = optional_field(obj, "linear")) inst.linear = rat_rows_from_json(*lj);
      if (const Json* fj = optional_field(obj, "f")) inst.f = function_rows_from_json(*fj);
    }
  } else if (doc.kind == "transportation") {
    const IntVec supplies = int_vec_from_json(field(p, "supplies"));
    const IntVec demands = int_vec_from_json(field(p, "demands"));
    inst = build_transportation(supplies, demands, caps_from_json(field(p, "caps"), demands.size(), supplies.size()));
    apply_separable(inst, doc.objective);
  } else if (doc.kind == "table3") {
    const std::size_t L = size_field(p, "L"), M = size_field(p, "M"), N = size_field(p, "N");
    inst = build_3way_linesum(L, M, N, int_mat_from_json(field(p, "r"), N), int_mat_from_json(field(p, "s"), N),
                              int_mat_from_json(field(p, "t"), M), caps_from_json(field(p, "caps"), N, L * M));
    apply_separable(inst, doc.objective);
  } else if (doc.kind == "hierarchical") {
    inst = build_hierarchical(margins_from_document(doc));
    apply_separable(inst, doc.objective);
  } else {
    schema_error("expected an nfold or model document");
  }
  inst.validate();
  return inst;
}

MarginSpec margins_from_document(const InstanceDocument& doc) {
  if (doc.kind != "hierarchical") schema_error("expected a hierarchical document");
  const Json& p = doc.payload;
  MarginSpec spec;
  for (const Json& d : array_field(p, "dims")) spec.dims.push_back(size_from_json(d));
  for (const Json& h : array_field(p, "family")) {
    std::vector<std::size_t> member;
    if (!h.is_array()) schema_error("family members are coordinate arrays");
    for (const Json& c : h) member.push_back(size_from_json(c));
    spec.family.push_back(std::move(member));
  }
  for (const Json& m : array_field(p, "margins")) {
    MarginIndex index;
    for (const Json& c : array_field(m, "index")) {
      if (c.is_string() && c.get<std::string>() == "+") index.push_back(kPlus);
      else index.push_back(size_from_json(c));
    }
    if (!spec.values.emplace(index, int_from_json(field(m, "value"))).second) schema_error("repeated margin");
  }
  const Json& bounds = field(p, "bounds");
  spec.bounds = bounds.is_array() ? int_vec_from_json(bounds) : IntVec{int_from_json(bounds)};
  return spec;
}

TwoStageInstance twostage_from_document(const InstanceDocument& doc) {
  if (doc.kind != "twostage") schema_error("expected a twostage document");
  const Json& p = doc.payload;
  TwoStageInstance inst;
  const std::size_t m = size_field(p, "m");
  const std::size_t n = size_field(p, "n");
  inst.T = int_mat_from_json(array_field(p, "T"), m);
  inst.W = int_mat_from_json(array_field(p, "W"), n);
  inst.N = size_field(p, "N");
  inst.b = int_rows_from_json(field(p, "b"));
  inst.ux = int_vec_from_json(field(p, "ux"));
  inst.uy = int_rows_from_json(field(p, "uy"));
  inst.C = IntMat(0, m);
  inst.D = IntMat(0, n);
  const Json& obj = doc.objective;
  if (!obj.empty()) {
    if (field(obj, "kind") != "twostage") schema_error("twostage objectives have kind 'twostage'");
    if (const Json* cj = optional_field(obj, "C")) inst.C = int_mat_from_json(*cj, m);
    if (const Json* dj = optional_field(obj, "D")) inst.D = int_mat_from_json(*dj, n);
    if (const Json* q = optional_field(obj, "first_linear")) inst.first_linear = rat_vec_from_json(*q);
    if (const Json* h = optional_field(obj, "second_linear")) inst.second_linear = rat_rows_from_json(*h);
    if (const Json* fj = optional_field(obj, "f")) inst.f = function_rows_from_json(*fj);
  }
  inst.validate();
  return inst;
}

DecodingSpec decoding_from_document(const InstanceDocument& doc) {
  if (doc.kind != "decode") schema_error("expected a decode document");
  const Json& p = doc.payload;
  DecodingSpec spec;
  spec.L = size_field(p, "L");
  spec.M = size_field(p, "M");
  spec.N = size_field(p, "N");
  spec.u = int_from_json(field(p, "u"));
  spec.U = int_from_json(field(p, "U"));
  spec.received = int_vec_from_json(field(p, "received"));
  const Json& pj = field(p, "p");
  if (pj.is_string() && (pj.get<std::string>() == "inf" || pj.get<std::string>() == "infinity")) {
    spec.p.reset();
  } else {
    spec.p = size_from_json(pj);
  }
  if (const Json* cj = optional_field(p, "coords")) {
    std::vector<std::size_t> coords;
    for (const Json& c : *cj) coords.push_back(size_from_json(c));
    spec.coords = std::move(coords);
  }
  spec.validate();
  return spec;
}

InstanceDocument nfold_document(const NFoldInstance& inst, Json meta) {
  InstanceDocument doc;
  doc.kind = "nfold";
  doc.payload = Json{{"n", inst.block_width()},
                     {"N", inst.N},
                     {"A", to_json(inst.A)},
                     {"B", to_json(inst.B)},
                     {"b0", to_json(std::span<const Int>(inst.b0))},
                     {"b", rows_json(inst.b)},
                     {"upper", rows_json(inst.upper)}};
  Json obj = Json::object();
  if (inst.C.rows() > 0 || !inst.linear.empty() || !inst.f.empty()) {
    obj["kind"] = "nfold";
    if (inst.C.rows() > 0) obj["C"] = to_json(inst.C);
    if (!inst.linear.empty()) obj["linear"] = rows_json(inst.linear);
    if (!inst.f.empty()) obj["f"] = rows_json(inst.f);
  }
  doc.objective = std::move(obj);
  doc.meta = std::move(meta);
  return doc;
}

InstanceDocument twostage_document(const TwoStageInstance& inst) {
  InstanceDocument doc;
  doc.kind = "twostage";
  doc.payload = Json{{"m", inst.m()},
                     {"n", inst.n()},
                     {"N", inst.N},
                     {"T", to_json(inst.T)},
                     {"W", to_json(inst.W)},
                     {"b", rows_json(inst.b)},
                     {"ux", to_json(std::span<const Int>(inst.ux))},
                     {"uy", rows_json(inst.uy)}};
  Json obj = Json::object();
  if (inst.C.rows() > 0 || !inst.first_linear.empty() || !inst.second_linear.empty()) {
    obj["kind"] = "twostage";
    if (inst.C.rows() > 0) {
      obj["C"] = to_json(inst.C);
      obj["D"] = to_json(inst.D);
    }
    if (!inst.first_linear.empty()) obj["first_linear"] = to_json(std::span<const Rat>(inst.first_linear));
    if (!inst.second_linear.empty()) obj["second_linear"] = rows_json(inst.second_linear);
    if (!inst.f.empty()) obj["f"] = rows_json(inst.f);
  }
  doc.objective = std::move(obj);
  return doc;
}

InstanceDocument ip_document(const FeasibleBox& box, const Objective& obj, bool lp) {
  InstanceDocument doc;
  doc.kind = lp ? "lp" : "ip";
  Json upper = Json::array();
  for (const auto& u : box.upper) upper.push_back(u ? to_json(*u) : Json(nullptr));
  doc.payload = Json{{"n", box.dim()},
                     {"A", to_json(box.A)},
                     {"b", to_json(std::span<const Int>(box.b))},
                     {"lower", to_json(std::span<const Int>(box.lower))},
                     {"upper", std::move(upper)}};
  doc.objective = to_json(obj);
  return doc;
}

InstanceDocument translate_model(const InstanceDocument& doc) {
  if (doc.kind == "nfold") return nfold_document(nfold_from_document(doc), doc.meta);
  if (doc.kind == "decode") {
    const DecodingSpec spec = decoding_from_document(doc);
    const DecodingModel model = build_decoding(spec);
    Json meta{{"source", "decode"}, {"p", spec.p ? Json(static_cast<std::uint64_t>(*spec.p)) : Json("inf")}};
    if (model.q) meta["q"] = static_cast<std::uint64_t>(*model.q);
    return nfold_document(model.instance, std::move(meta));
  }
  if (is_nfold_model(doc.kind)) return nfold_document(nfold_from_document(doc), Json{{"source", doc.kind}});
  schema_error("cannot translate a '" + doc.kind + "' document");
}

// ---------------------------------------------------------------------------
// Runs

namespace {

using Clock = std::chrono::steady_clock;

Json trace_json(const AugmentTrace& t) {
  Json it = Json::array();
  for (const TraceStep& s : t.iterations) {
    it.push_back(Json{{"kind", s.kind == StepKind::kGreedy ? "greedy" : "shrink"},
                      {"before", to_json(s.value_before)},
                      {"after", to_json(s.value_after)},
                      {"steplen", to_json(s.steplen)},
                      {"direction", to_json(std::span<const Int>(s.direction))}});
  }
  Json out{{"iterations", std::move(it)},
           {"n_eff", t.n_eff},
           {"directions_evaluated", t.directions_evaluated},
           {"warnings", t.warnings}};
  out["h_bound"] = t.h_bound ? to_json(*t.h_bound) : Json(nullptr);
  return out;
}

struct Solved {
  Json point;
  Rat value;
  const AugmentTrace* trace = nullptr;
  std::size_t basis_size = 0;
  Json info = Json::object();
};

Json stats_json(const Solved& s, Clock::time_point start) {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  return Json{{"augment_steps", s.trace ? s.trace->iterations.size() : 0},
              {"directions_evaluated", s.trace ? s.trace->directions_evaluated : 0},
              {"basis_size", s.basis_size},
              {"wall_ms", static_cast<std::int64_t>(ms)}};
}

RunOutcome failure(const Error& e, Clock::time_point start) {
  RunOutcome out;
  std::string status = "error";
  switch (e.code()) {
    case ErrorCode::kInfeasible:
      status = "infeasible";
      out.exit_code = kExitInfeasible;
      break;
    case ErrorCode::kUnboundedObjective:
      status = "unbounded";
      out.exit_code = kExitUnbounded;
      break;
    case ErrorCode::kSearchSpaceTooLarge:
      out.exit_code = kExitSearchSpace;
      break;
    default:
      out.exit_code = kExitError;
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  out.document = Json{{"status", status},
                      {"error", error_code_name(e.code())},
                      {"message", e.what()},
                      {"stats", Json{{"wall_ms", static_cast<std::int64_t>(ms)}}}};
  return out;
}

[[noreturn]] void verification_failed(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "self-verification failed: " + what);
}

void verify(bool ok, const char* what) {
  if (!ok) verification_failed(what);
}

NFoldOptions nfold_options(const RunFlags& flags) {
  NFoldOptions o;
  o.graver_cap = flags.graver_cap;
  o.direct_threshold = flags.direct_threshold;
  o.solve.threads = flags.threads;
  return o;
}

Solved solve_nfold_instance(const NFoldInstance& inst, const NFoldOptions& opts, NFoldResult& keep) {
  keep = solve_nfold(inst, opts);
  verify(inst.box().contains(keep.point), "point violates the constraints");
  verify(inst.objective().eval(keep.point) == keep.value, "reported value differs from the objective");
  Solved s;
  s.point = to_json(std::span<const Int>(keep.point));
  s.value = keep.value;
  s.trace = &keep.trace;
  s.basis_size = keep.basis_size;
  s.info["lifted"] = keep.lifted;
  if (keep.complexity) s.info["graver_complexity"] = *keep.complexity;
  return s;
}

}  // namespace

RunOutcome run_solve(const InstanceDocument& doc, const RunFlags& flags) {
  const auto start = Clock::now();
  try {
    Solved s;
    IpResult ip;
    LpResult lp;
    NFoldResult nf;
    TwoStageResult ts;
    DecodeResult dec;
    SolveOptions so;
    so.threads = flags.threads;
    if (doc.kind == "ip" || doc.kind == "lp") {
      const std::string mode = flags.mode.value_or(doc.kind);
      const FeasibleBox box = box_from_document(doc);
      const Objective obj = objective_from_json(doc.objective, box.dim());
      if (mode == "ip") {
        std::optional<IntVec> z0;
        if (const Json* sj = optional_field(doc.payload, "start")) z0 = int_vec_from_json(*sj);
        ip = solve_ip(box, obj, z0, PhaseOneMethod::kBoxViolation, so);
        verify(box.contains(ip.point), "point violates the constraints");
        verify(obj.eval(ip.point) == ip.value, "reported value differs from the objective");
        s.point = to_json(std::span<const Int>(ip.point));
        s.value = ip.value;
        s.trace = &ip.trace;
        s.basis_size = ip.basis_size;
      } else if (mode == "lp") {
        if (!obj.is_linear()) throw Error(ErrorCode::kInvalidArgument, "lp mode needs a linear objective");
        std::optional<RatVec> z0;
        if (const Json* sj = optional_field(doc.payload, "start")) z0 = rat_vec_from_json(*sj);
        lp = solve_lp(box, obj.linear_part(), z0, so);
        verify(box.contains(lp.point), "point violates the constraints");
        verify(obj.eval(std::span<const Rat>(lp.point)) == lp.value, "reported value differs from the objective");
        s.point = to_json(std::span<const Rat>(lp.point));
        s.value = lp.value;
        s.trace = &lp.trace;
        s.basis_size = lp.basis_size;
      } else {
        throw Error(ErrorCode::kInvalidArgument, "mode must be 'ip' or 'lp'");
      }
    } else if (flags.mode && !(*flags.mode == "ip")) {
      throw Error(ErrorCode::kInvalidArgument, "'" + doc.kind + "' documents are solved in ip mode");
    } else if (is_nfold_model(doc.kind)) {
      s = solve_nfold_instance(nfold_from_document(doc), nfold_options(flags), nf);
    } else if (doc.kind == "decode") {
      const DecodingSpec spec = decoding_from_document(doc);
      dec = decode(spec, nfold_options(flags));
      const NFoldInstance inst = build_decoding(spec).instance;
      verify(inst.box().contains(dec.solve.point), "point violates the constraints");
      verify(inst.objective().eval(dec.solve.point) == dec.solve.value, "reported value differs from the objective");
      s.point = to_json(std::span<const Int>(dec.solve.point));
      s.value = dec.solve.value;
      s.trace = &dec.solve.trace;
      s.basis_size = dec.solve.basis_size;
      s.info["message"] = to_json(std::span<const Int>(dec.message));
      s.info["augmented"] = to_json(std::span<const Int>(dec.augmented));
      s.info["distance"] = to_json(dec.distance);
      if (dec.q) s.info["q"] = static_cast<std::uint64_t>(*dec.q);
    } else if (doc.kind == "twostage") {
      const TwoStageInstance inst = twostage_from_document(doc);
      TwoStageOptions o;
      o.block_cap = flags.block_cap;
      o.solve = so;
      ts = solve_twostage(inst, o);
      verify(inst.box().contains(ts.point), "point violates the constraints");
      verify(inst.value(ts.point) == ts.value, "reported value differs from the objective");
      s.point = to_json(std::span<const Int>(ts.point));
      s.value = ts.value;
      s.trace = &ts.trace;
      s.basis_size = ts.basis_size;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "cannot solve '" + doc.kind + "' documents");
    }
    RunOutcome out;
    out.document = Json{{"status", "optimal"}, {"point", s.point}, {"value", to_json(s.value)}};
    out.document["stats"] = stats_json(s, start);
    if (flags.trace && s.trace) out.document["trace"] = trace_json(*s.trace);
    if (!s.info.empty()) out.document["info"] = s.info;
    return out;
  } catch (const Error& e) {
    return failure(e, start);
  }
}

RunOutcome run_oracle(const InstanceDocument& doc, const RunFlags& flags) {
  const auto start = Clock::now();
  try {
    OracleOptions o;
    o.cell_cap = flags.cell_cap;
    o.radius = flags.radius;
    FeasibleBox box;
    Objective obj;
    Json info = Json::object();
    std::optional<OracleResult> distance;
    if (doc.kind == "ip" || doc.kind == "lp") {
      box = box_from_document(doc);
      obj = objective_from_json(doc.objective, box.dim());
    } else if (is_nfold_model(doc.kind)) {
      const NFoldInstance inst = nfold_from_document(doc);
      box = inst.box();
      obj = inst.objective();
    } else if (doc.kind == "twostage") {
      const TwoStageInstance inst = twostage_from_document(doc);
      box = inst.box();
      obj = inst.objective();
    } else if (doc.kind == "decode") {
      const DecodingSpec spec = decoding_from_document(doc);
      const DecodingModel model = build_decoding(spec);
      box = model.instance.box();
      obj = model.instance.objective();
      // The decoding distance itself, minimized separately.
      const std::vector<std::size_t> coords = spec.coordinate_set();
      distance = brute_force(
          box,
          [&](const IntVec& z) {
            Rat d = 0;
            for (std::size_t c : coords) {
              Int diff = abs(z[*model.position[c]] - spec.received[c]);
              if (!spec.p) {
                if (diff > d) d = diff;
              } else {
                Int power;
                mpz_pow_ui(power.get_mpz_t(), diff.get_mpz_t(), *spec.p);
                d += power;
              }
            }
            return d;
          },
          o);
      if (model.q) info["q"] = static_cast<std::uint64_t>(*model.q);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "no oracle for '" + doc.kind + "' documents");
    }
    const OracleResult res = brute_force(box, obj, o);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    RunOutcome out;
    Json stats{{"feasible_points", res.feasible_count},
               {"visited", res.visited},
               {"wall_ms", static_cast<std::int64_t>(ms)}};
    if (!res.feasible) {
      out.exit_code = kExitInfeasible;
      out.document = Json{{"status", "infeasible"}, {"stats", stats}};
      return out;
    }
    out.document = Json{{"status", "optimal"},
                        {"point", to_json(std::span<const Int>(res.point))},
                        {"value", to_json(res.value)},
                        {"stats", stats}};
    if (distance) info["min_distance"] = to_json(distance->value);
    if (!info.empty()) out.document["info"] = info;
    return out;
  } catch (const Error& e) {
    return failure(e, start);
  }
}

RunOutcome run_basis(const InstanceDocument& doc, BasisKind kind, const RunFlags& flags) {
  const auto start = Clock::now();
  try {
    RunOutcome out;
    const char* name = kind == BasisKind::kCircuits ? "circuits" : kind == BasisKind::kGraver ? "graver" : "composite";
    Json body{{"basis", name}};
    if (doc.kind == "ip" || doc.kind == "lp") {
      const FeasibleBox box = box_from_document(doc);
      body["matrix"] = to_json(box.A);
      if (kind == BasisKind::kCircuits) {
        const CircuitSet cs = circuits(box.A);
        body["elements"] = rows_json(cs.elements);
      } else if (kind == BasisKind::kGraver) {
        body["elements"] = rows_json(graver(box.A).elements);
      } else {
        const Objective obj = objective_from_json(doc.objective, box.dim());
        const GraverBasis g = graver_composite(box.A, obj.coupling());
        body["coupling"] = to_json(g.coupling);
        body["elements"] = rows_json(g.elements);
        body["lifted"] = rows_json(g.lifted);
      }
    } else if (is_nfold_model(doc.kind) || doc.kind == "decode") {
      NFoldInstance inst = doc.kind == "decode" ? build_decoding(decoding_from_document(doc)).instance
                                                : nfold_from_document(doc);
      const IntMat flat = inst.matrix();
      body["matrix"] = to_json(flat);
      if (kind == BasisKind::kCircuits) {
        body["elements"] = rows_json(circuits(flat).elements);
      } else {
        if (kind == BasisKind::kGraver) {
          inst.C = IntMat(0, inst.block_width());
          inst.f.clear();
        }
        const NFoldBasis nb = nfold_basis(inst, nfold_options(flags));
        body["lifted_from_seed"] = nb.lifted;
        if (nb.complexity) body["graver_complexity"] = *nb.complexity;
        body["elements"] = rows_json(nb.basis.elements);
        if (kind == BasisKind::kComposite) {
          body["coupling"] = to_json(nb.basis.coupling);
          body["lifted"] = rows_json(nb.basis.lifted);
        }
      }
    } else if (doc.kind == "twostage") {
      const TwoStageInstance inst = twostage_from_document(doc);
      const IntMat m = inst.matrix();
      body["matrix"] = to_json(m);
      if (kind == BasisKind::kCircuits) body["elements"] = rows_json(circuits(m).elements);
      else if (kind == BasisKind::kGraver) body["elements"] = rows_json(graver(m).elements);
      else throw Error(ErrorCode::kInvalidArgument, "composite bases of twostage documents are not available");
    } else {
      throw Error(ErrorCode::kInvalidArgument, "no matrix in '" + doc.kind + "' documents");
    }
    body["count"] = body["elements"].size();
    out.document = std::move(body);
    return out;
  } catch (const Error& e) {
    return failure(e, start);
  }
}

RunOutcome run_model(const InstanceDocument& doc) {
  const auto start = Clock::now();
  try {
    RunOutcome out;
    out.document = to_json(translate_model(doc));
    return out;
  } catch (const Error& e) {
    return failure(e, start);
  }
}

Json without_wall_ms(Json result) {
  if (result.is_object() && result.contains("stats") && result["stats"].is_object()) result["stats"].erase("wall_ms");
  return result;
}

}  // namespace graver_opt
