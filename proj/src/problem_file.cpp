#include "scnp/problem_file.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "overloaded.hpp"
#include "scnp/error.hpp"

namespace scnp {

using nlohmann::json;

namespace {

using detail::overloaded;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchema, (path.empty() ? std::string("/") : path) + ": " + what);
}

// A JSON object view that remembers its location and which keys are allowed.
class Node {
 public:
  Node(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) schema_error(path_, "expected an object");
    for (const auto& [key, _] : j_.items()) {
      if (!allowed.count(key)) schema_error(path_ + "/" + key, "unknown field");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return path_ + "/" + key; }
  const json& raw(const std::string& key) const {
    if (!has(key)) schema_error(path(key), "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) const { return as_number(raw(key), path(key)); }
  double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number_integer()) schema_error(path(key), "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_string()) schema_error(path(key), "expected a string");
    return v.get<std::string>();
  }

  Vector vector(const std::string& key) const { return as_vector(raw(key), path(key)); }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) schema_error(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) schema_error(path, "number is not finite");
    return d;
  }

  static Vector as_vector(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) schema_error(path, "expected a non-empty array of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = as_number(v[i], path + "/" + std::to_string(i));
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

Matrix parse_dense(const json& j, const std::string& path) {
  Node n(j, path, {"rows", "cols", "data"});
  const int rows = n.integer("rows");
  const int cols = n.integer("cols");
  if (rows < 1 || cols < 1) schema_error(path, "matrix dimensions must be positive");
  const Vector data = n.vector("data");
  if (data.size() != static_cast<Eigen::Index>(rows) * cols) schema_error(n.path("data"), "expected rows*cols entries");
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = data[static_cast<Eigen::Index>(r) * cols + c];
  }
  return m;
}

Matrix parse_matrix(const json& j, const std::string& path) {
  if (j.is_object() && j.contains("random")) {
    Node outer(j, path, {"random"});
    Node n(outer.raw("random"), outer.path("random"), {"rows", "cols", "seed", "scale"});
    const int rows = n.integer("rows");
    const int cols = n.integer("cols");
    if (rows < 1 || cols < 1) schema_error(n.path("rows"), "matrix dimensions must be positive");
    const json& seed = n.raw("seed");
    if (!seed.is_number_integer() || seed.get<long long>() < 0) schema_error(n.path("seed"), "expected a non-negative integer");
    return seeded_matrix(rows, cols, seed.get<std::uint64_t>(), n.number_or("scale", 1.0));
  }
  return parse_dense(j, path);
}

json dense_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

json vector_json(const Vector& v) { return json(std::vector<double>(v.begin(), v.end())); }

std::vector<Halfspace> parse_cuts(const json& j, const std::string& path, int dim) {
  if (!j.is_array()) schema_error(path, "expected an array of halfspaces");
  std::vector<Halfspace> cuts;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    Node n(j[i], p, {"a", "b"});
    Vector a = n.vector("a");
    if (a.size() != dim) schema_error(n.path("a"), "halfspace normal has the wrong dimension");
    cuts.push_back(Halfspace::make(std::move(a), n.number("b")));
  }
  return cuts;
}

ConvexSet parse_set(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) schema_error(path, "set needs a string 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "full") {
    Node n(j, path, {"type", "dim"});
    return ConvexSet::full_space(n.integer("dim"));
  }
  if (type == "box") {
    Node n(j, path, {"type", "lo", "hi"});
    Vector lo = n.vector("lo");
    Vector hi = n.vector("hi");
    if (lo.size() != hi.size()) schema_error(path, "box bounds differ in length");
    if ((lo.array() > hi.array()).any()) schema_error(path, "box requires lo <= hi");
    return ConvexSet::box(std::move(lo), std::move(hi));
  }
  if (type == "ball") {
    Node n(j, path, {"type", "center", "radius", "exponent"});
    const double radius = n.number("radius");
    if (radius < 0.0) schema_error(n.path("radius"), "radius must be >= 0");
    const double exponent = n.number_or("exponent", 2.0);
    if (exponent <= 1.0) schema_error(n.path("exponent"), "exponent must exceed 1");
    return ConvexSet::ball(n.vector("center"), radius, exponent);
  }
  if (type == "halfspaces") {
    Node n(j, path, {"type", "dim", "cuts"});
    const int dim = n.integer("dim");
    if (dim < 1) schema_error(n.path("dim"), "dimension must be positive");
    return ConvexSet::halfspaces(dim, parse_cuts(n.raw("cuts"), n.path("cuts"), dim));
  }
  if (type == "intersection") {
    Node n(j, path, {"type", "base", "cuts"});
    ConvexSet base = parse_set(n.raw("base"), n.path("base"));
    const int dim = base.dim();
    return ConvexSet::intersect(std::move(base), parse_cuts(n.raw("cuts"), n.path("cuts"), dim));
  }
  schema_error(path + "/type", "unknown set type '" + type + "'");
}

json set_json(const ConvexSet& s);

json cuts_json(const std::vector<Halfspace>& cuts) {
  json out = json::array();
  for (const auto& c : cuts) out.push_back({{"a", vector_json(c.a)}, {"b", c.b}});
  return out;
}

json set_json(const ConvexSet& s) {
  return std::visit(overloaded{
                        [](const FullSpace& f) -> json { return {{"type", "full"}, {"dim", f.dim}}; },
                        [](const Box& b) -> json {
                          return {{"type", "box"}, {"lo", vector_json(b.lo)}, {"hi", vector_json(b.hi)}};
                        },
                        [](const Ball& b) -> json {
                          return {{"type", "ball"},
                                  {"center", vector_json(b.center)},
                                  {"radius", b.radius},
                                  {"exponent", b.exponent}};
                        },
                        [](const HalfspaceIntersection& h) -> json {
                          return {{"type", "halfspaces"}, {"dim", h.dim}, {"cuts", cuts_json(h.cuts)}};
                        },
                        [](const IntersectionWith& i) -> json {
                          return {{"type", "intersection"}, {"base", set_json(*i.base)}, {"cuts", cuts_json(i.cuts)}};
                        },
                    },
                    s.variant());
}

MonotoneOp parse_operator(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    schema_error(path, "operator needs a string 'type'");
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "scaling") {
    Node n(j, path, {"type", "a"});
    const double a = n.number("a");
    if (a < 0.0) schema_error(n.path("a"), "scaling factor must be >= 0");
    return MonotoneOp::scaling(a);
  }
  if (type == "linear_psd") {
    Node n(j, path, {"type", "rows", "cols", "data"});
    json dense = {{"rows", n.raw("rows")}, {"cols", n.raw("cols")}, {"data", n.raw("data")}};
    return MonotoneOp::linear_psd(parse_dense(dense, path));
  }
  if (type == "indicator") {
    Node n(j, path, {"type", "set"});
    return MonotoneOp::indicator(parse_set(n.raw("set"), n.path("set")));
  }
  schema_error(path + "/type", "unknown operator type '" + type + "'");
}

json operator_json(const MonotoneOp& m) {
  return std::visit(overloaded{
                        [](const Scaling& s) -> json { return {{"type", "scaling"}, {"a", s.a}}; },
                        [](const LinearPSD& l) -> json {
                          json d = dense_json(l.b);
                          d["type"] = "linear_psd";
                          return d;
                        },
                        [](const IndicatorSubdifferential& i) -> json {
                          return {{"type", "indicator"}, {"set", set_json(i.set)}};
                        },
                    },
                    m.variant());
}

NonexpansiveMap parse_map(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) schema_error(path, "map needs a string 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "identity") {
    Node n(j, path, {"type"});
    return NonexpansiveMap::identity();
  }
  if (type == "set_projection") {
    Node n(j, path, {"type", "set"});
    return NonexpansiveMap::set_projection(parse_set(n.raw("set"), n.path("set")));
  }
  if (type == "affine") {
    Node n(j, path, {"type", "q", "b"});
    return NonexpansiveMap::affine(parse_dense(n.raw("q"), n.path("q")), n.vector("b"));
  }
  schema_error(path + "/type", "unknown map type '" + type + "'");
}

json map_json(const NonexpansiveMap& t) {
  return std::visit(overloaded{
                        [](const IdentityMap&) -> json { return {{"type", "identity"}}; },
                        [](const SetProjectionMap& s) -> json {
                          return {{"type", "set_projection"}, {"set", set_json(s.set)}};
                        },
                        [](const AffineContraction& a) -> json {
                          return {{"type", "affine"}, {"q", dense_json(a.q)}, {"b", vector_json(a.b)}};
                        },
                    },
                    t.variant());
}

WFamily parse_family(const json& j, const std::string& path) {
  Node n(j, path, {"maps", "lambda", "lambdas", "bound", "depth"});
  const json& maps_j = n.raw("maps");
  if (!maps_j.is_array() || maps_j.empty()) schema_error(n.path("maps"), "expected a non-empty array of maps");
  std::vector<NonexpansiveMap> listed;
  for (std::size_t i = 0; i < maps_j.size(); ++i) listed.push_back(parse_map(maps_j[i], n.path("maps") + "/" + std::to_string(i)));
  const int depth = n.has("depth") ? n.integer("depth") : static_cast<int>(std::max<std::size_t>(listed.size(), WFamily::kDefaultDepth));
  if (depth < 1) schema_error(n.path("depth"), "depth must be positive");
  if (n.has("lambda") && n.has("lambdas")) schema_error(path, "give either 'lambda' or 'lambdas'");
  std::vector<NonexpansiveMap> maps;
  for (int i = 0; i < depth; ++i) maps.push_back(listed[static_cast<std::size_t>(i) % listed.size()]);
  std::vector<double> lambdas;
  if (n.has("lambdas")) {
    const Vector l = n.vector("lambdas");
    for (int i = 0; i < depth; ++i) lambdas.push_back(l[i % l.size()]);
  } else {
    lambdas.assign(static_cast<std::size_t>(depth), n.number_or("lambda", WFamily::kDefaultLambda));
  }
  double bound = n.has("bound") ? n.number("bound") : *std::max_element(lambdas.begin(), lambdas.end());
  try {
    return WFamily(std::move(maps), std::move(lambdas), bound);
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
}

json family_json(const WFamily& f) {
  json maps = json::array();
  for (const auto& m : f.maps()) maps.push_back(map_json(m));
  return {{"maps", maps}, {"lambdas", f.lambdas()}, {"bound", f.bound()}, {"depth", f.depth()}};
}

ScalarSchedule parse_rule(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("rule") || !j.at("rule").is_string()) schema_error(path, "schedule needs a string 'rule'");
  const std::string rule = j.at("rule").get<std::string>();
  if (rule == "constant") {
    Node n(j, path, {"rule", "value"});
    return ScalarSchedule::constant(n.number("value"));
  }
  if (rule == "reciprocal") {
    Node n(j, path, {"rule", "scale", "offset"});
    const double offset = n.number_or("offset", 0.0);
    if (offset <= -1.0) schema_error(n.path("offset"), "offset must exceed -1");
    return ScalarSchedule::reciprocal(n.number_or("scale", 1.0), offset);
  }
  if (rule == "ratio") {
    Node n(j, path, {"rule", "offset"});
    const double offset = n.number_or("offset", 1.0);
    if (offset <= -1.0) schema_error(n.path("offset"), "offset must exceed -1");
    return ScalarSchedule::ratio(offset);
  }
  if (rule == "explicit") {
    Node n(j, path, {"rule", "values"});
    const Vector v = n.vector("values");
    return ScalarSchedule::explicit_values(std::vector<double>(v.begin(), v.end()));
  }
  schema_error(path + "/rule", "unknown schedule rule '" + rule + "'");
}

json rule_json(const ScalarSchedule& s) {
  switch (s.rule()) {
    case ScalarSchedule::Rule::kConstant: return {{"rule", "constant"}, {"value", s.value()}};
    case ScalarSchedule::Rule::kReciprocal: return {{"rule", "reciprocal"}, {"scale", s.scale()}, {"offset", s.offset()}};
    case ScalarSchedule::Rule::kRatio: return {{"rule", "ratio"}, {"offset", s.offset()}};
    case ScalarSchedule::Rule::kExplicit: return {{"rule", "explicit"}, {"values", s.values()}};
  }
  return {};
}

ParameterSchedules parse_schedules(const json& j, const std::string& path) {
  Node n(j, path, {"alpha", "sigma", "lambda", "mu", "error", "error_direction", "floor"});
  ParameterSchedules s;
  if (n.has("alpha")) s.alpha = parse_rule(n.raw("alpha"), n.path("alpha"));
  if (n.has("sigma")) s.sigma = parse_rule(n.raw("sigma"), n.path("sigma"));
  if (n.has("lambda")) s.lambda = parse_rule(n.raw("lambda"), n.path("lambda"));
  if (n.has("mu")) s.mu = parse_rule(n.raw("mu"), n.path("mu"));
  if (n.has("error")) s.error = parse_rule(n.raw("error"), n.path("error"));
  if (n.has("error_direction")) s.error_direction = n.vector("error_direction");
  s.floor = n.number_or("floor", s.floor);
  if (s.floor <= 0.0) schema_error(n.path("floor"), "floor must be > 0");
  return s;
}

json schedules_json(const ParameterSchedules& s) {
  json out = {{"alpha", rule_json(s.alpha)}, {"sigma", rule_json(s.sigma)}, {"lambda", rule_json(s.lambda)},
              {"mu", rule_json(s.mu)},       {"error", rule_json(s.error)}, {"floor", s.floor}};
  if (s.error_direction.size() > 0) out["error_direction"] = vector_json(s.error_direction);
  return out;
}

SpaceGeometry parse_geometry(const json& j, const std::string& path) {
  Node n(j, path, {"dim", "p"});
  const int dim = n.integer("dim");
  const double p = n.number_or("p", 2.0);
  if (dim < 1) schema_error(n.path("dim"), "dimension must be positive");
  if (p <= 1.0) schema_error(n.path("p"), "exponent must exceed 1");
  return SpaceGeometry(dim, p);
}

}  // namespace

Matrix seeded_matrix(int rows, int cols, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      m(r, c) = scale * (2.0 * u - 1.0);
    }
  }
  return m;
}

ProblemFile parse_problem(const json& doc) {
  Node n(doc, "", {"E", "F", "A", "M1", "M2", "C", "S", "family", "schedules", "gamma", "c_const", "x1", "stop"});
  const SpaceGeometry ge = parse_geometry(n.raw("E"), "/E");
  const SpaceGeometry gf = parse_geometry(n.raw("F"), "/F");
  Matrix a = parse_matrix(n.raw("A"), "/A");
  if (a.rows() != gf.dim() || a.cols() != ge.dim()) schema_error("/A", "A must be dim F x dim E");
  MonotoneOp m1 = parse_operator(n.raw("M1"), "/M1");
  MonotoneOp m2 = parse_operator(n.raw("M2"), "/M2");
  ConvexSet c = parse_set(n.raw("C"), "/C");
  if (c.dim() != ge.dim()) schema_error("/C", "C must have dimension dim E");
  NonexpansiveMap s = n.has("S") ? parse_map(n.raw("S"), "/S") : NonexpansiveMap::identity();
  WFamily family = n.has("family") ? parse_family(n.raw("family"), "/family") : WFamily::uniform(NonexpansiveMap::identity());
  ParameterSchedules schedules = n.has("schedules") ? parse_schedules(n.raw("schedules"), "/schedules") : ParameterSchedules{};
  Vector x1 = n.vector("x1");
  if (x1.size() != ge.dim()) schema_error("/x1", "x1 must have dimension dim E");

  StoppingRule stop;
  if (n.has("stop")) {
    Node sn(n.raw("stop"), "/stop", {"tol", "max_iters", "divergence_guard"});
    stop.tol = sn.number_or("tol", stop.tol);
    if (sn.has("max_iters")) stop.max_iters = sn.integer("max_iters");
    stop.divergence_guard = sn.number_or("divergence_guard", stop.divergence_guard);
    if (stop.max_iters < 1) schema_error("/stop/max_iters", "must be >= 1");
    if (stop.tol < 0.0) schema_error("/stop/tol", "must be >= 0");
  }

  ProblemFile out{
      ProblemInstance{
          .ge = ge,
          .gf = gf,
          .a = std::move(a),
          .m1 = std::move(m1),
          .m2 = std::move(m2),
          .c = std::move(c),
          .s = std::move(s),
          .family = std::move(family),
          .schedules = std::move(schedules),
          .gamma = n.number("gamma"),
          .c_const = n.number_or("c_const", 1.0),
          .x1 = std::move(x1),
      },
      stop,
  };
  validate(out.instance);
  return out;
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open problem file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchema, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_problem(doc);
}

json to_json(const ProblemFile& problem) {
  const ProblemInstance& p = problem.instance;
  return {
      {"E", {{"dim", p.ge.dim()}, {"p", p.ge.p()}}},
      {"F", {{"dim", p.gf.dim()}, {"p", p.gf.p()}}},
      {"A", dense_json(p.a)},
      {"M1", operator_json(p.m1)},
      {"M2", operator_json(p.m2)},
      {"C", set_json(p.c)},
      {"S", map_json(p.s)},
      {"family", family_json(p.family)},
      {"schedules", schedules_json(p.schedules)},
      {"gamma", p.gamma},
      {"c_const", p.c_const},
      {"x1", vector_json(p.x1)},
      {"stop",
       {{"tol", problem.stop.tol},
        {"max_iters", problem.stop.max_iters},
        {"divergence_guard", problem.stop.divergence_guard}}},
  };
}

}  // namespace scnp
