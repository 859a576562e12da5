#pragma once

// JSON encodings of bodies, estimates, certificates and suite reports.
// nlohmann::json prints doubles in shortest round-trip form.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bm/body.hpp"
#include "bm/certificate.hpp"
#include "bm/distance.hpp"
#include "bm/suites.hpp"

namespace bm::io {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { fail(ErrorCode::InvalidBody, what); }

inline double number(const Json& j, const char* field) {
  if (!j.is_number()) bad(std::string("field '") + field + "' must be a number");
  return j.get<double>();
}

inline const Json& member(const Json& j, const char* field) {
  if (!j.is_object()) bad("expected a JSON object");
  auto it = j.find(field);
  if (it == j.end()) bad(std::string("missing field '") + field + "'");
  return *it;
}

inline Vec vector_of(const Json& j, const char* field) {
  if (!j.is_array()) bad(std::string("field '") + field + "' must be an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], field);
  return v;
}

/// Array of points, one column per entry.
inline Mat points_of(const Json& j, const char* field, int dim) {
  if (!j.is_array() || j.empty()) bad(std::string("field '") + field + "' must be a nonempty array of points");
  Mat m(dim, static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const Vec p = vector_of(j[c], field);
    if (p.size() != dim)
      fail(ErrorCode::DimensionMismatch, std::string("point ") + std::to_string(c) + " in '" + field + "' has length " +
                                             std::to_string(p.size()) + ", expected " + std::to_string(dim));
    m.col(static_cast<Eigen::Index>(c)) = p;
  }
  return m;
}

/// Array of rows.
inline Mat matrix_of(const Json& j, const char* field) {
  if (!j.is_array() || j.empty()) bad(std::string("field '") + field + "' must be a nonempty array of rows");
  const int n = static_cast<int>(j.size());
  Mat m(n, n);
  for (int r = 0; r < n; ++r) {
    const Vec row = vector_of(j[static_cast<std::size_t>(r)], field);
    if (row.size() != n) fail(ErrorCode::SingularMap, std::string("field '") + field + "' must be a square matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

}  // namespace detail

inline Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json points_json(const Mat& m) {
  Json a = Json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(to_json(Vec(m.col(c))));
  return a;
}

inline Json matrix_json(const Mat& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vec(m.row(r).transpose())));
  return a;
}

inline Json exponent_json(double p) { return std::isinf(p) ? Json("inf") : Json(p); }

inline double exponent_of(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    fail(ErrorCode::InvalidP, "p must be a number or \"inf\"");
  }
  if (!j.is_number()) fail(ErrorCode::InvalidP, "p must be a number or \"inf\"");
  return j.get<double>();
}

namespace detail {

inline void dump_into(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      out += pad + Json(it.key()).dump() + ": ";
      dump_into(it.value(), depth + 1, out);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += close + "}";
    return;
  }
  const bool flat = j.is_array() && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
  if (j.is_array() && !j.empty() && !flat) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      out += pad;
      dump_into(j[i], depth + 1, out);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += close + "]";
    return;
  }
  out += j.dump();
}

}  // namespace detail

/// Indented JSON with arrays of numbers kept on one line.
inline std::string dump(const Json& j) {
  std::string out;
  detail::dump_into(j, 0, out);
  return out + "\n";
}

// ---- bodies ----

inline Json to_json(const BodyExpr& body) {
  Json j;
  switch (body.kind()) {
    case BodyExpr::Kind::Polytope:
      j["kind"] = "polytope";
      j["dim"] = body.dim();
      j["vertices"] = points_json(body.polytope().vertices);
      j["symmetric"] = body.symmetric();
      break;
    case BodyExpr::Kind::Ball:
      j["kind"] = "ball";
      j["dim"] = body.dim();
      break;
    case BodyExpr::Kind::LpSum: {
      j["kind"] = "lpsum";
      j["p"] = exponent_json(body.lp_sum().p);
      Json children = Json::array();
      for (const auto& c : body.lp_sum().children) children.push_back(to_json(c));
      j["children"] = std::move(children);
      break;
    }
    case BodyExpr::Kind::LinearImage:
      j["kind"] = "linear";
      j["matrix"] = matrix_json(body.linear_image().matrix);
      j["child"] = to_json(body.child());
      break;
    case BodyExpr::Kind::Translate:
      j["kind"] = "translate";
      j["offset"] = to_json(body.translation().offset);
      j["child"] = to_json(body.child());
      break;
  }
  return j;
}

inline BodyExpr body_from_json(const Json& j) {
  const Json& kind_j = detail::member(j, "kind");
  if (!kind_j.is_string()) detail::bad("field 'kind' must be a string");
  const std::string kind = kind_j.get<std::string>();
  BodyExpr out = [&] {
    if (kind == "polytope") {
      const Json& dim_j = detail::member(j, "dim");
      if (!dim_j.is_number_integer() || dim_j.get<int>() < 1) detail::bad("field 'dim' must be a positive integer");
      return BodyExpr::polytope(detail::points_of(detail::member(j, "vertices"), "vertices", dim_j.get<int>()));
    }
    if (kind == "ball") {
      const Json& dim_j = detail::member(j, "dim");
      if (!dim_j.is_number_integer() || dim_j.get<int>() < 1) detail::bad("field 'dim' must be a positive integer");
      return BodyExpr::ball(dim_j.get<int>());
    }
    if (kind == "lpsum") {
      const Json& cj = detail::member(j, "children");
      if (!cj.is_array() || cj.empty()) detail::bad("field 'children' must be a nonempty array");
      std::vector<BodyExpr> children;
      for (const auto& c : cj) children.push_back(body_from_json(c));
      return BodyExpr::lp_sum_node(exponent_of(detail::member(j, "p")), std::move(children));
    }
    if (kind == "linear")
      return BodyExpr::linear_image(detail::matrix_of(detail::member(j, "matrix"), "matrix"),
                                    body_from_json(detail::member(j, "child")));
    if (kind == "translate")
      return BodyExpr::translate(detail::vector_of(detail::member(j, "offset"), "offset"), body_from_json(detail::member(j, "child")));
    detail::bad("unknown body kind '" + kind + "' (expected polytope, ball, lpsum, linear or translate)");
  }();
  if (auto it = j.find("symmetric"); it != j.end()) {
    if (!it->is_boolean()) detail::bad("field 'symmetric' must be a boolean");
    if (it->get<bool>() && !out.symmetric())
      fail(ErrorCode::SymmetryFlagViolated, "body is marked symmetric but is not 0-symmetric");
  }
  return out;
}

inline Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::InvalidBody, std::string("malformed JSON: ") + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidBody, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

inline BodyExpr read_body(const std::string& path) { return body_from_json(read_json_file(path)); }

// ---- maps and estimates ----

inline Json to_json(const LinearMap& map) {
  Json j;
  j["matrix"] = matrix_json(map.matrix());
  j["pre"] = to_json(map.pre());
  j["post"] = to_json(map.post());
  return j;
}

inline LinearMap map_from_json(const Json& j) {
  const Mat m = detail::matrix_of(detail::member(j, "matrix"), "matrix");
  Vec pre, post;
  if (auto it = j.find("pre"); it != j.end()) pre = detail::vector_of(*it, "pre");
  if (auto it = j.find("post"); it != j.end()) post = detail::vector_of(*it, "post");
  return LinearMap(m, pre, post);
}

inline Json to_json(const DistanceEstimate& e) {
  Json j;
  j["upper"] = e.upper;
  j["certified"] = e.certified ? Json(*e.certified) : Json(nullptr);
  j["witness"] = to_json(e.witness);
  j["shift"] = to_json(e.shift.size() ? e.shift : Vec::Zero(e.witness.dim()));
  j["restarts_used"] = e.restarts_used;
  j["best_restart_seed"] = e.best_restart_seed;
  j["residual"] = e.residual;
  return j;
}

// ---- certificates ----

inline Json to_json(const ContactCertificate& c) {
  Json j;
  j["value"] = c.value();
  j["r"] = c.r;
  j["R"] = c.R;
  j["inner"] = points_json(c.inner);
  j["lambda"] = to_json(c.lambda);
  j["outer"] = points_json(c.outer);
  j["mu"] = to_json(c.mu);
  j["balanced"] = c.balanced;
  j["residual"] = c.residual;
  return j;
}

inline ContactCertificate certificate_from_json(const Json& j) {
  ContactCertificate c;
  c.r = detail::number(detail::member(j, "r"), "r");
  c.R = detail::number(detail::member(j, "R"), "R");
  const Json& inner = detail::member(j, "inner");
  if (!inner.is_array() || inner.empty() || !inner[0].is_array()) detail::bad("field 'inner' must be a nonempty array of points");
  const int n = static_cast<int>(inner[0].size());
  c.inner = detail::points_of(inner, "inner", n);
  c.outer = detail::points_of(detail::member(j, "outer"), "outer", n);
  c.lambda = detail::vector_of(detail::member(j, "lambda"), "lambda");
  c.mu = detail::vector_of(detail::member(j, "mu"), "mu");
  const Json& bal = detail::member(j, "balanced");
  if (!bal.is_boolean()) detail::bad("field 'balanced' must be a boolean");
  c.balanced = bal.get<bool>();
  if (auto it = j.find("residual"); it != j.end()) c.residual = detail::number(*it, "residual");
  return c;
}

inline Json to_json(const CertificateCheck& c) {
  Json j;
  j["ok"] = c.ok;
  j["residual"] = c.residual;
  j["sphere_error"] = c.sphere_error;
  j["boundary_error"] = c.boundary_error;
  if (!c.reason.empty()) j["reason"] = c.reason;
  return j;
}

// ---- suite reports ----

inline Json to_json(const Report& r) {
  Json j;
  j["suite"] = r.suite;
  Json cases = Json::array();
  for (const auto& c : r.cases) {
    Json cj;
    cj["seed"] = c.seed;
    cj["lhs"] = c.lhs;
    cj["rhs"] = c.rhs;
    cj["residual"] = c.residual;
    cj["pass"] = c.pass;
    if (c.witness_ok) cj["witness_ok"] = *c.witness_ok;
    cases.push_back(std::move(cj));
  }
  j["cases"] = std::move(cases);
  Json s;
  s["total"] = r.summary.total;
  s["passed"] = r.summary.passed;
  s["failed"] = r.summary.failed;
  s["max_residual"] = r.summary.max_residual;
  s["witness_failures"] = r.summary.witness_failures;
  if (!r.summary.note.empty()) s["note"] = r.summary.note;
  j["summary"] = std::move(s);
  return j;
}

}  // namespace bm::io
