// bmtool: command-line front end for the Banach-Mazur toolkit.
//
// Exit status: 0 success, 2 invalid input or violated hypothesis, 1 internal
// failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bm/certificate.hpp"
#include "bm/constructions.hpp"
#include "bm/distance.hpp"
#include "bm/io.hpp"
#include "bm/suites.hpp"
#include "bm/svg.hpp"

namespace {

using bm::BodyExpr;
using bm::ErrorCode;
using bm::io::Json;

struct Globals {
  std::uint64_t seed = 0;
  double tol = 0.03;
  int restarts = 200;
  std::string out;
  unsigned threads = 0;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  if (!f) bm::fail(ErrorCode::InvalidBody, "cannot write '" + g.out + "'");
  f << text;
}

void emit_json(const Globals& g, const Json& j) { emit(g, bm::io::dump(j)); }

struct BodySource {
  std::string file;
  std::string hanner;
  std::string standard;
  int dim = 0;
  std::optional<int> m;
  bool position = false;
};

BodyExpr load_body(const BodySource& src) {
  const int given = !src.file.empty() + !src.hanner.empty() + !src.standard.empty();
  if (given != 1) bm::fail(ErrorCode::InvalidBody, "give exactly one of --in, --hanner, --standard");
  if (!src.file.empty()) return bm::io::read_body(src.file);
  if (!src.hanner.empty()) {
    const auto spec = bm::parse_hanner(src.hanner);
    return src.position ? bm::hanner_in_position(spec).body : bm::hanner(spec);
  }
  return bm::standard_body(src.standard, src.dim, src.m);
}

bm::DistanceConfig distance_config(const Globals& g, bool symmetric) {
  bm::DistanceConfig dc;
  dc.restarts = g.restarts;
  dc.seed = g.seed;
  dc.symmetric = symmetric;
  dc.threads = g.threads;
  return dc;
}

bool resolve_symmetric(const std::string& mode, const BodyExpr& a, const BodyExpr& b) {
  if (mode == "true") return true;
  if (mode == "false") return false;
  return a.symmetric() && b.symmetric();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Banach-Mazur distance toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "base seed; restart/case i uses seed + i")->capture_default_str();
  app.add_option("--tol", g.tol, "theorem suite tolerance")->capture_default_str();
  app.add_option("--restarts", g.restarts, "multi-start restarts")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "write output here instead of stdout");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware concurrency)");

  // body
  auto* body_cmd = app.add_subcommand("body", "build or normalize a body and print its JSON");
  BodySource body_src;
  body_cmd->add_option("--in", body_src.file, "body JSON file");
  body_cmd->add_option("--hanner", body_src.hanner, "Hanner grammar, e.g. \"l1(seg,linf(seg,seg))\"");
  body_cmd->add_flag("--position", body_src.position, "place the Hanner polytope in its John position");
  body_cmd->add_option("--standard", body_src.standard, "cross_polytope, cube, simplex_regular_centered, regular_polygon, polygon_disc, segment");
  body_cmd->add_option("--dim", body_src.dim, "dimension for --standard");
  body_cmd->add_option("--m", body_src.m, "vertex count for regular_polygon / polygon_disc");

  // distance
  auto* dist_cmd = app.add_subcommand("distance", "estimate d_BM(A, B)");
  std::string dist_a, dist_b, sym_mode = "auto";
  dist_cmd->add_option("--a", dist_a, "first body JSON")->required();
  dist_cmd->add_option("--b", dist_b, "second body JSON")->required();
  dist_cmd->add_option("--symmetric", sym_mode, "fix translations at zero")
      ->check(CLI::IsMember({"auto", "true", "false"}))
      ->capture_default_str();

  // certify
  auto* cert_cmd = app.add_subcommand("certify", "certify d_BM(K, B^n) in the given position");
  std::string cert_body;
  cert_cmd->add_option("--body", cert_body, "body JSON")->required();

  // verify-certificate
  auto* vcert_cmd = app.add_subcommand("verify-certificate", "re-check a certificate's arithmetic (no LP)");
  std::string vcert_file, vcert_body;
  vcert_cmd->add_option("--cert", vcert_file, "certificate JSON from 'certify'")->required();
  vcert_cmd->add_option("--body", vcert_body, "optionally also check contacts against this body");

  // theorem
  auto* thm_cmd = app.add_subcommand("theorem", "run a randomized theorem suite");
  bm::SuiteConfig suite_cfg;
  std::string suite_name;
  thm_cmd->add_option("--suite", suite_name, "suite name")->required();
  thm_cmd->add_option("--cases", suite_cfg.cases, "number of random cases")->capture_default_str();
  thm_cmd->add_option("--m", suite_cfg.m, "number of l_1 summands / cone apexes")->capture_default_str();
  thm_cmd->add_option("--N", suite_cfg.N, "equilateral family parameter")->capture_default_str();
  thm_cmd->add_option("--count", suite_cfg.count, "equilateral family size")->capture_default_str();

  // equilateral
  auto* eq_cmd = app.add_subcommand("equilateral", "pairwise distance matrix of the equilateral family (CSV)");
  int eq_N = 2, eq_count = 2;
  eq_cmd->add_option("--N", eq_N, "family parameter")->capture_default_str();
  eq_cmd->add_option("--count", eq_count, "family size")->capture_default_str();

  // render
  auto* render_cmd = app.add_subcommand("render", "SVG overlay of planar bodies");
  std::vector<std::string> render_bodies;
  std::string render_witness;
  render_cmd->add_option("--body", render_bodies, "body JSON (repeatable)");
  render_cmd->add_option("--witness", render_witness,
                         "distance JSON for bodies A, B: draws A + u, T(B), rho (A + u)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*body_cmd) {
      emit_json(g, bm::io::to_json(load_body(body_src)));
    } else if (*dist_cmd) {
      const BodyExpr a = bm::io::read_body(dist_a);
      const BodyExpr b = bm::io::read_body(dist_b);
      const auto est = bm::estimate_distance(a, b, distance_config(g, resolve_symmetric(sym_mode, a, b)));
      emit_json(g, bm::io::to_json(est));
    } else if (*cert_cmd) {
      const BodyExpr k = bm::io::read_body(cert_body);
      const auto res = bm::certify_euclidean_distance(k);
      emit_json(g, bm::io::to_json(res.certificate));
    } else if (*vcert_cmd) {
      const auto cert = bm::io::certificate_from_json(bm::io::read_json_file(vcert_file));
      std::optional<BodyExpr> body;
      if (!vcert_body.empty()) body = bm::io::read_body(vcert_body);
      const auto check = bm::verify_certificate(cert, body ? &*body : nullptr);
      emit_json(g, bm::io::to_json(check));
      if (!check.ok) return 2;
    } else if (*thm_cmd) {
      suite_cfg.seed = g.seed;
      suite_cfg.tol = g.tol;
      suite_cfg.restarts = g.restarts;
      suite_cfg.threads = g.threads;
      emit_json(g, bm::io::to_json(bm::theorem_suite(suite_name, suite_cfg)));
    } else if (*eq_cmd) {
      const auto family = bm::equilateral_family(eq_N, eq_count);
      const int k = static_cast<int>(family.size());
      std::vector<double> d(static_cast<std::size_t>(k * k), 1.0);
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          const double v = bm::estimate_distance(family[static_cast<std::size_t>(i)], family[static_cast<std::size_t>(j)],
                                                 distance_config(g, true))
                               .upper;
          d[static_cast<std::size_t>(i * k + j)] = d[static_cast<std::size_t>(j * k + i)] = v;
        }
      std::ostringstream csv;
      csv.precision(17);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) csv << (j ? "," : "") << d[static_cast<std::size_t>(i * k + j)];
        csv << "\n";
      }
      emit(g, csv.str());
    } else if (*render_cmd) {
      std::vector<BodyExpr> bodies;
      for (const auto& f : render_bodies) bodies.push_back(bm::io::read_body(f));
      if (!render_witness.empty()) {
        if (bodies.size() != 2) bm::fail(ErrorCode::InvalidBody, "--witness needs exactly two --body files (A and B)");
        const Json j = bm::io::read_json_file(render_witness);
        const auto T = bm::io::map_from_json(bm::io::detail::member(j, "witness"));
        const double rho = bm::io::detail::number(bm::io::detail::member(j, "upper"), "upper");
        bm::Vec u = bm::io::detail::vector_of(bm::io::detail::member(j, "shift"), "shift");
        const BodyExpr Au = bm::BodyExpr::translate(u, bodies[0]);
        bodies = {Au, bm::apply_map(T, bodies[1]), bm::apply_map(bm::LinearMap(rho * bm::Mat::Identity(2, 2)), Au)};
      }
      emit(g, bm::render_svg(bodies));
    }
  } catch (const bm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_validation() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
