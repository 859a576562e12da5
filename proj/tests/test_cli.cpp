#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "bm/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs bmtool with the given arguments; stderr is discarded.
Outcome bmtool(const std::string& args) {
  const std::string cmd = std::string(BMTOOL_PATH) + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string body(const char* name) { return std::string(BM_BODIES_DIR) + "/" + name + ".json"; }

fs::path scratch(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "bmtool_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Cli, BodyStandardMatchesSampleFile) {
  const Outcome r = bmtool("body --standard cube --dim 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(body("cube2")));
}

TEST(Cli, BodyFileRoundTrips) {
  for (const char* name : {"cross3", "hexagon", "hanner3", "lp4_square_segment", "triangle"}) {
    const Outcome r = bmtool("body --in " + body(name));
    ASSERT_EQ(r.code, 0) << name;
    const auto again = bm::io::body_from_json(bm::io::parse_text(r.out));
    EXPECT_EQ(bm::io::dump(bm::io::to_json(again)), r.out) << name;
  }
}

TEST(Cli, DistanceExample) {
  const std::string args = "distance --a " + body("cross3") + " --b " + body("cube3") + " --restarts 200 --seed 7";
  const Outcome r = bmtool(args);
  ASSERT_EQ(r.code, 0);
  const auto j = bm::io::parse_text(r.out);
  EXPECT_NEAR(j["upper"].get<double>(), 1.80, 0.02);
  EXPECT_EQ(j["restarts_used"], 200);
  EXPECT_EQ(bmtool(args).out, r.out);
}

TEST(Cli, DistanceSymmetricFlag) {
  const Outcome bad = bmtool("distance --a " + body("triangle") + " --b " + body("hexagon") + " --symmetric true --restarts 2");
  EXPECT_EQ(bad.code, 2);
  const Outcome ok = bmtool("distance --a " + body("triangle") + " --b " + body("hexagon") + " --restarts 10");
  EXPECT_EQ(ok.code, 0);
}

TEST(Cli, CertifyAndVerify) {
  const fs::path cert = scratch("cube2_cert.json");
  const Outcome r = bmtool("certify --body " + body("cube2") + " --out " + cert.string());
  ASSERT_EQ(r.code, 0);
  const auto j = bm::io::read_json_file(cert.string());
  EXPECT_NEAR(j["value"].get<double>(), std::sqrt(2.0), 1e-12);

  const Outcome v = bmtool("verify-certificate --cert " + cert.string() + " --body " + body("cube2"));
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(bm::io::parse_text(v.out)["ok"], true);

  auto tampered = j;
  tampered["lambda"][0] = 2.0;
  const fs::path bad = scratch("cube2_bad.json");
  std::ofstream(bad) << bm::io::dump(tampered);
  const Outcome w = bmtool("verify-certificate --cert " + bad.string());
  EXPECT_EQ(w.code, 2);
  EXPECT_EQ(bm::io::parse_text(w.out)["ok"], false);
}

TEST(Cli, CertifyRejectsUncertifiablePosition) {
  const fs::path f = scratch("stretched.json");
  std::ofstream(f) << R"({"kind":"polytope","dim":2,"vertices":[[2,0],[0,1],[-2,0],[0,-1]]})";
  EXPECT_EQ(bmtool("certify --body " + f.string()).code, 2);
}

TEST(Cli, TheoremSuiteExample) {
  const std::string args = "theorem --suite thm-3d-cones --cases 2 --seed 1 --tol 0.03 --restarts 40";
  const Outcome r = bmtool(args);
  ASSERT_EQ(r.code, 0);
  const auto j = bm::io::parse_text(r.out);
  EXPECT_EQ(j["suite"], "thm-3d-cones");
  EXPECT_EQ(j["summary"]["total"], 2);
  EXPECT_EQ(j["summary"]["failed"], 0);
}

TEST(Cli, EquilateralCsv) {
  const Outcome r = bmtool("equilateral --N 2 --count 2 --restarts 20");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
  EXPECT_EQ(r.out.rfind("1,", 0), 0u) << r.out;
  EXPECT_EQ(bmtool("equilateral --N 2 --count 3").code, 2);
}

TEST(Cli, Render) {
  const Outcome r = bmtool("render --body " + body("cube2") + " --body " + body("cross2"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("<svg", 0), 0u);
  EXPECT_EQ(bmtool("render --body " + body("cube3")).code, 2);
  EXPECT_EQ(bmtool("render").code, 2);
}

TEST(Cli, RenderWitness) {
  const fs::path est = scratch("hex_diamond.json");
  ASSERT_EQ(bmtool("distance --a " + body("hexagon") + " --b " + body("cross2") + " --restarts 20 --out " + est.string()).code, 0);
  const Outcome r = bmtool("render --body " + body("hexagon") + " --body " + body("cross2") + " --witness " + est.string());
  ASSERT_EQ(r.code, 0);
  std::size_t paths = 0;
  for (std::size_t at = r.out.find("<path"); at != std::string::npos; at = r.out.find("<path", at + 1)) ++paths;
  EXPECT_EQ(paths, 3u);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(bmtool("").code, 2);
  EXPECT_EQ(bmtool("frobnicate").code, 2);
  EXPECT_EQ(bmtool("distance --a " + body("cube2")).code, 2);
  EXPECT_EQ(bmtool("distance --a /nonexistent.json --b " + body("cube2")).code, 2);
  EXPECT_EQ(bmtool("distance --a " + body("cube2") + " --b " + body("cube3")).code, 2);
  EXPECT_EQ(bmtool("theorem --suite nope").code, 2);
  EXPECT_EQ(bmtool("body --hanner 'l1(seg,'").code, 2);
  EXPECT_EQ(bmtool("--restarts 0 body --standard cube --dim 2").code, 2);
}
