#include <gtest/gtest.h>

#include <fstream>
#include <numbers>
#include <sstream>

#include "l1compat/dsl.hpp"
#include "l1compat/report.hpp"

using namespace l1c;

namespace {

std::string read_sample(const std::string& name) {
  std::ifstream in(std::string(L1COMPAT_SAMPLES_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConditionReport run(const std::string& name, const ReportOptions& opt = {}) {
  const std::string src = read_sample(name);
  return check(parse_system(src), opt, src);
}

}  // namespace

TEST(Report, Fnv1a) {
  EXPECT_EQ(fnv1a64(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a64("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a64("foobar"), "85944171f73967e8");
}

TEST(Report, DivCurlFields) {
  const auto r = run("div_curl.sys");
  const auto j = to_json(r);
  EXPECT_EQ(j["tool"], "l1compat");
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_EQ(j["input_hash"], fnv1a64(read_sample("div_curl.sys")));
  EXPECT_EQ(j["elliptic"]["verdict"], "numerically_positive");
  EXPECT_EQ(j["I_A_basis"], nlohmann::ordered_json::parse(R"([["1","0","0","0"]])"));
  EXPECT_EQ(j["K_C_basis"], nlohmann::ordered_json::parse(R"([["0","0","0","1"]])"));
  EXPECT_EQ(j["canceling"], false);
  EXPECT_EQ(j["cocanceling"], false);
  EXPECT_EQ(j["CC"]["holds"], true);
  EXPECT_TRUE(j["CC"]["witness"].is_null());
  // k = 1 < n = 3
  EXPECT_TRUE(j["weak"].is_null());
  EXPECT_TRUE(j["CWC"].is_null());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].code, "weak_not_applicable");
  EXPECT_EQ(exit_code(r), 0);
  for (const char* key : {"tool", "version", "input_hash", "seed", "tolerances", "system", "elliptic", "I_A_basis",
                          "K_C_basis", "canceling", "cocanceling", "CC", "weak", "CWC", "diagnostics"})
    EXPECT_TRUE(j.contains(key)) << key;
}

TEST(Report, WeakCancellationFailsForLaplacian) {
  const auto r = run("laplacian2.sys");
  ASSERT_TRUE(r.weak.has_value());
  EXPECT_FALSE(r.weak->holds);
  ASSERT_EQ(r.weak->moments.size(), 2u);
  for (const auto& m : r.weak->moments) EXPECT_NEAR(m.norm, 2 * std::numbers::pi, 1e-8);
  ASSERT_TRUE(r.cwc.has_value());
  EXPECT_FALSE(r.cwc->holds);
  const auto j = to_json(r);
  EXPECT_TRUE(j["weak"]["moment_map"].contains("error_estimate"));
  EXPECT_TRUE(j["weak"]["moment_map"].contains("matrix"));
}

TEST(Report, VacuousCwcUnderDivergenceConstraint) {
  const auto r = run("laplacian2_div.sys");
  EXPECT_TRUE(r.cocanceling);
  ASSERT_TRUE(r.cc.has_value());
  EXPECT_TRUE(r.cc->holds);
  ASSERT_TRUE(r.cwc.has_value());
  EXPECT_TRUE(r.cwc->holds);
  EXPECT_TRUE(r.cwc->vacuous);
  ASSERT_TRUE(r.weak.has_value());
  EXPECT_FALSE(r.weak->holds);
}

TEST(Report, NonEllipticDiagnostic) {
  const auto r = run("fourth_order_r4.sys");
  EXPECT_EQ(r.elliptic.verdict, Ellipticity::No);
  ASSERT_TRUE(r.elliptic.witness_xi.has_value());
  EXPECT_EQ(*r.elliptic.witness_xi, (RationalVector{0, 0, 1, 0}));
  ASSERT_TRUE(r.elliptic.kernel_vector.has_value());
  EXPECT_EQ(*r.elliptic.kernel_vector, (RationalVector{1, 0}));
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0].code, "not_elliptic_hypothesis_violated");
  EXPECT_FALSE(r.cc.has_value());
  EXPECT_FALSE(r.canceling.has_value());
  EXPECT_EQ(exit_code(r), 0);
  const auto j = to_json(r);
  EXPECT_EQ(j["elliptic"]["verdict"], "no");
  EXPECT_TRUE(j["CC"].is_null());
}

TEST(Report, OptionsAreEchoed) {
  ReportOptions opt;
  opt.seed = 17;
  opt.weak_tol = 1e-6;
  const auto j = to_json(run("gradient2.sys", opt));
  EXPECT_EQ(j["seed"], 17);
  EXPECT_EQ(j["tolerances"]["weak_tol"], 1e-6);
}

TEST(Report, TextRendering) {
  const auto s = to_text(run("div_curl.sys"));
  EXPECT_NE(s.find("CC: holds"), std::string::npos);
  EXPECT_NE(s.find("cocanceling: no"), std::string::npos);
}

TEST(ReportProperty, ByteIdenticalAcrossRuns) {
  for (const char* name : {"div_curl.sys", "laplacian2.sys", "laplacian2_div.sys", "fourth_order_r4.sys", "gradient2.sys"}) {
    const auto a = to_json(run(name)).dump(2);
    const auto b = to_json(run(name)).dump(2);
    EXPECT_EQ(a, b) << name;
  }
}

TEST(ReportProperty, HashTracksInputBytes) {
  const std::string src = read_sample("div_curl.sys");
  const auto sys = parse_system(src);
  EXPECT_NE(check(sys, {}, src).input_hash, check(sys, {}, src + "\n").input_hash);
}
