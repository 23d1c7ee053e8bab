#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "json.hpp"
#include "vecdiff/document.hpp"

using namespace vecdiff;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

std::filesystem::path scratch(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("vecdiff_cli_" + name);
  std::ofstream(path) << content;
  return path;
}

RunResult run(const std::string& args, const std::string& stdin_text = "") {
  const auto in = scratch("stdin", stdin_text);
  const std::string cmd = std::string(VECDIFF_CLI_PATH) + " " + args + " < " + in.string() + " 2>/dev/null";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return res;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), n);
  const int status = pclose(pipe);
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

}  // namespace

TEST(CliSymmetrizer, ApplyAveragesOffDiagonal) {
  const auto a = scratch("a.json", R"({"schema_version":"1","kind":"symmetrizer","dims":{"d":2,"p":1,"r":2},"data":[0,1,0,0],"meta":{}})");
  const RunResult r = run("symmetrizer --d 2 --r 2 --apply " + a.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(parse_document(r.out).data, (Vec{0, 0.5, 0.5, 0}));
}

TEST(CliSymmetrizer, StdinCsv) {
  const RunResult r = run("symmetrizer --d 2 --r 2 --apply - --format csv", "0,1,0,0\n");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(parse_csv_numbers(r.out), (Vec{0, 0.5, 0.5, 0}));
}

TEST(CliSymmetrizer, MaterializeIdentity) {
  const RunResult r = run("symmetrizer --d 3 --r 1 --materialize");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(parse_document(r.out).data, (Vec{1, 1, 1, 2, 2, 1, 3, 3, 1}));
}

TEST(CliSymmetrizer, MaterializedRowsSumToOne) {
  const RunResult r = run("symmetrizer --d 2 --r 3 --materialize");
  ASSERT_EQ(r.code, 0);
  const VectorDocument doc = parse_document(r.out);
  std::vector<double> sums(8, 0.0);
  for (std::size_t k = 0; k < doc.data.size(); k += 3) sums[static_cast<std::size_t>(doc.data[k]) - 1] += doc.data[k + 2];
  for (double s : sums) EXPECT_NEAR(s, 1.0, 1e-15);
}

TEST(CliSymmetrizer, Errors) {
  EXPECT_EQ(run("symmetrizer --d 2 --r 2 --apply -", "1,2,3").code, 3);
  EXPECT_EQ(run("symmetrizer --d 2 --r 2 --apply -", "{broken").code, 2);
  EXPECT_EQ(run("symmetrizer --d 2 --r 2").code, 2);
  EXPECT_EQ(run("symmetrizer --d 2 --r 2 --apply - --materialize", "1,2,3,4").code, 2);
  EXPECT_EQ(run("symmetrizer --r 2 --materialize").code, 2);
}

TEST(CliGaussian, SecondDerivativeAtOrigin) {
  const RunResult r = run("gaussian --d 1 --r 2 --x 0");
  ASSERT_EQ(r.code, 0);
  const VectorDocument doc = parse_document(r.out);
  EXPECT_EQ(doc.kind, DocKind::Deriv);
  EXPECT_NEAR(doc.data[0], -1.0 / std::sqrt(2 * std::numbers::pi), 1e-16);
}

TEST(CliGaussian, AllPathsAgree) {
  const auto sigma = scratch("sigma.csv", "1.0,0.3,0.3,0.8\n");
  const RunResult r = run("gaussian --d 2 --r 3 --x=0.4,-0.2 --path all --sigma " + sigma.string());
  ASSERT_EQ(r.code, 0);
  const VectorDocument doc = parse_document(r.out);
  EXPECT_EQ(doc.data.size(), 8u);
  EXPECT_LT(doc.meta["max_pairwise_deviation"].get<double>(), 1e-11);
  EXPECT_EQ(doc.meta["paths_compared"].size(), 3u);
}

TEST(CliGaussian, DensityAtOrderZero) {
  const RunResult r = run("gaussian --d 2 --r 0");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(parse_document(r.out).data[0], 1.0 / (2 * std::numbers::pi), 1e-16);
}

TEST(CliGaussian, HermitePolynomial) {
  const RunResult r = run("gaussian --d 1 --r 4 --x 0 --polynomial");
  ASSERT_EQ(r.code, 0);
  const VectorDocument doc = parse_document(r.out);
  EXPECT_EQ(doc.kind, DocKind::Hermite);
  EXPECT_DOUBLE_EQ(doc.data[0], 3.0);
}

TEST(CliGaussian, Errors) {
  EXPECT_EQ(run("gaussian --d 2 --r 1 --sigma -", "1,2,2,1").code, 4);
  EXPECT_EQ(run("gaussian --d 1 --r 4 --path iterative").code, 5);
  EXPECT_EQ(run("gaussian --d 2 --r 1 --x 1,2,3").code, 3);
  EXPECT_EQ(run("gaussian --d 1 --r 1 --path nope").code, 2);
}

TEST(CliIndex, ToPosition) {
  const RunResult r = run("index --d 2 --r 2 --to-pos 1,2");
  ASSERT_EQ(r.code, 0);
  const VectorDocument doc = parse_document(r.out);
  EXPECT_EQ(doc.data[0], 2.0);
  EXPECT_EQ(doc.meta["orbit_size"], 2);
  EXPECT_EQ(doc.meta["canonical"], nlohmann::json::array({1, 2}));
}

TEST(CliIndex, ToMultiIndex) {
  const RunResult r = run("index --d 3 --r 4 --to-multi 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(parse_document(r.out).data, (Vec{1, 1, 1, 1, 1}));
}

TEST(CliIndex, ScriptedRoundTrip) {
  for (int pos = 1; pos <= 27; ++pos) {
    const RunResult m = run("index --d 3 --r 3 --to-multi " + std::to_string(pos) + " --format csv");
    ASSERT_EQ(m.code, 0);
    const Vec v = parse_csv_numbers(m.out);
    const std::string list = std::to_string(static_cast<int>(v[1])) + "," + std::to_string(static_cast<int>(v[2])) +
                             "," + std::to_string(static_cast<int>(v[3]));
    const RunResult p = run("index --d 3 --r 3 --to-pos " + list + " --format csv");
    ASSERT_EQ(p.code, 0);
    EXPECT_EQ(parse_csv_numbers(p.out)[0], pos);
  }
}

TEST(CliIndex, RangeErrors) {
  EXPECT_EQ(run("index --d 2 --r 2 --to-multi 5").code, 2);
  EXPECT_EQ(run("index --d 2 --r 2 --to-pos 1,3").code, 2);
  EXPECT_EQ(run("index --d 2 --r 3 --to-pos 1,2").code, 2);
}

TEST(CliMoments, GaussianFourthMoment) {
  const auto k = scratch("k.json", R"({"schema_version":"1","kind":"cumulants","dims":{"d":1,"p":1,"r":2},"data":[0,1],"meta":{}})");
  const RunResult r = run("moments --direction k2m --input " + k.string() + " --r 4 --pad-zero");
  ASSERT_EQ(r.code, 0);
  const VectorDocument doc = parse_document(r.out);
  EXPECT_EQ(doc.kind, DocKind::Moments);
  EXPECT_NEAR(doc.order_slice(4)[0], 3.0, 1e-12);
  EXPECT_EQ(run("moments --direction k2m --input " + k.string() + " --r 4").code, 3);
}

TEST(CliMoments, RoundTrip) {
  const std::string kappa = "0.3,-0.1, 1.0,0.2,0.2,0.7, 0.05,0.01,0.01,0.02,0.01,0.02,0.02,-0.03";
  const RunResult m = run("moments --direction k2m --input - --d 2 --r 3", kappa);
  ASSERT_EQ(m.code, 0);
  const VectorDocument mu = parse_document(m.out);
  EXPECT_LT(mu.meta["roundtrip_max_error"].get<double>(), 1e-10);
  const RunResult k = run("moments --direction m2k --input - --r 3", m.out);
  ASSERT_EQ(k.code, 0);
  const Vec back = parse_document(k.out).data;
  const Vec orig = parse_csv_numbers(kappa);
  for (std::size_t i = 0; i < orig.size(); ++i) EXPECT_NEAR(back[i], orig[i], 1e-10);
}

TEST(CliMoments, OrderOnePassthrough) {
  const RunResult r = run("moments --direction k2m --input - --d 2 --r 1", "0.25,-4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(parse_document(r.out).data, (Vec{0.25, -4}));
}

TEST(CliSelfcheck, SeededGaussianSuite) {
  const RunResult r = run("selfcheck --suite gaussian --seed 7");
  ASSERT_EQ(r.code, 0);
  const auto report = nlohmann::json::parse(r.out);
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_EQ(report["seed"], 7);
  EXPECT_EQ(run("selfcheck --suite gaussian --seed 7").out, r.out);
}

TEST(CliSelfcheck, UnknownSuite) { EXPECT_EQ(run("selfcheck --suite nope").code, 2); }

TEST(CliSelfcheck, NoSubcommand) { EXPECT_EQ(run("").code, 2); }
