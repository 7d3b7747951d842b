#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pwalk/cli.hpp"
#include "test_specs.hpp"

using namespace pwalk;

namespace {

std::string config(const std::string& name) { return std::string(PWALK_CONFIG_DIR) + "/" + name; }

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "pwalk_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  return {code, o.str(), e.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pwalk_harness_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

// Known-answer vectors of the reference Random123 distribution.
TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UnitInterval) {
  EXPECT_EQ(Philox4x32::to_unit(0, 0), 0.0);
  EXPECT_LT(Philox4x32::to_unit(0xffffffff, 0xffffffff), 1.0);
  EXPECT_EQ(Philox4x32::to_unit(0x80000000, 0), 0.5);
}

TEST(Philox, StreamsDiffer) {
  TrialStream a(42, 0), b(42, 1), c(43, 0);
  const double x = a.next();
  EXPECT_NE(x, b.next());
  EXPECT_NE(x, c.next());
}

TEST(Simulate, DeterministicForSeed) {
  const auto s = fixtures::lazy_perturbed();
  const auto r1 = simulate(s, 10, 1000, 42);
  const auto r2 = simulate(s, 10, 1000, 42);
  EXPECT_EQ(r1.counts, r2.counts);
  EXPECT_NE(r1.counts, simulate(s, 10, 1000, 43).counts);
}

TEST(Simulate, ThreadCountIrrelevant) {
  const auto s = fixtures::planar_skewed();
  const auto one = simulate(s, 12, 70001, 7, 1);
  EXPECT_EQ(one.counts, simulate(s, 12, 70001, 7, 3).counts);
  EXPECT_EQ(one.counts, simulate(s, 12, 70001, 7, 8).counts);
}

TEST(Simulate, OneStepIsExitLaw) {
  for (const auto& s : {fixtures::lazy_perturbed(), fixtures::wide_perturbed(), fixtures::planar_identity()}) {
    const std::uint64_t trials = 200000;
    const auto e = simulate(s, 1, trials, 11);
    s.q().fn().for_each([&](const Point& x, double w) {
      if (w > 0) {
        EXPECT_LE(std::abs(e.frequency(x) - w), 4.0 * std::sqrt(w / trials));
      }
    });
  }
}

TEST(Simulate, FreeWalkTotalVariation) {
  const auto s = fixtures::lazy_free();
  const std::uint64_t trials = 1000000;
  const auto e = simulate(s, 50, trials, 5);
  const auto exact = convolve_power(s.p(), 50);
  const double support = static_cast<double>(exact.fn().support().size());
  EXPECT_LE(total_variation(e, exact.fn()), 3.0 * std::sqrt(support / trials));
}

TEST(Simulate, ChiSquaredRepetitions) {
  const auto s = fixtures::wide_perturbed();
  const auto exact = perturbed_exact(s, 20, Route::kForwardDP);
  int passed = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) passed += chi_squared_test(simulate(s, 20, 20000, 1000 + r), exact.pmf.fn()).pass;
  EXPECT_GE(passed, 99);
}

TEST(Simulate, ChiSquaredRejectsWrongLaw) {
  const auto s = fixtures::lazy_perturbed();
  const auto other = perturbed_exact(fixtures::lazy_free(), 30, Route::kForwardDP);
  EXPECT_FALSE(chi_squared_test(simulate(s, 30, 400000, 3), other.pmf.fn()).pass);
}

TEST(Compare, SlopeOfPowerLaw) {
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {3, 1.5, 0.75, 0.375}), -1.0, 1e-14);
  EXPECT_THROW(loglog_slope({1, 2}, {1, 0}), Error);
}

TEST(Compare, ScaledErrorColumn) {
  const auto rep = compare(fixtures::planar_identity(), {8, 16, 32, 64});
  ASSERT_FALSE(rep.rows.empty());
  for (const auto& r : rep.rows) {
    EXPECT_FALSE(r.x[0] == 0 && r.x[1] == 0);
    EXPECT_NEAR(r.scaled_err, r.n * r.abs_err, 1e-15 * r.scaled_err);
    EXPECT_NEAR(r.baseline_scaled_err, r.n * r.baseline_abs_err, 1e-15 * r.baseline_scaled_err);
  }
  EXPECT_FALSE(rep.low_confidence);
}

TEST(Compare, LazyPerturbedGates) {
  const auto rep = compare(fixtures::lazy_perturbed(), {256, 1024, 4096});
  EXPECT_TRUE(rep.low_confidence);
  EXPECT_EQ(rep.refined_kind, "correction");
  EXPECT_LE(rep.slope, -0.4);
  EXPECT_NEAR(rep.baseline_slope, 0.0, 0.05);
  EXPECT_TRUE(rep.gates_pass());
}

TEST(Compare, FreeWalkSelfConsistent) {
  const auto rep = compare(fixtures::lazy_free(), {64, 256, 1024, 4096});
  EXPECT_EQ(rep.refined_kind, "edgeworth-4");
  for (double d : rep.route_deviation) EXPECT_LE(d, 1e-12);
  EXPECT_LE(rep.slope, -0.9);
  EXPECT_TRUE(rep.gates_pass());
}

TEST(Compare, GatesAreConfigurable) {
  CompareOptions o;
  o.gates.corrected_max = -1.5;
  const auto rep = compare(fixtures::lazy_perturbed(), {64, 128, 256, 512}, o);
  EXPECT_FALSE(rep.gates_pass());
}

TEST(Compare, RejectsBadLists) {
  const auto s = fixtures::lazy_perturbed();
  EXPECT_THROW(compare(s, {16}), Error);
  EXPECT_THROW(compare(s, {32, 16, 64}), Error);
  EXPECT_THROW(compare(s, {16, 16, 64}), Error);
}

TEST(Cli, PeriodicSpecRejected) {
  const auto r = run({"exact", "--spec", config("periodic.cfg"), "--n", "10"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Periodic"), std::string::npos);
}

TEST(Cli, MissingSpecFile) {
  EXPECT_EQ(run({"exact", "--spec", config("no_such.cfg"), "--n", "3"}).code, 1);
}

TEST(Cli, BadArguments) {
  EXPECT_EQ(run({"exact", "--spec", config("lazy_pert.cfg")}).code, 1);
  EXPECT_EQ(run({"exact", "--spec", config("lazy_pert.cfg"), "--n", "3", "--route", "magic"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, AllRoutesAgree) {
  const auto r = run({"exact", "--spec", config("lazy_pert.cfg"), "--route", "all", "--n", "100"});
  EXPECT_EQ(r.code, 0);
  const auto pos = r.err.find("deviation: ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LE(std::stod(r.err.substr(pos + 11)), 1e-12);
}

TEST(Cli, ExactCsvMatchesEngine) {
  const auto r = run({"exact", "--spec", config("lazy_pert.cfg"), "--n", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "# n=2,dim=1,route=dp\nx1,mass\n-2,0.050000000000000003\n-1,0.20000000000000001\n0,0.375\n1,0.29999999999999999\n"
            "2,0.074999999999999997\n");
}

TEST(Cli, ResourceLimit) {
  const auto r = run({"exact", "--spec", config("nu2_identity.cfg"), "--n", "100000"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, CompareWritesReportAndSummary) {
  const auto out = scratch("report.csv");
  std::filesystem::remove(out.string() + ".json");
  const auto r = run({"compare", "--spec", config("lazy_pert.cfg"), "--n-list", "256,1024,4096", "--out", out.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(slurp(out).rfind("# dim=1", 0), 0u);
  const auto j = io::Json::parse(slurp(out.string() + ".json"));
  EXPECT_EQ(j["schema"], "pwalk.compare/1");
  EXPECT_TRUE(j["low_confidence"].get<bool>());
  EXPECT_LE(j["slope"].get<double>(), -0.4);
}

TEST(Cli, StrictGateFailure) {
  const auto r = run({"compare", "--spec", config("lazy_pert.cfg"), "--n-list", "64,128", "--gate-corrected", "-3", "--strict"});
  EXPECT_EQ(r.code, 3);
}

TEST(Cli, ByteIdenticalOutputs) {
  const std::vector<std::vector<std::string>> cmds = {
      {"simulate", "--spec", config("lazy_pert.cfg"), "--n", "40", "--trials", "50000", "--seed", "9"},
      {"compare", "--spec", config("lazy_free.cfg"), "--n-list", "16,32,64,128", "--format", "json"},
      {"asymptotic", "--spec", config("nu2_identity.cfg"), "--n", "20"},
      {"coeffs", "--spec", config("wide.cfg"), "--order", "6", "--format", "json"},
      {"returns", "--spec", config("wide.cfg"), "--n", "30"},
  };
  for (const auto& c : cmds) {
    auto a = c, b = c;
    a.insert(a.end(), {"--out", scratch("a.out").string()});
    b.insert(b.end(), {"--out", scratch("b.out").string()});
    ASSERT_EQ(run(a).code, 0) << c[0];
    ASSERT_EQ(run(b).code, 0) << c[0];
    EXPECT_EQ(slurp(scratch("a.out")), slurp(scratch("b.out"))) << c[0];
  }
}

TEST(Cli, SimulateThreadsByteIdentical) {
  const std::vector<std::string> base = {"simulate", "--spec", config("wide.cfg"), "--n", "25", "--trials", "100000", "--format", "json"};
  auto a = base, b = base;
  a.insert(a.end(), {"--threads", "1"});
  b.insert(b.end(), {"--threads", "6"});
  EXPECT_EQ(run(a).out, run(b).out);
}

TEST(Cli, CoeffsExactFraction) {
  const auto r = run({"coeffs", "--spec", config("lazy_free.cfg")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("4,4,-0.010416666666666666,-1/96"), std::string::npos);
}

TEST(Cli, ReturnsAgree) {
  const auto r = run({"returns", "--spec", config("lazy_pert.cfg"), "--n", "50", "--format", "json"});
  EXPECT_EQ(r.code, 0);
  const auto j = io::Json::parse(r.out);
  EXPECT_EQ(j["returns"].size(), 50u);
  EXPECT_EQ(j["returns"][1]["f_perturbed"].get<double>(), 0.125);
}

TEST(Cli, IdentitiesTable) {
  const auto r = run({"identities", "--x", "0.5,2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.5,laguerre-reciprocal,"), std::string::npos);
  EXPECT_NE(r.out.find("2,hermite-half-line,"), std::string::npos);
}
