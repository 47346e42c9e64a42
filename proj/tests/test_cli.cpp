#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "verify_suite.hpp"

using namespace covqec;
using namespace covqec::cli;

TEST(CsvFormat, NumbersUseTwelveDigits) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(2.0 / 3.0 * 1e-7), "6.66666666667e-08");
  EXPECT_EQ(format_number(9.0), "9");
}

TEST(CsvFormat, HeaderAndRows) {
  SweepTable t;
  t.columns = {"n", "m", "p", "x"};
  t.rows.push_back({9, 3, 0.5, {0.25}});
  std::string csv = format_csv(t, kDefaultSeed);
  std::istringstream in(csv);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  EXPECT_EQ(l1, std::string("# seed=0xc0dec0de, version=") + COVQEC_VERSION);
  EXPECT_EQ(l2, "n,m,p,x");
  EXPECT_EQ(l3, "9,3,0.5,0.25");
}

TEST(Sweep, BoundGridIsDeterministicAcrossJobCounts) {
  SweepArgs a;
  a.family = "bound-grid";
  a.n = {9, 25, 10};
  a.m = {3, 5};
  a.p = {0.1, 0.5};
  a.jobs = 1;
  SweepTable one = run_sweep(a);
  a.jobs = 3;
  SweepTable three = run_sweep(a);
  EXPECT_EQ(format_csv(one, a.seed), format_csv(three, a.seed));
  ASSERT_FALSE(one.rows.empty());
  // lexicographic (n, m, p) order
  for (size_t i = 1; i < one.rows.size(); ++i) {
    const auto& p = one.rows[i - 1];
    const auto& q = one.rows[i];
    EXPECT_TRUE(std::tie(p.n, p.m, p.p) < std::tie(q.n, q.m, q.p) || (p.n == 9 && q.n == 25) ||
                (p.n == 25 && q.n == 10));
  }
}

TEST(Sweep, ThermoErasureRowsAndSkips) {
  SweepArgs a;
  a.family = "thermo-erasure";
  a.n = {9, 10};
  a.m = {3};
  a.jobs = 2;
  a.starts = 8;
  SweepTable t = run_sweep(a);
  ASSERT_EQ(t.rows.size(), 1u);
  ASSERT_EQ(t.skipped.size(), 1u);
  const auto& r = t.rows[0];
  EXPECT_LE(r.values[0], r.values[1]);
  EXPECT_LE(r.values[1], r.values[2] + 1e-8);
  SweepTable again = run_sweep(a);
  EXPECT_EQ(format_csv(t, a.seed), format_csv(again, a.seed));
}

TEST(Sweep, RejectsBadArguments) {
  SweepArgs a;
  a.family = "bound-grid";
  a.n = {9};
  a.m = {3};
  a.jobs = 0;
  EXPECT_ANY_THROW(run_sweep(a));
  a.jobs = 1;
  a.family = "nope";
  EXPECT_ANY_THROW(run_sweep(a));
}

TEST(Sweep, SandwichViolationAborts) {
  SweepRow row{9, 3, 1.0, {}};
  EXPECT_NO_THROW(check_sandwich(row, 0.01, 0.02, 0.03));
  EXPECT_THROW(check_sandwich(row, 0.03, 0.02, 0.04), SandwichViolation);
  EXPECT_THROW(check_sandwich(row, 0.01, 0.05, 0.04), SandwichViolation);
}

TEST(Verify, FilterSelection) {
  auto all = verify::criteria();
  ASSERT_EQ(all.size(), 14u);
  for (size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i].id, static_cast<int>(i) + 1);
  auto count = [&](const std::string& f) {
    int c = 0;
    for (const auto& info : all) c += verify::selected(info, f) ? 1 : 0;
    return c;
  };
  EXPECT_EQ(count(""), 14);
  EXPECT_EQ(count("ac6"), 1);
  EXPECT_EQ(count("6,12"), 2);
  EXPECT_EQ(count("twirl"), 1);
  EXPECT_EQ(count("nonexistent"), 0);
  EXPECT_GE(count("erasure"), 3);
}

TEST(Verify, PerturbedToleranceFails) {
  verify::SuiteOptions o;
  o.filter = "6";
  auto ok = verify::run_suite(o);
  ASSERT_EQ(ok.size(), 1u);
  EXPECT_TRUE(ok[0].pass());
  o.tolerance_scale = 1e-3;
  auto bad = verify::run_suite(o);
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_FALSE(bad[0].pass());
  EXPECT_NE(verify::format_line(bad[0]).find("FAIL"), std::string::npos);
}

TEST(Commands, GuardedMapsExceptions) {
  EXPECT_EQ(guarded([] { return kExitOk; }), kExitOk);
  EXPECT_EQ(guarded([]() -> int { throw std::invalid_argument("x"); }), kExitInput);
  EXPECT_EQ(guarded([]() -> int { throw SandwichViolation("x"); }), kExitFailed);
}
