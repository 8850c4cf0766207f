#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <nlohmann/json.hpp>
#include <string>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " KLOOS_CLI_PATH " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

nlohmann::json row0(const Run& r) { return nlohmann::json::parse(r.out)["rows"][0]; }

}  // namespace

TEST(Cli, PrimeSum) {
  const auto r = run("sum --kind prime --q 7 --a 1 --b 1 --X 10 --format json");
  ASSERT_EQ(r.code, 0);
  const auto row = row0(r);
  EXPECT_NEAR(row["value_re"].get<double>(), 1.8705, 1e-4);
  EXPECT_NEAR(row["value_im"].get<double>(), 0.7818, 1e-4);
  EXPECT_EQ(row["terms"].get<int>(), 3);
  EXPECT_TRUE(row.contains("err"));
  for (const char* f : {"value_re", "value_im", "err", "terms", "bound", "ratio", "params", "method"})
    EXPECT_TRUE(row.contains(f)) << f;
}

TEST(Cli, CountNu) {
  const auto r = run("count --kind nu --q 8 --A 1");
  ASSERT_EQ(r.code, 0);
  const auto row = row0(r);
  EXPECT_EQ(row["value_re"].get<unsigned long long>(), 4u);
  EXPECT_EQ(row["bound"].get<double>(), 4.0);
  EXPECT_EQ(row["method"], "multiplicative");
}

TEST(Cli, BoundsThreshold) {
  const auto r = run("bounds --kind ck3 --k 3");
  ASSERT_EQ(r.code, 0);
  const auto row = row0(r);
  EXPECT_EQ(row["params"]["rational"], "37/38");
  EXPECT_NEAR(row["value_re"].get<double>(), 0.973684, 1e-6);
}

TEST(Cli, CsvShape) {
  const auto r = run("sweep --q 1009 --grid geometric:180:1009:5 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "value_re,value_im,err,terms,bound,ratio,params,method");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 11);
}

TEST(Cli, ChecksPass) {
  EXPECT_EQ(run("sum --kind lambda --q 1000 --a 3 --b 7 --X 20000 --check").code, 0);
  EXPECT_EQ(run("sum --kind complete --q 997 --a 3 --b 7 --check").code, 0);
  EXPECT_EQ(run("count --kind kappa --q 360 --a 7 --b 11 --check").code, 0);
  EXPECT_EQ(run("count --kind I --q 101 --N 10 --N1 25 --check").code, 0);
  EXPECT_EQ(run("count --kind J --q 101 --M 10 --check").code, 0);
  EXPECT_EQ(run("vaughan --q 101 --a 1 --b 1 --X 500 --V 5 --check").code, 0);
  EXPECT_EQ(run("vaughan --q 10007 --a 2 --b 3 --X 100000 --check").code, 0);
}

TEST(Cli, Solve) {
  const auto r = run("solve --kind theorem2 --q 13 --m 10 --N 3");
  ASSERT_EQ(r.code, 0);
  const auto row = row0(r);
  EXPECT_EQ(row["value_re"].get<int>(), 1);
  EXPECT_EQ(row["params"]["witness"], "5 5 5");
  const auto s = run("solve --kind theorem3 --q 11 --a 1 --b 1 --k 3 --m 2 --N 10");
  ASSERT_EQ(s.code, 0);
  EXPECT_EQ(row0(s)["value_re"].get<int>(), 4);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("frobnicate").code, 64);
  EXPECT_EQ(run("sum --kind prime --q 7 --bogus 1").code, 64);
  EXPECT_EQ(run("sum --kind prime --q 7 --X notanumber").code, 64);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("sum --kind prime --q 6 --a 2 --b 1 --X 10").code, 2);
  EXPECT_EQ(run("sum --kind prime --q 1 --X 10").code, 2);
  EXPECT_EQ(run("count --kind J --q 7 --M 4").code, 2);
  EXPECT_EQ(run("solve --kind theorem2 --q 15 --N 3").code, 2);
  EXPECT_EQ(run("vaughan --q 1009 --X 5000 --V 1").code, 2);
  EXPECT_EQ(run("sum --kind lambda --q 7 --X 200000000").code, 2);
  EXPECT_EQ(run("bounds --kind ck3 --k 2").code, 2);
  EXPECT_EQ(run("sweep --q 1009 --grid geometric:1:2").code, 2);
}

TEST(Cli, DeterministicAcrossWorkers) {
  const std::string args = "vaughan --q 10007 --a 2 --b 3 --X 300000";
  const auto one = run(args, "KLOOS_WORKERS=1");
  const auto four = run(args, "KLOOS_WORKERS=4");
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out, four.out);
}
