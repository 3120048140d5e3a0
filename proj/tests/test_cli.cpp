#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pnpair/cli.hpp"

namespace {

struct Result {
  int rc;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "pnpair");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = pnpair::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

std::vector<nlohmann::json> json_lines(const std::string& s) {
  std::vector<nlohmann::json> v;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) v.push_back(nlohmann::json::parse(line));
  return v;
}

}  // namespace

TEST(Cli, ByteIdenticalReruns) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"factor", "--p", "5", "--m", "24"},
           {"suff", "--p", "5", "--k", "2", "--m", "48", "--nu", "9.5"},
           {"sieve", "--p", "5", "--k", "2", "--m", "24"},
           {"verify", "--p", "2", "--m", "8", "--f", "(x^3+x+1)/(x^2+x+1)", "--jobs", "2"},
           {"tables", "--table", "2", "--format", "csv"}}) {
    const auto a = run(args), b = run(args);
    EXPECT_EQ(a.rc, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Cli, ConfigEmbedded) {
  const auto r = run({"suff", "--p", "5", "--m", "13", "--seed", "7"});
  ASSERT_EQ(r.rc, 0);
  const auto lines = json_lines(r.out);
  ASSERT_FALSE(lines.empty());
  for (const auto& j : lines) {
    EXPECT_EQ(j["config"]["seed"], 7);
    EXPECT_EQ(j["config"]["m"], 13);
    EXPECT_EQ(j["config"]["subcommand"], "suff");
    EXPECT_EQ(j["version"], pnpair::cli::kVersion);
  }
  EXPECT_EQ(lines[0]["holds"], false);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).rc, 2);
  EXPECT_EQ(run({"suff"}).rc, 2);
  EXPECT_EQ(run({"suff", "--m", "x"}).rc, 2);
  EXPECT_EQ(run({"suff", "--p", "6", "--m", "4"}).rc, 2);
  EXPECT_EQ(run({"factor", "--m", "4", "--format", "csv"}).rc, 2);
  EXPECT_EQ(run({"verify", "--m", "3", "--f", "(x+1"}).rc, 2);
  const auto big = run({"verify", "--p", "5", "--m", "12", "--f", "x+1"});
  EXPECT_EQ(big.rc, 3);
  EXPECT_NE(big.err.find("scan-limit"), std::string::npos);
  EXPECT_EQ(run({"--help"}).rc, 0);
}

TEST(Cli, TablesTwoRows) {
  const auto r = run({"tables", "--table", "2", "--format", "csv"});
  ASSERT_EQ(r.rc, 0);
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "q,m,d,r,g,s,l,L");
  int rows = 0;
  for (std::string line; std::getline(in, line);) rows += !line.empty();
  EXPECT_EQ(rows, 14);
}

TEST(Cli, TablesOneJson) {
  const auto r = run({"tables", "--table", "1"});
  ASSERT_EQ(r.rc, 0);
  EXPECT_GE(json_lines(r.out).size(), 21u);
}

TEST(Cli, VerifySmallField) {
  const auto r = run({"verify", "--p", "5", "--m", "3", "--f", "(x^3+x+1)/(x+2)", "--a", "1", "--b", "2"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto lines = json_lines(r.out);
  ASSERT_FALSE(lines.empty());
  const auto& last = lines.back();
  EXPECT_EQ(last["type"], "existence");
  EXPECT_EQ(last["cells"], 1);
}

TEST(Cli, VerifyZeroTraceHasNoWitness) {
  const auto r = run({"verify", "--p", "5", "--m", "3", "--f", "(x^3+x+1)/(x+2)", "--a", "0", "--b", "0"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto last = json_lines(r.out).back();
  EXPECT_EQ(last["cells_with_pair"], 0);
}

TEST(Cli, FactorTablesDirectory) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pnpair_cli_tables";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "a.txt") << "# Cole\n2^67-1: 193707721 761838257287\n";
    std::ofstream(dir / "b.txt") << "3^5-1: 2 11 11\n";
  }
  const auto r = run({"factor", "--p", "2", "--m", "67", "--effort", "trial", "--factor-tables", dir.string()});
  EXPECT_EQ(r.rc, 0) << r.err;
  const auto j = json_lines(r.out).at(0);
  EXPECT_EQ(j["factorization"]["complete"], true);
  EXPECT_EQ(run({"factor", "--p", "2", "--m", "67", "--factor-tables", (dir / "missing").string()}).rc, 2);
  fs::remove_all(dir);
}

TEST(Cli, ExceptionsSummary) {
  const auto r = run({"exceptions", "--k-range", "1..2"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto lines = json_lines(r.out);
  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(lines.back()["type"], "summary");
  EXPECT_EQ(run({"exceptions", "--k-range", "3..1"}).rc, 2);
}
