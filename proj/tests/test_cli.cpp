#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "codeclass/cli.hpp"
#include "codeclass/error.hpp"
#include "codeclass/pipeline.hpp"

using namespace codeclass;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data_path(const std::string& name) { return std::string(CODECLASS_DATA_DIR) + "/" + name; }

fs::path scratch() {
  const fs::path p = fs::temp_directory_path() / ("codeclass_cli_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

}  // namespace

TEST_CASE("configurations round trip through the canonical argument string") {
  const std::vector<std::vector<std::string>> cases = {
      {"classify", "--q", "4", "--dim", "3", "--nmax", "65", "--weights", "48,56", "--out", "layer3.db"},
      {"classify", "--q", "2", "--dim", "7", "--nmax", "153", "--div", "4", "--range", "19:20,23:25",
       "--gap-reform", "--max-mult", "1", "--layer-max-mult", "6:2", "--workers", "2", "--no-lp"},
      {"extend", "--from", "a.db", "--out", "b.db", "--q", "8", "--weights", "28,32", "--max-mult", "1",
       "--nmax", "35", "--no-phase0", "--max-seconds", "2.5", "--equivalence", "linear", "-v"},
      {"wdist", "hillcap.gen"},
      {"canon", "--in", "x.db", "--record", "2"},
      {"feasible", "--from", "l.db", "--record", "0", "--r", "1", "--weights", "28,32", "--max-mult", "1",
       "--q", "8", "--nmax", "35", "--verdict", "0:1=v.txt", "--max-nodes", "1000"},
      {"exportlp", "--in", "l.db", "--record", "1", "--r", "2", "--weights", "56,64", "--q", "4", "--nmax", "76",
       "--hyperplane-fraction", "0.5", "--no-symmetry"},
  };
  for (const auto& args : cases) {
    CAPTURE(args.front());
    const CliConfig c = parse_cli(args);
    const CliConfig back = parse_cli(c.to_args());
    CHECK(back == c);
    auto words = split(c.canonical_string());
    CHECK(words.front() == "codeclass");
    words.erase(words.begin());
    CHECK(parse_cli(words) == c);
  }
}

TEST_CASE("spectra from lists and blocks agree") {
  const CliConfig a = parse_cli({"classify", "--q", "2", "--dim", "7", "--nmax", "153", "--weights", "76,80,92,96,100"});
  const CliConfig b = parse_cli({"classify", "--q", "2", "--dim", "7", "--nmax", "153", "--div", "4", "--range", "19:20,23:25"});
  CHECK(spectrum_of(a) == spectrum_of(b));
}

TEST_CASE("usage errors exit 64 before any work") {
  CHECK(invoke({}).code == kExitUsage);
  CHECK(invoke({"frobnicate"}).code == kExitUsage);
  CHECK(invoke({"classify", "--q", "4", "--dim", "3", "--nmax", "65", "--weights", "48,56", "--bogus"}).code ==
        kExitUsage);
  // block form needs two blocks
  CHECK(invoke({"classify", "--q", "4", "--dim", "3", "--nmax", "65", "--weights", "48,52,56", "--gap-reform"}).code ==
        kExitUsage);
  CHECK(invoke({"classify", "--q", "4", "--dim", "3", "--nmax", "65", "--weights", "48", "--div", "4"}).code ==
        kExitUsage);
  CHECK(invoke({"classify", "--q", "6", "--dim", "3", "--nmax", "65", "--weights", "48,56"}).code == kExitUsage);
}

TEST_CASE("wdist on the Hill cap") {
  const Run r = invoke({"wdist", data_path("hillcap.gen")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("n=56 k=6 q=3 weights: 36,45 divisibility: 9 projective: yes") == 0);
  CHECK(r.err.find("# codeclass wdist ") == 0);
  CHECK(r.err.find("deterministic") != std::string::npos);
}

TEST_CASE("input format errors exit 65") {
  const fs::path dir = scratch();
  std::ofstream(dir / "bad.gen") << "2 3 4\n0101\n011\n";
  CHECK(invoke({"wdist", (dir / "bad.gen").string()}).code == kExitFormat);
  CHECK(invoke({"wdist", (dir / "missing.gen").string()}).code == kExitFormat);
  std::ofstream(dir / "bad.db") << "codeclass-db 1\nq 2\n";
  CHECK(invoke({"canon", "--in", (dir / "bad.db").string(), "--record", "0"}).code == kExitFormat);
}

TEST_CASE("classify, canon, feasible and exportlp on a small layer") {
  const fs::path dir = scratch();
  const std::string db = (dir / "layer.db").string();
  const std::vector<std::string> args = {"classify", "--q", "3", "--dim", "3", "--nmax", "12", "--div", "3",
                                         "--range", "1:4", "--max-mult", "2", "--out", db};
  const Run first = invoke(args);
  REQUIRE(first.code == kExitOk);
  CHECK(first.out.find("exhaustive yes") != std::string::npos);
  const std::string bytes = slurp(db);
  CHECK_FALSE(bytes.empty());

  // the logged string reproduces byte-identical output, also with more workers
  auto logged = split(first.err.substr(2, first.err.find('\n') - 2));
  logged.erase(logged.begin());
  fs::remove(db);
  CHECK(invoke(logged).code == kExitOk);
  CHECK(slurp(db) == bytes);
  auto more = args;
  more.insert(more.end(), {"--workers", "3"});
  CHECK(invoke(more).code == kExitOk);
  CHECK(slurp(db) == bytes);

  const CodeDatabase layer = db_read_file(db);
  REQUIRE_FALSE(layer.records.empty());
  const Run canon = invoke({"canon", "--in", db, "--record", "0"});
  CHECK(canon.code == kExitOk);
  CHECK(canon.out.find("aut: " + std::to_string(layer.records[0].aut_order)) != std::string::npos);

  const std::vector<std::string> feas = {"feasible", "--in", db, "--record", "0", "--r", "1", "--q", "3",
                                         "--nmax", "13", "--div", "3", "--range", "1:4"};
  const Run f = invoke(feas);
  CHECK((f.code == kExitOk || f.code == kExitInfeasible));
  CHECK(f.out.find(f.code == kExitOk ? "verdict: FEASIBLE" : "verdict: INFEASIBLE") != std::string::npos);

  const std::string lp = (dir / "sub.lp").string();
  auto exp = feas;
  exp[0] = "exportlp";
  exp.insert(exp.end(), {"--out", lp});
  CHECK(invoke(exp).code == kExitOk);
  CHECK(slurp(lp).find("Subject To") != std::string::npos);
  fs::remove_all(dir);
}
