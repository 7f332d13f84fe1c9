#include "doctest.h"

#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "codeclass/error.hpp"
#include "codeclass/solver.hpp"
#include "oracles.hpp"

using namespace codeclass;

namespace {

std::set<std::vector<int>> solve(const LinearSystem& sys, const EnumerateOptions& opt = {}) {
  std::set<std::vector<int>> out;
  std::mutex mu;
  const SearchStats st = enumerate_solutions(
      sys,
      [&](const std::vector<int>& v) {
        std::lock_guard lock(mu);
        REQUIRE(sys.satisfied(v));
        CHECK(out.insert(v).second);
      },
      opt);
  CHECK(st.status == SearchStatus::Completed);
  CHECK(st.solutions == out.size());
  CHECK(st.nodes >= st.solutions);
  return out;
}

LinearSystem contradiction() {
  LinearSystem s;
  s.add_var({"x1", 0, 4});
  Row r;
  r.terms = {{0, 1}};
  r.rhs = 5;
  s.add_row(r);
  return s;
}

ExtensionSystem toy_extension() {
  PointMultiset m(1, 2);
  m.set(0, 1);
  ExtensionOptions opt;
  opt.lambda = 2;
  return build_extension_system(m, 1, WeightSpectrum::from_weights({1, 2}), opt);
}

int count_tokens(const std::string& text, const std::string& section) {
  std::istringstream in(text.substr(text.find(section) + section.size()));
  int n = 0;
  std::string tok;
  while (in >> tok && tok != "Binaries" && tok != "End") ++n;
  return n;
}

}  // namespace

TEST_CASE("contradiction x1 = 5, x1 <= 4") {
  const LinearSystem s = contradiction();
  CHECK(solve(s).empty());
  const FeasibilityResult f = check_feasible(s);
  CHECK(f.verdict == Verdict::Infeasible);
  CHECK(f.stats.nodes <= 1);
}

TEST_CASE("extensions of [1,1]_2 match brute force over PG(1,2)") {
  const ExtensionSystem e = toy_extension();
  const Geometry& g = *e.geometry;
  const int apex = g.unit_point(1), e1 = g.unit_point(0);
  std::set<std::vector<int>> brute;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b)
      for (int c = 0; c <= 2; ++c) {
        const std::vector<int> m{a, b, c};
        if (m[apex] != 1 || m[e1] < 1) continue;
        if (projection(PointMultiset(e.geometry, m), apex).mult() != std::vector<int>{1}) continue;
        bool ok = true;
        const PointMultiset pm(e.geometry, m);
        for (int h : hyperplane_multiplicities(pm)) ok = ok && (pm.length() - h == 1 || pm.length() - h == 2);
        if (ok) brute.insert(m);
      }
  std::set<std::vector<int>> found;
  for (const auto& v : solve(e.sys)) found.insert(e.decode(v).mult());
  CHECK(found == brute);
  CHECK_FALSE(brute.empty());
  const FeasibilityResult f = check_feasible(e.sys);
  REQUIRE(f.verdict == Verdict::Feasible);
  CHECK(e.sys.satisfied(f.witness));
}

TEST_CASE("oracle equivalence on random bounded systems") {
  std::mt19937 rng(2024);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    CAPTURE(trial);
    const LinearSystem s = oracle::random_system(rng, 20000);
    const auto brute = oracle::box_solutions(s);
    CHECK(solve(s) == brute);
    EnumerateOptions lp;
    lp.lp_pruning = true;
    CHECK(solve(s, lp) == brute);
    const FeasibilityResult f = check_feasible(s);
    CHECK(f.verdict == (brute.empty() ? Verdict::Infeasible : Verdict::Feasible));
    if (f.verdict == Verdict::Feasible) CHECK(brute.count(f.witness) == 1);
    (brute.empty() ? infeasible : feasible)++;
  }
  CHECK(feasible > 30);
  CHECK(infeasible > 30);
}

TEST_CASE("worker count changes neither the set nor the single-worker sequence") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const PointMultiset base = oracle::random_spanning(2, 3, 3, rng, 0.8);
    ExtensionOptions opt;
    opt.lambda = 3;
    const ExtensionSystem e =
        build_extension_system(systematize(base), 1, WeightSpectrum::divisible(1, 1, base.length() + 1), opt);
    auto sequence = [&] {
      std::vector<std::vector<int>> seq;
      enumerate_solutions(e.sys, [&](const std::vector<int>& v) { seq.push_back(v); });
      return seq;
    };
    const auto first = sequence();
    CHECK(sequence() == first);
    EnumerateOptions par;
    par.workers = 3;
    CHECK(solve(e.sys, par) == std::set<std::vector<int>>(first.begin(), first.end()));
  }
}

TEST_CASE("limits are reported, not thrown") {
  PointMultiset base(2, 3);
  for (int p = 0; p < 4; ++p) base.set(p, 3);
  const ExtensionSystem e = build_extension_system(base, 1, WeightSpectrum::divisible(1, 1, 13));
  EnumerateOptions opt;
  opt.limits.max_nodes = 5;
  const SearchStats st = enumerate_solutions(e.sys, [](const std::vector<int>&) {}, opt);
  CHECK(st.status == SearchStatus::NodeLimit);
  opt.limits = {};
  opt.limits.max_solutions = 2;
  const SearchStats st2 = enumerate_solutions(e.sys, [](const std::vector<int>&) {}, opt);
  CHECK(st2.status == SearchStatus::SolutionLimit);
  CHECK(st2.solutions == 2);
}

TEST_CASE("LP export") {
  const ExtensionSystem e = toy_extension();
  const std::string lp = export_lp(e.sys);
  CHECK(lp.rfind("Minimize\n obj: 0\nSubject To\n", 0) == 0);
  CHECK(lp.find("Bounds\n") != std::string::npos);
  CHECK(count_tokens(lp, "Generals") == 6);
  CHECK(lp.find("Binaries") == std::string::npos);
  CHECK(lp.find(" x" + std::to_string(e.point_var[e.geometry->unit_point(1)]) + " = 1\n") != std::string::npos);
  int equalities = 0;
  for (std::size_t p = lp.find(" = ", lp.find("Subject To")); p < lp.find("Bounds"); p = lp.find(" = ", p + 1))
    ++equalities;
  CHECK(equalities == 4);

  const ExtensionSystem lin = linearize_min_extension(e, 1);
  const std::string lp2 = export_lp(lin.sys);
  REQUIRE(lp2.find("Binaries") != std::string::npos);
  CHECK(count_tokens(lp2, "Binaries") == 2);
  CHECK(lp2.find(" u") != std::string::npos);

  const std::string empty = export_lp(LinearSystem{});
  CHECK(empty == "Minimize\n obj: 0\nSubject To\nBounds\nEnd\n");
}

TEST_CASE("external verdicts") {
  const ExtensionSystem e = toy_extension();
  std::istringstream inf("INFEASIBLE\n");
  CHECK(read_verdict(inf, e.sys).verdict == Verdict::Infeasible);

  const FeasibilityResult f = check_feasible(e.sys);
  REQUIRE(f.verdict == Verdict::Feasible);
  std::ostringstream line;
  line << "FEASIBLE";
  for (std::size_t i = 0; i < e.sys.vars.size(); ++i)
    if (f.witness[i] != 0) line << ' ' << e.sys.vars[i].name << '=' << f.witness[i];
  std::istringstream feas(line.str());
  const FeasibilityResult g = read_verdict(feas, e.sys);
  CHECK(g.verdict == Verdict::Feasible);
  CHECK(g.witness == f.witness);

  std::istringstream wrong("FEASIBLE y0=99\n");
  CHECK_THROWS_AS(read_verdict(wrong, e.sys), Error);
  std::istringstream junk("MAYBE\n");
  CHECK_THROWS_AS(read_verdict(junk, e.sys), Error);
}
