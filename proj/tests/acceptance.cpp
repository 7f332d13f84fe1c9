// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance            all criteria
//   acceptance 2 8a ...   selected criteria
// Exit status is nonzero iff a selected criterion fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "codeclass/cli.hpp"
#include "codeclass/pipeline.hpp"
#include "oracles.hpp"

using namespace codeclass;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string data_path(const std::string& name) { return std::string(CODECLASS_DATA_DIR) + "/" + name; }

std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string db_bytes(const CodeDatabase& db) {
  std::ostringstream os;
  db_write(db, os);
  return os.str();
}

// Product of m_P! over all points, saturating at 2^63. Informational only.
std::uint64_t repeated_column_factor(const PointMultiset& m) {
  std::uint64_t f = 1;
  for (int p = 0; p < m.geometry().num_points(); ++p)
    for (int i = 2; i <= m[p]; ++i) f = f > (std::uint64_t{1} << 63) / i ? (std::uint64_t{1} << 63) : f * i;
  return f;
}

void log_layer(const CodeDatabase& db, const LayerStats& st) {
  std::cout << "  layer k=" << db.k << " records=" << db.records.size() << " " << st.summary() << std::endl;
}

// [<=65,3,{48,56}]_4; the dimension-3 layer carries no multiplicity cap.
ClassificationTask prop1_layer_task() {
  ClassificationTask t;
  t.q = 4;
  t.k0 = 2;
  t.k_target = 3;
  t.n_max = 65;
  t.spectrum = WeightSpectrum::from_weights({48, 56});
  return t;
}

Outcome hill_cap() {
  const auto t0 = Clock::now();
  std::ostringstream out, err;
  const int code = run({"wdist", data_path("hillcap.gen")}, out, err);
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  const std::string first = out.str().substr(0, out.str().find('\n'));
  const std::string want = "n=56 k=6 q=3 weights: 36,45 divisibility: 9 projective: yes";
  return {code == 0 && first == want && s < 1.0, "\"" + first + "\" in " + std::to_string(s) + " s"};
}

Outcome prop1_layer() {
  const auto t0 = Clock::now();
  const CodeDatabase db = classify(prop1_layer_task(), log_layer);
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  std::vector<std::uint64_t> lengths, auts;
  for (const auto& r : db.records) {
    lengths.push_back(r.length());
    auts.push_back(r.aut_order);
  }
  const bool ok = db.exhaustive && lengths == std::vector<std::uint64_t>{63, 64, 65} &&
                  auts == std::vector<std::uint64_t>{362880, 1728, 36} && s < 600;
  return {ok, std::to_string(db.records.size()) + " codes, lengths " + join(lengths) + ", aut orders " + join(auts) +
                  " (expected 63,64,65 and 362880,1728,36), " + std::to_string(s) + " s"};
}

Outcome prop1_nonexistence() {
  const auto t0 = Clock::now();
  const CodeDatabase layer = classify(prop1_layer_task());
  ClassificationTask t = prop1_layer_task();
  t.k0 = 3;
  t.k_target = 4;
  t.n_min = 65;
  // A projection of a projective code has multiplicities at most q.
  t.lambda = 4;
  t.use_phase0 = true;
  for (const auto& r : layer.records) t.seeds.push_back(r.code);
  const CodeDatabase next = classify(t, log_layer);
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = layer.records.size() == 3 && next.exhaustive && next.records.empty() && s < 1800;
  return {ok, "extending " + std::to_string(layer.records.size()) + " codes: " + std::to_string(next.records.size()) +
                  " [65,4,{48,56}]_4 codes, exhaustive " + (next.exhaustive ? "yes" : "no") + ", " +
                  std::to_string(s) + " s"};
}

Outcome prop2_layer() {
  const auto t0 = Clock::now();
  ClassificationTask t;
  t.q = 8;
  t.k0 = 2;
  t.k_target = 3;
  t.n_max = 34;
  t.spectrum = WeightSpectrum::from_weights({28, 32});
  const CodeDatabase db = classify(t, log_layer);
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  std::vector<std::uint64_t> lengths, auts, with_columns;
  for (const auto& r : db.records) {
    lengths.push_back(r.length());
    auts.push_back(r.aut_order);
    with_columns.push_back(r.aut_order * repeated_column_factor(r.code));
  }
  const bool ok = db.exhaustive && lengths == std::vector<std::uint64_t>{34} &&
                  auts == std::vector<std::uint64_t>{43008} && s < 1800;
  return {ok, std::to_string(db.records.size()) + " codes, lengths " + join(lengths) + ", aut orders " + join(auts) +
                  " (expected 34 and 43008; times the permutations of repeated columns: " + join(with_columns) +
                  "), " + std::to_string(s) + " s"};
}

Outcome prop3_layer() {
  const auto t0 = Clock::now();
  ClassificationTask t;
  t.q = 5;
  t.k0 = 2;
  t.k_target = 3;
  t.n_max = 39;
  t.n_min = 39;
  t.lambda = 4;
  t.spectrum = WeightSpectrum::divisible(5, 5, 39);
  const CodeDatabase db = classify(t, log_layer);
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = db.exhaustive && db.records.size() == 371 && s < 3600;
  return {ok, std::to_string(db.records.size()) + " codes (expected 371), " + std::to_string(s) + " s"};
}

// Every [76,4,{56,64}]_4 code has sum of squared multiplicities 112 < 2 * 76,
// so it has simple points and arises only with r = 1. The r = 2 extension of
// the [74,3] layer therefore has no canonical survivors; the 5 classes come
// from the [75,3] layer.
Outcome two_weight_layer() {
  const auto t0 = Clock::now();
  ClassificationTask t;
  t.q = 4;
  t.k0 = 2;
  t.k_target = 4;
  t.n_max = 76;
  t.n_min = 76;
  t.spectrum = WeightSpectrum::from_weights({56, 64});
  const CodeDatabase all = classify(t, log_layer);

  ClassificationTask base = t;
  base.k_target = 3;
  base.n_max = 74;
  base.n_min = 74;
  const CodeDatabase layer74 = classify(base);
  std::size_t from74 = 0;
  for (const auto& rec : layer74.records) from74 += extend_with(rec.code, 2, t, 0).codes.size();

  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = all.exhaustive && all.records.size() == 5 && from74 == 0 && s < 3600;
  return {ok, std::to_string(all.records.size()) + " [76,4,{56,64}]_4 codes (expected 5); " +
                  std::to_string(layer74.records.size()) + " [74,3] codes give " + std::to_string(from74) +
                  " canonical r=2 extensions (expected 0), " + std::to_string(s) + " s"};
}

Outcome binary_153() {
  struct Want {
    std::string file, dist;
    std::uint64_t aut;
  };
  const std::vector<Want> wants = {
      {"code153_aut16128.gen", "76^107 80^15 92^5", 16128},
      {"code153_aut32256.gen", "76^108 80^14 92^4 96^1", 32256},
  };
  bool ok = true;
  std::string detail;
  for (const Want& w : wants) {
    const auto t0 = Clock::now();
    std::ostringstream wout, cout, err;
    const int a = run({"wdist", data_path(w.file)}, wout, err);
    const int b = run({"canon", data_path(w.file)}, cout, err);
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool dist = wout.str().find("distribution: " + w.dist + "\n") != std::string::npos;
    const bool aut = cout.str().find("aut: " + std::to_string(w.aut) + "\n") != std::string::npos;
    const bool pass = a == 0 && b == 0 && dist && aut && s < 60;
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + w.file + (pass ? " ok" : " mismatch") + " in " + std::to_string(s) + " s";
  }
  return {ok, detail};
}

Outcome solver_oracle() {
  std::mt19937 rng(8);
  int systems = 0, mismatches = 0, empty = 0;
  for (; systems < 1000; ++systems) {
    const LinearSystem s = oracle::random_system(rng);
    const auto brute = oracle::box_solutions(s);
    std::set<std::vector<int>> found;
    std::mutex mu;
    EnumerateOptions opt;
    opt.workers = 1 + systems % 3;
    opt.lp_pruning = systems % 2 == 1;
    const SearchStats st = enumerate_solutions(
        s,
        [&](const std::vector<int>& v) {
          std::lock_guard lock(mu);
          found.insert(v);
        },
        opt);
    const FeasibilityResult f = check_feasible(s);
    const bool agree = (f.verdict == Verdict::Infeasible) == brute.empty() && f.verdict != Verdict::Unknown &&
                       (f.verdict != Verdict::Feasible || brute.count(f.witness));
    if (found != brute || st.solutions != brute.size() || st.status != SearchStatus::Completed || !agree)
      ++mismatches;
    empty += brute.empty();
  }
  return {mismatches == 0, std::to_string(systems) + " systems (" + std::to_string(empty) + " infeasible), " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome canon_oracle() {
  std::mt19937 rng(12);
  int multisets = 0, bad_eq = 0, bad_orbit = 0;
  for (auto [k, q] : {std::pair{3, 2}, {3, 3}, {3, 4}, {4, 2}}) {
    const oracle::CollineationGroup group(k, q, true);
    std::vector<std::pair<std::vector<int>, std::vector<int>>> seen;  // (oracle minimum, canonical)
    for (int i = 0; i < 60; ++i, ++multisets) {
      PointMultiset m = oracle::random_spanning(k, q, 1 + i % 3, rng, 0.25 + 0.05 * (i % 6));
      // every third multiset is an image of an earlier one
      if (i % 3 == 2) {
        const auto& perm = group.permutations()[rng() % group.permutations().size()];
        m = PointMultiset(m.geometry_ptr(), group.image(seen[rng() % seen.size()].first, perm));
      }
      const auto [least, orbit] = group.orbit(m.mult());
      const CanonicalForm c = canonical_form(m);
      if (orbit * c.aut_order != group.order()) ++bad_orbit;
      for (const auto& [l, cv] : seen)
        if ((l == least) != (cv == c.canonical)) ++bad_eq;
      seen.emplace_back(least, c.canonical);
    }
  }
  return {bad_eq == 0 && bad_orbit == 0 && multisets >= 200,
          std::to_string(multisets) + " multisets, " + std::to_string(bad_eq) + " equivalence mismatches, " +
              std::to_string(bad_orbit) + " orbit-stabilizer mismatches"};
}

Outcome line_predicate() {
  int cases = 0, bad = 0;
  for (int q = 1; q <= 4; ++q)
    for (int lambda = 1; lambda <= 5; ++lambda)
      for (int r = 1; r <= lambda; ++r)
        for (int c = 0; c <= 12; ++c, ++cases)
          bad += preprocess_line_feasibility(q, r, lambda, c) == oracle::line_sum_reachable(q, r, lambda, c);
  const bool example = preprocess_line_feasibility(2, 3, 4, 5);
  return {bad == 0 && example, std::to_string(cases) + " cases, " + std::to_string(bad) +
                                   " mismatches; (2,3,4,5) infeasible: " + (example ? "yes" : "no")};
}

Outcome gap_equivalence() {
  std::mt19937 rng(21);
  int systems = 0, bad = 0, nonempty = 0;
  for (; systems < 60; ++systems) {
    const int q = systems % 3 == 0 ? 3 : 2;
    const int k = systems % 4 == 3 ? 3 : 2;
    const PointMultiset base = oracle::random_spanning(k, q, 2, rng, k == 3 ? 0.5 : 0.7);
    const int r = 1 + systems % 2;
    const int n1 = base.length() + r;
    std::uniform_int_distribution<int> cut(1, std::max(1, n1 - 3));
    const int a = cut(rng);
    const WeightSpectrum spec({{1, 1, a}, {1, a + 2, n1}});
    ExtensionOptions opt;
    opt.lambda = 3;
    const ExtensionSystem e = build_extension_system(systematize(base), r, spec, opt);
    const ExtensionSystem gap = apply_gap_reformulation(e, spec);
    std::set<std::vector<int>> filtered, gapped;
    enumerate_solutions(e.sys, [&](const std::vector<int>& v) {
      const PointMultiset m = e.decode(v);
      bool ok = true;
      for (int h : hyperplane_multiplicities(m)) ok = ok && spec.contains(m.length() - h);
      if (ok) filtered.insert(m.mult());
    });
    enumerate_solutions(gap.sys, [&](const std::vector<int>& v) { gapped.insert(gap.decode(v).mult()); });
    bad += filtered != gapped;
    nonempty += !filtered.empty();
  }
  return {bad == 0 && nonempty > 0, std::to_string(systems) + " toy systems (" + std::to_string(nonempty) +
                                        " with solutions), " + std::to_string(bad) + " mismatches"};
}

Outcome determinism() {
  ClassificationTask t = prop1_layer_task();
  const std::string one = db_bytes(classify(t));
  t.workers = 4;
  const std::string four = db_bytes(classify(t));
  ClassificationTask u;
  u.q = 3;
  u.k0 = 1;
  u.k_target = 4;
  u.n_max = 16;
  u.lambda = 2;
  u.spectrum = WeightSpectrum::divisible(3, 3, 15);
  const std::string a = db_bytes(classify(u));
  u.workers = 3;
  const std::string b = db_bytes(classify(u));
  return {one == four && a == b, std::string("[<=65,3,{48,56}]_4 layer ") + (one == four ? "identical" : "differs") +
                                     ", 3-divisible [<=16,4]_3 layer " + (a == b ? "identical" : "differs")};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"1", hill_cap},          {"2", prop1_layer},       {"3", prop1_nonexistence}, {"4", prop2_layer},
    {"5", prop3_layer},       {"6", two_weight_layer},  {"7", binary_153},         {"8a", solver_oracle},
    {"8b", canon_oracle},     {"8c", line_predicate},   {"8d", gap_equivalence},   {"8e", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> wanted(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [id, fn] : kCriteria) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
