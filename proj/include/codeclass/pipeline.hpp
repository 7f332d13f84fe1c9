#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "codeclass/canon.hpp"
#include "codeclass/extsys.hpp"
#include "codeclass/solver.hpp"

namespace codeclass {

/// Library version recorded in database headers.
const char* version();

/// One inequivalent code: `code` is the canonical representative.
struct CodeRecord {
  PointMultiset code;
  WeightDistribution weights;
  std::uint64_t aut_order = 0;
  /// Index of the parent in the previous layer, -1 for generated codes.
  int parent = -1;
  /// Multiplicity of the extension point, 0 for generated codes.
  int r = 0;
  std::string certificate;

  int length() const { return code.length(); }
  bool operator==(const CodeRecord& o) const {
    return code == o.code && weights == o.weights && aut_order == o.aut_order && parent == o.parent && r == o.r;
  }
};

struct CodeDatabase {
  int q = 0;
  int k = 0;
  WeightSpectrum spectrum;
  /// Maximum point multiplicity, kUnbounded if none.
  int lambda = kUnbounded;
  Equivalence equivalence = Equivalence::Semilinear;
  bool exhaustive = true;
  std::string tool_version = version();
  /// Sorted by (length, canonical vector).
  std::vector<CodeRecord> records;

  bool operator==(const CodeDatabase& o) const = default;
};

/// Plain text, one header field per line, then one line per record:
///   codeclass-db 1
///   q <q>
///   k <k>
///   spectrum <delta:a:b,...>
///   maxmult <lambda or "none">
///   equivalence <linear|semilinear>
///   exhaustive <yes|no>
///   tool <version>
///   records <count>
///   <length> <r> <aut> <parent> <w^A,w^A,...> <multiplicities>
/// Multiplicities are base-36 digits per point; values of 36 or more are
/// written in decimal inside brackets, e.g. "[63]".
void db_write(const CodeDatabase& db, std::ostream& out);
CodeDatabase db_read(std::istream& in);
void db_write_file(const CodeDatabase& db, const std::string& path);
CodeDatabase db_read_file(const std::string& path);

std::string encode_multiplicities(const std::vector<int>& mult);
std::vector<int> decode_multiplicities(const std::string& text, int expected);

/// Parameters of a layered classification from dimension k0 to k_target.
struct ClassificationTask {
  int q = 2;
  int k0 = 1;
  /// Codes of dimension k0; generated directly when empty (k0 <= 2).
  std::vector<PointMultiset> seeds;
  int k_target = 2;
  int n_max = 0;
  /// Minimum final length, 0 for none.
  int n_min = 0;
  WeightSpectrum spectrum;
  /// Maximum point multiplicity of the final layer.
  int lambda = kUnbounded;
  /// Per-dimension overrides; intermediate layers default to unbounded.
  std::map<int, int> layer_lambda;
  std::map<int, WeightSpectrum> layer_spectrum;
  /// Phase 0 feasibility check before enumeration.
  bool use_phase0 = false;
  /// Block form for spectra with several blocks.
  bool gap_reformulation = false;
  double hyperplane_fraction = 1.0;
  /// Restrict Phase 1 to canonical length extensions through indicators.
  bool min_extension_in_phase1 = true;
  int workers = 1;
  /// One solution per orbit of the scalings of the new coordinate.
  bool break_symmetry = true;
  /// Relaxation pruning in Phase 1.
  bool lp_pruning = true;
  /// Per subproblem.
  Limits limits;
  Equivalence equivalence = Equivalence::Semilinear;
  /// External verdicts for Phase 0, keyed by "parent:r"; they replace check_feasible.
  std::map<std::string, std::string> verdict_files;

  int lambda_at(int k) const;
  const WeightSpectrum& spectrum_at(int k) const;
  /// Admissible lengths of dimension-k codes in the chain.
  int max_length_at(int k) const;
  int min_length_at(int k) const;
};

struct LayerStats {
  int dimension = 0;
  std::uint64_t inputs = 0;
  std::uint64_t subproblems = 0;
  std::uint64_t line_pruned = 0;
  std::uint64_t phase0_infeasible = 0;
  std::uint64_t phase0_unknown = 0;
  std::uint64_t phase1_solutions = 0;
  std::uint64_t rejected_min_extension = 0;
  std::uint64_t rejected_weights = 0;
  std::uint64_t rejected_length = 0;
  std::uint64_t rejected_multiplicity = 0;
  std::uint64_t candidates = 0;
  std::uint64_t codes = 0;
  std::uint64_t nodes = 0;
  std::uint64_t incomplete = 0;
  double seconds = 0.0;

  void merge(const LayerStats& o);
  std::string summary() const;
};

struct ExtensionResult {
  /// Pairwise inequivalent extensions sorted like database records.
  std::vector<CodeRecord> codes;
  LayerStats stats;
};

/// All inequivalent canonical length extensions of M admitted by the task
/// at dimension M.k() + 1. Records carry `parent` as given.
ExtensionResult extend_step(const PointMultiset& m, const ClassificationTask& task, int parent = -1);

/// Systems of one subproblem (M, r) as the pipeline solves them: M is
/// systematized, `plain` has the point and weight equations, `linear` adds
/// the minimal-extension indicators (for r = 1 it equals `plain`). Both are
/// empty when a line equation fails the preprocessing predicate.
struct Subproblem {
  bool line_pruned = false;
  ExtensionSystem plain;
  ExtensionSystem linear;
};

Subproblem build_subproblem(const PointMultiset& m, int r, const ClassificationTask& task);

/// Extensions of M with a single value of r.
ExtensionResult extend_with(const PointMultiset& m, int r, const ClassificationTask& task, int parent = -1);

/// Every code of dimension k <= 2 admitted by the task at that dimension.
CodeDatabase generate_direct(const ClassificationTask& task, int k);

/// Extends every record of `layer` by one dimension and deduplicates.
CodeDatabase extend_layer(const CodeDatabase& layer, const ClassificationTask& task, LayerStats* stats = nullptr);

using LayerCallback = std::function<void(const CodeDatabase&, const LayerStats&)>;

/// Layered classification; the callback sees every layer including the first.
CodeDatabase classify(const ClassificationTask& task, const LayerCallback& on_layer = {});

/// Records of `next` whose projection through a point of minimum positive
/// multiplicity matches no record of `prev`.
std::vector<int> projection_closure_violations(const CodeDatabase& next, const CodeDatabase& prev);

/// Database skeleton for dimension k with the task's parameters.
CodeDatabase make_database(const ClassificationTask& task, int k);

CodeRecord make_record(const PointMultiset& m, Equivalence kind, int parent = -1, int r = 0);

}  // namespace codeclass
