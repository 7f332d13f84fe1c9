#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "codeclass/extsys.hpp"

namespace codeclass {

/// Zero means no limit.
struct Limits {
  std::uint64_t max_nodes = 0;
  double max_seconds = 0.0;
  std::uint64_t max_solutions = 0;
};

enum class SearchStatus { Completed, NodeLimit, TimeLimit, SolutionLimit };

const char* to_string(SearchStatus s);

/// A node is the root or one variable-value assignment tried by the search.
struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t solutions = 0;
  SearchStatus status = SearchStatus::Completed;
  double elapsed = 0.0;
};

/// Receives the value of every variable (stored coordinates, see Variable::offset).
/// May be called concurrently when workers > 1.
using Visitor = std::function<void(const std::vector<int>& values)>;

struct EnumerateOptions {
  Limits limits;
  int workers = 1;
  /// Prune nodes whose continuous relaxation is certified infeasible.
  bool lp_pruning = false;
};

/// Every integer solution exactly once. The static order lists the groups by
/// ascending number of box-bounded solutions of their own equation, then the
/// remaining variables by index. Each node branches on the unfixed point or
/// generic variable with the smallest domain (ties by static order), then on
/// the others in static order; values ascending.
/// With one worker the visiting order is deterministic.
SearchStats enumerate_solutions(const LinearSystem& sys, const Visitor& visit, const EnumerateOptions& options = {});

enum class Verdict { Feasible, Infeasible, Unknown };

const char* to_string(Verdict v);

struct FeasibilityResult {
  Verdict verdict = Verdict::Unknown;
  std::vector<int> witness;
  SearchStats stats;
};

/// Depth-first search with bound propagation and the continuous relaxation
/// at every node, branching on the most fractional variable of the
/// relaxation (the smallest domain when it is integral); values nearest the
/// relaxed value first. Infeasible iff no solution exists.
FeasibilityResult check_feasible(const LinearSystem& sys, const Limits& limits = {});

/// CPLEX LP text: "Minimize obj: 0", Subject To, Bounds, Generals, Binaries.
/// Variable names are those of the system.
std::string export_lp(const LinearSystem& sys, const std::string& comment = "");

/// One verdict of an external solver for the exported model:
/// "INFEASIBLE", or "FEASIBLE" followed by name=value tokens (missing names
/// read as 0). A witness is checked against the system; FormatError otherwise.
FeasibilityResult read_verdict(std::istream& in, const LinearSystem& sys);
FeasibilityResult read_verdict_file(const std::string& path, const LinearSystem& sys);

}  // namespace codeclass
