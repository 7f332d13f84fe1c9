#include "codeclass/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "codeclass/error.hpp"
#include "lp_relax.hpp"

namespace codeclass {

const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Completed: return "completed";
    case SearchStatus::NodeLimit: return "node-limit";
    case SearchStatus::TimeLimit: return "time-limit";
    case SearchStatus::SolutionLimit: return "solution-limit";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "FEASIBLE";
    case Verdict::Infeasible: return "INFEASIBLE";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

long floor_div(long a, long b) {
  long d = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --d;
  return d;
}

// Interval domains with incremental row activities and an undo trail.
class Engine {
 public:
  explicit Engine(const LinearSystem& s) : s_(s) {
    const int nv = static_cast<int>(s.vars.size());
    const int nr = static_cast<int>(s.rows.size());
    lo_.resize(nv);
    hi_.resize(nv);
    for (int v = 0; v < nv; ++v) {
      if (s.vars[v].hi == kUnbounded) throw Error(ErrorKind::UnboundedVariable, s.vars[v].name + " has no upper bound");
      lo_[v] = s.vars[v].lo;
      hi_[v] = s.vars[v].hi;
    }
    var_rows_.assign(nv, {});
    minact_.assign(nr, 0);
    maxact_.assign(nr, 0);
    maxrange_.assign(nr, 0);
    queued_.assign(nr, 0);
    for (int r = 0; r < nr; ++r) {
      for (const Term& t : s.rows[r].terms) {
        if (t.coef == 0) continue;
        var_rows_[t.var].push_back({r, t.coef});
        const long a = t.coef * lo_[t.var];
        const long b = t.coef * hi_[t.var];
        minact_[r] += std::min(a, b);
        maxact_[r] += std::max(a, b);
        maxrange_[r] = std::max(maxrange_[r], std::abs(b - a));
      }
    }
  }

  // Root propagation over every row.
  bool init() {
    for (int v = 0; v < static_cast<int>(lo_.size()); ++v)
      if (lo_[v] > hi_[v]) return false;
    for (int r = 0; r < static_cast<int>(s_.rows.size()); ++r) enqueue(r);
    const bool ok = propagate();
    trail_.clear();
    return ok;
  }

  std::size_t mark() const { return trail_.size(); }

  void undo(std::size_t m) {
    while (trail_.size() > m) {
      const auto t = trail_.back();
      trail_.pop_back();
      move_bounds(t.var, t.lo, t.hi);
    }
  }

  bool assign(int var, int value) {
    if (!tighten(var, value, value)) return clear_queue();
    return propagate();
  }

  int lo(int v) const { return lo_[v]; }
  int hi(int v) const { return hi_[v]; }
  const std::vector<int>& values() const { return lo_; }
  const std::vector<int>& uppers() const { return hi_; }
  int num_vars() const { return static_cast<int>(lo_.size()); }

 private:
  struct Entry {
    int row;
    long coef;
  };
  struct TrailItem {
    int var, lo, hi;
  };

  void enqueue(int r) {
    if (!queued_[r]) {
      queued_[r] = 1;
      queue_.push_back(r);
    }
  }

  bool clear_queue() {
    for (int r : queue_) queued_[r] = 0;
    queue_.clear();
    return false;
  }

  void move_bounds(int var, int nlo, int nhi) {
    for (const Entry& e : var_rows_[var]) {
      if (e.coef > 0) {
        minact_[e.row] += e.coef * (nlo - lo_[var]);
        maxact_[e.row] += e.coef * (nhi - hi_[var]);
      } else {
        minact_[e.row] += e.coef * (nhi - hi_[var]);
        maxact_[e.row] += e.coef * (nlo - lo_[var]);
      }
    }
    lo_[var] = nlo;
    hi_[var] = nhi;
  }

  // Intersects the domain with [nlo, nhi]; false if it becomes empty.
  bool tighten(int var, long nlo, long nhi) {
    const int l = static_cast<int>(std::max<long>(lo_[var], nlo));
    const int h = static_cast<int>(std::min<long>(hi_[var], nhi));
    if (l > h) return false;
    if (l == lo_[var] && h == hi_[var]) return true;
    trail_.push_back({var, lo_[var], hi_[var]});
    move_bounds(var, l, h);
    for (const Entry& e : var_rows_[var]) enqueue(e.row);
    return true;
  }

  bool propagate() {
    while (!queue_.empty()) {
      const int r = queue_.back();
      queue_.pop_back();
      queued_[r] = 0;
      const Row& row = s_.rows[r];
      const bool upper = row.sense != Sense::Ge;
      const bool lower = row.sense != Sense::Le;
      if (upper && minact_[r] > row.rhs) return clear_queue();
      if (lower && maxact_[r] < row.rhs) return clear_queue();
      if (upper && lower && !congruence(r)) return clear_queue();
      const long up = upper ? row.rhs - minact_[r] : maxrange_[r];
      const long down = lower ? maxact_[r] - row.rhs : maxrange_[r];
      if (up >= maxrange_[r] && down >= maxrange_[r]) continue;
      for (const Term& t : row.terms) {
        const long a = t.coef;
        if (a == 0 || lo_[t.var] == hi_[t.var]) continue;
        long nlo = lo_[t.var], nhi = hi_[t.var];
        if (a > 0) {
          if (up < maxrange_[r]) nhi = std::min(nhi, lo_[t.var] + floor_div(up, a));
          if (down < maxrange_[r]) nlo = std::max(nlo, hi_[t.var] - floor_div(down, a));
        } else {
          if (up < maxrange_[r]) nlo = std::max(nlo, hi_[t.var] - floor_div(up, -a));
          if (down < maxrange_[r]) nhi = std::min(nhi, lo_[t.var] + floor_div(down, -a));
        }
        if (!tighten(t.var, nlo, nhi)) return clear_queue();
      }
    }
    return true;
  }

  // For an equation, a_j x_j = rhs - fixed mod gcd of the other free
  // coefficients. Rounds the bounds of x_j to the nearest admissible values.
  bool congruence(int r) {
    const Row& row = s_.rows[r];
    long rest = row.rhs;
    gcd_scratch_.clear();
    for (const Term& t : row.terms) {
      if (t.coef == 0) continue;
      if (lo_[t.var] == hi_[t.var]) {
        rest -= t.coef * lo_[t.var];
      } else {
        gcd_scratch_.push_back(t);
      }
    }
    const std::size_t m = gcd_scratch_.size();
    if (m == 0) return rest == 0;
    suffix_.assign(m + 1, 0);
    for (std::size_t i = m; i-- > 0;) suffix_[i] = std::gcd(suffix_[i + 1], std::abs(gcd_scratch_[i].coef));
    long prefix = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const Term t = gcd_scratch_[i];
      const long others = std::gcd(prefix, suffix_[i + 1]);
      prefix = std::gcd(prefix, std::abs(t.coef));
      if (others == 1) continue;
      if (others == 0) {
        if (rest % t.coef != 0) return false;
        if (!tighten(t.var, rest / t.coef, rest / t.coef)) return false;
        continue;
      }
      const long d = std::gcd(std::abs(t.coef), others);
      if (((rest % d) + d) % d != 0) return false;
      const long mod = others / d;
      if (mod == 1) continue;
      const long a = (((t.coef / d) % mod) + mod) % mod;
      const long c = (((rest / d) % mod) + mod) % mod;
      long inv = 1;
      while ((a * inv) % mod != 1) ++inv;
      const long target = (c * inv) % mod;
      const long lo = lo_[t.var], hi = hi_[t.var];
      const long nlo = lo + (((target - lo) % mod) + mod) % mod;
      const long nhi = hi - (((hi - target) % mod) + mod) % mod;
      if (!tighten(t.var, nlo, nhi)) return false;
    }
    return true;
  }

  const LinearSystem& s_;
  std::vector<Term> gcd_scratch_;
  std::vector<long> suffix_;
  std::vector<int> lo_, hi_;
  std::vector<std::vector<Entry>> var_rows_;
  std::vector<long> minact_, maxact_, maxrange_;
  std::vector<TrailItem> trail_;
  std::vector<int> queue_;
  std::vector<char> queued_;
};

// Number of box-bounded solutions of a group's own unit-coefficient equation.
double group_weight(const LinearSystem& s, const std::vector<int>& group) {
  std::vector<int> sorted = group;
  std::sort(sorted.begin(), sorted.end());
  for (const Row& row : s.rows) {
    if (row.sense != Sense::Eq || row.terms.size() != group.size()) continue;
    std::vector<int> vars;
    bool unit = true;
    for (const Term& t : row.terms) {
      vars.push_back(t.var);
      unit = unit && t.coef == 1;
    }
    std::sort(vars.begin(), vars.end());
    if (!unit || vars != sorted) continue;
    if (row.rhs < 0) return 0;
    std::vector<double> ways(row.rhs + 1, 0.0);
    ways[0] = 1;
    for (int v : group) {
      std::vector<double> next(row.rhs + 1, 0.0);
      for (long s0 = 0; s0 <= row.rhs; ++s0) {
        if (ways[s0] == 0) continue;
        for (long x = s.vars[v].lo; x <= s.vars[v].hi && s0 + x <= row.rhs; ++x) next[s0 + x] += ways[s0];
      }
      ways = std::move(next);
    }
    return ways[row.rhs];
  }
  double w = 1;
  for (int v : group) w *= s.vars[v].hi - s.vars[v].lo + 1.0;
  return w;
}

std::vector<int> branch_order(const LinearSystem& s) {
  std::vector<std::pair<double, int>> keyed;
  for (int i = 0; i < static_cast<int>(s.groups.size()); ++i) keyed.push_back({group_weight(s, s.groups[i]), i});
  std::stable_sort(keyed.begin(), keyed.end(), [](auto& a, auto& b) { return a.first < b.first; });
  std::vector<int> order;
  std::vector<char> used(s.vars.size(), 0);
  for (auto& [w, gi] : keyed)
    for (int v : s.groups[gi])
      if (!used[v]) {
        used[v] = 1;
        order.push_back(v);
      }
  for (int v = 0; v < static_cast<int>(s.vars.size()); ++v)
    if (!used[v]) order.push_back(v);
  return order;
}

struct Control {
  Limits limits;
  Clock::time_point start = Clock::now();
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<std::uint64_t> solutions{0};
  std::atomic<bool> stop{false};
  std::atomic<int> status{static_cast<int>(SearchStatus::Completed)};

  void halt(SearchStatus s) {
    int expected = static_cast<int>(SearchStatus::Completed);
    status.compare_exchange_strong(expected, static_cast<int>(s));
    stop = true;
  }

  // Counts one node; false once a limit is hit.
  bool count_node() {
    if (stop) return false;
    const std::uint64_t n = ++nodes;
    if (limits.max_nodes && n > limits.max_nodes) {
      --nodes;
      halt(SearchStatus::NodeLimit);
      return false;
    }
    if (limits.max_seconds > 0 && (n & 255) == 0 &&
        std::chrono::duration<double>(Clock::now() - start).count() > limits.max_seconds) {
      halt(SearchStatus::TimeLimit);
      return false;
    }
    return true;
  }

  SearchStats stats() const {
    SearchStats st;
    st.nodes = nodes;
    st.solutions = solutions;
    st.status = static_cast<SearchStatus>(status.load());
    st.elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    return st;
  }
};

class Enumerator {
 public:
  Enumerator(const std::vector<int>& order, const std::vector<char>& primary, Control& control, const Visitor& visit)
      : order_(order), primary_(primary), control_(control), visit_(visit) {}

  // Unfixed primary variable with the smallest domain, ties broken by the
  // static order; the others follow in static order.
  int choose(const Engine& e) const {
    int best = -1, width = 0, fallback = -1;
    for (int v : order_) {
      const int w = e.hi(v) - e.lo(v);
      if (w == 0) continue;
      if (!primary_[v]) {
        if (fallback < 0) fallback = v;
        continue;
      }
      if (best >= 0 && w >= width) continue;
      best = v;
      width = w;
      if (w == 1) break;
    }
    return best >= 0 ? best : fallback;
  }

  // `lp`, when given, prunes nodes whose relaxation is certified empty.
  void dfs(Engine& e, detail::LpRelaxation* lp) {
    const int v = choose(e);
    if (v < 0) {
      emit(e);
      return;
    }
    if (lp && !lp->feasible(e.values(), e.uppers())) return;
    const int l = e.lo(v), h = e.hi(v);
    for (int val = l; val <= h; ++val) {
      if (!control_.count_node()) return;
      const std::size_t m = e.mark();
      if (e.assign(v, val)) dfs(e, lp);
      e.undo(m);
      if (control_.stop) return;
    }
  }

  void emit(const Engine& e) {
    const std::uint64_t index = control_.solutions++;
    if (control_.limits.max_solutions && index >= control_.limits.max_solutions) {
      --control_.solutions;
      control_.halt(SearchStatus::SolutionLimit);
      return;
    }
    visit_(e.values());
    if (control_.limits.max_solutions && index + 1 == control_.limits.max_solutions)
      control_.halt(SearchStatus::SolutionLimit);
  }

 private:
  const std::vector<int>& order_;
  const std::vector<char>& primary_;
  Control& control_;
  const Visitor& visit_;
};

struct Prefix {
  std::vector<std::pair<int, int>> decisions;
};

}  // namespace

SearchStats enumerate_solutions(const LinearSystem& sys, const Visitor& visit, const EnumerateOptions& options) {
  Control control;
  control.limits = options.limits;
  Engine root(sys);
  if (!root.init() || !control.count_node()) return control.stats();
  const std::vector<int> order = branch_order(sys);
  std::vector<char> primary(sys.vars.size(), 0);
  for (std::size_t v = 0; v < sys.vars.size(); ++v)
    primary[v] = sys.vars[v].kind == VarKind::Point || sys.vars[v].kind == VarKind::Generic;
  Enumerator en(order, primary, control, visit);

  if (options.workers <= 1) {
    std::optional<detail::LpRelaxation> lp;
    if (options.lp_pruning) lp.emplace(sys);
    en.dfs(root, lp ? &*lp : nullptr);
    return control.stats();
  }

  // Breadth-first split into independent subtrees.
  const std::size_t want = static_cast<std::size_t>(options.workers) * 4;
  std::vector<Prefix> frontier(1);
  while (frontier.size() < want && !control.stop) {
    std::vector<Prefix> next;
    bool grew = false;
    for (Prefix& item : frontier) {
      const std::size_t m = root.mark();
      for (auto [v, val] : item.decisions) root.assign(v, val);
      const int v = en.choose(root);
      if (v < 0) {
        en.emit(root);
      } else {
        grew = true;
        for (int val = root.lo(v); val <= root.hi(v); ++val) {
          if (!control.count_node()) break;
          const std::size_t m2 = root.mark();
          if (root.assign(v, val)) {
            Prefix child = item;
            child.decisions.push_back({v, val});
            next.push_back(std::move(child));
          }
          root.undo(m2);
        }
      }
      root.undo(m);
      if (control.stop) break;
    }
    frontier = std::move(next);
    if (!grew) break;
  }

  std::atomic<std::size_t> cursor{0};
  auto work = [&] {
    Engine e = root;
    std::optional<detail::LpRelaxation> lp;
    if (options.lp_pruning) lp.emplace(sys);
    while (!control.stop) {
      const std::size_t i = cursor++;
      if (i >= frontier.size()) break;
      const std::size_t m = e.mark();
      for (auto [v, val] : frontier[i].decisions) e.assign(v, val);
      en.dfs(e, lp ? &*lp : nullptr);
      e.undo(m);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < options.workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return control.stats();
}

namespace {

// Unfixed variable with the smallest domain, ties broken by rank; -1 if none.
int smallest_domain(const Engine& e, const std::vector<int>& rank) {
  int best = -1;
  for (int v = 0; v < e.num_vars(); ++v) {
    const int width = e.hi(v) - e.lo(v);
    if (width == 0) continue;
    if (best < 0 || width < e.hi(best) - e.lo(best) || (width == e.hi(best) - e.lo(best) && rank[v] < rank[best]))
      best = v;
  }
  return best;
}

struct FeasibilitySearch {
  const std::vector<int>& rank;
  Control& control;
  detail::LpRelaxation lp;
  std::vector<int> witness;

  // Most fractional variable of the relaxation, else the smallest domain.
  int branch_variable(const Engine& e) const {
    const std::vector<double>& x = lp.point();
    int best = -1;
    double frac = 1e-6;
    for (int v = 0; v < e.num_vars(); ++v) {
      if (e.lo(v) == e.hi(v)) continue;
      const double f = std::min(x[v] - std::floor(x[v]), std::ceil(x[v]) - x[v]);
      if (f > frac) {
        frac = f;
        best = v;
      }
    }
    return best >= 0 ? best : smallest_domain(e, rank);
  }

  bool dfs(Engine& e) {
    if (smallest_domain(e, rank) < 0) {
      witness = e.values();
      return true;
    }
    if (!lp.feasible(e.values(), e.uppers())) return false;
    const int v = branch_variable(e);
    const double target = lp.point()[v];
    std::vector<int> values;
    for (int val = e.lo(v); val <= e.hi(v); ++val) values.push_back(val);
    std::stable_sort(values.begin(), values.end(),
                     [&](int a, int b) { return std::fabs(a - target) < std::fabs(b - target); });
    for (int val : values) {
      if (!control.count_node()) return false;
      const std::size_t m = e.mark();
      if (e.assign(v, val) && dfs(e)) return true;
      e.undo(m);
      if (control.stop) return false;
    }
    return false;
  }
};

}  // namespace

FeasibilityResult check_feasible(const LinearSystem& sys, const Limits& limits) {
  Control control;
  control.limits = limits;
  control.limits.max_solutions = 0;
  FeasibilityResult out;
  Engine e(sys);
  if (!e.init()) {
    out.verdict = Verdict::Infeasible;
    out.stats = control.stats();
    return out;
  }
  control.count_node();
  const std::vector<int> order = branch_order(sys);
  std::vector<int> rank(sys.vars.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
  FeasibilitySearch search{rank, control, detail::LpRelaxation(sys), {}};
  if (search.dfs(e)) {
    out.witness = std::move(search.witness);
    out.verdict = Verdict::Feasible;
    control.solutions = 1;
  } else {
    out.verdict = control.stop ? Verdict::Unknown : Verdict::Infeasible;
  }
  out.stats = control.stats();
  return out;
}

namespace {

bool is_binary(const Variable& v) {
  return (v.kind == VarKind::Indicator || v.kind == VarKind::BlockChoice) && v.lo == 0 && v.hi == 1;
}

void write_terms(std::ostringstream& os, const LinearSystem& sys, const std::vector<Term>& terms) {
  int on_line = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (on_line == 12) {
      os << "\n   ";
      on_line = 0;
    }
    const long a = terms[i].coef;
    if (i == 0)
      os << (a < 0 ? "- " : "");
    else
      os << (a < 0 ? " - " : " + ");
    os << std::abs(a) << ' ' << sys.vars[terms[i].var].name;
    ++on_line;
  }
}

}  // namespace

std::string export_lp(const LinearSystem& sys, const std::string& comment) {
  std::ostringstream os;
  if (!comment.empty()) os << "\\ " << comment << '\n';
  os << "Minimize\n obj: 0\nSubject To\n";
  for (std::size_t r = 0; r < sys.rows.size(); ++r) {
    const Row& row = sys.rows[r];
    if (row.terms.empty()) continue;
    os << ' ' << (row.name.empty() ? "c" + std::to_string(r) : row.name) << ": ";
    write_terms(os, sys, row.terms);
    os << (row.sense == Sense::Eq ? " = " : row.sense == Sense::Le ? " <= " : " >= ") << row.rhs << '\n';
  }
  os << "Bounds\n";
  for (const Variable& v : sys.vars) {
    if (is_binary(v)) continue;
    if (v.lo == v.hi)
      os << ' ' << v.name << " = " << v.lo << '\n';
    else
      os << ' ' << v.lo << " <= " << v.name << " <= " << v.hi << '\n';
  }
  std::ostringstream generals, binaries;
  int g = 0, b = 0;
  for (const Variable& v : sys.vars) {
    if (is_binary(v))
      binaries << (b++ % 12 == 0 ? "\n " : " ") << v.name;
    else
      generals << (g++ % 12 == 0 ? "\n " : " ") << v.name;
  }
  if (g) os << "Generals" << generals.str() << '\n';
  if (b) os << "Binaries" << binaries.str() << '\n';
  os << "End\n";
  return os.str();
}

FeasibilityResult read_verdict(std::istream& in, const LinearSystem& sys) {
  FeasibilityResult out;
  std::string word;
  if (!(in >> word)) throw Error(ErrorKind::FormatError, "line 1: empty verdict");
  if (word == "INFEASIBLE") {
    out.verdict = Verdict::Infeasible;
    if (in >> word) throw Error(ErrorKind::FormatError, "unexpected text after INFEASIBLE");
    return out;
  }
  if (word != "FEASIBLE") throw Error(ErrorKind::FormatError, "line 1: expected FEASIBLE or INFEASIBLE");
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < sys.vars.size(); ++i) index[sys.vars[i].name] = static_cast<int>(i);
  std::vector<int> values(sys.vars.size(), 0);
  while (in >> word) {
    const auto eq = word.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::FormatError, "token '" + word + "' is not name=value");
    auto it = index.find(word.substr(0, eq));
    if (it == index.end()) throw Error(ErrorKind::FormatError, "unknown variable '" + word.substr(0, eq) + "'");
    try {
      std::size_t used = 0;
      const std::string num = word.substr(eq + 1);
      const double value = std::stod(num, &used);
      if (used != num.size() || value != static_cast<double>(static_cast<long>(value)))
        throw Error(ErrorKind::FormatError, "value of '" + it->first + "' is not an integer");
      values[it->second] = static_cast<int>(value);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::FormatError, "value of '" + it->first + "' is not a number");
    }
  }
  if (!sys.satisfied(values)) throw Error(ErrorKind::FormatError, "witness violates the system");
  out.verdict = Verdict::Feasible;
  out.witness = std::move(values);
  out.stats.solutions = 1;
  return out;
}

FeasibilityResult read_verdict_file(const std::string& path, const LinearSystem& sys) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FormatError, "cannot open " + path);
  return read_verdict(in, sys);
}

}  // namespace codeclass
