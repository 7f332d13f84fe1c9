#include "codeclass/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "codeclass/error.hpp"

namespace codeclass {

const char* version() { return CODECLASS_VERSION; }

namespace {

using Clock = std::chrono::steady_clock;

bool record_less(const CodeRecord& a, const CodeRecord& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  return a.code.mult() < b.code.mult();
}

// Keeps the record with the smallest (parent, r) per canonical vector.
void keep_first(std::map<std::vector<int>, CodeRecord>& store, CodeRecord rec) {
  auto it = store.find(rec.code.mult());
  if (it == store.end()) {
    store.emplace(rec.code.mult(), std::move(rec));
  } else if (std::make_pair(rec.parent, rec.r) < std::make_pair(it->second.parent, it->second.r)) {
    it->second = std::move(rec);
  }
}

std::vector<CodeRecord> sorted_records(std::map<std::vector<int>, CodeRecord>& store) {
  std::vector<CodeRecord> out;
  out.reserve(store.size());
  for (auto& [key, rec] : store) out.push_back(std::move(rec));
  std::sort(out.begin(), out.end(), record_less);
  return out;
}

bool weights_within(const std::vector<int>& hyperplane, int n, const WeightSpectrum& w) {
  for (int mh : hyperplane)
    if (!w.contains(n - mh)) return false;
  return true;
}

}  // namespace

int ClassificationTask::lambda_at(int k) const {
  auto it = layer_lambda.find(k);
  if (it != layer_lambda.end()) return it->second;
  return k == k_target ? lambda : kUnbounded;
}

const WeightSpectrum& ClassificationTask::spectrum_at(int k) const {
  auto it = layer_spectrum.find(k);
  return it != layer_spectrum.end() ? it->second : spectrum;
}

int ClassificationTask::max_length_at(int k) const { return n_max - (k_target - k); }

int ClassificationTask::min_length_at(int k) const {
  if (n_min <= 0) return 0;
  long reach = 0;
  for (int j = k + 1; j <= k_target; ++j) {
    const int l = lambda_at(j);
    if (l == kUnbounded) return 0;
    reach += l;
  }
  return static_cast<int>(std::max<long>(0, n_min - reach));
}

void LayerStats::merge(const LayerStats& o) {
  inputs += o.inputs;
  subproblems += o.subproblems;
  line_pruned += o.line_pruned;
  phase0_infeasible += o.phase0_infeasible;
  phase0_unknown += o.phase0_unknown;
  phase1_solutions += o.phase1_solutions;
  rejected_min_extension += o.rejected_min_extension;
  rejected_weights += o.rejected_weights;
  rejected_length += o.rejected_length;
  rejected_multiplicity += o.rejected_multiplicity;
  candidates += o.candidates;
  codes += o.codes;
  nodes += o.nodes;
  incomplete += o.incomplete;
}

std::string LayerStats::summary() const {
  std::ostringstream os;
  os << "k=" << dimension << " inputs=" << inputs << " subproblems=" << subproblems << " line-pruned=" << line_pruned
     << " phase0-infeasible=" << phase0_infeasible << " phase0-unknown=" << phase0_unknown
     << " solutions=" << phase1_solutions << " rejected(min-ext=" << rejected_min_extension
     << " weights=" << rejected_weights << " length=" << rejected_length << " mult=" << rejected_multiplicity
     << ") candidates=" << candidates << " codes=" << codes << " nodes=" << nodes << " incomplete=" << incomplete;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << " seconds=" << seconds;
  return os.str();
}

CodeRecord make_record(const PointMultiset& m, Equivalence kind, int parent, int r) {
  const CanonicalForm cf = canonical_form(m, kind);
  CodeRecord rec;
  rec.code = PointMultiset(m.geometry_ptr(), cf.canonical);
  rec.weights = weight_distribution(rec.code);
  rec.aut_order = cf.aut_order;
  rec.parent = parent;
  rec.r = r;
  rec.certificate = cf.certificate;
  return rec;
}

CodeDatabase make_database(const ClassificationTask& task, int k) {
  CodeDatabase db;
  db.q = task.q;
  db.k = k;
  db.spectrum = task.spectrum_at(k);
  db.lambda = task.lambda_at(k);
  db.equivalence = task.equivalence;
  return db;
}

Subproblem build_subproblem(const PointMultiset& m, int r, const ClassificationTask& task) {
  Subproblem out;
  const int k1 = m.k() + 1;
  const int lambda = task.lambda_at(k1);
  const WeightSpectrum& spectrum = task.spectrum_at(k1);
  const PointMultiset s = systematize(m);

  const bool enforce = task.min_extension_in_phase1 || task.use_phase0;
  if (enforce) {
    for (int u = 0; u < s.geometry().num_points(); ++u) {
      const int c = s[u];
      if (preprocess_line_feasibility(m.q(), r, std::min(lambda, std::max(c, 1)), c)) {
        out.line_pruned = true;
        return out;
      }
    }
  }

  ExtensionOptions options;
  options.lambda = lambda;
  options.hyperplane_fraction = task.hyperplane_fraction;
  out.plain = build_extension_system(s, r, spectrum, options);
  if (task.break_symmetry) out.plain = break_scaling_symmetry(out.plain);
  const bool gapped = task.gap_reformulation && spectrum.blocks().size() > 1;
  // For r = 1 the indicator rows are vacuous.
  out.linear = r > 1 ? linearize_min_extension(out.plain, r) : out.plain;
  if (gapped) {
    out.plain = apply_gap_reformulation(out.plain, spectrum);
    out.linear = apply_gap_reformulation(out.linear, spectrum);
  }
  return out;
}

ExtensionResult extend_with(const PointMultiset& m, int r, const ClassificationTask& task, int parent) {
  ExtensionResult out;
  LayerStats& st = out.stats;
  const auto t0 = Clock::now();
  const int k1 = m.k() + 1;
  st.dimension = k1;
  st.subproblems = 1;
  const int lambda = task.lambda_at(k1);
  const WeightSpectrum& spectrum = task.spectrum_at(k1);
  Subproblem sub = build_subproblem(m, r, task);
  if (sub.line_pruned) {
    st.line_pruned = 1;
    return out;
  }
  const ExtensionSystem& plain = sub.plain;
  const ExtensionSystem& linear = sub.linear;

  if (task.use_phase0) {
    FeasibilityResult f;
    auto vf = task.verdict_files.find(std::to_string(parent) + ":" + std::to_string(r));
    if (vf != task.verdict_files.end()) {
      f = read_verdict_file(vf->second, linear.sys);
    } else {
      f = check_feasible(linear.sys, task.limits);
      st.nodes += f.stats.nodes;
    }
    if (f.verdict == Verdict::Infeasible) {
      st.phase0_infeasible = 1;
      st.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      return out;
    }
    if (f.verdict == Verdict::Unknown) st.phase0_unknown = 1;
  }

  const ExtensionSystem& phase1 = task.min_extension_in_phase1 ? linear : plain;
  const int max_len = task.max_length_at(k1);
  const int min_len = task.min_length_at(k1);
  std::map<std::vector<int>, CodeRecord> store;
  EnumerateOptions eo;
  eo.limits = task.limits;
  eo.lp_pruning = task.lp_pruning;
  const SearchStats ss = enumerate_solutions(
      phase1.sys,
      [&](const std::vector<int>& values) {
        ++st.phase1_solutions;
        PointMultiset ext = phase1.decode(values);
        if (ext.min_positive_multiplicity() != r) {
          ++st.rejected_min_extension;
          return;
        }
        if (ext.length() > max_len || ext.length() < min_len) {
          ++st.rejected_length;
          return;
        }
        if (lambda != kUnbounded && ext.max_multiplicity() > lambda) {
          ++st.rejected_multiplicity;
          return;
        }
        if (!weights_within(hyperplane_multiplicities(ext), ext.length(), spectrum)) {
          ++st.rejected_weights;
          return;
        }
        ++st.candidates;
        keep_first(store, make_record(ext, task.equivalence, parent, r));
      },
      eo);
  st.nodes += ss.nodes;
  if (ss.status != SearchStatus::Completed) st.incomplete = 1;
  out.codes = sorted_records(store);
  st.codes = out.codes.size();
  st.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

ExtensionResult extend_step(const PointMultiset& m, const ClassificationTask& task, int parent) {
  ExtensionResult out;
  const int k1 = m.k() + 1;
  out.stats.dimension = k1;
  out.stats.inputs = 1;
  const int lambda = task.lambda_at(k1);
  const int top = std::min<long>(lambda, static_cast<long>(task.max_length_at(k1)) - m.length());
  std::map<std::vector<int>, CodeRecord> store;
  for (int r = 1; r <= top; ++r) {
    if (m.length() + r < task.min_length_at(k1)) continue;
    ExtensionResult part = extend_with(m, r, task, parent);
    out.stats.merge(part.stats);
    out.stats.seconds += part.stats.seconds;
    for (auto& rec : part.codes) keep_first(store, std::move(rec));
  }
  out.codes = sorted_records(store);
  out.stats.codes = out.codes.size();
  return out;
}

CodeDatabase generate_direct(const ClassificationTask& task, int k) {
  if (k < 1 || k > 2) throw Error(ErrorKind::InvalidArgument, "direct generation needs dimension 1 or 2");
  CodeDatabase db = make_database(task, k);
  const WeightSpectrum& w = task.spectrum_at(k);
  const int lambda = task.lambda_at(k);
  const int lo = std::max(k, task.min_length_at(k));
  const int hi = task.max_length_at(k);
  auto g = geometry(k, task.q);
  std::map<std::vector<int>, CodeRecord> store;
  for (int n = lo; n <= hi; ++n) {
    if (k == 1) {
      if (w.contains(n) && n <= lambda) keep_first(store, make_record(PointMultiset(g, {n}), task.equivalence));
      continue;
    }
    // On PG(1,q) every hyperplane is a single point, so n - M(P) must be a weight.
    std::vector<int> values;
    for (int x : w.weights())
      if (n - x >= 0 && n - x <= lambda) values.push_back(n - x);
    std::sort(values.begin(), values.end());
    const int np = g->num_points();
    std::vector<int> mult(np, 0);
    auto rec = [&](auto&& self, int p, int left) -> void {
      if (p == np) {
        if (left != 0) return;
        PointMultiset m(g, mult);
        if (static_cast<int>(m.support().size()) < 2) return;
        keep_first(store, make_record(m, task.equivalence));
        return;
      }
      for (int v : values) {
        if (v > left) break;
        // the remaining points must be able to absorb what is left
        const long room = static_cast<long>(np - p - 1) * values.back();
        if (left - v > room) continue;
        mult[p] = v;
        self(self, p + 1, left - v);
      }
      mult[p] = 0;
    };
    rec(rec, 0, n);
  }
  db.records = sorted_records(store);
  return db;
}

CodeDatabase extend_layer(const CodeDatabase& layer, const ClassificationTask& task, LayerStats* stats) {
  const int k1 = layer.k + 1;
  CodeDatabase next = make_database(task, k1);
  LayerStats total;
  total.dimension = k1;
  total.inputs = layer.records.size();
  const auto t0 = Clock::now();

  struct Job {
    int index;
    int r;
  };
  std::vector<Job> jobs;
  const int lambda = task.lambda_at(k1);
  for (int i = 0; i < static_cast<int>(layer.records.size()); ++i) {
    const int n = layer.records[i].length();
    const int top = std::min<long>(lambda, static_cast<long>(task.max_length_at(k1)) - n);
    for (int r = 1; r <= top; ++r)
      if (n + r >= task.min_length_at(k1)) jobs.push_back({i, r});
  }

  std::mutex mutex;
  std::map<std::vector<int>, CodeRecord> store;
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  auto work = [&] {
    while (true) {
      const std::size_t j = cursor++;
      if (j >= jobs.size()) break;
      try {
        ExtensionResult part = extend_with(layer.records[jobs[j].index].code, jobs[j].r, task, jobs[j].index);
        std::lock_guard<std::mutex> lock(mutex);
        total.merge(part.stats);
        for (auto& rec : part.codes) keep_first(store, std::move(rec));
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!failure) failure = std::current_exception();
        cursor = jobs.size();
      }
    }
  };
  const int workers = std::max(1, task.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  next.records = sorted_records(store);
  total.codes = next.records.size();
  total.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  next.exhaustive = layer.exhaustive && total.incomplete == 0;
  if (stats) *stats = total;
  return next;
}

CodeDatabase classify(const ClassificationTask& task, const LayerCallback& on_layer) {
  if (task.k0 < 1 || task.k0 >= task.k_target)
    throw Error(ErrorKind::InvalidArgument, "need 1 <= start dimension < target dimension");
  if (task.spectrum.empty()) throw Error(ErrorKind::SpectrumEmpty, "no weights given");
  CodeDatabase layer;
  LayerStats first;
  first.dimension = task.k0;
  const auto t0 = Clock::now();
  if (task.seeds.empty()) {
    layer = generate_direct(task, task.k0);
  } else {
    layer = make_database(task, task.k0);
    std::map<std::vector<int>, CodeRecord> store;
    for (const auto& s : task.seeds) {
      if (s.k() != task.k0 || s.q() != task.q) throw Error(ErrorKind::InvalidArgument, "seed has wrong dimension or field");
      keep_first(store, make_record(s, task.equivalence));
    }
    layer.records = sorted_records(store);
  }
  first.codes = layer.records.size();
  first.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (on_layer) on_layer(layer, first);
  for (int k = task.k0; k < task.k_target; ++k) {
    LayerStats st;
    layer = extend_layer(layer, task, &st);
    if (on_layer) on_layer(layer, st);
  }
  return layer;
}

std::vector<int> projection_closure_violations(const CodeDatabase& next, const CodeDatabase& prev) {
  std::map<std::vector<int>, int> known;
  for (int i = 0; i < static_cast<int>(prev.records.size()); ++i) known[prev.records[i].code.mult()] = i;
  std::vector<int> bad;
  for (int i = 0; i < static_cast<int>(next.records.size()); ++i) {
    const PointMultiset& m = next.records[i].code;
    const int r = m.min_positive_multiplicity();
    int center = 0;
    while (m[center] != r) ++center;
    const PointMultiset p = projection(m, center);
    if (!known.count(canonical_form(p, next.equivalence).canonical)) bad.push_back(i);
  }
  return bad;
}

std::string encode_multiplicities(const std::vector<int>& mult) {
  std::string s;
  for (int m : mult) {
    if (m < 36)
      s += digit_char(m);
    else
      s += "[" + std::to_string(m) + "]";
  }
  return s;
}

std::vector<int> decode_multiplicities(const std::string& text, int expected) {
  std::vector<int> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '[') {
      const auto close = text.find(']', i);
      if (close == std::string::npos || close == i + 1) throw Error(ErrorKind::FormatError, "unclosed '['");
      int v = 0;
      for (std::size_t j = i + 1; j < close; ++j) {
        if (text[j] < '0' || text[j] > '9') throw Error(ErrorKind::FormatError, "bad bracketed multiplicity");
        v = v * 10 + (text[j] - '0');
      }
      out.push_back(v);
      i = close;
    } else {
      const int v = digit_value(text[i]);
      if (v < 0) throw Error(ErrorKind::FormatError, std::string("bad multiplicity digit '") + text[i] + "'");
      out.push_back(v);
    }
  }
  if (static_cast<int>(out.size()) != expected)
    throw Error(ErrorKind::FormatError,
                "expected " + std::to_string(expected) + " multiplicities, got " + std::to_string(out.size()));
  return out;
}

void db_write(const CodeDatabase& db, std::ostream& out) {
  out << "codeclass-db 1\n";
  out << "q " << db.q << '\n';
  out << "k " << db.k << '\n';
  out << "spectrum " << db.spectrum.to_string() << '\n';
  out << "maxmult " << (db.lambda == kUnbounded ? std::string("none") : std::to_string(db.lambda)) << '\n';
  out << "equivalence " << to_string(db.equivalence) << '\n';
  out << "exhaustive " << (db.exhaustive ? "yes" : "no") << '\n';
  out << "tool " << db.tool_version << '\n';
  out << "records " << db.records.size() << '\n';
  for (const auto& rec : db.records) {
    std::string wd;
    for (auto& [w, a] : rec.weights.counts) {
      if (!wd.empty()) wd += ',';
      wd += std::to_string(w) + '^' + std::to_string(a);
    }
    out << rec.length() << ' ' << rec.r << ' ' << rec.aut_order << ' ' << rec.parent << ' ' << wd << ' '
        << encode_multiplicities(rec.code.mult()) << '\n';
  }
}

namespace {

[[noreturn]] void format_error(int line, const std::string& what) {
  throw Error(ErrorKind::FormatError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

CodeDatabase db_read(std::istream& in) {
  CodeDatabase db;
  std::string line;
  int lineno = 0;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) format_error(lineno + 1, std::string("missing ") + what);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  auto field = [&](const std::string& key) {
    next_line(key.c_str());
    if (line.compare(0, key.size() + 1, key + " ") != 0) format_error(lineno, "expected '" + key + "'");
    return line.substr(key.size() + 1);
  };
  next_line("header");
  if (line.compare(0, 13, "codeclass-db ") != 0) format_error(lineno, "not a code database");
  if (line != "codeclass-db 1")
    throw Error(ErrorKind::VersionMismatch, "line 1: unsupported database version '" + line.substr(13) + "'");
  try {
    db.q = std::stoi(field("q"));
    db.k = std::stoi(field("k"));
  } catch (const std::logic_error&) {
    format_error(lineno, "bad integer");
  }
  if (db.q < 2 || db.k < 1) format_error(lineno, "bad parameters");
  try {
    db.spectrum = WeightSpectrum::parse(field("spectrum"));
  } catch (const Error& e) {
    format_error(lineno, e.what());
  }
  const std::string mm = field("maxmult");
  try {
    db.lambda = mm == "none" ? kUnbounded : std::stoi(mm);
  } catch (const std::logic_error&) {
    format_error(lineno, "bad maxmult");
  }
  try {
    db.equivalence = parse_equivalence(field("equivalence"));
  } catch (const Error& e) {
    format_error(lineno, e.what());
  }
  const std::string ex = field("exhaustive");
  if (ex != "yes" && ex != "no") format_error(lineno, "exhaustive must be yes or no");
  db.exhaustive = ex == "yes";
  db.tool_version = field("tool");
  long count = 0;
  try {
    count = std::stol(field("records"));
  } catch (const std::logic_error&) {
    format_error(lineno, "bad record count");
  }
  auto g = geometry(db.k, db.q);
  for (long i = 0; i < count; ++i) {
    next_line("record");
    std::istringstream is(line);
    long length = 0, aut = 0;
    int r = 0, parent = 0;
    std::string wd, digits, extra;
    if (!(is >> length >> r >> aut >> parent >> wd >> digits) || (is >> extra))
      format_error(lineno, "record needs 6 fields");
    CodeRecord rec;
    try {
      rec.code = PointMultiset(g, decode_multiplicities(digits, g->num_points()));
    } catch (const Error& e) {
      format_error(lineno, e.what());
    }
    if (rec.code.length() != length) format_error(lineno, "length does not match multiplicities");
    std::stringstream ws(wd);
    std::string tok;
    while (std::getline(ws, tok, ',')) {
      const auto caret = tok.find('^');
      if (caret == std::string::npos) format_error(lineno, "bad weight token '" + tok + "'");
      try {
        rec.weights.counts[std::stoi(tok.substr(0, caret))] = std::stol(tok.substr(caret + 1));
      } catch (const std::logic_error&) {
        format_error(lineno, "bad weight token '" + tok + "'");
      }
    }
    if (rec.weights != weight_distribution(rec.code)) format_error(lineno, "weight distribution does not match code");
    rec.aut_order = static_cast<std::uint64_t>(aut);
    rec.parent = parent;
    rec.r = r;
    rec.certificate = certificate_of(db.k, db.q, rec.code.mult());
    db.records.push_back(std::move(rec));
  }
  if (std::getline(in, line) && !line.empty()) format_error(lineno + 1, "trailing data");
  return db;
}

void db_write_file(const CodeDatabase& db, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  db_write(db, out);
  if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for " + path);
}

CodeDatabase db_read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FormatError, "cannot open " + path);
  return db_read(in);
}

}  // namespace codeclass
