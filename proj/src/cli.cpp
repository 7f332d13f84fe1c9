#include "codeclass/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "codeclass/error.hpp"
#include "codeclass/pipeline.hpp"
#include "codeclass/solver.hpp"

namespace codeclass {

namespace {

const std::vector<std::string> kSubcommands = {"classify", "extend", "wdist", "canon", "feasible", "exportlp"};

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string mult_string(int v) { return v == kUnbounded ? "none" : std::to_string(v); }

int parse_mult(const std::string& s) {
  if (s == "none") return kUnbounded;
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || v < 1) throw Error(ErrorKind::InvalidArgument, "bad multiplicity bound '" + s + "'");
  return v;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) throw Error(ErrorKind::InvalidArgument, "bad integer list '" + s + "'");
    out.push_back(v);
  }
  return out;
}

// Shared flags; each subcommand gets the subset it uses.
struct Flags {
  std::string max_mult = "none";
  std::vector<std::string> layer_max_mult;
  std::string equivalence = "semilinear";
  bool no_phase0 = false;
  bool no_lp = false;
  bool no_symmetry = false;
};

void add_problem_flags(CLI::App* s, CliConfig& c, Flags& f) {
  s->add_option("--q", c.q, "field size");
  s->add_option("--nmax", c.n_max, "maximum final length");
  s->add_option("--nmin", c.n_min, "minimum final length");
  s->add_option("--weights", c.weights, "allowed weights, e.g. 48,56");
  s->add_option("--div", c.div, "divisibility of the weight blocks");
  s->add_option("--range", c.range, "multiplier ranges a:b,a:b for --div");
  s->add_option("--max-mult", f.max_mult, "maximum point multiplicity or 'none'");
  s->add_flag("--gap-reform", c.gap_reform, "block form for several weight blocks");
  s->add_option("--hyperplane-fraction", c.hyperplane_fraction, "fraction of weight equations kept");
  s->add_flag("--no-phase0", f.no_phase0, "skip the feasibility check before enumeration");
  s->add_flag("--no-lp", f.no_lp, "no relaxation pruning during enumeration");
  s->add_flag("--no-symmetry", f.no_symmetry, "keep all solutions of the scaling orbits");
  s->add_option("--workers", c.workers, "worker threads");
  s->add_option("--max-nodes", c.max_nodes, "node limit per subproblem");
  s->add_option("--max-seconds", c.max_seconds, "time limit per subproblem");
  s->add_option("--equivalence", f.equivalence, "linear or semilinear");
  s->add_option("--verdict", c.verdicts, "external verdict parent:r=path");
}

void apply_flags(CliConfig& c, const Flags& f) {
  c.max_mult = parse_mult(f.max_mult);
  c.equivalence = parse_equivalence(f.equivalence);
  c.phase0 = !f.no_phase0;
  c.lp = !f.no_lp;
  c.symmetry = !f.no_symmetry;
  for (const std::string& item : f.layer_max_mult) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::InvalidArgument, "bad layer bound '" + item + "'");
    const std::vector<int> k = parse_int_list(item.substr(0, colon));
    if (k.size() != 1) throw Error(ErrorKind::InvalidArgument, "bad layer bound '" + item + "'");
    c.layer_max_mult[k[0]] = parse_mult(item.substr(colon + 1));
  }
}

bool needs_spectrum(const std::string& sub) { return sub == "classify" || sub == "feasible" || sub == "exportlp"; }

void validate(const CliConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidArgument, m); };
  const std::string& s = c.subcommand;
  if (!c.weights.empty() && (c.div != 0 || !c.range.empty())) fail("--weights excludes --div/--range");
  if ((c.div != 0) != !c.range.empty()) fail("--div and --range go together");
  const bool has_spectrum = !c.weights.empty() || c.div != 0;
  if (needs_spectrum(s) && !has_spectrum) fail(s + " needs --weights or --div/--range");
  if (has_spectrum) {
    const WeightSpectrum w = spectrum_of(c);
    if (c.gap_reform && w.blocks().size() < 2) fail("--gap-reform needs at least two weight blocks");
  }
  if (c.hyperplane_fraction <= 0.0 || c.hyperplane_fraction > 1.0) fail("--hyperplane-fraction must lie in (0, 1]");
  if (c.workers < 1) fail("--workers must be >= 1");
  if (c.max_seconds < 0) fail("--max-seconds must be >= 0");
  if (s == "classify") {
    if (c.seeds.empty() && c.q < 2) fail("classify needs --q");
    if (c.dim < 1) fail("classify needs --dim");
    if (c.n_max < 1) fail("classify needs --nmax");
    if (c.seeds.empty() && (c.k0 < 1 || c.k0 > 2)) fail("--k0 must be 1 or 2 without --seeds");
    if (c.seeds.empty() && c.dim < c.k0) fail("--dim must be >= --k0");
  }
  if (s == "extend" && c.input.empty()) fail("extend needs --in");
  if (s == "extend" && c.n_max < 1) fail("extend needs --nmax");
  if (s == "wdist" && c.input.empty()) fail("wdist needs a generator matrix file");
  if (s == "canon" && c.input.empty()) fail("canon needs an input file");
  if (s == "feasible" || s == "exportlp") {
    if (c.input.empty() || c.record < 0 || c.r < 1) fail(s + " needs --from, --record and --r");
  }
  for (const std::string& v : c.verdicts) {
    const auto eq = v.find('=');
    const auto colon = v.find(':');
    if (eq == std::string::npos || colon == std::string::npos || colon > eq)
      fail("bad verdict '" + v + "', expected parent:r=path");
  }
}

}  // namespace

WeightSpectrum spectrum_of(const CliConfig& c) {
  if (!c.weights.empty()) return WeightSpectrum::from_weights(parse_int_list(c.weights));
  if (c.div < 1) throw Error(ErrorKind::InvalidArgument, "--div must be >= 1");
  std::vector<SpectrumBlock> blocks;
  std::stringstream in(c.range);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::InvalidArgument, "bad range '" + tok + "'");
    const std::vector<int> a = parse_int_list(tok.substr(0, colon));
    const std::vector<int> b = parse_int_list(tok.substr(colon + 1));
    if (a.size() != 1 || b.size() != 1 || a[0] < 1 || b[0] < a[0])
      throw Error(ErrorKind::InvalidArgument, "bad range '" + tok + "'");
    blocks.push_back({c.div, a[0], b[0]});
  }
  return WeightSpectrum(std::move(blocks));
}

std::vector<std::string> CliConfig::to_args() const {
  const CliConfig d;
  std::vector<std::string> a = {subcommand};
  auto put = [&](const std::string& flag, const std::string& value) {
    a.push_back(flag);
    a.push_back(value);
  };
  if (q != d.q) put("--q", std::to_string(q));
  if (dim != d.dim) put("--dim", std::to_string(dim));
  if (k0 != d.k0) put("--k0", std::to_string(k0));
  if (n_max != d.n_max) put("--nmax", std::to_string(n_max));
  if (n_min != d.n_min) put("--nmin", std::to_string(n_min));
  if (!weights.empty()) put("--weights", weights);
  if (div != d.div) put("--div", std::to_string(div));
  if (!range.empty()) put("--range", range);
  if (max_mult != d.max_mult) put("--max-mult", mult_string(max_mult));
  for (const auto& [k, l] : layer_max_mult) put("--layer-max-mult", std::to_string(k) + ":" + mult_string(l));
  if (!input.empty()) put("--in", input);
  if (!output.empty()) put("--out", output);
  if (!seeds.empty()) put("--seeds", seeds);
  if (record != d.record) put("--record", std::to_string(record));
  if (r != d.r) put("--r", std::to_string(r));
  if (!phase0) a.push_back("--no-phase0");
  if (gap_reform) a.push_back("--gap-reform");
  if (hyperplane_fraction != d.hyperplane_fraction) put("--hyperplane-fraction", format_double(hyperplane_fraction));
  if (!lp) a.push_back("--no-lp");
  if (!symmetry) a.push_back("--no-symmetry");
  if (workers != d.workers) put("--workers", std::to_string(workers));
  if (max_nodes != d.max_nodes) put("--max-nodes", std::to_string(max_nodes));
  if (max_seconds != d.max_seconds) put("--max-seconds", format_double(max_seconds));
  if (equivalence != d.equivalence) put("--equivalence", to_string(equivalence));
  for (const std::string& v : verdicts) put("--verdict", v);
  for (int i = 0; i < verbosity; ++i) a.push_back("-v");
  return a;
}

std::string CliConfig::canonical_string() const {
  std::string s = "codeclass";
  for (const std::string& a : to_args()) s += " " + a;
  return s;
}

CliConfig parse_cli(const std::vector<std::string>& args) {
  CliConfig c;
  Flags f;
  CLI::App app{"Classification of linear codes with prescribed weights"};
  app.require_subcommand(1, 1);
  app.set_help_flag();

  std::vector<CLI::App*> subs;
  CLI::App* classify = app.add_subcommand("classify", "layered classification");
  subs.push_back(classify);
  add_problem_flags(classify, c, f);
  classify->add_option("--dim", c.dim, "target dimension");
  classify->add_option("--k0", c.k0, "start dimension without seeds");
  classify->add_option("--layer-max-mult", f.layer_max_mult, "bound for one layer, k:lambda");
  classify->add_option("--seeds", c.seeds, "database of start codes");
  classify->add_option("--out", c.output, "database file of the last layer");

  CLI::App* extend = app.add_subcommand("extend", "extend one layer by one dimension");
  subs.push_back(extend);
  add_problem_flags(extend, c, f);
  extend->add_option("--in,--from", c.input, "database of the layer");
  extend->add_option("--out", c.output, "database file of the next layer");

  CLI::App* wdist = app.add_subcommand("wdist", "weight distribution of a generator matrix");
  subs.push_back(wdist);
  wdist->add_option("--in,input", c.input, "generator matrix file");

  CLI::App* canon = app.add_subcommand("canon", "canonical form and automorphism group order");
  subs.push_back(canon);
  canon->add_option("--in,--from,input", c.input, "generator matrix file, or database with --record");
  canon->add_option("--record", c.record, "record index in a database");
  canon->add_option("--equivalence", f.equivalence, "linear or semilinear");

  for (const char* name : {"feasible", "exportlp"}) {
    CLI::App* s = app.add_subcommand(name, std::string(name) == "feasible" ? "feasibility of one subproblem"
                                                                            : "LP file of one subproblem");
    subs.push_back(s);
    add_problem_flags(s, c, f);
    s->add_option("--in,--from", c.input, "database of the layer");
    s->add_option("--record", c.record, "record index");
    s->add_option("--r", c.r, "multiplicity of the new point");
    if (std::string(name) == "exportlp") s->add_option("--out", c.output, "LP file, standard output by default");
  }
  for (CLI::App* s : subs) s->add_flag("-v,--verbose", c.verbosity, "more output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorKind::InvalidArgument, e.what());
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  apply_flags(c, f);
  validate(c);
  return c;
}

namespace {

ClassificationTask task_of(const CliConfig& c) {
  ClassificationTask t;
  t.q = c.q;
  t.k0 = c.k0;
  t.k_target = c.dim;
  t.n_max = c.n_max;
  t.n_min = c.n_min;
  if (!c.weights.empty() || c.div != 0) t.spectrum = spectrum_of(c);
  t.lambda = c.max_mult;
  t.layer_lambda = c.layer_max_mult;
  t.use_phase0 = c.phase0;
  t.gap_reformulation = c.gap_reform;
  t.hyperplane_fraction = c.hyperplane_fraction;
  t.lp_pruning = c.lp;
  t.break_symmetry = c.symmetry;
  t.workers = c.workers;
  t.limits.max_nodes = c.max_nodes;
  t.limits.max_seconds = c.max_seconds;
  t.equivalence = c.equivalence;
  for (const std::string& v : c.verdicts) {
    const auto eq = v.find('=');
    t.verdict_files[v.substr(0, eq)] = v.substr(eq + 1);
  }
  return t;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

void print_layer_header(std::ostream& out) {
  out << std::left << std::setw(4) << "k" << std::right << std::setw(8) << "inputs" << std::setw(12) << "subproblems"
      << std::setw(10) << "pruned" << std::setw(12) << "candidates" << std::setw(8) << "codes" << std::setw(14)
      << "nodes" << std::setw(11) << "seconds" << "  complete\n";
}

void print_layer(std::ostream& out, const LayerStats& s, std::size_t records) {
  std::ostringstream sec;
  sec << std::fixed << std::setprecision(2) << s.seconds;
  out << std::left << std::setw(4) << s.dimension << std::right << std::setw(8) << s.inputs << std::setw(12)
      << s.subproblems << std::setw(10) << s.line_pruned + s.phase0_infeasible << std::setw(12) << s.candidates
      << std::setw(8) << records << std::setw(14) << s.nodes << std::setw(11) << sec.str() << "  "
      << (s.incomplete ? "no" : "yes") << "\n";
}

void print_lengths(std::ostream& out, const CodeDatabase& db) {
  std::vector<int> lengths;
  for (const CodeRecord& r : db.records) lengths.push_back(r.length());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  out << "records " << db.records.size() << "\n";
  out << "lengths " << (lengths.empty() ? "-" : join(lengths)) << "\n";
  out << "exhaustive " << (db.exhaustive ? "yes" : "no") << "\n";
}

int cmd_classify(const CliConfig& c, std::ostream& out, std::ostream& err) {
  ClassificationTask t = task_of(c);
  if (!c.seeds.empty()) {
    const CodeDatabase seeds = db_read_file(c.seeds);
    if (c.q != 0 && c.q != seeds.q) throw Error(ErrorKind::InvalidArgument, "--q differs from the seed database");
    t.q = seeds.q;
    t.k0 = seeds.k;
    for (const CodeRecord& r : seeds.records) t.seeds.push_back(r.code);
    if (t.k_target <= t.k0) throw Error(ErrorKind::InvalidArgument, "--dim must exceed the seed dimension");
  }
  print_layer_header(out);
  const CodeDatabase db = classify(t, [&](const CodeDatabase& layer, const LayerStats& s) {
    print_layer(out, s, layer.records.size());
    if (c.verbosity > 0) err << "# " << s.summary() << "\n";
  });
  print_lengths(out, db);
  if (!c.output.empty()) db_write_file(db, c.output);
  return db.exhaustive ? kExitOk : kExitIncomplete;
}

int cmd_extend(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const CodeDatabase layer = db_read_file(c.input);
  CliConfig d = c;
  d.q = layer.q;
  d.dim = layer.k + 1;
  ClassificationTask t = task_of(d);
  t.k0 = layer.k;
  if (c.weights.empty() && c.div == 0) t.spectrum = layer.spectrum;
  LayerStats stats;
  const CodeDatabase next = extend_layer(layer, t, &stats);
  print_layer_header(out);
  print_layer(out, stats, next.records.size());
  if (c.verbosity > 0) err << "# " << stats.summary() << "\n";
  print_lengths(out, next);
  if (!c.output.empty()) db_write_file(next, c.output);
  return next.exhaustive ? kExitOk : kExitIncomplete;
}

int cmd_wdist(const CliConfig& c, std::ostream& out) {
  int q = 0;
  const Matrix g = read_generator_file(c.input, q);
  const PointMultiset m = multiset_from_generator(g, q);
  const CodeStats st = code_stats(m);
  const WeightDistribution w = weight_distribution(m);
  out << "n=" << st.length << " k=" << st.dimension << " q=" << q << " weights: " << join(w.weights())
      << " divisibility: " << st.divisibility << " projective: " << (st.projective ? "yes" : "no") << "\n";
  out << "distribution: " << w.to_string() << "\n";
  out << "max multiplicity: " << st.max_multiplicity << "\n";
  return kExitOk;
}

PointMultiset load_code(const CliConfig& c) {
  if (c.record >= 0) {
    const CodeDatabase db = db_read_file(c.input);
    if (c.record >= static_cast<int>(db.records.size()))
      throw Error(ErrorKind::InvalidArgument, "record " + std::to_string(c.record) + " out of range");
    return db.records[c.record].code;
  }
  int q = 0;
  const Matrix g = read_generator_file(c.input, q);
  return multiset_from_generator(g, q);
}

int cmd_canon(const CliConfig& c, std::ostream& out) {
  const PointMultiset m = load_code(c);
  const CanonicalForm f = canonical_form(m, c.equivalence);
  out << "certificate: " << f.certificate << "\n";
  out << "aut: " << f.aut_order << "\n";
  out << "canonical: " << encode_multiplicities(f.canonical) << "\n";
  return kExitOk;
}

ClassificationTask subproblem_task(const CliConfig& c, const PointMultiset& m) {
  CliConfig d = c;
  d.q = m.q();
  d.dim = m.k() + 1;
  if (d.n_max == 0) d.n_max = m.length() + c.r;
  ClassificationTask t = task_of(d);
  t.k0 = m.k();
  return t;
}

int cmd_feasible(const CliConfig& c, std::ostream& out) {
  const PointMultiset m = load_code(c);
  const ClassificationTask t = subproblem_task(c, m);
  const Subproblem sub = build_subproblem(m, c.r, t);
  if (sub.line_pruned) {
    out << "verdict: INFEASIBLE\nreason: line preprocessing\n";
    return kExitInfeasible;
  }
  FeasibilityResult f;
  const std::string key = std::to_string(c.record) + ":" + std::to_string(c.r);
  auto vf = t.verdict_files.find(key);
  if (vf != t.verdict_files.end()) {
    f = read_verdict_file(vf->second, sub.linear.sys);
  } else {
    f = check_feasible(sub.linear.sys, t.limits);
  }
  std::ostringstream sec;
  sec << std::fixed << std::setprecision(2) << f.stats.elapsed;
  out << "verdict: " << to_string(f.verdict) << "\n";
  out << "variables " << sub.linear.sys.vars.size() << " rows " << sub.linear.sys.rows.size() << " nodes "
      << f.stats.nodes << " seconds " << sec.str() << " status " << to_string(f.stats.status) << "\n";
  if (f.verdict == Verdict::Feasible) out << "extension: " << encode_multiplicities(sub.linear.decode(f.witness).mult()) << "\n";
  switch (f.verdict) {
    case Verdict::Feasible: return kExitOk;
    case Verdict::Infeasible: return kExitInfeasible;
    case Verdict::Unknown: return kExitIncomplete;
  }
  return kExitIncomplete;
}

int cmd_exportlp(const CliConfig& c, std::ostream& out) {
  const PointMultiset m = load_code(c);
  const ClassificationTask t = subproblem_task(c, m);
  const Subproblem sub = build_subproblem(m, c.r, t);
  if (sub.line_pruned) {
    out << "line preprocessing proves the subproblem infeasible; no model written\n";
    return kExitInfeasible;
  }
  const std::string text = export_lp(sub.linear.sys, c.canonical_string());
  if (c.output.empty()) {
    out << text;
  } else {
    std::ofstream f(c.output);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + c.output);
    f << text;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig c;
  try {
    c = parse_cli(args);
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\n";
    err << "subcommands:";
    for (const std::string& s : kSubcommands) err << " " << s;
    err << "\n";
    return kExitUsage;
  }
  err << "# " << c.canonical_string() << "\n";
  err << "# codeclass " << version() << "; deterministic, no random choices; output independent of --workers\n";
  try {
    if (c.subcommand == "classify") return cmd_classify(c, out, err);
    if (c.subcommand == "extend") return cmd_extend(c, out, err);
    if (c.subcommand == "wdist") return cmd_wdist(c, out);
    if (c.subcommand == "canon") return cmd_canon(c, out);
    if (c.subcommand == "feasible") return cmd_feasible(c, out);
    if (c.subcommand == "exportlp") return cmd_exportlp(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    const bool format = e.kind() == ErrorKind::FormatError || e.kind() == ErrorKind::VersionMismatch;
    return format ? kExitFormat : kExitUsage;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace codeclass
