#include "codeclass/extsys.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "codeclass/error.hpp"

namespace codeclass {

WeightSpectrum::WeightSpectrum(std::vector<SpectrumBlock> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw Error(ErrorKind::SpectrumEmpty, "no weight blocks");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    if (b.delta < 1 || b.a < 1 || b.a > b.b)
      throw Error(ErrorKind::InvalidArgument, "block " + std::to_string(i) + " needs delta >= 1 and 1 <= a <= b");
    if (i > 0 && blocks_[i - 1].b * blocks_[i - 1].delta >= b.a * b.delta)
      throw Error(ErrorKind::BlocksOverlap, "block " + std::to_string(i) + " does not follow its predecessor");
  }
}

WeightSpectrum WeightSpectrum::from_weights(std::vector<int> weights) {
  std::sort(weights.begin(), weights.end());
  weights.erase(std::unique(weights.begin(), weights.end()), weights.end());
  if (weights.empty()) throw Error(ErrorKind::SpectrumEmpty, "empty weight list");
  if (weights.front() < 1) throw Error(ErrorKind::InvalidArgument, "weights must be positive");
  int g = 0;
  for (int w : weights) g = std::gcd(g, w);
  std::vector<SpectrumBlock> blocks;
  for (int w : weights) {
    if (!blocks.empty() && blocks.back().b + 1 == w / g)
      blocks.back().b = w / g;
    else
      blocks.push_back({g, w / g, w / g});
  }
  return WeightSpectrum(std::move(blocks));
}

WeightSpectrum WeightSpectrum::divisible(int delta, int lo, int hi) {
  if (delta < 1) throw Error(ErrorKind::InvalidArgument, "divisor must be positive");
  const int a = std::max(1, (lo + delta - 1) / delta);
  const int b = hi / delta;
  if (a > b) throw Error(ErrorKind::SpectrumEmpty, "no multiple of " + std::to_string(delta) + " in range");
  return WeightSpectrum({{delta, a, b}});
}

WeightSpectrum WeightSpectrum::parse(const std::string& text) {
  std::vector<SpectrumBlock> blocks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    SpectrumBlock b;
    char c1 = 0, c2 = 0;
    std::istringstream is(item);
    if (!(is >> b.delta >> c1 >> b.a >> c2 >> b.b) || c1 != ':' || c2 != ':' || !(is >> std::ws).eof())
      throw Error(ErrorKind::FormatError, "bad spectrum block '" + item + "'");
    blocks.push_back(b);
  }
  return WeightSpectrum(std::move(blocks));
}

int WeightSpectrum::delta() const {
  int g = 0;
  for (const auto& b : blocks_) g = std::gcd(g, b.delta);
  return g;
}

bool WeightSpectrum::contains(int w) const {
  for (const auto& b : blocks_)
    if (w % b.delta == 0 && w / b.delta >= b.a && w / b.delta <= b.b) return true;
  return false;
}

std::vector<int> WeightSpectrum::weights() const {
  std::vector<int> out;
  for (const auto& b : blocks_)
    for (int t = b.a; t <= b.b; ++t) out.push_back(t * b.delta);
  return out;
}

SpectrumBlock WeightSpectrum::hull() const {
  const int d = delta();
  return {d, min_weight() / d, max_weight() / d};
}

std::string WeightSpectrum::to_string() const {
  std::string s;
  for (const auto& b : blocks_) {
    if (!s.empty()) s += ',';
    s += std::to_string(b.delta) + ':' + std::to_string(b.a) + ':' + std::to_string(b.b);
  }
  return s;
}

std::string WeightSpectrum::weights_string() const {
  std::string s;
  for (int w : weights()) {
    if (!s.empty()) s += ',';
    s += std::to_string(w);
  }
  return s;
}

int LinearSystem::add_var(Variable v) {
  vars.push_back(std::move(v));
  return static_cast<int>(vars.size()) - 1;
}

int LinearSystem::add_row(Row r) {
  rows.push_back(std::move(r));
  return static_cast<int>(rows.size()) - 1;
}

int LinearSystem::find_var(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

bool LinearSystem::satisfied(const std::vector<int>& values) const {
  if (values.size() != vars.size()) return false;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (values[i] < vars[i].lo || values[i] > vars[i].hi) return false;
  for (const auto& row : rows) {
    long s = 0;
    for (const auto& t : row.terms) s += t.coef * values[t.var];
    if (row.sense == Sense::Eq && s != row.rhs) return false;
    if (row.sense == Sense::Le && s > row.rhs) return false;
    if (row.sense == Sense::Ge && s < row.rhs) return false;
  }
  return true;
}

PointMultiset ExtensionSystem::decode(const std::vector<int>& values) const {
  std::vector<int> mult(geometry->num_points());
  for (int p = 0; p < geometry->num_points(); ++p) {
    const int v = point_var[p];
    mult[p] = values[v] + sys.vars[v].offset;
  }
  return PointMultiset(geometry, std::move(mult));
}

ExtensionSystem build_extension_system(const PointMultiset& m, int r, const WeightSpectrum& spectrum,
                                       const ExtensionOptions& options) {
  if (spectrum.empty()) throw Error(ErrorKind::SpectrumEmpty, "no weight blocks");
  if (r < 1) throw Error(ErrorKind::InvalidArgument, "r must be >= 1");
  if (!spans(m)) throw Error(ErrorKind::NotSpanning, "support lies in a hyperplane");
  if (options.hyperplane_fraction <= 0.0 || options.hyperplane_fraction > 1.0)
    throw Error(ErrorKind::InvalidArgument, "hyperplane fraction must lie in (0, 1]");

  const int k = m.k();
  const int q = m.q();
  ExtensionSystem e;
  e.base = m.geometry_ptr();
  e.geometry = geometry(k + 1, q);
  e.n = m.length();
  e.r = r;
  e.spectrum = spectrum;
  const Geometry& g = *e.geometry;
  const int np = g.num_points();

  if (!options.lambda_per_point.empty()) {
    if (static_cast<int>(options.lambda_per_point.size()) != np)
      throw Error(ErrorKind::InvalidArgument, "per-point bounds have wrong size");
    e.lambda = options.lambda_per_point;
  } else {
    if (options.lambda < 1) throw Error(ErrorKind::InvalidArgument, "maximum multiplicity must be >= 1");
    e.lambda.assign(np, options.lambda);
  }

  // Line of each point <(u|lambda)>, u != 0.
  const int apex = g.unit_point(k);
  std::vector<int> line_of(np, -1);
  std::vector<std::vector<int>> lines(e.base->num_points());
  std::vector<Elem> v(k + 1);
  for (int u = 0; u < e.base->num_points(); ++u) {
    auto c = e.base->point(u);
    for (int lam = 0; lam < q; ++lam) {
      std::copy(c.begin(), c.end(), v.begin());
      v[k] = static_cast<Elem>(lam);
      const int p = g.index_of_normalized(v);
      line_of[p] = u;
      lines[u].push_back(p);
    }
  }

  if (r > e.lambda[apex])
    throw Error(ErrorKind::InconsistentBounds, "r = " + std::to_string(r) + " exceeds the bound at <e_{k+1}>");

  std::vector<char> is_unit(np, 0);
  if (options.systematic)
    for (int i = 0; i < k; ++i) is_unit[g.unit_point(i)] = 1;

  e.point_var.assign(np, -1);
  for (int p = 0; p < np; ++p) {
    Variable x;
    x.name = "x" + std::to_string(p);
    x.kind = VarKind::Point;
    x.index = p;
    if (p == apex) {
      x.lo = x.hi = r;
    } else {
      const int total = m[line_of[p]];
      x.hi = std::min(e.lambda[p], total);
      if (is_unit[p]) {
        if (x.hi < 1)
          throw Error(ErrorKind::InconsistentBounds, "unit point " + std::to_string(p) + " cannot be >= 1");
        x.offset = 1;
        x.hi -= 1;
      }
    }
    e.point_var[p] = e.sys.add_var(std::move(x));
  }

  for (int u = 0; u < e.base->num_points(); ++u) {
    Row row;
    row.name = "line" + std::to_string(u);
    row.kind = RowKind::Line;
    row.index = u;
    row.rhs = m[u];
    std::vector<int> group;
    for (int p : lines[u]) {
      const int var = e.point_var[p];
      row.terms.push_back({var, 1});
      row.rhs -= e.sys.vars[var].offset;
      group.push_back(var);
    }
    e.sys.add_row(std::move(row));
    e.sys.groups.push_back(std::move(group));
  }

  const double frac = options.hyperplane_fraction;
  for (int h = 0; h < np; ++h) {
    if (frac < 1.0 && static_cast<long>((h + 1) * frac) == static_cast<long>(h * frac)) continue;
    e.hyperplanes.push_back(h);
  }
  const SpectrumBlock hull = spectrum.hull();
  for (int h : e.hyperplanes) {
    Variable y;
    y.name = "y" + std::to_string(h);
    y.kind = VarKind::Slack;
    y.index = h;
    y.hi = hull.b - hull.a;
    const int yv = e.sys.add_var(std::move(y));
    Row row;
    row.name = "hyp" + std::to_string(h);
    row.kind = RowKind::Hyperplane;
    row.index = h;
    row.rhs = static_cast<long>(e.n + r) - static_cast<long>(hull.a) * hull.delta;
    for (int p : g.points_on(h)) {
      const int var = e.point_var[p];
      row.terms.push_back({var, 1});
      row.rhs -= e.sys.vars[var].offset;
    }
    row.terms.push_back({yv, hull.delta});
    e.sys.add_row(std::move(row));
  }
  return e;
}

ExtensionSystem linearize_min_extension(const ExtensionSystem& e, int r) {
  ExtensionSystem out = e;
  out.indicators = true;
  const int apex = e.geometry->unit_point(e.geometry->k() - 1);
  for (int p = 0; p < e.geometry->num_points(); ++p) {
    const int var = e.point_var[p];
    const Variable& x = e.sys.vars[var];
    if (p == apex) continue;
    if (x.hi == kUnbounded) throw Error(ErrorKind::UnboundedVariable, x.name + " has no upper bound");
    const long cap = static_cast<long>(x.hi) + x.offset;
    Variable u;
    u.name = "u" + std::to_string(p);
    u.kind = VarKind::Indicator;
    u.index = p;
    u.hi = 1;
    const int uv = out.sys.add_var(std::move(u));
    Row upper;
    upper.name = "ub" + std::to_string(p);
    upper.kind = RowKind::IndicatorUpper;
    upper.index = p;
    upper.sense = Sense::Le;
    upper.terms = {{var, 1}, {uv, -cap}};
    upper.rhs = -x.offset;
    out.sys.add_row(std::move(upper));
    Row lower;
    lower.name = "lb" + std::to_string(p);
    lower.kind = RowKind::IndicatorLower;
    lower.index = p;
    lower.sense = Sense::Ge;
    lower.terms = {{var, 1}, {uv, -static_cast<long>(r)}};
    lower.rhs = -x.offset;
    out.sys.add_row(std::move(lower));
  }
  return out;
}

ExtensionSystem break_scaling_symmetry(const ExtensionSystem& e) {
  ExtensionSystem out = e;
  const Geometry& g = *e.geometry;
  const Field& f = g.field();
  const int q = g.q();
  const int k = e.base->k();
  if (q <= 2) return out;
  std::vector<Elem> v(k + 1);
  auto point_at = [&](int u, int t) {
    auto c = e.base->point(u);
    std::copy(c.begin(), c.end(), v.begin());
    v[k] = static_cast<Elem>(t);
    return g.index_of_normalized(v);
  };
  int best = -1;
  long best_total = 0;
  for (int u = 0; u < e.base->num_points(); ++u) {
    long total = 0;
    for (int t = 1; t < q; ++t) total += e.sys.vars[e.point_var[point_at(u, t)]].hi;
    if (total > best_total) {
      best_total = total;
      best = u;
    }
  }
  if (best < 0) return out;
  int one = 1;
  for (int t = 1; t < q; ++t)
    if (f.mul(static_cast<Elem>(t), static_cast<Elem>(t)) == t) one = t;
  const int lead = e.point_var[point_at(best, one)];
  for (int t = 1; t < q; ++t) {
    if (t == one) continue;
    Row row;
    row.name = "scale" + std::to_string(t);
    row.kind = RowKind::Generic;
    row.index = t;
    row.sense = Sense::Ge;
    row.terms = {{lead, 1}, {e.point_var[point_at(best, t)], -1}};
    row.rhs = 0;
    out.sys.add_row(std::move(row));
  }
  return out;
}

bool preprocess_line_feasibility(int q, int r, int lambda, int c) {
  // t nonzero entries reach exactly the sums in [t r, t lambda], 0 <= t <= q.
  const int most = c / r;
  const int least = (c + lambda - 1) / lambda;
  return most < least || least > q;
}

ExtensionSystem apply_gap_reformulation(const ExtensionSystem& e, const WeightSpectrum& spectrum) {
  if (spectrum.blocks().size() < 2) throw Error(ErrorKind::BlocksRequired, "block form needs at least two blocks");
  if (e.gapped) throw Error(ErrorKind::InvalidArgument, "system already uses the block form");

  ExtensionSystem out = e;
  out.gapped = true;
  out.spectrum = spectrum;
  LinearSystem& s = out.sys;
  s.vars.clear();
  s.rows.clear();

  std::vector<int> remap(e.sys.vars.size(), -1);
  for (std::size_t i = 0; i < e.sys.vars.size(); ++i)
    if (e.sys.vars[i].kind != VarKind::Slack) remap[i] = s.add_var(e.sys.vars[i]);
  for (auto& pv : out.point_var) pv = remap[pv];
  for (auto& group : s.groups)
    for (auto& var : group) var = remap[var];

  const SpectrumBlock hull = e.spectrum.hull();
  for (const Row& old : e.sys.rows) {
    Row row = old;
    row.terms.clear();
    for (const Term& t : old.terms)
      if (remap[t.var] >= 0) row.terms.push_back({remap[t.var], t.coef});
    if (old.kind != RowKind::Hyperplane) {
      s.add_row(std::move(row));
      continue;
    }
    const int h = old.index;
    row.rhs = old.rhs + static_cast<long>(hull.a) * hull.delta;
    std::vector<int> choices;
    for (std::size_t i = 0; i < spectrum.blocks().size(); ++i) {
      const SpectrumBlock& b = spectrum.blocks()[i];
      const std::string tag = std::to_string(h) + "_" + std::to_string(i);
      const int yv = s.add_var({"y" + tag, 0, b.b - b.a, VarKind::BlockSlack, h, static_cast<int>(i), 0});
      const int zv = s.add_var({"z" + tag, 0, 1, VarKind::BlockChoice, h, static_cast<int>(i), 0});
      row.terms.push_back({yv, b.delta});
      row.terms.push_back({zv, static_cast<long>(b.a) * b.delta});
      Row link;
      link.name = "link" + tag;
      link.kind = RowKind::BlockLink;
      link.index = h;
      link.sense = Sense::Le;
      link.terms = {{yv, 1}, {zv, -static_cast<long>(b.b - b.a)}};
      link.rhs = 0;
      s.rows.push_back(std::move(link));
      choices.push_back(zv);
    }
    s.add_row(std::move(row));
    Row choice;
    choice.name = "choice" + std::to_string(h);
    choice.kind = RowKind::BlockChoice;
    choice.index = h;
    for (int zv : choices) choice.terms.push_back({zv, 1});
    choice.rhs = 1;
    s.add_row(std::move(choice));
  }
  return out;
}

}  // namespace codeclass
