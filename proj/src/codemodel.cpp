#include "codeclass/codemodel.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "codeclass/error.hpp"

namespace codeclass {

PointMultiset::PointMultiset(std::shared_ptr<const Geometry> g, std::vector<int> mult)
    : geom_(std::move(g)), mult_(std::move(mult)) {
  if (static_cast<int>(mult_.size()) != geom_->num_points())
    throw Error(ErrorKind::InvalidArgument, "multiplicity vector has wrong size");
  for (int m : mult_) {
    if (m < 0) throw Error(ErrorKind::InvalidArgument, "negative multiplicity");
    length_ += m;
  }
}

PointMultiset::PointMultiset(int k, int q) : geom_(codeclass::geometry(k, q)), mult_(geom_->num_points(), 0) {}

void PointMultiset::set(int point, int m) {
  length_ += m - mult_[point];
  mult_[point] = m;
}

void PointMultiset::add(int point, int m) {
  mult_[point] += m;
  length_ += m;
}

int PointMultiset::max_multiplicity() const {
  return mult_.empty() ? 0 : *std::max_element(mult_.begin(), mult_.end());
}

int PointMultiset::min_positive_multiplicity() const {
  int best = 0;
  for (int m : mult_)
    if (m > 0 && (best == 0 || m < best)) best = m;
  return best;
}

std::vector<int> PointMultiset::support() const {
  std::vector<int> s;
  for (int p = 0; p < static_cast<int>(mult_.size()); ++p)
    if (mult_[p] > 0) s.push_back(p);
  return s;
}

std::vector<int> WeightDistribution::weights() const {
  std::vector<int> w;
  for (auto& [weight, count] : counts)
    if (count > 0) w.push_back(weight);
  return w;
}

long WeightDistribution::total() const {
  long t = 0;
  for (auto& [weight, count] : counts) t += count;
  return t;
}

std::string WeightDistribution::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (auto& [weight, count] : counts) {
    if (!first) os << ' ';
    os << weight << '^' << count;
    first = false;
  }
  return os.str();
}

namespace {

// Greedy basis of the support in ascending point order.
std::vector<int> support_basis(const PointMultiset& m) {
  const Geometry& g = m.geometry();
  const Field& f = g.field();
  const int k = g.k();
  std::vector<int> basis;
  Matrix rows(0, k);
  for (int p : m.support()) {
    Matrix trial = rows;
    trial.rows += 1;
    auto c = g.point(p);
    trial.data.insert(trial.data.end(), c.begin(), c.end());
    if (rank(f, trial) == trial.rows) {
      rows = std::move(trial);
      basis.push_back(p);
      if (static_cast<int>(basis.size()) == k) break;
    }
  }
  return basis;
}

}  // namespace

bool spans(const PointMultiset& m) { return static_cast<int>(support_basis(m).size()) == m.k(); }

PointMultiset multiset_from_generator(const Matrix& generator, int q) {
  auto g = geometry(generator.rows, q);
  const Field& f = g->field();
  if (rank(f, generator) < generator.rows) throw Error(ErrorKind::RankDeficient, "generator matrix is not full rank");
  PointMultiset m(g, std::vector<int>(g->num_points(), 0));
  std::vector<Elem> col(generator.rows);
  for (int j = 0; j < generator.cols; ++j) {
    for (int i = 0; i < generator.rows; ++i) col[i] = generator(i, j);
    const int p = g->index_of(col);
    if (p < 0) throw Error(ErrorKind::ZeroColumn, "column " + std::to_string(j) + " is zero");
    m.add(p);
  }
  return m;
}

PointMultiset transform(const PointMultiset& m, const Matrix& a) {
  const Geometry& g = m.geometry();
  const Field& f = g.field();
  std::vector<int> out(g.num_points(), 0);
  std::vector<Elem> v(g.k());
  for (int p : m.support()) {
    apply(f, a, g.point(p), v);
    out[g.index_of(v)] += m[p];
  }
  return PointMultiset(m.geometry_ptr(), std::move(out));
}

PointMultiset systematize(const PointMultiset& m) {
  const Geometry& g = m.geometry();
  bool has_units = true;
  for (int i = 0; i < g.k(); ++i) has_units = has_units && m[g.unit_point(i)] > 0;
  if (has_units) return m;
  auto basis = support_basis(m);
  if (static_cast<int>(basis.size()) < g.k()) throw Error(ErrorKind::NotSpanning, "support lies in a hyperplane");
  Matrix b(g.k(), g.k());
  for (int j = 0; j < g.k(); ++j) {
    auto c = g.point(basis[j]);
    for (int i = 0; i < g.k(); ++i) b(i, j) = c[i];
  }
  return transform(m, *inverse(g.field(), b));
}

Matrix generator_from_multiset(const PointMultiset& m) {
  const PointMultiset s = systematize(m);
  const Geometry& g = s.geometry();
  const int k = g.k();
  Matrix out(k, s.length());
  int col = 0;
  auto put = [&](int p) {
    auto c = g.point(p);
    for (int i = 0; i < k; ++i) out(i, col) = c[i];
    ++col;
  };
  std::vector<int> rest = s.mult();
  for (int i = 0; i < k; ++i) {
    put(g.unit_point(i));
    rest[g.unit_point(i)] -= 1;
  }
  for (int p = 0; p < g.num_points(); ++p)
    for (int t = 0; t < rest[p]; ++t) put(p);
  return out;
}

std::vector<int> hyperplane_multiplicities(const PointMultiset& m) {
  const Geometry& g = m.geometry();
  std::vector<int> out(g.num_points(), 0);
  for (int h = 0; h < g.num_points(); ++h) {
    int s = 0;
    for (int p : g.points_on(h)) s += m[p];
    out[h] = s;
  }
  return out;
}

WeightDistribution weight_distribution(const PointMultiset& m) {
  if (!spans(m)) throw Error(ErrorKind::NotSpanning, "support lies in a hyperplane");
  WeightDistribution wd;
  const long scalars = m.q() - 1;
  for (int mh : hyperplane_multiplicities(m)) wd.counts[m.length() - mh] += scalars;
  return wd;
}

CodeStats code_stats(const PointMultiset& m) {
  const WeightDistribution wd = weight_distribution(m);
  CodeStats s;
  s.length = m.length();
  s.dimension = m.k();
  s.max_multiplicity = m.max_multiplicity();
  s.projective = s.max_multiplicity <= 1;
  auto w = wd.weights();
  s.min_weight = w.front();
  s.max_weight = w.back();
  s.divisibility = 0;
  for (int x : w) s.divisibility = std::gcd(s.divisibility, x);
  return s;
}

PointMultiset residual(const PointMultiset& m, int hyperplane) {
  const Geometry& g = m.geometry();
  if (g.k() < 2) throw Error(ErrorKind::InvalidArgument, "residual of a 1-dimensional code");
  auto target = geometry(g.k() - 1, g.q());
  auto h = g.point(hyperplane);
  int lead = 0;
  while (h[lead] == 0) ++lead;
  PointMultiset out(target, std::vector<int>(target->num_points(), 0));
  std::vector<Elem> w;
  for (int p : g.points_on(hyperplane)) {
    if (m[p] == 0) continue;
    auto c = g.point(p);
    w.clear();
    for (int i = 0; i < g.k(); ++i)
      if (i != lead) w.push_back(c[i]);
    out.add(target->index_of(w), m[p]);
  }
  return out;
}

PointMultiset projection(const PointMultiset& m, int center) {
  auto target = geometry(m.k() - 1, m.q());
  return PointMultiset(target, project_multiset(m.geometry(), m.mult(), center));
}

long griesmer_bound(int q, int k, long d) {
  long sum = 0;
  long pw = 1;
  for (int i = 0; i < k; ++i) {
    sum += (d + pw - 1) / pw;
    pw *= q;
  }
  return sum;
}

char digit_char(int v) {
  if (v < 0 || v >= 36) throw Error(ErrorKind::FormatError, "value " + std::to_string(v) + " has no digit");
  return v < 10 ? static_cast<char>('0' + v) : static_cast<char>('a' + v - 10);
}

int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
  return -1;
}

Matrix read_generator(std::istream& in, int& q) {
  int k = 0, n = 0;
  if (!(in >> q >> k >> n) || q < 2 || k < 1 || n < 1)
    throw Error(ErrorKind::FormatError, "line 1: expected header \"q k n\"");
  Matrix g(k, n);
  std::string line;
  std::getline(in, line);
  int row = 0, col = 0, lineno = 1;
  while (row < k && std::getline(in, line)) {
    ++lineno;
    for (char c : line) {
      if (c == ' ' || c == '\t' || c == '\r') continue;
      const int v = digit_value(c);
      if (v < 0 || v >= q)
        throw Error(ErrorKind::FormatError, "line " + std::to_string(lineno) + ": invalid symbol '" + c + "'");
      if (row >= k) throw Error(ErrorKind::FormatError, "line " + std::to_string(lineno) + ": too many entries");
      g(row, col) = static_cast<Elem>(v);
      if (++col == n) {
        col = 0;
        ++row;
      }
    }
  }
  if (row < k) throw Error(ErrorKind::FormatError, "line " + std::to_string(lineno) + ": matrix truncated");
  return g;
}

Matrix read_generator_file(const std::string& path, int& q) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FormatError, "cannot open " + path);
  return read_generator(in, q);
}

void write_generator(std::ostream& out, const Matrix& g, int q) {
  out << q << ' ' << g.rows << ' ' << g.cols << '\n';
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) out << digit_char(g(i, j));
    out << '\n';
  }
}

}  // namespace codeclass
