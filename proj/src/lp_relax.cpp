#include "lp_relax.hpp"

#include <cmath>
#include <limits>

namespace codeclass::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-7;
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kRefactorEvery = 100;

}  // namespace

LpRelaxation::LpRelaxation(const LinearSystem& sys) {
  n_ = static_cast<int>(sys.vars.size());
  m_ = static_cast<int>(sys.rows.size());
  cols_.assign(n_, {});
  lower_.assign(n_ + m_, 0.0);
  upper_.assign(n_ + m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    lower_[j] = sys.vars[j].lo;
    upper_[j] = sys.vars[j].hi;
  }
  for (int i = 0; i < m_; ++i) {
    const Row& row = sys.rows[i];
    for (const Term& t : row.terms)
      if (t.coef != 0) cols_[t.var].push_back({i, static_cast<double>(t.coef)});
    const auto b = static_cast<double>(row.rhs);
    lower_[n_ + i] = row.sense == Sense::Le ? -kInf : b;
    upper_[n_ + i] = row.sense == Sense::Ge ? kInf : b;
  }
  status_.assign(n_ + m_, At::Lower);
  head_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    status_[n_ + i] = At::Basic;
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = -1.0;
  xb_.assign(m_, 0.0);
  point_.assign(n_, 0.0);
}

double LpRelaxation::value_of_nonbasic(int j) const {
  return status_[j] == At::Upper ? upper_[j] : lower_[j];
}

void LpRelaxation::column_into(int j, std::vector<double>& alpha) const {
  alpha.assign(m_, 0.0);
  if (j >= n_) {
    const int i = j - n_;
    for (int r = 0; r < m_; ++r) alpha[r] = -binv_[static_cast<std::size_t>(r) * m_ + i];
    return;
  }
  for (const Entry& e : cols_[j])
    for (int r = 0; r < m_; ++r) alpha[r] += binv_[static_cast<std::size_t>(r) * m_ + e.row] * e.coef;
}

// Gauss-Jordan inversion of the basis; falls back to the logical basis if singular.
void LpRelaxation::refactor() {
  since_refactor_ = 0;
  const std::size_t mm = static_cast<std::size_t>(m_);
  std::vector<double> b(mm * mm, 0.0);
  for (int c = 0; c < m_; ++c) {
    const int j = head_[c];
    if (j >= n_) {
      b[static_cast<std::size_t>(j - n_) * mm + c] = -1.0;
    } else {
      for (const Entry& e : cols_[j]) b[static_cast<std::size_t>(e.row) * mm + c] = e.coef;
    }
  }
  std::vector<double>& inv = binv_;
  inv.assign(mm * mm, 0.0);
  for (std::size_t i = 0; i < mm; ++i) inv[i * mm + i] = 1.0;
  for (std::size_t c = 0; c < mm; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < mm; ++r)
      if (std::fabs(b[r * mm + c]) > std::fabs(b[p * mm + c])) p = r;
    if (std::fabs(b[p * mm + c]) < 1e-11) {
      for (int i = 0; i < m_; ++i) {
        if (head_[i] < n_) status_[head_[i]] = At::Lower;
        head_[i] = n_ + i;
        status_[n_ + i] = At::Basic;
      }
      inv.assign(mm * mm, 0.0);
      for (std::size_t i = 0; i < mm; ++i) inv[i * mm + i] = -1.0;
      return;
    }
    if (p != c)
      for (std::size_t k = 0; k < mm; ++k) {
        std::swap(b[p * mm + k], b[c * mm + k]);
        std::swap(inv[p * mm + k], inv[c * mm + k]);
      }
    const double d = b[c * mm + c];
    std::vector<std::size_t> nb, ni;
    for (std::size_t k = 0; k < mm; ++k) {
      if (b[c * mm + k] != 0.0) {
        b[c * mm + k] /= d;
        nb.push_back(k);
      }
      if (inv[c * mm + k] != 0.0) {
        inv[c * mm + k] /= d;
        ni.push_back(k);
      }
    }
    for (std::size_t r = 0; r < mm; ++r) {
      if (r == c) continue;
      const double f = b[r * mm + c];
      if (f == 0.0) continue;
      for (std::size_t k : nb) b[r * mm + k] -= f * b[c * mm + k];
      for (std::size_t k : ni) inv[r * mm + k] -= f * inv[c * mm + k];
    }
  }
}

// x_B = -B^{-1} N x_N, since [A | -I] x = 0.
void LpRelaxation::compute_basic_values() {
  std::vector<double> v(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == At::Basic) continue;
    const double x = value_of_nonbasic(j);
    if (x == 0.0) continue;
    for (const Entry& e : cols_[j]) v[e.row] += e.coef * x;
  }
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    if (status_[j] != At::Basic) v[i] -= value_of_nonbasic(j);
  }
  for (int r = 0; r < m_; ++r) {
    double s = 0.0;
    const double* row = &binv_[static_cast<std::size_t>(r) * m_];
    for (int k = 0; k < m_; ++k) s += row[k] * v[k];
    xb_[r] = -s;
  }
}

void LpRelaxation::pivot(int row, int entering, const std::vector<double>& alpha) {
  const std::size_t mm = static_cast<std::size_t>(m_);
  double* pr = &binv_[row * mm];
  const double a = alpha[row];
  // The inverse stays sparse while most basic columns are logical.
  std::vector<std::size_t>& nz = scratch_;
  nz.clear();
  for (std::size_t k = 0; k < mm; ++k)
    if (pr[k] != 0.0) {
      pr[k] /= a;
      nz.push_back(k);
    }
  for (int r = 0; r < m_; ++r) {
    if (r == row || alpha[r] == 0.0) continue;
    const double f = alpha[r];
    double* dst = &binv_[r * mm];
    for (std::size_t k : nz) dst[k] -= f * pr[k];
  }
  head_[row] = entering;
  status_[entering] = At::Basic;
  ++pivots_;
  ++since_refactor_;
}

// Checks that sum_i pi_i (a_i x - t_i) = 0 has no solution in the box.
bool LpRelaxation::certify(const std::vector<double>& pi_raw) const {
  std::vector<long double> pi(m_);
  for (int i = 0; i < m_; ++i) pi[i] = std::fabs(pi_raw[i]) < 1e-11 ? 0.0L : pi_raw[i];
  long double lo = 0, hi = 0, scale = 0;
  for (int j = 0; j < n_; ++j) {
    long double g = 0;
    for (const Entry& e : cols_[j]) g += pi[e.row] * e.coef;
    if (g == 0) continue;
    const long double a = g * lower_[j], b = g * upper_[j];
    lo += std::min(a, b);
    hi += std::max(a, b);
    scale += std::fabs(a) + std::fabs(b);
  }
  bool lo_finite = true, hi_finite = true;
  for (int i = 0; i < m_; ++i) {
    if (pi[i] == 0) continue;
    const long double c = -pi[i];
    const double l = lower_[n_ + i], u = upper_[n_ + i];
    const double at_min = c > 0 ? l : u;
    const double at_max = c > 0 ? u : l;
    if (std::isinf(at_min)) lo_finite = false;
    else lo += c * at_min;
    if (std::isinf(at_max)) hi_finite = false;
    else hi += c * at_max;
    scale += std::fabs(c) * (std::fabs(std::isinf(l) ? 0.0 : l) + std::fabs(std::isinf(u) ? 0.0 : u));
  }
  const long double eps = 1e-7L * (1 + scale);
  return (lo_finite && lo > eps) || (hi_finite && hi < -eps);
}

bool LpRelaxation::feasible(const std::vector<int>& lo, const std::vector<int>& hi) {
  if (point_valid_) {
    bool inside = true;
    for (int j = 0; j < n_ && inside; ++j) inside = point_[j] >= lo[j] - kFeasTol && point_[j] <= hi[j] + kFeasTol;
    if (inside) return true;
  }
  point_valid_ = false;
  for (int j = 0; j < n_; ++j) {
    lower_[j] = lo[j];
    upper_[j] = hi[j];
  }
  const int max_iter = 20 * (n_ + m_) + 1000;
  bool retried = false;
  compute_basic_values();
  std::vector<double> cost(m_), pi(m_), alpha(m_);
  for (int iter = 0; iter < max_iter; ++iter) {
    if (since_refactor_ >= kRefactorEvery) {
      refactor();
      compute_basic_values();
    }
    bool any = false;
    for (int i = 0; i < m_; ++i) {
      const int h = head_[i];
      cost[i] = xb_[i] < lower_[h] - kFeasTol ? -1.0 : (xb_[i] > upper_[h] + kFeasTol ? 1.0 : 0.0);
      any = any || cost[i] != 0.0;
    }
    if (!any) {
      for (int j = 0; j < n_; ++j)
        if (status_[j] != At::Basic) point_[j] = value_of_nonbasic(j);
      for (int i = 0; i < m_; ++i)
        if (head_[i] < n_) point_[head_[i]] = xb_[i];
      point_valid_ = true;
      return true;
    }
    std::fill(pi.begin(), pi.end(), 0.0);
    for (int i = 0; i < m_; ++i) {
      if (cost[i] == 0.0) continue;
      const double* row = &binv_[static_cast<std::size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) pi[k] += cost[i] * row[k];
    }

    int entering = -1;
    double best = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == At::Basic || lower_[j] == upper_[j]) continue;
      double d;
      if (j < n_) {
        d = 0.0;
        for (const Entry& e : cols_[j]) d -= pi[e.row] * e.coef;
      } else {
        d = pi[j - n_];
      }
      const double gain = status_[j] == At::Lower ? -d : d;
      if (gain > kCostTol && gain > best) {
        best = gain;
        entering = j;
      }
    }
    if (entering < 0) {
      if (certify(pi)) return false;
      if (retried) return true;
      retried = true;
      refactor();
      compute_basic_values();
      continue;
    }

    const double s = status_[entering] == At::Lower ? 1.0 : -1.0;
    column_into(entering, alpha);
    double theta = upper_[entering] - lower_[entering];
    int leave = -1;
    auto limit_of = [&](int i) {
      const double delta = -alpha[i] * s;
      if (std::fabs(delta) <= kPivotTol) return kInf;
      const int h = head_[i];
      const double x = xb_[i];
      double t = kInf;
      if (delta > 0) {
        if (x < lower_[h] - kFeasTol) t = (lower_[h] - x) / delta;
        else if (x <= upper_[h] + kFeasTol && !std::isinf(upper_[h])) t = (upper_[h] - x) / delta;
      } else {
        if (x > upper_[h] + kFeasTol) t = (upper_[h] - x) / delta;
        else if (x >= lower_[h] - kFeasTol && !std::isinf(lower_[h])) t = (lower_[h] - x) / delta;
      }
      return std::max(t, 0.0);
    };
    double tmin = kInf;
    for (int i = 0; i < m_; ++i) tmin = std::min(tmin, limit_of(i));
    if (tmin < theta) {
      double size = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (limit_of(i) > tmin + 1e-9) continue;
        if (std::fabs(alpha[i]) > size) {
          size = std::fabs(alpha[i]);
          leave = i;
        }
      }
      theta = limit_of(leave);
    }
    if (std::isinf(theta)) return true;

    for (int i = 0; i < m_; ++i) xb_[i] -= alpha[i] * s * theta;
    if (leave < 0) {
      status_[entering] = status_[entering] == At::Lower ? At::Upper : At::Lower;
      continue;
    }
    const double entering_value = value_of_nonbasic(entering) + s * theta;
    const int h = head_[leave];
    const double x = xb_[leave];
    const bool to_lower = std::isinf(upper_[h]) || (!std::isinf(lower_[h]) && std::fabs(x - lower_[h]) <= std::fabs(x - upper_[h]));
    pivot(leave, entering, alpha);
    status_[h] = to_lower ? At::Lower : At::Upper;
    xb_[leave] = entering_value;
  }
  return true;
}

}  // namespace codeclass::detail
