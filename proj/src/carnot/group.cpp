#include "sublab/carnot/group.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace sublab::carnot {

namespace {

struct Rational {
  long long num = 0;
  long long den = 1;

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(std::abs(num), den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  Rational& operator+=(const Rational& o) {
    num = num * o.den + o.num * den;
    den = den * o.den;
    normalize();
    return *this;
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

long long factorial(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Enumerates the Dynkin series
//   log(exp x exp y) = sum_m (-1)^{m-1}/m sum_{p_i+q_i>=1}
//       [x^{p_1} y^{q_1} ... x^{p_m} y^{q_m}] / ((sum_i p_i+q_i) prod_i p_i! q_i!)
// with right-nested commutators, keeping words of length <= max_len. Words
// whose right-nested bracket is structurally zero (repeated innermost letter)
// are dropped, and coefficients of equal words are accumulated exactly.
void enumerate_terms(int letters_left, int m, long long fact_prod, std::uint32_t word,
                     int word_len, std::map<std::pair<std::uint32_t, int>, Rational>& acc) {
  if (letters_left == 0) {
    const int n = word_len;
    if (n >= 2) {
      const std::uint32_t last = (word >> (n - 1)) & 1u;
      const std::uint32_t prev = (word >> (n - 2)) & 1u;
      if (last == prev) return;  // innermost [a, a] = 0
    }
    Rational r;
    r.num = (m % 2 == 1) ? 1 : -1;
    r.den = static_cast<long long>(m) * n * fact_prod;
    r.normalize();
    acc[{word, n}] += r;
    return;
  }
  // extend with a new (p, q) block; p x-letters then q y-letters
  for (int p = 0; p <= letters_left; ++p) {
    for (int q = 0; p + q <= letters_left; ++q) {
      if (p + q == 0) continue;
      std::uint32_t w = word;
      int len = word_len;
      for (int i = 0; i < q; ++i) w |= 1u << (len + p + i);
      len += p + q;
      enumerate_terms(letters_left - p - q, m + 1, fact_prod * factorial(p) * factorial(q), w, len,
                      acc);
    }
  }
}

std::vector<SeriesTerm> build_series(int step) {
  std::map<std::pair<std::uint32_t, int>, Rational> acc;
  for (int n = 2; n <= step; ++n) {
    enumerate_terms(n, 0, 1, 0u, 0, acc);
  }
  std::vector<SeriesTerm> terms;
  for (const auto& [key, r] : acc) {
    if (r.num == 0) continue;
    terms.push_back({key.first, key.second, r.value()});
  }
  // longer words first makes no difference numerically; keep deterministic order
  std::sort(terms.begin(), terms.end(), [](const SeriesTerm& a, const SeriesTerm& b) {
    return a.length != b.length ? a.length < b.length : a.word < b.word;
  });
  return terms;
}

// b_k in z/(1 - e^{-z}) = sum_k b_k z^k, i.e. B_k / k! with B_1 = +1/2.
constexpr int kMaxFrameStep = 9;
constexpr double kBernoulli[kMaxFrameStep] = {
    1.0, 1.0 / 2.0, 1.0 / 12.0, 0.0, -1.0 / 720.0, 0.0, 1.0 / 30240.0, 0.0, -1.0 / 1209600.0};

}  // namespace

GroupSpec::GroupSpec(std::string name, std::vector<int> layer_dims, std::vector<Bracket> brackets)
    : name_(std::move(name)), layer_dims_(std::move(layer_dims)) {
  if (layer_dims_.empty()) throw std::invalid_argument("group spec: no layers");
  const int r = step();
  offsets_.resize(r);
  int off = 0;
  for (int l = 0; l < r; ++l) {
    if (layer_dims_[l] < 1) throw std::invalid_argument("group spec: empty layer");
    offsets_[l] = off;
    off += layer_dims_[l];
    for (int j = 0; j < layer_dims_[l]; ++j) weights_.push_back(l + 1);
  }
  dim_ = off;
  hom_dim_ = 0;
  for (int l = 0; l < r; ++l) hom_dim_ += (l + 1) * layer_dims_[l];
  if (r >= 2 && layer_dims_[0] < 2)
    throw std::invalid_argument("group spec: d1 >= 2 required for step >= 2");
  if (r > kMaxFrameStep) throw std::invalid_argument("group spec: step too large");

  // store both orientations so bracket application is a single pass
  brackets_.reserve(2 * brackets.size());
  for (const Bracket& b : brackets) {
    if (b.i < 0 || b.i >= dim_ || b.j < 0 || b.j >= dim_ || b.k < 0 || b.k >= dim_)
      throw std::invalid_argument("group spec: bracket index out of range");
    if (b.i == b.j) throw std::invalid_argument("group spec: bracket [X,X]");
    brackets_.push_back(b);
    brackets_.push_back({b.j, b.i, b.k, -b.c});
  }

  validate();
  terms_ = build_series(r);
}

void GroupSpec::validate() const {
  // grading: [V_a, V_b] subset V_{a+b}
  for (const Bracket& b : brackets_) {
    if (weights_[b.k] != weights_[b.i] + weights_[b.j])
      throw std::invalid_argument("group spec: bracket violates the grading");
  }
  // Jacobi identity on all basis triples
  Vec u = Vec::Zero(dim_), v = Vec::Zero(dim_), w = Vec::Zero(dim_);
  Vec t1(dim_), t2(dim_), total(dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) {
      for (int k = j + 1; k < dim_; ++k) {
        u.setZero();
        v.setZero();
        w.setZero();
        u[i] = v[j] = w[k] = 1.0;
        total.setZero();
        bracket_into(v, w, t1);
        bracket_into(u, t1, t2);
        total += t2;
        bracket_into(w, u, t1);
        bracket_into(v, t1, t2);
        total += t2;
        bracket_into(u, v, t1);
        bracket_into(w, t1, t2);
        total += t2;
        if (total.lpNorm<Eigen::Infinity>() > 1e-12)
          throw std::invalid_argument("group spec: Jacobi identity fails on basis triple");
      }
    }
  }
  // stratification: layer l+1 must be generated by [V_1, V_l]
  for (int l = 1; l < step(); ++l) {
    const int rows = layer_dims_[l];
    Eigen::MatrixXd span = Eigen::MatrixXd::Zero(rows, layer_dims_[0] * layer_dims_[l - 1]);
    int col = 0;
    for (int a = 0; a < layer_dims_[0]; ++a) {
      for (int b = 0; b < layer_dims_[l - 1]; ++b, ++col) {
        const int ia = offsets_[0] + a;
        const int jb = offsets_[l - 1] + b;
        for (const Bracket& br : brackets_) {
          if (br.i == ia && br.j == jb) span(br.k - offsets_[l], col) += br.c;
        }
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(span);
    if (lu.rank() < rows)
      throw std::invalid_argument("group spec: layer " + std::to_string(l + 1) +
                                  " is not generated by [V1, V" + std::to_string(l) + "]");
  }
}

void GroupSpec::bracket_into(const Eigen::Ref<const Vec>& u, const Eigen::Ref<const Vec>& v,
                             Vec& out) const {
  out.setZero();
  for (const Bracket& b : brackets_) {
    const double p = u[b.i] * v[b.j];
    if (p != 0.0) out[b.k] += b.c * p;
  }
}

Vec GroupSpec::bracket(const Eigen::Ref<const Vec>& u, const Eigen::Ref<const Vec>& v) const {
  Vec out(dim_);
  bracket_into(u, v, out);
  return out;
}

void GroupSpec::product_into(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y,
                             Vec& out, ProductWorkspace& ws) const {
  if (!x.allFinite() || !y.allFinite())
    throw std::invalid_argument("group product: non-finite input");
  out = x + y;
  if (step() == 1) return;
  if (ws.a.size() != dim_) {
    ws.a.resize(dim_);
    ws.b.resize(dim_);
  }
  for (const SeriesTerm& term : terms_) {
    // right-nested: value = [w_0, [w_1, [... w_{L-1}]]]
    const int L = term.length;
    const Vec& last = ((term.word >> (L - 1)) & 1u) ? y : x;
    ws.a = last;
    Vec* cur = &ws.a;
    Vec* nxt = &ws.b;
    for (int pos = L - 2; pos >= 0; --pos) {
      const Vec& letter = ((term.word >> pos) & 1u) ? y : x;
      bracket_into(letter, *cur, *nxt);
      std::swap(cur, nxt);
    }
    out += term.coeff * (*cur);
  }
}

Point GroupSpec::product(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y) const {
  ProductWorkspace ws;
  Point out(dim_);
  product_into(x, y, out, ws);
  return out;
}

Point dilate(const GroupSpec& spec, double a, const Eigen::Ref<const Vec>& x) {
  Point out(spec.dim());
  dilate_into(spec, a, x, out);
  return out;
}

void dilate_into(const GroupSpec& spec, double a, const Eigen::Ref<const Vec>& x, Vec& out) {
  if (!(a > 0.0)) throw std::invalid_argument("dilate: scale must be positive");
  out.resize(spec.dim());
  double pw = a;
  int layer = 1;
  for (int j = 0; j < spec.dim(); ++j) {
    if (spec.weight(j) != layer) {
      layer = spec.weight(j);
      pw = std::pow(a, layer);
    }
    out[j] = pw * x[j];
  }
}

void left_invariant_frame_into(const GroupSpec& spec, const Eigen::Ref<const Vec>& x,
                               Eigen::MatrixXd& frame, ProductWorkspace& ws) {
  // d/dt|0 of x * exp(t e_i), the t-linear part of the Dynkin series:
  //   sum_{k<step} b_k ad_x^k(e_i)  with  z/(1-e^{-z}) = sum b_k z^k.
  const int n = spec.dim();
  const int d1 = spec.horizontal_dim();
  frame.resize(n, d1);
  if (ws.a.size() != n) {
    ws.a.resize(n);
    ws.b.resize(n);
  }
  for (int i = 0; i < d1; ++i) {
    ws.a.setZero();
    ws.a[i] = 1.0;
    frame.col(i) = ws.a;
    Vec* cur = &ws.a;
    Vec* nxt = &ws.b;
    for (int k = 1; k < spec.step(); ++k) {
      spec.bracket_into(x, *cur, *nxt);
      std::swap(cur, nxt);
      if (kBernoulli[k] != 0.0) frame.col(i) += kBernoulli[k] * (*cur);
    }
  }
}

Eigen::MatrixXd left_invariant_frame(const GroupSpec& spec, const Eigen::Ref<const Vec>& x) {
  Eigen::MatrixXd frame;
  ProductWorkspace ws;
  left_invariant_frame_into(spec, x, frame, ws);
  return frame;
}

}  // namespace sublab::carnot
