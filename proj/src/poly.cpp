#include "evadesos/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace evadesos {

Monomial::Monomial(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_) {
    if (e < 0) throw std::invalid_argument("negative exponent in monomial");
  }
}

Monomial Monomial::variable(int nvars, int var, int power) {
  if (var < 0 || var >= nvars) throw DimensionError("variable index out of range");
  Monomial m(nvars);
  m.exps_[static_cast<std::size_t>(var)] = power;
  return m;
}

int Monomial::degree() const {
  int d = 0;
  for (int e : exps_) d += e;
  return d;
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.exps_.size() != exps_.size()) throw DimensionError("monomial nvars mismatch");
  Monomial r = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] += other.exps_[i];
  return r;
}

double Monomial::evaluate(std::span<const double> x) const {
  double v = 1.0;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    for (int k = 0; k < exps_[i]; ++k) v *= x[i];
  }
  return v;
}

std::string Monomial::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (exps_[i] > 1) s += "^" + std::to_string(exps_[i]);
  }
  return s.empty() ? "1" : s;
}

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  // Within a degree, larger exponent vectors come first:
  // [1, x1, x2, x1^2, x1 x2, x2^2, ...].
  return a.exponents() > b.exponents();
}

std::size_t monomial_count(int nvars, int maxdeg) {
  // C(nvars + maxdeg, maxdeg) computed incrementally to stay exact.
  std::size_t c = 1;
  for (int k = 1; k <= maxdeg; ++k) {
    c = c * static_cast<std::size_t>(nvars + k) / static_cast<std::size_t>(k);
  }
  return c;
}

std::vector<Monomial> monomial_basis(int nvars, int maxdeg) {
  if (nvars < 1) throw DimensionError("monomial_basis needs nvars >= 1");
  if (maxdeg < 0) throw std::invalid_argument("monomial_basis needs maxdeg >= 0");
  std::vector<Monomial> out;
  out.reserve(monomial_count(nvars, maxdeg));
  std::vector<int> e(static_cast<std::size_t>(nvars), 0);
  for (int d = 0; d <= maxdeg; ++d) {
    // Enumerate compositions of d in lexicographically decreasing order.
    std::function<void(int, int)> fill = [&](int pos, int remaining) {
      if (pos == nvars - 1) {
        e[static_cast<std::size_t>(pos)] = remaining;
        out.emplace_back(e);
        return;
      }
      for (int k = remaining; k >= 0; --k) {
        e[static_cast<std::size_t>(pos)] = k;
        fill(pos + 1, remaining - k);
      }
    };
    fill(0, d);
  }
  return out;
}

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Monomial(nvars), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int var) {
  Polynomial p(nvars);
  p.add_term(Monomial::variable(nvars, var), 1.0);
  return p;
}

Polynomial Polynomial::monomial(const Monomial& m, double c) {
  Polynomial p(m.nvars());
  p.add_term(m, c);
  return p;
}

int Polynomial::degree() const {
  // Grlex order puts the highest degree last.
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (m.nvars() != nvars_) throw DimensionError("term nvars mismatch");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kDropTolerance) terms_.erase(it);
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != nvars_) throw DimensionError("evaluation point has wrong length");
  double v = 0.0;
  for (const auto& [m, c] : terms_) v += c * m.evaluate(x);
  return v;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void Polynomial::check_same_nvars(const Polynomial& q) const {
  if (q.nvars_ != nvars_) throw DimensionError("polynomial nvars mismatch");
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
  check_same_nvars(q);
  for (const auto& [m, c] : q.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
  check_same_nvars(q);
  for (const auto& [m, c] : q.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    if (std::abs(it->second) < kDropTolerance) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  p.check_same_nvars(q);
  // Accumulate raw products first, then canonicalize once.
  Polynomial::TermMap acc;
  for (const auto& [mp, cp] : p.terms_) {
    for (const auto& [mq, cq] : q.terms_) acc[mp * mq] += cp * cq;
  }
  Polynomial r(p.nvars_);
  for (auto& [m, c] : acc) {
    if (std::abs(c) >= Polynomial::kDropTolerance) r.terms_.emplace_hint(r.terms_.end(), m, c);
  }
  return r;
}

double Polynomial::distance(const Polynomial& p, const Polynomial& q) {
  return (p - q).max_abs_coefficient();
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", std::abs(c));
    os << buf;
    if (m.degree() > 0) os << "*" << m.to_string();
  }
  return os.str();
}

Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }
Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }

Polynomial differentiate(const Polynomial& p, int var) {
  if (var < 0 || var >= p.nvars()) throw DimensionError("differentiation index out of range");
  Polynomial r(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    const int e = m[var];
    if (e == 0) continue;
    std::vector<int> exps = m.exponents();
    exps[static_cast<std::size_t>(var)] -= 1;
    r.add_term(Monomial(std::move(exps)), c * e);
  }
  return r;
}

double evaluate(const Polynomial& p, std::span<const double> x) { return p.evaluate(x); }

PolyVec::PolyVec(std::size_t size, int nvars) : nvars_(nvars), entries_(size, Polynomial(nvars)) {}

PolyVec::PolyVec(std::vector<Polynomial> entries) : entries_(std::move(entries)) {
  if (!entries_.empty()) nvars_ = entries_.front().nvars();
  for (const auto& e : entries_) {
    if (e.nvars() != nvars_) throw DimensionError("PolyVec entries must share nvars");
  }
}

std::vector<double> PolyVec::evaluate(std::span<const double> x) const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.evaluate(x));
  return out;
}

Polynomial PolyVec::dot(const PolyVec& other) const {
  if (other.size() != size()) throw DimensionError("PolyVec length mismatch");
  Polynomial r(nvars_);
  for (std::size_t i = 0; i < size(); ++i) r += entries_[i] * other.entries_[i];
  return r;
}

PolyVec gradient(const Polynomial& p, std::span<const int> vars) {
  std::vector<Polynomial> out;
  out.reserve(vars.size());
  for (int v : vars) out.push_back(differentiate(p, v));
  PolyVec g(std::move(out));
  if (vars.empty()) return PolyVec(0, p.nvars());
  return g;
}

Polynomial divergence(const PolyVec& f, std::span<const int> vars) {
  if (f.size() != vars.size()) throw DimensionError("divergence: field and index set differ in length");
  Polynomial r(f.nvars());
  for (std::size_t i = 0; i < vars.size(); ++i) r += differentiate(f[i], vars[i]);
  return r;
}

Polynomial rescale_arguments(const Polynomial& p, double scale) {
  Polynomial r(p.nvars());
  for (const auto& [m, c] : p.terms()) r.add_term(m, c * std::pow(scale, m.degree()));
  return r;
}

}  // namespace evadesos
