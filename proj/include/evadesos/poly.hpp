#pragma once

// Sparse multivariate polynomials over double coefficients.
//
// Monomials are ordered graded-lexicographically everywhere in the toolkit:
// first by total degree, then lexicographically on the exponent vector with
// x1 most significant. Basis generation, serialization and the SOS compiler
// all rely on this single ordering.

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evadesos {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent vector of a monomial x1^e1 * ... * xn^en.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int nvars) : exps_(static_cast<std::size_t>(nvars), 0) {}
  explicit Monomial(std::vector<int> exps);

  /// x_var^power in nvars variables.
  static Monomial variable(int nvars, int var, int power = 1);

  int nvars() const { return static_cast<int>(exps_.size()); }
  int degree() const;
  int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const { return exps_; }

  Monomial operator*(const Monomial& other) const;
  double evaluate(std::span<const double> x) const;
  std::string to_string() const;

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<int> exps_;
};

/// Graded lexicographic order.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// All monomials of total degree <= maxdeg in grlex order.
/// Size is C(nvars + maxdeg, maxdeg).
std::vector<Monomial> monomial_basis(int nvars, int maxdeg);

/// Number of monomials of total degree <= maxdeg in nvars variables.
std::size_t monomial_count(int nvars, int maxdeg);

class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GrlexLess>;

  /// Coefficients below this magnitude are dropped after every operation.
  static constexpr double kDropTolerance = 1e-14;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, double c);
  static Polynomial variable(int nvars, int var);
  static Polynomial monomial(const Monomial& m, double c = 1.0);

  int nvars() const { return nvars_; }
  /// Total degree; 0 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  /// Coefficient of m, zero if absent.
  double coefficient(const Monomial& m) const;
  /// Adds c to the coefficient of m, keeping the canonical form.
  void add_term(const Monomial& m, double c);

  double evaluate(std::span<const double> x) const;
  double max_abs_coefficient() const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& q);
  Polynomial& operator-=(const Polynomial& q);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
  friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Max coefficient difference over the union of supports.
  static double distance(const Polynomial& p, const Polynomial& q);

  std::string to_string() const;

 private:
  void check_same_nvars(const Polynomial& q) const;

  int nvars_ = 0;
  TermMap terms_;
};

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
Polynomial differentiate(const Polynomial& p, int var);
double evaluate(const Polynomial& p, std::span<const double> x);

/// Fixed-length vector of polynomials sharing one variable count.
class PolyVec {
 public:
  PolyVec() = default;
  PolyVec(std::size_t size, int nvars);
  explicit PolyVec(std::vector<Polynomial> entries);

  std::size_t size() const { return entries_.size(); }
  int nvars() const { return nvars_; }
  const Polynomial& operator[](std::size_t i) const { return entries_[i]; }
  Polynomial& operator[](std::size_t i) { return entries_[i]; }
  const std::vector<Polynomial>& entries() const { return entries_; }

  std::vector<double> evaluate(std::span<const double> x) const;
  Polynomial dot(const PolyVec& other) const;

 private:
  int nvars_ = 0;
  std::vector<Polynomial> entries_;
};

/// Partial gradient restricted to `vars`; entry i is d p / d x_{vars[i]}.
PolyVec gradient(const Polynomial& p, std::span<const int> vars);

/// Sum over i of d f[i] / d x_{vars[i]}.
Polynomial divergence(const PolyVec& f, std::span<const int> vars);

/// p(scale * x): each coefficient of monomial m is multiplied by scale^deg(m).
Polynomial rescale_arguments(const Polynomial& p, double scale);

}  // namespace evadesos
