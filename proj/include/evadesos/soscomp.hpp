#pragma once

// Symbolic SOS layer. Decision polynomials and Gram-represented SOS
// polynomials are affine expressions in scalar decision variables; every
// assertion reduces to coefficient-matching equalities plus PSD Gram blocks.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evadesos/poly.hpp"

namespace evadesos {

using VarId = int;

class NonlinearError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ProgramError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Linear form sum_k a_k v_k over decision variables.
using LinearForm = std::map<VarId, double>;

/// Polynomial whose coefficients are affine in the decision variables:
/// sum_m (constant_m + L_m(v)) m(x).
class AffinePolyExpr {
 public:
  AffinePolyExpr() = default;
  explicit AffinePolyExpr(int nvars) : nvars_(nvars), constant_(nvars) {}
  AffinePolyExpr(const Polynomial& p) : nvars_(p.nvars()), constant_(p) {}  // NOLINT: implicit by design

  int nvars() const { return nvars_; }
  const Polynomial& constant() const { return constant_; }
  const std::map<Monomial, LinearForm, GrlexLess>& linear() const { return linear_; }
  bool has_decision() const { return !linear_.empty(); }
  /// Highest monomial degree carrying a constant or a decision term.
  int degree() const;

  /// Adds coef * var to the coefficient of m.
  void add_var(const Monomial& m, VarId var, double coef);

  /// Set of monomials carrying a constant or a decision term.
  std::vector<Monomial> support() const;

  /// Coefficients after substituting values[var] for every decision variable.
  Polynomial substitute(const std::vector<double>& values) const;

  AffinePolyExpr& operator+=(const AffinePolyExpr& o);
  AffinePolyExpr& operator-=(const AffinePolyExpr& o);
  AffinePolyExpr& operator*=(double s);
  AffinePolyExpr operator-() const;

  friend AffinePolyExpr operator+(AffinePolyExpr a, const AffinePolyExpr& b) { return a += b; }
  friend AffinePolyExpr operator-(AffinePolyExpr a, const AffinePolyExpr& b) { return a -= b; }
  friend AffinePolyExpr operator*(AffinePolyExpr a, double s) { return a *= s; }
  friend AffinePolyExpr operator*(double s, AffinePolyExpr a) { return a *= s; }
  /// Multiplication by a fixed polynomial.
  friend AffinePolyExpr operator*(const AffinePolyExpr& a, const Polynomial& p);
  friend AffinePolyExpr operator*(const Polynomial& p, const AffinePolyExpr& a) { return a * p; }

  /// Product of two expressions; throws NonlinearError if both carry
  /// decision variables.
  static AffinePolyExpr product(const AffinePolyExpr& a, const AffinePolyExpr& b);

 private:
  void check(const AffinePolyExpr& o) const;

  int nvars_ = 0;
  Polynomial constant_;
  std::map<Monomial, LinearForm, GrlexLess> linear_;
};

AffinePolyExpr differentiate(const AffinePolyExpr& e, int var);

struct DecisionPoly {
  std::string name;
  int nvars = 0;
  int degree = 0;
  std::vector<VarId> coeff_ids;  // one per basis monomial, grlex order
  AffinePolyExpr expr;
};

struct GramBlock {
  std::string name;
  std::vector<Monomial> basis;
  int matrix_id = 0;
  int side() const { return static_cast<int>(basis.size()); }
  // Upper-triangular entry (i, j), i <= j, row-major.
  std::vector<VarId> entry_ids;
};

struct SosVariable {
  std::string name;
  int block = 0;
  AffinePolyExpr expr;  // v(x)^T Q v(x)
};

enum class HSide { NonPositive, NonNegative, Zero };
enum class MultiplierKind { Sos, Free };

/// One defining polynomial of a semi-algebraic domain. Multipliers are
/// attached with the sign that keeps the added term nonpositive on the
/// domain: expr + s*h for h <= 0, expr - s*h for h >= 0, expr + l*h for h = 0.
struct DomainTerm {
  Polynomial h;
  HSide side = HSide::NonPositive;
  MultiplierKind kind = MultiplierKind::Sos;
  std::string name;
  int degree = -1;  // -1 selects the program default for the kind
};

struct VarInfo {
  bool free = true;
  int block = -1;
  int i = 0;
  int j = 0;
};

struct ZeroConstraint {
  std::string name;
  AffinePolyExpr expr;
};

struct SosConstraint {
  std::string name;
  AffinePolyExpr expr;  // the expression asserted to be SOS
  int block = 0;
};

class SosProgram {
 public:
  DecisionPoly declare_poly(const std::string& name, int nvars, int degree);
  SosVariable declare_sos(const std::string& name, int nvars, int degree);

  /// expr in Sigma[x]: fresh Gram block of half the (even-rounded) degree.
  int assert_sos(const AffinePolyExpr& expr, const std::string& name);

  /// expr >= 0 on the domain: asserts expr + sum_i s_i * (+/- h_i) SOS.
  /// Multipliers of kind Sos get degree d_sigma, Free ones d_lambda.
  /// Returns the multiplier expressions in domain order.
  std::vector<AffinePolyExpr> assert_nonneg_on(const AffinePolyExpr& expr, const std::vector<DomainTerm>& domain,
                                               int d_sigma, int d_lambda, const std::string& name);

  /// One scalar equality per monomial in the support of expr.
  void assert_zero(const AffinePolyExpr& expr, const std::string& name);

  int var_count() const { return static_cast<int>(vars_.size()); }
  const std::vector<VarInfo>& vars() const { return vars_; }
  const std::vector<GramBlock>& blocks() const { return blocks_; }
  const std::vector<ZeroConstraint>& zeros() const { return zeros_; }
  const std::vector<SosConstraint>& sos_constraints() const { return sos_; }
  /// Every named polynomial: decision polys, SOS variables and multipliers.
  const std::map<std::string, AffinePolyExpr>& named() const { return named_; }
  /// Total scalar equality count (monomials over all zero constraints).
  std::size_t equality_count() const;

 private:
  VarId new_free();
  int new_block(const std::string& name, std::vector<Monomial> basis, AffinePolyExpr& out);
  void register_name(const std::string& name, const AffinePolyExpr& e);

  std::vector<VarInfo> vars_;
  std::vector<GramBlock> blocks_;
  std::vector<ZeroConstraint> zeros_;
  std::vector<SosConstraint> sos_;
  std::map<std::string, AffinePolyExpr> named_;
};

}  // namespace evadesos
