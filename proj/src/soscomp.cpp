#include "evadesos/soscomp.hpp"

#include <algorithm>
#include <set>

namespace evadesos {

namespace {

void accumulate(LinearForm& into, const LinearForm& from, double scale) {
  for (const auto& [v, c] : from) {
    auto [it, inserted] = into.try_emplace(v, c * scale);
    if (!inserted) {
      it->second += c * scale;
      if (it->second == 0.0) into.erase(it);
    }
  }
}

}  // namespace

void AffinePolyExpr::check(const AffinePolyExpr& o) const {
  if (o.nvars_ != nvars_) throw DimensionError("affine expression nvars mismatch");
}

int AffinePolyExpr::degree() const {
  int d = constant_.degree();
  if (!linear_.empty()) d = std::max(d, linear_.rbegin()->first.degree());
  return d;
}

void AffinePolyExpr::add_var(const Monomial& m, VarId var, double coef) {
  if (m.nvars() != nvars_) throw DimensionError("monomial nvars mismatch");
  if (coef == 0.0) return;
  auto& form = linear_[m];
  auto [it, inserted] = form.try_emplace(var, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0.0) form.erase(it);
  }
  if (form.empty()) linear_.erase(m);
}

std::vector<Monomial> AffinePolyExpr::support() const {
  std::set<Monomial, GrlexLess> s;
  for (const auto& [m, c] : constant_.terms()) s.insert(m);
  for (const auto& [m, f] : linear_) s.insert(m);
  return {s.begin(), s.end()};
}

Polynomial AffinePolyExpr::substitute(const std::vector<double>& values) const {
  Polynomial p = constant_;
  for (const auto& [m, form] : linear_) {
    double c = 0.0;
    for (const auto& [v, a] : form) c += a * values.at(static_cast<std::size_t>(v));
    p.add_term(m, c);
  }
  return p;
}

AffinePolyExpr& AffinePolyExpr::operator+=(const AffinePolyExpr& o) {
  check(o);
  constant_ += o.constant_;
  for (const auto& [m, f] : o.linear_) {
    auto& form = linear_[m];
    accumulate(form, f, 1.0);
    if (form.empty()) linear_.erase(m);
  }
  return *this;
}

AffinePolyExpr& AffinePolyExpr::operator-=(const AffinePolyExpr& o) { return *this += -o; }

AffinePolyExpr& AffinePolyExpr::operator*=(double s) {
  if (s == 0.0) {
    constant_ = Polynomial(nvars_);
    linear_.clear();
    return *this;
  }
  constant_ *= s;
  for (auto& [m, f] : linear_) {
    for (auto& [v, c] : f) c *= s;
  }
  return *this;
}

AffinePolyExpr AffinePolyExpr::operator-() const {
  AffinePolyExpr r = *this;
  return r *= -1.0;
}

AffinePolyExpr operator*(const AffinePolyExpr& a, const Polynomial& p) {
  if (p.nvars() != a.nvars_) throw DimensionError("affine expression nvars mismatch");
  AffinePolyExpr r(a.nvars_);
  r.constant_ = a.constant_ * p;
  for (const auto& [ma, f] : a.linear_) {
    for (const auto& [mp, c] : p.terms()) {
      auto& form = r.linear_[ma * mp];
      accumulate(form, f, c);
    }
  }
  for (auto it = r.linear_.begin(); it != r.linear_.end();) {
    it = it->second.empty() ? r.linear_.erase(it) : std::next(it);
  }
  return r;
}

AffinePolyExpr AffinePolyExpr::product(const AffinePolyExpr& a, const AffinePolyExpr& b) {
  if (a.has_decision() && b.has_decision()) {
    throw NonlinearError("product of two decision-dependent expressions");
  }
  return a.has_decision() ? a * b.constant_ : b * a.constant_;
}

AffinePolyExpr differentiate(const AffinePolyExpr& e, int var) {
  AffinePolyExpr r(differentiate(e.constant(), var));
  for (const auto& [m, form] : e.linear()) {
    const int k = m[var];
    if (k == 0) continue;
    std::vector<int> exps = m.exponents();
    exps[static_cast<std::size_t>(var)] -= 1;
    const Monomial dm(std::move(exps));
    for (const auto& [v, c] : form) r.add_var(dm, v, c * k);
  }
  return r;
}

VarId SosProgram::new_free() {
  vars_.push_back(VarInfo{});
  return static_cast<VarId>(vars_.size() - 1);
}

void SosProgram::register_name(const std::string& name, const AffinePolyExpr& e) {
  if (!named_.try_emplace(name, e).second) throw ProgramError("duplicate name '" + name + "'");
}

DecisionPoly SosProgram::declare_poly(const std::string& name, int nvars, int degree) {
  if (degree < 0) throw std::invalid_argument("declare_poly: negative degree");
  if (named_.contains(name)) throw ProgramError("duplicate name '" + name + "'");
  DecisionPoly d{name, nvars, degree, {}, AffinePolyExpr(nvars)};
  for (const auto& m : monomial_basis(nvars, degree)) {
    const VarId v = new_free();
    d.coeff_ids.push_back(v);
    d.expr.add_var(m, v, 1.0);
  }
  register_name(name, d.expr);
  return d;
}

int SosProgram::new_block(const std::string& name, std::vector<Monomial> basis, AffinePolyExpr& out) {
  GramBlock g;
  g.name = name;
  g.basis = std::move(basis);
  g.matrix_id = static_cast<int>(blocks_.size());
  const int n = g.side();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      vars_.push_back(VarInfo{false, g.matrix_id, i, j});
      const VarId v = static_cast<VarId>(vars_.size() - 1);
      g.entry_ids.push_back(v);
      out.add_var(g.basis[static_cast<std::size_t>(i)] * g.basis[static_cast<std::size_t>(j)], v, i == j ? 1.0 : 2.0);
    }
  }
  blocks_.push_back(std::move(g));
  return blocks_.back().matrix_id;
}

SosVariable SosProgram::declare_sos(const std::string& name, int nvars, int degree) {
  if (degree < 0 || degree % 2 != 0) throw std::invalid_argument("declare_sos: degree must be even");
  if (named_.contains(name)) throw ProgramError("duplicate name '" + name + "'");
  SosVariable s{name, 0, AffinePolyExpr(nvars)};
  s.block = new_block(name, monomial_basis(nvars, degree / 2), s.expr);
  register_name(name, s.expr);
  return s;
}

int SosProgram::assert_sos(const AffinePolyExpr& expr, const std::string& name) {
  const int d = expr.degree();
  AffinePolyExpr gram(expr.nvars());
  const int block = new_block(name, monomial_basis(expr.nvars(), (d + 1) / 2), gram);
  sos_.push_back(SosConstraint{name, expr, block});
  assert_zero(expr - gram, name);
  return block;
}

std::vector<AffinePolyExpr> SosProgram::assert_nonneg_on(const AffinePolyExpr& expr,
                                                         const std::vector<DomainTerm>& domain, int d_sigma,
                                                         int d_lambda, const std::string& name) {
  AffinePolyExpr total = expr;
  std::vector<AffinePolyExpr> mults;
  for (std::size_t k = 0; k < domain.size(); ++k) {
    const DomainTerm& t = domain[k];
    if (t.h.nvars() != expr.nvars()) throw DimensionError("domain polynomial nvars mismatch");
    const std::string mname = t.name.empty() ? name + ".m" + std::to_string(k) : t.name;
    AffinePolyExpr m(expr.nvars());
    if (t.kind == MultiplierKind::Sos) {
      m = declare_sos(mname, expr.nvars(), t.degree >= 0 ? t.degree : d_sigma).expr;
    } else {
      m = declare_poly(mname, expr.nvars(), t.degree >= 0 ? t.degree : d_lambda).expr;
    }
    const AffinePolyExpr term = m * t.h;
    if (t.side == HSide::NonNegative) {
      total -= term;
    } else {
      total += term;
    }
    mults.push_back(std::move(m));
  }
  assert_sos(total, name);
  return mults;
}

void SosProgram::assert_zero(const AffinePolyExpr& expr, const std::string& name) {
  if (expr.support().empty()) return;
  zeros_.push_back(ZeroConstraint{name, expr});
}

std::size_t SosProgram::equality_count() const {
  std::size_t n = 0;
  for (const auto& z : zeros_) n += z.expr.support().size();
  return n;
}

}  // namespace evadesos
