#include "evadesos/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace evadesos {

FarkasData farkas_data(const EnvironmentConfig& cfg) {
  FarkasData f;
  f.e.fill(cfg.w_max);
  return f;
}

Polynomial build_V(const EnvironmentConfig& cfg) {
  constexpr int n = 4;
  const Polynomial d1 = Polynomial::variable(n, 0) - Polynomial::constant(n, cfg.x_r[0]);
  const Polynomial d2 = Polynomial::variable(n, 1) - Polynomial::constant(n, cfg.x_r[1]);
  return d1 * d1 + d2 * d2;
}

namespace {

constexpr int kN = 4;

EnvironmentConfig scaled_config(const EnvironmentConfig& cfg, double L) {
  EnvironmentConfig s = cfg;
  s.R /= L;
  s.R_ie /= L;
  s.R_ip /= L;
  s.R_a /= L;
  s.R_r /= L;
  for (auto* v : {&s.x_r, &s.x_ie, &s.x_ip}) {
    (*v)[0] /= L;
    (*v)[1] /= L;
  }
  s.u_max /= L;
  s.w_max /= L;
  s.bound_band /= L;
  return s;
}

int even_up(int d) { return d + (d % 2); }

}  // namespace

SynthProgram build_program(const EnvironmentConfig& cfg) {
  cfg.validate();
  SynthProgram sp;
  sp.scale = cfg.R;
  const double L = sp.scale;
  const EnvironmentConfig z = scaled_config(cfg, L);
  const GameSets h = build_sets(z);
  const Polynomial V = build_V(z);
  const Polynomial one = Polynomial::constant(kN, 1.0);
  const double eps = cfg.epsilon_strict;
  SosProgram& prog = sp.prog;

  const DecisionPoly rho = prog.declare_poly("rho", kN, cfg.d_rho);
  sp.rho = rho.expr;
  for (int i = 0; i < 2; ++i) sp.psi[i] = prog.declare_poly("psi" + std::to_string(i + 1), kN, cfg.d_psi).expr;
  const int dy = even_up(cfg.y_degree());

  auto mult = [&](const std::string& name, double factor) {
    sp.multiplier_factor[name] = factor;
    return name;
  };
  const double f_set = 1.0 / (L * L);  // identities in rho
  const double f_div = 1.0;            // divergence identity
  const double f_bound = 1.0 / L;      // input-bound identities

  // rho >= 0 on the initial set.
  prog.assert_nonneg_on(sp.rho,
                        {{h.h_ie, HSide::NonPositive, MultiplierKind::Sos, mult("sigma_ie", f_set)},
                         {h.h_ip, HSide::NonPositive, MultiplierKind::Sos, mult("sigma_ip", f_set)}},
                        cfg.d_sigma, cfg.d_lambda, "initial");
  sp.families.push_back("initial");

  // rho < 0 on the unsafe pieces, with margin eps.
  const AffinePolyExpr neg_rho = -sp.rho - AffinePolyExpr(eps * one);
  prog.assert_nonneg_on(neg_rho,
                        {{h.h_Xe, HSide::Zero, MultiplierKind::Free, mult("lambda_e", f_set)},
                         {h.h_re, HSide::NonNegative, MultiplierKind::Sos, mult("sigma_re", f_set)}},
                        cfg.d_sigma, cfg.d_lambda, "unsafe.evader_boundary");
  sp.families.push_back("unsafe.evader_boundary");
  prog.assert_nonneg_on(neg_rho, {{h.h_Xp, HSide::Zero, MultiplierKind::Free, mult("lambda_p", f_set)}}, cfg.d_sigma,
                        cfg.d_lambda, "unsafe.pursuer_boundary");
  sp.families.push_back("unsafe.pursuer_boundary");
  prog.assert_nonneg_on(neg_rho,
                        {{h.h_a, HSide::NonPositive, MultiplierKind::Sos, mult("sigma_a", f_set)},
                         {h.h_Xe, HSide::NonPositive, MultiplierKind::Sos, mult("sigma_ae", f_set)},
                         {h.h_Xp, HSide::NonPositive, MultiplierKind::Sos, mult("sigma_ap", f_set)}},
                        cfg.d_sigma, cfg.d_lambda, "unsafe.capture");
  sp.families.push_back("unsafe.capture");

  // y >= 0 entrywise, as global SOS.
  for (int k = 0; k < 4; ++k) {
    sp.y[static_cast<std::size_t>(k)] = prog.declare_sos("y" + std::to_string(k + 1), kN, dy).expr;
    sp.families.push_back("y" + std::to_string(k + 1) + ".sos");
  }

  // V y'N + V grad_p rho - alpha rho grad_p V = 0, one identity per pursuer axis.
  // When grad_p V vanishes identically the common factor V is divided out;
  // the identities are equivalent and the coefficient rows stay independent.
  const FarkasData fk = farkas_data(z);
  for (int j = 0; j < 2; ++j) {
    const int pv = 2 + j;
    const Polynomial dV = differentiate(V, pv);
    AffinePolyExpr ytN(kN);
    for (int r = 0; r < 4; ++r) ytN += fk.N[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] * sp.y[static_cast<std::size_t>(r)];
    const AffinePolyExpr drho = differentiate(sp.rho, pv);
    AffinePolyExpr eq = dV.is_zero() ? ytN + drho : ytN * V + drho * V - static_cast<double>(cfg.alpha) * (sp.rho * dV);
    prog.assert_zero(eq, "equality.p" + std::to_string(j + 1));
    sp.families.push_back("equality.p" + std::to_string(j + 1));
  }

  // -V y'e + V div_e psi - alpha grad_e V . psi >= eps V on cl(X \ Xr).
  {
    AffinePolyExpr ye(kN);
    for (int r = 0; r < 4; ++r) ye += fk.e[static_cast<std::size_t>(r)] * sp.y[static_cast<std::size_t>(r)];
    AffinePolyExpr div = -(ye * V);
    for (int i = 0; i < 2; ++i) {
      div += differentiate(sp.psi[static_cast<std::size_t>(i)], i) * V;
      div -= static_cast<double>(cfg.alpha) * (sp.psi[static_cast<std::size_t>(i)] * differentiate(V, i));
    }
    div -= AffinePolyExpr(eps * V);
    const int ds = std::max(cfg.d_sigma, even_up(div.degree()) - 2);
    prog.assert_nonneg_on(div,
                          {{h.h_Xe, HSide::NonPositive, MultiplierKind::Sos, mult("sigma_de", f_div), ds},
                           {h.h_Xp, HSide::NonPositive, MultiplierKind::Sos, mult("sigma_dp", f_div), ds}},
                          cfg.d_sigma, cfg.d_lambda, "divergence");
    sp.families.push_back("divergence");
  }

  // |psi_i| <= u_max rho on Xc kept a band away from the unsafe boundaries.
  {
    const double b = z.bound_band;
    const double shrink_arena = z.R * z.R - (z.R - b) * (z.R - b);
    const double grow_catch = (z.R_a + b) * (z.R_a + b) - z.R_a * z.R_a;
    const Polynomial hXe = h.h_Xe + Polynomial::constant(kN, shrink_arena);
    const Polynomial hXp = h.h_Xp + Polynomial::constant(kN, shrink_arena);
    const Polynomial ha = h.h_a - Polynomial::constant(kN, grow_catch);
    for (int i = 0; i < 2; ++i) {
      for (int s : {+1, -1}) {
        const std::string name = "bound.u" + std::to_string(i + 1) + (s > 0 ? "+" : "-");
        const AffinePolyExpr e = z.u_max * sp.rho - static_cast<double>(s) * sp.psi[static_cast<std::size_t>(i)];
        prog.assert_nonneg_on(e,
                              {{hXe, HSide::NonPositive, MultiplierKind::Sos, mult("sigma_" + name + ".e", f_bound)},
                               {hXp, HSide::NonPositive, MultiplierKind::Sos, mult("sigma_" + name + ".p", f_bound)},
                               {ha, HSide::NonNegative, MultiplierKind::Sos, mult("sigma_" + name + ".a", f_bound)}},
                              cfg.d_sigma, cfg.d_lambda, name);
        sp.families.push_back(name);
      }
    }
  }
  return sp;
}

ProgramSize program_size(const SynthProgram& sp) {
  ProgramSize s;
  s.rows = sp.prog.equality_count();
  for (const auto& v : sp.prog.vars()) s.free_vars += v.free ? 1 : 0;
  s.blocks = sp.prog.blocks().size();
  for (const auto& b : sp.prog.blocks()) s.max_side = std::max(s.max_side, b.side());
  return s;
}

Certificate extract_certificate(const EnvironmentConfig& cfg, const SynthProgram& sp, const ConicProgram& cp,
                                const Solution& sol) {
  const std::vector<double> values = variable_values(sp.prog, cp, sol);
  const double L = sp.scale;
  auto back = [&](const AffinePolyExpr& e, double factor) {
    return rescale_arguments(e.substitute(values), 1.0 / L) * factor;
  };
  Certificate c;
  c.cfg = cfg;
  c.V = build_V(cfg);
  c.alpha = cfg.alpha;
  c.rho_hat = back(sp.rho, 1.0);
  c.psi_hat = PolyVec({back(sp.psi[0], L), back(sp.psi[1], L)});
  std::vector<Polynomial> ys;
  for (const auto& y : sp.y) ys.push_back(back(y, 1.0 / L));
  c.y = PolyVec(std::move(ys));
  for (const auto& [name, factor] : sp.multiplier_factor) {
    c.multipliers[name] = back(sp.prog.named().at(name), factor);
  }
  c.solver_report = sol.summary();
  return c;
}

SynthesisResult synthesize(const EnvironmentConfig& cfg, bool verbose) {
  SynthProgram sp = build_program(cfg);
  const ProgramSize size = program_size(sp);
  if (!size.fits_internal()) {
    throw TooLargeError("program has " + std::to_string(size.rows) + " equalities and Gram side up to " +
                        std::to_string(size.max_side) + "; use export and an external SDP solver");
  }
  const ConicProgram cp = compile(sp.prog);
  Solution sol = solve(cp, SolveOptions{cfg.solver_tol, cfg.solver_max_iter, verbose});
  if (sol.status == SolveStatus::Infeasible) {
    throw InfeasibleError("no certificate exists at these degrees (solver certified infeasibility)");
  }
  if (sol.status != SolveStatus::Optimal) {
    throw SolverFailure("interior point method stopped with status " + to_string(sol.status));
  }
  SynthesisResult r{extract_certificate(cfg, sp, cp, sol), std::move(sol), size};
  return r;
}

// ---------------------------------------------------------------------------
// Certificate text format

namespace {

constexpr const char* kMagic = "evadesos-certificate 1";

void write_poly(std::ostream& os, const std::string& name, const Polynomial& p) {
  os << "[poly " << name << "]\n";
  char buf[40];
  for (const auto& [m, c] : p.terms()) {
    for (int e : m.exponents()) os << e << " ";
    std::snprintf(buf, sizeof buf, "%.17g", c);
    os << buf << "\n";
  }
}

}  // namespace

std::string Certificate::to_text() const {
  std::ostringstream os;
  os << kMagic << "\n";
  if (!manifest.empty()) os << "manifest = " << manifest << "\n";
  os << "alpha = " << alpha << "\n";
  os << "[config]\n" << format_config(cfg);
  write_poly(os, "V", V);
  write_poly(os, "rho", rho_hat);
  for (std::size_t i = 0; i < psi_hat.size(); ++i) write_poly(os, "psi" + std::to_string(i + 1), psi_hat[i]);
  for (std::size_t i = 0; i < y.size(); ++i) write_poly(os, "y" + std::to_string(i + 1), y[i]);
  for (const auto& [name, p] : multipliers) write_poly(os, "mult " + name, p);
  os << "[solver]\n" << solver_report;
  os << "[end]\n";
  return os.str();
}

Certificate Certificate::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("certificate line " + std::to_string(lineno) + ": " + what);
  };
  if (!std::getline(is, line) || line != kMagic) {
    lineno = 1;
    fail("missing header '" + std::string(kMagic) + "'");
  }
  ++lineno;
  Certificate c;
  std::string section;
  std::string config_text;
  std::map<std::string, Polynomial> polys;
  std::string poly_name;
  bool ended = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = line.substr(1, line.size() - 2);
      if (section.rfind("poly ", 0) == 0) {
        poly_name = section.substr(5);
        if (polys.contains(poly_name)) fail("duplicate polynomial '" + poly_name + "'");
        polys.emplace(poly_name, Polynomial(kN));
        section = "poly";
      } else if (section == "end") {
        ended = true;
        break;
      } else if (section != "config" && section != "solver") {
        fail("unknown section '" + section + "'");
      }
      continue;
    }
    if (section.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail("expected 'key = value'");
      std::string key = line.substr(0, eq), val = line.substr(eq + 1);
      key.erase(key.find_last_not_of(' ') + 1);
      val.erase(0, val.find_first_not_of(' '));
      if (key == "manifest") {
        c.manifest = val;
      } else if (key == "alpha") {
        try {
          c.alpha = std::stoi(val);
        } catch (const std::exception&) {
          fail("bad alpha");
        }
      } else {
        fail("unknown key '" + key + "'");
      }
    } else if (section == "config") {
      config_text += line + "\n";
    } else if (section == "solver") {
      c.solver_report += line + "\n";
    } else if (section == "poly") {
      std::istringstream ls(line);
      std::vector<int> exps(kN);
      for (int& e : exps) {
        if (!(ls >> e) || e < 0) fail("bad exponent");
      }
      std::string coef;
      if (!(ls >> coef)) fail("missing coefficient");
      std::string extra;
      if (ls >> extra) fail("trailing data");
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(coef, &used);
        if (used != coef.size()) fail("bad coefficient");
      } catch (const std::invalid_argument&) {
        fail("bad coefficient");
      } catch (const std::out_of_range&) {
        fail("coefficient out of range");
      }
      if (!std::isfinite(v)) fail("non-finite coefficient");
      polys.at(poly_name).add_term(Monomial(exps), v);
    }
  }
  if (!ended) fail("missing [end]");
  try {
    c.cfg = parse_config(config_text);
  } catch (const ConfigError& e) {
    throw std::runtime_error(std::string("certificate config: ") + e.what());
  }
  auto take = [&](const std::string& name) {
    auto it = polys.find(name);
    if (it == polys.end()) throw std::runtime_error("certificate lacks polynomial '" + name + "'");
    Polynomial p = it->second;
    polys.erase(it);
    return p;
  };
  c.V = take("V");
  c.rho_hat = take("rho");
  c.psi_hat = PolyVec({take("psi1"), take("psi2")});
  c.y = PolyVec({take("y1"), take("y2"), take("y3"), take("y4")});
  for (auto& [name, p] : polys) {
    if (name.rfind("mult ", 0) != 0) throw std::runtime_error("unexpected polynomial '" + name + "'");
    c.multipliers[name.substr(5)] = p;
  }
  return c;
}

void save_certificate(const Certificate& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << c.to_text();
  if (!out) throw std::runtime_error("write failed for " + path);
}

Certificate load_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return Certificate::from_text(ss.str());
}

}  // namespace evadesos
