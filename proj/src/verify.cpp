#include "evadesos/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace evadesos {

namespace {

constexpr double kNonnegTol = 1e-9;
constexpr double kEqualityTol = 1e-7;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::vector<Input> w_vertices(double w_max) {
  if (w_max == 0.0) return {{0.0, 0.0}};
  return {{w_max, w_max}, {w_max, -w_max}, {-w_max, w_max}, {-w_max, -w_max}};
}

std::optional<double> report_value(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string k = line.substr(0, eq);
    k.erase(k.find_last_not_of(' ') + 1);
    if (k != key) continue;
    try {
      return std::stod(line.substr(eq + 1));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// Equality identities V y'N_j + V d_pj rho - alpha rho d_pj V, one per pursuer axis.
std::vector<Polynomial> equality_polys(const Certificate& c) {
  const FarkasData fk = farkas_data(c.cfg);
  std::vector<Polynomial> out;
  for (int j = 0; j < 2; ++j) {
    const int pv = 2 + j;
    Polynomial ytN(4);
    for (std::size_t r = 0; r < 4; ++r) ytN += fk.N[r][static_cast<std::size_t>(j)] * c.y[r];
    const Polynomial dV = differentiate(c.V, pv);
    out.push_back(c.V * ytN + c.V * differentiate(c.rho_hat, pv) - static_cast<double>(c.alpha) * (c.rho_hat * dV));
  }
  return out;
}

}  // namespace

std::string to_string(Condition c) {
  switch (c) {
    case Condition::Initial: return "initial";
    case Condition::Unsafe: return "unsafe";
    case Condition::YNonneg: return "y_nonneg";
    case Condition::Equality: return "equality";
    case Condition::Divergence: return "divergence";
    case Condition::InputBound: return "input_bound";
  }
  return "?";
}

const ConditionResult* VerificationReport::find(Condition c) const {
  for (const auto& r : conditions) {
    if (r.condition == c) return &r;
  }
  return nullptr;
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << "overall = " << (overall ? "pass" : "fail") << "\n";
  for (const auto& r : conditions) {
    const std::string k = "condition." + to_string(r.condition);
    os << k << ".pass = " << (r.pass ? "true" : "false") << "\n";
    os << k << ".worst = " << fmt(r.worst) << "\n";
    os << k << ".threshold = " << fmt(r.threshold) << "\n";
    os << k << ".samples = " << r.samples << "\n";
    os << k << ".seed = " << r.seed << "\n";
  }
  for (std::size_t j = 0; j < equality_residuals.size(); ++j) {
    os << "equality_residual.p" << j + 1 << " = " << fmt(equality_residuals[j]) << "\n";
  }
  os << "gram_min_eig = " << (gram_min_eig ? fmt(*gram_min_eig) : std::string("unknown")) << "\n";
  return os.str();
}

DivergenceField::DivergenceField(const Certificate& c) : drift_(4) {
  const double a = static_cast<double>(c.alpha);
  for (int i = 0; i < 2; ++i) {
    const auto& psi = c.psi_hat[static_cast<std::size_t>(i)];
    drift_ += c.V * differentiate(psi, i) - a * (psi * differentiate(c.V, i));
  }
  for (int j = 0; j < 2; ++j) {
    const int pv = 2 + j;
    coupling_[static_cast<std::size_t>(j)] =
        c.V * differentiate(c.rho_hat, pv) - a * (c.rho_hat * differentiate(c.V, pv));
  }
}

double DivergenceField::operator()(const State& x, const Input& w) const {
  return drift_.evaluate(x) + w[0] * coupling_[0].evaluate(x) + w[1] * coupling_[1].evaluate(x);
}

VerificationReport check_certificate(const Certificate& cert, std::size_t n, std::uint64_t seed,
                                     const std::vector<Condition>& which) {
  const EnvironmentConfig& cfg = cert.cfg;
  const GameGeometry geo(cfg);
  VerificationReport rep;
  for (std::size_t idx = 0; idx < kAllConditions.size(); ++idx) {
    const Condition cond = kAllConditions[idx];
    if (std::find(which.begin(), which.end(), cond) == which.end()) continue;
    ConditionResult r;
    r.condition = cond;
    r.seed = seed + idx;
    switch (cond) {
      case Condition::Initial: {
        r.threshold = -kNonnegTol;
        r.worst = INFINITY;
        for (const State& x : geo.sample(Region::Xi, n, r.seed)) r.worst = std::min(r.worst, cert.rho_hat.evaluate(x));
        r.samples = n;
        r.pass = r.worst >= r.threshold;
        break;
      }
      case Condition::Unsafe: {
        r.threshold = -cfg.epsilon_strict / 2.0;
        r.worst = -INFINITY;
        for (const State& x : geo.sample(Region::UnsafeBoundaryUnion, n, r.seed)) {
          r.worst = std::max(r.worst, cert.rho_hat.evaluate(x));
        }
        r.samples = n;
        r.pass = r.worst <= r.threshold;
        break;
      }
      case Condition::YNonneg: {
        r.threshold = -kNonnegTol;
        r.worst = INFINITY;
        std::mt19937_64 rng(r.seed);
        std::uniform_real_distribution<double> box(-cfg.R - cfg.R_r, cfg.R + cfg.R_r);
        for (std::size_t s = 0; s < n; ++s) {
          const State x{box(rng), box(rng), box(rng), box(rng)};
          for (std::size_t k = 0; k < cert.y.size(); ++k) r.worst = std::min(r.worst, cert.y[k].evaluate(x));
        }
        r.samples = n;
        r.pass = r.worst >= r.threshold;
        break;
      }
      case Condition::Equality: {
        r.threshold = kEqualityTol;
        r.worst = 0.0;
        for (const Polynomial& e : equality_polys(cert)) {
          rep.equality_residuals.push_back(e.max_abs_coefficient());
          r.worst = std::max(r.worst, e.max_abs_coefficient());
        }
        r.samples = 0;
        r.seed = 0;
        r.pass = r.worst < r.threshold;
        break;
      }
      case Condition::Divergence: {
        const DivergenceField div(cert);
        const auto verts = w_vertices(cfg.w_max);
        r.threshold = 0.0;
        r.worst = INFINITY;
        for (const State& x : geo.sample(Region::ClXMinusXr, n, r.seed)) {
          for (const Input& w : verts) r.worst = std::min(r.worst, div(x, w));
        }
        r.samples = n * verts.size();
        r.pass = r.worst > r.threshold;
        break;
      }
      case Condition::InputBound: {
        r.threshold = -kNonnegTol;
        r.worst = INFINITY;
        for (const State& x : geo.sample(Region::XcBound, n, r.seed)) {
          const double cap = cfg.u_max * cert.rho_hat.evaluate(x);
          for (std::size_t i = 0; i < 2; ++i) r.worst = std::min(r.worst, cap - std::abs(cert.psi_hat[i].evaluate(x)));
        }
        r.samples = n;
        r.pass = r.worst >= r.threshold;
        break;
      }
    }
    rep.conditions.push_back(r);
  }
  rep.gram_min_eig = report_value(cert.solver_report, "min_eigenvalue");
  rep.overall = !rep.conditions.empty() &&
                std::all_of(rep.conditions.begin(), rep.conditions.end(), [](const auto& r) { return r.pass; });
  return rep;
}

bool check_farkas_pointwise(const Certificate& cert, const State& x, std::size_t n_w, std::uint64_t seed) {
  const DivergenceField div(cert);
  const double wm = cert.cfg.w_max;
  for (const Input& w : w_vertices(wm)) {
    if (!(div(x, w) > 0.0)) return false;
  }
  if (wm == 0.0) return true;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-wm, wm);
  for (std::size_t s = 0; s < n_w; ++s) {
    if (!(div(x, {u(rng), u(rng)}) > 0.0)) return false;
  }
  return true;
}

std::string TraceReport::to_text() const {
  std::ostringstream os;
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "pass = " << b(pass) << "\n";
  os << "safe = " << b(safe) << "\n";
  os << "outcome_consistent = " << b(outcome_consistent) << "\n";
  os << "in_arena = " << b(in_arena) << "\n";
  os << "input_bounded = " << b(input_bounded) << "\n";
  os << "dist_consistent = " << b(dist_consistent) << "\n";
  os << "min_dist = " << fmt(min_dist) << "\n";
  if (capture_row) os << "capture_row = " << *capture_row << "\n";
  if (bound_row) os << "bound_row = " << *bound_row << "\n";
  if (exit_row) os << "exit_row = " << *exit_row << "\n";
  return os.str();
}

TraceReport check_trace(const Trace& trace, const EnvironmentConfig& cfg) {
  const GameGeometry geo(cfg);
  TraceReport rep;
  rep.dist_consistent = true;
  rep.min_dist = INFINITY;
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    const TraceRow& row = trace.rows[k];
    const double d = std::hypot(row.x[0] - row.x[2], row.x[1] - row.x[3]);
    if (d != row.dist) rep.dist_consistent = false;
    rep.min_dist = std::min(rep.min_dist, d);
    if (d <= cfg.R_a && !rep.capture_row) rep.capture_row = k;
    if (!geo.contains(Region::X, row.x) && !rep.exit_row) rep.exit_row = k;
    if ((std::abs(row.u[0]) > cfg.u_max || std::abs(row.u[1]) > cfg.u_max) && !rep.bound_row) rep.bound_row = k;
  }
  rep.safe = !rep.capture_row;
  rep.in_arena = !rep.exit_row;
  rep.input_bounded = !rep.bound_row;
  const bool final_in_target = !trace.rows.empty() && geo.contains(Region::Xr, trace.rows.back().x);
  rep.outcome_consistent = final_in_target == (trace.outcome == Outcome::ReachedTarget);
  rep.pass = !trace.rows.empty() && rep.safe && rep.in_arena && rep.input_bounded && rep.dist_consistent &&
             rep.outcome_consistent;
  return rep;
}

}  // namespace evadesos
