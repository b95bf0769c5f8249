#include "evadesos/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace evadesos {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::TailChasing: return "tail-chasing";
    case Strategy::GoToMiddle: return "go-to-middle";
    case Strategy::BoxSaturating: return "box-saturating";
  }
  return "?";
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::ReachedTarget: return "ReachedTarget";
    case Outcome::Captured: return "Captured";
    case Outcome::LeftArena: return "LeftArena";
    case Outcome::Timeout: return "Timeout";
  }
  return "?";
}

Strategy parse_strategy(const std::string& s) {
  if (s == "tail-chasing" || s == "tc") return Strategy::TailChasing;
  if (s == "go-to-middle" || s == "gtm") return Strategy::GoToMiddle;
  if (s == "box-saturating" || s == "box") return Strategy::BoxSaturating;
  throw ConfigError("unknown strategy '" + s + "'");
}

Outcome parse_outcome(const std::string& s) {
  for (Outcome o : {Outcome::ReachedTarget, Outcome::Captured, Outcome::LeftArena, Outcome::Timeout}) {
    if (to_string(o) == s) return o;
  }
  throw std::invalid_argument("unknown outcome '" + s + "'");
}

void SimConfig::validate(const EnvironmentConfig& env) const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (dt * env.u_max > env.R_a / 10.0) throw ConfigError("dt * u_max exceeds R_a / 10");
  if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
  if (!membership(GameGeometry(env), Region::Xi, x0)) throw ConfigError("initial state is not in Xi");
}

double Trace::min_dist() const {
  double m = INFINITY;
  for (const auto& r : rows) m = std::min(m, r.dist);
  return m;
}

std::string Trace::to_csv() const {
  std::string out = "t,x1,x2,x3,x4,u1,u2,w1,w2,rho,dist\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.x[0],
                  r.x[1], r.x[2], r.x[3], r.u[0], r.u[1], r.w[0], r.w[1], r.rho, r.dist);
    out += buf;
  }
  out += "# outcome=" + to_string(outcome);
  if (!manifest.empty()) out += " manifest=" + manifest;
  out += "\n";
  return out;
}

Trace Trace::from_csv(const std::string& text) {
  Trace tr;
  std::istringstream in(text);
  std::string line;
  bool header = false, footer = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!header) {
      if (line != "t,x1,x2,x3,x4,u1,u2,w1,w2,rho,dist") throw std::invalid_argument("bad trace header");
      header = true;
      continue;
    }
    if (line.rfind("# outcome=", 0) == 0) {
      std::istringstream fs(line.substr(10));
      std::string name, extra;
      fs >> name;
      tr.outcome = parse_outcome(name);
      while (fs >> extra) {
        if (extra.rfind("manifest=", 0) == 0) tr.manifest = extra.substr(9);
      }
      footer = true;
      continue;
    }
    std::array<double, 11> v{};
    std::istringstream ls(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(ls, cell, ',')) {
      if (k >= v.size()) throw std::invalid_argument("too many trace columns");
      v[k++] = std::stod(cell);
    }
    if (k != v.size()) throw std::invalid_argument("too few trace columns");
    tr.rows.push_back({v[0], {v[1], v[2], v[3], v[4]}, {v[5], v[6]}, {v[7], v[8]}, v[9], v[10]});
  }
  if (!header || !footer) throw std::invalid_argument("trace missing header or outcome footer");
  return tr;
}

double default_singularity_floor(const Certificate& cert) { return 1e-9 * cert.rho_hat.max_abs_coefficient(); }

EvaderControl evader_control(const Certificate& cert, const State& x, double floor) {
  const double r = cert.rho_hat.evaluate(x);
  const double um = cert.cfg.u_max;
  EvaderControl c;
  for (std::size_t i = 0; i < 2; ++i) {
    const double p = cert.psi_hat[i].evaluate(x);
    if (std::abs(r) < floor) {
      c.u[i] = p > 0.0 ? um : (p < 0.0 ? -um : 0.0);
    } else {
      c.u[i] = std::clamp(p / r, -um, um);
    }
  }
  c.singular = std::abs(r) < floor;
  return c;
}

Input pursuer_control(Strategy strategy, const State& x, double w_max, const Vec2& x_r) {
  Vec2 target{x[0], x[1]};
  if (strategy == Strategy::GoToMiddle) target = {0.5 * (x[0] + x_r[0]), 0.5 * (x[1] + x_r[1])};
  const double d1 = target[0] - x[2];
  const double d2 = target[1] - x[3];
  const double n2 = std::hypot(d1, d2);
  if (n2 < 1e-12) return {0.0, 0.0};
  if (strategy == Strategy::BoxSaturating) {
    const double ninf = std::max(std::abs(d1), std::abs(d2));
    return {w_max * d1 / ninf, w_max * d2 / ninf};
  }
  return {w_max * d1 / n2, w_max * d2 / n2};
}

State step(const State& x, const Input& u, const Input& w, double dt) {
  return {x[0] + dt * u[0], x[1] + dt * u[1], x[2] + dt * w[0], x[3] + dt * w[1]};
}

Trace run(const Certificate& cert, const SimConfig& sc) {
  const EnvironmentConfig& env = cert.cfg;
  sc.validate(env);
  const GameGeometry geo(env);
  const double floor = sc.singularity_floor < 0.0 ? default_singularity_floor(cert) : sc.singularity_floor;
  Trace tr;
  State x = sc.x0;
  for (long k = 0;; ++k) {
    TraceRow row;
    row.t = static_cast<double>(k) * sc.dt;
    row.x = x;
    row.dist = std::hypot(x[0] - x[2], x[1] - x[3]);
    row.rho = cert.rho_hat.evaluate(x);
    const EvaderControl ec = evader_control(cert, x, floor);
    row.u = ec.u;
    row.w = pursuer_control(sc.strategy, x, env.w_max, env.x_r);
    tr.rows.push_back(row);

    if (row.dist <= env.R_a) {
      tr.outcome = Outcome::Captured;
      break;
    }
    if (geo.contains(Region::Xr, x)) {
      tr.outcome = Outcome::ReachedTarget;
      break;
    }
    if (!geo.contains(Region::X, x)) {
      tr.outcome = Outcome::LeftArena;
      break;
    }
    if (row.t >= sc.t_max) {
      tr.outcome = Outcome::Timeout;
      break;
    }
    if (ec.singular) ++tr.singular_steps;
    x = step(x, row.u, row.w, sc.dt);
  }
  return tr;
}

}  // namespace evadesos
