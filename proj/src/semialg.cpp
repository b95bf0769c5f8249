#include "evadesos/semialg.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace evadesos {

namespace {

double sq(double v) { return v * v; }

Polynomial circle(int nvars, int i, int j, const Vec2& center, double radius) {
  const Polynomial xi = Polynomial::variable(nvars, i) - Polynomial::constant(nvars, center[0]);
  const Polynomial xj = Polynomial::variable(nvars, j) - Polynomial::constant(nvars, center[1]);
  return xi * xi + xj * xj - Polynomial::constant(nvars, radius * radius);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad numeric value for '" + key + "': " + v);
}

int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d)) throw ConfigError("'" + key + "' must be an integer");
  return static_cast<int>(d);
}

Vec2 parse_vec2(const std::string& key, std::string v) {
  for (char& c : v) {
    if (c == ',' || c == '[' || c == ']' || c == '(' || c == ')') c = ' ';
  }
  std::istringstream is(v);
  Vec2 out{};
  std::string a, b, extra;
  if (!(is >> a >> b) || (is >> extra)) throw ConfigError("'" + key + "' needs exactly two numbers");
  out[0] = parse_double(key, a);
  out[1] = parse_double(key, b);
  return out;
}

}  // namespace

void EnvironmentConfig::validate() const {
  for (auto [name, v] : {std::pair{"R", R}, {"R_ie", R_ie}, {"R_ip", R_ip}, {"R_a", R_a}, {"R_r", R_r}}) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  }
  if (R_a >= R) throw ConfigError("catch radius must be smaller than the arena radius");
  if (u_max < 0.0 || w_max < 0.0) throw ConfigError("speed bounds must be non-negative");
  if (alpha < 1) throw ConfigError("alpha must be >= 1");
  if (d_rho < 0 || d_psi < 0) throw ConfigError("polynomial degrees must be non-negative");
  if (d_sigma < 0 || d_sigma % 2 != 0) throw ConfigError("d_sigma must be a non-negative even integer");
  if (d_lambda < 0) throw ConfigError("d_lambda must be non-negative");
  if (d_y < 0) throw ConfigError("d_y must be non-negative");
  if (!(epsilon_strict > 0.0)) throw ConfigError("epsilon_strict must be positive");
  if (bound_band < 0.0 || bound_band >= R) throw ConfigError("bound_band must lie in [0, R)");
  if (!(solver_tol > 0.0) || solver_max_iter < 1) throw ConfigError("bad solver settings");

  // Initial balls inside the arena.
  if (std::hypot(x_ie[0], x_ie[1]) + R_ie > R) throw ConfigError("evader initial ball leaves the arena");
  if (std::hypot(x_ip[0], x_ip[1]) + R_ip > R) throw ConfigError("pursuer initial ball leaves the arena");
  // Xi and Xa disjoint: every evader/pursuer pair in the open balls is
  // farther apart than the catch radius.
  if (std::hypot(x_ie[0] - x_ip[0], x_ie[1] - x_ip[1]) - R_ie - R_ip < R_a) {
    throw ConfigError("initial set intersects the catch set");
  }
  // Xi and Xr disjoint: the evader ball stays inside the arena, which Xr
  // only touches on the circle.
  // Target centre on or outside the arena so that Xr is a crescent.
  if (std::hypot(x_r[0], x_r[1]) + R_r <= R) throw ConfigError("target lies strictly inside the arena; Xr would be empty");
}

EnvironmentConfig parse_config(const std::string& text) {
  EnvironmentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "R") cfg.R = parse_double(key, val);
    else if (key == "R_ie") cfg.R_ie = parse_double(key, val);
    else if (key == "R_ip") cfg.R_ip = parse_double(key, val);
    else if (key == "R_a") cfg.R_a = parse_double(key, val);
    else if (key == "R_r") cfg.R_r = parse_double(key, val);
    else if (key == "x_r") cfg.x_r = parse_vec2(key, val);
    else if (key == "x_ie") cfg.x_ie = parse_vec2(key, val);
    else if (key == "x_ip") cfg.x_ip = parse_vec2(key, val);
    else if (key == "u_max") cfg.u_max = parse_double(key, val);
    else if (key == "w_max") cfg.w_max = parse_double(key, val);
    else if (key == "alpha") cfg.alpha = parse_int(key, val);
    else if (key == "d_rho") cfg.d_rho = parse_int(key, val);
    else if (key == "d_psi") cfg.d_psi = parse_int(key, val);
    else if (key == "d_sigma") cfg.d_sigma = parse_int(key, val);
    else if (key == "d_lambda") cfg.d_lambda = parse_int(key, val);
    else if (key == "d_y") cfg.d_y = parse_int(key, val);
    else if (key == "epsilon_strict") cfg.epsilon_strict = parse_double(key, val);
    else if (key == "bound_band") cfg.bound_band = parse_double(key, val);
    else if (key == "solver_tol") cfg.solver_tol = parse_double(key, val);
    else if (key == "solver_max_iter") cfg.solver_max_iter = parse_int(key, val);
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

EnvironmentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const EnvironmentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "R = " << cfg.R << "\n"
     << "R_ie = " << cfg.R_ie << "\n"
     << "R_ip = " << cfg.R_ip << "\n"
     << "R_a = " << cfg.R_a << "\n"
     << "R_r = " << cfg.R_r << "\n"
     << "x_r = " << cfg.x_r[0] << ", " << cfg.x_r[1] << "\n"
     << "x_ie = " << cfg.x_ie[0] << ", " << cfg.x_ie[1] << "\n"
     << "x_ip = " << cfg.x_ip[0] << ", " << cfg.x_ip[1] << "\n"
     << "u_max = " << cfg.u_max << "\n"
     << "w_max = " << cfg.w_max << "\n"
     << "alpha = " << cfg.alpha << "\n"
     << "d_rho = " << cfg.d_rho << "\n"
     << "d_psi = " << cfg.d_psi << "\n"
     << "d_sigma = " << cfg.d_sigma << "\n"
     << "d_lambda = " << cfg.d_lambda << "\n"
     << "d_y = " << cfg.d_y << "\n"
     << "epsilon_strict = " << cfg.epsilon_strict << "\n"
     << "bound_band = " << cfg.bound_band << "\n"
     << "solver_tol = " << cfg.solver_tol << "\n"
     << "solver_max_iter = " << cfg.solver_max_iter << "\n";
  return os.str();
}

GameSets build_sets(const EnvironmentConfig& cfg) {
  cfg.validate();
  constexpr int n = 4;
  const Polynomial e1 = Polynomial::variable(n, 0);
  const Polynomial e2 = Polynomial::variable(n, 1);
  const Polynomial p1 = Polynomial::variable(n, 2);
  const Polynomial p2 = Polynomial::variable(n, 3);
  GameSets s;
  s.h_Xe = circle(n, 0, 1, {0.0, 0.0}, cfg.R);
  s.h_Xp = circle(n, 2, 3, {0.0, 0.0}, cfg.R);
  s.h_ie = circle(n, 0, 1, cfg.x_ie, cfg.R_ie);
  s.h_ip = circle(n, 2, 3, cfg.x_ip, cfg.R_ip);
  s.h_a = (e1 - p1) * (e1 - p1) + (e2 - p2) * (e2 - p2) - Polynomial::constant(n, cfg.R_a * cfg.R_a);
  s.h_re = circle(n, 0, 1, cfg.x_r, cfg.R_r);
  return s;
}

std::string to_string(Region r) {
  switch (r) {
    case Region::X: return "X";
    case Region::Xi: return "Xi";
    case Region::Xa: return "Xa";
    case Region::Xr: return "Xr";
    case Region::Xc: return "Xc";
    case Region::ClXMinusXr: return "cl(X\\Xr)";
    case Region::UnsafeBoundaryUnion: return "unsafe";
    case Region::EvaderArenaBoundary: return "evader-boundary";
    case Region::PursuerArenaBoundary: return "pursuer-boundary";
    case Region::XcBound: return "Xc-bound";
  }
  return "?";
}

GameGeometry::GameGeometry(EnvironmentConfig cfg) : cfg_(cfg), sets_(build_sets(cfg_)) {}

GameGeometry::Values GameGeometry::values(const State& x) const {
  const auto& c = cfg_;
  Values v{};
  v.Xe = sq(x[0]) + sq(x[1]) - sq(c.R);
  v.Xp = sq(x[2]) + sq(x[3]) - sq(c.R);
  v.ie = sq(x[0] - c.x_ie[0]) + sq(x[1] - c.x_ie[1]) - sq(c.R_ie);
  v.ip = sq(x[2] - c.x_ip[0]) + sq(x[3] - c.x_ip[1]) - sq(c.R_ip);
  v.a = sq(x[0] - x[2]) + sq(x[1] - x[3]) - sq(c.R_a);
  v.re = sq(x[0] - c.x_r[0]) + sq(x[1] - c.x_r[1]) - sq(c.R_r);
  return v;
}

bool GameGeometry::contains(Region region, const State& x) const {
  const Values h = values(x);
  const double tol = kBoundaryTolerance;
  const double band = cfg_.bound_band;
  switch (region) {
    case Region::X: return (h.Xe <= 0.0 || h.re <= 0.0) && h.Xp <= 0.0;
    case Region::Xi: return h.ie < 0.0 && h.ip < 0.0;
    case Region::Xa: return h.Xe <= 0.0 && h.Xp <= 0.0 && h.a <= 0.0;
    case Region::Xr: return h.Xe >= 0.0 && h.re <= 0.0 && h.Xp <= 0.0;
    case Region::Xc: return h.Xe <= 0.0 && h.Xp <= 0.0 && h.a >= 0.0;
    case Region::ClXMinusXr: return h.Xe <= 0.0 && h.Xp <= 0.0;
    case Region::UnsafeBoundaryUnion:
      return (std::abs(h.Xe) <= tol && h.re > 0.0) || std::abs(h.Xp) <= tol ||
             (h.a <= 0.0 && h.Xe <= 0.0 && h.Xp <= 0.0);
    case Region::EvaderArenaBoundary: return std::abs(h.Xe) <= tol && h.re > 0.0 && h.Xp <= 0.0;
    case Region::PursuerArenaBoundary: return std::abs(h.Xp) <= tol && (h.Xe <= 0.0 || h.re <= 0.0);
    case Region::XcBound: {
      const double shrink = sq(cfg_.R) - sq(cfg_.R - band);
      const double grow = sq(cfg_.R_a + band) - sq(cfg_.R_a);
      return h.Xe <= -shrink && h.Xp <= -shrink && h.a >= grow;
    }
  }
  return false;
}

std::vector<State> GameGeometry::sample(Region region, std::size_t count, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& c = cfg_;
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const double box = c.R + c.R_r;

  if (region == Region::UnsafeBoundaryUnion) {
    // Equal thirds from the three pieces, interleaved deterministically.
    const std::size_t n_e = count / 3, n_p = count / 3, n_a = count - n_e - n_p;
    auto pe = sample(Region::EvaderArenaBoundary, n_e, seed ^ 0x9e3779b97f4a7c15ULL);
    auto pp = sample(Region::PursuerArenaBoundary, n_p, seed ^ 0xbf58476d1ce4e5b9ULL);
    auto pa = sample(Region::Xa, n_a, seed ^ 0x94d049bb133111ebULL);
    std::vector<State> out;
    out.reserve(count);
    out.insert(out.end(), pe.begin(), pe.end());
    out.insert(out.end(), pp.begin(), pp.end());
    out.insert(out.end(), pa.begin(), pa.end());
    return out;
  }

  auto on_circle = [&](double radius) {
    const double t = uniform(0.0, 2.0 * std::acos(-1.0));
    return Vec2{radius * std::cos(t), radius * std::sin(t)};
  };

  std::vector<State> out;
  out.reserve(count);
  std::uint64_t draws = 0;
  constexpr std::uint64_t kMinDraws = 1'000'000;
  while (out.size() < count) {
    ++draws;
    if (draws > kMinDraws && static_cast<double>(out.size() + 1) / static_cast<double>(draws) < 1e-6) {
      throw SamplingExhausted("acceptance rate below 1e-6 while sampling " + to_string(region));
    }
    State x{};
    switch (region) {
      case Region::Xi:
        x = {uniform(c.x_ie[0] - c.R_ie, c.x_ie[0] + c.R_ie), uniform(c.x_ie[1] - c.R_ie, c.x_ie[1] + c.R_ie),
             uniform(c.x_ip[0] - c.R_ip, c.x_ip[0] + c.R_ip), uniform(c.x_ip[1] - c.R_ip, c.x_ip[1] + c.R_ip)};
        break;
      case Region::Xa: {
        const double e1 = uniform(-c.R, c.R), e2 = uniform(-c.R, c.R);
        x = {e1, e2, uniform(e1 - c.R_a, e1 + c.R_a), uniform(e2 - c.R_a, e2 + c.R_a)};
        break;
      }
      case Region::Xr:
        x = {uniform(c.x_r[0] - c.R_r, c.x_r[0] + c.R_r), uniform(c.x_r[1] - c.R_r, c.x_r[1] + c.R_r),
             uniform(-c.R, c.R), uniform(-c.R, c.R)};
        break;
      case Region::Xc:
      case Region::ClXMinusXr:
      case Region::XcBound:
        x = {uniform(-c.R, c.R), uniform(-c.R, c.R), uniform(-c.R, c.R), uniform(-c.R, c.R)};
        break;
      case Region::EvaderArenaBoundary: {
        const Vec2 e = on_circle(c.R);
        x = {e[0], e[1], uniform(-c.R, c.R), uniform(-c.R, c.R)};
        break;
      }
      case Region::PursuerArenaBoundary: {
        const Vec2 p = on_circle(c.R);
        x = {uniform(-box, box), uniform(-box, box), p[0], p[1]};
        break;
      }
      case Region::X:
      case Region::UnsafeBoundaryUnion:
        x = {uniform(-box, box), uniform(-box, box), uniform(-c.R, c.R), uniform(-c.R, c.R)};
        break;
    }
    if (contains(region, x)) out.push_back(x);
  }
  return out;
}

bool membership(const GameGeometry& geometry, Region region, const State& x) {
  return geometry.contains(region, x);
}

}  // namespace evadesos
