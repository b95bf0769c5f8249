#include "evadesos/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "evadesos/verify.hpp"

namespace evadesos {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::istringstream in(s);
  std::string cell;
  while (std::getline(in, cell, ',')) v.push_back(std::stod(cell));
  return v;
}

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  bool quiet = false;
};

void say(const Common& c, const std::string& msg) {
  if (!c.quiet) std::cout << msg << "\n";
}

// synthesize ---------------------------------------------------------------

int cmd_synthesize(const std::string& config_path, const Common& c, std::size_t samples, bool verbose) {
  RunManifest m;
  m.command = "synthesize";
  m.config_path = config_path;
  m.seed = c.seed;
  EnvironmentConfig cfg;
  try {
    const std::string text = read_file(config_path);
    m.input_digest = fnv1a_hex(text);
    cfg = parse_config(text);
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
  const std::string out = c.out.empty() ? "certificate.txt" : c.out;
  m.outputs = {out, out + ".report"};
  if (!cfg.evader_faster()) std::cerr << "warning: u_max > w_max > 0 does not hold for this config\n";

  Stopwatch sw;
  SynthesisResult res;
  try {
    res = synthesize(cfg, verbose);
  } catch (const TooLargeError& e) {
    std::cerr << "too large: " << e.what() << "\nhint: evadesos export " << config_path
              << " --out program.dat-s, then solve externally\n";
    return exit_code::kTooLarge;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return exit_code::kInfeasible;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return exit_code::kSolverFailure;
  }
  m.timings.emplace_back("synthesize", sw.lap());
  const VerificationReport rep = check_certificate(res.cert, samples, c.seed);
  m.timings.emplace_back("verify", sw.lap());
  const std::string hash = m.hash();
  res.cert.manifest = hash;
  try {
    write_file(out + ".report", "manifest = " + hash + "\n" + rep.to_text());
    if (rep.overall) write_file(out, res.cert.to_text());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
  say(c, "rows " + std::to_string(res.size.rows) + " free " + std::to_string(res.size.free_vars) + " blocks " +
             std::to_string(res.size.blocks) + " max side " + std::to_string(res.size.max_side));
  say(c, res.solution.summary() + m.to_text());
  if (!rep.overall) {
    std::cerr << "verification failed; certificate not written, see " << out << ".report\n";
    return exit_code::kVerificationFailed;
  }
  say(c, "certificate written to " + out);
  return exit_code::kOk;
}

// verify -------------------------------------------------------------------

int cmd_verify(const std::string& cert_path, const Common& c, std::size_t samples) {
  Certificate cert;
  try {
    cert = load_certificate(cert_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
  const VerificationReport rep = check_certificate(cert, samples, c.seed);
  if (!c.out.empty()) {
    try {
      write_file(c.out, rep.to_text());
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_code::kError;
    }
  }
  if (!c.quiet) std::cout << rep.to_text();
  return rep.overall ? exit_code::kOk : exit_code::kVerificationFailed;
}

// simulate -----------------------------------------------------------------

int cmd_simulate(const std::string& cert_path, const Common& c, const std::string& strategy, const std::string& x0,
                 double dt, double tmax) {
  RunManifest m;
  m.command = "simulate";
  m.config_path = cert_path;
  m.seed = c.seed;
  Certificate cert;
  SimConfig sc;
  sc.dt = dt;
  sc.t_max = tmax;
  try {
    const std::string text = read_file(cert_path);
    m.input_digest = fnv1a_hex(text);
    cert = Certificate::from_text(text);
    sc.strategy = parse_strategy(strategy);
    const EnvironmentConfig& e = cert.cfg;
    if (x0.empty()) {
      sc.x0 = {e.x_ie[0], e.x_ie[1], e.x_ip[0], e.x_ip[1]};
    } else if (x0 == "random") {
      sc.x0 = GameGeometry(e).sample(Region::Xi, 1, c.seed).front();
    } else {
      const auto v = parse_list(x0);
      if (v.size() != 4) throw ConfigError("--x0 needs four comma-separated values");
      sc.x0 = {v[0], v[1], v[2], v[3]};
    }
    sc.validate(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
  const std::string out = c.out.empty() ? "trace.csv" : c.out;
  m.outputs = {out};
  char params[256];
  std::snprintf(params, sizeof params, " strategy=%s x0=%.17g,%.17g,%.17g,%.17g dt=%.17g tmax=%.17g",
                to_string(sc.strategy).c_str(), sc.x0[0], sc.x0[1], sc.x0[2], sc.x0[3], sc.dt, sc.t_max);
  m.command += params;
  Stopwatch sw;
  Trace tr = run(cert, sc);
  m.timings.emplace_back("simulate", sw.lap());
  tr.manifest = m.hash();
  try {
    write_file(out, tr.to_csv());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
  const TraceReport audit = check_trace(tr, cert.cfg);
  say(c, "outcome " + to_string(tr.outcome) + " t " + g(tr.rows.back().t) + " min_dist " + g(tr.min_dist()) +
             " singular_steps " + std::to_string(tr.singular_steps) + " audit " + (audit.pass ? "pass" : "fail"));
  switch (tr.outcome) {
    case Outcome::ReachedTarget: return exit_code::kOk;
    case Outcome::Captured: return exit_code::kCaptured;
    case Outcome::LeftArena:
    case Outcome::Timeout: return exit_code::kTimeout;
  }
  return exit_code::kError;
}

// export -------------------------------------------------------------------

int cmd_export(const std::string& config_path, const Common& c) {
  RunManifest m;
  m.command = "export";
  m.config_path = config_path;
  m.seed = c.seed;
  EnvironmentConfig cfg;
  try {
    const std::string text = read_file(config_path);
    m.input_digest = fnv1a_hex(text);
    cfg = parse_config(text);
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
  const std::string out = c.out.empty() ? "program.dat-s" : c.out;
  m.outputs = {out};
  Stopwatch sw;
  const SynthProgram sp = build_program(cfg);
  const ConicProgram cp = compile(sp.prog);
  m.timings.emplace_back("build", sw.lap());
  const std::string body = export_sdpa(cp);
  m.timings.emplace_back("write", sw.lap());
  try {
    write_file(out, "\"evadesos program manifest=" + m.hash() + "\n" + body);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
  const ProgramSize sz = program_size(sp);
  say(c, "rows " + std::to_string(cp.rows.size()) + "\npsd_blocks " + std::to_string(cp.psd_blocks.size()) +
             "\nsdpa_blocks " + std::to_string(cp.psd_blocks.size() + (cp.free_var_count > 0 ? 1 : 0)) +
             "\nfree_vars " + std::to_string(cp.free_var_count) + "\nmax_side " + std::to_string(sz.max_side) +
             "\nfits_internal " + (sz.fits_internal() ? "yes" : "no") + "\n" + m.to_text());
  return exit_code::kOk;
}

// plot ---------------------------------------------------------------------

int cmd_plot(const std::vector<std::string>& csvs, const std::string& config_path, const Common& c) {
  RunManifest m;
  m.command = "plot";
  m.config_path = config_path;
  m.seed = c.seed;
  std::vector<Trace> traces;
  EnvironmentConfig cfg;
  try {
    if (csvs.empty()) throw std::invalid_argument("no trace given");
    std::string digest_input;
    for (const auto& p : csvs) {
      const std::string text = read_file(p);
      digest_input += text;
      traces.push_back(Trace::from_csv(text));
      if (traces.back().rows.empty()) throw std::invalid_argument(p + ": trace has no rows");
    }
    if (!config_path.empty()) {
      const std::string text = read_file(config_path);
      digest_input += text;
      cfg = parse_config(text);
    }
    m.input_digest = fnv1a_hex(digest_input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
  const std::string out = c.out.empty() ? "plot.svg" : c.out;
  m.outputs = {out};
  try {
    write_file(out, render_svg(traces, cfg, m.hash()));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
  say(c, "wrote " + out);
  return exit_code::kOk;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunManifest::hash() const {
  std::string s = command + '\n' + config_path + '\n' + input_digest + '\n' + std::to_string(seed) + '\n' + version;
  for (const auto& o : outputs) s += '\n' + o;
  return fnv1a_hex(s);
}

std::string RunManifest::to_text() const {
  std::ostringstream os;
  os << "manifest.hash = " << hash() << "\n";
  os << "manifest.command = " << command << "\n";
  os << "manifest.input = " << config_path << "\n";
  os << "manifest.input_digest = " << input_digest << "\n";
  for (const auto& o : outputs) os << "manifest.output = " << o << "\n";
  os << "manifest.seed = " << seed << "\n";
  os << "manifest.version = " << version << "\n";
  for (const auto& [k, v] : timings) os << "manifest.time." << k << " = " << g(v) << "\n";
  return os.str();
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"evadesos: density-function certificates for reach-avoid pursuit-evasion"};
  app.require_subcommand(1);
  Common c;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "sampling seed");
    sub->add_option("--out", c.out, "output file");
    sub->add_flag("--quiet", c.quiet, "suppress stdout");
  };

  std::string input;
  std::size_t samples = 10000;
  bool verbose = false;
  auto* syn = app.add_subcommand("synthesize", "solve the certificate program and verify the result");
  syn->add_option("config", input, "config file")->required();
  syn->add_option("--samples", samples, "verification samples per condition");
  syn->add_flag("--verbose", verbose, "print solver iterations");
  common(syn);

  auto* ver = app.add_subcommand("verify", "sample-based audit of a certificate");
  ver->add_option("certificate", input, "certificate file")->required();
  ver->add_option("--samples", samples, "samples per condition");
  common(ver);

  std::string strategy = "tail-chasing", x0;
  double dt = 0.1, tmax = 2000.0;
  auto* sim = app.add_subcommand("simulate", "closed-loop run under the certificate controller");
  sim->add_option("certificate", input, "certificate file")->required();
  sim->add_option("--strategy", strategy, "tail-chasing | go-to-middle | box-saturating");
  sim->add_option("--x0", x0, "x1,x2,x3,x4 or 'random' (default: initial ball centres)");
  sim->add_option("--dt", dt, "time step");
  sim->add_option("--tmax", tmax, "horizon");
  common(sim);

  auto* exp = app.add_subcommand("export", "write the program in SDPA sparse format");
  exp->add_option("config", input, "config file")->required();
  common(exp);

  std::vector<std::string> csvs;
  std::string plot_cfg;
  auto* plt = app.add_subcommand("plot", "render traces to SVG");
  plt->add_option("traces", csvs, "trace CSV files")->required();
  plt->add_option("--config", plot_cfg, "config for the arena geometry (default: built-in)");
  common(plt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code::kError;
  }
  if (*syn) return cmd_synthesize(input, c, samples, verbose);
  if (*ver) return cmd_verify(input, c, samples);
  if (*sim) return cmd_simulate(input, c, strategy, x0, dt, tmax);
  if (*exp) return cmd_export(input, c);
  if (*plt) return cmd_plot(csvs, plot_cfg, c);
  return exit_code::kError;
}

}  // namespace evadesos
