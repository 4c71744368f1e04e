#include "spike/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "spike/branch_explorer.hpp"
#include "spike/error.hpp"
#include "spike/ground_state.hpp"
#include "spike/kernels/dispatch.hpp"
#include "spike/limit_profile.hpp"
#include "spike/shooting.hpp"
#include "spike/spectral.hpp"

namespace spike {

using nlohmann::json;

const char* to_string(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Scan: return "scan";
    case Command::Branches: return "branches";
    case Command::Ground: return "ground";
    case Command::Eigen: return "eigen";
    case Command::Verify: return "verify";
    case Command::Limit: return "limit";
  }
  return "unknown";
}

const char* to_string(Format f) {
  switch (f) {
    case Format::Csv: return "csv";
    case Format::Json: return "json";
    case Format::Svg: return "svg";
  }
  return "unknown";
}

double RunConfig::eps() const {
  if (epsilon) return *epsilon;
  if (lambda) return 1.0 / std::sqrt(-*lambda);
  throw Error(ErrorCode::Usage, std::string(to_string(command)) + ": one of --lambda or --epsilon is required");
}

// ---------------------------------------------------------------- emitters

namespace {

std::string fmt17(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string fmt_fixed(double v, int digits) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, r.ptr);
}

}  // namespace

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  f << content;
  f.close();
  if (!f) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

std::string csv_string(const Trajectory& traj) {
  std::string s = "theta,u,du\n";
  for (const State& n : traj.nodes()) {
    s += fmt17(n.theta);
    s += ',';
    s += fmt17(n.u);
    s += ',';
    s += fmt17(n.du);
    s += '\n';
  }
  return s;
}

std::vector<State> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "theta,u,du") {
    throw Error(ErrorCode::Io, "csv: missing 'theta,u,du' header");
  }
  std::vector<State> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    State s;
    double* fields[3] = {&s.theta, &s.u, &s.du};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 3; ++i) {
      const auto r = std::from_chars(p, end, *fields[i]);
      if (r.ec != std::errc()) throw Error(ErrorCode::Io, "csv: bad number in '" + line + "'");
      p = r.ptr;
      if (i < 2) {
        if (p == end || *p != ',') throw Error(ErrorCode::Io, "csv: expected ',' in '" + line + "'");
        ++p;
      }
    }
    if (p != end) throw Error(ErrorCode::Io, "csv: trailing characters in '" + line + "'");
    out.push_back(s);
  }
  return out;
}

void emit_csv(const Trajectory& traj, const std::string& path) { write_file(path, csv_string(traj)); }

std::string svg_string(const Trajectory& traj, const SvgOptions& opt) {
  if (traj.empty()) throw Error(ErrorCode::Domain, "svg: empty trajectory");
  const double t0 = traj.theta_begin();
  const double t1 = traj.theta_end();
  std::vector<std::pair<double, double>> pts;
  for (const State& n : traj.nodes()) pts.emplace_back(n.theta, n.u);
  if (t1 > t0) {
    for (int i = 0; i <= opt.samples; ++i) {
      const double th = t0 + (t1 - t0) * static_cast<double>(i) / opt.samples;
      pts.emplace_back(th, traj.u(th));
    }
  }
  std::sort(pts.begin(), pts.end());
  double umax = 0.0, umin = 0.0;
  for (const auto& [th, u] : pts) {
    umax = std::max(umax, u);
    umin = std::min(umin, u);
  }
  const double ytop = umax > 0.0 ? umax * 1.1 : 1.0;
  const double ybot = umin;

  const int W = opt.width, H = opt.height;
  const double ml = 60, mr = 20, mt = 30, mb = 45;
  const double pw = W - ml - mr, ph = H - mt - mb;
  auto X = [&](double th) { return ml + pw * th / kHalfPi; };
  auto Y = [&](double u) { return mt + ph * (ytop - u) / (ytop - ybot); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) + "\" height=\"" +
       std::to_string(H) + "\" viewBox=\"0 0 " + std::to_string(W) + " " + std::to_string(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    s += "<text x=\"" + fmt_fixed(ml + pw / 2, 1) + "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
         opt.title + "</text>\n";
  }
  // Axes.
  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + fmt_fixed(ml, 1) + "\" y1=\"" + fmt_fixed(Y(ybot), 1) + "\" x2=\"" + fmt_fixed(ml + pw, 1) +
       "\" y2=\"" + fmt_fixed(Y(ybot), 1) + "\"/>\n";
  s += "<line x1=\"" + fmt_fixed(ml, 1) + "\" y1=\"" + fmt_fixed(mt, 1) + "\" x2=\"" + fmt_fixed(ml, 1) + "\" y2=\"" +
       fmt_fixed(mt + ph, 1) + "\"/>\n";
  s += "</g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">\n";
  const char* tick_labels[] = {"0", "\xCF\x80/8", "\xCF\x80/4", "3\xCF\x80/8", "\xCF\x80/2"};
  for (int i = 0; i <= 4; ++i) {
    const double x = X(kHalfPi * i / 4.0);
    s += "<line x1=\"" + fmt_fixed(x, 1) + "\" y1=\"" + fmt_fixed(Y(ybot), 1) + "\" x2=\"" + fmt_fixed(x, 1) +
         "\" y2=\"" + fmt_fixed(Y(ybot) + 4, 1) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt_fixed(x, 1) + "\" y=\"" + fmt_fixed(Y(ybot) + 17, 1) + "\">" + tick_labels[i] + "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double u = ybot + (ytop - ybot) * i / 4.0;
    s += "<text x=\"" + fmt_fixed(ml - 6, 1) + "\" y=\"" + fmt_fixed(Y(u) + 4, 1) + "\" text-anchor=\"end\">" +
         fmt_fixed(u, 2) + "</text>\n";
  }
  s += "<text x=\"" + fmt_fixed(ml + pw / 2, 1) + "\" y=\"" + fmt_fixed(H - 8.0, 1) + "\">\xCE\xB8</text>\n";
  s += "<text x=\"16\" y=\"" + fmt_fixed(mt + ph / 2, 1) + "\">u</text>\n";
  s += "</g>\n";
  s += "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ' ';
    s += fmt_fixed(X(pts[i].first), 2) + "," + fmt_fixed(Y(pts[i].second), 2);
  }
  s += "\"/>\n</svg>\n";
  return s;
}

void emit_svg(const Trajectory& traj, const std::string& path, const SvgOptions& opt) {
  const std::string content = svg_string(traj, opt);
  write_file(path, content);
}

// ---------------------------------------------------------------- dispatch

namespace {

json tolerances_json(const Tolerances& t) {
  return {{"rel_tol", t.rel_tol}, {"abs_tol", t.abs_tol}, {"event_tol", t.event_tol},
          {"theta0", t.theta0}, {"end_guard", t.end_guard}};
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
  j["epsilon"] = c.epsilon ? json(*c.epsilon) : json(nullptr);
  j["alpha"] = c.alpha;
  j["theta1"] = c.theta1 ? json(*c.theta1) : json(nullptr);
  j["k"] = c.k;
  j["n"] = c.n;
  j["grid"] = c.grid;
  j["out"] = c.out;
  j["format"] = to_string(c.format);
  return j;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

Params params_of(const RunConfig& c) {
  return c.lambda ? Params::from_lambda(c.alpha, *c.lambda) : Params::from_epsilon(c.alpha, c.eps());
}

json profile_json(const ShootProfile& p) {
  json cps = json::array();
  for (const CriticalPoint& c : p.criticals) {
    cps.push_back({{"index", c.index}, {"tau", c.tau}, {"value", c.value}, {"kind", to_string(c.kind)}});
  }
  json j{{"alpha", p.params.alpha()},
         {"lambda", p.params.lambda()},
         {"epsilon", p.params.epsilon()},
         {"theta_zero", opt_json(p.theta_zero)},
         {"spikes", p.spikes},
         {"terminal", to_string(p.trajectory.terminal_reason())},
         {"alternation_ok", p.alternation_ok},
         {"nodes", p.trajectory.nodes().size()},
         {"criticals", cps}};
  j["identity_residual"] = p.theta_zero ? json(ne1_residual(p)) : json(nullptr);
  return j;
}

json branch_json(const Branch& b) {
  return {{"k", b.k}, {"alpha_lo", b.alpha_lo}, {"alpha_hi", b.alpha_hi},
          {"first_member", b.first_member}, {"last_member", b.last_member},
          {"theta_min", b.theta_min}, {"alpha_at_min", b.alpha_at_min},
          {"members", b.members}, {"narrow", b.narrow}};
}

void require_trajectory_format(const RunConfig& c) {
  if (c.format != Format::Json) {
    throw Error(ErrorCode::Usage, std::string(to_string(c.command)) + ": only --format json is supported");
  }
}

void write_trajectory(const RunConfig& c, const Trajectory& t, const std::string& title) {
  if (c.out.empty()) return;
  if (c.format == Format::Csv) emit_csv(t, c.out);
  if (c.format == Format::Svg) emit_svg(t, c.out, {800, 480, title, 2000});
}

json run_solve(const RunConfig& c, bool&) {
  const Params p = params_of(c);
  const ShootProfile prof = classify(p, integrate_ivp(p, c.tol, true), c.tol.event_tol);
  std::ostringstream title;
  title << "lambda = " << p.lambda() << ", u(0) = " << p.alpha();
  write_trajectory(c, prof.trajectory, title.str());
  return profile_json(prof);
}

json run_scan(const RunConfig& c, bool&) {
  require_trajectory_format(c);
  ScanOptions opt;
  opt.tol = c.tol;
  const ThetaCurve curve = scan(c.eps(), AlphaGrid::uniform(c.grid), opt);
  json samples = json::array();
  for (const ThetaSample& s : curve.samples) {
    json e{{"alpha", s.alpha}, {"theta_zero", opt_json(s.theta_zero)}, {"spikes", s.spikes}};
    if (s.error) e["error"] = *s.error;
    samples.push_back(e);
  }
  json branches = json::array();
  for (const Branch& b : components(curve, opt)) branches.push_back(branch_json(b));
  return {{"epsilon", curve.epsilon}, {"samples", samples}, {"branches", branches}};
}

json run_branches(const RunConfig& c, bool&) {
  require_trajectory_format(c);
  ScanOptions opt;
  opt.tol = c.tol;
  const ThetaCurve curve = scan(c.eps(), AlphaGrid::mixed(c.grid), opt);
  const auto br = components(curve, opt);
  json branches = json::array();
  for (const Branch& b : br) branches.push_back(branch_json(b));
  json r{{"epsilon", c.eps()}, {"samples", curve.samples.size()}, {"branches", branches}};
  if (c.theta1) {
    json sols = json::array();
    try {
      for (const DirichletSolution& s : solve_dirichlet(br, c.eps(), *c.theta1, c.k, opt)) {
        sols.push_back({{"alpha", s.alpha}, {"theta1", s.theta1}, {"k", s.k}, {"residual", s.residual},
                        {"reshoot_residual", s.reshoot_residual}, {"reshoot_spikes", s.reshoot_spikes}});
      }
      r["dirichlet"] = sols;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotReachable) throw;
      r["dirichlet"] = {{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
    }
  }
  return r;
}

json run_ground(const RunConfig& c, bool&) {
  const GroundState gs = find_ground_state(c.lam(), c.k, c.tol);
  std::ostringstream title;
  title << "ground state lambda = " << gs.lambda << ", k = " << gs.k;
  write_trajectory(c, gs.full, title.str());
  return {{"lambda", gs.lambda}, {"n", gs.n}, {"k", gs.k}, {"alpha0", gs.alpha0},
          {"maxima", gs.maxima}, {"du_quarter", gs.du_quarter},
          {"symmetry_residual", gs.symmetry_residual}, {"other_roots", gs.other_roots}};
}

json run_eigen(const RunConfig& c, bool& ok) {
  require_trajectory_format(c);
  if (c.n < 0) throw Error(ErrorCode::Usage, "eigen: --n must be >= 0");
  const ExactCosPoly e = eigen_poly_exact(c.n);
  const CosPoly p = e.to_double();
  json exact = json::array();
  for (const Rational& r : e.coeffs) exact.push_back(r.str());
  bool residual_zero = true;
  for (const Rational& r : apply_operator_exact(e, Rational(4 * static_cast<long long>(lambda_n(c.n)))))
    residual_zero = residual_zero && r == 0;
  const Rational endpoint = eval_exact(e, Rational(-1));
  const bool endpoint_ok = endpoint == Rational(c.n % 2 ? -1 : 1);
  json r{{"n", c.n}, {"lambda_n", lambda_n(c.n)}, {"coeffs", p.coeffs}, {"coeffs_exact", exact},
         {"operator_residual_zero", residual_zero}, {"endpoint_exact", endpoint.str()},
         {"endpoint_ok", endpoint_ok}};
  ok = residual_zero && endpoint_ok;
  if (c.n >= 1) {
    const StructureCounts s = count_structure(lambda_n(c.n), c.tol);
    r["zeros"] = s.zeros;
    r["criticals"] = s.criticals;
    r["criticals_before_quarter"] = s.criticals_before_quarter;
    ok = ok && s.zeros == c.n && s.criticals == c.n - 1;
  }
  return r;
}

json run_verify(const RunConfig& c, bool& ok) {
  require_trajectory_format(c);
  ScanOptions opt;
  opt.tol = c.tol;
  const double th1 = c.theta1.value_or(kQuarterPi);
  const NonexistenceReport rep = verify_nonexistence(c.eps(), th1, AlphaGrid::uniform(c.grid), opt);
  ok = rep.pass;
  return {{"epsilon", rep.epsilon}, {"theta1", rep.theta1}, {"samples", rep.samples},
          {"zeros", rep.zeros}, {"failures", rep.failures}, {"counterexamples", rep.counterexamples},
          {"earliest_zero", opt_json(rep.earliest_zero)},
          {"max_identity_residual", rep.max_identity_residual}, {"pass", rep.pass}};
}

json run_limit(const RunConfig& c, bool&) {
  require_trajectory_format(c);
  const double eps = c.eps();
  const double t_ref = c.theta1.value_or(1.0);
  const ShootProfile sp = spike_at(eps, t_ref, c.tol);
  const double u0 = sp.trajectory.u(t_ref);
  const EnergySplit es = energy_split(sp, t_ref);
  return {{"epsilon", eps}, {"t_ref", t_ref}, {"alpha", sp.params.alpha()},
          {"u0", u0}, {"u0_minus_sigma", u0 - kSigma},
          {"convergence_error_L3", convergence_error(sp, 3.0, t_ref)},
          {"theta_zero", opt_json(sp.theta_zero)},
          {"j1", es.j1}, {"j2", es.j2}, {"split_residual", es.residual()},
          {"barrier_phi0", barrier_value({0.0, 0.5, 1.0, eps})}};
}

}  // namespace

RunReport dispatch(const RunConfig& config) {
  config.tol.validate();
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  json result;
  switch (config.command) {
    case Command::Solve: result = run_solve(config, ok); break;
    case Command::Scan: result = run_scan(config, ok); break;
    case Command::Branches: result = run_branches(config, ok); break;
    case Command::Ground: result = run_ground(config, ok); break;
    case Command::Eigen: result = run_eigen(config, ok); break;
    case Command::Verify: result = run_verify(config, ok); break;
    case Command::Limit: result = run_limit(config, ok); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RunReport rep;
  rep.ok = ok;
  rep.json = {{"schema", 1},
              {"command", to_string(config.command)},
              {"config", config_json(config)},
              {"tolerances", tolerances_json(config.tol)},
              {"isa", kernels::to_string(kernels::active_isa())},
              {"result", result},
              {"ok", ok},
              {"wall_time_s", wall}};
  return rep;
}

// ---------------------------------------------------------------- parsing

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Shooting solver for u'' + 2 cot(2 theta) u' = lambda (u^5 - u) on (0, pi/2)", "spike_shooter"};
  app.require_subcommand(1);
  RunConfig cfg;
  double lambda = 0.0, epsilon = 0.0, theta1 = 0.0;
  std::string format = "json";

  struct Spec {
    Command cmd;
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {Command::Solve, "solve", "Single shot: first zero, critical points, spikes"},
      {Command::Scan, "scan", "Theta(alpha) on a uniform alpha grid at fixed eps"},
      {Command::Branches, "branches", "Spike-count components, theta_min and Dirichlet solutions"},
      {Command::Ground, "ground", "Symmetric positive solution with k maxima"},
      {Command::Eigen, "eigen", "Eigen-polynomial at lambda_n = -n(n+1)"},
      {Command::Verify, "verify", "No zero at or before theta1 <= pi/4 on an alpha grid"},
      {Command::Limit, "limit", "Rescaled spike versus the homoclinic profile"},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const Spec& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    auto* ol = sub->add_option("--lambda", lambda, "lambda < 0");
    auto* oe = sub->add_option("--epsilon", epsilon, "epsilon > 0, lambda = -1/epsilon^2");
    ol->excludes(oe);
    sub->add_option("--alpha", cfg.alpha, "initial value u(0)");
    sub->add_option("--theta1", theta1, "target radius (rad)");
    sub->add_option("--k", cfg.k, "spike / maxima count");
    sub->add_option("--n", cfg.n, "spectral index");
    sub->add_option("--grid", cfg.grid, "alpha grid size");
    sub->add_option("--out", cfg.out, "output path");
    sub->add_option("--format", format, "csv | json | svg")->check(CLI::IsMember({"csv", "json", "svg"}));
    sub->add_option("--rel-tol", cfg.tol.rel_tol, "relative tolerance");
    sub->add_option("--abs-tol", cfg.tol.abs_tol, "absolute tolerance");
    subs.emplace_back(sub, s.cmd);
  }
  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::Usage, e.what());
  }
  for (auto& [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    cfg.command = cmd;
    if (sub->count("--lambda")) cfg.lambda = lambda;
    if (sub->count("--epsilon")) cfg.epsilon = epsilon;
    if (sub->count("--theta1")) cfg.theta1 = theta1;
  }
  if (cfg.lambda && !(*cfg.lambda < 0.0)) throw Error(ErrorCode::Usage, "--lambda must be negative");
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw Error(ErrorCode::Usage, "--epsilon must be positive");
  cfg.format = format == "csv" ? Format::Csv : format == "svg" ? Format::Svg : Format::Json;
  if (cfg.format != Format::Json && cfg.out.empty()) {
    throw Error(ErrorCode::Usage, "--format csv/svg needs --out");
  }
  return cfg;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto fail = [&](const Error& e) {
    json j{{"schema", 1}, {"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
    out << j.dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Usage ? 2 : 1;
  };
  try {
    const auto cfg = parse_args(argc, argv, out);
    if (!cfg) return 0;
    const RunReport rep = dispatch(*cfg);
    if (cfg->format == Format::Json && !cfg->out.empty()) write_file(cfg->out, rep.json.dump(2) + "\n");
    out << rep.json.dump(2) << '\n';
    return rep.ok ? 0 : 3;
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(Error(ErrorCode::Domain, e.what()));
  }
}

}  // namespace spike
