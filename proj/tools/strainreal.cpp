#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "strainreal/casebook.hpp"
#include "strainreal/characteristics.hpp"
#include "strainreal/errors.hpp"
#include "strainreal/expr.hpp"
#include "strainreal/fields.hpp"
#include "strainreal/grid.hpp"
#include "strainreal/laminate.hpp"
#include "strainreal/local_realizer.hpp"
#include "strainreal/residual.hpp"
#include "strainreal/truncation.hpp"
#include "strainreal/wave_global.hpp"
#include "strainreal/wave_solver.hpp"

using namespace strainreal;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitUsage = 64;

/// Exit 1 from a subcommand that ran to completion but found failures.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json report_json(const ResidualReport& r) {
  return {{"max_abs", number(r.max_abs)}, {"l2", number(r.l2)}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// A constant given as an expression, e.g. "1/64" or "pi/4".
double constant(const std::string& text) {
  const Expr e = parse_expression(text);
  if (e.depends_on(Var::X) || e.depends_on(Var::Y)) {
    throw ParseError("expected a constant, got '" + text + "'", 0);
  }
  return e.eval(0.0, 0.0);
}

std::vector<double> constants(const std::string& text, char sep, std::size_t count,
                              const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(constant(item));
  if (out.size() != count) {
    throw ParseError(what + " needs " + std::to_string(count) + " values, got '" + text + "'", 0);
  }
  return out;
}

Mat2 matrix(const std::string& text, const std::string& what) {
  const auto v = constants(text, ',', 4, what);
  return {v[0], v[1], v[2], v[3]};
}

json matrix_json(const Mat2& m) { return {m.m11, m.m12, m.m21, m.m22}; }

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : ",") + config_value(e);
    return s;
  }
  throw ParseError("unsupported config value " + v.dump(), 0);
}

/// Appends "--key value" for every config entry whose flag is absent.
void merge_config(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file " + path, 0);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config file: ") + e.what(), e.byte);
  }
  if (!cfg.is_object()) throw ParseError("config file must hold a JSON object", 0);
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    args.push_back(flag);
    args.push_back(config_value(value));
  }
}

void echo_options(const CLI::App* app, json& out) {
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    out[name] = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
  }
}

struct Context {
  fs::path out;
  std::uint64_t seed = 0;
  json report = json::object();
};

// ---- fields ---------------------------------------------------------------

struct FieldsArgs {
  std::string stream;
  std::string radius = "1";
  int n = 65;
};

void run_fields(Context& ctx, const FieldsArgs& a) {
  const Expr u = parse_expression(a.stream);
  const VelocityField U = stream_to_velocity(u);
  const StrainField e = strain_of(U);
  const Grid2D g = Grid2D::square(constant(a.radius), a.n);
  const GridField e11 = sample(e.e11, g), e12 = sample(e.e12, g);
  GridField norm = e11;
  for (std::size_t k = 0; k < norm.v.size(); ++k) norm.v[k] = std::hypot(e11.v[k], e12.v[k]);
  GridField minus = e11;
  for (double& v : minus.v) v = -v;
  write_csv_matrix((ctx.out / "strain.csv").string(), e11, e12, e12, minus);
  write_csv((ctx.out / "stream.csv").string(), sample(u, g));
  write_gnuplot((ctx.out / "e11.dat").string(), e11);
  write_gnuplot((ctx.out / "e12.dat").string(), e12);
  const ResidualReport div = summarize(sample(divergence(U), g));
  ctx.report["divergence"] = report_json(div);
  ctx.report["curl_sup"] = number(summarize(sample(curl(U), g)).max_abs);
  ctx.report["strain_norm_min"] = number(norm.min());
  ctx.report["strain_norm_max"] = number(norm.max());
  ctx.report["max_residual"] = number(div.max_abs);
}

// ---- realize local --------------------------------------------------------

struct LocalArgs {
  std::string stream;
  std::string center = "0,0";
  std::string tau_max = "1";
  int nx = 257;
};

void run_local(Context& ctx, const LocalArgs& a) {
  const auto c = constants(a.center, ',', 2, "--center");
  LocalOptions opt;
  opt.tau_cap = constant(a.tau_max);
  opt.nx = a.nx;
  const LocalRealization real = assemble_local_realization(parse_expression(a.stream), c[0], c[1], opt);
  const LocalVerification ver = verify_local(real);
  write_csv((ctx.out / "mu.csv").string(), real.mu);
  write_csv((ctx.out / "p.csv").string(), real.p);
  write_gnuplot((ctx.out / "mu.dat").string(), real.mu);
  write_gnuplot((ctx.out / "p.dat").string(), real.p);
  json& r = ctx.report;
  r["tau"] = real.tau;
  r["tau_max"] = real.tau_max;
  r["h"] = real.h;
  r["picard_iters"] = real.picard_iterations;
  r["rotated"] = real.orientation.rotated;
  r["flipped"] = real.orientation.flipped;
  r["max_residual"] = number(ver.max_residual());
  r["curl_div_residual"] = report_json(ver.curl_div);
  r["orthogonality_residual"] = number(ver.orthogonality.max_abs);
  r["wave_residual"] = number(ver.wave.max_abs);
  r["interface_jump"] = number(ver.interface_jump());
  r["mu_min"] = number(real.mu.min());
  r["mu_max"] = number(real.mu.max());
}

// ---- realize global -------------------------------------------------------

struct GlobalArgs {
  std::string stream;
  std::string average;
  std::string radius = "1";
  std::string h = "1/64";
  int n = -1;
  std::string epsilon_scale = "1";
};

void run_global(Context& ctx, const GlobalArgs& a) {
  VelocityField U = stream_to_velocity(parse_expression(a.stream));
  U.average = matrix(a.average, "--average");
  GlobalOptions opt;
  opt.radius = constant(a.radius);
  opt.h = constant(a.h);
  opt.n = a.n;
  opt.epsilon_scale = constant(a.epsilon_scale);
  const GlobalRealization g = realize_global(U, opt);
  write_csv((ctx.out / "mu.csv").string(), g.mu);
  write_csv((ctx.out / "u.csv").string(), g.u);
  write_gnuplot((ctx.out / "mu.dat").string(), g.mu);
  json& r = ctx.report;
  r["n_R"] = g.n_R;
  r["n"] = g.n;
  r["blowup"] = g.blowup;
  r["lifespan"] = number(g.lifespan);
  r["established"] = g.established();
  r["max_residual"] = g.blowup ? json(nullptr) : number(g.residual.max_abs);
  r["residual_l2"] = g.blowup ? json(nullptr) : number(g.residual.l2);
  r["jacobian_min"] = number(g.jacobian_min);
  r["unmapped_nodes"] = g.unmapped_nodes;
  r["slow_decay"] = g.slow_decay;
  r["t_half"] = g.t_half;
  r["z_half"] = g.z_half;
  r["rotated"] = g.coeffs.rotated;
  r["flipped"] = g.coeffs.flipped;
  r["a_min"] = g.coeffs.a_min;
  r["a_max"] = g.coeffs.a_max;
}

// ---- wave sweep -----------------------------------------------------------

struct SweepArgs {
  std::string amplitudes;
  std::string dz = "1/32";
  std::string t_max = "2";
  std::string z_half = "4";
  std::string beta0 = "1";
};

void run_sweep(Context& ctx, const SweepArgs& a) {
  const auto v = constants(a.amplitudes, ':', 3, "--amplitudes");
  const int steps = static_cast<int>(v[2]);
  if (v[2] != steps || steps < 1) throw ParseError("--amplitudes step count must be a positive integer", 0);
  WaveOptions opt;
  opt.dz = constant(a.dz);
  opt.t_max = constant(a.t_max);
  opt.z_half = constant(a.z_half);
  opt.backward = false;
  const SweepResult s = amplitude_sweep(v[0], v[1], steps, opt, constant(a.beta0));
  std::ofstream out(ctx.out / "lifespan.csv", std::ios::binary);
  out << "amplitude,blowup,lifespan\n";
  json points = json::array();
  for (const SweepPoint& p : s.points) {
    out << format_double(p.amplitude) << ',' << (p.blowup ? 1 : 0) << ',' << format_double(p.lifespan)
        << '\n';
    points.push_back({{"amplitude", p.amplitude}, {"blowup", p.blowup}, {"lifespan", number(p.lifespan)}});
  }
  ctx.report["points"] = points;
  ctx.report["threshold"] = s.threshold ? json(*s.threshold) : json(nullptr);
  ctx.report["max_residual"] = nullptr;
}

// ---- laminate check -------------------------------------------------------

struct LaminateArgs {
  std::string E1, E2;
  std::string xi = "1,0";
};

int run_laminate(Context& ctx, const LaminateArgs& a) {
  const Mat2 E1 = matrix(a.E1, "--E1"), E2 = matrix(a.E2, "--E2");
  const auto x = constants(a.xi, ',', 2, "--xi");
  const double len = std::hypot(x[0], x[1]);
  if (!(len > 0.0)) throw HypothesisError("laminate direction xi must be nonzero");
  const Vec2 xi{x[0] / len, x[1] / len};
  json& r = ctx.report;
  r["xi"] = {xi[0], xi[1]};
  r["E1"] = matrix_json(E1);
  r["E2"] = matrix_json(E2);
  const Mat2 K = laminate_direction(xi);
  const Mat2 jump{E1.m11 - E2.m11, E1.m12 - E2.m12, E1.m21 - E2.m21, E1.m22 - E2.m22};
  const double proj = frobenius(jump, K) / K.frobenius2();
  const Mat2 off{jump.m11 - proj * K.m11, jump.m12 - proj * K.m12, jump.m21 - proj * K.m21,
                 jump.m22 - proj * K.m22};
  r["compatibility_residual"] = std::sqrt(off.frobenius2());
  LaminateField field;
  try {
    field = make_laminate(E1, E2, xi);
  } catch (const HypothesisError& e) {
    r["compatible"] = false;
    r["max_residual"] = std::sqrt(off.frobenius2());
    throw;
  }
  r["compatible"] = true;
  r["lambda"] = field.lambda;
  const bool ok = is_realizable(E1, E2);
  r["realizable"] = ok;
  r["sign_test"] = sign_test(E1, E2, xi);
  r["brute_force"] = brute_force_realizable(E1, E2, xi);
  r["E1_normal_shear"] = normal_shear(E1, xi);
  r["E2_normal_shear"] = normal_shear(E2, xi);
  if (ok) {
    const LaminateRealization real = realize_laminate(E1, E2, xi);
    r["mu_ratio"] = real.mu_ratio;
    r["mu1"] = real.mu1;
    r["mu2"] = real.mu2;
    r["pressure_jump"] = real.pressure_jump;
    r["max_residual"] = std::abs(real.cross_residual);
  } else {
    r["mu_ratio"] = nullptr;
    r["mu1"] = nullptr;
    r["mu2"] = nullptr;
    r["pressure_jump"] = nullptr;
    r["max_residual"] = 0.0;
  }
  return 0;
}

// ---- casebook -------------------------------------------------------------

struct CounterexampleArgs {
  std::string epsilon = "0.1";
  std::string r = "1/4";
  std::string mu = "1";
  std::string u = "2*pi*x";
};

void run_counterexample(Context& ctx, const CounterexampleArgs& a) {
  const double eps = constant(a.epsilon);
  const Expr u = parse_expression(a.u);
  json& r = ctx.report;
  r["obstruction"] = torus_obstruction(parse_expression(a.mu), eps, constant(a.r));
  const WaveResidualPair pair = printed_wave_residual(u, eps, Grid2D::square(1.0, 65));
  r["printed_residual"] = report_json(pair.printed_report);
  r["general_residual"] = report_json(pair.general_report);
  const SignAudit audit = sign_convention_audit(u, eps);
  json levels = json::array();
  for (std::size_t k = 0; k < audit.nodes.size(); ++k) {
    levels.push_back({{"nodes", audit.nodes[k]},
                      {"direct_fd_sup", number(audit.direct_fd_sup[k])},
                      {"consistency", number(audit.consistency[k])}});
  }
  r["audit"] = {{"printed_sup", number(audit.printed_sup)},
                {"general_sup", number(audit.general_sup)},
                {"direct_symbolic_sup", number(audit.direct_symbolic_sup)},
                {"levels", levels},
                {"consistency_order", number(audit.consistency_order)}};
  r["max_residual"] = number(audit.consistency.back());
}

struct VanishingArgs {
  std::string f, g;
};

void run_vanishing(Context& ctx, const VanishingArgs& a) {
  const VanishingVerdict v = vanishing_viscosity(parse_expression(a.f), parse_expression(a.g));
  json& r = ctx.report;
  r["verdict"] = v.verdict;
  r["verdict_kind"] = "numerical";
  r["reason"] = v.reason;
  r["realizable"] = v.realizable();
  r["exponents"] = {number(v.fit_f.exponent), number(v.fit_g.exponent)};
  r["coefficients"] = {number(v.fit_f.coefficient), number(v.fit_g.coefficient)};
  r["fit_misfit"] = {number(v.fit_f.misfit), number(v.fit_g.misfit)};
  if (v.mu) {
    r["mu"] = v.mu->to_string();
    r["mu_origin"] = number(v.mu_origin);
    r["residual"] = number(v.residual);
    r["divergence_error"] = number(v.divergence_error);
    r["origin_error"] = number(v.origin_error);
    r["max_residual"] = number(std::max(v.residual, v.divergence_error));
  } else {
    r["mu"] = nullptr;
    r["residual"] = nullptr;
    r["max_residual"] = nullptr;
  }
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
  int pairs = 1000;
};

void run_verify(Context& ctx, const VerifyArgs& a) {
  std::mt19937_64 rng(ctx.seed);
  json checks = json::object();
  bool all = true;

  int agree = 0, realizable = 0;
  for (int k = 0; k < a.pairs; ++k) {
    const LaminateField f = random_compatible_pair(rng);
    const bool crit = is_realizable(f.E1, f.E2);
    realizable += crit;
    agree += crit == sign_test(f.E1, f.E2, f.xi) && crit == brute_force_realizable(f.E1, f.E2, f.xi);
  }
  checks["laminate"] = {{"pairs", a.pairs}, {"agree", agree}, {"realizable", realizable},
                        {"pass", agree == a.pairs}};
  all = all && agree == a.pairs;

  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  const Expr speed = parse_expression("0.3*sin(x + 2*y) - 1 + 0.2*y^2");
  const JetField jet = [&speed](double x, double y) { return speed.jet(x, y); };
  double anchor_err = 0.0, formula_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double x = unit(rng), y = unit(rng);
    const CharacteristicPath p = trace_characteristic(jet, x, y, 0.0, 1.0 / 128);
    const auto ex = exponential_sensitivity(p, jet);
    anchor_err = std::max(anchor_err, std::abs(p.dy_dy.front() - 1.0));
    for (std::size_t i = 0; i < ex.size(); ++i) formula_err = std::max(formula_err, std::abs(ex[i] - p.dy_dy[i]));
  }
  const bool char_ok = anchor_err <= 1e-12 && formula_err <= 1e-6;
  checks["characteristics"] = {{"anchors", 100}, {"anchor_error", anchor_err},
                               {"formula_error", formula_err}, {"pass", char_ok}};
  all = all && char_ok;

  const PeriodicTruncation tr(parse_expression("cos(2*pi*x)*sin(2*pi*y)"));
  const Expr f = parse_expression("cos(2*pi*x)*sin(2*pi*y)");
  const int n = PeriodicTruncation::smallest_n_for_disk(1.0);
  double trunc_err = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double r = std::sqrt(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    const double t = std::uniform_real_distribution<double>(0.0, 2 * M_PI)(rng);
    const double x = r * std::cos(t), y = r * std::sin(t);
    trunc_err = std::max(trunc_err, std::abs(tr.truncated(x, y, n) - f.eval(x, y)));
  }
  const bool trunc_ok = trunc_err <= 1e-10;
  checks["truncation"] = {{"points", 200}, {"n", n}, {"error", trunc_err}, {"pass", trunc_ok}};
  all = all && trunc_ok;

  json verify = {{"seed", ctx.seed}, {"checks", checks}, {"pass", all}};
  write_json(ctx.out / "verify.json", verify);
  ctx.report["pass"] = all;
  ctx.report["checks"] = checks;
  ctx.report["max_residual"] = std::max({anchor_err, formula_err, trunc_err});
  if (!all) throw CheckFailure("verify: at least one randomized check failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isotropic realizability of planar strain fields"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  std::string out_dir = "out";
  std::string config_path;
  std::uint64_t seed = 20240611;
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--config", config_path, "JSON file whose keys name flags");
  app.add_option("--seed", seed, "Seed for randomized suites")->capture_default_str();

  FieldsArgs fa;
  CLI::App* fields = app.add_subcommand("fields", "Sample a stream function and its strain");
  fields->fallthrough();
  fields->add_option("--stream", fa.stream, "Stream function u(x, y)")->required();
  fields->add_option("--radius", fa.radius, "Half width of the sample square");
  fields->add_option("--n", fa.n, "Nodes per axis")->check(CLI::Range(2, 100000));

  CLI::App* realize = app.add_subcommand("realize", "Construct a viscosity");
  realize->fallthrough();
  realize->require_subcommand(1);
  LocalArgs la;
  CLI::App* local = realize->add_subcommand("local", "Local realization near a point");
  local->fallthrough();
  local->add_option("--stream", la.stream, "Stream function u(x, y)")->required();
  local->add_option("--center", la.center, "Center x,y");
  local->add_option("--tau-max", la.tau_max, "Cap on the half width tau");
  local->add_option("--nx", la.nx, "Nodes on the data line")->check(CLI::Range(9, 100001));
  GlobalArgs ga;
  CLI::App* global = realize->add_subcommand("global", "Realization of a periodic perturbation on a disk");
  global->fallthrough();
  global->set_help_flag("--help", "Print this help message and exit");
  global->add_option("--stream", ga.stream, "Stream function of U = MX + periodic")->required();
  global->add_option("--average", ga.average, "m11,m12,m21,m22")->required();
  global->add_option("--radius", ga.radius, "Disk radius");
  global->add_option("--h", ga.h, "Grid step");
  global->add_option("--n", ga.n, "Truncation order (-1: smallest valid)");
  global->add_option("--epsilon-scale", ga.epsilon_scale, "Scale of the periodic part");

  CLI::App* wave = app.add_subcommand("wave", "Canonical wave equation experiments");
  wave->fallthrough();
  wave->require_subcommand(1);
  SweepArgs sa;
  CLI::App* sweep = wave->add_subcommand("sweep", "Lifespan against forcing amplitude");
  sweep->fallthrough();
  sweep->add_option("--amplitudes", sa.amplitudes, "a0:a1:steps")->required();
  sweep->add_option("--dz", sa.dz, "Grid step in z");
  sweep->add_option("--t-max", sa.t_max, "Final time");
  sweep->add_option("--z-half", sa.z_half, "Half width in z");
  sweep->add_option("--beta0", sa.beta0, "Quadratic coefficient scale");

  CLI::App* laminate = app.add_subcommand("laminate", "Rank-one laminates");
  laminate->fallthrough();
  laminate->require_subcommand(1);
  LaminateArgs ma;
  CLI::App* check = laminate->add_subcommand("check", "Decide realizability of a laminate");
  check->fallthrough();
  check->add_option("--E1", ma.E1, "Phase 1 strain a,b,c,d")->required();
  check->add_option("--E2", ma.E2, "Phase 2 strain a,b,c,d")->required();
  check->add_option("--xi", ma.xi, "Lamination normal x,y");

  CLI::App* casebook = app.add_subcommand("casebook", "Worked cases");
  casebook->fallthrough();
  casebook->require_subcommand(1);
  CounterexampleArgs ca;
  CLI::App* counter = casebook->add_subcommand("counterexample", "Torus obstruction and wave residuals");
  counter->fallthrough();
  counter->add_option("--epsilon", ca.epsilon, "Perturbation size");
  counter->add_option("--r", ca.r, "Strip offset");
  counter->add_option("--mu", ca.mu, "Candidate viscosity");
  counter->add_option("--u", ca.u, "Candidate log-viscosity for the wave residuals");
  VanishingArgs va;
  CLI::App* vanishing = casebook->add_subcommand("vanishing", "Separated field with vanishing strain");
  vanishing->fallthrough();
  vanishing->add_option("--f", va.f, "f(x)")->required();
  vanishing->add_option("--g", va.g, "g(y)")->required();

  VerifyArgs ya;
  CLI::App* verify = app.add_subcommand("verify", "Seeded randomized self-check");
  verify->fallthrough();
  verify->add_option("--pairs", ya.pairs, "Random laminate pairs")->check(CLI::Range(1, 10000000));

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    merge_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  Context ctx;
  ctx.out = out_dir;
  ctx.seed = seed;
  json echo = json::object();
  echo_options(&app, echo);
  std::string command;
  for (const CLI::App* sub = &app; !sub->get_subcommands().empty();) {
    sub = sub->get_subcommands().front();
    command += (command.empty() ? "" : " ") + sub->get_name();
    echo_options(sub, echo);
  }
  echo["command"] = command;
  echo["version"] = kVersion;

  int code = 0;
  const auto start = std::chrono::steady_clock::now();
  try {
    fs::create_directories(ctx.out);
    write_json(ctx.out / "config.echo.json", echo);
    if (fields->parsed()) run_fields(ctx, fa);
    if (local->parsed()) run_local(ctx, la);
    if (global->parsed()) run_global(ctx, ga);
    if (sweep->parsed()) run_sweep(ctx, sa);
    if (check->parsed()) run_laminate(ctx, ma);
    if (counter->parsed()) run_counterexample(ctx, ca);
    if (vanishing->parsed()) run_vanishing(ctx, va);
    if (verify->parsed()) run_verify(ctx, ya);
    ctx.report["status"] = "ok";
  } catch (const ParseError& e) {
    code = kExitUsage;
    ctx.report["status"] = "usage";
    ctx.report["error"] = e.what();
  } catch (const HypothesisError& e) {
    code = 2;
    ctx.report["status"] = "hypothesis";
    ctx.report["error"] = e.what();
  } catch (const NumericalError& e) {
    code = 1;
    ctx.report["status"] = "numerical";
    ctx.report["error"] = e.what();
  } catch (const CheckFailure& e) {
    code = 1;
    ctx.report["status"] = "failed";
    ctx.report["error"] = e.what();
  } catch (const std::exception& e) {
    code = 1;
    ctx.report["status"] = "internal";
    ctx.report["error"] = e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (code != 0) std::cerr << "error: " << ctx.report["error"].get<std::string>() << '\n';

  ctx.report["command"] = command;
  ctx.report["version"] = kVersion;
  ctx.report["exit_code"] = code;
  if (!ctx.report.contains("max_residual")) ctx.report["max_residual"] = nullptr;
  try {
    fs::create_directories(ctx.out);
    write_json(ctx.out / "report.json", ctx.report);
    std::ofstream log(ctx.out / "run.log");
    log << "command: " << command << "\nexit_code: " << code << "\nseconds: " << seconds << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout << ctx.report.dump(2) << '\n';
  return code;
}
