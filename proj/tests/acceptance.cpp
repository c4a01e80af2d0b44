// One PASS/FAIL line per acceptance criterion. argv[1] is the CLI binary and
// argv[2] a scratch directory for the determinism check.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "strainreal/casebook.hpp"
#include "strainreal/characteristics.hpp"
#include "strainreal/expr.hpp"
#include "strainreal/fields.hpp"
#include "strainreal/laminate.hpp"
#include "strainreal/local_realizer.hpp"
#include "strainreal/residual.hpp"
#include "strainreal/truncation.hpp"
#include "strainreal/wave_global.hpp"
#include "strainreal/wave_solver.hpp"

using namespace strainreal;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kLocalTol = 1e-8;
constexpr double kLocalSeconds = 10.0;
constexpr double kOrderLo = 1.8;
constexpr double kOrderHi = 2.2;
constexpr double kAnchorTol = 1e-12;
constexpr double kFormulaTol = 1e-6;
constexpr double kReconstructTol = 1e-8;
constexpr double kDiskTol = 1e-10;
constexpr double kLinearTol = 1e-10;
constexpr double kNestTol = 1e-8;
constexpr int kPairs = 1000;
constexpr double kLaminateSeconds = 5.0;
constexpr double kObstructionTol = 1e-12;
constexpr double kPrintedTol = 1e-12;
constexpr double kDivergenceTol = 1e-10;
constexpr std::uint64_t kSeed = 20240611;

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, bool pass, const std::string& name, const std::string& detail) {
  std::printf("%s %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

bool in_order_band(double p) { return p >= kOrderLo && p <= kOrderHi; }

void guarded(int id, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, name, std::string("exception: ") + e.what());
  }
}

void local_worked_example() {
  const auto t0 = std::chrono::steady_clock::now();
  LocalOptions opt;
  opt.nx = 257;
  const LocalRealization r = assemble_local_realization(parse_expression("(x^2 - y^2)/2"), 0, 0, opt);
  const double elapsed = seconds_since(t0);
  double mu_err = 0.0, p_err = 0.0;
  const Grid2D& g = r.mu.grid;
  const int i0 = (g.nx - 1) / 2, j0 = (g.ny - 1) / 2;
  const double p0 = r.p(i0, j0);
  for (std::size_t k = 0; k < r.mu.v.size(); ++k) {
    mu_err = std::max(mu_err, std::abs(r.mu.v[k] - 1.0));
    p_err = std::max(p_err, std::abs(r.p.v[k] - p0));
  }
  report(1, mu_err <= kLocalTol && p_err <= kLocalTol && elapsed < kLocalSeconds,
         "local worked example",
         fmt("tau = %g, sup|mu - 1| = %.3g, sup|p - p(0,0)| = %.3g, %.2f s", r.tau, mu_err, p_err,
             elapsed));
}

void local_convergence() {
  const Expr u = parse_expression("(x^2 - y^2)/2 + 0.05*sin(x)*sin(y)");
  std::vector<double> hs, cd, orth;
  for (int nx : {129, 257, 513}) {
    LocalOptions opt;
    opt.nx = nx;
    const LocalRealization r = assemble_local_realization(u, 0, 0, opt);
    const LocalVerification v = verify_local(r);
    hs.push_back(r.h);
    cd.push_back(v.curl_div.max_abs);
    orth.push_back(v.orthogonality.max_abs);
  }
  const double p_cd = fitted_order(hs, cd), p_orth = fitted_order(hs, orth);
  report(2, in_order_band(p_cd) && in_order_band(p_orth), "local convergence",
         fmt("h = %g..%g, curl-div %.3g -> %.3g (order %.3f), orthogonality %.3g -> %.3g (order %.3f)",
             hs.front(), hs.back(), cd.front(), cd.back(), p_cd, orth.front(), orth.back(), p_orth));
}

void characteristic_identities() {
  const Expr speed = parse_expression("0.3*sin(x + 2*y) - 1 + 0.2*y^2");
  const JetField jet = [&speed](double x, double y) { return speed.jet(x, y); };
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  double anchor = 0.0, formula = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double x = d(rng), y = d(rng);
    const CharacteristicPath p = trace_characteristic(jet, x, y, 0.0, 1.0 / 128);
    const auto ex = exponential_sensitivity(p, jet);
    anchor = std::max(anchor, std::abs(p.dy_dy.front() - 1.0));
    for (std::size_t i = 0; i < ex.size(); ++i) formula = std::max(formula, std::abs(ex[i] - p.dy_dy[i]));
  }
  report(3, anchor <= kAnchorTol && formula <= kFormulaTol, "characteristic identities",
         fmt("100 anchors, max|dY/dy - 1| at anchor = %.3g, exponential formula error = %.3g", anchor,
             formula));
}

void truncation_lemma() {
  double recon = 0.0, disk = 0.0;
  for (const char* text : {"1", "cos(2*pi*x)", "sin(2*pi*y)", "cos(2*pi*x)*sin(2*pi*y)"}) {
    const Expr f = parse_expression(text);
    const PeriodicTruncation t(f);
    for (int j = 0; j <= 20; ++j) {
      for (int i = 0; i <= 20; ++i) {
        const double x = i / 20.0, y = j / 20.0;
        recon = std::max(recon, std::abs(t.truncated_direct(x, y, 2) - f.eval(x, y)));
      }
    }
    for (double R : {0.5, 1.0, 2.0}) {
      const int n = PeriodicTruncation::smallest_n_for_disk(R);
      for (int a = 0; a < 48; ++a) {
        for (int k = 0; k <= 8; ++k) {
          const double r = R * k / 8.0, th = 2 * M_PI * a / 48.0;
          const double x = r * std::cos(th), y = r * std::sin(th);
          disk = std::max(disk, std::abs(t.truncated(x, y, n) - f.eval(x, y)));
        }
      }
    }
  }
  report(4, recon <= kReconstructTol && disk <= kDiskTol, "truncation lemma",
         fmt("lattice reconstruction error on [0,1]^2 = %.3g, [f]_nR - f on disks R = 0.5, 1, 2 = %.3g",
             recon, disk));
}

double forcing(double t, double z) { return sweep_bump(t / 1.5) * sweep_bump(z / 1.2) * (1.0 + 0.3 * z); }

void wave_solver() {
  const WaveSolution zero = solve_wave([](double, double) { return CanonicalCoeffs{}; }, WaveOptions{});
  const CanonicalField lin = [](double t, double z) {
    CanonicalCoeffs c;
    c.h = forcing(t, z);
    return c;
  };
  std::vector<double> hs, errs;
  const double tq = 0.9 / 32 * 30;
  for (double dz : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    WaveOptions o;
    o.dz = dz;
    const WaveSolution s = solve_wave(lin, o);
    double err = 0.0;
    for (double z = -1.0; z <= 1.0; z += 0.25) {
      for (double t : {tq, -tq}) {
        const int i = static_cast<int>(std::lround((t - s.w.grid.x0) / s.k));
        const int j = static_cast<int>(std::lround((z - s.w.grid.y0) / s.dz));
        err = std::max(err, std::abs(s.w(i, j) - duhamel(forcing, t, z)));
      }
    }
    hs.push_back(dz);
    errs.push_back(err);
  }
  const double order = fitted_order(hs, errs);
  WaveOptions o;
  o.dz = 1.0 / 32;
  o.t_max = 2.0;
  o.z_half = 4.0;
  o.backward = false;
  const double step = 0.25;
  const SweepResult a = amplitude_sweep(3.0, 5.0, 9, o), b = amplitude_sweep(3.0, 5.0, 9, o);
  const bool finite = a.threshold && b.threshold && !a.points.front().blowup;
  const bool same = finite && std::abs(*a.threshold - *b.threshold) <= step;
  report(5, zero.w.max_abs() == 0.0 && in_order_band(order) && same, "wave solver",
         fmt("zero forcing sup|w| = %g, Duhamel error %.3g -> %.3g (order %.3f), threshold %g and %g "
             "(amplitude step %g)",
             zero.w.max_abs(), errs.front(), errs.back(), order, finite ? *a.threshold : NAN,
             finite ? *b.threshold : NAN, step));
}

VelocityField u_eps(double eps) {
  VelocityField U = stream_to_velocity(counterexample_stream(eps));
  U.average = Mat2{1, 0, 0, -1};
  return U;
}

void global_pipeline() {
  VelocityField lin = stream_to_velocity(parse_expression("(x^2 - y^2)/2"));
  lin.average = Mat2{0, 1, 1, 0};
  GlobalOptions lo;
  lo.h = 1.0 / 32;
  const GlobalRealization l = realize_global(lin, lo);
  const double lin_mu = std::max(std::abs(l.mu.max() - 1.0), std::abs(l.mu.min() - 1.0));
  const bool lin_ok = l.established() && lin_mu <= kLinearTol && l.residual.max_abs <= kLinearTol;

  std::vector<double> hs, res;
  bool est = true;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    GlobalOptions o;
    o.h = h;
    const GlobalRealization r = realize_global(u_eps(0.01), o);
    est = est && r.established();
    hs.push_back(h);
    res.push_back(r.residual.max_abs);
  }
  const double order = fitted_order(hs, res);

  GlobalOptions small, large;
  small.h = large.h = 1.0 / 32;
  large.radius = 2.0;
  small.n = large.n = PeriodicTruncation::smallest_n_for_disk(2.0);
  const GlobalRealization a = realize_global(u_eps(0.01), small);
  const GlobalRealization b = realize_global(u_eps(0.01), large);
  const int shift = static_cast<int>(std::lround((a.mu.grid.x0 - b.mu.grid.x0) * 32));
  double nest = 0.0;
  for (int j = 0; j < a.mu.grid.ny; ++j) {
    for (int i = 0; i < a.mu.grid.nx; ++i) {
      const double x = a.mu.grid.x(i), y = a.mu.grid.y(j);
      if (x * x + y * y > 1.0) continue;
      nest = std::max(nest, std::abs(a.mu(i, j) - b.mu(i + shift, j + shift)));
    }
  }
  report(6, lin_ok && est && order >= kOrderLo && nest <= kNestTol, "global pipeline",
         fmt("linear sup|mu - 1| = %.3g, residual %.3g; U_eps residual %.3g -> %.3g (order %.3f); "
             "nesting R = 1 vs 2 with n = %d: %.3g",
             lin_mu, l.residual.max_abs, res.front(), res.back(), order, small.n, nest));
}

void laminate_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(kSeed);
  int agree = 0;
  for (int k = 0; k < kPairs; ++k) {
    const LaminateField f = random_compatible_pair(rng);
    const bool crit = is_realizable(f.E1, f.E2);
    agree += crit == sign_test(f.E1, f.E2, f.xi) && crit == brute_force_realizable(f.E1, f.E2, f.xi);
  }
  const double elapsed = seconds_since(t0);
  const Mat2 A{0, 1, 1, 0}, B{0, 2, 2, 0}, C{0, -1, -1, 0};
  const auto rhs = [](const Mat2& p, const Mat2& q) {
    const double pq = frobenius(p, q);
    return (p.frobenius2() * q.frobenius2() + pq * pq) / (p.frobenius2() + q.frobenius2());
  };
  const bool hand = frobenius(A, B) == 4.0 && rhs(A, B) == 3.2 && is_realizable(A, B) &&
                    frobenius(A, C) == -2.0 && rhs(A, C) == 2.0 && !is_realizable(A, C);
  report(7, agree == kPairs && hand && elapsed < kLaminateSeconds, "laminate equivalence",
         fmt("%d/%d pairs agree, hand examples %g > %g realizable, %g <= %g not realizable, %.2f s", agree,
             kPairs, frobenius(A, B), rhs(A, B), frobenius(A, C), rhs(A, C), elapsed));
}

void counterexample_certificate() {
  const double ob = torus_obstruction(Expr(1.0), 0.1, 0.25);
  const WaveResidualPair pair = printed_wave_residual(parse_expression("2*pi*x"), 0.1, Grid2D::square(1.0, 65));
  const SignAudit audit = sign_convention_audit(parse_expression("2*pi*x"), 0.1);
  bool decreasing = true;
  for (std::size_t k = 1; k < audit.consistency.size(); ++k) {
    decreasing = decreasing && audit.consistency[k] < audit.consistency[k - 1];
  }
  const bool ok = std::abs(ob - 0.2) <= kObstructionTol && pair.printed_report.max_abs <= kPrintedTol &&
                  audit.printed_sup <= kPrintedTol && decreasing && audit.consistency_order >= kOrderLo;
  report(8, ok, "counterexample certificate",
         fmt("obstruction = %.17g, printed residual = %.3g, general residual = %.6g, e^u * general vs "
             "direct curl-div %.3g -> %.3g (order %.3f)",
             ob, pair.printed_report.max_abs, pair.general_report.max_abs, audit.consistency.front(),
             audit.consistency.back(), audit.consistency_order));
}

void vanishing_family_verdicts() {
  const VanishingVerdict r = vanishing_viscosity(parse_expression("x^2"), parse_expression("x^2"));
  const VanishingVerdict q = vanishing_viscosity(parse_expression("x^2"), parse_expression("x^4"));
  const VanishingVerdict c = vanishing_viscosity(parse_expression("2*x^2"), parse_expression("x^2"));
  const VanishingVerdict f = vanishing_viscosity(parse_expression("exp(-1/x^2)"), parse_expression("y^2"));
  const bool ok = r.realizable() && r.divergence_error <= kDivergenceTol && q.verdict == "not realizable" &&
                  c.verdict == "not realizable" && f.verdict == "inconclusive";
  report(9, ok, "vanishing family",
         fmt("x^2,x^2: %s (Div error %.3g); x^2,x^4: %s; 2x^2,x^2: %s; exp(-1/x^2),y^2: %s",
             r.verdict.c_str(), r.divergence_error, q.verdict.c_str(), c.verdict.c_str(),
             f.verdict.c_str()));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(const std::string& cli, const fs::path& scratch) {
  const std::vector<std::string> commands = {
      "laminate check --E1 0,1,1,0 --E2 0,2,2,0 --xi 1,0",
      "realize local --stream \"(x^2-y^2)/2 + 0.05*sin(x)*sin(y)\" --center 0.1,0.2",
      "realize global --stream \"-x*y + 0.01/(2*pi^2)*sin(2*pi*y)\" --average 1,0,0,-1 --h 1/16",
      "wave sweep --amplitudes 3:5:5",
      "casebook counterexample",
      "casebook vanishing --f x^2 --g y^2",
      "verify --pairs 200",
  };
  int files = 0, mismatched = 0, bad_exit = 0;
  std::string first_mismatch;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    const fs::path out = scratch / ("run" + std::to_string(c));
    const fs::path keep = scratch / ("run" + std::to_string(c) + ".first");
    fs::remove_all(out);
    fs::remove_all(keep);
    const std::string cmd =
        "\"" + cli + "\" --seed 7 --out \"" + out.string() + "\" " + commands[c] + " > /dev/null";
    if (std::system(cmd.c_str()) != 0) ++bad_exit;
    fs::rename(out, keep);
    if (std::system(cmd.c_str()) != 0) ++bad_exit;
    for (const auto& entry : fs::directory_iterator(keep)) {
      const std::string name = entry.path().filename().string();
      if (name == "run.log") continue;
      ++files;
      if (slurp(entry.path()) != slurp(out / name)) {
        ++mismatched;
        if (first_mismatch.empty()) first_mismatch = commands[c] + ": " + name;
      }
    }
  }
  report(10, files > 0 && mismatched == 0 && bad_exit == 0, "determinism",
         fmt("%zu commands run twice, %d artifacts compared, %d differ%s%s, %d nonzero exits",
             commands.size(), files, mismatched, first_mismatch.empty() ? "" : ", first: ",
             first_mismatch.c_str(), bad_exit));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <strainreal binary> <scratch dir>\n");
    return 64;
  }
  const fs::path scratch = argv[2];
  fs::create_directories(scratch);
  guarded(1, "local worked example", local_worked_example);
  guarded(2, "local convergence", local_convergence);
  guarded(3, "characteristic identities", characteristic_identities);
  guarded(4, "truncation lemma", truncation_lemma);
  guarded(5, "wave solver", wave_solver);
  guarded(6, "global pipeline", global_pipeline);
  guarded(7, "laminate equivalence", laminate_equivalence);
  guarded(8, "counterexample certificate", counterexample_certificate);
  guarded(9, "vanishing family", vanishing_family_verdicts);
  guarded(10, "determinism", [&] { determinism(argv[1], scratch); });
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
