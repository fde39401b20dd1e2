// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../unit/support.hpp"
#include "hawking/errors.hpp"
#include "hawking/expansion.hpp"
#include "hawking/functionals.hpp"
#include "hawking/moments.hpp"
#include "hawking/optimizer.hpp"
#include "hawking/variation.hpp"

using namespace hawking;
using namespace hawking::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Every valid surface built by the other criteria, re-checked by the structural suite.
struct BuiltSurface {
  std::string label;
  SurfaceShape shape;
  ManifoldModel model;
  LagrangianSpec L;
};
std::vector<BuiltSurface> g_surfaces;

void keep(const std::string& label, const SurfaceShape& shape, const ManifoldModel& model, const LagrangianSpec& L) {
  g_surfaces.push_back({label, shape, model, L});
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

ExtrinsicData ramp_k() {
  std::array<double, 18> k1{};
  k1[0] = 1.0;  // ∂_1 K_11
  return ExtrinsicData::from_components({1, 0, 0, 0, 0, 0}, k1);
}

ManifoldModel conformal_model() { return ManifoldModel::conformal_flat(-0.125, 0.1, 0.5, ramp_k()); }

Outcome moments_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  const MomentSuiteReport r = moment_suite(8);
  const double t = seconds_since(t0);
  return {r.pass() && t < 1.0, std::to_string(r.keys) + " keys, max error " + fmt(r.max_quadrature_error) +
                                   ", contraction " + (r.contraction_consistent ? "exact" : "inconsistent") +
                                   ", " + fmt(t) + " s"};
}

Outcome identities_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = identity_suite(conformal_model(), Vec3(0.07, -0.03, 0.05), 100, 1);
  const double t = seconds_since(t0);
  bool all = true;
  double worst_exact = 0.0, worst_quad = 0.0;
  std::string failed;
  for (const IdentityRow& r : rows) {
    worst_exact = std::max(worst_exact, r.exact_error);
    worst_quad = std::max(worst_quad, r.quadrature_error);
    if (!r.pass()) {
      all = false;
      failed += " " + r.name;
    }
  }
  return {all && t < 10.0, std::to_string(rows.size()) + " identities x 100 draws, exact " + fmt(worst_exact) +
                               ", quadrature " + fmt(worst_quad) + ", " + fmt(t) + " s" +
                               (failed.empty() ? "" : ", failed:" + failed)};
}

Outcome flat_oracle_criterion() {
  const ManifoldModel model = ManifoldModel::flat(1.0, ExtrinsicData::from_components({1, 0, 0, 0, 0, 0}, {}));
  const LagrangianSpec L = LagrangianSpec::hawking();
  const GridPtr grid = build_grid(24);
  double worst = 0.0;
  std::vector<double> Rs, Es;
  for (double R : {0.2, 0.1, 0.05}) {
    const SurfaceShape s = SurfaceShape::round(Vec3::Zero(), R, 0);
    const FunctionalReport rep = evaluate_functionals(embed(s, model, grid), L);
    worst = std::max(worst, std::abs(rep.E - R * R * R / 15.0));
    Rs.push_back(rep.R);
    Es.push_back(rep.E);
    keep("flat oracle R=" + fmt(R), s, model, L);
  }
  const double c3 = fit_with_nuisance(Rs, Es, {3}).coefficient(3);
  return {worst <= 1e-9 && std::abs(c3 - 1.0 / 15.0) <= 1e-6,
          "max |E - R^3/15| " + fmt(worst) + ", c3 - 1/15 = " + fmt(c3 - 1.0 / 15.0)};
}

Outcome sphere_oracle_criterion() {
  const ManifoldModel model = ManifoldModel::round_sphere(1.0, 2.0);
  const LagrangianSpec L = LagrangianSpec::hawking();
  const GridPtr grid = build_grid(24);
  double worst = 0.0;
  std::vector<double> Rs, Es;
  for (double r : {0.2, 0.1, 0.05}) {
    const SurfaceShape s = geodesic_sphere_shape(model, Vec3::Zero(), r, 0);
    const FunctionalReport rep = evaluate_functionals(embed(s, model, grid), L);
    worst = std::max(worst, std::abs(rep.E - std::pow(std::sin(r), 3) / 2.0));
    Rs.push_back(rep.R);
    Es.push_back(rep.E);
    keep("round S3 r=" + fmt(r), s, model, L);
  }
  const double c3 = fit_with_nuisance(Rs, Es, {3}).coefficient(3);
  return {worst <= 1e-8 && std::abs(c3 - 0.5) <= 1e-6,
          "max |E - sin^3(r)/2| " + fmt(worst) + ", c3 - 1/2 = " + fmt(c3 - 0.5)};
}

Outcome variation_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  const GridPtr grid = build_grid(32);
  double worst = 0.0;
  std::string failure;
  for (int d = 0; d < 20 && failure.empty(); ++d) {
    const ExtrinsicData k = random_extrinsic(rng);
    ManifoldModel model = ManifoldModel::flat(2.0, k);
    double radius = 0.6;
    if (d % 3 == 1) {
      model = ManifoldModel::round_sphere(1.0, 2.0, k);
    } else if (d % 3 == 2) {
      model = ManifoldModel::perturbed_flat(random_quadratic(rng, 0.3), 0.5, k);
      radius = 0.2;
    }
    const Vec3 center = 0.1 * radius * Vec3(u(rng), u(rng), u(rng));
    const SurfaceShape shape = random_shape(rng, center, radius, 8, 0.05, 6);
    const LagrangianSpec L = d % 4 == 0 ? LagrangianSpec::hawking()
                                        : LagrangianSpec::family(u(rng), u(rng), u(rng), u(rng));
    Eigen::VectorXd c(sh_count(4));
    for (int i = 0; i < c.size(); ++i) c[i] = n(rng);
    const Eigen::VectorXd f = grid->synthesize(c, 4);
    try {
      const VariationReport r = fd_check(shape, model, grid, f, L, 1e-4 * radius);
      worst = std::max(worst, r.max_rel_err());
      keep("variation draw " + std::to_string(d), shape, model, L);
    } catch (const Error& e) {
      failure = "draw " + std::to_string(d) + ": " + e.what();
    }
  }
  const double t = seconds_since(t0);
  return {failure.empty() && worst <= 1e-6 && t < 30.0,
          "20 draws (flat, S3, perturbed-flat), max relative error " + fmt(worst) + ", " + fmt(t) + " s" +
              (failure.empty() ? "" : ", " + failure)};
}

Outcome minimizer_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  const ManifoldModel model = ManifoldModel::flat(3.0);
  const LagrangianSpec L = LagrangianSpec::zero();
  const GridPtr grid = build_grid(24);
  OptimizerOptions o;
  o.target_area = 4.0 * M_PI;
  o.max_iters = 500;
  std::mt19937 rng(7);
  double worst_a0 = 0.0, worst_h = 0.0;
  int worst_iters = 0;
  bool all = true;
  std::string failure;
  for (int run = 0; run < 10; ++run) {
    const SurfaceShape init = random_shape(rng, Vec3::Zero(), 1.0, 6, 0.05, 6);
    try {
      const CriticalSurfaceReport r = minimize_area_constrained(model, L, o, init, grid);
      worst_a0 = std::max(worst_a0, r.A0_L2);
      worst_h = std::max(worst_h, std::abs(r.report.H_L - 4.0 * M_PI));
      worst_iters = std::max(worst_iters, r.iterations);
      all = all && r.converged;
      keep("flat minimizer " + std::to_string(run), r.shape, model, L);
    } catch (const Error& e) {
      all = false;
      failure = "run " + std::to_string(run) + ": " + e.what();
    }
  }
  const double t = seconds_since(t0);
  return {all && worst_a0 <= 1e-6 && worst_h <= 1e-5 && worst_iters <= 500 && t < 120.0,
          "10 runs, max |A0|_L2 " + fmt(worst_a0) + ", max |H_L - 4pi| " + fmt(worst_h) + ", max iterations " +
              std::to_string(worst_iters) + ", " + fmt(t) + " s" + (failure.empty() ? "" : ", " + failure)};
}

// Shared by the energy bound and the concentration trend: one area scan on the conformal model.
const ConcentrationExperiment& conformal_experiment() {
  static const ConcentrationExperiment exp = [] {
    FieldGridSpec spec;
    spec.half_width = 0.25;
    spec.points_per_axis = 11;
    return concentration_experiment(conformal_model(), LagrangianSpec::hawking(), {1e-2, 5e-3, 2.5e-3},
                                    Vec3::Zero(), spec, OptimizerOptions{}, 12, 32);
  }();
  return exp;
}

Outcome energy_bound_criterion() {
  const ConcentrationExperiment& exp = conformal_experiment();
  std::vector<double> q;
  std::string detail;
  for (const ConcentrationRow& row : exp.rows) {
    if (!row.converged) return {false, "area " + fmt(row.area) + " did not converge: " + row.error};
    q.push_back(std::abs(row.H_L - 4.0 * M_PI) / row.area);
    detail += (detail.empty() ? "" : ", ") + fmt(q.back());
  }
  if (q.size() != 3) return {false, "expected three areas"};
  const double hi = *std::max_element(q.begin(), q.end()), lo = *std::min_element(q.begin(), q.end());
  return {lo > 0.0 && hi <= 2.0 * lo, "|H_L - 4pi|/a = " + detail + ", spread " + fmt(hi / lo)};
}

Outcome expansion_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(11);
  const ManifoldModel model = ManifoldModel::perturbed_flat(random_quadratic(rng, 0.3), 0.5, random_extrinsic(rng));
  ExpansionOptions o;
  o.l_max = 8;
  o.ratio_tolerance = 0.02;
  const ExpansionReport rep = expansion_check(model, Vec3::Zero(), default_radii(), LagrangianSpec::hawking(), o);
  for (const ExpansionSample& s : rep.samples)
    if (s.error.empty()) {
      keep("expansion r=" + fmt(s.r), geodesic_sphere_shape(model, Vec3::Zero(), s.r, 8), model,
           LagrangianSpec::hawking());
    }
  const double t = seconds_since(t0);
  const double rel = std::abs(rep.E_fit.coefficient(3) / rep.predicted_E3 - 1.0);
  return {rel <= 0.02 && t < 120.0, "fitted " + fmt(rep.E_fit.coefficient(3)) + " vs predicted " +
                                        fmt(rep.predicted_E3) + " (relative " + fmt(rel) + "), " + fmt(t) + " s"};
}

Outcome concentration_criterion() {
  const ConcentrationExperiment& exp = conformal_experiment();
  const ConcentrationField& field = exp.field;
  int maxima = 0;
  for (const CriticalPoint& c : field.phi_critical) maxima += c.kind == "maximum";
  std::string distances;
  for (const ConcentrationRow& row : exp.rows) distances += (distances.empty() ? "" : ", ") + fmt(row.distance);
  const bool distinct = !field.critical_points_coincide && std::isfinite(field.critical_separation);
  return {exp.has_target && maxima == 1 && exp.monotone && distinct,
          "unique Phi maximum " + std::string(maxima == 1 ? "yes" : "no") + ", distances " + distances +
              ", Phi/rho critical separation " + fmt(field.critical_separation)};
}

Outcome structural_criterion() {
  // Random shapes on every model kind, in addition to the surfaces built above.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<std::pair<std::string, ManifoldModel>> models = {
      {"flat", ManifoldModel::flat(2.0, random_extrinsic(rng))},
      {"round S3", ManifoldModel::round_sphere(1.0, 2.0, random_extrinsic(rng))},
      {"schwarzschild", ManifoldModel::schwarzschild(0.5, Vec3(3.0, 0.0, 0.0), 1.5, random_extrinsic(rng))},
      {"perturbed-flat", ManifoldModel::perturbed_flat(random_quadratic(rng, 0.3), 0.5, random_extrinsic(rng))},
      {"conformally-flat", conformal_model()}};
  for (const auto& [name, model] : models)
    for (int d = 0; d < 3; ++d) {
      const double radius = name == "perturbed-flat" || name == "conformally-flat" ? 0.15 : 0.5;
      const Vec3 center = name == "schwarzschild" ? Vec3(3.0, 0.0, 0.0) : Vec3::Zero();
      keep(name + " random " + std::to_string(d), random_shape(rng, center, radius, 8, 0.05, 6), model,
           LagrangianSpec::family(u(rng), u(rng), u(rng), u(rng)));
    }

  const GridPtr grid = build_grid(48);
  double gb = 0.0, gauss = 0.0, trace = 0.0, rot = 0.0;
  std::string worst_label;
  for (const BuiltSurface& s : g_surfaces) {
    const SurfaceGeometry geom = embed(s.shape, s.model, grid);
    const FunctionalReport r = evaluate_functionals(geom, s.L);
    const double gb_err = std::abs(r.gauss_bonnet_total - 4.0 * M_PI);
    if (gb_err > gb) worst_label = s.label;
    gb = std::max(gb, gb_err);
    gauss = std::max(gauss, std::abs(r.gauss_identity_defect));
    for (const SurfacePoint& p : geom.points) trace = std::max(trace, std::abs((p.gamma_inv * p.A0).trace()));

    const Mat3 q = random_rotation(rng);
    const FunctionalReport b = evaluate_functionals(embed(rotate_shape(s.shape, q), rotate_model(s.model, q), grid), s.L);
    for (auto [x, y] : {std::pair{r.area, b.area}, {r.W, b.W}, {r.L_integral, b.L_integral}, {r.H_L, b.H_L},
                        {r.E, b.E}, {r.U, b.U}, {r.V, b.V}})
      rot = std::max(rot, std::abs(x - y));
  }
  return {gb <= 1e-8 && gauss <= 1e-8 && trace <= 1e-12 && rot <= 1e-9,
          std::to_string(g_surfaces.size()) + " surfaces, Gauss-Bonnet " + fmt(gb) + " (worst " + worst_label +
              "), Gauss identity " + fmt(gauss) + ", tr A0 " + fmt(trace) + ", rotation " + fmt(rot)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"moment suite", moments_criterion},
      {"concentration identities", identities_criterion},
      {"flat Hawking oracle", flat_oracle_criterion},
      {"round S3 oracle", sphere_oracle_criterion},
      {"first variation vs finite differences", variation_criterion},
      {"flat minimizer recovery", minimizer_criterion},
      {"small-area energy bound", energy_bound_criterion},
      {"expansion coefficient on a generic model", expansion_criterion},
      {"concentration trend", concentration_criterion},
      {"structural invariants", structural_criterion}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
