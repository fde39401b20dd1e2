#include "runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hawking/moments.hpp"
#include "hawking/variation.hpp"

namespace hawking::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

// A finite double for JSON; NaN and infinities become null.
Json real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

/// Collects the artifacts of one run and writes them with the common header.
class Outputs {
 public:
  explicit Outputs(const ExperimentConfig& cfg) : cfg_(cfg), dir_(cfg.output.directory) {
    std::filesystem::create_directories(dir_);
    report_["version"] = kVersion;
    report_["command"] = to_string(cfg.command.name);
    report_["config"] = cfg.resolved_text();
    report_["status"] = "ok";
  }

  Json& report() { return report_; }

  void columns(std::vector<std::string> names) { columns_ = std::move(names); }
  void row(std::vector<std::string> values) { rows_.push_back(std::move(values)); }

  void shape(const std::string& name, const SurfaceShape& s) const {
    if (!cfg_.output.shape) return;
    std::ofstream f(dir_ / name);
    if (!f) throw Error("cannot write " + (dir_ / name).string());
    f << header();
    write_shape(f, s);
  }

  void finish(const std::string& error = {}) {
    if (!error.empty()) {
      report_["status"] = "failed";
      report_["error"] = error;
    }
    if (cfg_.output.json) {
      std::ofstream f(dir_ / "report.json");
      f << report_.dump(2) << '\n';
    }
    if (cfg_.output.csv) {
      std::ofstream f(dir_ / "run.csv");
      f << header();
      for (std::size_t i = 0; i < columns_.size(); ++i) f << (i ? "," : "") << columns_[i];
      f << '\n';
      for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
        f << '\n';
      }
      if (!error.empty()) f << "# status: failed: " << error << '\n';
    }
  }

 private:
  std::string header() const {
    std::ostringstream h;
    h << "# " << kVersion << '\n' << "# command: " << to_string(cfg_.command.name) << '\n' << "# config:\n";
    std::istringstream text(cfg_.resolved_text());
    std::string line;
    while (std::getline(text, line)) h << "#   " << line << '\n';
    return h.str();
  }

  const ExperimentConfig& cfg_;
  std::filesystem::path dir_;
  Json report_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void put_report(Json& j, const FunctionalReport& r) {
  j["area"] = r.area;
  j["R"] = r.R;
  j["R_E"] = r.R_E;
  j["W"] = r.W;
  j["L_integral"] = r.L_integral;
  j["H_L"] = r.H_L;
  j["E"] = r.E;
  j["U"] = r.U;
  j["V"] = r.V;
  j["gauss_bonnet_total"] = r.gauss_bonnet_total;
  j["gauss_identity_defect"] = r.gauss_identity_defect;
  j["el_residual_L2"] = r.el_residual_L2;
  j["lambda"] = r.lambda;
  j["is_hawking"] = r.is_hawking;
}

void put_critical(Json& j, const CriticalSurfaceReport& r) {
  put_report(j, r.report);
  j["lambda"] = r.lambda;
  j["target_area"] = r.target_area;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["grad_norm"] = r.grad_norm;
  j["A0_L2"] = r.A0_L2;
  j["H_deviation_max"] = r.H_deviation_max;
  j["center"] = vec_json(r.center);
  j["shape_center"] = vec_json(r.shape.center);
}

struct Context {
  const ExperimentConfig& cfg;
  ManifoldModel model;
  LagrangianSpec L;
  GridPtr grid;
  std::mt19937 rng;
  std::ostream& log;
  bool quiet;
};

SurfaceShape initial_shape(Context& ctx) {
  const auto& s = ctx.cfg.surface;
  if (!s.shape_file.empty()) return load_shape(s.shape_file);
  SurfaceShape shape = SurfaceShape::round(s.center, s.radius, s.l_max);
  if (s.noise > 0.0) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (int l = 1; l <= std::min(s.noise_band, s.l_max); ++l)
      for (int m = -l; m <= l; ++m) shape.coeffs[sh_index(l, m)] = s.radius * s.noise * n(ctx.rng) / (1.0 + l);
  }
  return shape;
}

OptimizerOptions optimizer_options(const ExperimentConfig& cfg, double target_area) {
  OptimizerOptions o = cfg.command.optimizer;
  o.target_area = target_area;
  return o;
}

int run_eval(Context& ctx, Outputs& out) {
  const SurfaceShape shape = initial_shape(ctx);
  const auto rep = evaluate_functionals(embed(shape, ctx.model, ctx.grid), ctx.L);
  put_report(out.report(), rep);
  out.columns({"area", "R", "W", "L_integral", "H_L", "E", "U", "V", "gauss_bonnet_total", "gauss_identity_defect",
               "el_residual_L2", "lambda"});
  out.row({num(rep.area), num(rep.R), num(rep.W), num(rep.L_integral), num(rep.H_L), num(rep.E), num(rep.U),
           num(rep.V), num(rep.gauss_bonnet_total), num(rep.gauss_identity_defect), num(rep.el_residual_L2),
           num(rep.lambda)});
  out.shape("surface.shape", shape);
  if (!ctx.quiet) ctx.log << "H_L = " << num(rep.H_L) << "  W = " << num(rep.W) << "  E = " << num(rep.E) << '\n';
  out.finish();
  return kOk;
}

void history_csv(Outputs& out, const CriticalSurfaceReport& r) {
  out.columns({"iter", "H_L", "area_defect", "grad_norm", "step"});
  for (const auto& h : r.history)
    out.row({std::to_string(h.iter), num(h.H_L), num(h.area_defect), num(h.grad_norm), num(h.step)});
}

int run_minimize(Context& ctx, Outputs& out) {
  const auto opts = optimizer_options(ctx.cfg, ctx.cfg.command.target_area);
  CriticalSurfaceReport partial;
  try {
    const auto r = minimize_area_constrained(ctx.model, ctx.L, opts, initial_shape(ctx), ctx.grid, &partial);
    put_critical(out.report(), r);
    history_csv(out, r);
    out.shape("minimizer.shape", r.shape);
    if (!ctx.quiet)
      ctx.log << (r.converged ? "converged" : "not converged") << " after " << r.iterations
              << " iterations: H_L = " << num(r.report.H_L) << "  lambda = " << num(r.lambda) << '\n';
    if (!r.converged) {
      out.finish("no convergence within " + std::to_string(opts.max_iters) + " iterations");
      return kNumericalFailure;
    }
  } catch (const StallError& e) {
    put_critical(out.report(), partial);
    history_csv(out, partial);
    out.shape("minimizer.shape", partial.shape);
    out.finish(e.what());
    return kNumericalFailure;
  }
  out.finish();
  return kOk;
}

int run_scan(Context& ctx, Outputs& out) {
  const auto& areas = ctx.cfg.command.areas;
  const auto scan = area_scan(ctx.model, ctx.L, areas, optimizer_options(ctx.cfg, areas.front()),
                              initial_shape(ctx), ctx.grid);
  out.columns({"area", "converged", "iterations", "H_L", "W", "E", "lambda", "A0_L2", "center_x", "center_y",
               "center_z", "error"});
  Json runs = Json::array();
  std::string failure;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const auto& r = scan[i];
    Json j;
    put_critical(j, r);
    j["error"] = r.error;
    runs.push_back(j);
    out.row({num(r.target_area), r.converged ? "1" : "0", std::to_string(r.iterations), num(r.report.H_L),
             num(r.report.W), num(r.report.E), num(r.lambda), num(r.A0_L2), num(r.center[0]), num(r.center[1]),
             num(r.center[2]), r.error});
    char name[32];
    std::snprintf(name, sizeof name, "scan_%03zu.shape", i);
    if (r.error.empty()) out.shape(name, r.shape);
    if (failure.empty() && (!r.error.empty() || !r.converged))
      failure = "run at area " + num(r.target_area) + " failed" + (r.error.empty() ? "" : ": " + r.error);
    if (!ctx.quiet)
      ctx.log << "area " << num(r.target_area) << ": H_L = " << num(r.report.H_L)
              << (r.converged ? "" : " (not converged)") << '\n';
  }
  out.report()["runs"] = runs;
  out.finish(failure);
  return failure.empty() ? kOk : kNumericalFailure;
}

Json fit_json(const ExpansionFit& f) {
  Json j;
  Json coeffs;
  for (std::size_t i = 0; i < f.powers.size(); ++i) coeffs["c" + std::to_string(f.powers[i])] = f.coefficients[i];
  j["coefficients"] = coeffs;
  j["residual"] = f.residual;
  j["condition"] = f.condition;
  return j;
}

int run_expand(Context& ctx, Outputs& out) {
  const auto& c = ctx.cfg.command;
  ExpansionOptions eo;
  eo.use_minimizers = c.use_minimizers;
  eo.l_max = ctx.cfg.surface.l_max;
  eo.n_theta = ctx.cfg.surface.n_theta;
  eo.optimizer = c.optimizer;
  eo.roundness_bound = c.roundness_bound;
  eo.ratio_tolerance = c.ratio_tolerance;
  const auto rep = expansion_check(ctx.model, c.point, c.radii, ctx.L, eo);
  auto& j = out.report();
  j["point"] = vec_json(rep.point);
  j["scalar"] = rep.invariants.scalar;
  j["tr_k"] = rep.invariants.tr_k;
  j["norm_k2"] = rep.invariants.norm_k2;
  j["c_L"] = rep.c_L;
  j["predicted_E3"] = rep.predicted_E3;
  j["fitted_E3"] = rep.E_fit.coefficient(3);
  j["E3_ratio"] = real(rep.E3_ratio);
  j["predicted_H2"] = rep.predicted_H2;
  j["fitted_H2"] = rep.H_fit.coefficient(2);
  j["H2_ratio"] = real(rep.H2_ratio);
  j["H0"] = rep.H0;
  j["E_fit"] = fit_json(rep.E_fit);
  j["H_fit"] = fit_json(rep.H_fit);
  j["max_roundness_constant"] = rep.max_roundness_constant;
  j["pass"] = rep.pass;
  out.columns({"r", "R", "area", "E", "H_L", "W", "A0_L2_sq", "roundness_constant", "admitted", "predicted_E3",
               "fitted_E3", "predicted_H2", "fitted_H2"});
  for (const auto& s : rep.samples)
    out.row({num(s.r), num(s.R), num(s.area), num(s.E), num(s.H_L), num(s.W), num(s.A0_L2_sq),
             num(s.roundness_constant), s.admitted ? "1" : "0", num(rep.predicted_E3),
             num(rep.E_fit.coefficient(3)), num(rep.predicted_H2), num(rep.H_fit.coefficient(2))});
  if (!ctx.quiet)
    ctx.log << "E: fitted c3 = " << num(rep.E_fit.coefficient(3)) << "  predicted " << num(rep.predicted_E3)
            << "\nH_L: fitted c0 = " << num(rep.H0) << "  c2 = " << num(rep.H_fit.coefficient(2)) << "  predicted "
            << num(rep.predicted_H2) << "\n" << (rep.pass ? "PASS" : "FAIL") << '\n';
  out.finish();
  return kOk;
}

int run_moments(Context& ctx, Outputs& out, const std::optional<std::string>& key_text) {
  if (key_text) {
    const MomentKey key = MomentKey::parse(*key_text);
    const ExactMoment m = exact_monomial_integral(key);
    ctx.log << key.str() << " = " << m.coefficient.str() << " pi = " << num(m.value()) << '\n';
    out.report()["key"] = key.str();
    out.report()["coefficient_of_pi"] = m.coefficient.str();
    out.report()["value"] = m.value();
    out.columns({"key", "coefficient_of_pi", "value"});
    out.row({"\"" + key.str() + "\"", m.coefficient.str(), num(m.value())});
    out.finish();
    return kOk;
  }
  const auto suite = moment_suite(8);
  const auto rows = identity_suite(ctx.model, ctx.cfg.command.point, ctx.cfg.command.draws, ctx.cfg.command.seed);
  out.columns({"identity", "exact_error", "quadrature_error", "exact_tolerance", "quadrature_tolerance", "pass"});
  out.row({"\"moment suite (" + std::to_string(suite.keys) + " keys)\"", "0", num(suite.max_quadrature_error), "0",
           "1e-12", suite.pass() ? "1" : "0"});
  Json table = Json::array();
  bool all = suite.pass();
  for (const auto& r : rows) {
    out.row({"\"" + r.name + "\"", num(r.exact_error), num(r.quadrature_error), num(r.exact_tolerance),
             num(r.quadrature_tolerance), r.pass() ? "1" : "0"});
    table.push_back({{"identity", r.name},
                     {"exact_error", r.exact_error},
                     {"quadrature_error", r.quadrature_error},
                     {"pass", r.pass()}});
    all = all && r.pass();
  }
  auto& j = out.report();
  j["moment_keys"] = suite.keys;
  j["moment_quadrature_error"] = suite.max_quadrature_error;
  j["contraction_consistent"] = suite.contraction_consistent;
  j["identities"] = table;
  j["all_pass"] = all;
  if (!ctx.quiet) {
    char line[160];
    std::snprintf(line, sizeof line, "%-64s %10s %10s  %s\n", "identity", "exact", "quadrature", "");
    ctx.log << line;
    std::snprintf(line, sizeof line, "%-64s %10.2e %10.2e  %s\n", "moment suite, degree <= 6", 0.0,
                  suite.max_quadrature_error, suite.pass() ? "PASS" : "FAIL");
    ctx.log << line;
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%-64s %10.2e %10.2e  %s\n", r.name.c_str(), r.exact_error,
                    r.quadrature_error, r.pass() ? "PASS" : "FAIL");
      ctx.log << line;
    }
  }
  out.finish();
  return kOk;
}

Json critical_json(const std::vector<CriticalPoint>& pts) {
  Json a = Json::array();
  for (const auto& p : pts)
    a.push_back({{"x", vec_json(p.x)},
                 {"value", p.value},
                 {"gradient_norm", p.gradient.norm()},
                 {"hessian_eigenvalues", vec_json(p.hessian_eigenvalues)},
                 {"kind", p.kind}});
  return a;
}

int run_concentrate(Context& ctx, Outputs& out) {
  const auto& c = ctx.cfg.command;
  const Vec3 start = c.start ? *c.start : ctx.cfg.surface.center;
  const auto exp = concentration_experiment(ctx.model, ctx.L, c.areas, start, c.field,
                                            optimizer_options(ctx.cfg, c.areas.front()), ctx.cfg.surface.l_max,
                                            ctx.cfg.surface.n_theta);
  auto& j = out.report();
  j["degenerate"] = exp.degenerate;
  j["has_target"] = exp.has_target;
  j["target"] = vec_json(exp.target);
  j["monotone"] = exp.monotone;
  j["potential_critical_points"] = critical_json(exp.field.phi_critical);
  j["energy_density_critical_points"] = critical_json(exp.field.rho_critical);
  j["potential_argmax_sampled"] = vec_json(exp.field.phi_argmax);
  j["energy_density_argmax_sampled"] = vec_json(exp.field.rho_argmax);
  j["critical_separation"] = real(exp.field.critical_separation);
  j["critical_points_coincide"] = exp.field.critical_points_coincide;
  out.columns({"area", "center_x", "center_y", "center_z", "distance", "H_L", "converged", "error"});
  std::string failure;
  for (const auto& r : exp.rows) {
    out.row({num(r.area), num(r.center[0]), num(r.center[1]), num(r.center[2]), num(r.distance), num(r.H_L),
             r.converged ? "1" : "0", r.error});
    if (failure.empty() && (!r.error.empty() || !r.converged)) failure = "run at area " + num(r.area) + " failed";
    if (!ctx.quiet)
      ctx.log << "area " << num(r.area) << ": center (" << num(r.center[0]) << ", " << num(r.center[1]) << ", "
              << num(r.center[2]) << ")  distance " << num(r.distance) << '\n';
  }
  if (!ctx.quiet)
    ctx.log << (exp.degenerate ? "degenerate potential: no isolated critical point"
                               : exp.monotone ? "monotone approach to the potential critical point"
                                              : "no monotone trend")
            << '\n';
  out.finish(failure);
  return failure.empty() ? kOk : kNumericalFailure;
}

int run_check_variation(Context& ctx, Outputs& out) {
  const auto& c = ctx.cfg.command;
  out.columns({"draw", "dA", "dA_fd", "dW", "dW_fd", "dL", "dL_fd", "rel_err_A", "rel_err_W", "rel_err_L", "pass"});
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  bool all = true;
  std::string failure;
  for (int d = 0; d < c.draws; ++d) {
    const SurfaceShape shape = initial_shape(ctx);
    Eigen::VectorXd coeffs(sh_count(4));
    for (int i = 0; i < coeffs.size(); ++i) coeffs[i] = n(ctx.rng);
    const Eigen::VectorXd f = ctx.grid->synthesize(coeffs, 4);
    try {
      const auto r = fd_check(shape, ctx.model, ctx.grid, f, ctx.L, c.step * std::abs(shape.mean_radius()),
                              "random band 4");
      const bool pass = r.max_rel_err() <= c.tolerance;
      worst = std::max(worst, r.max_rel_err());
      all = all && pass;
      out.row({std::to_string(d), num(r.analytic.dA), num(r.finite_difference.dA), num(r.analytic.dW),
               num(r.finite_difference.dW), num(r.analytic.dL), num(r.finite_difference.dL), num(r.rel_err_A),
               num(r.rel_err_W), num(r.rel_err_L), pass ? "1" : "0"});
    } catch (const StepSizeError& e) {
      failure = "draw " + std::to_string(d) + ": " + e.what();
      break;
    }
  }
  out.report()["draws"] = c.draws;
  out.report()["max_rel_err"] = worst;
  out.report()["tolerance"] = c.tolerance;
  out.report()["all_pass"] = all && failure.empty();
  if (!ctx.quiet) ctx.log << "max relative error " << num(worst) << (all ? "  PASS" : "  FAIL") << '\n';
  out.finish(failure);
  return failure.empty() ? kOk : kNumericalFailure;
}

}  // namespace

int run_experiment(ExperimentConfig cfg, const RunOptions& opts, std::ostream& log, std::ostream& err) {
  if (opts.seed) cfg.command.seed = *opts.seed;
  if (opts.out_dir) cfg.output.directory = *opts.out_dir;
  if (opts.moment_key && cfg.command.name != Command::Moments) {
    err << "error: --key only applies to the moments command\n";
    return kValidationFailure;
  }

  std::optional<Context> ctx;
  try {
    const LagrangianSpec L = cfg.has_lagrangian ? build_lagrangian(cfg.lagrangian) : LagrangianSpec::zero();
    ctx.emplace(Context{cfg, build_model(cfg.model), L, build_grid(cfg.surface.n_theta),
                        std::mt19937(cfg.command.seed), log, opts.quiet});
  } catch (const DomainError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const Error& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidationFailure;
  }

  std::optional<Outputs> out;
  try {
    out.emplace(cfg);
  } catch (const std::exception& e) {
    err << "error: cannot create output directory: " << e.what() << '\n';
    return kValidationFailure;
  }
  try {
    switch (cfg.command.name) {
      case Command::Eval: return run_eval(*ctx, *out);
      case Command::Minimize: return run_minimize(*ctx, *out);
      case Command::Scan: return run_scan(*ctx, *out);
      case Command::Expand: return run_expand(*ctx, *out);
      case Command::Moments: return run_moments(*ctx, *out, opts.moment_key);
      case Command::Concentrate: return run_concentrate(*ctx, *out);
      case Command::CheckVariation: return run_check_variation(*ctx, *out);
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    out->finish(e.what());
    return kParseFailure;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    out->finish(e.what());
    return kNumericalFailure;
  }
  return kOk;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Evaluate and minimize Hawking-type functionals on spheres in 3-manifolds"};
  app.set_version_flag("--version", kVersion);
  std::string config_path;
  RunOptions opts;
  unsigned seed = 0;
  std::string out_dir, key;
  app.add_option("--config", config_path, "Experiment config (YAML)")->required();
  auto* seed_opt = app.add_option("--seed", seed, "Override command.seed");
  auto* out_opt = app.add_option("--out", out_dir, "Override output.directory");
  auto* key_opt = app.add_option("--key", key, "moments only: print one exact monomial integral, e.g. 1,1,2,2");
  app.add_flag("--quiet", opts.quiet, "Suppress progress output");
  std::string subcommand;
  app.add_option("subcommand", subcommand, "Optional command name; must match command.name in the config");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParseFailure;
  }
  if (*seed_opt) opts.seed = seed;
  if (*out_opt) opts.out_dir = out_dir;
  if (*key_opt) opts.moment_key = key;

  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParseFailure;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidationFailure;
  }
  if (!subcommand.empty() && subcommand != to_string(cfg.command.name)) {
    std::cerr << "validation error: subcommand '" << subcommand << "' does not match command.name '"
              << to_string(cfg.command.name) << "'\n";
    return kValidationFailure;
  }
  return run_experiment(cfg, opts, std::cout, std::cerr);
}

}  // namespace hawking::cli
