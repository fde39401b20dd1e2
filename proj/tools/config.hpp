#pragma once

#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "hawking/errors.hpp"
#include "hawking/expansion.hpp"

namespace hawking::cli {

inline constexpr const char* kVersion = "hawking_functionals 0.3.0";

/// Config that parses but is inconsistent (missing block, bad value).
class ValidationError : public Error {
 public:
  using Error::Error;
};

enum class Command { Eval, Minimize, Scan, Expand, Moments, Concentrate, CheckVariation };

std::string to_string(Command c);

struct ModelConfig {
  std::string kind = "flat";
  double chart_radius = 1.0;
  double curvature = 1.0;
  double mass = 1.0;
  Vec3 chart_center = Vec3::Zero();
  std::vector<double> quadratic;  // 81 entries Q_ijkl, row-major in (i, j, k, l)
  std::optional<unsigned> quadratic_seed;
  double quadratic_scale = 0.3;
  Vec2 conformal = Vec2::Zero();
  std::array<double, 6> k0{};
  std::array<double, 18> k1{};
};

struct LagrangianConfig {
  std::string keyword;  // "hawking", "zero" or empty for explicit coefficients
  double alpha = 0.0, beta = 0.0, c0 = 0.0, ct = 0.0;
};

struct SurfaceConfig {
  int l_max = 8;
  int n_theta = 24;
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  double noise = 0.0;
  int noise_band = 6;
  std::string shape_file;
};

struct CommandConfig {
  Command name = Command::Eval;
  unsigned seed = 1;
  double target_area = 0.0;
  std::vector<double> areas;
  std::vector<double> radii;
  Vec3 point = Vec3::Zero();
  std::optional<Vec3> start;
  bool use_minimizers = false;
  int draws = 0;  // 0: command default
  double step = 1e-4;  // finite-difference step relative to the shape radius
  double tolerance = 1e-6;
  double roundness_bound = 10.0;
  double ratio_tolerance = 0.02;
  OptimizerOptions optimizer;
  FieldGridSpec field;
};

struct OutputConfig {
  std::string directory = "out";
  bool json = true;
  bool csv = true;
  bool shape = true;
};

struct ExperimentConfig {
  ModelConfig model;
  bool has_lagrangian = false;
  LagrangianConfig lagrangian;
  SurfaceConfig surface;
  CommandConfig command;
  OutputConfig output;

  /// Fully resolved config with every default filled in.
  YAML::Node to_yaml() const;
  /// to_yaml() rendered with 17 significant digits.
  std::string resolved_text() const;
};

/// Throws ParseError on malformed YAML or wrongly typed values, ValidationError on inconsistent content.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

ManifoldModel build_model(const ModelConfig& m);
LagrangianSpec build_lagrangian(const LagrangianConfig& l);

}  // namespace hawking::cli
