#include "config.hpp"

#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace hawking::cli {

namespace {

const std::map<std::string, Command> kCommands = {
    {"eval", Command::Eval},         {"minimize", Command::Minimize},
    {"scan", Command::Scan},         {"expand", Command::Expand},
    {"moments", Command::Moments},   {"concentrate", Command::Concentrate},
    {"check-variation", Command::CheckVariation},
};

void check_keys(const YAML::Node& node, const std::string& block, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ParseError("block '" + block + "' must be a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in block '" + block + "'");
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError("'" + where + "' has the wrong type");
  }
}

template <class T>
void read(const YAML::Node& block, const std::string& key, const std::string& path, T& out) {
  if (block[key]) out = scalar<T>(block[key], path + "." + key);
}

std::vector<double> list(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) throw ParseError("'" + where + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& v : node) out.push_back(scalar<double>(v, where));
  return out;
}

Vec3 vec3(const YAML::Node& node, const std::string& where) {
  const auto v = list(node, where);
  if (v.size() != 3) throw ValidationError("'" + where + "' needs 3 entries");
  return Vec3(v[0], v[1], v[2]);
}

template <std::size_t N>
std::array<double, N> fixed(const YAML::Node& node, const std::string& where) {
  const auto v = list(node, where);
  if (v.size() != N) throw ValidationError("'" + where + "' needs " + std::to_string(N) + " entries");
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

void positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(what + " must be positive");
}

YAML::Node seq(const Vec3& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (int i = 0; i < 3; ++i) n.push_back(v[i]);
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

template <class C>
YAML::Node seq(const C& c) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (double v : c) n.push_back(v);
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

ModelConfig parse_model(const YAML::Node& n) {
  check_keys(n, "model", {"kind", "chart_radius", "curvature", "mass", "chart_center", "quadratic",
                          "quadratic_random", "conformal", "K0", "K1"});
  ModelConfig m;
  if (!n["kind"]) throw ValidationError("model.kind is required");
  m.kind = scalar<std::string>(n["kind"], "model.kind");
  read(n, "chart_radius", "model", m.chart_radius);
  read(n, "curvature", "model", m.curvature);
  read(n, "mass", "model", m.mass);
  if (n["chart_center"]) m.chart_center = vec3(n["chart_center"], "model.chart_center");
  if (n["quadratic"]) {
    m.quadratic = list(n["quadratic"], "model.quadratic");
    if (m.quadratic.size() != 81) throw ValidationError("model.quadratic needs 81 entries");
  }
  if (n["quadratic_random"]) {
    const auto& q = n["quadratic_random"];
    check_keys(q, "model.quadratic_random", {"seed", "scale"});
    unsigned seed = 1;
    read(q, "seed", "model.quadratic_random", seed);
    read(q, "scale", "model.quadratic_random", m.quadratic_scale);
    m.quadratic_seed = seed;
  }
  if (n["conformal"]) {
    const auto v = fixed<2>(n["conformal"], "model.conformal");
    m.conformal = Vec2(v[0], v[1]);
  }
  if (n["K0"]) m.k0 = fixed<6>(n["K0"], "model.K0");
  if (n["K1"]) m.k1 = fixed<18>(n["K1"], "model.K1");

  static const std::set<std::string> kinds = {"flat", "round-sphere", "schwarzschild", "perturbed-flat",
                                              "conformally-flat"};
  if (!kinds.count(m.kind)) throw ValidationError("unknown model kind '" + m.kind + "'");
  positive(m.chart_radius, "model.chart_radius");
  if (m.kind == "perturbed-flat" && m.quadratic.empty() && !m.quadratic_seed)
    throw ValidationError("perturbed-flat needs model.quadratic or model.quadratic_random");
  if (m.kind != "perturbed-flat" && (!m.quadratic.empty() || m.quadratic_seed))
    throw ValidationError("model.quadratic only applies to perturbed-flat");
  return m;
}

LagrangianConfig parse_lagrangian(const YAML::Node& n) {
  LagrangianConfig l;
  if (n.IsScalar()) {
    l.keyword = scalar<std::string>(n, "lagrangian");
    if (l.keyword != "hawking" && l.keyword != "zero")
      throw ValidationError("lagrangian keyword must be 'hawking' or 'zero'");
    return l;
  }
  check_keys(n, "lagrangian", {"alpha", "beta", "c0", "ct"});
  read(n, "alpha", "lagrangian", l.alpha);
  read(n, "beta", "lagrangian", l.beta);
  read(n, "c0", "lagrangian", l.c0);
  read(n, "ct", "lagrangian", l.ct);
  return l;
}

SurfaceConfig parse_surface(const YAML::Node& n) {
  check_keys(n, "surface", {"l_max", "n_theta", "center", "radius", "noise", "noise_band", "shape_file"});
  SurfaceConfig s;
  read(n, "l_max", "surface", s.l_max);
  read(n, "n_theta", "surface", s.n_theta);
  if (n["center"]) s.center = vec3(n["center"], "surface.center");
  read(n, "radius", "surface", s.radius);
  read(n, "noise", "surface", s.noise);
  read(n, "noise_band", "surface", s.noise_band);
  read(n, "shape_file", "surface", s.shape_file);
  if (s.l_max < 0) throw ValidationError("surface.l_max must be nonnegative");
  if (s.n_theta < 4) throw ValidationError("surface.n_theta must be at least 4");
  positive(s.radius, "surface.radius");
  if (s.noise < 0.0) throw ValidationError("surface.noise must be nonnegative");
  if (s.noise_band < 1) throw ValidationError("surface.noise_band must be at least 1");
  return s;
}

CommandConfig parse_command(const YAML::Node& n) {
  check_keys(n, "command", {"name", "seed", "target_area", "areas", "radii", "point", "start", "use_minimizers",
                            "draws", "step", "tolerance", "roundness_bound", "ratio_tolerance", "max_iters",
                            "grad_tol", "armijo_c", "memory", "field"});
  CommandConfig c;
  if (!n["name"]) throw ValidationError("command.name is required");
  const auto name = scalar<std::string>(n["name"], "command.name");
  const auto it = kCommands.find(name);
  if (it == kCommands.end()) throw ValidationError("unknown command '" + name + "'");
  c.name = it->second;
  read(n, "seed", "command", c.seed);
  read(n, "target_area", "command", c.target_area);
  if (n["areas"]) c.areas = list(n["areas"], "command.areas");
  if (n["radii"]) c.radii = list(n["radii"], "command.radii");
  if (n["point"]) c.point = vec3(n["point"], "command.point");
  if (n["start"]) c.start = vec3(n["start"], "command.start");
  read(n, "use_minimizers", "command", c.use_minimizers);
  read(n, "draws", "command", c.draws);
  read(n, "step", "command", c.step);
  read(n, "tolerance", "command", c.tolerance);
  read(n, "roundness_bound", "command", c.roundness_bound);
  read(n, "ratio_tolerance", "command", c.ratio_tolerance);
  read(n, "max_iters", "command", c.optimizer.max_iters);
  read(n, "grad_tol", "command", c.optimizer.grad_tol);
  read(n, "armijo_c", "command", c.optimizer.armijo_c);
  read(n, "memory", "command", c.optimizer.memory);
  if (n["field"]) {
    const auto& f = n["field"];
    check_keys(f, "command.field", {"center", "half_width", "points"});
    if (f["center"]) c.field.center = vec3(f["center"], "command.field.center");
    read(f, "half_width", "command.field", c.field.half_width);
    read(f, "points", "command.field", c.field.points_per_axis);
  }

  if (c.draws < 0) throw ValidationError("command.draws must be nonnegative");
  positive(c.step, "command.step");
  positive(c.tolerance, "command.tolerance");
  positive(c.roundness_bound, "command.roundness_bound");
  positive(c.ratio_tolerance, "command.ratio_tolerance");
  try {
    c.optimizer.validate();
    c.field.validate();
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  auto decreasing = [](const std::vector<double>& v, const std::string& what) {
    for (double x : v) positive(x, what + " entries");
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] < v[i - 1])) throw ValidationError(what + " must be strictly decreasing");
  };
  switch (c.name) {
    case Command::Minimize:
      positive(c.target_area, "command.target_area");
      break;
    case Command::Scan:
    case Command::Concentrate:
      if (c.areas.empty()) throw ValidationError("command.areas is required for " + name);
      decreasing(c.areas, "command.areas");
      break;
    case Command::Expand:
      if (c.radii.empty()) c.radii = default_radii();
      decreasing(c.radii, "command.radii");
      if (c.radii.size() < 5) throw ValidationError("command.radii needs at least 5 entries");
      break;
    default:
      break;
  }
  if (c.draws == 0) c.draws = c.name == Command::Moments ? 100 : c.name == Command::CheckVariation ? 20 : 0;
  return c;
}

OutputConfig parse_output(const YAML::Node& n) {
  check_keys(n, "output", {"directory", "formats"});
  OutputConfig o;
  read(n, "directory", "output", o.directory);
  if (n["formats"]) {
    if (!n["formats"].IsSequence()) throw ParseError("output.formats must be a list");
    o.json = o.csv = o.shape = false;
    for (const auto& f : n["formats"]) {
      const auto s = scalar<std::string>(f, "output.formats");
      if (s == "json") o.json = true;
      else if (s == "csv") o.csv = true;
      else if (s == "shape") o.shape = true;
      else throw ValidationError("unknown output format '" + s + "'");
    }
  }
  if (o.directory.empty()) throw ValidationError("output.directory must not be empty");
  return o;
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [name, cmd] : kCommands)
    if (cmd == c) return name;
  return "?";
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ParseError("config must be a mapping of blocks");
  try {
    check_keys(root, "top level", {"model", "lagrangian", "surface", "command", "output"});
    ExperimentConfig cfg;
    if (!root["command"]) throw ValidationError("command block is required");
    cfg.command = parse_command(root["command"]);
    if (!root["model"]) throw ValidationError("model block is required");
    cfg.model = parse_model(root["model"]);
    if (root["lagrangian"]) {
      cfg.has_lagrangian = true;
      cfg.lagrangian = parse_lagrangian(root["lagrangian"]);
    } else if (cfg.command.name != Command::Moments) {
      throw ValidationError("lagrangian block is required for " + to_string(cfg.command.name));
    }
    if (root["surface"]) cfg.surface = parse_surface(root["surface"]);
    if (root["output"]) cfg.output = parse_output(root["output"]);
    return cfg;
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

YAML::Node ExperimentConfig::to_yaml() const {
  YAML::Node root;
  YAML::Node m;
  m["kind"] = model.kind;
  m["chart_radius"] = model.chart_radius;
  if (model.kind == "round-sphere") m["curvature"] = model.curvature;
  if (model.kind == "schwarzschild") {
    m["mass"] = model.mass;
    m["chart_center"] = seq(model.chart_center);
  }
  if (model.kind == "perturbed-flat") {
    if (!model.quadratic.empty()) m["quadratic"] = seq(model.quadratic);
    if (model.quadratic_seed) {
      m["quadratic_random"]["seed"] = *model.quadratic_seed;
      m["quadratic_random"]["scale"] = model.quadratic_scale;
    }
  }
  if (model.kind == "conformally-flat") m["conformal"] = seq(std::array<double, 2>{model.conformal[0], model.conformal[1]});
  m["K0"] = seq(model.k0);
  m["K1"] = seq(model.k1);
  root["model"] = m;

  if (has_lagrangian) {
    if (!lagrangian.keyword.empty()) {
      root["lagrangian"] = lagrangian.keyword;
    } else {
      root["lagrangian"]["alpha"] = lagrangian.alpha;
      root["lagrangian"]["beta"] = lagrangian.beta;
      root["lagrangian"]["c0"] = lagrangian.c0;
      root["lagrangian"]["ct"] = lagrangian.ct;
    }
  }

  YAML::Node s;
  s["l_max"] = surface.l_max;
  s["n_theta"] = surface.n_theta;
  s["center"] = seq(surface.center);
  s["radius"] = surface.radius;
  s["noise"] = surface.noise;
  s["noise_band"] = surface.noise_band;
  if (!surface.shape_file.empty()) s["shape_file"] = surface.shape_file;
  root["surface"] = s;

  YAML::Node c;
  c["name"] = to_string(command.name);
  c["seed"] = command.seed;
  switch (command.name) {
    case Command::Minimize:
      c["target_area"] = command.target_area;
      break;
    case Command::Scan:
    case Command::Concentrate:
      c["areas"] = seq(command.areas);
      break;
    case Command::Expand:
      c["radii"] = seq(command.radii);
      c["point"] = seq(command.point);
      c["use_minimizers"] = command.use_minimizers;
      c["roundness_bound"] = command.roundness_bound;
      c["ratio_tolerance"] = command.ratio_tolerance;
      break;
    case Command::Moments:
      c["point"] = seq(command.point);
      c["draws"] = command.draws;
      break;
    case Command::CheckVariation:
      c["draws"] = command.draws;
      c["step"] = command.step;
      c["tolerance"] = command.tolerance;
      break;
    default:
      break;
  }
  if (command.name == Command::Concentrate) {
    if (command.start) c["start"] = seq(*command.start);
    c["field"]["center"] = seq(command.field.center);
    c["field"]["half_width"] = command.field.half_width;
    c["field"]["points"] = command.field.points_per_axis;
  }
  if (command.name == Command::Minimize || command.name == Command::Scan || command.name == Command::Concentrate ||
      (command.name == Command::Expand && command.use_minimizers)) {
    c["max_iters"] = command.optimizer.max_iters;
    c["grad_tol"] = command.optimizer.grad_tol;
    c["armijo_c"] = command.optimizer.armijo_c;
    c["memory"] = command.optimizer.memory;
  }
  root["command"] = c;

  root["output"]["directory"] = output.directory;
  YAML::Node formats(YAML::NodeType::Sequence);
  if (output.json) formats.push_back("json");
  if (output.csv) formats.push_back("csv");
  if (output.shape) formats.push_back("shape");
  formats.SetStyle(YAML::EmitterStyle::Flow);
  root["output"]["formats"] = formats;
  return root;
}

std::string ExperimentConfig::resolved_text() const {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << to_yaml();
  return out.c_str();
}

ManifoldModel build_model(const ModelConfig& m) {
  const ExtrinsicData k = ExtrinsicData::from_components(m.k0, m.k1);
  if (m.kind == "flat") return ManifoldModel::flat(m.chart_radius, k);
  if (m.kind == "round-sphere") return ManifoldModel::round_sphere(m.curvature, m.chart_radius, k);
  if (m.kind == "schwarzschild") return ManifoldModel::schwarzschild(m.mass, m.chart_center, m.chart_radius, k);
  if (m.kind == "conformally-flat") return ManifoldModel::conformal_flat(m.conformal[0], m.conformal[1], m.chart_radius, k);
  Tensor4 q = zero_tensor4();
  if (!m.quadratic.empty()) {
    int idx = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) q[i][j](a, b) = m.quadratic[idx++];
  } else {
    std::mt19937 rng(*m.quadratic_seed);
    std::uniform_real_distribution<double> u(-m.quadratic_scale, m.quadratic_scale);
    for (auto& row : q)
      for (auto& mat : row)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) mat(a, b) = u(rng);
  }
  return ManifoldModel::perturbed_flat(q, m.chart_radius, k);
}

LagrangianSpec build_lagrangian(const LagrangianConfig& l) {
  if (l.keyword == "hawking") return LagrangianSpec::hawking();
  if (l.keyword == "zero") return LagrangianSpec::zero();
  return LagrangianSpec::family(l.alpha, l.beta, l.c0, l.ct);
}

}  // namespace hawking::cli
