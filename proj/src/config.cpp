#include "msm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "msm/csv.hpp"

namespace msm {

namespace pt = boost::property_tree;

std::string_view command_name(Command command) noexcept {
  switch (command) {
    case Command::UniformFlow: return "uniform-flow";
    case Command::Collapse: return "collapse";
    case Command::Sweep: return "sweep";
  }
  return "";
}

std::optional<Command> parse_command(std::string_view name) noexcept {
  for (Command c : {Command::UniformFlow, Command::Collapse, Command::Sweep}) {
    if (command_name(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view friction_name(FrictionMode mode) noexcept {
  return mode == FrictionMode::MuOfI ? "mu-i" : "constant";
}

namespace {

double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string current;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  std::size_t v = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

FrictionMode parse_friction(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "mu-i") return FrictionMode::MuOfI;
  if (t == "constant") return FrictionMode::Constant;
  throw ConfigError(key + ": expected mu-i or constant, got '" + text + "'");
}

ShearOrder parse_shear_order(const std::string& key, const std::string& text) {
  const std::size_t v = parse_count(key, text);
  if (v == 1) return ShearOrder::First;
  if (v == 2) return ShearOrder::Second;
  throw ConfigError(key + ": expected 1 or 2, got '" + text + "'");
}

Boundary parse_boundary(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "open") return Boundary::Open;
  if (t == "wall") return Boundary::Wall;
  throw ConfigError(key + ": expected open or wall, got '" + text + "'");
}

Regularization::Mode parse_regularization(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "max-bound") return Regularization::Mode::MaxBound;
  if (t == "delta") return Regularization::Mode::Delta;
  throw ConfigError(key + ": expected max-bound or delta, got '" + text + "'");
}

Execution parse_execution(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "serial") return Execution::Serial;
  if (t == "parallel") return Execution::Parallel;
  throw ConfigError(key + ": expected serial or parallel, got '" + text + "'");
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& text, Parse parse) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse(key, item));
  if (out.empty()) throw ConfigError(key + ": list must not be empty");
  return out;
}

// One INI section; records which keys were read so that leftovers can be reported.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  [[nodiscard]] std::optional<std::string> get(const std::string& key) {
    allowed_.insert(key);
    if (tree_ == nullptr) return std::nullopt;
    const auto child = tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!child) return std::nullopt;
    return child->data();
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError(qualified(key) + ": missing required key");
    return *v;
  }

  [[nodiscard]] std::string qualified(const std::string& key) const { return "[" + name_ + "] " + key; }

  void reject_unknown() const {
    if (tree_ == nullptr) return;
    for (const auto& [key, value] : *tree_) {
      if (!allowed_.count(key)) throw ConfigError(qualified(key) + ": unknown key");
    }
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> allowed_;
};

template <class T, class Parse>
void read(Section& section, const std::string& key, T& target, Parse parse) {
  if (auto v = section.get(key)) target = parse(section.qualified(key), *v);
}

void read_double(Section& s, const std::string& key, double& target) { read(s, key, target, parse_double); }
void read_count(Section& s, const std::string& key, std::size_t& target) { read(s, key, target, parse_count); }

// Defaults that depend on the command, applied before the file is read.
RunConfig defaults_for(Command command) {
  RunConfig c;
  c.command = command;
  if (command == Command::UniformFlow) {
    c.nx = 4;
    c.solver.t_end = 1e4;
    c.solver.closure.regularization.mode = Regularization::Mode::Delta;
    c.solver.boundary = {Boundary::Open, Boundary::Open};
    c.solver.stop_on_quiescence = false;
    c.uniform.theta_grid = {0.20, 0.25, 0.30, 0.34, 0.36, 0.38, 0.40, 0.43, 0.46, 0.50, 0.55};
  } else {
    c.nx = 700;
    c.solver.t_end = 20.0;
    c.solver.closure.regularization.mode = Regularization::Mode::MaxBound;
    c.solver.boundary = {Boundary::Wall, Boundary::Wall};
    c.output.w_stations = {0.095, 0.495, 0.995};
  }
  return c;
}

void read_theta(Section& s, double& theta, bool required) {
  const auto rad = s.get("theta");
  const auto deg = s.get("theta_deg");
  if (rad && deg) throw ConfigError(s.qualified("theta") + ": give either theta or theta_deg, not both");
  if (rad) {
    theta = parse_double(s.qualified("theta"), *rad);
  } else if (deg) {
    theta = to_radians(parse_double(s.qualified("theta_deg"), *deg));
  } else if (required) {
    throw ConfigError(s.qualified("theta") + ": missing required key");
  }
}

void validate(const RunConfig& c) {
  try {
    c.rheology.validate();
    c.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.layers == 0) throw ConfigError("[solver] layers: must be >= 1");
  if (c.nx == 0) throw ConfigError("[solver] nx: must be >= 1");
  if (!(c.output.snapshot_interval > 0.0)) throw ConfigError("[output] snapshot_interval: must be positive");
  if (!(c.output.w_interval > 0.0)) throw ConfigError("[output] w_interval: must be positive");
  if (c.output.directory.empty()) throw ConfigError("[output] directory: must not be empty");

  switch (c.command) {
    case Command::UniformFlow: {
      const UniformFlowSettings& u = c.uniform;
      if (!(u.H > 0.0)) throw ConfigError("[scenario] H: must be positive");
      if (!(u.theta >= 0.0 && u.theta < std::numbers::pi / 2)) throw ConfigError("[scenario] theta: must lie in [0, pi/2)");
      if (!(u.error_bound > 0.0)) throw ConfigError("[scenario] error_bound: must be positive");
      if (!(u.steady_tolerance > 0.0)) throw ConfigError("[scenario] steady_tolerance: must be positive");
      if (!(u.dx > 0.0)) throw ConfigError("[scenario] dx: must be positive");
      for (std::size_t n : u.layer_counts) {
        if (n == 0) throw ConfigError("[scenario] layer_counts: entries must be >= 1");
      }
      const double limit = std::atan(c.rheology.mu_2);
      for (double t : u.theta_grid) {
        if (!(t >= 0.0 && t < limit)) {
          throw ConfigError("[scenario] theta_grid: entries must lie in [0, atan(mu_2)), no steady flow above");
        }
      }
      break;
    }
    case Command::Collapse:
      try {
        c.collapse.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[scenario] ") + e.what());
      }
      break;
    case Command::Sweep: {
      const SweepSettings& s = c.sweep;
      CollapseSpec geometry = c.collapse;
      for (double deg : s.thetas_deg) {
        geometry.theta = to_radians(deg);
        try {
          geometry.validate();
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("[scenario] thetas_deg: ") + e.what());
        }
        if (s.experiment_beds) {
          try {
            (void)experiment_bed_thicknesses(deg);
          } catch (const std::invalid_argument&) {
            throw ConfigError("[scenario] bed_thicknesses: no campaign bed thicknesses for theta_deg = " +
                              format_number(deg));
          }
        }
      }
      for (double h : s.bed_thicknesses) {
        if (!(h >= 0.0)) throw ConfigError("[scenario] bed_thicknesses: entries must be >= 0");
      }
      for (std::size_t n : s.layer_counts) {
        if (n == 0) throw ConfigError("[scenario] layer_counts: entries must be >= 1");
      }
      break;
    }
  }
}

}  // namespace

RunConfig parse_config(Command command, std::string_view text, const CliOverrides& overrides) {
  pt::ptree tree;
  {
    std::istringstream in{std::string(text)};
    try {
      pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
  }
  static const std::set<std::string> kSections = {"rheology", "solver", "scenario", "output"};
  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty()) throw ConfigError(name + ": key outside any section");
    if (!kSections.count(name)) throw ConfigError("[" + name + "]: unknown section");
  }
  auto section = [&tree](const std::string& name) {
    const auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name);
  };

  RunConfig c = defaults_for(command);
  Section rheology = section("rheology");
  Section solver = section("solver");
  Section scenario = section("scenario");
  Section output = section("output");

  // [rheology]
  std::optional<Preset> preset;
  if (auto name = rheology.get("preset")) {
    c.preset = trim(*name);
    preset = find_preset(c.preset);
    if (!preset) throw ConfigError(rheology.qualified("preset") + ": unknown preset '" + c.preset + "'");
    c.rheology = preset->rheology;
  }
  struct Field {
    const char* key;
    double RheologyParams::*member;
  };
  for (const Field f : {Field{"mu_s", &RheologyParams::mu_s}, Field{"mu_2", &RheologyParams::mu_2},
                        Field{"I0", &RheologyParams::I0}, Field{"d_s", &RheologyParams::d_s},
                        Field{"rho_s", &RheologyParams::rho_s}, Field{"phi_s", &RheologyParams::phi_s}}) {
    if (preset) {
      read_double(rheology, f.key, c.rheology.*(f.member));
    } else {
      c.rheology.*(f.member) = parse_double(rheology.qualified(f.key), rheology.require(f.key));
    }
  }
  read(rheology, "friction", c.solver.closure.friction, parse_friction);
  read(rheology, "regularization", c.solver.closure.regularization.mode, parse_regularization);
  read_double(rheology, "delta", c.solver.closure.regularization.delta);
  read_double(rheology, "eta_cap_coefficient", c.solver.closure.regularization.eta_cap_coefficient);
  read(rheology, "basal_friction", c.solver.basal_friction, parse_bool);

  // [solver]
  if (command == Command::Sweep) {
    read_count(solver, "layers", c.layers);
  } else {
    c.layers = parse_count(solver.qualified("layers"), solver.require("layers"));
  }
  read_count(solver, "nx", c.nx);
  read_double(solver, "cfl", c.solver.cfl);
  read_double(solver, "t_end", c.solver.t_end);
  read_count(solver, "max_steps", c.solver.max_steps);
  read(solver, "shear_order", c.solver.closure.shear_order, parse_shear_order);
  read(solver, "boundary_left", c.solver.boundary.left, parse_boundary);
  read(solver, "boundary_right", c.solver.boundary.right, parse_boundary);
  read_double(solver, "u_stop", c.solver.u_stop);
  read_count(solver, "n_stop", c.solver.n_stop);
  read(solver, "stop_on_quiescence", c.solver.stop_on_quiescence, parse_bool);
  read(solver, "execution", c.solver.execution, parse_execution);

  // [scenario]
  switch (command) {
    case Command::UniformFlow: {
      UniformFlowSettings& u = c.uniform;
      if (preset && preset->theta) u.theta = *preset->theta;
      read_theta(scenario, u.theta, !(preset && preset->theta));
      read_double(scenario, "H", u.H);
      read_double(scenario, "error_bound", u.error_bound);
      read_double(scenario, "steady_tolerance", u.steady_tolerance);
      read_double(scenario, "dx", u.dx);
      if (auto v = scenario.get("layer_counts")) {
        u.layer_counts = parse_list<std::size_t>(scenario.qualified("layer_counts"), *v, parse_count);
      }
      if (auto v = scenario.get("theta_grid")) {
        u.theta_grid = parse_list<double>(scenario.qualified("theta_grid"), *v, parse_double);
      }
      break;
    }
    case Command::Collapse:
      read_theta(scenario, c.collapse.theta, true);
      c.collapse.h_i = parse_double(scenario.qualified("h_i"), scenario.require("h_i"));
      [[fallthrough]];
    case Command::Sweep:
      read_double(scenario, "h0", c.collapse.h0);
      read_double(scenario, "r0", c.collapse.r0);
      read_double(scenario, "x_min", c.collapse.x_min);
      read_double(scenario, "x_max", c.collapse.x_max);
      break;
  }
  if (command == Command::Sweep) {
    SweepSettings& s = c.sweep;
    s.thetas_deg = parse_list<double>(scenario.qualified("thetas_deg"), scenario.require("thetas_deg"), parse_double);
    if (auto v = scenario.get("bed_thicknesses")) {
      if (trim(*v) == "experiments") {
        s.experiment_beds = true;
      } else {
        s.experiment_beds = false;
        s.bed_thicknesses = parse_list<double>(scenario.qualified("bed_thicknesses"), *v, parse_double);
      }
    }
    s.friction_modes = {c.solver.closure.friction};
    if (auto v = scenario.get("friction_modes")) {
      s.friction_modes = parse_list<FrictionMode>(scenario.qualified("friction_modes"), *v, parse_friction);
    }
    s.layer_counts = parse_list<std::size_t>(scenario.qualified("layer_counts"),
                                             scenario.require("layer_counts"), parse_count);
    s.shear_orders = {c.solver.closure.shear_order};
    if (auto v = scenario.get("shear_orders")) {
      s.shear_orders = parse_list<ShearOrder>(scenario.qualified("shear_orders"), *v, parse_shear_order);
    }
  }

  // [output]
  if (auto v = output.get("directory")) c.output.directory = trim(*v);
  read_double(output, "snapshot_interval", c.output.snapshot_interval);
  read_double(output, "w_interval", c.output.w_interval);
  if (auto v = output.get("w_stations")) {
    c.output.w_stations = parse_list<double>(output.qualified("w_stations"), *v, parse_double);
  }

  for (const Section* s : {&rheology, &solver, &scenario, &output}) s->reject_unknown();

  // Command-line overrides.
  if (overrides.layers) {
    c.layers = *overrides.layers;
    if (command == Command::Sweep) c.sweep.layer_counts = {*overrides.layers};
  }
  if (overrides.nx) c.nx = *overrides.nx;
  if (overrides.cfl) c.solver.cfl = *overrides.cfl;
  if (overrides.friction) {
    c.solver.closure.friction = *overrides.friction;
    if (command == Command::Sweep) c.sweep.friction_modes = {*overrides.friction};
  }
  if (overrides.shear_order) {
    c.solver.closure.shear_order = *overrides.shear_order;
    if (command == Command::Sweep) c.sweep.shear_orders = {*overrides.shear_order};
  }
  if (overrides.out) c.output.directory = *overrides.out;

  if (command == Command::UniformFlow) {
    auto& counts = c.uniform.layer_counts;
    counts.push_back(c.layers);
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  }

  validate(c);
  return c;
}

RunConfig load_config(Command command, const std::filesystem::path& path, const CliOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(command, text.str(), overrides);
}

namespace {

template <class T, class Format>
std::string join(const std::vector<T>& values, Format format) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += ' ';
    out += format(values[k]);
  }
  return out;
}

std::string num(double v) { return format_number(v); }
std::string count(std::size_t v) { return std::to_string(v); }
std::string order(ShearOrder o) { return o == ShearOrder::First ? "1" : "2"; }
std::string boundary(Boundary b) { return b == Boundary::Open ? "open" : "wall"; }
std::string boolean(bool b) { return b ? "true" : "false"; }
std::string friction(FrictionMode m) { return std::string(friction_name(m)); }

}  // namespace

std::string echo_config(const RunConfig& c) {
  std::ostringstream out;
  auto line = [&out](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };

  out << "; effective settings of a " << command_name(c.command) << " run\n";
  out << "[rheology]\n";
  if (!c.preset.empty()) line("preset", c.preset);
  line("mu_s", num(c.rheology.mu_s));
  line("mu_2", num(c.rheology.mu_2));
  line("I0", num(c.rheology.I0));
  line("d_s", num(c.rheology.d_s));
  line("rho_s", num(c.rheology.rho_s));
  line("phi_s", num(c.rheology.phi_s));
  line("friction", friction(c.solver.closure.friction));
  line("regularization",
       c.solver.closure.regularization.mode == Regularization::Mode::MaxBound ? "max-bound" : "delta");
  line("delta", num(c.solver.closure.regularization.delta));
  line("eta_cap_coefficient", num(c.solver.closure.regularization.eta_cap_coefficient));
  line("basal_friction", boolean(c.solver.basal_friction));

  out << "\n[solver]\n";
  line("layers", count(c.layers));
  line("nx", count(c.nx));
  line("cfl", num(c.solver.cfl));
  line("t_end", num(c.solver.t_end));
  line("max_steps", count(c.solver.max_steps));
  line("shear_order", order(c.solver.closure.shear_order));
  line("boundary_left", boundary(c.solver.boundary.left));
  line("boundary_right", boundary(c.solver.boundary.right));
  line("u_stop", num(c.solver.u_stop));
  line("n_stop", count(c.solver.n_stop));
  line("stop_on_quiescence", boolean(c.solver.stop_on_quiescence));
  line("execution", c.solver.execution == Execution::Serial ? "serial" : "parallel");

  out << "\n[scenario]\n";
  switch (c.command) {
    case Command::UniformFlow:
      line("H", num(c.uniform.H));
      line("theta", num(c.uniform.theta));
      line("error_bound", num(c.uniform.error_bound));
      line("steady_tolerance", num(c.uniform.steady_tolerance));
      line("dx", num(c.uniform.dx));
      line("layer_counts", join(c.uniform.layer_counts, count));
      line("theta_grid", join(c.uniform.theta_grid, num));
      break;
    case Command::Collapse:
      line("theta", num(c.collapse.theta));
      line("h_i", num(c.collapse.h_i));
      [[fallthrough]];
    case Command::Sweep:
      line("h0", num(c.collapse.h0));
      line("r0", num(c.collapse.r0));
      line("x_min", num(c.collapse.x_min));
      line("x_max", num(c.collapse.x_max));
      break;
  }
  if (c.command == Command::Sweep) {
    line("thetas_deg", join(c.sweep.thetas_deg, num));
    line("bed_thicknesses", c.sweep.experiment_beds ? "experiments" : join(c.sweep.bed_thicknesses, num));
    line("friction_modes", join(c.sweep.friction_modes, friction));
    line("layer_counts", join(c.sweep.layer_counts, count));
    line("shear_orders", join(c.sweep.shear_orders, order));
  }

  out << "\n[output]\n";
  line("directory", c.output.directory);
  line("snapshot_interval", num(c.output.snapshot_interval));
  line("w_interval", num(c.output.w_interval));
  if (!c.output.w_stations.empty()) line("w_stations", join(c.output.w_stations, num));
  return out.str();
}

}  // namespace msm
