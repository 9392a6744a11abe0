#include "memheat/config.hpp"

#include "memheat/error.hpp"
#include "memheat/mesh.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace memheat {

namespace pt = boost::property_tree;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::ConfigInvalid, msg); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    bad(key + ": expected a number, got '" + raw + "'");
  }
  return v;
}

template <class Int>
Int to_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  Int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    bad(key + ": expected an integer, got '" + raw + "'");
  }
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::string s = raw;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(to_double(key, tok));
  return out;
}

using Setter = void (*)(RunConfig&, const std::string& key, const std::string& value);

struct KeySpec {
  const char* section;
  const char* key;
  Setter set;
};

#define MH_NUM(field) [](RunConfig& c, const std::string& k, const std::string& v) { c.field = to_double(k, v); }
#define MH_INT(field) [](RunConfig& c, const std::string& k, const std::string& v) { c.field = to_int<int>(k, v); }
#define MH_STR(field) [](RunConfig& c, const std::string&, const std::string& v) { c.field = trim(v); }

const KeySpec kKeys[] = {
    {"kernel", "family", MH_STR(kernel.family)},
    {"kernel", "a", MH_NUM(kernel.a)},
    {"kernel", "b", MH_NUM(kernel.b)},
    {"kernel", "alpha", MH_NUM(kernel.alpha)},
    {"kernel", "nu", MH_NUM(kernel.nu)},
    {"mesh", "dim", MH_INT(mesh.dim)},
    {"mesh", "extent", MH_NUM(mesh.extent)},
    {"mesh", "cells", MH_INT(mesh.cells)},
    {"field", "components", MH_INT(field.components)},
    {"field", "initial", MH_STR(field.initial)},
    {"memory", "mode", MH_STR(memory.mode)},
    {"memory", "modes", MH_INT(memory.modes)},
    {"memory", "tol", MH_NUM(memory.tol)},
    {"memory", "near_field", MH_NUM(memory.near_field)},
    {"solver", "m", MH_NUM(solver.m)},
    {"solver", "dt", MH_NUM(solver.dt)},
    {"solver", "t_final", MH_NUM(solver.t_final)},
    {"solver", "newton_tol", MH_NUM(solver.newton_tol)},
    {"solver", "newton_max_iter", MH_INT(solver.newton_max_iter)},
    {"solver", "epsilon", MH_NUM(solver.epsilon)},
    {"solver", "time_mesh", MH_STR(solver.time_mesh)},
    {"A", "mode", MH_STR(A.mode)},
    {"A", "c0", MH_NUM(A.c0)},
    {"A", "entries", [](RunConfig& c, const std::string& k, const std::string& v) { c.A.entries = to_list(k, v); }},
    {"output", "dir", MH_STR(output.dir)},
    {"output", "format", MH_STR(output.format)},
    {"analysis", "tail_start", MH_NUM(analysis.tail_start)},
    {"analysis", "refine_horizon", MH_NUM(analysis.refine_horizon)},
};

#undef MH_NUM
#undef MH_INT
#undef MH_STR

const KeySpec* find_key(const std::string& section, const std::string& key) {
  for (const auto& k : kKeys) {
    if (section == k.section && key == k.key) return &k;
  }
  return nullptr;
}

}  // namespace

TimeMesh parse_time_mesh(const std::string& text) {
  const std::string s = trim(text);
  if (s == "uniform") return {};
  if (s.rfind("geometric(", 0) == 0 && s.back() == ')') {
    const double r = to_double("solver.time_mesh", s.substr(10, s.size() - 11));
    if (!(r >= 1.0)) bad("solver.time_mesh: geometric ratio must be >= 1");
    return {TimeMesh::Kind::Geometric, r};
  }
  bad("solver.time_mesh: expected uniform or geometric(<ratio>), got '" + text + "'");
}

std::string to_string(const TimeMesh& mesh) {
  if (mesh.kind == TimeMesh::Kind::Uniform) return "uniform";
  return "geometric(" + format_double(mesh.ratio) + ")";
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    bad(std::string("syntax: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      // top-level key
      if (name == "preset") {
        cfg.preset = trim(node.data());
      } else if (name == "seed") {
        cfg.seed = to_int<std::uint64_t>("seed", node.data());
      } else {
        bad("unknown top-level key '" + name + "'");
      }
      continue;
    }
    for (const auto& [key, value] : node) {
      const KeySpec* spec = find_key(name, key);
      if (!spec) bad("unknown key '" + name + "." + key + "'");
      spec->set(cfg, name + "." + key, value.data());
    }
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  auto num = [&](const char* key, double v) { os << key << " = " << format_double(v) << "\n"; };
  auto opt = [&](const char* key, const std::optional<double>& v) {
    if (v) num(key, *v);
  };
  if (!c.preset.empty()) os << "preset = " << c.preset << "\n";
  os << "seed = " << c.seed << "\n";
  os << "\n[kernel]\nfamily = " << c.kernel.family << "\n";
  opt("a", c.kernel.a);
  opt("b", c.kernel.b);
  opt("alpha", c.kernel.alpha);
  opt("nu", c.kernel.nu);
  os << "\n[mesh]\ndim = " << c.mesh.dim << "\n";
  num("extent", c.mesh.extent);
  os << "cells = " << c.mesh.cells << "\n";
  os << "\n[field]\n";
  if (c.field.components) os << "components = " << *c.field.components << "\n";
  os << "initial = " << c.field.initial << "\n";
  os << "\n[memory]\nmode = " << c.memory.mode << "\nmodes = " << c.memory.modes << "\n";
  num("tol", c.memory.tol);
  num("near_field", c.memory.near_field);
  os << "\n[solver]\n";
  num("m", c.solver.m);
  num("dt", c.solver.dt);
  num("t_final", c.solver.t_final);
  num("newton_tol", c.solver.newton_tol);
  os << "newton_max_iter = " << c.solver.newton_max_iter << "\n";
  num("epsilon", c.solver.epsilon);
  os << "time_mesh = " << c.solver.time_mesh << "\n";
  os << "\n[A]\nmode = " << c.A.mode << "\n";
  num("c0", c.A.c0);
  if (!c.A.entries.empty()) {
    os << "entries =";
    for (double v : c.A.entries) os << " " << format_double(v);
    os << "\n";
  }
  os << "\n[output]\ndir = " << c.output.dir << "\nformat = " << c.output.format << "\n";
  os << "\n[analysis]\n";
  opt("tail_start", c.analysis.tail_start);
  num("refine_horizon", c.analysis.refine_horizon);
  return os.str();
}

void validate_config(const RunConfig& c) {
  const auto& k = c.kernel;
  std::set<std::string> allowed;
  if (k.family == "power_law") {
    allowed = {"a", "nu"};
  } else if (k.family == "stretched_exp") {
    allowed = {"a", "b", "alpha"};
  } else if (k.family == "pure_exp") {
    allowed = {"a", "b"};
  } else if (k.family != "none") {
    bad("kernel.family must be none, power_law, stretched_exp or pure_exp, got '" + k.family + "'");
  }
  const std::pair<const char*, const std::optional<double>*> params[] = {
      {"a", &k.a}, {"b", &k.b}, {"alpha", &k.alpha}, {"nu", &k.nu}};
  for (const auto& [name, value] : params) {
    const bool wanted = allowed.count(name) > 0;
    if (wanted && !value->has_value()) bad("kernel." + std::string(name) + " is required for " + k.family);
    if (!wanted && value->has_value()) {
      bad("kernel." + std::string(name) + " is not a parameter of family " + k.family);
    }
  }
  if (c.mesh.dim != 1 && c.mesh.dim != 2) bad("mesh.dim must be 1 or 2");
  if (!(c.mesh.extent > 0.0)) bad("mesh.extent must be positive");
  if (c.mesh.cells < 1) bad("mesh.cells must be positive");
  if (c.components() < 1) bad("field.components must be >= 1");
  parse_initial_condition(c.field.initial == "random" ? "random(0)" : c.field.initial);
  if (c.memory.mode != "direct" && c.memory.mode != "compressed") {
    bad("memory.mode must be direct or compressed");
  }
  if (!(c.memory.near_field >= 0.0)) bad("memory.near_field must be >= 0");
  parse_time_mesh(c.solver.time_mesh);
  if (c.A.mode == "identity") {
    if (!c.A.entries.empty()) bad("A.entries is not used with A.mode = identity");
  } else if (c.A.mode == "constant" || c.A.mode == "periodic") {
    const std::size_t nc = static_cast<std::size_t>(c.components());
    if (!c.A.entries.empty() && c.A.entries.size() != nc * nc) {
      bad("A.entries needs components^2 = " + std::to_string(nc * nc) + " values");
    }
    if (c.A.mode == "constant" && c.A.entries.empty()) bad("A.mode = constant needs A.entries");
  } else {
    bad("A.mode must be identity, constant or periodic");
  }
  if (c.output.format != "csv" && c.output.format != "json" && c.output.format != "both") {
    bad("output.format must be csv, json or both");
  }
  if (c.output.dir.empty()) bad("output.dir must not be empty");
  if (!(c.analysis.refine_horizon > 0.0)) bad("analysis.refine_horizon must be positive");
}

}  // namespace memheat
