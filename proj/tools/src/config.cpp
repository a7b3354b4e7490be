#include "ptwg/cli/config.hpp"

#include "ptwg/error.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ptwg::cli {

namespace {

using LineMap = std::map<std::string, int>;

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& what) {
  throw ConfigError(fmt::format("line {}: {}", node.Mark().line + 1, what));
}

class Reader {
 public:
  explicit Reader(LineMap& lines) : lines_(lines) {}

  void expect_map(const YAML::Node& node, const std::string& path) {
    if (!node.IsMap()) fail_at(node, fmt::format("'{}' must be a mapping", path));
  }

  void check_keys(const YAML::Node& node, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    expect_map(node, path);
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) {
        fail_at(kv.first, fmt::format("unknown key '{}' in '{}'", key, path));
      }
    }
  }

  template <class T>
  void read(const YAML::Node& node, const std::string& path, const char* key, T& out) {
    const YAML::Node v = node[key];
    if (!v) return;
    const std::string full = path.empty() ? key : path + "." + key;
    lines_[full] = v.Mark().line + 1;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      fail_at(v, fmt::format("'{}' has the wrong type", full));
    }
  }

 private:
  LineMap& lines_;
};

ProfileSpec parse_profile(Reader& r, const YAML::Node& node, const std::string& path) {
  r.check_keys(node, path, {"baseline", "terms", "table"});
  ProfileSpec spec;
  if (node["table"]) {
    if (node["baseline"] || node["terms"]) {
      fail_at(node["table"], fmt::format("'{}' takes either a table or baseline/terms", path));
    }
    std::string table;
    r.read(node, path, "table", table);
    spec.table = table;
    return spec;
  }
  r.read(node, path, "baseline", spec.baseline);
  if (const YAML::Node terms = node["terms"]) {
    if (!terms.IsSequence()) fail_at(terms, fmt::format("'{}.terms' must be a sequence", path));
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tp = fmt::format("{}.terms[{}]", path, i);
      const YAML::Node t = terms[i];
      r.check_keys(t, tp, {"kind", "amplitude", "width", "center"});
      BumpTerm term;
      std::string kind = "gaussian";
      r.read(t, tp, "kind", kind);
      if (kind == "gaussian") {
        term.kind = BumpTerm::Kind::gaussian;
      } else if (kind == "compact") {
        term.kind = BumpTerm::Kind::compact;
      } else {
        fail_at(t["kind"], fmt::format("'{}.kind' must be gaussian or compact", tp));
      }
      r.read(t, tp, "amplitude", term.amplitude);
      r.read(t, tp, "width", term.width);
      r.read(t, tp, "center", term.center);
      if (!(term.width > 0.0)) fail_at(t, fmt::format("'{}.width' must be positive", tp));
      spec.terms.push_back(term);
    }
  }
  return spec;
}

WindowConfig parse_window(Reader& r, const YAML::Node& node, const std::string& path) {
  r.check_keys(node, path, {"re_min", "re_max", "im_min", "im_max"});
  WindowConfig w;
  r.read(node, path, "re_min", w.re_min);
  r.read(node, path, "re_max", w.re_max);
  r.read(node, path, "im_min", w.im_min);
  r.read(node, path, "im_max", w.im_max);
  if (!(w.re_max > w.re_min) || !(w.im_max >= w.im_min)) {
    fail_at(node, fmt::format("'{}' is an empty box", path));
  }
  return w;
}

void require(bool ok, const LineMap* lines, const std::string& key, const std::string& what) {
  if (ok) return;
  if (lines) {
    if (auto it = lines->find(key); it != lines->end()) {
      throw ConfigError(fmt::format("line {}: {}", it->second, what));
    }
  }
  throw ConfigError(what);
}

void validate_config(const RunConfig& c, const LineMap* lines) {
  auto positive = [&](double v, const std::string& key) {
    require(std::isfinite(v) && v > 0.0, lines, key, fmt::format("'{}' must be positive", key));
  };
  positive(c.solver.tol, "solver.tol");
  require(c.solver.max_restarts >= 1, lines, "solver.max_restarts",
          "'solver.max_restarts' must be at least 1");
  require(c.solver.krylov_dim >= 0, lines, "solver.krylov_dim", "'solver.krylov_dim' must be >= 0");
  require(c.solver.deflation_checks >= 0, lines, "solver.deflation_checks",
          "'solver.deflation_checks' must be >= 0");
  require(c.spectrum.k >= 1, lines, "spectrum.k", "'spectrum.k' must be at least 1");
  require(c.sweep.parameter == "coupling" || c.sweep.parameter == "perturbation", lines,
          "sweep.parameter", "'sweep.parameter' must be coupling or perturbation");
  require(c.sweep.filter == "none" || c.sweep.filter == "threshold" || c.sweep.filter == "l_stability",
          lines, "sweep.filter", "'sweep.filter' must be none, threshold or l_stability");
  require(c.sweep.source == "solver" || c.sweep.source == "synthetic_sqrt", lines, "sweep.source",
          "'sweep.source' must be solver or synthetic_sqrt");
  require(c.sweep.steps >= 2, lines, "sweep.steps", "'sweep.steps' must be at least 2");
  require(c.sweep.stop > c.sweep.start, lines, "sweep.stop", "'sweep.stop' must exceed 'sweep.start'");
  positive(c.sweep.collision_tol, "sweep.collision_tol");
  positive(c.sweep.real_tol, "sweep.real_tol");
  positive(c.sweep.refine_tol, "sweep.refine_tol");
  positive(c.sweep.min_jump, "sweep.min_jump");
  positive(c.sweep.jump_factor, "sweep.jump_factor");
  positive(c.sweep.l_stability_tol, "sweep.l_stability_tol");
  require(c.sweep.l_factor > 1.0, lines, "sweep.l_factor", "'sweep.l_factor' must exceed 1");
  require(c.sweep.discovery_shifts >= 1, lines, "sweep.discovery_shifts",
          "'sweep.discovery_shifts' must be at least 1");
  require(c.sweep.eigs_per_shift >= 1, lines, "sweep.eigs_per_shift",
          "'sweep.eigs_per_shift' must be at least 1");
  positive(c.perturb.refine_tol, "perturb.refine_tol");
  require(c.perturb.refine_parameter == "coupling" || c.perturb.refine_parameter == "perturbation",
          lines, "perturb.refine_parameter",
          "'perturb.refine_parameter' must be coupling or perturbation");
  positive(c.perturb.cluster.radius_rel, "perturb.cluster.radius_rel");
  positive(c.perturb.cluster.radius_abs, "perturb.cluster.radius_abs");
  positive(c.perturb.cluster.self_orthogonality_tol, "perturb.cluster.self_orthogonality_tol");
  positive(c.perturb.cluster.gram_tol, "perturb.cluster.gram_tol");
  positive(c.perturb.eps_min, "perturb.eps_min");
  require(c.perturb.eps_max >= 100.0 * c.perturb.eps_min, lines, "perturb.eps_max",
          "'perturb.eps_max' must be at least 100 * 'perturb.eps_min'");
  require(c.perturb.eps_count >= 5, lines, "perturb.eps_count", "'perturb.eps_count' must be >= 5");
  if (c.perturb.refine_bracket) {
    require((*c.perturb.refine_bracket)[1] > (*c.perturb.refine_bracket)[0], lines,
            "perturb.refine_bracket", "'perturb.refine_bracket' must be increasing");
  }
  require(c.check.k >= 1, lines, "check.k", "'check.k' must be at least 1");
  positive(c.check.kernel_rel_tol, "check.kernel_rel_tol");
  positive(c.check.identity_tol, "check.identity_tol");
  positive(c.check.pt_factor, "check.pt_factor");
  positive(c.check.gauge.slope_tol, "check.gauge.slope_tol");
  for (const auto& g : c.check.gauge.grids) {
    require(g[0] >= 8 && g[1] >= 4, lines, "check.gauge.grids",
            "'check.gauge.grids' entries need n1 >= 8 and n2 >= 4");
  }
  try {
    StripGeometry::make(c.scenario.d, c.scenario.L, c.scenario.n1, c.scenario.n2);
  } catch (const Error& e) {
    require(false, lines, "scenario.n1", fmt::format("invalid scenario geometry: {}", e.what()));
  }
  require(std::isfinite(c.scenario.t) && std::isfinite(c.scenario.epsilon), lines,
          "scenario.epsilon", "'scenario.t' and 'scenario.epsilon' must be finite");
}

void emit_profile(YAML::Emitter& out, const ProfileSpec& p) {
  out << YAML::BeginMap;
  if (p.table) {
    out << YAML::Key << "table" << YAML::Value << *p.table;
  } else {
    out << YAML::Key << "baseline" << YAML::Value << p.baseline;
    out << YAML::Key << "terms" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : p.terms) {
      out << YAML::BeginMap;
      out << YAML::Key << "kind" << YAML::Value
          << (t.kind == BumpTerm::Kind::gaussian ? "gaussian" : "compact");
      out << YAML::Key << "amplitude" << YAML::Value << t.amplitude;
      out << YAML::Key << "width" << YAML::Value << t.width;
      out << YAML::Key << "center" << YAML::Value << t.center;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
}

void emit_window(YAML::Emitter& out, const WindowConfig& w) {
  out << YAML::BeginMap;
  out << YAML::Key << "re_min" << YAML::Value << w.re_min;
  out << YAML::Key << "re_max" << YAML::Value << w.re_max;
  out << YAML::Key << "im_min" << YAML::Value << w.im_min;
  out << YAML::Key << "im_max" << YAML::Value << w.im_max;
  out << YAML::EndMap;
}

}  // namespace

std::vector<double> SweepConfig::grid() const {
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    g[static_cast<std::size_t>(i)] = (start * (steps - 1 - i) + stop * i) / (steps - 1);
  }
  return g;
}

std::vector<double> PerturbConfig::epsilons() const {
  std::vector<double> e(static_cast<std::size_t>(eps_count));
  const double a = std::log10(eps_min);
  const double b = std::log10(eps_max);
  for (int i = 0; i < eps_count; ++i) {
    e[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (eps_count - 1));
  }
  return e;
}

void RunConfig::validate() const { validate_config(*this, nullptr); }

WaveguideScenario RunConfig::make_scenario() const {
  WaveguideScenario s;
  s.geometry = StripGeometry::make(scenario.d, scenario.L, scenario.n1, scenario.n2);
  s.alpha = sample_profile(s.geometry, scenario.alpha, base_dir);
  s.beta = sample_profile(s.geometry, scenario.beta, base_dir);
  s.t = scenario.t;
  s.epsilon = scenario.epsilon;
  return s;
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.tol = solver.tol;
  o.max_restarts = solver.max_restarts;
  o.krylov_dim = solver.krylov_dim;
  o.seed = solver.seed;
  o.deflation_checks = solver.deflation_checks;
  return o;
}

ClusterOptions RunConfig::cluster_options() const {
  ClusterOptions o;
  o.radius_rel = perturb.cluster.radius_rel;
  o.radius_abs = perturb.cluster.radius_abs;
  o.self_orthogonality_tol = perturb.cluster.self_orthogonality_tol;
  o.gram_tol = perturb.cluster.gram_tol;
  return o;
}

TrackerOptions RunConfig::tracker_options() const {
  TrackerOptions o;
  o.solver = solver_options();
  o.discovery_shifts = sweep.discovery_shifts;
  o.eigs_per_shift = sweep.eigs_per_shift;
  o.min_jump = sweep.min_jump;
  o.jump_factor = sweep.jump_factor;
  o.collision_tol = sweep.collision_tol;
  o.real_tol = sweep.real_tol;
  o.filter = sweep.filter == "none"        ? EssentialFilter::none
             : sweep.filter == "threshold" ? EssentialFilter::threshold
                                           : EssentialFilter::threshold_and_l_stability;
  o.l_factor = sweep.l_factor;
  o.l_stability_tol = sweep.l_stability_tol;
  o.refine_tol = sweep.refine_tol;
  o.cluster = cluster_options();
  return o;
}

SweepParameter RunConfig::sweep_parameter() const {
  return sweep.parameter == "coupling" ? SweepParameter::coupling : SweepParameter::perturbation;
}

RunConfig parse_config(const std::string& yaml_text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  RunConfig c;
  c.base_dir = base_dir;
  if (!root || root.IsNull()) return c;
  LineMap lines;
  Reader r(lines);
  r.check_keys(root, "config",
               {"scenario", "solver", "spectrum", "sweep", "perturb", "check", "outputs"});

  if (const YAML::Node s = root["scenario"]) {
    r.check_keys(s, "scenario", {"d", "L", "n1", "n2", "t", "epsilon", "alpha", "beta"});
    r.read(s, "scenario", "d", c.scenario.d);
    r.read(s, "scenario", "L", c.scenario.L);
    r.read(s, "scenario", "n1", c.scenario.n1);
    r.read(s, "scenario", "n2", c.scenario.n2);
    r.read(s, "scenario", "t", c.scenario.t);
    r.read(s, "scenario", "epsilon", c.scenario.epsilon);
    if (s["alpha"]) c.scenario.alpha = parse_profile(r, s["alpha"], "scenario.alpha");
    if (s["beta"]) c.scenario.beta = parse_profile(r, s["beta"], "scenario.beta");
  }
  if (const YAML::Node s = root["solver"]) {
    r.check_keys(s, "solver", {"tol", "max_restarts", "krylov_dim", "seed", "deflation_checks"});
    r.read(s, "solver", "tol", c.solver.tol);
    r.read(s, "solver", "max_restarts", c.solver.max_restarts);
    r.read(s, "solver", "krylov_dim", c.solver.krylov_dim);
    r.read(s, "solver", "seed", c.solver.seed);
    r.read(s, "solver", "deflation_checks", c.solver.deflation_checks);
  }
  if (const YAML::Node s = root["spectrum"]) {
    r.check_keys(s, "spectrum", {"target", "k", "write_eigenvectors", "window"});
    if (const YAML::Node t = s["target"]) {
      lines["spectrum.target"] = t.Mark().line + 1;
      try {
        if (t.IsSequence()) {
          if (t.size() != 2) fail_at(t, "'spectrum.target' must be a number or [re, im]");
          c.spectrum.target_re = t[0].as<double>();
          c.spectrum.target_im = t[1].as<double>();
        } else {
          c.spectrum.target_re = t.as<double>();
        }
      } catch (const YAML::Exception&) {
        fail_at(t, "'spectrum.target' has the wrong type");
      }
    }
    r.read(s, "spectrum", "k", c.spectrum.k);
    r.read(s, "spectrum", "write_eigenvectors", c.spectrum.write_eigenvectors);
    if (s["window"]) c.spectrum.window = parse_window(r, s["window"], "spectrum.window");
  }
  if (const YAML::Node s = root["sweep"]) {
    r.check_keys(s, "sweep",
                 {"parameter", "start", "stop", "steps", "window", "discovery_shifts",
                  "eigs_per_shift", "min_jump", "jump_factor", "collision_tol", "real_tol", "filter",
                  "l_factor", "l_stability_tol", "refine", "refine_tol", "source", "synthetic"});
    auto& w = c.sweep;
    r.read(s, "sweep", "parameter", w.parameter);
    r.read(s, "sweep", "start", w.start);
    r.read(s, "sweep", "stop", w.stop);
    r.read(s, "sweep", "steps", w.steps);
    if (s["window"]) w.window = parse_window(r, s["window"], "sweep.window");
    r.read(s, "sweep", "discovery_shifts", w.discovery_shifts);
    r.read(s, "sweep", "eigs_per_shift", w.eigs_per_shift);
    r.read(s, "sweep", "min_jump", w.min_jump);
    r.read(s, "sweep", "jump_factor", w.jump_factor);
    r.read(s, "sweep", "collision_tol", w.collision_tol);
    r.read(s, "sweep", "real_tol", w.real_tol);
    r.read(s, "sweep", "filter", w.filter);
    r.read(s, "sweep", "l_factor", w.l_factor);
    r.read(s, "sweep", "l_stability_tol", w.l_stability_tol);
    r.read(s, "sweep", "refine", w.refine);
    r.read(s, "sweep", "refine_tol", w.refine_tol);
    r.read(s, "sweep", "source", w.source);
    if (const YAML::Node syn = s["synthetic"]) {
      r.check_keys(syn, "sweep.synthetic", {"p0", "center", "scale"});
      r.read(syn, "sweep.synthetic", "p0", w.synthetic.p0);
      r.read(syn, "sweep.synthetic", "center", w.synthetic.center);
      r.read(syn, "sweep.synthetic", "scale", w.synthetic.scale);
    }
  }
  if (const YAML::Node s = root["perturb"]) {
    r.check_keys(s, "perturb",
                 {"target", "refine_bracket", "refine_parameter", "refine_tol", "cluster", "eps_min",
                  "eps_max", "eps_count", "both_signs"});
    auto& p = c.perturb;
    r.read(s, "perturb", "target", p.target);
    if (const YAML::Node b = s["refine_bracket"]) {
      lines["perturb.refine_bracket"] = b.Mark().line + 1;
      if (!b.IsSequence() || b.size() != 2) fail_at(b, "'perturb.refine_bracket' must be [lo, hi]");
      try {
        p.refine_bracket = std::array<double, 2>{b[0].as<double>(), b[1].as<double>()};
      } catch (const YAML::Exception&) {
        fail_at(b, "'perturb.refine_bracket' has the wrong type");
      }
    }
    r.read(s, "perturb", "refine_parameter", p.refine_parameter);
    r.read(s, "perturb", "refine_tol", p.refine_tol);
    if (const YAML::Node cl = s["cluster"]) {
      r.check_keys(cl, "perturb.cluster",
                   {"radius_rel", "radius_abs", "self_orthogonality_tol", "gram_tol"});
      r.read(cl, "perturb.cluster", "radius_rel", p.cluster.radius_rel);
      r.read(cl, "perturb.cluster", "radius_abs", p.cluster.radius_abs);
      r.read(cl, "perturb.cluster", "self_orthogonality_tol", p.cluster.self_orthogonality_tol);
      r.read(cl, "perturb.cluster", "gram_tol", p.cluster.gram_tol);
    }
    r.read(s, "perturb", "eps_min", p.eps_min);
    r.read(s, "perturb", "eps_max", p.eps_max);
    r.read(s, "perturb", "eps_count", p.eps_count);
    r.read(s, "perturb", "both_signs", p.both_signs);
  }
  if (const YAML::Node s = root["check"]) {
    r.check_keys(s, "check",
                 {"target", "k", "gauge", "kernel", "kernel_rel_tol", "identity", "identity_tol",
                  "pt_symmetry", "pt_factor"});
    auto& k = c.check;
    r.read(s, "check", "target", k.target);
    r.read(s, "check", "k", k.k);
    if (const YAML::Node g = s["gauge"]) {
      r.check_keys(g, "check.gauge", {"enabled", "epsilon", "target", "grids", "slope", "slope_tol"});
      r.read(g, "check.gauge", "enabled", k.gauge.enabled);
      r.read(g, "check.gauge", "epsilon", k.gauge.epsilon);
      r.read(g, "check.gauge", "target", k.gauge.target);
      r.read(g, "check.gauge", "slope", k.gauge.slope);
      r.read(g, "check.gauge", "slope_tol", k.gauge.slope_tol);
      if (const YAML::Node grids = g["grids"]) {
        lines["check.gauge.grids"] = grids.Mark().line + 1;
        if (!grids.IsSequence()) fail_at(grids, "'check.gauge.grids' must be a sequence of [n1, n2]");
        for (const auto& item : grids) {
          if (!item.IsSequence() || item.size() != 2) {
            fail_at(item, "'check.gauge.grids' entries must be [n1, n2]");
          }
          try {
            k.gauge.grids.push_back({item[0].as<int>(), item[1].as<int>()});
          } catch (const YAML::Exception&) {
            fail_at(item, "'check.gauge.grids' entries must be integers");
          }
        }
      }
    }
    r.read(s, "check", "kernel", k.kernel);
    r.read(s, "check", "kernel_rel_tol", k.kernel_rel_tol);
    r.read(s, "check", "identity", k.identity);
    r.read(s, "check", "identity_tol", k.identity_tol);
    r.read(s, "check", "pt_symmetry", k.pt_symmetry);
    r.read(s, "check", "pt_factor", k.pt_factor);
  }
  if (const YAML::Node s = root["outputs"]) {
    r.check_keys(s, "outputs", {"dir", "csv", "json", "svg"});
    r.read(s, "outputs", "dir", c.outputs.dir);
    r.read(s, "outputs", "csv", c.outputs.csv);
    r.read(s, "outputs", "json", c.outputs.json);
    r.read(s, "outputs", "svg", c.outputs.svg);
  }
  validate_config(c, &lines);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

std::string to_yaml(const RunConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "d" << YAML::Value << c.scenario.d;
  out << YAML::Key << "L" << YAML::Value << c.scenario.L;
  out << YAML::Key << "n1" << YAML::Value << c.scenario.n1;
  out << YAML::Key << "n2" << YAML::Value << c.scenario.n2;
  out << YAML::Key << "t" << YAML::Value << c.scenario.t;
  out << YAML::Key << "epsilon" << YAML::Value << c.scenario.epsilon;
  out << YAML::Key << "alpha" << YAML::Value;
  emit_profile(out, c.scenario.alpha);
  out << YAML::Key << "beta" << YAML::Value;
  emit_profile(out, c.scenario.beta);
  out << YAML::EndMap;

  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tol" << YAML::Value << c.solver.tol;
  out << YAML::Key << "max_restarts" << YAML::Value << c.solver.max_restarts;
  out << YAML::Key << "krylov_dim" << YAML::Value << c.solver.krylov_dim;
  out << YAML::Key << "seed" << YAML::Value << c.solver.seed;
  out << YAML::Key << "deflation_checks" << YAML::Value << c.solver.deflation_checks;
  out << YAML::EndMap;

  out << YAML::Key << "spectrum" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "target" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << c.spectrum.target_re << c.spectrum.target_im << YAML::EndSeq;
  out << YAML::Key << "k" << YAML::Value << c.spectrum.k;
  out << YAML::Key << "write_eigenvectors" << YAML::Value << c.spectrum.write_eigenvectors;
  if (c.spectrum.window) {
    out << YAML::Key << "window" << YAML::Value;
    emit_window(out, *c.spectrum.window);
  }
  out << YAML::EndMap;

  const auto& w = c.sweep;
  out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "parameter" << YAML::Value << w.parameter;
  out << YAML::Key << "start" << YAML::Value << w.start;
  out << YAML::Key << "stop" << YAML::Value << w.stop;
  out << YAML::Key << "steps" << YAML::Value << w.steps;
  out << YAML::Key << "window" << YAML::Value;
  emit_window(out, w.window);
  out << YAML::Key << "discovery_shifts" << YAML::Value << w.discovery_shifts;
  out << YAML::Key << "eigs_per_shift" << YAML::Value << w.eigs_per_shift;
  out << YAML::Key << "min_jump" << YAML::Value << w.min_jump;
  out << YAML::Key << "jump_factor" << YAML::Value << w.jump_factor;
  out << YAML::Key << "collision_tol" << YAML::Value << w.collision_tol;
  out << YAML::Key << "real_tol" << YAML::Value << w.real_tol;
  out << YAML::Key << "filter" << YAML::Value << w.filter;
  out << YAML::Key << "l_factor" << YAML::Value << w.l_factor;
  out << YAML::Key << "l_stability_tol" << YAML::Value << w.l_stability_tol;
  out << YAML::Key << "refine" << YAML::Value << w.refine;
  out << YAML::Key << "refine_tol" << YAML::Value << w.refine_tol;
  out << YAML::Key << "source" << YAML::Value << w.source;
  out << YAML::Key << "synthetic" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "p0" << YAML::Value << w.synthetic.p0;
  out << YAML::Key << "center" << YAML::Value << w.synthetic.center;
  out << YAML::Key << "scale" << YAML::Value << w.synthetic.scale;
  out << YAML::EndMap;
  out << YAML::EndMap;

  const auto& p = c.perturb;
  out << YAML::Key << "perturb" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "target" << YAML::Value << p.target;
  if (p.refine_bracket) {
    out << YAML::Key << "refine_bracket" << YAML::Value << YAML::Flow << YAML::BeginSeq
        << (*p.refine_bracket)[0] << (*p.refine_bracket)[1] << YAML::EndSeq;
  }
  out << YAML::Key << "refine_parameter" << YAML::Value << p.refine_parameter;
  out << YAML::Key << "refine_tol" << YAML::Value << p.refine_tol;
  out << YAML::Key << "cluster" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "radius_rel" << YAML::Value << p.cluster.radius_rel;
  out << YAML::Key << "radius_abs" << YAML::Value << p.cluster.radius_abs;
  out << YAML::Key << "self_orthogonality_tol" << YAML::Value << p.cluster.self_orthogonality_tol;
  out << YAML::Key << "gram_tol" << YAML::Value << p.cluster.gram_tol;
  out << YAML::EndMap;
  out << YAML::Key << "eps_min" << YAML::Value << p.eps_min;
  out << YAML::Key << "eps_max" << YAML::Value << p.eps_max;
  out << YAML::Key << "eps_count" << YAML::Value << p.eps_count;
  out << YAML::Key << "both_signs" << YAML::Value << p.both_signs;
  out << YAML::EndMap;

  const auto& k = c.check;
  out << YAML::Key << "check" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "target" << YAML::Value << k.target;
  out << YAML::Key << "k" << YAML::Value << k.k;
  out << YAML::Key << "gauge" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << k.gauge.enabled;
  out << YAML::Key << "epsilon" << YAML::Value << k.gauge.epsilon;
  out << YAML::Key << "target" << YAML::Value << k.gauge.target;
  out << YAML::Key << "grids" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : k.gauge.grids) {
    out << YAML::Flow << YAML::BeginSeq << g[0] << g[1] << YAML::EndSeq;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "slope" << YAML::Value << k.gauge.slope;
  out << YAML::Key << "slope_tol" << YAML::Value << k.gauge.slope_tol;
  out << YAML::EndMap;
  out << YAML::Key << "kernel" << YAML::Value << k.kernel;
  out << YAML::Key << "kernel_rel_tol" << YAML::Value << k.kernel_rel_tol;
  out << YAML::Key << "identity" << YAML::Value << k.identity;
  out << YAML::Key << "identity_tol" << YAML::Value << k.identity_tol;
  out << YAML::Key << "pt_symmetry" << YAML::Value << k.pt_symmetry;
  out << YAML::Key << "pt_factor" << YAML::Value << k.pt_factor;
  out << YAML::EndMap;

  out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << c.outputs.dir;
  out << YAML::Key << "csv" << YAML::Value << c.outputs.csv;
  out << YAML::Key << "json" << YAML::Value << c.outputs.json;
  out << YAML::Key << "svg" << YAML::Value << c.outputs.svg;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace ptwg::cli
