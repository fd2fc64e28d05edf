// nsqa: command-line front end. Every run writes its tables plus a
// manifest.json that echoes the resolved configuration.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nsqa/environment.hpp"
#include "nsqa/gap_scan.hpp"
#include "nsqa/hopfield.hpp"
#include "nsqa/io.hpp"
#include "nsqa/landscape.hpp"
#include "nsqa/phase_diagram.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nsqa;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

using Cell = std::variant<double, int, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != header.size()) throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
  }
};

struct Settings {
  // shared
  std::string out_dir;
  std::string format = "csv";
  unsigned long seed = 0;
  int p = 5;
  int k = 2;
  double lambda = 1.0;
  std::string lambda_path;
  std::string lambda_list;
  double s_min = 0.0;
  double s_max = 1.0;
  int s_steps = 0;
  std::string s_list;
  bool stoquastic = false;
  // landscape
  std::string mode = "nonstoquastic";
  std::string temperatures;
  int theta_points = 401;
  // phase diagram
  double lambda_step = 0.01;
  int raster = 512;
  // hopfield
  std::string regime = "p-spin";
  int r = 1;
  double alpha_load = 0.04;
  int quad_nodes = 120;
  // gap
  std::string n_list = "40,80,120,160,200,240,280,320,360,400";
  bool profile = false;
  bool no_mp = false;
  // environment
  std::string axis = "x";
  std::string s_b_list = "0.5,1,1.5,2,3";
  double a = 0.5;
  double omega_c = 2.0;
  double Lambda_max = 0.0;
  int Lambda_steps = 0;
};

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError("malformed number '" + item + "' in " + what);
    }
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (double v : parse_doubles(text, what)) {
    if (v != static_cast<int>(v)) throw ParameterError(what + " must hold integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// s values: explicit list, else s_steps points on [s_min, s_max].
std::vector<double> s_values(const Settings& c) {
  if (!c.s_list.empty()) return parse_doubles(c.s_list, "--s-list");
  if (c.s_steps < 0) throw ParameterError("--s-steps must be >= 0");
  if (!(c.s_min >= 0.0 && c.s_max <= 1.0 && c.s_min <= c.s_max))
    throw ParameterError("need 0 <= s-min <= s-max <= 1");
  std::vector<double> out;
  for (int i = 0; i < c.s_steps; ++i)
    out.push_back(c.s_steps == 1 ? c.s_min : c.s_min + (c.s_max - c.s_min) * i / (c.s_steps - 1));
  return out;
}

std::vector<double> lambda_values(const Settings& c) {
  if (!c.lambda_list.empty()) return parse_doubles(c.lambda_list, "--lambda-list");
  return {c.lambda};
}

ModelSpec model_of(const Settings& c) {
  ModelSpec m{c.p, c.k, c.stoquastic ? Variant::stoquastic : Variant::nonstoquastic};
  m.validate();
  return m;
}

void write_table(const Table& t, const fs::path& dir, const std::string& format, std::vector<std::string>& files) {
  if (format == "csv") {
    io::CsvWriter w(dir / (t.name + ".csv"), t.header);
    for (const auto& row : t.rows) {
      for (const auto& cell : row) std::visit([&](const auto& v) { w.add(v); }, cell);
      w.end_row();
    }
    files.push_back(t.name + ".csv");
  } else {
    json arr = json::array();
    for (const auto& row : t.rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < row.size(); ++i) std::visit([&](const auto& v) { obj[t.header[i]] = v; }, row[i]);
      arr.push_back(obj);
    }
    io::write_json(dir / (t.name + ".json"), arr);
    files.push_back(t.name + ".json");
  }
}

struct Output {
  std::vector<Table> tables;
  json summary = json::object();  // written as summary.json when non-empty
};

// ---------------------------------------------------------------------------

Output run_landscape(const Settings& c) {
  Output out;
  if (c.theta_points < 2) throw ParameterError("--theta-points must be >= 2");
  if (c.mode == "classical") {
    const auto temps = parse_doubles(c.temperatures, "--temperatures");
    if (temps.empty()) throw ParameterError("classical mode needs --temperatures");
    if (c.p < 2) throw ParameterError("p must be >= 2");
    Table curve{"landscape", {"T", "m", "free_energy"}, {}};
    Table mins{"minima", {"T", "m_star", "f_star"}, {}};
    for (double T : temps) {
      if (!(T > 0.0)) throw ParameterError("temperatures must be positive");
      for (int i = 0; i < c.theta_points; ++i) {
        const double m = static_cast<double>(i) / (c.theta_points - 1);
        curve.add({T, m, landscape::classical_free_energy(m, T, c.p)});
      }
      const auto sol = landscape::minimize_classical_free_energy(T, c.p);
      mins.add({T, sol.minimizer, sol.value});
    }
    out.tables = {curve, mins};
    return out;
  }
  if (c.mode != "stoquastic" && c.mode != "nonstoquastic")
    throw ParameterError("--mode must be classical, stoquastic or nonstoquastic");
  const auto svals = s_values(c);
  if (svals.empty()) throw ParameterError("empty s list: give --s-list or --s-steps");
  ModelSpec spec = model_of(c);
  if (c.mode == "stoquastic") spec.variant = Variant::stoquastic;
  Table curve{"landscape", {"s", "lambda", "theta", "energy"}, {}};
  Table mins{"minima", {"s", "lambda", "theta_star", "e_star", "curvature_at_origin"}, {}};
  for (double s : svals) {
    const AnnealPoint pt{s, c.lambda};
    pt.validate();
    const double lam = effective_lambda(spec, pt);
    for (int i = 0; i < c.theta_points; ++i) {
      const double th = std::numbers::pi * i / (c.theta_points - 1);
      curve.add({s, lam, th, landscape::nonstoquastic_energy(th, pt, spec)});
    }
    const auto sol = landscape::minimize_landscape(pt, spec);
    mins.add({s, lam, sol.minimizer, sol.value, sol.curvature_at_origin});
  }
  out.tables = {curve, mins};
  return out;
}

Table boundary_table(const std::vector<phase::BoundarySegment>& segs,
                     const std::vector<std::pair<std::string, std::string>>& labels) {
  Table t{"boundaries", {"segment", "lambda", "s", "order", "phase_low", "phase_high"}, {}};
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& seg = segs[i];
    for (std::size_t j = 0; j < seg.points.size(); ++j) {
      const auto& bp = seg.points[j];
      const auto& lab = labels.empty() ? std::pair{phase::to_string(bp.low), phase::to_string(bp.high)} : labels[i];
      t.add({static_cast<int>(i), bp.point.lambda, bp.point.s, phase::to_string(seg.order), lab.first, lab.second});
    }
  }
  return t;
}

void add_path(Output& out, const std::optional<AnnealPath>& path) {
  out.summary["path_exists"] = path.has_value();
  if (!path) return;
  Table t{"path", {"s", "lambda"}, {}};
  for (const auto& w : path->waypoints()) t.add({w.s, w.lambda});
  out.tables.push_back(t);
  out.summary["path"] = path->to_string();
}

hopfield::HopfieldSpec hopfield_spec_of(const Settings& c) {
  hopfield::HopfieldSpec h;
  h.p = c.p;
  h.r = c.r;
  h.alpha_load = c.alpha_load;
  h.regime = hopfield::parse_regime(c.regime);
  h.validate();
  return h;
}

Output run_phase_diagram(const Settings& c) {
  Output out;
  if (!(c.lambda_step > 0.0 && c.lambda_step <= 0.1)) throw ParameterError("--lambda-step must lie in (0, 0.1]");
  if (c.regime == "p-spin") {
    const ModelSpec spec = model_of(c);
    const auto d = phase::trace_diagram(spec, c.lambda_step);
    out.tables.push_back(boundary_table(d.segments, {}));
    if (d.branch_point) out.summary["branch_point"] = {{"lambda", d.branch_point->lambda}, {"s", d.branch_point->s}};
    add_path(out, phase::find_annealing_path(spec, d, c.raster));
    return out;
  }
  const auto hs = hopfield_spec_of(c);
  if (hs.regime == hopfield::Regime::finite_r) throw ParameterError("phase-diagram needs an extensive Hopfield regime");
  const hopfield::Quadrature quad(c.quad_nodes);
  const auto d = hopfield::hopfield_phase_diagram(hs, quad, c.lambda_step);
  std::vector<std::pair<std::string, std::string>> labels;
  for (const auto& b : d.boundaries) labels.emplace_back(hopfield::to_string(b.low), hopfield::to_string(b.high));
  const auto segs = hopfield::as_segments(d);
  out.tables.push_back(boundary_table(segs, labels));
  add_path(out, phase::find_annealing_path(segs, c.lambda_step, c.raster));
  return out;
}

Output run_hopfield(const Settings& c) {
  Output out;
  const auto hs = hopfield_spec_of(c);
  Table map{"phase_map", {"lambda", "s", "phase", "m", "q", "mx", "energy"}, {}};
  Table tr{"transitions", {"lambda", "s_c", "order", "phase_low", "phase_high"}, {}};
  if (hs.regime == hopfield::Regime::finite_r) {
    const auto svals = s_values(c);
    if (svals.empty()) throw ParameterError("empty s list: give --s-list or --s-steps");
    for (double lam : lambda_values(c)) {
      for (double s : svals) {
        const auto x = hopfield::minimize_finite_r({s, lam}, hs);
        map.add({lam, s, hopfield::to_string(x.phase), x.m, x.q, x.mx, x.energy});
      }
      for (const auto& t : hopfield::finite_r_transitions(lam, hs))
        tr.add({lam, t.s_c, phase::to_string(t.order), std::string("QP"), std::string("R")});
    }
  } else {
    const hopfield::Quadrature quad(c.quad_nodes);
    hopfield::HopfieldScanOptions opts;
    if (c.s_steps != 0) {
      if (c.s_steps < 11) throw ParameterError("--s-steps must be >= 11 for extensive sweeps");
      opts.s_step = 1.0 / (c.s_steps - 1);
    }
    for (double lam : lambda_values(c)) {
      for (const auto& g : hopfield::hopfield_sweep(lam, hs, quad, opts)) {
        if (g.s < c.s_min || g.s > c.s_max) continue;
        const auto& x = g.state;
        map.add({lam, g.s, hopfield::to_string(x.phase), x.m, x.q, x.mx, x.energy});
      }
      for (const auto& t : hopfield::hopfield_transitions(lam, hs, quad, opts))
        tr.add({lam, t.s_c, phase::to_string(t.order), hopfield::to_string(t.below), hopfield::to_string(t.above)});
    }
  }
  out.tables = {map, tr};
  return out;
}

Output run_gap(const Settings& c) {
  Output out;
  const ModelSpec spec = model_of(c);
  const AnnealPath path = c.lambda_path.empty() ? AnnealPath::constant(c.lambda) : AnnealPath::parse(c.lambda_path);
  const auto Ns = parse_ints(c.n_list, "--n-list");
  if (Ns.empty()) throw ParameterError("empty --n-list");
  for (int N : Ns)
    if (N < 2) throw ParameterError("every N must be >= 2");
  gap::GapOptions opts;
  opts.multiprecision = !c.no_mp;
  if (c.s_steps != 0) {
    if (c.s_steps < 64) throw ParameterError("--s-steps must be >= 64 for gap profiles");
    opts.s_grid = c.s_steps;
  }
  Table mins{"gap_min", {"N", "s_min", "lambda_min", "gap_min", "gap01", "gap02", "multiprecision"}, {}};
  Table prof{"profile", {"N", "s", "lambda", "gap01", "gap02"}, {}};
  std::vector<double> gmins;
  for (int N : Ns) {
    const auto r = gap::minimum_gap(spec, path, N, opts);
    mins.add({N, r.point.s, r.point.lambda, r.relevant(spec), r.gap01, r.gap02, r.multiprecision ? 1 : 0});
    gmins.push_back(r.relevant(spec));
    if (c.profile)
      for (const auto& g : gap::gap_profile(spec, path, N, opts.s_grid))
        prof.add({N, g.point.s, g.point.lambda, g.gap01, g.gap02});
  }
  out.tables.push_back(mins);
  if (c.profile) out.tables.push_back(prof);
  out.summary["path"] = path.to_string();
  if (Ns.size() >= 4) {
    const auto f = gap::fit_scaling(Ns, gmins);
    auto fit = [](const gap::LinearFit& l) {
      return json{{"intercept", l.intercept}, {"slope", l.slope}, {"rss", l.rss}};
    };
    out.summary["exponential"] = fit(f.exponential);
    out.summary["polynomial"] = fit(f.polynomial);
    out.summary["verdict"] = gap::to_string(f.verdict);
  }
  return out;
}

Output run_environment(const Settings& c) {
  Output out;
  const auto axis = environment::parse_axis(c.axis);
  Table lt{"lambda_table", {"s_b", "a", "omega_c", "Lambda"}, {}};
  for (double sb : parse_doubles(c.s_b_list, "--s-b-list")) {
    environment::BathSpec b{axis, sb, c.a, c.omega_c};
    lt.add({sb, c.a, c.omega_c, environment::reorganization_constant(b)});
  }
  out.tables.push_back(lt);
  if (c.Lambda_steps < 0) throw ParameterError("--Lambda-steps must be >= 0");
  if (c.Lambda_steps > 0) {
    if (!(c.Lambda_max >= 0.0)) throw ParameterError("--Lambda-max must be >= 0");
    const ModelSpec spec = model_of(c);
    Table st{"scan", {"Lambda", "s_c", "order", "phase_low", "phase_high"}, {}};
    std::optional<phase::Order> base;
    std::optional<double> threshold;
    for (int i = 0; i < c.Lambda_steps; ++i) {
      const double L = c.Lambda_steps == 1 ? c.Lambda_max : c.Lambda_max * i / (c.Lambda_steps - 1);
      const auto ts = environment::bath_shifted_phase_scan(spec, axis, L, c.lambda);
      for (const auto& t : ts)
        st.add({L, t.s_c, phase::to_string(t.order), phase::to_string(t.below), phase::to_string(t.above)});
      if (ts.empty()) continue;
      // QP-exit order is that of the first transition along s.
      if (!base) base = ts.front().order;
      else if (!threshold && ts.front().order != *base) threshold = L;
    }
    out.tables.push_back(st);
    if (base) out.summary["qp_exit_order_at_zero"] = phase::to_string(*base);
    if (threshold) out.summary["order_flip_Lambda"] = *threshold;
  }
  return out;
}

// ---------------------------------------------------------------------------

// key = value lines; '#' starts a comment; keys may carry a leading "--".
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParameterError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    if (key.empty()) throw ParameterError(path + ":" + std::to_string(lineno) + ": empty key");
    if (value == "true") {
      tokens.push_back("--" + key);
    } else if (value != "false") {
      tokens.push_back("--" + key);
      tokens.push_back(value);
    }
  }
  return tokens;
}

json manifest_config(const CLI::App& sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    if (opt->get_expected_max() == 0) cfg[name] = opt->count() > 0;
    else if (opt->count() > 0) cfg[name] = opt->as<std::string>();
    else cfg[name] = opt->get_default_str();
  }
  return cfg;
}

void add_shared(CLI::App* sub, Settings& c, bool model = true) {
  sub->add_option("--out-dir", c.out_dir, "output directory (default $NSQA_OUT_DIR or ./nsqa-out)");
  sub->add_option("--format", c.format, "table format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", c.seed, "random seed (recorded; only Monte-Carlo checks draw numbers)");
  sub->add_option("--config", "key = value file; command-line flags override it");
  if (!model) return;
  sub->add_option("--p", c.p, "z-interaction order");
  sub->add_option("--k", c.k, "x-interaction order");
  sub->add_option("--lambda", c.lambda, "lambda");
  sub->add_flag("--stoquastic", c.stoquastic, "ignore lambda (always behave as lambda = 1)");
}

void add_s_range(CLI::App* sub, Settings& c) {
  sub->add_option("--s-min", c.s_min);
  sub->add_option("--s-max", c.s_max);
  sub->add_option("--s-steps", c.s_steps, "number of s values");
  sub->add_option("--s-list", c.s_list, "comma-separated s values (overrides the range)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field quantum annealing analyses"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  Settings c;

  auto* land = app.add_subcommand("landscape", "energy and free-energy curves with their minima");
  add_shared(land, c);
  add_s_range(land, c);
  land->add_option("--mode", c.mode)->check(CLI::IsMember({"classical", "stoquastic", "nonstoquastic"}));
  land->add_option("--temperatures", c.temperatures, "comma-separated T values (classical mode)");
  land->add_option("--theta-points", c.theta_points, "samples per curve");

  auto* pd = app.add_subcommand("phase-diagram", "lambda-s phase boundaries and a first-order-free path");
  add_shared(pd, c);
  pd->add_option("--lambda-step", c.lambda_step);
  pd->add_option("--raster", c.raster, "path-search raster size");
  pd->add_option("--regime", c.regime, "p-spin, extensive-p2 or extensive-p-ge3");
  pd->add_option("--alpha-load", c.alpha_load);
  pd->add_option("--quad-nodes", c.quad_nodes);

  auto* hop = app.add_subcommand("hopfield", "Hopfield order parameters and transitions");
  add_shared(hop, c);
  add_s_range(hop, c);
  hop->add_option("--lambda-list", c.lambda_list, "comma-separated lambda values (overrides --lambda)");
  hop->add_option("--regime", c.regime, "finite-r, extensive-p2 or extensive-p-ge3");
  hop->add_option("--r", c.r, "pattern count (finite-r)");
  hop->add_option("--alpha-load", c.alpha_load);
  hop->add_option("--quad-nodes", c.quad_nodes);

  auto* gp = app.add_subcommand("gap", "minimum sector gap along a path and its scaling with N");
  add_shared(gp, c);
  gp->add_option("--lambda-path", c.lambda_path, "waypoints s:lambda,s:lambda,...");
  gp->add_option("--n-list", c.n_list, "comma-separated system sizes");
  gp->add_option("--s-steps", c.s_steps, "coarse s grid (default 256)");
  gp->add_flag("--profile", c.profile, "also write the coarse gap profiles");
  gp->add_flag("--no-mp", c.no_mp, "skip the multiprecision pass");

  auto* env = app.add_subcommand("environment", "bath reorganization constants and shifted transitions");
  add_shared(env, c);
  env->add_option("--axis", c.axis)->check(CLI::IsMember({"x", "z"}));
  env->add_option("--s-b-list", c.s_b_list, "Ohmic exponents");
  env->add_option("--a", c.a, "spectral prefactor");
  env->add_option("--omega-c", c.omega_c, "cutoff frequency");
  env->add_option("--Lambda-max", c.Lambda_max);
  env->add_option("--Lambda-steps", c.Lambda_steps, "number of Lambda values (0: no scan)");

  // A config file is spliced in right after the subcommand name, so that
  // later command-line flags win under the take-last policy.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] != "--config") continue;
      const auto extra = read_config(args[i + 1]);
      std::size_t at = 0;
      while (at < args.size() && !app.get_subcommand_ptr(args[at])) ++at;
      if (at == args.size()) throw ParameterError("--config needs a subcommand");
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(at) + 1, extra.begin(), extra.end());
      break;
    }
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    if (c.out_dir.empty()) {
      const char* env_dir = std::getenv("NSQA_OUT_DIR");
      c.out_dir = env_dir && *env_dir ? env_dir : "nsqa-out";
    }
    Output out;
    if (name == "landscape") out = run_landscape(c);
    else if (name == "phase-diagram") out = run_phase_diagram(c);
    else if (name == "hopfield") out = run_hopfield(c);
    else if (name == "gap") out = run_gap(c);
    else out = run_environment(c);

    const fs::path dir(c.out_dir);
    fs::create_directories(dir);
    std::vector<std::string> files;
    for (const auto& t : out.tables) write_table(t, dir, c.format, files);
    if (!out.summary.empty()) {
      io::write_json(dir / "summary.json", out.summary);
      files.push_back("summary.json");
    }
    json cfg = manifest_config(*sub);
    cfg["out-dir"] = c.out_dir;
    io::write_json(dir / "manifest.json", {{"subcommand", name}, {"config", cfg}, {"outputs", files}});
    std::cout << "wrote " << files.size() + 1 << " files to " << dir.string() << '\n';
    return 0;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
