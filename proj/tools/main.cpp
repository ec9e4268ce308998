// phaseplane command-line front end. Exit codes: 0 success, 1 analysis
// failure, 2 usage or input error.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "phaseplane/error.hpp"
#include "phaseplane/format.hpp"
#include "report.hpp"
#include "svg.hpp"

using namespace phaseplane;
using namespace phaseplane::cli;

namespace {

/// Bad flags, unreadable files, unknown models: exit 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Source {
  std::string file;
  std::string builtin;
  std::vector<std::string> sets;
};

struct Loaded {
  ModelRecord record;
  std::string digest;
};

void add_source(CLI::App* cmd, Source& s) {
  cmd->add_option("file", s.file, "Model file");
  cmd->add_option("--builtin", s.builtin, "Built-in model name");
  cmd->add_option("--set", s.sets, "Override a parameter, NAME=VALUE (repeatable)");
}

double to_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw InputError("bad number '" + text + "' in " + what);
  return v;
}

std::vector<double> numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) out.push_back(to_number(token, what));
  return out;
}

Vec2 point(const std::string& text, const std::string& what) {
  const auto v = numbers(text, what);
  if (v.size() != 2) throw InputError(what + " needs x,y");
  return {v[0], v[1]};
}

Mat2 matrix(const std::string& text) {
  const auto v = numbers(text, "--matrix");
  if (v.size() != 4) throw InputError("--matrix needs a,b,c,d");
  return {v[0], v[1], v[2], v[3]};
}

Loaded load(const Source& s) {
  if (s.file.empty() == s.builtin.empty()) throw InputError("give either a model file or --builtin NAME");
  Loaded out;
  std::string text;
  if (!s.builtin.empty()) {
    out.record = builtin_model(s.builtin);
    if (!out.record.available) throw InputError(out.record.name + ": " + out.record.note);
    text = serialize_model(out.record);
  } else {
    std::ifstream in(s.file, std::ios::binary);
    if (!in) throw InputError("cannot read " + s.file);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    out.record = parse_model_file(text);
  }
  Binding& params = out.record.kind == ModelKind::Ode1 ? out.record.ode1.params : out.record.ode2.params;
  for (const auto& set : s.sets) {
    const auto eq = set.find('=');
    if (eq == std::string::npos) throw InputError("--set needs NAME=VALUE");
    const std::string name = set.substr(0, eq);
    if (!params.count(name)) throw InputError("--set: unknown parameter " + name);
    params[name] = to_number(set.substr(eq + 1), "--set");
    text += "\n#set " + set;
  }
  out.digest = sha256_hex(text);
  return out;
}

void write(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << content;
}

json stamp(json report, const Loaded& in) {
  report["model"] = in.record.name;
  report["version"] = kVersion;
  report["input_sha256"] = in.digest;
  return report;
}

const Model2D& need_2d(const Loaded& in, const char* command) {
  if (in.record.kind != ModelKind::Ode2) throw InputError(std::string(command) + " needs an ode2 model");
  return in.record.ode2;
}

const Model1D& need_1d(const Loaded& in, const char* command) {
  if (in.record.kind != ModelKind::Ode1) throw InputError(std::string(command) + " needs an ode1 model");
  return in.record.ode1;
}

void check_grid(int grid) {
  if (grid < 8) throw InputError("--grid must be at least 8");
}

int run_analyze(const Source& src, const std::string& json_path, int grid, bool cycles) {
  check_grid(grid);
  const Loaded in = load(src);
  json report;
  if (in.record.kind == ModelKind::Ode1) {
    report = analyze_1d(in.record.ode1);
  } else {
    const Model2D& m = in.record.ode2;
    report = analyze_2d(m, grid);
    if (cycles) {
      json found = json::array();
      for (const auto& e : report["equilibria"]) {
        const std::string cls = e["class"];
        if (cls != "stable_spiral" && cls != "unstable_spiral" && cls != "center") continue;
        const Vec2 p{e["x"].get<double>(), e["y"].get<double>()};
        json c = cycle_json(detect_limit_cycle(m, p));
        c["equilibrium"] = vec_json(p);
        found.push_back(c);
      }
      report["cycles"] = found;
    }
  }
  report = stamp(report, in);
  if (json_path.empty()) {
    std::cout << dump(report);
    return 0;
  }
  write(json_path, dump(report));
  std::cout << in.record.name << ": " << report["equilibria"].size() << " equilibria\n";
  for (const auto& e : report["equilibria"]) {
    std::cout << "  " << e["x"].dump();
    if (e.contains("y")) std::cout << " " << e["y"].dump();
    std::cout << "  " << e["class"].get<std::string>() << "\n";
  }
  return 0;
}

int run_portrait(const Source& src, const std::string& out_path, int grid, int arrows,
                 const std::vector<std::string>& starts, double tmax) {
  check_grid(grid);
  if (arrows < 2) throw InputError("--arrows must be at least 2");
  if (!(tmax > 0)) throw InputError("--tmax must be positive");
  const Loaded in = load(src);
  PortraitOptions o;
  o.title = in.record.name;
  o.grid = grid;
  o.arrows = arrows;
  o.tmax = tmax;
  for (const auto& s : starts) o.starts.push_back(point(s, "--start"));
  write(out_path, portrait_svg(need_2d(in, "portrait"), o));
  return 0;
}

int run_phaseline(const Source& src, const std::string& json_path, const std::string& out_path) {
  const Loaded in = load(src);
  const Model1D& m = need_1d(in, "phaseline");
  const json report = stamp(analyze_1d(m), in);
  if (!out_path.empty()) write(out_path, phaseline_svg(m, build_phase_line(m), in.record.name));
  if (!json_path.empty()) {
    write(json_path, dump(report));
  } else if (out_path.empty()) {
    std::cout << dump(report);
  }
  return 0;
}

int run_scan(const Source& src, const std::string& param, const std::vector<double>& range, int steps, bool hopf,
             bool fold, const std::string& seed, const std::string& json_path) {
  if (param.empty()) throw InputError("scan needs --param");
  if (range.size() != 2) throw InputError("scan needs --range LO HI");
  if (hopf == fold) throw InputError("scan needs exactly one of --hopf or --fold");
  if (steps < 1) throw InputError("--steps must be positive");
  if (!(range[0] < range[1])) throw InputError("--range needs LO < HI");
  const Loaded in = load(src);

  json report;
  bool failed = false;
  if (hopf) {
    const Model2D& m = need_2d(in, "scan --hopf");
    if (!m.params.count(param)) throw InputError("unknown parameter " + param);
    std::optional<Vec2> start;
    if (!seed.empty()) start = point(seed, "--seed");
    const HopfScan s = run_hopf_scan(m, param, range[0], range[1], steps, start);
    report = hopf_json(s, param);
    std::cout << param << "\t" << m.x_name << "\t" << m.y_name << "\ttr\tdet\n";
    for (const auto& r : s.path) {
      std::cout << format_shortest(r.param) << "\t" << format_shortest(r.location.x) << "\t"
                << format_shortest(r.location.y) << "\t" << format_shortest(r.tr) << "\t" << format_shortest(r.det)
                << "\n";
    }
    if (s.failure) {
      std::cerr << "continuation failed: " << *s.failure << "\n";
      failed = true;
    } else if (s.result) {
      std::cout << "hopf " << param << "* = " << format_shortest(s.result->critical) << "\n";
    } else {
      std::cout << "no hopf point in range\n";
    }
  } else {
    const Model1D& m = need_1d(in, "scan --fold");
    if (!m.params.count(param)) throw InputError("unknown parameter " + param);
    const auto r = fold_scan_1d(m, param, range[0], range[1], steps);
    report = fold_json(m, param, range[0], range[1], steps, r);
    std::cout << param << "\tequilibria\n";
    for (const auto& row : report["rows"]) {
      std::cout << format_shortest(row["param"].get<double>());
      for (const auto& x : row["equilibria"]) std::cout << "\t" << format_shortest(x.get<double>());
      std::cout << "\n";
    }
    if (r) {
      std::cout << "fold " << param << "* = " << format_shortest(r->critical) << "\n";
    } else {
      std::cout << "no fold in range\n";
    }
  }
  if (!json_path.empty()) write(json_path, dump(stamp(report, in)));
  return failed ? 1 : 0;
}

int run_matrix(const std::string& text, const std::string& init, const std::string& json_path, bool solve) {
  const Mat2 m = matrix(text);
  json report;
  if (solve) {
    std::optional<Vec2> start;
    if (!init.empty()) start = point(init, "--init");
    report = linsolve_json(m, start);
  } else {
    report = eigen_json(m);
  }
  report["version"] = kVersion;
  write(json_path, dump(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qualitative analysis of planar and scalar autonomous ODEs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Source src;
  std::string json_path;
  std::string out_path;
  int grid = 64;
  int arrows = 15;
  bool cycles = false;
  std::vector<std::string> starts;
  double tmax = 10.0;
  std::string param;
  std::vector<double> range;
  int steps = 100;
  bool hopf = false;
  bool fold = false;
  std::string seed;
  std::string mat;
  std::string init;

  auto* analyze = app.add_subcommand("analyze", "Equilibria, classification and null-clines as JSON");
  add_source(analyze, src);
  analyze->add_option("--json", json_path, "Write the report here instead of stdout");
  analyze->add_option("--grid", grid, "Lattice size for searches and null-clines");
  analyze->add_flag("--cycles", cycles, "Look for limit cycles around spirals and centers");

  auto* portrait = app.add_subcommand("portrait", "Phase portrait as SVG");
  add_source(portrait, src);
  portrait->add_option("-o,--output", out_path, "SVG path (stdout when omitted)");
  portrait->add_option("--grid", grid, "Lattice size for null-clines and equilibria");
  portrait->add_option("--arrows", arrows, "Arrow lattice per side");
  portrait->add_option("--start", starts, "Trajectory start x,y (repeatable)");
  portrait->add_option("--tmax", tmax, "Trajectory duration");

  auto* phaseline = app.add_subcommand("phaseline", "1D phase line as JSON and SVG");
  add_source(phaseline, src);
  phaseline->add_option("--json", json_path, "JSON path");
  phaseline->add_option("-o,--output", out_path, "SVG path");

  auto* scan = app.add_subcommand("scan", "Parameter scan for Hopf (2D) or fold (1D) points");
  add_source(scan, src);
  scan->add_option("--param", param, "Parameter to vary");
  scan->add_option("--range", range, "LO HI")->expected(2);
  scan->add_option("--steps", steps, "Scan intervals");
  scan->add_flag("--hopf", hopf, "Track tr J = 0 with det J > 0");
  scan->add_flag("--fold", fold, "Track loss of a pair of equilibria");
  scan->add_option("--seed", seed, "Starting equilibrium guess x,y for --hopf");
  scan->add_option("--json", json_path, "JSON path");

  auto* linsolve = app.add_subcommand("linsolve", "Closed-form solution of dv/dt = A v");
  linsolve->add_option("--matrix", mat, "a,b,c,d (row-major)")->required();
  linsolve->add_option("--init", init, "Initial point x,y");
  linsolve->add_option("--json", json_path, "JSON path (stdout when omitted)");

  auto* eig = app.add_subcommand("eig", "Eigenvalues, eigenvectors and det-tr class of a 2x2 matrix");
  eig->add_option("--matrix", mat, "a,b,c,d (row-major)")->required();
  eig->add_option("--json", json_path, "JSON path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (analyze->parsed()) return run_analyze(src, json_path, grid, cycles);
    if (portrait->parsed()) return run_portrait(src, out_path, grid, arrows, starts, tmax);
    if (phaseline->parsed()) return run_phaseline(src, json_path, out_path);
    if (scan->parsed()) return run_scan(src, param, range, steps, hopf, fold, seed, json_path);
    if (linsolve->parsed()) return run_matrix(mat, init, json_path, true);
    if (eig->parsed()) return run_matrix(mat, init, json_path, false);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "analysis failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
