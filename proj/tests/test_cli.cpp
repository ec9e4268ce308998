#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

// Removed again when the test binary exits.
struct ScratchDir {
  fs::path path;
  ScratchDir() : path(fs::temp_directory_path() / ("phaseplane_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

const fs::path& scratch() {
  static const ScratchDir dir;
  return dir.path;
}

Run run(const std::string& args) {
  const std::string cmd = std::string(PHASEPLANE_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string path(const char* name) { return (scratch() / name).string(); }

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

double after(const std::string& text, const std::string& marker) {
  const auto pos = text.find(marker);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + marker.size()));
}

}  // namespace

TEST_CASE("analyze ppour writes the canonical report") {
  const std::string out = path("ppour.json");
  REQUIRE(run("analyze --builtin ppour --json " + out).code == 0);
  const std::string text = slurp(out);
  const json j = json::parse(text);
  CHECK(j.dump(2) + "\n" == text);
  CHECK(j["model"] == "ppour");
  CHECK(j["version"] == "0.1.0");
  CHECK(std::regex_match(j["input_sha256"].get<std::string>(), std::regex("[0-9a-f]{64}")));
  REQUIRE(j["equilibria"].size() == 3);
  std::vector<std::string> classes;
  for (const auto& e : j["equilibria"]) classes.push_back(e["class"]);
  CHECK(classes == std::vector<std::string>{"saddle", "stable_node", "saddle"});
  const auto& mid = j["equilibria"][1];
  CHECK(std::fabs(mid["x"].get<double>() - 0.5) <= 1e-8);
  CHECK(std::fabs(mid["jacobian"][0][1].get<double>() + 0.75) <= 1e-10);
  CHECK(j["nullclines"]["x"]["count"].get<int>() >= 2);
  CHECK(j["nullclines"]["y"]["count"].get<int>() >= 2);
}

TEST_CASE("analyze reads a model file") {
  const std::string file = path("algae.pmf");
  std::ofstream(file) << "[model]\nname = algae\nkind = ode2\nvars = x y\n[equations]\nx = 2*x*(1-y)\n"
                         "y = 2-y-x^2\n[domain]\nx = 0 3\ny = 0 3\n";
  const Run r = run("analyze " + file);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["equilibria"].size() == 2);
  CHECK(j["equilibria"][0]["x"].get<double>() == doctest::Approx(0.0));
  CHECK(j["equilibria"][0]["y"].get<double>() == doctest::Approx(2.0));
  CHECK(j["equilibria"][0]["class"] == "stable_node");
  CHECK(j["equilibria"][1]["class"] == "saddle");
}

TEST_CASE("input errors exit with 2") {
  CHECK(run("analyze --builtin nosuch").code == 2);
  CHECK(run("analyze").code == 2);
  CHECK(run("analyze " + path("missing.pmf")).code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("analyze --builtin budworm").code == 2);
  CHECK(run("scan --builtin brusselator").code == 2);
  CHECK(run("scan --builtin brusselator --param b --range 1.5 2.5 --fold").code == 2);
  CHECK(run("portrait --builtin logistic").code == 2);
  CHECK(run("analyze --builtin ppour --set q=1").code == 2);
  const std::string bad = path("bad.pmf");
  std::ofstream(bad) << "[model]\nname = m\nkind = ode2\nvars = x y\n[equations]\nx = q\ny = y\n[domain]\nx = 0 1\n"
                        "y = 0 1\n";
  CHECK(run("analyze " + bad).code == 2);
}

TEST_CASE("analysis failures exit with 1") {
  // The equilibrium (1, b) leaves the domain once b > 6.
  const Run r = run("scan --builtin brusselator --param b --range 1.5 8 --steps 13 --hopf");
  CHECK(r.code == 1);
  CHECK(r.out.find("\n6\t") != std::string::npos);
}

TEST_CASE("portrait svg") {
  const std::string a = path("p1.svg");
  const std::string b = path("p2.svg");
  REQUIRE(run("portrait --builtin ppour -o " + a + " --grid 40").code == 0);
  REQUIRE(run("portrait --builtin ppour -o " + b + " --grid 40").code == 0);
  const std::string svg = slurp(a);
  CHECK(svg == slurp(b));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(count(svg, "class=\"equilibrium") == 3);
  CHECK(count(svg, "class=\"equilibrium saddle\"") == 2);
  CHECK(count(svg, "class=\"equilibrium stable\"") == 1);
  CHECK(count(svg, "class=\"xcline\"") >= 2);
  CHECK(count(svg, "class=\"ycline\"") >= 2);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(count(svg, "class=\"trajectory\"") == 0);
  CHECK(count(svg, "class=\"arrow\"") > 100);
}

TEST_CASE("lotka-volterra trajectory stays on its level set") {
  const Run r = run("portrait --builtin lotka_volterra --start 1,1 --tmax 20");
  REQUIRE(r.code == 0);
  std::smatch m;
  REQUIRE(std::regex_search(r.out, m, std::regex("class=\"trajectory\" points=\"([^\"]*)\"")));
  std::istringstream in(m[1].str());
  std::string pair;
  // Screen mapping for the [0, 5]^2 domain on a 544 px plot with 48 px margins.
  auto level = [](double n, double p) { return 0.5 * n - std::log(n) + 0.5 * p - std::log(p); };
  const double v0 = level(1, 1);
  int points = 0;
  double worst = 0;
  while (in >> pair) {
    const auto comma = pair.find(',');
    const double n = (std::stod(pair.substr(0, comma)) - 48) / 544 * 5;
    const double p = 5 - (std::stod(pair.substr(comma + 1)) - 48) / 544 * 5;
    worst = std::max(worst, std::fabs(level(n, p) - v0));
    ++points;
  }
  CHECK(points > 100);
  CHECK(worst <= 1e-3 * v0);
}

TEST_CASE("scan commands") {
  const std::string out = path("hopf.json");
  const Run h = run("scan --builtin brusselator --param b --range 1.5 2.5 --steps 100 --hopf --json " + out);
  REQUIRE(h.code == 0);
  CHECK(std::fabs(after(h.out, "hopf b* = ") - 2.0) <= 1e-6);
  const json j = json::parse(slurp(out));
  CHECK(std::fabs(j["critical"].get<double>() - 2.0) <= 1e-6);
  CHECK(j["rows"].size() == 101);

  const Run f = run("scan --builtin logistic_harvest --param h --range 0 2 --steps 200 --fold");
  REQUIRE(f.code == 0);
  CHECK(std::fabs(after(f.out, "fold h* = ") - 1.5) <= 1e-6);

  const Run none = run("scan --builtin holling_tanner --param K --range 0.7 1.6 --steps 90 --hopf");
  CHECK(none.code == 0);
  CHECK(none.out.find("no hopf point") != std::string::npos);
}

TEST_CASE("matrix commands") {
  const Run e = run("eig --matrix -1,5,-1,3");
  REQUIRE(e.code == 0);
  const json j = json::parse(e.out);
  CHECK(j["class"] == "unstable_spiral");
  CHECK(j["eigenvalues"][0]["re"].get<double>() == doctest::Approx(1.0));
  CHECK(std::fabs(j["eigenvalues"][0]["im"].get<double>()) == doctest::Approx(1.0));

  const Run l = run("linsolve --matrix 1,4,1,1 --init 4,6");
  REQUIRE(l.code == 0);
  const json s = json::parse(l.out);
  CHECK(s["C1"].get<double>() == doctest::Approx(1.0));
  CHECK(s["C2"].get<double>() == doctest::Approx(-2.0));
  CHECK(run("eig --matrix 1,2,3").code == 2);
}

TEST_CASE("phaseline") {
  const std::string svg = path("line.svg");
  const std::string js = path("line.json");
  REQUIRE(run("phaseline --builtin logistic -o " + svg + " --json " + js).code == 0);
  const json j = json::parse(slurp(js));
  REQUIRE(j["equilibria"].size() == 2);
  CHECK(j["equilibria"][1]["class"] == "stable");
  REQUIRE(j["phase_line"]["basins"].size() == 1);
  CHECK(j["phase_line"]["basins"][0]["attractor"].get<double>() == doctest::Approx(3.0));
  const std::string text = slurp(svg);
  CHECK(count(text, "class=\"equilibrium") == 2);
  CHECK(run("phaseline --builtin ppour").code == 2);
}

TEST_CASE("analyze --cycles") {
  const Run r = run("analyze --builtin brusselator --set b=2.5 --cycles");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["cycles"].size() == 1);
  CHECK(j["cycles"][0]["found"] == true);
  CHECK(j["cycles"][0]["stability"] == "stable");
}
