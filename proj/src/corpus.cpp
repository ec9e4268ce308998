#include "phaseplane/corpus.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "phaseplane/cycles.hpp"
#include "phaseplane/error.hpp"
#include "phaseplane/format.hpp"
#include "phaseplane/linsys.hpp"

namespace phaseplane {
namespace {

Model1D ode1(const char* f, const char* var, double lo, double hi, Binding params) {
  Model1D m;
  m.f = parse(f);
  m.var = var;
  m.params = std::move(params);
  m.lo = lo;
  m.hi = hi;
  return m;
}

Model2D ode2(const char* f, const char* g, const char* x, const char* y, Rect domain, Binding params) {
  Model2D m;
  m.f = parse(f);
  m.g = parse(g);
  m.x_name = x;
  m.y_name = y;
  m.params = std::move(params);
  m.domain = domain;
  return m;
}

ModelRecord record1(std::string name, Model1D m) {
  ModelRecord r;
  r.name = std::move(name);
  r.kind = ModelKind::Ode1;
  r.ode1 = std::move(m);
  return r;
}

ModelRecord record2(std::string name, Model2D m) {
  ModelRecord r;
  r.name = std::move(name);
  r.kind = ModelKind::Ode2;
  r.ode2 = std::move(m);
  return r;
}

Expectation values(std::string check, std::vector<double> args, std::vector<double> expected, double tol,
                   Provenance src) {
  Expectation e;
  e.check = std::move(check);
  e.args = std::move(args);
  e.values = std::move(expected);
  e.tolerance = tol;
  e.source = src;
  return e;
}

Expectation label(std::string check, std::vector<double> args, std::string expected, Provenance src) {
  Expectation e;
  e.check = std::move(check);
  e.args = std::move(args);
  e.label = std::move(expected);
  e.source = src;
  return e;
}

Expectation scan(std::string check, std::string param, double lo, double hi, int steps, double expected,
                 double tol, Provenance src, Binding overrides = {}) {
  Expectation e = values(std::move(check), {lo, hi, static_cast<double>(steps)}, {expected}, tol, src);
  e.param = std::move(param);
  e.overrides = std::move(overrides);
  return e;
}

constexpr auto Key = Provenance::AnswerKey;
constexpr auto Worked = Provenance::WorkedExample;
constexpr auto Derived = Provenance::Derived;

ModelRecord make_malthus() {
  ModelRecord r = record1("malthus", ode1("k*N", "N", -1, 5, {{"k", 1.5}}));
  r.expectations = {
      values("equilibria", {}, {0}, 1e-8, Derived),
      label("class", {0}, "unstable", Derived),
      values("doubling_time", {1}, {0.46}, 5e-3, Key),
  };
  return r;
}

ModelRecord make_logistic() {
  ModelRecord r = record1("logistic", ode1("r*n*(1 - n/k)", "n", -1, 5, {{"r", 2.0}, {"k", 3.0}}));
  r.expectations = {
      values("equilibria", {}, {0, 3}, 1e-8, Worked),
      values("attractors", {}, {3}, 1e-8, Worked),
      label("class", {0}, "unstable", Worked),
      label("class", {3}, "stable", Worked),
  };
  return r;
}

ModelRecord make_logistic_harvest() {
  ModelRecord r = record1("logistic_harvest",
                          ode1("r*n*(1 - n/k) - h", "n", -1, 5, {{"r", 2.0}, {"k", 3.0}, {"h", 0.0}}));
  r.expectations = {
      scan("fold", "h", 0, 2, 200, 1.5, 1e-6, Worked),
      scan("fold", "h", 0, 2, 200, 1.0, 1e-6, Key, {{"r", 1.0}, {"k", 4.0}}),
  };
  return r;
}

ModelRecord make_gene_product() {
  ModelRecord r = record1("gene_product", ode1("-x*(x - 0.2)*(x - 1) + s", "x", -0.5, 1.5, {{"s", 0.0}}));
  const double xc = (1.2 - std::sqrt(0.84)) / 3.0;
  r.expectations = {
      values("equilibria", {}, {0, 0.2, 1}, 1e-8, Derived),
      values("attractors", {}, {0, 1}, 1e-8, Key),
      // The published maximum is rounded to three decimals.
      scan("fold", "s", 0, 0.02, 200, 0.009, 5e-5, Key),
      scan("fold", "s", 0, 0.02, 200, xc * (xc - 0.2) * (xc - 1), 1e-6, Derived),
  };
  return r;
}

ModelRecord make_ppour() {
  ModelRecord r = record2("ppour", ode2("3*x*(1 - x) - 1.5*x*y", "0.5*x*y - 0.25*y", "x", "y", {0, 2, 0, 3}, {}));
  r.expectations = {
      values("equilibria", {}, {0, 0, 0.5, 1, 1, 0}, 1e-8, Worked),
      label("class", {0, 0}, "saddle", Worked),
      label("class", {0.5, 1}, "stable_node", Worked),
      label("class", {1, 0}, "saddle", Worked),
      values("jacobian", {0.5, 1}, {-1.5, -0.75, 0.5, 0}, 1e-10, Worked),
      label("sign_class", {0, 0, 0.05}, "saddle", Worked),
      label("sign_class", {0.5, 1, 0.05}, "stable_node_or_spiral", Worked),
      label("sign_class", {1, 0, 0.05}, "saddle", Worked),
  };
  return r;
}

ModelRecord make_lotka_volterra() {
  ModelRecord r = record2("lotka_volterra", ode2("a*N - b*N*P", "c*N*P - d*P", "N", "P", {0, 5, 0, 5},
                                                 {{"a", 1.0}, {"b", 0.5}, {"c", 0.5}, {"d", 1.0}}));
  r.expectations = {
      values("equilibria", {}, {0, 0, 2, 2}, 1e-8, Key),
      label("class", {2, 2}, "center", Key),
      label("class", {0, 0}, "saddle", Derived),
      values("jacobian", {2, 2}, {0, -1, 1, 0}, 1e-10, Key),
      label("sign_class", {2, 2, 0.05}, "center", Key),
  };
  return r;
}

ModelRecord make_algae() {
  ModelRecord r = record2("algae", ode2("2*x*(1 - y)", "2 - y - x^2", "x", "y", {0, 3, 0, 3}, {}));
  r.expectations = {
      values("equilibria", {}, {0, 2, 1, 1}, 1e-8, Key),
      label("class", {0, 2}, "stable_node", Key),
      label("class", {1, 1}, "saddle", Key),
      label("sign_class", {0, 2, 0.05}, "stable_node", Key),
      label("sign_class", {1, 1, 0.05}, "saddle", Key),
  };
  return r;
}

ModelRecord make_si_epidemic() {
  ModelRecord r = record2("si_epidemic", ode2("B - beta*S*I - mu*S", "beta*S*I - alpha*I", "S", "I", {0, 3, 0, 3},
                                              {{"B", 1.0}, {"beta", 1.0}, {"mu", 0.5}, {"alpha", 0.5}}));
  // (B/mu, 0) and (alpha/beta, B/alpha - mu/beta).
  r.expectations = {
      values("equilibria", {}, {0.5, 1.5, 2, 0}, 1e-8, Key),
      label("class", {2, 0}, "saddle", Derived),
      label("class", {0.5, 1.5}, "stable_node", Derived),
  };
  return r;
}

ModelRecord make_mrna_protein() {
  ModelRecord r = record2("mrna_protein", ode2("a/(1 + P) - b*M", "c*M - d*P", "M", "P", {0, 2, 0, 2},
                                               {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"d", 1.0}}));
  // P = (-1 + sqrt(1 + 4ac/(bd)))/2, M = dP/c.
  const double p = (-1.0 + std::sqrt(5.0)) / 2.0;
  r.expectations = {
      values("equilibria", {}, {p, p}, 1e-8, Key),
      label("class", {p, p}, "stable_spiral", Derived),
  };
  return r;
}

ModelRecord make_cardiac() {
  ModelRecord r = record2("cardiac", ode2("-e*(e - a)*(e - 1) - g", "eps*e", "e", "g", {-0.5, 1.5, -0.3, 0.3},
                                          {{"a", 0.2}, {"eps", 0.05}}));
  // a^2 < 4 eps: spiral.
  r.expectations = {
      values("equilibria", {}, {0, 0}, 1e-8, Key),
      values("jacobian", {0, 0}, {-0.2, -1, 0.05, 0}, 1e-10, Key),
      label("class", {0, 0}, "stable_spiral", Key),
  };
  return r;
}

ModelRecord make_holling_tanner() {
  ModelRecord r = record2("holling_tanner", ode2("r*P*(1 - P/K) - a*R*P/(d + P)", "b*R*(1 - R/P)", "P", "R",
                                                 {0.1, 1.5, 0, 1.5},
                                                 {{"a", 1.0}, {"b", 0.2}, {"r", 1.0}, {"d", 1.0}, {"K", 0.7}}));
  // Interior point R = P with P^2 + P - K = 0 at d = r = a = 1.
  const double p = (-1.0 + std::sqrt(1.0 + 4 * 0.7)) / 2.0;
  r.expectations = {
      values("equilibria", {}, {p, p, 0.7, 0}, 1e-8, Derived),
      label("class", {p, p}, "stable_spiral", Worked),
      label("cycle", {p, p}, "none", Worked),
  };
  return r;
}

ModelRecord make_brusselator() {
  ModelRecord r = record2("brusselator", ode2("a - (b + 1)*x + x^2*y", "b*x - x^2*y", "x", "y", {0, 4, 0, 6},
                                              {{"a", 1.0}, {"b", 1.5}}));
  // tr J = b - 1 - a^2, det J = a^2 at (a, b/a).
  r.expectations = {
      values("equilibria", {}, {1, 1.5}, 1e-8, Derived),
      label("class", {1, 1.5}, "stable_spiral", Derived),
      scan("hopf", "b", 1.5, 2.5, 100, 2.0, 1e-6, Derived),
      label("cycle", {1, 1.5}, "none", Derived),
  };
  Expectation above = label("cycle", {1, 2.5}, "stable", Derived);
  above.overrides = {{"b", 2.5}};
  r.expectations.push_back(above);
  return r;
}

ModelRecord make_compartment() {
  ModelRecord r = record2("compartment", ode2("-(a + c)*x + b*y", "a*x - (b + e)*y", "x", "y", {-1, 1, -1, 1},
                                              {{"a", 0.5}, {"b", 2.0}, {"c", 4.5}, {"e", 3.0}}));
  r.expectations = {
      values("equilibria", {}, {0, 0}, 1e-8, Key),
      values("jacobian", {0, 0}, {-5, 2, 0.5, -5}, 1e-12, Key),
      label("class", {0, 0}, "stable_node", Key),
  };
  return r;
}

ModelRecord make_diffusion() {
  ModelRecord r = record2("diffusion", ode2("-k/V1*(C1 - C2)", "k/V2*(C1 - C2)", "C1", "C2", {0, 4, 0, 4},
                                            {{"k", 0.2}, {"V1", 20.0}, {"V2", 5.0}}));
  for (double t : {0.0, 10.0, 100.0}) {
    const double e = std::exp(-0.05 * t);
    r.expectations.push_back(values("ivp", {3, 0, t}, {2.4 + 0.6 * e, 2.4 - 2.4 * e}, 1e-9, Key));
  }
  return r;
}

ModelRecord make_budworm() {
  ModelRecord r;
  r.name = "budworm";
  r.kind = ModelKind::Ode1;
  r.available = false;
  r.note = "figure-defined, unavailable: the rate function is only given as a graph";
  return r;
}

const std::vector<std::pair<std::string, std::function<ModelRecord()>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<ModelRecord()>>> models = {
      {"malthus", make_malthus},
      {"logistic", make_logistic},
      {"logistic_harvest", make_logistic_harvest},
      {"gene_product", make_gene_product},
      {"budworm", make_budworm},
      {"ppour", make_ppour},
      {"lotka_volterra", make_lotka_volterra},
      {"algae", make_algae},
      {"si_epidemic", make_si_epidemic},
      {"mrna_protein", make_mrna_protein},
      {"cardiac", make_cardiac},
      {"holling_tanner", make_holling_tanner},
      {"brusselator", make_brusselator},
      {"compartment", make_compartment},
      {"diffusion", make_diffusion},
  };
  return models;
}

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_shortest(v[i]);
  return out + "]";
}

ExpectationOutcome compare(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  bool ok = got.size() == want.size();
  for (std::size_t i = 0; ok && i < got.size(); ++i) ok = std::fabs(got[i] - want[i]) <= tol;
  return {ok, "expected " + list(want) + ", got " + list(got)};
}

ExpectationOutcome compare(std::string_view got, std::string_view want) {
  return {got == want, "expected " + std::string(want) + ", got " + std::string(got)};
}

void need_args(const Expectation& e, std::size_t n) {
  if (e.args.size() != n) throw Error("check " + e.check + " needs " + std::to_string(n) + " arguments");
}

ExpectationOutcome run_1d(const Model1D& m, const Expectation& e) {
  if (e.check == "equilibria" || e.check == "attractors") {
    std::vector<double> got;
    for (const auto& q : find_equilibria_1d(m)) {
      if (e.check == "equilibria" || q.stability == Stability1D::Stable) got.push_back(q.x);
    }
    return compare(got, e.values, e.tolerance);
  }
  if (e.check == "class") {
    need_args(e, 1);
    return compare(to_string(classify_equilibrium_1d(m, e.args[0])), e.label);
  }
  if (e.check == "fold") {
    need_args(e, 3);
    const auto r = fold_scan_1d(m, e.param, e.args[0], e.args[1], static_cast<int>(e.args[2]));
    if (!r) return {e.label == "none", "no fold found"};
    return compare({r->critical}, e.values, e.tolerance);
  }
  if (e.check == "doubling_time") {
    need_args(e, 1);
    const double a = m.rate(0.0);
    const double b = m.rate(1.0) - a;
    const auto t = affine_solution_1d(a, b, e.args[0]).time_to_reach(2 * e.args[0]);
    if (!t) return {false, "never doubles"};
    return compare({*t}, e.values, e.tolerance);
  }
  throw Error("check " + e.check + " does not apply to ode1 models");
}

ExpectationOutcome run_2d(const Model2D& m, const Expectation& e) {
  if (e.check == "equilibria") {
    std::vector<double> got;
    for (Vec2 p : find_equilibria_2d(m)) {
      got.push_back(p.x);
      got.push_back(p.y);
    }
    return compare(got, e.values, e.tolerance);
  }
  if (e.check == "class") {
    need_args(e, 2);
    return compare(to_string(classify_equilibrium_2d(m, {e.args[0], e.args[1]}).classification), e.label);
  }
  if (e.check == "jacobian") {
    need_args(e, 2);
    const Mat2 j = jacobian_at(m, {e.args[0], e.args[1]});
    return compare({j.a, j.b, j.c, j.d}, e.values, e.tolerance);
  }
  if (e.check == "sign_class") {
    need_args(e, 3);
    const SignMat2 s = derive_sign_matrix(m, {e.args[0], e.args[1]}, e.args[2]);
    return compare(to_string(classify_from_signs(s)), e.label);
  }
  if (e.check == "hopf") {
    need_args(e, 3);
    const auto r = hopf_scan(m, e.param, e.args[0], e.args[1], static_cast<int>(e.args[2]));
    if (!r) return {e.label == "none", "no Hopf point found"};
    return compare({r->critical}, e.values, e.tolerance);
  }
  if (e.check == "ivp") {
    need_args(e, 3);
    const IVPCoefficients sol = solve_ivp(jacobian_at(m, {0, 0}), {e.args[0], e.args[1]});
    const Vec2 v = eval_solution(sol, e.args[2]);
    return compare({v.x, v.y}, e.values, e.tolerance);
  }
  if (e.check == "cycle") {
    need_args(e, 2);
    const CycleReport c = detect_limit_cycle(m, {e.args[0], e.args[1]});
    if (!c.found) return {e.label == "none", "no cycle: " + c.reason};
    return compare(to_string(c.stability), e.label);
  }
  throw Error("check " + e.check + " does not apply to ode2 models");
}

}  // namespace

std::string_view to_string(ModelKind k) { return k == ModelKind::Ode1 ? "ode1" : "ode2"; }

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::AnswerKey:
      return "answer_key";
    case Provenance::WorkedExample:
      return "worked_example";
    case Provenance::Derived:
      return "derived";
  }
  return "?";
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : registry()) out.push_back(entry.first);
    return out;
  }();
  return names;
}

ModelRecord builtin_model(std::string_view name) {
  for (const auto& [key, make] : registry()) {
    if (key == name) return make();
  }
  std::string known;
  for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
  throw ModelError("unknown model " + std::string(name) + " (known: " + known + ")");
}

ExpectationOutcome check_expectation(const ModelRecord& record, const Expectation& e) {
  if (!record.available) return {false, record.name + " is unavailable"};
  try {
    if (record.kind == ModelKind::Ode1) {
      Model1D m = record.ode1;
      for (const auto& [k, v] : e.overrides) m.params.insert_or_assign(k, v);
      return run_1d(m, e);
    }
    Model2D m = record.ode2;
    for (const auto& [k, v] : e.overrides) m.params.insert_or_assign(k, v);
    return run_2d(m, e);
  } catch (const Error& err) {
    return {false, err.what()};
  }
}

}  // namespace phaseplane
