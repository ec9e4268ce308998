#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "phaseplane/phase1d.hpp"
#include "phaseplane/phase2d.hpp"

namespace phaseplane {

enum class ModelKind { Ode1, Ode2 };
/// "ode1" / "ode2", the spelling used in model files.
std::string_view to_string(ModelKind k);

/// Where an expected value comes from.
enum class Provenance { AnswerKey, WorkedExample, Derived };
std::string_view to_string(Provenance p);

/// One checkable claim about a model. `check` selects what is run:
///   equilibria     all equilibria, flattened (x for 1D, x y pairs for 2D)
///   attractors     stable 1D equilibria
///   class          classification at `args` (1D stability or 2D det-tr class)
///   jacobian       Jacobian at `args` = {x, y}, row-major
///   sign_class     sign matrix at `args` = {x, y, h}, checked as a PartialClass
///   fold / hopf    critical value of `param` over `args` = {lo, hi, steps};
///                  label "none" means no bifurcation is expected
///   doubling_time  1D linear growth from `args` = {x0} to 2 x0
///   ivp            linear 2D solution from `args` = {x0, y0, t}
///   cycle          detect_limit_cycle around `args` = {x, y}; label is the
///                  stability, or "none" for found = false
struct Expectation {
  std::string check;
  std::vector<double> args;
  std::vector<double> values;
  std::string label;
  double tolerance = 0.0;
  Provenance source = Provenance::Derived;
  std::string param;
  /// Parameter values that replace the model's defaults for this check.
  Binding overrides;
};

struct ModelRecord {
  std::string name;
  ModelKind kind = ModelKind::Ode2;
  Model1D ode1;  // used when kind == Ode1
  Model2D ode2;  // used when kind == Ode2
  std::vector<Expectation> expectations;
  /// False for models known only from a figure; the equations are empty.
  bool available = true;
  std::string note;
};

/// Registry names in registration order.
const std::vector<std::string>& builtin_names();

/// Throws ModelError for unknown names; the message lists the known ones.
ModelRecord builtin_model(std::string_view name);

struct ExpectationOutcome {
  bool passed = false;
  std::string detail;
};

/// Runs one expectation through the library. Library errors are reported as
/// a failed outcome rather than thrown.
ExpectationOutcome check_expectation(const ModelRecord& record, const Expectation& e);

/// Parses the line-oriented model file format:
///
///   [model]      name, kind (ode1 | ode2), vars
///   [params]     name = number
///   [equations]  var = expression
///   [domain]     var = lo hi
///
/// `#` starts a comment. Throws ModelFormatError with the line number.
ModelRecord parse_model_file(std::string_view text);

/// Canonical model file text; parse_model_file reads it back to a model with
/// identical expressions, parameters and domain.
std::string serialize_model(const ModelRecord& record);

}  // namespace phaseplane
