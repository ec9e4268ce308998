#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

#include "phaseplane/corpus.hpp"
#include "phaseplane/error.hpp"
#include "phaseplane/format.hpp"

namespace phaseplane {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double number(std::string_view text, int line) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ModelFormatError("malformed number '" + std::string(text) + "'", line);
  return v;
}

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry, std::less<>>;

const Entry& require(const Section& s, std::string_view section, std::string_view key) {
  auto it = s.find(key);
  if (it == s.end()) {
    throw ModelFormatError("missing key " + std::string(key) + " in [" + std::string(section) + "]", 0);
  }
  return it->second;
}

}  // namespace

ModelRecord parse_model_file(std::string_view text) {
  static const std::vector<std::string_view> known = {"model", "params", "equations", "domain"};
  std::map<std::string, Section, std::less<>> sections;
  std::map<std::string, int, std::less<>> section_lines;
  std::string current;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ModelFormatError("unterminated section header", line_no);
      const std::string name(trim(line.substr(1, line.size() - 2)));
      bool ok = false;
      for (auto k : known) ok = ok || k == name;
      if (!ok) throw ModelFormatError("unknown section [" + name + "]", line_no);
      if (sections.count(name)) throw ModelFormatError("duplicate section [" + name + "]", line_no);
      sections[name];
      section_lines[name] = line_no;
      current = name;
      continue;
    }
    if (current.empty()) throw ModelFormatError("entry outside any section", line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ModelFormatError("expected key = value", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ModelFormatError("empty key", line_no);
    if (value.empty()) throw ModelFormatError("empty value for " + key, line_no);
    auto& section = sections[current];
    if (section.count(key)) throw ModelFormatError("duplicate key " + key + " in [" + current + "]", line_no);
    section[key] = {value, line_no};
  }

  for (const char* name : {"model", "equations", "domain"}) {
    if (!sections.count(name)) throw ModelFormatError("missing [" + std::string(name) + "] section", 0);
  }

  const Section& model = sections["model"];
  for (const auto& [key, entry] : model) {
    if (key != "name" && key != "kind" && key != "vars") {
      throw ModelFormatError("unknown key " + key + " in [model]", entry.line);
    }
  }
  ModelRecord record;
  const Entry& name = require(model, "model", "name");
  if (!is_identifier(name.value)) throw ModelFormatError("model name must be an identifier", name.line);
  record.name = name.value;

  const Entry& kind = require(model, "model", "kind");
  if (kind.value == "ode1") {
    record.kind = ModelKind::Ode1;
  } else if (kind.value == "ode2") {
    record.kind = ModelKind::Ode2;
  } else {
    throw ModelFormatError("kind must be ode1 or ode2", kind.line);
  }

  const Entry& vars_entry = require(model, "model", "vars");
  std::vector<std::string> vars;
  for (auto w : words(vars_entry.value)) {
    if (!is_identifier(w) || function_from_name(w)) {
      throw ModelFormatError("bad variable name '" + std::string(w) + "'", vars_entry.line);
    }
    for (const auto& v : vars) {
      if (v == w) throw ModelFormatError("duplicate variable " + v, vars_entry.line);
    }
    vars.emplace_back(w);
  }
  const std::size_t want = record.kind == ModelKind::Ode1 ? 1 : 2;
  if (vars.size() != want) {
    throw ModelFormatError(std::string(to_string(record.kind)) + " needs " + std::to_string(want) + " variable" +
                               (want == 1 ? "" : "s"),
                           vars_entry.line);
  }

  Binding params;
  for (const auto& [key, entry] : sections["params"]) {
    if (!is_identifier(key) || function_from_name(key)) {
      throw ModelFormatError("bad parameter name '" + key + "'", entry.line);
    }
    for (const auto& v : vars) {
      if (v == key) throw ModelFormatError("parameter " + key + " shadows a variable", entry.line);
    }
    params[key] = number(entry.value, entry.line);
  }

  const Section& equations = sections["equations"];
  std::vector<Expr> rhs;
  for (const auto& [key, entry] : equations) {
    bool ok = false;
    for (const auto& v : vars) ok = ok || v == key;
    if (!ok) throw ModelFormatError("equation for unknown variable " + key, entry.line);
  }
  for (const auto& v : vars) {
    auto it = equations.find(v);
    if (it == equations.end()) throw ModelFormatError("missing equation for " + v, section_lines["equations"]);
    Expr e;
    try {
      e = parse(it->second.value);
    } catch (const ParseError& err) {
      throw ModelFormatError(err.what(), it->second.line);
    }
    for (const auto& id : e.identifiers()) {
      bool declared = params.count(id) > 0;
      for (const auto& var : vars) declared = declared || var == id;
      if (!declared) throw ModelFormatError("undeclared identifier " + id, it->second.line);
    }
    rhs.push_back(std::move(e));
  }

  const Section& domain = sections["domain"];
  std::vector<std::pair<double, double>> bounds;
  for (const auto& [key, entry] : domain) {
    bool ok = false;
    for (const auto& v : vars) ok = ok || v == key;
    if (!ok) throw ModelFormatError("domain for unknown variable " + key, entry.line);
  }
  for (const auto& v : vars) {
    auto it = domain.find(v);
    if (it == domain.end()) throw ModelFormatError("missing domain for " + v, section_lines["domain"]);
    const auto w = words(it->second.value);
    if (w.size() != 2) throw ModelFormatError("domain needs two bounds", it->second.line);
    const double lo = number(w[0], it->second.line);
    const double hi = number(w[1], it->second.line);
    if (!(lo < hi)) throw ModelFormatError("domain bounds inverted for " + v, it->second.line);
    bounds.emplace_back(lo, hi);
  }

  if (record.kind == ModelKind::Ode1) {
    record.ode1.f = rhs[0];
    record.ode1.var = vars[0];
    record.ode1.params = std::move(params);
    record.ode1.lo = bounds[0].first;
    record.ode1.hi = bounds[0].second;
  } else {
    record.ode2.f = rhs[0];
    record.ode2.g = rhs[1];
    record.ode2.x_name = vars[0];
    record.ode2.y_name = vars[1];
    record.ode2.params = std::move(params);
    record.ode2.domain = {bounds[0].first, bounds[0].second, bounds[1].first, bounds[1].second};
  }
  return record;
}

std::string serialize_model(const ModelRecord& record) {
  if (!record.available) throw ModelError(record.name + " is unavailable: " + record.note);
  const bool one = record.kind == ModelKind::Ode1;
  const Binding& params = one ? record.ode1.params : record.ode2.params;
  std::ostringstream out;
  out << "[model]\nname = " << record.name << "\nkind = " << to_string(record.kind) << "\nvars = ";
  if (one) {
    out << record.ode1.var << "\n";
  } else {
    out << record.ode2.x_name << " " << record.ode2.y_name << "\n";
  }
  if (!params.empty()) {
    out << "[params]\n";
    for (const auto& [k, v] : params) out << k << " = " << format_shortest(v) << "\n";
  }
  out << "[equations]\n";
  if (one) {
    out << record.ode1.var << " = " << record.ode1.f.render() << "\n";
  } else {
    out << record.ode2.x_name << " = " << record.ode2.f.render() << "\n";
    out << record.ode2.y_name << " = " << record.ode2.g.render() << "\n";
  }
  out << "[domain]\n";
  if (one) {
    out << record.ode1.var << " = " << format_shortest(record.ode1.lo) << " " << format_shortest(record.ode1.hi)
        << "\n";
  } else {
    const Rect& d = record.ode2.domain;
    out << record.ode2.x_name << " = " << format_shortest(d.x_lo) << " " << format_shortest(d.x_hi) << "\n";
    out << record.ode2.y_name << " = " << format_shortest(d.y_lo) << " " << format_shortest(d.y_hi) << "\n";
  }
  return out.str();
}

}  // namespace phaseplane
