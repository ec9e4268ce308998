#include "phaseplane/expr.hpp"

#include <algorithm>
#include <array>

#include "expr_math.hpp"
#include "phaseplane/error.hpp"
#include "phaseplane/format.hpp"

namespace phaseplane {

struct Expr::Node {
  Kind kind;
  double value = 0.0;
  std::string name;
  BinaryOp op = BinaryOp::Add;
  Function function = Function::Sin;
  std::vector<Expr> children;
};

namespace {

constexpr std::array<std::pair<std::string_view, Function>, 7> kFunctions{{
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"tan", Function::Tan},
    {"exp", Function::Exp},
    {"ln", Function::Ln},
    {"sqrt", Function::Sqrt},
    {"abs", Function::Abs},
}};

char op_char(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add:
      return '+';
    case BinaryOp::Sub:
      return '-';
    case BinaryOp::Mul:
      return '*';
    case BinaryOp::Div:
      return '/';
    case BinaryOp::Pow:
      return '^';
  }
  return '?';
}

// Binding strength used when rendering.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Number:
      return e.value() < 0.0 ? 3 : 5;
    case Expr::Kind::Identifier:
    case Expr::Kind::Call:
      return 5;
    case Expr::Kind::Negate:
      return 3;
    case Expr::Kind::Binary:
      switch (e.op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
          return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div:
          return 2;
        case BinaryOp::Pow:
          return 4;
      }
  }
  return 0;
}


void collect_identifiers(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::Number:
      return;
    case Expr::Kind::Identifier:
      out.insert(e.name());
      return;
    case Expr::Kind::Negate:
    case Expr::Kind::Call:
      collect_identifiers(e.operand(), out);
      return;
    case Expr::Kind::Binary:
      collect_identifiers(e.lhs(), out);
      collect_identifiers(e.rhs(), out);
      return;
  }
}

std::string parenthesize(const std::string& s) { return "(" + s + ")"; }

}  // namespace

std::string_view function_name(Function f) {
  for (const auto& [name, fn] : kFunctions) {
    if (fn == f) return name;
  }
  return "?";
}

std::optional<Function> function_from_name(std::string_view name) {
  for (const auto& [n, fn] : kFunctions) {
    if (n == name) return fn;
  }
  return std::nullopt;
}

Expr::Expr() : node_(number(0.0).node_) {}

Expr Expr::number(double value) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Number;
  node->value = value;
  return Expr(std::move(node));
}

Expr Expr::identifier(std::string name) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Identifier;
  node->name = std::move(name);
  return Expr(std::move(node));
}

Expr Expr::negate(Expr operand) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Negate;
  node->children.push_back(std::move(operand));
  return Expr(std::move(node));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Binary;
  node->op = op;
  node->children.push_back(std::move(lhs));
  node->children.push_back(std::move(rhs));
  return Expr(std::move(node));
}

Expr Expr::call(Function f, Expr argument) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Call;
  node->function = f;
  node->children.push_back(std::move(argument));
  return Expr(std::move(node));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
BinaryOp Expr::op() const { return node_->op; }
Function Expr::function() const { return node_->function; }
const Expr& Expr::operand() const { return node_->children.at(0); }
const Expr& Expr::lhs() const { return node_->children.at(0); }
const Expr& Expr::rhs() const { return node_->children.at(1); }

std::set<std::string> Expr::identifiers() const {
  std::set<std::string> out;
  collect_identifiers(*this, out);
  return out;
}

bool Expr::depends_on(std::string_view var) const {
  switch (kind()) {
    case Kind::Number:
      return false;
    case Kind::Identifier:
      return name() == var;
    case Kind::Negate:
    case Kind::Call:
      return operand().depends_on(var);
    case Kind::Binary:
      return lhs().depends_on(var) || rhs().depends_on(var);
  }
  return false;
}

std::string Expr::render() const {
  switch (kind()) {
    case Kind::Number: {
      std::string s = format_shortest(value());
      return value() < 0.0 ? parenthesize(s) : s;
    }
    case Kind::Identifier:
      return name();
    case Kind::Negate: {
      // Anything binding looser than power must be wrapped, otherwise
      // "-a*b" would come back as (-a)*b.
      std::string inner = operand().render();
      if (precedence(operand()) < 4) inner = parenthesize(inner);
      return "-" + inner;
    }
    case Kind::Call:
      return std::string(function_name(function())) + "(" + operand().render() + ")";
    case Kind::Binary: {
      const int p = precedence(*this);
      std::string l = lhs().render();
      std::string r = rhs().render();
      if (op() == BinaryOp::Pow) {
        if (precedence(lhs()) <= p) l = parenthesize(l);
        if (precedence(rhs()) < p) r = parenthesize(r);
      } else {
        // Left-associative: a right operand of equal precedence keeps its
        // parentheses so the tree (and its rounding) is preserved exactly.
        if (precedence(lhs()) < p) l = parenthesize(l);
        if (precedence(rhs()) <= p) r = parenthesize(r);
      }
      return l + op_char(op()) + r;
    }
  }
  return {};
}

std::string Expr::sexpr() const {
  switch (kind()) {
    case Kind::Number:
      return format_shortest(value());
    case Kind::Identifier:
      return name();
    case Kind::Negate:
      return "(neg " + operand().sexpr() + ")";
    case Kind::Call:
      return "(" + std::string(function_name(function())) + " " + operand().sexpr() + ")";
    case Kind::Binary:
      return std::string("(") + op_char(op()) + " " + lhs().sexpr() + " " + rhs().sexpr() + ")";
  }
  return {};
}

double evaluate(const Expr& e, const Binding& env) {
  switch (e.kind()) {
    case Expr::Kind::Number:
      return e.value();
    case Expr::Kind::Identifier: {
      auto it = env.find(e.name());
      if (it == env.end()) throw UnboundIdentifierError(e.name());
      return it->second;
    }
    case Expr::Kind::Negate:
      return -evaluate(e.operand(), env);
    case Expr::Kind::Call:
      return detail::apply_function(e.function(), evaluate(e.operand(), env));
    case Expr::Kind::Binary:
      return detail::apply_binary(e.op(), evaluate(e.lhs(), env), evaluate(e.rhs(), env));
  }
  return 0.0;
}

CompiledExpr::CompiledExpr(const Expr& e, std::span<const std::string> slots) {
  emit(e, slots, 1);
}

void CompiledExpr::emit(const Expr& e, std::span<const std::string> slots, std::size_t depth) {
  max_depth_ = std::max(max_depth_, depth);
  switch (e.kind()) {
    case Expr::Kind::Number:
      code_.push_back({OpCode::Const, e.value()});
      return;
    case Expr::Kind::Identifier: {
      auto it = std::find(slots.begin(), slots.end(), e.name());
      if (it == slots.end()) throw UnboundIdentifierError(e.name());
      Instr in{OpCode::Slot};
      in.slot = static_cast<std::size_t>(it - slots.begin());
      code_.push_back(in);
      return;
    }
    case Expr::Kind::Negate:
      emit(e.operand(), slots, depth);
      code_.push_back({OpCode::Neg});
      return;
    case Expr::Kind::Call: {
      emit(e.operand(), slots, depth);
      Instr in{OpCode::Call};
      in.function = e.function();
      code_.push_back(in);
      return;
    }
    case Expr::Kind::Binary: {
      emit(e.lhs(), slots, depth);
      emit(e.rhs(), slots, depth + 1);
      OpCode code = OpCode::Add;
      switch (e.op()) {
        case BinaryOp::Add:
          code = OpCode::Add;
          break;
        case BinaryOp::Sub:
          code = OpCode::Sub;
          break;
        case BinaryOp::Mul:
          code = OpCode::Mul;
          break;
        case BinaryOp::Div:
          code = OpCode::Div;
          break;
        case BinaryOp::Pow:
          code = OpCode::Pow;
          break;
      }
      code_.push_back({code});
      return;
    }
  }
}

double CompiledExpr::operator()(std::span<const double> values) const {
  constexpr std::size_t kInline = 32;
  std::array<double, kInline> inline_stack{};
  std::vector<double> heap_stack;
  double* stack = inline_stack.data();
  if (max_depth_ > kInline) {
    heap_stack.resize(max_depth_);
    stack = heap_stack.data();
  }
  std::size_t top = 0;
  for (const Instr& in : code_) {
    switch (in.code) {
      case OpCode::Const:
        stack[top++] = in.constant;
        break;
      case OpCode::Slot:
        stack[top++] = values[in.slot];
        break;
      case OpCode::Neg:
        stack[top - 1] = -stack[top - 1];
        break;
      case OpCode::Call:
        stack[top - 1] = detail::apply_function(in.function, stack[top - 1]);
        break;
      case OpCode::Add:
      case OpCode::Sub:
      case OpCode::Mul:
      case OpCode::Div:
      case OpCode::Pow: {
        static constexpr BinaryOp kOps[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul,
                                            BinaryOp::Div, BinaryOp::Pow};
        const auto op = kOps[static_cast<int>(in.code) - static_cast<int>(OpCode::Add)];
        --top;
        stack[top - 1] = detail::apply_binary(op, stack[top - 1], stack[top]);
        break;
      }
    }
  }
  return top == 0 ? 0.0 : stack[0];
}

}  // namespace phaseplane
