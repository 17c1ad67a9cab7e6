#include "tal/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "tal/common.hpp"

namespace tal {

struct Expr::Node {
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Call };
  Kind kind;
  double value = 0.0;     // Const
  std::string name;       // Var or Call function name
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Node::Kind;

NodePtr make_const(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::Const;
  n->value = v;
  return n;
}

NodePtr make_var(const std::string& name) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::Var;
  n->name = name;
  return n;
}

NodePtr make_node(Kind kind, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_call(const std::string& fn, NodePtr arg) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::Call;
  n->name = fn;
  n->a = std::move(arg);
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Kind::Const && n->value == v;
}

// Light simplifier so derivatives stay compact.
NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  if (a->kind == Kind::Const && b->kind == Kind::Const) return make_const(a->value + b->value);
  return make_node(Kind::Add, a, b);
}
NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0)) return a;
  if (a->kind == Kind::Const && b->kind == Kind::Const) return make_const(a->value - b->value);
  return make_node(Kind::Sub, a, b);
}
NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0) || is_const(b, 0)) return make_const(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  if (a->kind == Kind::Const && b->kind == Kind::Const) return make_const(a->value * b->value);
  return make_node(Kind::Mul, a, b);
}
NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a, 0)) return make_const(0);
  if (is_const(b, 1)) return a;
  if (a->kind == Kind::Const && b->kind == Kind::Const && b->value != 0)
    return make_const(a->value / b->value);
  return make_node(Kind::Div, a, b);
}
NodePtr neg(NodePtr a) {
  if (a->kind == Kind::Const) return make_const(-a->value);
  return make_node(Kind::Neg, a);
}
NodePtr pow_node(NodePtr a, NodePtr b) {
  if (is_const(b, 1)) return a;
  if (is_const(b, 0)) return make_const(1);
  return make_node(Kind::Pow, a, b);
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      fail(ErrorKind::ConfigError, "unexpected trailing input in expression: '" +
                                       text_.substr(pos_) + "'");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    while (true) {
      if (consume('+')) {
        e = add(e, parse_term());
      } else if (consume('-')) {
        e = sub(e, parse_term());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_factor();
    while (true) {
      if (consume('*')) {
        e = mul(e, parse_factor());
      } else if (consume('/')) {
        e = div(e, parse_factor());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_unary();
    if (consume('^')) {
      return pow_node(base, parse_factor());  // right associative
    }
    return base;
  }

  NodePtr parse_unary() {
    if (consume('-')) return neg(parse_unary());
    if (consume('+')) return parse_unary();
    return parse_primary();
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail(ErrorKind::ConfigError, "unexpected end of expression");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      double v = std::strtod(text_.c_str() + pos_, &end);
      pos_ = end - text_.c_str();
      return make_const(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name = text_.substr(start, pos_ - start);
      if (name == "pi") return make_const(M_PI);
      if (name == "e") return make_const(M_E);
      if (peek() == '(') {
        consume('(');
        NodePtr arg = parse_expr();
        if (!consume(')')) fail(ErrorKind::ConfigError, "missing ')' after " + name);
        static const char* fns[] = {"exp", "log", "sqrt", "abs", "sin", "cos", "tanh"};
        for (const char* fn : fns) {
          if (name == fn) return make_call(name, arg);
        }
        fail(ErrorKind::ConfigError, "unknown function '" + name + "'");
      }
      return make_var(name);
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!consume(')')) fail(ErrorKind::ConfigError, "missing ')'");
      return e;
    }
    fail(ErrorKind::ConfigError, std::string("unexpected character '") + c + "' in expression");
  }

  const std::string& text_;
  size_t pos_ = 0;
};

double eval_node(const Expr::Node& n, const std::map<std::string, double>& vars) {
  switch (n.kind) {
    case Kind::Const: return n.value;
    case Kind::Var: {
      auto it = vars.find(n.name);
      if (it == vars.end())
        fail(ErrorKind::ConfigError, "unbound variable '" + n.name + "' in expression");
      return it->second;
    }
    case Kind::Add: return eval_node(*n.a, vars) + eval_node(*n.b, vars);
    case Kind::Sub: return eval_node(*n.a, vars) - eval_node(*n.b, vars);
    case Kind::Mul: return eval_node(*n.a, vars) * eval_node(*n.b, vars);
    case Kind::Div: return eval_node(*n.a, vars) / eval_node(*n.b, vars);
    case Kind::Pow: return std::pow(eval_node(*n.a, vars), eval_node(*n.b, vars));
    case Kind::Neg: return -eval_node(*n.a, vars);
    case Kind::Call: {
      double v = eval_node(*n.a, vars);
      if (n.name == "exp") return std::exp(v);
      if (n.name == "log") return std::log(v);
      if (n.name == "sqrt") return std::sqrt(v);
      if (n.name == "abs") return std::abs(v);
      if (n.name == "sin") return std::sin(v);
      if (n.name == "cos") return std::cos(v);
      if (n.name == "tanh") return std::tanh(v);
      break;
    }
  }
  fail(ErrorKind::ConfigError, "corrupt expression node");
}

NodePtr diff_node(const NodePtr& n, const std::string& var) {
  switch (n->kind) {
    case Kind::Const: return make_const(0);
    case Kind::Var: return make_const(n->name == var ? 1 : 0);
    case Kind::Add: return add(diff_node(n->a, var), diff_node(n->b, var));
    case Kind::Sub: return sub(diff_node(n->a, var), diff_node(n->b, var));
    case Kind::Mul:
      return add(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var)));
    case Kind::Div:
      return div(sub(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var))),
                 mul(n->b, n->b));
    case Kind::Pow: {
      if (n->b->kind == Kind::Const) {
        const double c = n->b->value;
        return mul(mul(make_const(c), pow_node(n->a, make_const(c - 1))), diff_node(n->a, var));
      }
      // a^b = exp(b log a)
      NodePtr da = diff_node(n->a, var), db = diff_node(n->b, var);
      NodePtr term = add(mul(db, make_call("log", n->a)), div(mul(n->b, da), n->a));
      return mul(pow_node(n->a, n->b), term);
    }
    case Kind::Neg: return neg(diff_node(n->a, var));
    case Kind::Call: {
      NodePtr da = diff_node(n->a, var);
      if (n->name == "exp") return mul(make_call("exp", n->a), da);
      if (n->name == "log") return div(da, n->a);
      if (n->name == "sqrt")
        return div(da, mul(make_const(2), make_call("sqrt", n->a)));
      if (n->name == "abs") return mul(div(n->a, make_call("abs", n->a)), da);
      if (n->name == "sin") return mul(make_call("cos", n->a), da);
      if (n->name == "cos") return neg(mul(make_call("sin", n->a), da));
      if (n->name == "tanh") {
        NodePtr t = make_call("tanh", n->a);
        return mul(sub(make_const(1), mul(t, t)), da);
      }
      break;
    }
  }
  fail(ErrorKind::ConfigError, "cannot differentiate expression node");
}

bool depends_node(const Expr::Node& n, const std::string& var) {
  switch (n.kind) {
    case Kind::Const: return false;
    case Kind::Var: return n.name == var;
    case Kind::Neg:
    case Kind::Call: return depends_node(*n.a, var);
    default: return depends_node(*n.a, var) || depends_node(*n.b, var);
  }
}

void print_node(const Expr::Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Const: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", n.value);
      out += buf;
      return;
    }
    case Kind::Var: out += n.name; return;
    case Kind::Add: out += '('; print_node(*n.a, out); out += " + "; print_node(*n.b, out); out += ')'; return;
    case Kind::Sub: out += '('; print_node(*n.a, out); out += " - "; print_node(*n.b, out); out += ')'; return;
    case Kind::Mul: out += '('; print_node(*n.a, out); out += " * "; print_node(*n.b, out); out += ')'; return;
    case Kind::Div: out += '('; print_node(*n.a, out); out += " / "; print_node(*n.b, out); out += ')'; return;
    case Kind::Pow: out += '('; print_node(*n.a, out); out += '^'; print_node(*n.b, out); out += ')'; return;
    case Kind::Neg: out += "(-"; print_node(*n.a, out); out += ')'; return;
    case Kind::Call: out += n.name; out += '('; print_node(*n.a, out); out += ')'; return;
  }
}

}  // namespace

Expr Expr::parse(const std::string& text) {
  Parser parser(text);
  return Expr(parser.parse());
}

Expr Expr::constant(double value) { return Expr(make_const(value)); }

Expr Expr::variable(const std::string& name) { return Expr(make_var(name)); }

double Expr::operator()(double x) const {
  static const std::string kX = "x";
  std::map<std::string, double> vars{{kX, x}};
  return eval(vars);
}

double Expr::eval(const std::map<std::string, double>& vars) const {
  if (!root_) fail(ErrorKind::ConfigError, "evaluating empty expression");
  return eval_node(*root_, vars);
}

Expr Expr::derivative(const std::string& var) const {
  if (!root_) fail(ErrorKind::ConfigError, "differentiating empty expression");
  return Expr(diff_node(root_, var));
}

bool Expr::depends_on(const std::string& var) const {
  return root_ && depends_node(*root_, var);
}

std::string Expr::to_string() const {
  std::string out;
  if (root_) print_node(*root_, out);
  return out;
}

}  // namespace tal
