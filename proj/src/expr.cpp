#include "gcwn/expr.hpp"

#include <algorithm>

#include "gcwn/error.hpp"

namespace gcwn {

std::string_view op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Eq: return "=";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Not: return "!";
  }
  return "?";
}

namespace expr {

namespace {
Expr make(ExprNode node) { return std::make_shared<const ExprNode>(std::move(node)); }
}  // namespace

Expr lit(Value v) {
  ExprNode n;
  n.kind = ExprNode::Kind::Literal;
  n.value = std::move(v);
  return make(std::move(n));
}
Expr integer(std::int64_t v) { return lit(Value::integer(v)); }
Expr boolean(bool v) { return lit(Value::boolean(v)); }
Expr atom(std::string name) { return lit(Value::atom(std::move(name))); }

Expr var(Variable name) {
  ExprNode n;
  n.kind = ExprNode::Kind::Var;
  n.name = std::move(name);
  return make(std::move(n));
}

Expr tuple(std::vector<Expr> items) {
  ExprNode n;
  n.kind = ExprNode::Kind::Tuple;
  n.args = std::move(items);
  return make(std::move(n));
}

Expr list(std::vector<Expr> items) {
  ExprNode n;
  n.kind = ExprNode::Kind::List;
  n.args = std::move(items);
  return make(std::move(n));
}

Expr unary(Op op, Expr operand) {
  ExprNode n;
  n.kind = ExprNode::Kind::Unary;
  n.op = op;
  n.args = {std::move(operand)};
  return make(std::move(n));
}

Expr binary(Op op, Expr lhs, Expr rhs) {
  ExprNode n;
  n.kind = ExprNode::Kind::Binary;
  n.op = op;
  n.args = {std::move(lhs), std::move(rhs)};
  return make(std::move(n));
}

Expr prim(std::string name, std::vector<Expr> args) {
  ExprNode n;
  n.kind = ExprNode::Kind::Prim;
  n.name = std::move(name);
  n.args = std::move(args);
  return make(std::move(n));
}

}  // namespace expr

// ---------------------------------------------------------------------------
// Registry

const PrimitiveRegistry& PrimitiveRegistry::builtin() {
  static const PrimitiveRegistry reg = [] {
    PrimitiveRegistry r;
    register_list_primitives(r);
    register_crypto_primitives(r);
    return r;
  }();
  return reg;
}

void PrimitiveRegistry::add(Primitive p) {
  auto name = p.name;
  prims_.insert_or_assign(std::move(name), std::move(p));
}

const Primitive* PrimitiveRegistry::find(std::string_view name) const {
  auto it = prims_.find(name);
  return it == prims_.end() ? nullptr : &it->second;
}

std::vector<std::string> PrimitiveRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : prims_) out.push_back(k);
  return out;
}

void register_list_primitives(PrimitiveRegistry& reg) {
  auto elements = [](const Value& v, Value::Kind k, std::string_view what) {
    if (!v.is(k)) {
      throw EvalError(ErrorCode::TypeError,
                      std::string(what) + " applied to non-" +
                          std::string(kind_name(k)) + " " + to_string(v));
    }
    return v.items();
  };
  reg.add({"fst", 1, [=](std::span<const Value> a) {
             auto xs = elements(a[0], Value::Kind::Tuple, "fst");
             if (xs.empty()) throw EvalError(ErrorCode::TypeError, "fst of empty tuple");
             return xs[0];
           }});
  reg.add({"snd", 1, [=](std::span<const Value> a) {
             auto xs = elements(a[0], Value::Kind::Tuple, "snd");
             if (xs.size() < 2) throw EvalError(ErrorCode::TypeError, "snd of " + to_string(a[0]));
             return xs[1];
           }});
  reg.add({"head", 1, [=](std::span<const Value> a) {
             auto xs = elements(a[0], Value::Kind::List, "head");
             if (xs.empty()) throw EvalError(ErrorCode::TypeError, "head of empty list");
             return xs[0];
           }});
  reg.add({"tail", 1, [=](std::span<const Value> a) {
             auto xs = elements(a[0], Value::Kind::List, "tail");
             if (xs.empty()) throw EvalError(ErrorCode::TypeError, "tail of empty list");
             return Value::list({xs.begin() + 1, xs.end()});
           }});
  reg.add({"append", 2, [=](std::span<const Value> a) {
             auto xs = elements(a[0], Value::Kind::List, "append");
             std::vector<Value> out(xs.begin(), xs.end());
             out.push_back(a[1]);
             return Value::list(std::move(out));
           }});
  reg.add({"null", 1, [=](std::span<const Value> a) {
             return Value::boolean(elements(a[0], Value::Kind::List, "null").empty());
           }});
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::int64_t arith(Op op, std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  bool overflow = false;
  switch (op) {
    case Op::Add: overflow = __builtin_add_overflow(a, b, &r); break;
    case Op::Sub: overflow = __builtin_sub_overflow(a, b, &r); break;
    case Op::Mul: overflow = __builtin_mul_overflow(a, b, &r); break;
    default: break;
  }
  if (overflow) {
    throw EvalError(ErrorCode::Overflow, std::to_string(a) + " " +
                                             std::string(op_symbol(op)) + " " +
                                             std::to_string(b));
  }
  return r;
}

Value eval_node(const ExprNode& e, const PrimitiveRegistry& prims) {
  using K = ExprNode::Kind;
  switch (e.kind) {
    case K::Literal: return e.value;
    case K::Var: throw EvalError(ErrorCode::OpenExpression, "free variable " + e.name);
    case K::Tuple:
    case K::List: {
      std::vector<Value> items;
      items.reserve(e.args.size());
      for (const auto& a : e.args) items.push_back(eval_node(*a, prims));
      return e.kind == K::Tuple ? Value::tuple(std::move(items)) : Value::list(std::move(items));
    }
    case K::Unary: {
      Value v = eval_node(*e.args[0], prims);
      // Negation also flips a 0/1 bit, as used for sequence numbers.
      if (v.is(Value::Kind::Bool)) return Value::boolean(!v.as_bool());
      if (v.is(Value::Kind::Int) && (v.as_int() == 0 || v.as_int() == 1)) {
        return Value::integer(1 - v.as_int());
      }
      throw EvalError(ErrorCode::TypeError, "! applied to " + to_string(v));
    }
    case K::Binary: {
      if (e.op == Op::And || e.op == Op::Or) {
        bool lhs = eval_node(*e.args[0], prims).as_bool();
        if (e.op == Op::And && !lhs) return Value::boolean(false);
        if (e.op == Op::Or && lhs) return Value::boolean(true);
        return Value::boolean(eval_node(*e.args[1], prims).as_bool());
      }
      Value a = eval_node(*e.args[0], prims);
      Value b = eval_node(*e.args[1], prims);
      switch (e.op) {
        case Op::Eq: return Value::boolean(a == b);
        case Op::Ne: return Value::boolean(!(a == b));
        case Op::Lt: return Value::boolean(a.as_int() < b.as_int());
        case Op::Le: return Value::boolean(a.as_int() <= b.as_int());
        default: return Value::integer(arith(e.op, a.as_int(), b.as_int()));
      }
    }
    case K::Prim: {
      const Primitive* p = prims.find(e.name);
      if (!p) throw EvalError(ErrorCode::UnknownPrimitive, e.name);
      if (p->arity != e.args.size()) {
        throw EvalError(ErrorCode::ArityError, e.name + " expects " + std::to_string(p->arity) +
                                                   " argument(s), got " +
                                                   std::to_string(e.args.size()));
      }
      std::vector<Value> args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(eval_node(*a, prims));
      return p->apply(args);
    }
  }
  throw EvalError(ErrorCode::TypeError, "bad expression node");
}

}  // namespace

Value eval(const Expr& e, const PrimitiveRegistry& prims) { return eval_node(*e, prims); }

bool eval_bool(const Expr& e, const PrimitiveRegistry& prims) { return eval(e, prims).as_bool(); }

std::optional<Value> try_eval(const Expr& e, const PrimitiveRegistry& prims) {
  if (!is_closed(e)) return std::nullopt;
  try {
    return eval(e, prims);
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Syntactic operations

Expr substitute(const Expr& e, const Bindings& bindings) {
  using K = ExprNode::Kind;
  if (bindings.empty()) return e;
  switch (e->kind) {
    case K::Literal: return e;
    case K::Var: {
      auto it = bindings.find(e->name);
      return it == bindings.end() ? e : expr::lit(it->second);
    }
    default: {
      bool changed = false;
      std::vector<Expr> args;
      args.reserve(e->args.size());
      for (const auto& a : e->args) {
        args.push_back(substitute(a, bindings));
        changed = changed || args.back() != a;
      }
      if (!changed) return e;
      ExprNode n = *e;
      n.args = std::move(args);
      return std::make_shared<const ExprNode>(std::move(n));
    }
  }
}

void collect_free_variables(const Expr& e, std::set<Variable>& out) {
  if (e->kind == ExprNode::Kind::Var) out.insert(e->name);
  for (const auto& a : e->args) collect_free_variables(a, out);
}

void collect_literals(const Expr& e, std::set<Value>& out) {
  if (e->kind == ExprNode::Kind::Literal) out.insert(e->value);
  for (const auto& a : e->args) collect_literals(a, out);
}

void collect_primitives(const Expr& e, std::set<std::string>& out) {
  if (e->kind == ExprNode::Kind::Prim) out.insert(e->name);
  for (const auto& a : e->args) collect_primitives(a, out);
}

bool is_closed(const Expr& e) {
  if (e->kind == ExprNode::Kind::Var) return false;
  return std::all_of(e->args.begin(), e->args.end(), [](const Expr& a) { return is_closed(a); });
}

bool same(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
  switch (a->kind) {
    case ExprNode::Kind::Literal: return a->value == b->value;
    case ExprNode::Kind::Var: return a->name == b->name;
    case ExprNode::Kind::Prim:
      if (a->name != b->name) return false;
      break;
    case ExprNode::Kind::Unary:
    case ExprNode::Kind::Binary:
      if (a->op != b->op) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!same(a->args[i], b->args[i])) return false;
  }
  return true;
}

Expr fold_constants(const Expr& e) {
  if (e->kind == ExprNode::Kind::Literal || e->kind == ExprNode::Kind::Var) return e;
  if (auto v = try_eval(e)) return expr::lit(*v);
  bool changed = false;
  std::vector<Expr> args;
  args.reserve(e->args.size());
  for (const auto& a : e->args) {
    args.push_back(fold_constants(a));
    changed = changed || args.back() != a;
  }
  if (!changed) return e;
  ExprNode n = *e;
  n.args = std::move(args);
  return std::make_shared<const ExprNode>(std::move(n));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength used both by the parser and the printer.
int precedence(const ExprNode& e) {
  if (e.kind == ExprNode::Kind::Unary) return 3;
  if (e.kind != ExprNode::Kind::Binary) return 7;
  switch (e.op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le: return 4;
    case Op::Add:
    case Op::Sub: return 5;
    case Op::Mul: return 6;
    default: return 7;
  }
}

void print_list(std::string& out, const std::vector<Expr>& xs,
                const std::function<std::string(const Variable&)>& var_name) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    print_expr(out, xs[i], var_name);
  }
}

void print_at(std::string& out, const Expr& e, int min_prec,
              const std::function<std::string(const Variable&)>& var_name) {
  if (precedence(*e) < min_prec) {
    out += '(';
    print_expr(out, e, var_name);
    out += ')';
  } else {
    print_expr(out, e, var_name);
  }
}

}  // namespace

void print_expr(std::string& out, const Expr& e,
                const std::function<std::string(const Variable&)>& var_name) {
  using K = ExprNode::Kind;
  switch (e->kind) {
    case K::Literal: out += to_string(e->value); return;
    case K::Var: out += var_name ? var_name(e->name) : e->name; return;
    case K::Tuple:
      out += '(';
      print_list(out, e->args, var_name);
      if (e->args.size() == 1) out += ',';
      out += ')';
      return;
    case K::List:
      out += '[';
      print_list(out, e->args, var_name);
      out += ']';
      return;
    case K::Prim:
      out += e->name;
      out += '(';
      print_list(out, e->args, var_name);
      out += ')';
      return;
    case K::Unary:
      out += '!';
      print_at(out, e->args[0], 4, var_name);
      return;
    case K::Binary: {
      const int p = precedence(*e);
      const bool comparison = p == 4;
      print_at(out, e->args[0], comparison ? p + 1 : p, var_name);
      out += ' ';
      out += op_symbol(e->op);
      out += ' ';
      print_at(out, e->args[1], p + 1, var_name);
      return;
    }
  }
}

std::string to_string(const Expr& e) {
  std::string out;
  print_expr(out, e);
  return out;
}

}  // namespace gcwn
