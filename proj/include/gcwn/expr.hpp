#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gcwn/value.hpp"

namespace gcwn {

using Variable = std::string;
using Bindings = std::map<Variable, Value>;

enum class Op { Add, Sub, Mul, Eq, Ne, Lt, Le, And, Or, Not };

std::string_view op_symbol(Op op);

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// Arithmetic and boolean expressions share one AST; boolean expressions are
/// the ones whose evaluation yields a Bool.
struct ExprNode {
  enum class Kind { Literal, Var, Tuple, List, Unary, Binary, Prim };

  Kind kind = Kind::Literal;
  Value value;              // Literal
  std::string name;         // Var name or primitive name
  Op op = Op::Add;          // Unary / Binary
  std::vector<Expr> args;   // Tuple/List elements, operands, primitive arguments
};

namespace expr {
Expr lit(Value v);
Expr integer(std::int64_t v);
Expr boolean(bool v);
Expr atom(std::string name);
Expr var(Variable name);
Expr tuple(std::vector<Expr> items);
Expr list(std::vector<Expr> items);
Expr unary(Op op, Expr operand);
Expr binary(Op op, Expr lhs, Expr rhs);
Expr prim(std::string name, std::vector<Expr> args);
}  // namespace expr

struct Primitive {
  std::string name;
  std::size_t arity = 0;
  std::function<Value(std::span<const Value>)> apply;
};

/// Named primitive functions available to expressions. The builtin registry
/// holds the pair/list operations, the symbolic crypto constructors and the
/// ARAN message functions.
class PrimitiveRegistry {
 public:
  static const PrimitiveRegistry& builtin();

  void add(Primitive p);
  const Primitive* find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Primitive, std::less<>> prims_;
};

void register_list_primitives(PrimitiveRegistry& reg);
void register_crypto_primitives(PrimitiveRegistry& reg);

/// Evaluates a data-closed expression. Throws EvalError (OpenExpression,
/// ArityError, TypeError, Overflow, MalformedMessage, UnknownPrimitive).
Value eval(const Expr& e, const PrimitiveRegistry& prims = PrimitiveRegistry::builtin());
bool eval_bool(const Expr& e, const PrimitiveRegistry& prims = PrimitiveRegistry::builtin());

/// Evaluates when `e` is closed and evaluation succeeds.
std::optional<Value> try_eval(const Expr& e,
                              const PrimitiveRegistry& prims = PrimitiveRegistry::builtin());

Expr substitute(const Expr& e, const Bindings& bindings);
void collect_free_variables(const Expr& e, std::set<Variable>& out);
void collect_literals(const Expr& e, std::set<Value>& out);
void collect_primitives(const Expr& e, std::set<std::string>& out);
bool is_closed(const Expr& e);
bool same(const Expr& a, const Expr& b);

/// Replaces closed subexpressions that evaluate successfully by literals.
Expr fold_constants(const Expr& e);

/// Surface syntax; `var_name` may rename variables (canonical printing).
void print_expr(std::string& out, const Expr& e,
                const std::function<std::string(const Variable&)>& var_name = {});
std::string to_string(const Expr& e);

}  // namespace gcwn
