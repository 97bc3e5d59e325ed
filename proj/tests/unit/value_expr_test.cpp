#include <gtest/gtest.h>

#include <limits>

#include "gcwn/error.hpp"
#include "gcwn/expr.hpp"

using namespace gcwn;

namespace {

Value V(std::int64_t n) { return Value::integer(n); }

ErrorCode code_of(const Expr& e) {
  try {
    eval(e);
  } catch (const EvalError& err) {
    return err.code();
  }
  ADD_FAILURE() << "evaluation succeeded: " << to_string(e);
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Value, OrderIsByKindThenContent) {
  EXPECT_LT(V(1), V(2));
  EXPECT_EQ(Value::tuple({V(1), Value::atom("a")}), Value::tuple({V(1), Value::atom("a")}));
  EXPECT_NE(Value::tuple({V(1)}), Value::list({V(1)}));
  EXPECT_LT(Value::list({V(1)}), Value::list({V(1), V(0)}));
  EXPECT_EQ(Value().as_int(), 0);
}

TEST(Value, AccessorsCheckTheKind) {
  EXPECT_THROW(Value::atom("a").as_int(), Error);
  EXPECT_THROW(V(0).as_bool(), Error);
  EXPECT_EQ(Value::term("pub", {V(1)}).name(), "pub");
  EXPECT_EQ(Value::term("pub", {V(1)}).items().size(), 1u);
}

TEST(Value, Printing) {
  EXPECT_EQ(to_string(V(-3)), "-3");
  EXPECT_EQ(to_string(Value::atom("ok")), "'ok");
  EXPECT_EQ(to_string(Value::list({})), "[]");
  EXPECT_EQ(to_string(Value::list({V(1), V(2)})), "[1, 2]");
  EXPECT_EQ(to_string(Value::term("priv", {V(4)})), "priv(4)");
}

TEST(Expr, Arithmetic) {
  using namespace expr;
  EXPECT_EQ(eval(binary(Op::Add, integer(2), binary(Op::Mul, integer(3), integer(4)))), V(14));
  EXPECT_EQ(eval(binary(Op::Sub, integer(2), integer(5))), V(-3));
  EXPECT_TRUE(eval_bool(binary(Op::Le, integer(2), integer(2))));
  EXPECT_FALSE(eval_bool(binary(Op::Lt, integer(2), integer(2))));
  EXPECT_TRUE(eval_bool(binary(Op::Ne, atom("a"), atom("b"))));
  EXPECT_TRUE(eval_bool(binary(Op::Or, boolean(false), unary(Op::Not, boolean(false)))));
}

TEST(Expr, Errors) {
  using namespace expr;
  const auto big = integer(std::numeric_limits<std::int64_t>::max());
  EXPECT_EQ(code_of(binary(Op::Add, big, integer(1))), ErrorCode::Overflow);
  EXPECT_EQ(code_of(binary(Op::Add, integer(1), boolean(true))), ErrorCode::TypeError);
  EXPECT_EQ(code_of(var("x")), ErrorCode::OpenExpression);
  EXPECT_EQ(code_of(prim("nosuch", {})), ErrorCode::UnknownPrimitive);
  EXPECT_EQ(code_of(prim("fst", {integer(1), integer(2)})), ErrorCode::ArityError);
  EXPECT_THROW(eval_bool(integer(1)), EvalError);
}

TEST(Expr, PairAndListPrimitives) {
  using namespace expr;
  const auto pair = tuple({integer(1), atom("b")});
  EXPECT_EQ(eval(prim("fst", {pair})), V(1));
  EXPECT_EQ(eval(prim("snd", {pair})), Value::atom("b"));
  const auto xs = list({integer(7), integer(8)});
  EXPECT_EQ(eval(prim("head", {xs})), V(7));
  EXPECT_EQ(eval(prim("tail", {xs})), Value::list({V(8)}));
  EXPECT_EQ(eval(prim("append", {xs, integer(9)})), Value::list({V(7), V(8), V(9)}));
  EXPECT_EQ(eval(prim("null", {list({})})), Value::boolean(true));
  EXPECT_THROW(eval(prim("head", {list({})})), EvalError);
}

TEST(Expr, SubstitutionAndFolding) {
  using namespace expr;
  const auto e = binary(Op::Add, var("x"), binary(Op::Mul, integer(2), integer(3)));
  EXPECT_FALSE(is_closed(e));
  EXPECT_EQ(eval(substitute(e, {{"x", V(1)}})), V(7));
  EXPECT_EQ(to_string(fold_constants(e)), "x + 6");
  EXPECT_FALSE(try_eval(e).has_value());
  std::set<Variable> free;
  collect_free_variables(e, free);
  EXPECT_EQ(free, std::set<Variable>{"x"});
}

TEST(Crypto, RouteRequestChecks) {
  using namespace expr;
  const auto ip = integer(1);
  const auto payload = tuple({atom("RDP"), integer(4), prim("nonce", {ip})});
  const auto cert = prim("cert", {ip, prim("pub", {ip}), atom("t"), atom("e")});
  const auto msg = tuple({prim("sign", {payload, prim("priv", {ip})}), list({cert})});
  EXPECT_EQ(eval(prim("check1", {msg})), Value::atom("ok"));
  EXPECT_EQ(eval(prim("getIP", {msg})), V(1));

  const auto forged = tuple({prim("sign", {payload, prim("priv", {integer(5)})}), list({cert})});
  EXPECT_NE(eval(prim("check1", {forged})), Value::atom("ok"));
  EXPECT_NE(eval(prim("check2", {msg})), Value::atom("ok"));

  // A relay adds its own signature and certificate.
  const auto relayed = eval(prim("NewMsg1", {msg, integer(3)}));
  EXPECT_EQ(eval(prim("check1", {lit(relayed)})), Value::atom("ok"));
  EXPECT_EQ(eval(prim("getIP", {lit(relayed)})), V(3));
}
