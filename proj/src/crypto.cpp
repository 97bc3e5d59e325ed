#include <optional>

#include "gcwn/error.hpp"
#include "gcwn/expr.hpp"

namespace gcwn {

namespace {

bool is_term(const Value& v, std::string_view ctor, std::size_t arity) {
  return v.is(Value::Kind::Term) && v.name() == ctor && v.items().size() == arity;
}

Value cert_for(const Value& ip) {
  return Value::term("cert", {ip, Value::term("pub", {ip}), Value::atom("t"), Value::atom("e")});
}

Value sign(Value payload, const Value& signer) {
  return Value::term("sign", {std::move(payload), Value::term("priv", {signer})});
}

// The signed part and certificate list of a message, looking through the
// (message, ip) pairing used on the reply channel.
struct Message {
  Value payload;
  std::vector<Value> certs;
};

std::optional<Message> split(const Value& v) {
  if (!v.is(Value::Kind::Tuple) || v.items().size() != 2) return std::nullopt;
  const Value& second = v.items()[1];
  if (second.is(Value::Kind::List)) {
    auto certs = second.items();
    return Message{v.items()[0], {certs.begin(), certs.end()}};
  }
  return split(v.items()[0]);
}

Message require(const Value& v, std::string_view fn) {
  auto m = split(v);
  if (!m || m->certs.empty()) {
    throw EvalError(ErrorCode::MalformedMessage, std::string(fn) + ": " + to_string(v));
  }
  for (const auto& c : m->certs) {
    if (!is_term(c, "cert", 4)) {
      throw EvalError(ErrorCode::MalformedMessage,
                      std::string(fn) + ": bad certificate " + to_string(c));
    }
  }
  return *m;
}

// Agent whose public key a well-formed certificate carries.
std::optional<Value> certified_agent(const Value& cert) {
  if (!is_term(cert, "cert", 4)) return std::nullopt;
  const Value& key = cert.items()[1];
  if (!is_term(key, "pub", 1) || !(key.items()[0] == cert.items()[0])) return std::nullopt;
  return key.items()[0];
}

bool verifies(const Value& msg, std::string_view kind) {
  auto m = split(msg);
  if (!m || m->certs.empty()) return false;
  Value body = m->payload;
  for (auto it = m->certs.rbegin(); it != m->certs.rend(); ++it) {
    auto agent = certified_agent(*it);
    if (!agent || !is_term(body, "sign", 2)) return false;
    const Value& key = body.items()[1];
    if (!is_term(key, "priv", 1) || !(key.items()[0] == *agent)) return false;
    body = body.items()[0];
  }
  return body.is(Value::Kind::Tuple) && !body.items().empty() &&
         body.items()[0] == Value::atom(std::string(kind));
}

Value verdict(bool ok) { return Value::atom(ok ? "ok" : "fail"); }

// Payload as signed by the originator: one intermediate layer is removed if
// the message already went through a forwarder.
Value original_layer(const Message& m, std::string_view fn) {
  if (m.certs.size() == 1) return m.payload;
  if (m.certs.size() == 2 && is_term(m.payload, "sign", 2)) return m.payload.items()[0];
  throw EvalError(ErrorCode::MalformedMessage,
                  std::string(fn) + ": unexpected signature nesting of depth " +
                      std::to_string(m.certs.size()));
}

Value forward(const Value& msg, const Value& ip, std::string_view fn) {
  Message m = require(msg, fn);
  Value orig = original_layer(m, fn);
  if (!is_term(orig, "sign", 2)) {
    throw EvalError(ErrorCode::MalformedMessage, std::string(fn) + ": unsigned payload");
  }
  return Value::tuple({sign(orig, ip), Value::list({m.certs.front(), cert_for(ip)})});
}

}  // namespace

void register_crypto_primitives(PrimitiveRegistry& reg) {
  reg.add({"sign", 2, [](std::span<const Value> a) { return Value::term("sign", {a[0], a[1]}); }});
  reg.add({"cert", 4, [](std::span<const Value> a) {
             return Value::term("cert", {a[0], a[1], a[2], a[3]});
           }});
  for (const char* ctor : {"priv", "pub", "nonce"}) {
    reg.add({ctor, 1, [name = std::string(ctor)](std::span<const Value> a) {
               return Value::term(name, {a[0]});
             }});
  }
  reg.add({"check1", 1, [](std::span<const Value> a) { return verdict(verifies(a[0], "RDP")); }});
  reg.add({"check2", 1, [](std::span<const Value> a) { return verdict(verifies(a[0], "REP")); }});
  reg.add({"getIP", 1, [](std::span<const Value> a) {
             Message m = require(a[0], "getIP");
             return m.certs.back().items()[0];
           }});
  reg.add({"NewMsg1", 2,
           [](std::span<const Value> a) { return forward(a[0], a[1], "NewMsg1"); }});
  reg.add({"NewMsg2", 2,
           [](std::span<const Value> a) { return forward(a[0], a[1], "NewMsg2"); }});
  reg.add({"NewMsg3", 2, [](std::span<const Value> a) {
             Message m = require(a[0], "NewMsg3");
             Value orig = original_layer(m, "NewMsg3");
             if (!is_term(orig, "sign", 2) || !orig.items()[0].is(Value::Kind::Tuple) ||
                 orig.items()[0].items().size() != 3) {
               throw EvalError(ErrorCode::MalformedMessage, "NewMsg3: " + to_string(a[0]));
             }
             const Value& source = m.certs.front().items()[0];
             const Value& nonce = orig.items()[0].items()[2];
             Value rep = Value::tuple({Value::atom("REP"), source, nonce});
             return Value::tuple({sign(rep, a[1]), Value::list({cert_for(a[1])})});
           }});
}

}  // namespace gcwn
