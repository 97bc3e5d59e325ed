#include "gcwn/value.hpp"

#include <algorithm>

#include "gcwn/error.hpp"

namespace gcwn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OverlappingLocations: return "OverlappingLocations";
    case ErrorCode::EdgeOutOfRange: return "EdgeOutOfRange";
    case ErrorCode::LocationNotPresent: return "LocationNotPresent";
    case ErrorCode::OpenExpression: return "OpenExpression";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::UnknownPrimitive: return "UnknownPrimitive";
    case ErrorCode::UnknownConstant: return "UnknownConstant";
    case ErrorCode::UnguardedRecursion: return "UnguardedRecursion";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NotAdapted: return "NotAdapted";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownNetwork: return "UnknownNetwork";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Value Value::integer(std::int64_t v) {
  Value r;
  r.kind_ = Kind::Int;
  r.scalar_ = v;
  return r;
}

Value Value::boolean(bool v) {
  Value r;
  r.kind_ = Kind::Bool;
  r.scalar_ = v ? 1 : 0;
  return r;
}

Value Value::atom(std::string name) {
  Value r;
  r.kind_ = Kind::Atom;
  r.name_ = std::move(name);
  return r;
}

Value Value::tuple(std::vector<Value> items) {
  Value r;
  r.kind_ = Kind::Tuple;
  r.items_ = std::make_shared<const std::vector<Value>>(std::move(items));
  return r;
}

Value Value::list(std::vector<Value> items) {
  Value r;
  r.kind_ = Kind::List;
  r.items_ = std::make_shared<const std::vector<Value>>(std::move(items));
  return r;
}

Value Value::term(std::string constructor, std::vector<Value> args) {
  Value r;
  r.kind_ = Kind::Term;
  r.name_ = std::move(constructor);
  r.items_ = std::make_shared<const std::vector<Value>>(std::move(args));
  return r;
}

std::string_view kind_name(Value::Kind kind) {
  switch (kind) {
    case Value::Kind::Int: return "int";
    case Value::Kind::Bool: return "bool";
    case Value::Kind::Atom: return "atom";
    case Value::Kind::Tuple: return "tuple";
    case Value::Kind::List: return "list";
    case Value::Kind::Term: return "term";
  }
  return "?";
}

namespace {

[[noreturn]] void kind_mismatch(const Value& v, std::string_view wanted) {
  throw EvalError(ErrorCode::TypeError, "expected " + std::string(wanted) + ", got " +
                                            to_string(v));
}

}  // namespace

std::int64_t Value::as_int() const {
  if (kind_ != Kind::Int) kind_mismatch(*this, "int");
  return scalar_;
}

bool Value::as_bool() const {
  if (kind_ != Kind::Bool) kind_mismatch(*this, "bool");
  return scalar_ != 0;
}

const std::string& Value::name() const {
  if (kind_ != Kind::Atom && kind_ != Kind::Term) kind_mismatch(*this, "atom or term");
  return name_;
}

std::span<const Value> Value::items() const {
  if (!items_) kind_mismatch(*this, "tuple, list or term");
  return {items_->data(), items_->size()};
}

int compare(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return a.kind_ < b.kind_ ? -1 : 1;
  switch (a.kind_) {
    case Value::Kind::Int:
    case Value::Kind::Bool:
      return a.scalar_ < b.scalar_ ? -1 : (a.scalar_ > b.scalar_ ? 1 : 0);
    case Value::Kind::Atom:
      return a.name_.compare(b.name_) < 0 ? -1 : (a.name_ == b.name_ ? 0 : 1);
    case Value::Kind::Term:
      if (a.name_ != b.name_) return a.name_ < b.name_ ? -1 : 1;
      [[fallthrough]];
    case Value::Kind::Tuple:
    case Value::Kind::List: {
      if (a.items_ == b.items_) return 0;
      const auto& xs = *a.items_;
      const auto& ys = *b.items_;
      const std::size_t n = std::min(xs.size(), ys.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (int c = compare(xs[i], ys[i]); c != 0) return c;
      }
      return xs.size() < ys.size() ? -1 : (xs.size() > ys.size() ? 1 : 0);
    }
  }
  return 0;
}

namespace {

void append_items(std::string& out, std::span<const Value> items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += to_string(items[i]);
  }
}

}  // namespace

std::string to_string(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int: return std::to_string(v.as_int());
    case Value::Kind::Bool: return v.as_bool() ? "true" : "false";
    case Value::Kind::Atom: return "'" + v.name();
    case Value::Kind::Tuple: {
      std::string out = "(";
      append_items(out, v.items());
      if (v.items().size() == 1) out += ",";
      return out + ")";
    }
    case Value::Kind::List: {
      std::string out = "[";
      append_items(out, v.items());
      return out + "]";
    }
    case Value::Kind::Term: {
      std::string out = v.name() + "(";
      append_items(out, v.items());
      return out + ")";
    }
  }
  return "?";
}

}  // namespace gcwn
