#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gcwn {

/// Transmissible data. Values never contain channels or variables.
///
/// `Term` covers uninterpreted constructor applications, which is how the
/// symbolic cryptography (signatures, certificates, keys, nonces) is modelled.
class Value {
 public:
  enum class Kind : std::uint8_t { Int, Bool, Atom, Tuple, List, Term };

  /// Int 0.
  Value() = default;

  static Value integer(std::int64_t v);
  static Value boolean(bool v);
  static Value atom(std::string name);
  static Value tuple(std::vector<Value> items);
  static Value list(std::vector<Value> items);
  static Value term(std::string constructor, std::vector<Value> args);

  Kind kind() const noexcept { return kind_; }
  bool is(Kind k) const noexcept { return kind_ == k; }

  // Accessors throw TypeError on a kind mismatch.
  std::int64_t as_int() const;
  bool as_bool() const;
  /// Atom name or Term constructor name.
  const std::string& name() const;
  /// Tuple/List elements or Term arguments.
  std::span<const Value> items() const;

  friend int compare(const Value& a, const Value& b);
  friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
  friend bool operator<(const Value& a, const Value& b) { return compare(a, b) < 0; }

 private:
  Kind kind_ = Kind::Int;
  std::int64_t scalar_ = 0;
  std::string name_;
  std::shared_ptr<const std::vector<Value>> items_;
};

std::string_view kind_name(Value::Kind kind);

/// Canonical text form; reparses (as an expression) to the same value.
std::string to_string(const Value& v);

}  // namespace gcwn
