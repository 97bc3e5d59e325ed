#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcwn/model.hpp"

namespace gcwn {

struct NetworkDecl {
  std::string name;
  Network network;  // flattened
};

struct SourceModel {
  std::vector<Definition> definitions;  // declaration order
  std::vector<NetworkDecl> networks;    // declaration order
  std::optional<std::vector<Value>> universe;
  std::vector<std::string> imports;

  Environment environment() const;
  const Network* find_network(std::string_view name) const;
  /// Declared universe, or the literals occurring in the file.
  std::vector<Value> payloads() const;
};

struct SourcePosition {
  std::size_t line = 1;
  std::size_t column = 1;
};

class ParseError : public Error {
 public:
  ParseError(SourcePosition pos, std::string detail, std::vector<std::string> expected,
             ErrorCode code = ErrorCode::SyntaxError);

  const SourcePosition& position() const noexcept { return pos_; }
  const std::string& detail() const noexcept { return detail_; }
  /// Tokens that would have been accepted, sorted.
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  SourcePosition pos_;
  std::string detail_;
  std::vector<std::string> expected_;
};

/// Throws ParseError; composition failures carry the code of the engine
/// error at the position of the offending operator.
SourceModel parse(std::string_view text);
SourceModel load(const std::string& path);

std::string print(const SourceModel& m);
std::string print_network(const std::string& name, const Network& n);

/// Same definitions, networks, universe and imports, up to term identity.
bool same(const SourceModel& a, const SourceModel& b);

/// Diagnostics of every network and definition plus unknown imports.
std::vector<Diagnostic> validate(const SourceModel& m);

}  // namespace gcwn
