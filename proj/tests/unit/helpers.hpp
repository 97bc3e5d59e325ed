#pragma once

#include <string>

#include "gcwn/frontend.hpp"

namespace gcwn::unit {

inline Network net(const SourceModel& m, const std::string& name) {
  const Network* n = m.find_network(name);
  if (!n) throw Error(ErrorCode::UnknownNetwork, name);
  return *n;
}

inline SourceModel case_study(const std::string& name) {
  return load(std::string(GCWN_CASE_DIR) + "/" + name + ".gcwn");
}

inline Location L(const std::string& name) { return Location(name); }
inline Channel C(const std::string& name) { return Channel(name); }

}  // namespace gcwn::unit
