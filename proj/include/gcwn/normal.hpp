#pragma once

#include <set>
#include <string>
#include <vector>

#include "gcwn/model.hpp"

namespace gcwn {

/// One guarded summand of a normal form. The continuation is kept as a
/// process (constants below a prefix stay folded); closed subexpressions of
/// it are evaluated and closed conditionals resolved.
struct Branch {
  bool output = false;
  Channel channel;
  Value payload;    // output
  Variable binder;  // input
  Process continuation;
};

/// Sorted, duplicate-preserving summands; empty means 0.
using NormalProcess = std::vector<Branch>;

NormalProcess normalize_process(const Process& p, const Environment& env);

/// Rebuilds a sum of prefixes from a normal form.
Process to_process(const NormalProcess& np);

struct NormalNetwork {
  /// Same topology and restrictions; each node holds its normal form.
  Network network;
  /// Normal forms in location order.
  std::vector<NormalProcess> nodes;
  /// Canonical print of the node processes: restricted channels as #k by
  /// first occurrence, binders as $n, unused restrictions dropped.
  std::string key;

  std::size_t index_of(const Location& p) const;
};

NormalNetwork normalize_network(const Network& m, const Environment& env);

/// Same topology and identical canonical key.
bool congruent(const NormalNetwork& m, const NormalNetwork& n);
bool congruent(const Network& m, const Network& n, const Environment& env);

std::set<Channel> barbs(const NormalNetwork& m);
std::set<Channel> barbs(const Network& m, const Environment& env);

/// Canonical print of a process in isolation (binders as $n).
std::string canonical_print(const Process& p, const Environment& env);

}  // namespace gcwn
