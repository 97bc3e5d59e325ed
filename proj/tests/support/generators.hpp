#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcwn/equivalence.hpp"

namespace gcwn::testing {

/// SplitMix64; identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  std::size_t below(std::size_t n) { return n ? static_cast<std::size_t>(next() % n) : 0; }
  bool chance(std::size_t num, std::size_t den) { return below(den) < num; }

 private:
  std::uint64_t state_;
};

struct GenParams {
  std::size_t max_nodes = 4;
  std::size_t channels = 3;     // a, b, c, ...
  std::size_t max_depth = 6;    // prefix depth of node processes
  std::size_t definitions = 2;  // upper bound on recursive constants
  std::string location_prefix;  // empty: numeric locations 1..n
  bool restrictions = true;
};

struct Generated {
  std::vector<Definition> definitions;
  Environment env;
  Network network;
};

Generated random_network(Rng& rng, const GenParams& params = {});

/// A random process over the given channels; `defs` lists callable
/// constants with their arities.
Process random_process(Rng& rng, const std::vector<std::string>& channels,
                       const std::vector<std::pair<std::string, std::size_t>>& defs,
                       std::size_t depth);

/// Applies a few congruence-preserving rewrites: sum commutation and
/// association, +0, if-true wrappers, call unfolding, renaming and
/// reordering of restricted channels, unused restrictions.
Network congruent_variant(const Network& m, const Environment& env, Rng& rng,
                          std::size_t rewrites = 3);

/// Same network with location names mapped by `rename`.
Network relocate(const Network& m, const std::map<Location, Location>& rename);

struct RelatedPair {
  std::string family;
  std::vector<Definition> definitions;
  Environment env;
  Network left;
  LocRelation relation;
  Network right;
};

/// Pairs that are weakly bisimilar for `relation` by construction.
RelatedPair random_related_pair(Rng& rng);

/// k-node cyclic implementation of a k-step specification.
RelatedPair split_ring(std::size_t k, const std::vector<std::int64_t>& values);

}  // namespace gcwn::testing
