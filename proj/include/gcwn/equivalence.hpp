#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gcwn/semantics.hpp"

namespace gcwn {

/// Sorted set of location pairs.
using LocRelation = std::vector<LocPair>;

LocRelation make_relation(std::vector<LocPair> pairs);
LocRelation inverse(const LocRelation& e);
std::string to_string(const LocRelation& e);

enum class Verdict { Related, NotRelated, Inconclusive };
std::string_view to_string(Verdict v);

struct StatePair {
  std::size_t left = 0;
  std::size_t right = 0;
  friend auto operator<=>(const StatePair&, const StatePair&) = default;
};

/// Why a pair of states is outside the greatest fixpoint. A challenge made
/// by the right-hand state is recorded with `swapped` set; `responses` then
/// still lists (left, right) pairs.
struct Refutation {
  enum class Kind { Barb, Step };

  StatePair pair;
  std::size_t rank = 0;
  bool swapped = false;
  Kind kind = Kind::Step;
  Channel barb;             // Barb: shown by the challenger, never reached by the responder
  Label label;              // Step: challenger's move
  std::size_t target = 0;   // Step: challenger's target state
  std::vector<StatePair> responses;  // every admissible answer; each refuted at a lower rank
};

struct PlayStep {
  bool swapped = false;
  std::string move;         // "tau", a label or "barb c"
  std::size_t target = 0;
  std::optional<StatePair> answer;  // principal answer, absent when none exists
};

struct BisimResult {
  bool barbed = false;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
  LocRelation relation;                // weak bisimulation only
  StateSpace left;
  StateSpace right;
  std::vector<StatePair> witness;      // Related: the greatest fixpoint
  std::vector<Refutation> certificate; // NotRelated: refutations reachable from the initial pair
  std::vector<PlayStep> play;          // NotRelated: one losing line for the responder
  std::size_t iterations = 0;
};

struct BisimOptions {
  Bounds bounds;
  /// Extra Open-mode payloads on top of the literals of both networks.
  std::vector<Value> universe;
};

BisimResult weak_barbed_bisim(const Network& m, const Network& n, const Environment& env,
                              const BisimOptions& opts = {});

/// Throws DomainError when E is not contained in |M| x |N|.
BisimResult weak_bisim(const Network& m, const LocRelation& e, const Network& n,
                       const Environment& env, const BisimOptions& opts = {});

/// Independent re-checks on the explored spaces.
bool verify_witness(const BisimResult& r, std::string* why = nullptr);
bool verify_certificate(const BisimResult& r, std::string* why = nullptr);

/// Stable structured text of a verdict with its witness or certificate.
std::string serialize(const BisimResult& r);

struct SearchResult {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<LocRelation> relation;
  std::vector<LocPair> mandatory;
  std::size_t candidates_tried = 0;
};

/// Smallest relation E for which weak_bisim answers Related. Throws
/// CapExceeded when |M|·|N| exceeds `cap`.
SearchResult search_E(const Network& m, const Network& n, const Environment& env,
                      const BisimOptions& opts = {}, std::size_t cap = 16);

/// For all observers a (first components of C or D) and (b,b') in E:
/// (a,b) in C iff (a,b') in D.
bool adapted(const std::vector<LocPair>& c, const std::vector<LocPair>& d, const LocRelation& e);

/// D = {(a,b') | (a,b) in C, (b,b') in E}.
std::vector<LocPair> derive_links(const std::vector<LocPair>& c, const LocRelation& e);

struct Extension {
  Network left;
  LocRelation relation;
  Network right;
};

/// (O ⊕_C M, Id_|O| ∪ E, O ⊕_D N); throws NotAdapted.
Extension parallel_extend(const Network& o, const std::vector<LocPair>& c, const Network& m,
                          const LocRelation& e, const Network& n, const Environment& env,
                          const std::optional<std::vector<LocPair>>& d = std::nullopt);

/// A network with one hole: the hole location of `surround` is replaced by
/// the plugged network, its links going to every plugged location.
struct Context {
  Network surround;
  Location hole;
  std::vector<Channel> restrictions;
};

Context bare_hole(const Location& hole = Location("_"));
Network context_apply(const Context& cx, const Network& n, const Environment& env);

struct HarmonyReport {
  bool pass = true;
  bool truncated = false;
  std::size_t states_checked = 0;
  struct Discrepancy {
    std::string state;
    std::vector<std::string> only_reductions;
    std::vector<std::string> only_transitions;
  };
  std::vector<Discrepancy> discrepancies;
};

HarmonyReport harmony_check(const Network& m, const Environment& env, const Bounds& bounds = {},
                            const ReductionOptions& mutation = {});

std::string to_string(const HarmonyReport& r);

struct ProbeTrial {
  std::string observer;
  std::vector<LocPair> left_links;
  std::vector<LocPair> right_links;
  std::vector<Channel> restrictions;
  Verdict barbed = Verdict::Inconclusive;
  Verdict extension = Verdict::Inconclusive;
};

struct ProbeReport {
  Verdict precondition = Verdict::Inconclusive;
  std::vector<ProbeTrial> trials;
  std::size_t failures = 0;
  std::size_t inconclusive = 0;
};

/// Samples adapted observer contexts and checks that the two composites are
/// barbed bisimilar and that the parallel extension stays a bisimulation.
ProbeReport soundness_probe(const Network& m, const LocRelation& e, const Network& n,
                            const Environment& env, std::size_t trials, std::uint64_t seed,
                            const BisimOptions& opts = {});

std::string to_string(const ProbeReport& r);

}  // namespace gcwn
