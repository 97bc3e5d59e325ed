#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gcwn/error.hpp"
#include "gcwn/expr.hpp"

namespace gcwn {

/// Node identifier. Purely numeric names order numerically and come first.
struct Location {
  std::string name;

  Location() = default;
  explicit Location(std::string n) : name(std::move(n)) {}
  explicit Location(std::int64_t n) : name(std::to_string(n)) {}

  friend std::strong_ordering operator<=>(const Location& a, const Location& b);
  friend bool operator==(const Location& a, const Location& b) = default;
};

struct Channel {
  std::string name;

  Channel() = default;
  explicit Channel(std::string n) : name(std::move(n)) {}

  friend auto operator<=>(const Channel& a, const Channel& b) = default;
};

using LocPair = std::pair<Location, Location>;

/// Undirected graph; edges are stored once as (smaller, larger).
struct Topology {
  std::vector<Location> locations;  // sorted, unique
  std::vector<LocPair> edges;       // sorted, unique, first < second

  /// Sorts and deduplicates; self-loops and dangling edges are kept so that
  /// `validate` can report them.
  static Topology make(std::vector<Location> locations, std::vector<LocPair> edges);

  bool contains(const Location& p) const;
  bool adjacent(const Location& p, const Location& q) const;
  std::vector<Location> neighbours(const Location& p) const;

  friend bool operator==(const Topology& a, const Topology& b) = default;
};

LocPair edge(Location a, Location b);

Topology topology_compose(const Topology& g, const Topology& h, const std::vector<LocPair>& d);
Topology topology_substitute(const Topology& g, const Topology& h, const Location& p);

// ---------------------------------------------------------------------------
// Processes

struct ProcNode;
using Process = std::shared_ptr<const ProcNode>;
using ChannelMap = std::vector<std::pair<Channel, Channel>>;  // sorted by first

struct ProcNode {
  enum class Kind { Nil, Input, Output, Sum, If, Call };

  Kind kind = Kind::Nil;
  Channel channel;                // Input / Output
  Variable binder;                // Input
  Expr expr;                      // Output payload / If condition
  std::vector<Process> children;  // continuation; Sum and If operands
  std::string constant;           // Call
  std::vector<Expr> args;         // Call
  ChannelMap relabel;             // Call: channel renaming applied to the body
};

namespace proc {
Process nil();
Process input(Channel c, Variable x, Process cont);
Process output(Channel c, Expr payload, Process cont);
Process sum(Process lhs, Process rhs);
Process sum(const std::vector<Process>& branches);
Process ite(Expr condition, Process then_branch, Process else_branch);
Process call(std::string constant, std::vector<Expr> args, ChannelMap relabel = {});
}  // namespace proc

struct Definition {
  std::string name;
  std::vector<Variable> params;
  Process body;
};

/// Definitions by name, with the set of channels each constant may use
/// (including those of the constants it calls).
class Environment {
 public:
  Environment() = default;
  explicit Environment(std::vector<Definition> defs);

  void add(Definition def);
  const Definition* find(const std::string& name) const;
  const std::map<std::string, Definition>& definitions() const { return defs_; }

  /// Channels occurring in the unfolding of `name`; empty if unknown.
  const std::set<Channel>& channels_of(const std::string& name) const;

  const PrimitiveRegistry& primitives() const { return *prims_; }
  void set_primitives(const PrimitiveRegistry* prims) { prims_ = prims; }

 private:
  void recompute();

  std::map<std::string, Definition> defs_;
  std::map<std::string, std::set<Channel>> channels_;
  const PrimitiveRegistry* prims_ = &PrimitiveRegistry::builtin();
};

/// Capture-avoiding substitution of values for free data variables.
Process substitute(const Process& p, const Bindings& bindings);

/// Renames channels; calls accumulate the renaming applied to their body.
Process rename_channels(const Process& p, const std::map<Channel, Channel>& rho,
                        const Environment& env);

/// Channels the process may use, looking through constant definitions.
void collect_channels(const Process& p, const Environment& env, std::set<Channel>& out);
void collect_free_variables(const Process& p, std::set<Variable>& out);
void collect_literals(const Process& p, std::set<Value>& out);

bool same(const Process& a, const Process& b);

const Channel& apply_relabel(const ChannelMap& m, const Channel& c);

/// Surface syntax, preserving the term structure exactly.
void print_process(std::string& out, const Process& p);
std::string to_string(const Process& p);

/// The body of `A(args)` with arguments bound and the call's channel
/// renaming applied. Throws UnknownConstant / ArityError / eval errors.
Process unfold_call(const ProcNode& call, const Environment& env);

// ---------------------------------------------------------------------------
// Networks

/// Flattened form G<Phi>\I.
struct Network {
  Topology topology;
  std::map<Location, Process> assignment;
  std::vector<Channel> restricted;

  bool is_restricted(const Channel& c) const;
  const Process& at(const Location& p) const;
};

Network make_network(Topology topology, std::map<Location, Process> assignment,
                     std::vector<Channel> restricted = {});

/// G ⊕_D H on networks; clashing restricted channels are renamed first.
Network network_compose(const Network& m, const Network& n, const std::vector<LocPair>& d,
                        const Environment& env);

/// M | N: every location of M linked to every location of N.
Network network_link_all(const Network& m, const Network& n, const Environment& env);

Network network_update(const Network& m, const std::map<Location, Process>& updates);

/// M\c for each channel given (already restricted channels are ignored).
Network network_restrict(const Network& m, const std::vector<Channel>& channels);

/// Renames restricted channels of `m` that occur in `avoid`.
Network freshen_restricted(const Network& m, const std::set<Channel>& avoid,
                           const Environment& env);

void collect_channels(const Network& m, const Environment& env, std::set<Channel>& out);
void collect_literals(const Network& m, std::set<Value>& out);

std::vector<LocPair> full_links(const Network& m, const Network& n);
std::vector<LocPair> identity_relation(const Network& m);

// ---------------------------------------------------------------------------
// Validation

enum class DiagnosticKind {
  SelfLoop,
  EdgeOutOfRange,
  PartialAssignment,
  DuplicateRestriction,
  OpenVariable,
  ArityMismatch,
  UnknownConstant,
  UnknownPrimitive,
  UnguardedRecursion,
};

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  std::string message;
};

/// Checks the network and every definition reachable from it.
std::vector<Diagnostic> validate(const Network& m, const Environment& env);
/// Checks every definition of the environment.
std::vector<Diagnostic> validate_definitions(const Environment& env);

}  // namespace gcwn
