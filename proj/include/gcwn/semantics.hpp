#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gcwn/normal.hpp"

namespace gcwn {

struct Action {
  bool output = false;
  Channel channel;
  Value payload;
};

struct Label {
  enum class Kind : std::uint8_t { Tau, Output, Input };

  Kind kind = Kind::Tau;
  Location location;
  Channel channel;
  Value payload;

  static Label tau() { return {}; }
  static Label output(Location p, Channel c, Value v) {
    return {Kind::Output, std::move(p), std::move(c), std::move(v)};
  }
  static Label input(Location p, Channel c, Value v) {
    return {Kind::Input, std::move(p), std::move(c), std::move(v)};
  }

  bool is_tau() const { return kind == Kind::Tau; }

  friend int compare(const Label& a, const Label& b);
  friend bool operator==(const Label& a, const Label& b) { return compare(a, b) == 0; }
  friend bool operator<(const Label& a, const Label& b) { return compare(a, b) < 0; }
};

/// `p:c!v`, `p:c?v` or `tau`.
std::string to_string(const Label& l);

// ---------------------------------------------------------------------------
// Processes

struct InputSchema {
  Channel channel;
  Variable binder;
  Process continuation;
};

struct ProcessTransitions {
  std::vector<std::pair<Action, Process>> outputs;
  /// Inputs are instantiated by the receiving context.
  std::vector<InputSchema> inputs;
};

ProcessTransitions process_transitions(const Process& p, const Environment& env);
Process instantiate(const InputSchema& in, const Value& v);

// ---------------------------------------------------------------------------
// Networks

enum class Mode { Closed, Open };

struct Transition {
  Label label;
  Network target;
};

struct TransitionOptions {
  Mode mode = Mode::Closed;
  /// Payloads offered to free inputs in Open mode.
  std::vector<Value> universe;
};

/// Labelled transitions, every connected ready receiver being updated. In
/// Open mode inputs whose instantiation cannot be normalized are skipped and
/// counted in `skipped`.
std::vector<Transition> network_transitions(const NormalNetwork& m, const Environment& env,
                                            const TransitionOptions& opts = {},
                                            std::size_t* skipped = nullptr);
std::vector<Transition> network_transitions(const Network& m, const Environment& env,
                                            const TransitionOptions& opts = {},
                                            std::size_t* skipped = nullptr);

struct ReductionOptions {
  /// Test hook: leave the last receiver of every broadcast untouched.
  bool drop_last_receiver = false;
};

/// Broadcast reductions computed directly on the written processes,
/// independently of the normal-form machinery.
std::vector<Network> reductions(const Network& m, const Environment& env,
                                const ReductionOptions& opts = {});

// ---------------------------------------------------------------------------
// State spaces

struct Bounds {
  std::size_t max_states = 50000;
  std::size_t max_depth = 200;
  /// Throw BudgetExceeded instead of truncating.
  bool strict = false;
};

struct StateSpace {
  struct Edge {
    std::size_t from;
    Label label;
    std::size_t to;
  };

  Mode mode = Mode::Closed;
  std::vector<Value> universe;
  std::vector<NormalNetwork> states;  // breadth-first order, 0 is initial
  std::vector<std::size_t> depth;
  std::vector<Edge> edges;            // grouped by source, sorted by label then target
  std::vector<std::vector<std::size_t>> out;  // edge indices per state
  bool truncated = false;
  std::vector<std::size_t> frontier;  // states not fully expanded
  std::size_t skipped_inputs = 0;

  std::optional<std::size_t> find(const std::string& key) const;
  bool terminal(std::size_t s) const { return out[s].empty(); }
};

StateSpace explore(const Network& m, const Environment& env, const Bounds& bounds = {},
                   const TransitionOptions& opts = {});

/// Values occurring syntactically in the networks plus the given extras.
std::vector<Value> payload_universe(const std::vector<const Network*>& nets,
                                    const Environment& env,
                                    const std::vector<Value>& extra = {});

struct WeakRelations {
  /// Sorted tau-star reachable sets (reflexive).
  std::vector<std::vector<std::size_t>> tau_star;
  /// Per state: visible label -> sorted targets of the weak transition.
  std::vector<std::map<Label, std::vector<std::size_t>>> weak;
  /// Set when computed on a truncated space.
  bool approximate = false;
};

WeakRelations weak_closure(const StateSpace& s);

/// Reflexive-transitive closure over all edges, as bitsets.
std::vector<std::vector<bool>> reachability(const StateSpace& s);

struct Trace {
  std::vector<std::size_t> states;  // states[0] is initial
  std::vector<Label> labels;        // labels[i] leads from states[i] to states[i+1]
};

using StatePredicate = std::function<bool(const NormalNetwork&)>;

/// Shortest path from the initial state that meets every stage in order (a
/// stage is met by the first later state satisfying it; the last stage at the
/// end of the path).
std::optional<Trace> find_trace(const StateSpace& s, const std::vector<StatePredicate>& stages,
                                std::size_t max_steps = SIZE_MAX);

/// Node processes of `a` and `b` at the given locations have equal canonical
/// prints (all common locations when `only` is empty).
bool nodes_match(const NormalNetwork& a, const NormalNetwork& b, const Environment& env,
                 const std::vector<Location>& only = {});

std::string node_print(const NormalNetwork& m, std::size_t index, const Environment& env);
/// Human-readable state: user channel names, one `p: P` entry per node.
std::string display(const NormalNetwork& m);

std::string to_dot(const StateSpace& s);
std::string to_tree(const StateSpace& s);

}  // namespace gcwn
