#include "gcwn/semantics.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace gcwn {

int compare(const Label& a, const Label& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.kind == Label::Kind::Tau) return 0;
  if (a.location != b.location) return a.location < b.location ? -1 : 1;
  if (a.channel != b.channel) return a.channel < b.channel ? -1 : 1;
  return compare(a.payload, b.payload);
}

std::string to_string(const Label& l) {
  switch (l.kind) {
    case Label::Kind::Tau: return "tau";
    case Label::Kind::Output:
      return l.location.name + ":" + l.channel.name + "!" + to_string(l.payload);
    case Label::Kind::Input:
      return l.location.name + ":" + l.channel.name + "?" + to_string(l.payload);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Processes

ProcessTransitions process_transitions(const Process& p, const Environment& env) {
  ProcessTransitions out;
  for (const auto& b : normalize_process(p, env)) {
    if (b.output) {
      out.outputs.push_back({Action{true, b.channel, b.payload}, b.continuation});
    } else {
      out.inputs.push_back({b.channel, b.binder, b.continuation});
    }
  }
  return out;
}

Process instantiate(const InputSchema& in, const Value& v) {
  return substitute(in.continuation, {{in.binder, v}});
}

// ---------------------------------------------------------------------------
// Networks

std::vector<Transition> network_transitions(const NormalNetwork& m, const Environment& env,
                                            const TransitionOptions& opts, std::size_t* skipped) {
  const auto& locs = m.network.topology.locations;
  std::vector<Transition> out;
  for (std::size_t i = 0; i < locs.size(); ++i) {
    const auto neighbours = m.network.topology.neighbours(locs[i]);
    for (const auto& b : m.nodes[i]) {
      if (!b.output) continue;
      // Every neighbour with a ready input on the channel receives; a
      // receiver with several such summands picks one of them.
      std::vector<std::size_t> receivers;
      std::vector<std::vector<const Branch*>> choices;
      for (const auto& q : neighbours) {
        const std::size_t j = m.index_of(q);
        std::vector<const Branch*> ready;
        for (const auto& rb : m.nodes[j]) {
          if (!rb.output && rb.channel == b.channel) ready.push_back(&rb);
        }
        if (!ready.empty()) {
          receivers.push_back(j);
          choices.push_back(std::move(ready));
        }
      }
      const Label label = m.network.is_restricted(b.channel)
                              ? Label::tau()
                              : Label::output(locs[i], b.channel, b.payload);
      std::vector<std::size_t> pick(receivers.size(), 0);
      while (true) {
        std::map<Location, Process> updates;
        updates[locs[i]] = b.continuation;
        for (std::size_t k = 0; k < receivers.size(); ++k) {
          const Branch& rb = *choices[k][pick[k]];
          updates[locs[receivers[k]]] = substitute(rb.continuation, {{rb.binder, b.payload}});
        }
        out.push_back({label, network_update(m.network, updates)});
        std::size_t k = 0;
        while (k < pick.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
        if (k == pick.size()) break;
      }
    }
  }
  if (opts.mode == Mode::Open) {
    for (std::size_t i = 0; i < locs.size(); ++i) {
      for (const auto& b : m.nodes[i]) {
        if (b.output || m.network.is_restricted(b.channel)) continue;
        for (const auto& v : opts.universe) {
          Process next = substitute(b.continuation, {{b.binder, v}});
          try {
            normalize_process(next, env);
          } catch (const Error&) {
            if (skipped) ++*skipped;
            continue;
          }
          out.push_back({Label::input(locs[i], b.channel, v),
                         network_update(m.network, {{locs[i], next}})});
        }
      }
    }
  }
  return out;
}

std::vector<Transition> network_transitions(const Network& m, const Environment& env,
                                            const TransitionOptions& opts, std::size_t* skipped) {
  return network_transitions(normalize_network(m, env), env, opts, skipped);
}

namespace {

struct Summand {
  bool output;
  Channel channel;
  Value payload;
  Variable binder;
  Process continuation;
};

void summands(const Process& p, const Environment& env, std::vector<Summand>& out,
              std::size_t unfold_budget) {
  switch (p->kind) {
    case ProcNode::Kind::Nil: return;
    case ProcNode::Kind::Input:
      out.push_back({false, p->channel, Value(), p->binder, p->children[0]});
      return;
    case ProcNode::Kind::Output:
      out.push_back({true, p->channel, eval(p->expr, env.primitives()), "", p->children[0]});
      return;
    case ProcNode::Kind::Sum:
      for (const auto& c : p->children) summands(c, env, out, unfold_budget);
      return;
    case ProcNode::Kind::If:
      summands(p->children[eval_bool(p->expr, env.primitives()) ? 0 : 1], env, out,
               unfold_budget);
      return;
    case ProcNode::Kind::Call:
      if (unfold_budget == 0) {
        throw Error(ErrorCode::UnguardedRecursion, p->constant + " does not reach a prefix");
      }
      summands(unfold_call(*p, env), env, out, unfold_budget - 1);
      return;
  }
}

}  // namespace

std::vector<Network> reductions(const Network& m, const Environment& env,
                                const ReductionOptions& opts) {
  const std::size_t budget = env.definitions().size() + 1;
  std::map<Location, std::vector<Summand>> ready;
  for (const auto& [loc, p] : m.assignment) summands(p, env, ready[loc], budget);

  std::vector<Network> out;
  for (const auto& [sender, mine] : ready) {
    for (const auto& s : mine) {
      if (!s.output) continue;
      std::vector<Location> receivers;
      std::vector<std::vector<const Summand*>> options;
      for (const auto& [loc, theirs] : ready) {
        if (!m.topology.adjacent(sender, loc)) continue;
        std::vector<const Summand*> ins;
        for (const auto& t : theirs) {
          if (!t.output && t.channel == s.channel) ins.push_back(&t);
        }
        if (ins.empty()) continue;
        receivers.push_back(loc);
        options.push_back(std::move(ins));
      }
      if (opts.drop_last_receiver && !receivers.empty()) {
        receivers.pop_back();
        options.pop_back();
      }
      std::vector<std::size_t> idx(receivers.size(), 0);
      for (bool more = true; more;) {
        Network next = m;
        next.assignment[sender] = s.continuation;
        for (std::size_t k = 0; k < receivers.size(); ++k) {
          const Summand& t = *options[k][idx[k]];
          next.assignment[receivers[k]] = substitute(t.continuation, {{t.binder, s.payload}});
        }
        out.push_back(std::move(next));
        more = false;
        for (std::size_t k = 0; k < idx.size(); ++k) {
          if (++idx[k] < options[k].size()) {
            more = true;
            break;
          }
          idx[k] = 0;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exploration

std::optional<std::size_t> StateSpace::find(const std::string& key) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].key == key) return i;
  }
  return std::nullopt;
}

StateSpace explore(const Network& m, const Environment& env, const Bounds& bounds,
                   const TransitionOptions& opts) {
  StateSpace space;
  space.mode = opts.mode;
  space.universe = opts.universe;
  std::unordered_map<std::string, std::size_t> index;

  auto truncate = [&](std::size_t s) {
    if (bounds.strict) {
      throw Error(ErrorCode::BudgetExceeded,
                  "state space exceeds " + std::to_string(bounds.max_states) + " states or depth " +
                      std::to_string(bounds.max_depth));
    }
    space.truncated = true;
    if (space.frontier.empty() || space.frontier.back() != s) space.frontier.push_back(s);
  };

  space.states.push_back(normalize_network(m, env));
  space.depth.push_back(0);
  space.out.emplace_back();
  index.emplace(space.states[0].key, 0);

  for (std::size_t s = 0; s < space.states.size(); ++s) {
    if (space.depth[s] >= bounds.max_depth) {
      truncate(s);
      continue;
    }
    std::vector<std::pair<Label, NormalNetwork>> succ;
    for (auto& t : network_transitions(space.states[s], env, opts, &space.skipped_inputs)) {
      succ.emplace_back(std::move(t.label), normalize_network(t.target, env));
    }
    std::sort(succ.begin(), succ.end(), [](const auto& a, const auto& b) {
      if (int c = compare(a.first, b.first); c != 0) return c < 0;
      return a.second.key < b.second.key;
    });
    for (std::size_t k = 0; k < succ.size(); ++k) {
      if (k && succ[k].first == succ[k - 1].first && succ[k].second.key == succ[k - 1].second.key) {
        continue;
      }
      auto it = index.find(succ[k].second.key);
      std::size_t target;
      if (it != index.end()) {
        target = it->second;
      } else if (space.states.size() >= bounds.max_states) {
        truncate(s);
        continue;
      } else {
        target = space.states.size();
        index.emplace(succ[k].second.key, target);
        space.states.push_back(std::move(succ[k].second));
        space.depth.push_back(space.depth[s] + 1);
        space.out.emplace_back();
      }
      space.out[s].push_back(space.edges.size());
      space.edges.push_back({s, succ[k].first, target});
    }
  }
  return space;
}

std::vector<Value> payload_universe(const std::vector<const Network*>& nets,
                                    const Environment& env, const std::vector<Value>& extra) {
  std::set<Value> vals(extra.begin(), extra.end());
  std::set<std::string> seen;
  std::vector<std::string> todo;
  for (const Network* n : nets) {
    collect_literals(*n, vals);
    for (const auto& [_, p] : n->assignment) {
      std::function<void(const Process&)> calls = [&](const Process& q) {
        if (q->kind == ProcNode::Kind::Call) todo.push_back(q->constant);
        for (const auto& c : q->children) calls(c);
      };
      calls(p);
    }
  }
  while (!todo.empty()) {
    std::string name = std::move(todo.back());
    todo.pop_back();
    if (!seen.insert(name).second) continue;
    const Definition* d = env.find(name);
    if (!d) continue;
    collect_literals(d->body, vals);
    std::function<void(const Process&)> calls = [&](const Process& q) {
      if (q->kind == ProcNode::Kind::Call) todo.push_back(q->constant);
      for (const auto& c : q->children) calls(c);
    };
    calls(d->body);
  }
  return {vals.begin(), vals.end()};
}

WeakRelations weak_closure(const StateSpace& s) {
  const std::size_t n = s.states.size();
  WeakRelations w;
  w.approximate = s.truncated;
  w.tau_star.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{i};
    seen[i] = true;
    while (!stack.empty()) {
      std::size_t cur = stack.back();
      stack.pop_back();
      w.tau_star[i].push_back(cur);
      for (std::size_t e : s.out[cur]) {
        const auto& edge = s.edges[e];
        if (edge.label.is_tau() && !seen[edge.to]) {
          seen[edge.to] = true;
          stack.push_back(edge.to);
        }
      }
    }
    std::sort(w.tau_star[i].begin(), w.tau_star[i].end());
  }
  w.weak.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::map<Label, std::set<std::size_t>> acc;
    for (std::size_t mid : w.tau_star[i]) {
      for (std::size_t e : s.out[mid]) {
        const auto& edge = s.edges[e];
        if (edge.label.is_tau()) continue;
        auto& targets = acc[edge.label];
        targets.insert(w.tau_star[edge.to].begin(), w.tau_star[edge.to].end());
      }
    }
    for (auto& [label, targets] : acc) {
      w.weak[i].emplace(label, std::vector<std::size_t>(targets.begin(), targets.end()));
    }
  }
  return w;
}

std::vector<std::vector<bool>> reachability(const StateSpace& s) {
  const std::size_t n = s.states.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> stack{i};
    r[i][i] = true;
    while (!stack.empty()) {
      std::size_t cur = stack.back();
      stack.pop_back();
      for (std::size_t e : s.out[cur]) {
        std::size_t t = s.edges[e].to;
        if (!r[i][t]) {
          r[i][t] = true;
          stack.push_back(t);
        }
      }
    }
  }
  return r;
}

std::optional<Trace> find_trace(const StateSpace& s, const std::vector<StatePredicate>& stages,
                                std::size_t max_steps) {
  const std::size_t n = s.states.size();
  const std::size_t k = stages.size();
  std::vector<std::vector<bool>> holds(k, std::vector<bool>(n));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) holds[j][i] = stages[j](s.states[i]);
  }
  auto advance = [&](std::size_t stage, std::size_t state) {
    while (stage < k && holds[stage][state]) ++stage;
    return stage;
  };
  // Breadth-first search over (state, stages met).
  const std::size_t none = SIZE_MAX;
  auto id = [&](std::size_t state, std::size_t stage) { return state * (k + 1) + stage; };
  std::vector<std::size_t> parent(n * (k + 1), none);
  std::vector<std::size_t> via(n * (k + 1), none);
  std::vector<std::size_t> dist(n * (k + 1), none);
  std::deque<std::size_t> queue;
  const std::size_t start = id(0, advance(0, 0));
  dist[start] = 0;
  queue.push_back(start);
  std::size_t goal = none;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const std::size_t state = cur / (k + 1);
    const std::size_t stage = cur % (k + 1);
    if (stage == k) {
      goal = cur;
      break;
    }
    if (dist[cur] >= max_steps) continue;
    for (std::size_t e : s.out[state]) {
      const std::size_t t = s.edges[e].to;
      const std::size_t next = id(t, advance(stage, t));
      if (dist[next] != none) continue;
      dist[next] = dist[cur] + 1;
      parent[next] = cur;
      via[next] = e;
      queue.push_back(next);
    }
  }
  if (goal == none) return std::nullopt;
  Trace trace;
  for (std::size_t cur = goal; cur != none; cur = parent[cur]) {
    trace.states.push_back(cur / (k + 1));
    if (via[cur] != none) trace.labels.push_back(s.edges[via[cur]].label);
  }
  std::reverse(trace.states.begin(), trace.states.end());
  std::reverse(trace.labels.begin(), trace.labels.end());
  return trace;
}

std::string node_print(const NormalNetwork& m, std::size_t index, const Environment& env) {
  return canonical_print(m.network.at(m.network.topology.locations[index]), env);
}

bool nodes_match(const NormalNetwork& a, const NormalNetwork& b, const Environment& env,
                 const std::vector<Location>& only) {
  const auto& locs = only.empty() ? a.network.topology.locations : only;
  for (const auto& p : locs) {
    if (!a.network.topology.contains(p) || !b.network.topology.contains(p)) return false;
    if (node_print(a, a.index_of(p), env) != node_print(b, b.index_of(p), env)) return false;
  }
  return true;
}

std::string display(const NormalNetwork& m) {
  std::string out;
  for (const auto& p : m.network.topology.locations) {
    if (!out.empty()) out += " | ";
    out += p.name + ": " + to_string(m.network.at(p));
  }
  if (!m.network.restricted.empty()) {
    out += " \\ {";
    for (std::size_t i = 0; i < m.network.restricted.size(); ++i) {
      if (i) out += ", ";
      out += m.network.restricted[i].name;
    }
    out += "}";
  }
  return out;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_dot(const StateSpace& s) {
  std::string out = "digraph lts {\n";
  out += "  // states: " + std::to_string(s.states.size()) +
         ", transitions: " + std::to_string(s.edges.size()) +
         ", truncated: " + (s.truncated ? "yes" : "no") + "\n";
  for (std::size_t i = 0; i < s.states.size(); ++i) {
    out += "  s" + std::to_string(i) + " [label=" + quote(s.states[i].key);
    if (i == 0) out += ", shape=doublecircle";
    if (std::find(s.frontier.begin(), s.frontier.end(), i) != s.frontier.end()) {
      out += ", style=dashed";
    }
    out += "];\n";
  }
  for (const auto& e : s.edges) {
    out += "  s" + std::to_string(e.from) + " -> s" + std::to_string(e.to) +
           " [label=" + quote(to_string(e.label)) + "];\n";
  }
  return out + "}\n";
}

std::string to_tree(const StateSpace& s) {
  std::string out = "lts\n";
  out += "  mode: " + std::string(s.mode == Mode::Open ? "open" : "closed") + "\n";
  out += "  states: " + std::to_string(s.states.size()) + "\n";
  out += "  transitions: " + std::to_string(s.edges.size()) + "\n";
  out += "  truncated: " + std::string(s.truncated ? "true" : "false") + "\n";
  if (s.truncated) {
    out += "  frontier:";
    for (std::size_t f : s.frontier) out += " s" + std::to_string(f);
    out += "\n";
  }
  for (std::size_t i = 0; i < s.states.size(); ++i) {
    out += "  state s" + std::to_string(i) + "\n";
    out += "    depth: " + std::to_string(s.depth[i]) + "\n";
    out += "    key: " + s.states[i].key + "\n";
    for (std::size_t e : s.out[i]) {
      out += "    " + to_string(s.edges[e].label) + " -> s" + std::to_string(s.edges[e].to) + "\n";
    }
  }
  return out;
}

}  // namespace gcwn
