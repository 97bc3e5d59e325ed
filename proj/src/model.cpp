#include "gcwn/model.hpp"

#include <algorithm>
#include <functional>

namespace gcwn {

// ---------------------------------------------------------------------------
// Locations and topologies

namespace {

bool numeric(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::strong_ordering operator<=>(const Location& a, const Location& b) {
  const bool na = numeric(a.name);
  const bool nb = numeric(b.name);
  if (na != nb) return na ? std::strong_ordering::less : std::strong_ordering::greater;
  if (na && a.name.size() != b.name.size()) return a.name.size() <=> b.name.size();
  return a.name <=> b.name;
}

LocPair edge(Location a, Location b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

Topology Topology::make(std::vector<Location> locations, std::vector<LocPair> edges) {
  Topology t;
  std::sort(locations.begin(), locations.end());
  locations.erase(std::unique(locations.begin(), locations.end()), locations.end());
  t.locations = std::move(locations);
  for (auto& [a, b] : edges) t.edges.push_back(edge(a, b));
  std::sort(t.edges.begin(), t.edges.end());
  t.edges.erase(std::unique(t.edges.begin(), t.edges.end()), t.edges.end());
  return t;
}

bool Topology::contains(const Location& p) const {
  return std::binary_search(locations.begin(), locations.end(), p);
}

bool Topology::adjacent(const Location& p, const Location& q) const {
  return p != q && std::binary_search(edges.begin(), edges.end(), edge(p, q));
}

std::vector<Location> Topology::neighbours(const Location& p) const {
  std::vector<Location> out;
  for (const auto& [a, b] : edges) {
    if (a == p && b != p) out.push_back(b);
    if (b == p && a != p) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void require_disjoint(const Topology& g, const Topology& h, const Location* except = nullptr) {
  for (const auto& p : h.locations) {
    if (g.contains(p) && !(except && *except == p)) {
      throw Error(ErrorCode::OverlappingLocations, "location " + p.name + " occurs on both sides");
    }
  }
}

}  // namespace

Topology topology_compose(const Topology& g, const Topology& h, const std::vector<LocPair>& d) {
  require_disjoint(g, h);
  std::vector<Location> locs = g.locations;
  locs.insert(locs.end(), h.locations.begin(), h.locations.end());
  std::vector<LocPair> edges = g.edges;
  edges.insert(edges.end(), h.edges.begin(), h.edges.end());
  for (const auto& [p, q] : d) {
    if (!g.contains(p) || !h.contains(q)) {
      throw Error(ErrorCode::EdgeOutOfRange, "link (" + p.name + "," + q.name +
                                                 ") is not between the two location sets");
    }
    edges.push_back(edge(p, q));
  }
  return Topology::make(std::move(locs), std::move(edges));
}

Topology topology_substitute(const Topology& g, const Topology& h, const Location& p) {
  if (!g.contains(p)) throw Error(ErrorCode::LocationNotPresent, "location " + p.name);
  require_disjoint(g, h, &p);
  std::vector<Location> locs;
  for (const auto& q : g.locations) {
    if (q != p) locs.push_back(q);
  }
  locs.insert(locs.end(), h.locations.begin(), h.locations.end());
  std::vector<LocPair> edges = h.edges;
  for (const auto& [a, b] : g.edges) {
    if (a != p && b != p) {
      edges.push_back({a, b});
      continue;
    }
    const Location& other = a == p ? b : a;
    for (const auto& r : h.locations) edges.push_back(edge(r, other));
  }
  return Topology::make(std::move(locs), std::move(edges));
}

// ---------------------------------------------------------------------------
// Processes

namespace proc {

namespace {
Process make(ProcNode n) { return std::make_shared<const ProcNode>(std::move(n)); }
}  // namespace

Process nil() {
  static const Process p = make(ProcNode{});
  return p;
}

Process input(Channel c, Variable x, Process cont) {
  ProcNode n;
  n.kind = ProcNode::Kind::Input;
  n.channel = std::move(c);
  n.binder = std::move(x);
  n.children = {std::move(cont)};
  return make(std::move(n));
}

Process output(Channel c, Expr payload, Process cont) {
  ProcNode n;
  n.kind = ProcNode::Kind::Output;
  n.channel = std::move(c);
  n.expr = std::move(payload);
  n.children = {std::move(cont)};
  return make(std::move(n));
}

Process sum(Process lhs, Process rhs) {
  ProcNode n;
  n.kind = ProcNode::Kind::Sum;
  n.children = {std::move(lhs), std::move(rhs)};
  return make(std::move(n));
}

Process sum(const std::vector<Process>& branches) {
  if (branches.empty()) return nil();
  Process acc = branches.front();
  for (std::size_t i = 1; i < branches.size(); ++i) acc = sum(acc, branches[i]);
  return acc;
}

Process ite(Expr condition, Process then_branch, Process else_branch) {
  ProcNode n;
  n.kind = ProcNode::Kind::If;
  n.expr = std::move(condition);
  n.children = {std::move(then_branch), std::move(else_branch)};
  return make(std::move(n));
}

Process call(std::string constant, std::vector<Expr> args, ChannelMap relabel) {
  ProcNode n;
  n.kind = ProcNode::Kind::Call;
  n.constant = std::move(constant);
  n.args = std::move(args);
  std::sort(relabel.begin(), relabel.end());
  n.relabel = std::move(relabel);
  return make(std::move(n));
}

}  // namespace proc

const Channel& apply_relabel(const ChannelMap& m, const Channel& c) {
  auto it = std::lower_bound(m.begin(), m.end(), c,
                             [](const auto& entry, const Channel& k) { return entry.first < k; });
  return it != m.end() && it->first == c ? it->second : c;
}

namespace {

const Channel& apply_map(const ChannelMap& m, const Channel& c) { return apply_relabel(m, c); }

const Channel& apply_map(const std::map<Channel, Channel>& m, const Channel& c) {
  auto it = m.find(c);
  return it == m.end() ? c : it->second;
}

void direct_channels(const Process& p, std::set<Channel>& out,
                     std::vector<const ProcNode*>& calls) {
  switch (p->kind) {
    case ProcNode::Kind::Input:
    case ProcNode::Kind::Output: out.insert(p->channel); break;
    case ProcNode::Kind::Call: calls.push_back(p.get()); break;
    default: break;
  }
  for (const auto& c : p->children) direct_channels(c, out, calls);
}

}  // namespace

Environment::Environment(std::vector<Definition> defs) {
  for (auto& d : defs) defs_.insert_or_assign(d.name, std::move(d));
  recompute();
}

void Environment::add(Definition def) {
  defs_.insert_or_assign(def.name, std::move(def));
  recompute();
}

const Definition* Environment::find(const std::string& name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : &it->second;
}

const std::set<Channel>& Environment::channels_of(const std::string& name) const {
  static const std::set<Channel> empty;
  auto it = channels_.find(name);
  return it == channels_.end() ? empty : it->second;
}

void Environment::recompute() {
  channels_.clear();
  std::map<std::string, std::vector<const ProcNode*>> calls;
  for (const auto& [name, def] : defs_) {
    direct_channels(def.body, channels_[name], calls[name]);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [name, cs] : calls) {
      auto& mine = channels_[name];
      for (const ProcNode* c : cs) {
        auto it = channels_.find(c->constant);
        if (it == channels_.end()) continue;
        std::vector<Channel> images;
        for (const auto& ch : it->second) images.push_back(apply_map(c->relabel, ch));
        for (auto& ch : images) changed = mine.insert(std::move(ch)).second || changed;
      }
    }
  }
}

Process substitute(const Process& p, const Bindings& bindings) {
  if (bindings.empty()) return p;
  ProcNode n = *p;
  switch (p->kind) {
    case ProcNode::Kind::Nil: return p;
    case ProcNode::Kind::Input: {
      if (bindings.count(p->binder)) {
        Bindings inner = bindings;
        inner.erase(p->binder);
        n.children[0] = substitute(p->children[0], inner);
      } else {
        n.children[0] = substitute(p->children[0], bindings);
      }
      break;
    }
    case ProcNode::Kind::Output:
    case ProcNode::Kind::If:
      n.expr = substitute(p->expr, bindings);
      for (auto& c : n.children) c = substitute(c, bindings);
      break;
    case ProcNode::Kind::Sum:
      for (auto& c : n.children) c = substitute(c, bindings);
      break;
    case ProcNode::Kind::Call:
      for (auto& a : n.args) a = substitute(a, bindings);
      break;
  }
  return std::make_shared<const ProcNode>(std::move(n));
}

Process rename_channels(const Process& p, const std::map<Channel, Channel>& rho,
                        const Environment& env) {
  if (rho.empty() || p->kind == ProcNode::Kind::Nil) return p;
  ProcNode n = *p;
  if (p->kind == ProcNode::Kind::Call) {
    std::set<Channel> domain = env.channels_of(p->constant);
    for (const auto& [from, _] : p->relabel) domain.insert(from);
    ChannelMap composed;
    for (const auto& c : domain) {
      const Channel& image = apply_map(rho, apply_map(p->relabel, c));
      if (image != c) composed.emplace_back(c, image);
    }
    n.relabel = std::move(composed);
    return std::make_shared<const ProcNode>(std::move(n));
  }
  if (p->kind == ProcNode::Kind::Input || p->kind == ProcNode::Kind::Output) {
    n.channel = apply_map(rho, p->channel);
  }
  for (auto& c : n.children) c = rename_channels(c, rho, env);
  return std::make_shared<const ProcNode>(std::move(n));
}

void collect_channels(const Process& p, const Environment& env, std::set<Channel>& out) {
  switch (p->kind) {
    case ProcNode::Kind::Input:
    case ProcNode::Kind::Output: out.insert(p->channel); break;
    case ProcNode::Kind::Call:
      for (const auto& c : env.channels_of(p->constant)) out.insert(apply_map(p->relabel, c));
      break;
    default: break;
  }
  for (const auto& c : p->children) collect_channels(c, env, out);
}

namespace {

void free_vars(const Process& p, std::set<Variable>& bound, std::set<Variable>& out) {
  auto add_expr = [&](const Expr& e) {
    std::set<Variable> vs;
    collect_free_variables(e, vs);
    for (const auto& v : vs) {
      if (!bound.count(v)) out.insert(v);
    }
  };
  switch (p->kind) {
    case ProcNode::Kind::Nil: return;
    case ProcNode::Kind::Input: {
      const bool fresh = bound.insert(p->binder).second;
      free_vars(p->children[0], bound, out);
      if (fresh) bound.erase(p->binder);
      return;
    }
    case ProcNode::Kind::Output:
    case ProcNode::Kind::If: add_expr(p->expr); break;
    case ProcNode::Kind::Call:
      for (const auto& a : p->args) add_expr(a);
      break;
    case ProcNode::Kind::Sum: break;
  }
  for (const auto& c : p->children) free_vars(c, bound, out);
}

}  // namespace

void collect_free_variables(const Process& p, std::set<Variable>& out) {
  std::set<Variable> bound;
  free_vars(p, bound, out);
}

void collect_literals(const Process& p, std::set<Value>& out) {
  if (p->expr) collect_literals(p->expr, out);
  for (const auto& a : p->args) collect_literals(a, out);
  for (const auto& c : p->children) collect_literals(c, out);
}

bool same(const Process& a, const Process& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->channel != b->channel || a->binder != b->binder ||
      a->constant != b->constant || a->relabel != b->relabel ||
      a->children.size() != b->children.size() || a->args.size() != b->args.size()) {
    return false;
  }
  if (bool(a->expr) != bool(b->expr) || (a->expr && !same(a->expr, b->expr))) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!same(a->args[i], b->args[i])) return false;
  }
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!same(a->children[i], b->children[i])) return false;
  }
  return true;
}

Process unfold_call(const ProcNode& call, const Environment& env) {
  const Definition* def = env.find(call.constant);
  if (!def) throw Error(ErrorCode::UnknownConstant, call.constant);
  if (def->params.size() != call.args.size()) {
    throw Error(ErrorCode::ArityError, call.constant + " expects " +
                                           std::to_string(def->params.size()) +
                                           " argument(s), got " + std::to_string(call.args.size()));
  }
  Bindings b;
  for (std::size_t i = 0; i < def->params.size(); ++i) {
    b[def->params[i]] = eval(call.args[i], env.primitives());
  }
  Process body = substitute(def->body, b);
  if (call.relabel.empty()) return body;
  std::map<Channel, Channel> rho(call.relabel.begin(), call.relabel.end());
  return rename_channels(body, rho, env);
}

// ---------------------------------------------------------------------------
// Networks

bool Network::is_restricted(const Channel& c) const {
  return std::find(restricted.begin(), restricted.end(), c) != restricted.end();
}

const Process& Network::at(const Location& p) const {
  auto it = assignment.find(p);
  if (it == assignment.end()) throw Error(ErrorCode::LocationNotPresent, "location " + p.name);
  return it->second;
}

Network make_network(Topology topology, std::map<Location, Process> assignment,
                     std::vector<Channel> restricted) {
  return Network{std::move(topology), std::move(assignment), std::move(restricted)};
}

void collect_channels(const Network& m, const Environment& env, std::set<Channel>& out) {
  for (const auto& [_, p] : m.assignment) collect_channels(p, env, out);
  out.insert(m.restricted.begin(), m.restricted.end());
}

void collect_literals(const Network& m, std::set<Value>& out) {
  for (const auto& [_, p] : m.assignment) collect_literals(p, out);
}

Network freshen_restricted(const Network& m, const std::set<Channel>& avoid,
                           const Environment& env) {
  std::set<Channel> used = avoid;
  collect_channels(m, env, used);
  std::map<Channel, Channel> rho;
  for (const auto& c : m.restricted) {
    if (!avoid.count(c)) continue;
    Channel fresh = c;
    do {
      fresh.name += '\'';
    } while (used.count(fresh));
    used.insert(fresh);
    rho[c] = fresh;
  }
  if (rho.empty()) return m;
  Network out = m;
  for (auto& [_, p] : out.assignment) p = rename_channels(p, rho, env);
  for (auto& c : out.restricted) c = apply_map(rho, c);
  return out;
}

Network network_compose(const Network& m, const Network& n, const std::vector<LocPair>& d,
                        const Environment& env) {
  Topology topology = topology_compose(m.topology, n.topology, d);
  std::set<Channel> in_m;
  collect_channels(m, env, in_m);
  Network n2 = freshen_restricted(n, in_m, env);
  std::set<Channel> in_n;
  collect_channels(n2, env, in_n);
  Network m2 = freshen_restricted(m, in_n, env);

  Network out;
  out.topology = std::move(topology);
  out.assignment = m2.assignment;
  out.assignment.insert(n2.assignment.begin(), n2.assignment.end());
  out.restricted = m2.restricted;
  out.restricted.insert(out.restricted.end(), n2.restricted.begin(), n2.restricted.end());
  return out;
}

std::vector<LocPair> full_links(const Network& m, const Network& n) {
  std::vector<LocPair> d;
  for (const auto& p : m.topology.locations) {
    for (const auto& q : n.topology.locations) d.emplace_back(p, q);
  }
  return d;
}

std::vector<LocPair> identity_relation(const Network& m) {
  std::vector<LocPair> id;
  for (const auto& p : m.topology.locations) id.emplace_back(p, p);
  return id;
}

Network network_link_all(const Network& m, const Network& n, const Environment& env) {
  return network_compose(m, n, full_links(m, n), env);
}

Network network_update(const Network& m, const std::map<Location, Process>& updates) {
  Network out = m;
  for (const auto& [p, proc] : updates) {
    auto it = out.assignment.find(p);
    if (it == out.assignment.end() || !m.topology.contains(p)) {
      throw Error(ErrorCode::LocationNotPresent, "location " + p.name);
    }
    it->second = proc;
  }
  return out;
}

Network network_restrict(const Network& m, const std::vector<Channel>& channels) {
  Network out = m;
  for (const auto& c : channels) {
    if (!out.is_restricted(c)) out.restricted.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::SelfLoop: return "SelfLoop";
    case DiagnosticKind::EdgeOutOfRange: return "EdgeOutOfRange";
    case DiagnosticKind::PartialAssignment: return "PartialAssignment";
    case DiagnosticKind::DuplicateRestriction: return "DuplicateRestriction";
    case DiagnosticKind::OpenVariable: return "OpenVariable";
    case DiagnosticKind::ArityMismatch: return "ArityMismatch";
    case DiagnosticKind::UnknownConstant: return "UnknownConstant";
    case DiagnosticKind::UnknownPrimitive: return "UnknownPrimitive";
    case DiagnosticKind::UnguardedRecursion: return "UnguardedRecursion";
  }
  return "?";
}

namespace {

class Checker {
 public:
  Checker(const Environment& env, std::vector<Diagnostic>& out) : env_(env), out_(out) {}

  void check(const Process& p, const std::string& where, const std::set<Variable>& params) {
    std::set<Variable> free;
    collect_free_variables(p, free);
    for (const auto& v : free) {
      if (!params.count(v)) {
        report(DiagnosticKind::OpenVariable, where + ": free variable " + v);
      }
    }
    walk(p, where);
  }

  /// Constants called at unguarded positions of `p`.
  static void unguarded_calls(const Process& p, std::set<std::string>& out) {
    switch (p->kind) {
      case ProcNode::Kind::Call: out.insert(p->constant); break;
      case ProcNode::Kind::Sum:
      case ProcNode::Kind::If:
        for (const auto& c : p->children) unguarded_calls(c, out);
        break;
      default: break;
    }
  }

  static void all_calls(const Process& p, std::set<std::string>& out) {
    if (p->kind == ProcNode::Kind::Call) out.insert(p->constant);
    for (const auto& c : p->children) all_calls(c, out);
  }

  void report(DiagnosticKind kind, std::string message) {
    out_.push_back({kind, std::move(message)});
  }

 private:
  void walk_expr(const Expr& e, const std::string& where) {
    if (e->kind == ExprNode::Kind::Prim) {
      const Primitive* prim = env_.primitives().find(e->name);
      if (!prim) {
        report(DiagnosticKind::UnknownPrimitive, where + ": unknown primitive " + e->name);
      } else if (prim->arity != e->args.size()) {
        report(DiagnosticKind::ArityMismatch,
               where + ": " + e->name + " expects " + std::to_string(prim->arity) +
                   " argument(s), got " + std::to_string(e->args.size()));
      }
    }
    for (const auto& a : e->args) walk_expr(a, where);
  }

  void walk(const Process& p, const std::string& where) {
    if (p->expr) walk_expr(p->expr, where);
    for (const auto& a : p->args) walk_expr(a, where);
    if (p->kind == ProcNode::Kind::Call) {
      const Definition* def = env_.find(p->constant);
      if (!def) {
        report(DiagnosticKind::UnknownConstant, where + ": unknown constant " + p->constant);
      } else if (def->params.size() != p->args.size()) {
        report(DiagnosticKind::ArityMismatch,
               where + ": " + p->constant + " expects " + std::to_string(def->params.size()) +
                   " argument(s), got " + std::to_string(p->args.size()));
      }
    }
    for (const auto& c : p->children) walk(c, where);
  }

  const Environment& env_;
  std::vector<Diagnostic>& out_;
};

void check_definitions(const Environment& env, const std::set<std::string>& names,
                       std::vector<Diagnostic>& out) {
  Checker checker(env, out);
  std::map<std::string, std::set<std::string>> graph;
  for (const auto& name : names) {
    const Definition* def = env.find(name);
    if (!def) continue;
    checker.check(def->body, "definition " + name,
                  std::set<Variable>(def->params.begin(), def->params.end()));
    Checker::unguarded_calls(def->body, graph[name]);
  }
  // A definition is unguarded when it can reach itself through calls that
  // are not under a prefix.
  for (const auto& name : names) {
    std::set<std::string> seen;
    std::vector<std::string> stack(graph[name].begin(), graph[name].end());
    bool cyclic = false;
    while (!stack.empty() && !cyclic) {
      std::string cur = std::move(stack.back());
      stack.pop_back();
      if (cur == name) cyclic = true;
      if (!seen.insert(cur).second) continue;
      auto it = graph.find(cur);
      if (it == graph.end()) {
        if (const Definition* d = env.find(cur)) {
          Checker::unguarded_calls(d->body, graph[cur]);
          it = graph.find(cur);
        } else {
          continue;
        }
      }
      stack.insert(stack.end(), it->second.begin(), it->second.end());
    }
    if (cyclic) {
      checker.report(DiagnosticKind::UnguardedRecursion,
                     "definition " + name + ": recursive call not under a prefix");
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate(const Network& m, const Environment& env) {
  std::vector<Diagnostic> out;
  Checker checker(env, out);
  for (const auto& [a, b] : m.topology.edges) {
    if (a == b) {
      checker.report(DiagnosticKind::SelfLoop, "edge " + a.name + " -- " + b.name);
    } else if (!m.topology.contains(a) || !m.topology.contains(b)) {
      checker.report(DiagnosticKind::EdgeOutOfRange,
                     "edge " + a.name + " -- " + b.name + " has an endpoint outside the network");
    }
  }
  for (const auto& p : m.topology.locations) {
    if (!m.assignment.count(p)) {
      checker.report(DiagnosticKind::PartialAssignment, "location " + p.name + " has no process");
    }
  }
  for (const auto& [p, _] : m.assignment) {
    if (!m.topology.contains(p)) {
      checker.report(DiagnosticKind::PartialAssignment,
                     "process assigned to unknown location " + p.name);
    }
  }
  std::set<Channel> seen;
  for (const auto& c : m.restricted) {
    if (!seen.insert(c).second) {
      checker.report(DiagnosticKind::DuplicateRestriction, "channel " + c.name + " restricted twice");
    }
  }
  std::set<std::string> reachable;
  std::vector<std::string> todo;
  for (const auto& [p, proc] : m.assignment) {
    checker.check(proc, "node " + p.name, {});
    std::set<std::string> calls;
    Checker::all_calls(proc, calls);
    todo.insert(todo.end(), calls.begin(), calls.end());
  }
  while (!todo.empty()) {
    std::string name = std::move(todo.back());
    todo.pop_back();
    if (!reachable.insert(name).second) continue;
    if (const Definition* d = env.find(name)) {
      std::set<std::string> calls;
      Checker::all_calls(d->body, calls);
      todo.insert(todo.end(), calls.begin(), calls.end());
    }
  }
  check_definitions(env, reachable, out);
  return out;
}

std::vector<Diagnostic> validate_definitions(const Environment& env) {
  std::vector<Diagnostic> out;
  std::set<std::string> names;
  for (const auto& [name, _] : env.definitions()) names.insert(name);
  check_definitions(env, names, out);
  return out;
}

}  // namespace gcwn
