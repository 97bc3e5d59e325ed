#include "generators.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace gcwn::testing {

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

using Defs = std::vector<std::pair<std::string, std::size_t>>;

Expr random_value_expr(Rng& rng, const std::vector<Variable>& bound) {
  if (!bound.empty() && rng.chance(1, 2)) return expr::var(bound[rng.below(bound.size())]);
  return expr::integer(static_cast<std::int64_t>(rng.below(2)));
}

// Closed conditions as integer comparisons, so only 0 and 1 reach inputs.
Expr constant_condition(bool b) {
  return expr::binary(Op::Eq, expr::integer(0), expr::integer(b ? 0 : 1));
}

Expr random_condition(Rng& rng, const std::vector<Variable>& bound) {
  if (bound.empty()) return constant_condition(rng.chance(1, 2));
  Expr x = expr::var(bound[rng.below(bound.size())]);
  switch (rng.below(3)) {
    case 0: return expr::binary(Op::Eq, x, expr::integer(0));
    case 1: return expr::binary(Op::Lt, x, expr::integer(1));
    default: return expr::unary(Op::Not, expr::binary(Op::Eq, x, expr::integer(1)));
  }
}

Process gen(Rng& rng, const std::vector<std::string>& channels, const Defs& defs,
            std::size_t depth, std::vector<Variable>& bound, bool guarded) {
  const std::size_t pick = rng.below(10);
  auto leaf = [&]() -> Process {
    if (guarded && !defs.empty() && rng.chance(1, 2)) {
      const auto& [name, arity] = defs[rng.below(defs.size())];
      std::vector<Expr> args;
      for (std::size_t i = 0; i < arity; ++i) args.push_back(random_value_expr(rng, bound));
      return proc::call(name, std::move(args));
    }
    return proc::nil();
  };
  if (depth == 0 || pick == 0) return leaf();
  const Channel c(channels[rng.below(channels.size())]);
  if (pick <= 3) {
    Variable x = "x" + std::to_string(bound.size());
    bound.push_back(x);
    Process cont = gen(rng, channels, defs, depth - 1, bound, true);
    bound.pop_back();
    return proc::input(c, x, cont);
  }
  if (pick <= 6) {
    Expr e = random_value_expr(rng, bound);
    return proc::output(c, e, gen(rng, channels, defs, depth - 1, bound, true));
  }
  if (pick <= 8) {
    Process l = gen(rng, channels, defs, depth - 1, bound, guarded);
    Process r = gen(rng, channels, defs, depth - 1, bound, guarded);
    return proc::sum(l, r);
  }
  Expr cond = random_condition(rng, bound);
  Process l = gen(rng, channels, defs, depth - 1, bound, guarded);
  Process r = gen(rng, channels, defs, depth - 1, bound, guarded);
  return proc::ite(cond, l, r);
}

std::vector<std::string> channel_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

// -- rewriting at a random position ------------------------------------------

std::size_t count(const Process& p) {
  std::size_t n = 1;
  for (const auto& c : p->children) n += count(c);
  return n;
}

Process rebuild(const ProcNode& n, std::vector<Process> children) {
  switch (n.kind) {
    case ProcNode::Kind::Nil: return proc::nil();
    case ProcNode::Kind::Input: return proc::input(n.channel, n.binder, children[0]);
    case ProcNode::Kind::Output: return proc::output(n.channel, n.expr, children[0]);
    case ProcNode::Kind::Sum: return proc::sum(children[0], children[1]);
    case ProcNode::Kind::If: return proc::ite(n.expr, children[0], children[1]);
    case ProcNode::Kind::Call: return proc::call(n.constant, n.args, n.relabel);
  }
  return proc::nil();
}

Process rewrite_at(const Process& p, std::size_t& k, bool& done,
                   const std::function<Process(const Process&)>& f) {
  if (done) return p;
  if (k == 0) {
    done = true;
    return f(p);
  }
  --k;
  std::vector<Process> kids;
  for (const auto& c : p->children) kids.push_back(rewrite_at(c, k, done, f));
  return rebuild(*p, std::move(kids));
}

}  // namespace

Process random_process(Rng& rng, const std::vector<std::string>& channels, const Defs& defs,
                       std::size_t depth) {
  std::vector<Variable> bound;
  return gen(rng, channels, defs, depth, bound, true);
}

Generated random_network(Rng& rng, const GenParams& params) {
  Generated out;
  const auto channels = channel_names(std::max<std::size_t>(1, params.channels));
  Defs defs;
  const std::size_t ndefs = rng.below(params.definitions + 1);
  for (std::size_t i = 0; i < ndefs; ++i) {
    defs.emplace_back("D" + std::to_string(i), rng.below(2));
  }
  for (const auto& [name, arity] : defs) {
    std::vector<Variable> bound;
    Definition d;
    d.name = name;
    if (arity) {
      d.params = {"v"};
      bound.push_back("v");
    }
    // Bodies start with a prefix so that every cycle of calls is guarded.
    const Channel c(channels[rng.below(channels.size())]);
    const std::size_t depth = 1 + rng.below(3);
    if (rng.chance(1, 2)) {
      bound.push_back("y");
      d.body = proc::input(c, "y", gen(rng, channels, defs, depth, bound, true));
    } else {
      d.body = proc::output(c, random_value_expr(rng, bound), gen(rng, channels, defs, depth, bound, true));
    }
    out.definitions.push_back(std::move(d));
  }
  out.env = Environment(out.definitions);

  const std::size_t n = 1 + rng.below(std::max<std::size_t>(1, params.max_nodes));
  std::vector<Location> locs;
  for (std::size_t i = 1; i <= n; ++i) {
    locs.push_back(params.location_prefix.empty() ? Location(static_cast<std::int64_t>(i))
                                                  : Location(params.location_prefix + std::to_string(i)));
  }
  std::vector<LocPair> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.chance(3, 5)) edges.push_back(edge(locs[i], locs[j]));
    }
  }
  std::map<Location, Process> assignment;
  for (const auto& p : locs) {
    assignment[p] = random_process(rng, channels, defs, 1 + rng.below(params.max_depth));
  }
  std::vector<Channel> restricted;
  if (params.restrictions) {
    for (const auto& c : channels) {
      if (rng.chance(1, 4)) restricted.emplace_back(c);
    }
  }
  out.network = make_network(Topology::make(locs, edges), std::move(assignment), restricted);
  return out;
}

Network congruent_variant(const Network& m, const Environment& env, Rng& rng,
                          std::size_t rewrites) {
  Network out = m;
  std::set<Channel> used;
  collect_channels(m, env, used);
  for (const auto& [name, _] : env.definitions()) {
    const auto& cs = env.channels_of(name);
    used.insert(cs.begin(), cs.end());
  }
  for (std::size_t r = 0; r < rewrites; ++r) {
    const std::size_t op = rng.below(8);
    if (op == 5) {
      if (out.restricted.empty()) continue;
      const Channel old = out.restricted[rng.below(out.restricted.size())];
      Channel fresh("r" + std::to_string(r));
      while (used.count(fresh)) fresh.name += "_";
      used.insert(fresh);
      std::map<Channel, Channel> rho{{old, fresh}};
      for (auto& [_, p] : out.assignment) p = rename_channels(p, rho, env);
      for (auto& c : out.restricted) {
        if (c == old) c = fresh;
      }
      continue;
    }
    if (op == 6) {
      std::vector<Channel> rs = out.restricted;
      for (std::size_t i = rs.size(); i > 1; --i) std::swap(rs[i - 1], rs[rng.below(i)]);
      if (rng.chance(1, 2)) {
        Channel unused("u" + std::to_string(r));
        while (used.count(unused)) unused.name += "_";
        used.insert(unused);
        rs.insert(rs.begin() + static_cast<std::ptrdiff_t>(rng.below(rs.size() + 1)), unused);
      }
      out.restricted = std::move(rs);
      continue;
    }
    auto it = out.assignment.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(rng.below(out.assignment.size())));
    Process& p = it->second;
    if (op == 7) {
      if (p->kind == ProcNode::Kind::Call) p = unfold_call(*p, env);
      continue;
    }
    std::size_t index = rng.below(count(p));
    bool done = false;
    p = rewrite_at(p, index, done, [&](const Process& q) -> Process {
      switch (op) {
        case 0:
          if (q->kind == ProcNode::Kind::Sum) return proc::sum(q->children[1], q->children[0]);
          return q;
        case 1:
          if (q->kind == ProcNode::Kind::Sum && q->children[0]->kind == ProcNode::Kind::Sum) {
            const auto& l = q->children[0];
            return proc::sum(l->children[0], proc::sum(l->children[1], q->children[1]));
          }
          return q;
        case 2: return rng.chance(1, 2) ? proc::sum(q, proc::nil()) : proc::sum(proc::nil(), q);
        case 3: return proc::ite(constant_condition(true), q, proc::nil());
        default: return proc::ite(constant_condition(false), proc::nil(), q);
      }
    });
  }
  return out;
}

Network relocate(const Network& m, const std::map<Location, Location>& rename) {
  auto map = [&](const Location& p) {
    auto it = rename.find(p);
    return it == rename.end() ? p : it->second;
  };
  std::vector<Location> locs;
  for (const auto& p : m.topology.locations) locs.push_back(map(p));
  std::vector<LocPair> edges;
  for (const auto& [a, b] : m.topology.edges) edges.push_back(edge(map(a), map(b)));
  std::map<Location, Process> assignment;
  for (const auto& [p, proc] : m.assignment) assignment[map(p)] = proc;
  return make_network(Topology::make(locs, edges), assignment, m.restricted);
}

RelatedPair split_ring(std::size_t k, const std::vector<std::int64_t>& values) {
  RelatedPair out;
  out.family = "split-ring";
  auto a = [](std::size_t j) { return Channel("a" + std::to_string(j)); };
  auto h = [](std::size_t j) { return Channel("h" + std::to_string(j)); };
  auto t = [](std::size_t j) { return "T" + std::to_string(j); };
  auto v = [&](std::size_t j) { return expr::integer(values[(j - 1) % values.size()]); };
  // T1 := a1!(v1).h1!(0).hk(x).T1 and Tj := h(j-1)(x).aj!(vj).hj!(0).Tj
  out.definitions.push_back(
      {t(1), {}, proc::output(a(1), v(1), proc::output(h(1), expr::integer(0),
                                                      proc::input(h(k), "x", proc::call(t(1), {}))))});
  for (std::size_t j = 2; j <= k; ++j) {
    out.definitions.push_back(
        {t(j), {}, proc::input(h(j - 1), "x", proc::output(a(j), v(j), proc::output(h(j), expr::integer(0), proc::call(t(j), {}))))});
  }
  Process spec = proc::call("S", {});
  for (std::size_t j = k; j >= 1; --j) spec = proc::output(a(j), v(j), spec);
  out.definitions.push_back({"S", {}, spec});
  out.env = Environment(out.definitions);

  std::vector<Location> locs;
  std::map<Location, Process> nodes;
  std::vector<LocPair> edges;
  std::vector<Channel> hidden;
  for (std::size_t j = 1; j <= k; ++j) {
    locs.emplace_back(static_cast<std::int64_t>(j));
    nodes[locs.back()] = proc::call(t(j), {});
    hidden.push_back(h(j));
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) edges.push_back(edge(locs[i], locs[j]));
  }
  out.left = make_network(Topology::make(locs, edges), nodes, hidden);
  const Location s(static_cast<std::int64_t>(k + 1));
  out.right = make_network(Topology::make({s}, {}), {{s, proc::call("S", {})}});
  std::vector<LocPair> e;
  for (const auto& p : locs) e.emplace_back(p, s);
  out.relation = make_relation(e);
  return out;
}

RelatedPair random_related_pair(Rng& rng) {
  const std::size_t family = rng.below(3);
  if (family == 0) {
    std::vector<std::int64_t> vals;
    const std::size_t k = 2 + rng.below(2);
    for (std::size_t i = 0; i < k; ++i) vals.push_back(static_cast<std::int64_t>(rng.below(2)));
    return split_ring(k, vals);
  }
  GenParams params;
  params.max_nodes = 3;
  params.max_depth = 4;
  Generated g = random_network(rng, params);
  RelatedPair out;
  out.definitions = g.definitions;
  out.env = g.env;
  out.left = g.network;
  Network variant = congruent_variant(g.network, g.env, rng, 1 + rng.below(4));
  if (family == 1) {
    out.family = "congruent";
    out.right = variant;
    out.relation = make_relation(identity_relation(g.network));
  } else {
    out.family = "relocated";
    std::map<Location, Location> rename;
    std::vector<LocPair> e;
    for (const auto& p : g.network.topology.locations) {
      rename[p] = Location("n" + p.name);
      e.emplace_back(p, rename[p]);
    }
    out.right = relocate(variant, rename);
    out.relation = make_relation(e);
  }
  return out;
}

}  // namespace gcwn::testing
