#include "gcwn/normal.hpp"

#include <algorithm>
#include <numeric>

namespace gcwn {

namespace {

Process fold_process(const Process& p) {
  switch (p->kind) {
    case ProcNode::Kind::Nil: return p;
    case ProcNode::Kind::If: {
      Expr cond = fold_constants(p->expr);
      if (cond->kind == ExprNode::Kind::Literal && cond->value.is(Value::Kind::Bool)) {
        return fold_process(p->children[cond->value.as_bool() ? 0 : 1]);
      }
      return proc::ite(std::move(cond), fold_process(p->children[0]),
                       fold_process(p->children[1]));
    }
    case ProcNode::Kind::Call: {
      ProcNode n = *p;
      for (auto& a : n.args) a = fold_constants(a);
      return std::make_shared<const ProcNode>(std::move(n));
    }
    default: {
      ProcNode n = *p;
      if (n.expr) n.expr = fold_constants(n.expr);
      for (auto& c : n.children) c = fold_process(c);
      return std::make_shared<const ProcNode>(std::move(n));
    }
  }
}

void flatten(const Process& p, const Environment& env, NormalProcess& out,
             std::vector<std::string>& unfolding) {
  switch (p->kind) {
    case ProcNode::Kind::Nil: return;
    case ProcNode::Kind::Input:
      out.push_back({false, p->channel, Value(), p->binder, fold_process(p->children[0])});
      return;
    case ProcNode::Kind::Output:
      out.push_back(
          {true, p->channel, eval(p->expr, env.primitives()), "", fold_process(p->children[0])});
      return;
    case ProcNode::Kind::Sum:
      flatten(p->children[0], env, out, unfolding);
      flatten(p->children[1], env, out, unfolding);
      return;
    case ProcNode::Kind::If:
      flatten(p->children[eval_bool(p->expr, env.primitives()) ? 0 : 1], env, out, unfolding);
      return;
    case ProcNode::Kind::Call: {
      if (std::find(unfolding.begin(), unfolding.end(), p->constant) != unfolding.end()) {
        throw Error(ErrorCode::UnguardedRecursion,
                    p->constant + " is reached again before any prefix");
      }
      unfolding.push_back(p->constant);
      flatten(unfold_call(*p, env), env, out, unfolding);
      unfolding.pop_back();
      return;
    }
  }
}

enum class ChannelMode { Real, Mask, Alias, Fixed };

// Canonical printer: sums flattened and sorted, binders as $n, restricted
// channels either kept, masked as "#", aliased #k by first occurrence, or
// printed through a fixed alias table.
class Printer {
 public:
  Printer(ChannelMode mode, const Environment& env, const std::vector<Channel>* restricted,
          std::map<Channel, std::size_t>* aliases = nullptr)
      : mode_(mode), env_(env), restricted_(restricted), aliases_(aliases) {}

  void branch(std::string& out, const Branch& b) {
    out += chan(b.channel);
    if (b.output) {
      out += "!(";
      out += to_string(b.payload);
      out += ").";
      term(out, b.continuation);
    } else {
      out += "($";
      out += std::to_string(scope_.size());
      out += ").";
      scope_.push_back(b.binder);
      term(out, b.continuation);
      scope_.pop_back();
    }
  }

  /// Sort key of a branch under the masked printing.
  std::string masked(const Branch& b) const {
    Printer p(ChannelMode::Mask, env_, restricted_);
    p.scope_ = scope_;
    std::string out = b.output ? "!" : "?";
    p.branch(out, b);
    return out;
  }

  std::string fixed(const Branch& b) {
    std::string out;
    branch(out, b);
    return out;
  }

  std::string real(const Branch& b) const {
    Printer p(ChannelMode::Real, env_, restricted_);
    p.scope_ = scope_;
    std::string out = b.output ? "!" : "?";
    p.branch(out, b);
    return out;
  }

 private:
  bool restricted(const Channel& c) const {
    return restricted_ && std::find(restricted_->begin(), restricted_->end(), c) !=
                              restricted_->end();
  }

  std::string chan(const Channel& c) {
    if (mode_ == ChannelMode::Real || !restricted(c)) return c.name;
    if (mode_ == ChannelMode::Mask) return "#";
    if (mode_ == ChannelMode::Fixed) return "#" + std::to_string(aliases_->at(c));
    auto [it, _] = aliases_->try_emplace(c, aliases_->size());
    return "#" + std::to_string(it->second);
  }

  std::string var(const Variable& x) const {
    for (std::size_t i = scope_.size(); i-- > 0;) {
      if (scope_[i] == x) return "$" + std::to_string(i);
    }
    return x;
  }

  static void summands(const Process& p, std::vector<Process>& out) {
    if (p->kind == ProcNode::Kind::Sum) {
      summands(p->children[0], out);
      summands(p->children[1], out);
    } else if (p->kind != ProcNode::Kind::Nil) {
      out.push_back(p);
    }
  }

  void sum(std::string& out, const Process& p) {
    std::vector<Process> parts;
    summands(p, parts);
    if (parts.empty()) {
      out += '0';
      return;
    }
    std::vector<std::string> keys;
    for (const auto& s : parts) {
      Printer sorter(mode_ == ChannelMode::Alias ? ChannelMode::Mask : mode_, env_, restricted_,
                     aliases_);
      sorter.scope_ = scope_;
      std::string k;
      sorter.single(k, s);
      keys.push_back(std::move(k));
    }
    std::vector<std::size_t> order(parts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i) out += " + ";
      if (mode_ == ChannelMode::Alias) {
        single(out, parts[order[i]]);
      } else {
        out += keys[order[i]];
      }
    }
  }

  void term(std::string& out, const Process& p) {
    std::vector<Process> parts;
    summands(p, parts);
    if (parts.size() > 1) {
      out += '(';
      sum(out, p);
      out += ')';
    } else {
      sum(out, p);
    }
  }

  void expr(std::string& out, const Expr& e) {
    print_expr(out, e, [this](const Variable& x) { return var(x); });
  }

  void single(std::string& out, const Process& p) {
    switch (p->kind) {
      case ProcNode::Kind::Input:
        out += chan(p->channel);
        out += "($";
        out += std::to_string(scope_.size());
        out += ").";
        scope_.push_back(p->binder);
        term(out, p->children[0]);
        scope_.pop_back();
        return;
      case ProcNode::Kind::Output:
        out += chan(p->channel);
        out += "!(";
        expr(out, p->expr);
        out += ").";
        term(out, p->children[0]);
        return;
      case ProcNode::Kind::If:
        out += "if ";
        expr(out, p->expr);
        out += " then ";
        term(out, p->children[0]);
        out += " else ";
        term(out, p->children[1]);
        return;
      case ProcNode::Kind::Call: {
        out += p->constant;
        out += '(';
        for (std::size_t i = 0; i < p->args.size(); ++i) {
          if (i) out += ", ";
          expr(out, p->args[i]);
        }
        out += ')';
        std::string suffix;
        for (const auto& c : env_.channels_of(p->constant)) {
          const Channel& image = apply_relabel(p->relabel, c);
          if (image == c && !restricted(image)) continue;
          if (!suffix.empty()) suffix += ',';
          suffix += c.name + "=" + chan(image);
        }
        if (!suffix.empty()) out += "[" + suffix + "]";
        return;
      }
      default: term(out, p); return;
    }
  }

  ChannelMode mode_;
  const Environment& env_;
  const std::vector<Channel>* restricted_;
  std::map<Channel, std::size_t>* aliases_;
  std::vector<Variable> scope_;
};

}  // namespace

NormalProcess normalize_process(const Process& p, const Environment& env) {
  NormalProcess out;
  std::vector<std::string> unfolding;
  flatten(p, env, out, unfolding);
  Printer printer(ChannelMode::Real, env, nullptr);
  std::vector<std::string> keys;
  keys.reserve(out.size());
  for (const auto& b : out) keys.push_back(printer.real(b));
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  NormalProcess sorted;
  sorted.reserve(out.size());
  for (std::size_t i : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

Process to_process(const NormalProcess& np) {
  std::vector<Process> parts;
  for (const auto& b : np) {
    parts.push_back(b.output ? proc::output(b.channel, expr::lit(b.payload), b.continuation)
                             : proc::input(b.channel, b.binder, b.continuation));
  }
  return proc::sum(parts);
}

std::size_t NormalNetwork::index_of(const Location& p) const {
  const auto& locs = network.topology.locations;
  auto it = std::lower_bound(locs.begin(), locs.end(), p);
  if (it == locs.end() || *it != p) throw Error(ErrorCode::LocationNotPresent, "location " + p.name);
  return static_cast<std::size_t>(it - locs.begin());
}

constexpr std::size_t kMaxPermutedAliases = 4;

NormalNetwork normalize_network(const Network& m, const Environment& env) {
  NormalNetwork nn;
  nn.network.topology = m.topology;
  nn.network.restricted = m.restricted;
  Printer masker(ChannelMode::Mask, env, &m.restricted);
  for (const auto& p : m.topology.locations) {
    NormalProcess np = normalize_process(m.at(p), env);
    std::vector<std::string> keys;
    for (const auto& b : np) keys.push_back(masker.masked(b));
    std::vector<std::size_t> order(np.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    NormalProcess sorted;
    for (std::size_t i : order) sorted.push_back(std::move(np[i]));
    nn.network.assignment[p] = to_process(sorted);
    nn.nodes.push_back(std::move(sorted));
  }
  std::map<Channel, std::size_t> aliases;
  Printer printer(ChannelMode::Alias, env, &m.restricted, &aliases);
  for (std::size_t i = 0; i < nn.nodes.size(); ++i) {
    if (i) nn.key += " | ";
    nn.key += m.topology.locations[i].name;
    nn.key += ": ";
    if (nn.nodes[i].empty()) nn.key += '0';
    for (std::size_t j = 0; j < nn.nodes[i].size(); ++j) {
      if (j) nn.key += " + ";
      printer.branch(nn.key, nn.nodes[i][j]);
    }
  }
  // First-occurrence aliases depend on names where masked branches tie;
  // small alias sets are closed off by taking the least key over all tables.
  if (aliases.size() < 2 || aliases.size() > kMaxPermutedAliases) return nn;
  std::vector<Channel> used;
  for (const auto& [c, _] : aliases) used.push_back(c);
  std::vector<std::size_t> perm(used.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  do {
    std::map<Channel, std::size_t> table;
    for (std::size_t i = 0; i < used.size(); ++i) table[used[i]] = perm[i];
    Printer fixed(ChannelMode::Fixed, env, &m.restricted, &table);
    std::string key;
    for (std::size_t i = 0; i < nn.nodes.size(); ++i) {
      if (i) key += " | ";
      key += m.topology.locations[i].name;
      key += ": ";
      std::vector<std::string> parts;
      for (const auto& b : nn.nodes[i]) parts.push_back(fixed.fixed(b));
      std::sort(parts.begin(), parts.end());
      if (parts.empty()) key += '0';
      for (std::size_t j = 0; j < parts.size(); ++j) {
        if (j) key += " + ";
        key += parts[j];
      }
    }
    if (best.empty() || key < best) best = std::move(key);
  } while (std::next_permutation(perm.begin(), perm.end()));
  nn.key = std::move(best);
  return nn;
}

bool congruent(const NormalNetwork& m, const NormalNetwork& n) {
  return m.network.topology == n.network.topology && m.key == n.key;
}

bool congruent(const Network& m, const Network& n, const Environment& env) {
  return congruent(normalize_network(m, env), normalize_network(n, env));
}

std::set<Channel> barbs(const NormalNetwork& m) {
  std::set<Channel> out;
  for (const auto& node : m.nodes) {
    for (const auto& b : node) {
      if (b.output && !m.network.is_restricted(b.channel)) out.insert(b.channel);
    }
  }
  return out;
}

std::set<Channel> barbs(const Network& m, const Environment& env) {
  return barbs(normalize_network(m, env));
}

std::string canonical_print(const Process& p, const Environment& env) {
  NormalProcess np = normalize_process(p, env);
  if (np.empty()) return "0";
  Printer printer(ChannelMode::Real, env, nullptr);
  std::string out;
  for (std::size_t i = 0; i < np.size(); ++i) {
    if (i) out += " + ";
    std::string k = printer.real(np[i]);
    out += k.substr(1);
  }
  return out;
}

}  // namespace gcwn
