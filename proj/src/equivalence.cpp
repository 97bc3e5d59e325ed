#include "gcwn/equivalence.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace gcwn {

LocRelation make_relation(std::vector<LocPair> pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

LocRelation inverse(const LocRelation& e) {
  std::vector<LocPair> out;
  for (const auto& [p, q] : e) out.emplace_back(q, p);
  return make_relation(std::move(out));
}

std::string to_string(const LocRelation& e) {
  std::string out = "{";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out += ", ";
    out += "(" + e[i].first.name + "," + e[i].second.name + ")";
  }
  return out + "}";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Related: return "Related";
    case Verdict::NotRelated: return "NotRelated";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Greatest fixpoint over pairs of states

struct Move {
  Label label;
  std::size_t target;
};

struct Removal {
  std::size_t rank;
  bool swapped;
  bool barb;
  std::size_t index;  // move index, or position in the barb list
};

class Game {
 public:
  using Candidates = std::function<std::vector<std::size_t>(bool swapped, const Label& label,
                                                            std::size_t responder)>;

  Game(std::size_t na, std::size_t nb) : na_(na), nb_(nb) {
    moves_[0].resize(na);
    moves_[1].resize(nb);
    barbs_[0].resize(na);
    barbs_[1].resize(nb);
  }

  std::vector<Move>& moves(bool swapped, std::size_t s) { return moves_[swapped][s]; }
  const std::vector<Move>& moves(bool swapped, std::size_t s) const { return moves_[swapped][s]; }
  std::vector<Channel>& barbs(bool swapped, std::size_t s) { return barbs_[swapped][s]; }
  const std::vector<Channel>& barbs(bool swapped, std::size_t s) const {
    return barbs_[swapped][s];
  }

  void set_candidates(Candidates c) { candidates_ = std::move(c); }
  /// Barb shown by `challenger` that `responder` never reaches.
  void set_barb_check(std::function<bool(bool, const Channel&, std::size_t)> f) {
    barb_reachable_ = std::move(f);
  }

  const std::vector<std::size_t>& candidates(bool swapped, const Label& label,
                                             std::size_t responder) const {
    auto key = std::make_tuple(swapped, label, responder);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, candidates_(swapped, label, responder)).first;
    return it->second;
  }

  std::size_t solve() {
    in_.assign(na_ * nb_, 1);
    removed_.clear();
    std::size_t rounds = 0;
    if (barb_reachable_) {
      for (std::size_t a = 0; a < na_; ++a) {
        for (std::size_t b = 0; b < nb_; ++b) {
          if (auto r = barb_failure(a, b)) {
            in_[a * nb_ + b] = 0;
            removed_.emplace(StatePair{a, b}, *r);
          }
        }
      }
    }
    for (bool changed = true; changed;) {
      changed = false;
      ++rounds;
      std::vector<std::pair<StatePair, Removal>> now;
      for (std::size_t a = 0; a < na_; ++a) {
        for (std::size_t b = 0; b < nb_; ++b) {
          if (!in_[a * nb_ + b]) continue;
          if (auto r = step_failure(a, b, rounds)) now.emplace_back(StatePair{a, b}, *r);
        }
      }
      for (auto& [p, r] : now) {
        in_[p.left * nb_ + p.right] = 0;
        removed_.emplace(p, r);
        changed = true;
      }
    }
    return rounds;
  }

  bool related(std::size_t a, std::size_t b) const { return in_[a * nb_ + b] != 0; }
  const std::map<StatePair, Removal>& removed() const { return removed_; }
  std::size_t left_size() const { return na_; }
  std::size_t right_size() const { return nb_; }

  std::vector<StatePair> responses(const StatePair& p, const Removal& r) const {
    std::vector<StatePair> out;
    if (r.barb) return out;
    const std::size_t challenger = r.swapped ? p.right : p.left;
    const std::size_t responder = r.swapped ? p.left : p.right;
    const Move& mv = moves(r.swapped, challenger)[r.index];
    for (std::size_t c : candidates(r.swapped, mv.label, responder)) {
      out.push_back(r.swapped ? StatePair{c, mv.target} : StatePair{mv.target, c});
    }
    return out;
  }

 private:
  std::optional<Removal> barb_failure(std::size_t a, std::size_t b) const {
    for (int side = 0; side < 2; ++side) {
      const bool swapped = side == 1;
      const std::size_t x = swapped ? b : a;
      const std::size_t y = swapped ? a : b;
      const auto& bs = barbs(swapped, x);
      for (std::size_t i = 0; i < bs.size(); ++i) {
        if (!barb_reachable_(swapped, bs[i], y)) return Removal{0, swapped, true, i};
      }
    }
    return std::nullopt;
  }

  std::optional<Removal> step_failure(std::size_t a, std::size_t b, std::size_t rank) const {
    for (int side = 0; side < 2; ++side) {
      const bool swapped = side == 1;
      const std::size_t x = swapped ? b : a;
      const std::size_t y = swapped ? a : b;
      const auto& ms = moves(swapped, x);
      for (std::size_t i = 0; i < ms.size(); ++i) {
        bool answered = false;
        for (std::size_t c : candidates(swapped, ms[i].label, y)) {
          if (swapped ? related(c, ms[i].target) : related(ms[i].target, c)) {
            answered = true;
            break;
          }
        }
        if (!answered) return Removal{rank, swapped, false, i};
      }
    }
    return std::nullopt;
  }

  std::size_t na_, nb_;
  std::vector<std::vector<Move>> moves_[2];
  std::vector<std::vector<Channel>> barbs_[2];
  Candidates candidates_;
  std::function<bool(bool, const Channel&, std::size_t)> barb_reachable_;
  mutable std::map<std::tuple<bool, Label, std::size_t>, std::vector<std::size_t>> cache_;
  std::vector<char> in_;
  std::map<StatePair, Removal> removed_;
};

void finish_related(BisimResult& result, std::vector<StatePair> pairs, std::size_t rounds) {
  result.iterations = rounds;
  result.witness = std::move(pairs);
  const bool truncated = result.left.truncated || result.right.truncated;
  result.verdict = truncated ? Verdict::Inconclusive : Verdict::Related;
  if (truncated) result.note = "state space truncated";
}

void finish(BisimResult& result, const Game& game, std::size_t rounds) {
  result.iterations = rounds;
  const bool truncated = result.left.truncated || result.right.truncated;
  const StatePair init{0, 0};
  if (game.related(0, 0)) {
    for (std::size_t a = 0; a < game.left_size(); ++a) {
      for (std::size_t b = 0; b < game.right_size(); ++b) {
        if (game.related(a, b)) result.witness.push_back({a, b});
      }
    }
    result.verdict = truncated ? Verdict::Inconclusive : Verdict::Related;
  } else {
    std::set<StatePair> seen{init};
    std::deque<StatePair> todo{init};
    while (!todo.empty()) {
      StatePair p = todo.front();
      todo.pop_front();
      const Removal& r = game.removed().at(p);
      Refutation ref;
      ref.pair = p;
      ref.rank = r.rank;
      ref.swapped = r.swapped;
      const std::size_t challenger = r.swapped ? p.right : p.left;
      if (r.barb) {
        ref.kind = Refutation::Kind::Barb;
        ref.barb = game.barbs(r.swapped, challenger)[r.index];
      } else {
        const Move& mv = game.moves(r.swapped, challenger)[r.index];
        ref.kind = Refutation::Kind::Step;
        ref.label = mv.label;
        ref.target = mv.target;
        ref.responses = game.responses(p, r);
        for (const auto& q : ref.responses) {
          if (seen.insert(q).second) todo.push_back(q);
        }
      }
      result.certificate.push_back(std::move(ref));
    }
    std::sort(result.certificate.begin(), result.certificate.end(),
              [](const Refutation& a, const Refutation& b) { return a.pair < b.pair; });
    // Principal play: follow the first answer until the responder is stuck.
    StatePair cur = init;
    for (std::size_t guard = 0; guard <= game.removed().size(); ++guard) {
      const Removal& r = game.removed().at(cur);
      PlayStep step;
      step.swapped = r.swapped;
      const std::size_t challenger = r.swapped ? cur.right : cur.left;
      if (r.barb) {
        step.move = "barb " + game.barbs(r.swapped, challenger)[r.index].name;
        result.play.push_back(step);
        break;
      }
      const Move& mv = game.moves(r.swapped, challenger)[r.index];
      step.move = to_string(mv.label);
      step.target = mv.target;
      auto answers = game.responses(cur, r);
      if (!answers.empty()) {
        // Prefer the answer refuted earliest, which shortens the play.
        step.answer = *std::min_element(answers.begin(), answers.end(),
                                        [&](const StatePair& a, const StatePair& b) {
                                          return game.removed().at(a).rank <
                                                 game.removed().at(b).rank;
                                        });
      }
      result.play.push_back(step);
      if (!step.answer) break;
      cur = *step.answer;
    }
    result.verdict = truncated ? Verdict::Inconclusive : Verdict::NotRelated;
  }
  if (truncated) result.note = "state space truncated";
}

std::vector<std::vector<std::size_t>> reach_lists(const StateSpace& s) {
  auto bits = reachability(s);
  std::vector<std::vector<std::size_t>> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    for (std::size_t j = 0; j < bits.size(); ++j) {
      if (bits[i][j]) out[i].push_back(j);
    }
  }
  return out;
}

std::vector<Move> reduction_moves(const StateSpace& s, std::size_t state) {
  std::vector<Move> out;
  std::set<std::size_t> targets;
  for (std::size_t e : s.out[state]) {
    if (targets.insert(s.edges[e].to).second) out.push_back({s.edges[e].label, s.edges[e].to});
  }
  return out;
}

std::vector<Move> labelled_moves(const StateSpace& s, std::size_t state) {
  std::vector<Move> out;
  for (std::size_t e : s.out[state]) out.push_back({s.edges[e].label, s.edges[e].to});
  return out;
}

Label at(const Label& l, const Location& q) {
  Label r = l;
  r.location = q;
  return r;
}

struct WeakSetup {
  const StateSpace* left;
  const StateSpace* right;
  WeakRelations wl;
  WeakRelations wr;
};

Game weak_game(const WeakSetup& ws, const LocRelation& e) {
  Game game(ws.left->states.size(), ws.right->states.size());
  for (std::size_t a = 0; a < ws.left->states.size(); ++a) {
    game.moves(false, a) = labelled_moves(*ws.left, a);
  }
  for (std::size_t b = 0; b < ws.right->states.size(); ++b) {
    game.moves(true, b) = labelled_moves(*ws.right, b);
  }
  std::map<Location, std::vector<Location>> fwd, bwd;
  for (const auto& [p, q] : e) {
    fwd[p].push_back(q);
    bwd[q].push_back(p);
  }
  game.set_candidates([&ws, fwd, bwd](bool swapped, const Label& label, std::size_t y) {
    const WeakRelations& w = swapped ? ws.wl : ws.wr;
    if (label.is_tau()) return w.tau_star[y];
    std::set<std::size_t> out;
    const auto& partners = swapped ? bwd : fwd;
    auto it = partners.find(label.location);
    if (it == partners.end()) return std::vector<std::size_t>{};
    for (const auto& q : it->second) {
      auto jt = w.weak[y].find(at(label, q));
      if (jt != w.weak[y].end()) out.insert(jt->second.begin(), jt->second.end());
    }
    return std::vector<std::size_t>(out.begin(), out.end());
  });
  return game;
}

std::vector<Value> shared_universe(const Network& m, const Network& n, const Environment& env,
                                   const BisimOptions& opts) {
  return payload_universe({&m, &n}, env, opts.universe);
}

void check_domain(const Network& m, const LocRelation& e, const Network& n) {
  for (const auto& [p, q] : e) {
    if (!m.topology.contains(p) || !n.topology.contains(q)) {
      throw Error(ErrorCode::DomainError,
                  "pair (" + p.name + "," + q.name + ") is not in |M| x |N|");
    }
  }
}

// Signature refinement over the disjoint union of two saturated systems:
// each state's moves are (label, target) pairs already closed under tau*.
using Moves = std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>;

std::vector<std::uint32_t> refine(std::vector<std::uint32_t> block, const Moves& moves,
                                  std::size_t& rounds) {
  std::size_t count = std::set<std::uint32_t>(block.begin(), block.end()).size();
  for (;;) {
    ++rounds;
    std::map<std::pair<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>>,
             std::uint32_t>
        ids;
    std::vector<std::uint32_t> next(block.size());
    for (std::size_t s = 0; s < block.size(); ++s) {
      std::vector<std::pair<std::uint32_t, std::uint32_t>> sig;
      sig.reserve(moves[s].size());
      for (const auto& [l, t] : moves[s]) sig.emplace_back(l, block[t]);
      std::sort(sig.begin(), sig.end());
      sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
      auto key = std::make_pair(block[s], std::move(sig));
      next[s] = ids.emplace(std::move(key), static_cast<std::uint32_t>(ids.size())).first->second;
    }
    block = std::move(next);
    if (ids.size() == count) return block;
    count = ids.size();
  }
}

std::vector<StatePair> same_block(const std::vector<std::uint32_t>& block, std::size_t na) {
  std::map<std::uint32_t, std::vector<std::size_t>> right;
  for (std::size_t j = na; j < block.size(); ++j) right[block[j]].push_back(j - na);
  std::vector<StatePair> out;
  for (std::size_t i = 0; i < na; ++i) {
    auto it = right.find(block[i]);
    if (it == right.end()) continue;
    for (std::size_t j : it->second) out.push_back({i, j});
  }
  return out;
}

/// Component names of E when every connected component is a full
/// product A x B; locations outside E get a name of their own.
std::optional<std::pair<std::map<Location, std::string>, std::map<Location, std::string>>>
rectangular_components(const LocRelation& e, const Network& m, const Network& n) {
  std::map<std::string, std::string> parent;
  std::function<std::string(const std::string&)> root = [&](const std::string& x) {
    auto it = parent.find(x);
    if (it == parent.end() || it->second == x) return x;
    return it->second = root(it->second);
  };
  for (const auto& [p, q] : e) {
    std::string a = root("L" + p.name), b = root("R" + q.name);
    parent.emplace(a, a);
    parent.emplace(b, b);
    if (a != b) parent[a] = b;
  }
  std::map<std::string, std::pair<std::size_t, std::size_t>> sizes;
  std::map<Location, std::string> left, right;
  for (const auto& p : m.topology.locations) {
    std::string k = "L" + p.name;
    if (!parent.count(k)) {
      left[p] = "only-left " + p.name;
      continue;
    }
    left[p] = root(k);
    ++sizes[left[p]].first;
  }
  for (const auto& q : n.topology.locations) {
    std::string k = "R" + q.name;
    if (!parent.count(k)) {
      right[q] = "only-right " + q.name;
      continue;
    }
    right[q] = root(k);
    ++sizes[right[q]].second;
  }
  std::map<std::string, std::size_t> pairs;
  for (const auto& [p, _] : e) ++pairs[left[p]];
  for (const auto& [c, ab] : sizes) {
    if (pairs[c] != ab.first * ab.second) return std::nullopt;
  }
  return std::make_pair(std::move(left), std::move(right));
}

/// Greatest fixpoint of the weak game by refinement, when E permits it.
std::optional<std::vector<StatePair>> weak_fast(const WeakSetup& ws, const LocRelation& e,
                                                const Network& m, const Network& n,
                                                std::size_t& rounds) {
  auto comps = rectangular_components(e, m, n);
  if (!comps) return std::nullopt;
  const std::size_t na = ws.left->states.size();
  const std::size_t nb = ws.right->states.size();
  std::map<std::tuple<Label::Kind, std::string, Channel, Value>, std::uint32_t> labels;
  auto label_id = [&](const Label& l, const std::string& comp) {
    auto key = std::make_tuple(l.kind, comp, l.channel, l.payload);
    return labels.emplace(key, static_cast<std::uint32_t>(labels.size() + 1)).first->second;
  };
  Moves moves(na + nb);
  auto fill = [&](const WeakRelations& w, std::size_t offset,
                  const std::map<Location, std::string>& comp) {
    for (std::size_t s = 0; s < w.tau_star.size(); ++s) {
      auto& out = moves[offset + s];
      for (std::size_t t : w.tau_star[s]) out.emplace_back(0, static_cast<std::uint32_t>(offset + t));
      for (const auto& [l, targets] : w.weak[s]) {
        const std::uint32_t id = label_id(l, comp.at(l.location));
        for (std::size_t t : targets) out.emplace_back(id, static_cast<std::uint32_t>(offset + t));
      }
    }
  };
  fill(ws.wl, 0, comps->first);
  fill(ws.wr, na, comps->second);
  auto block = refine(std::vector<std::uint32_t>(na + nb, 0), moves, rounds);
  return same_block(block, na);
}

}  // namespace

BisimResult weak_barbed_bisim(const Network& m, const Network& n, const Environment& env,
                              const BisimOptions& opts) {
  BisimResult result;
  result.barbed = true;
  result.left = explore(m, env, opts.bounds);
  result.right = explore(n, env, opts.bounds);
  const auto reach_l = reach_lists(result.left);
  const auto reach_r = reach_lists(result.right);
  std::vector<std::set<Channel>> weak_l(reach_l.size()), weak_r(reach_r.size());
  std::vector<std::set<Channel>> strong_l, strong_r;
  for (const auto& s : result.left.states) strong_l.push_back(barbs(s));
  for (const auto& s : result.right.states) strong_r.push_back(barbs(s));
  for (std::size_t i = 0; i < reach_l.size(); ++i) {
    for (std::size_t j : reach_l[i]) weak_l[i].insert(strong_l[j].begin(), strong_l[j].end());
  }
  for (std::size_t i = 0; i < reach_r.size(); ++i) {
    for (std::size_t j : reach_r[i]) weak_r[i].insert(strong_r[j].begin(), strong_r[j].end());
  }

  Game game(reach_l.size(), reach_r.size());
  for (std::size_t a = 0; a < reach_l.size(); ++a) {
    game.moves(false, a) = reduction_moves(result.left, a);
    game.barbs(false, a).assign(strong_l[a].begin(), strong_l[a].end());
  }
  for (std::size_t b = 0; b < reach_r.size(); ++b) {
    game.moves(true, b) = reduction_moves(result.right, b);
    game.barbs(true, b).assign(strong_r[b].begin(), strong_r[b].end());
  }
  game.set_candidates([&](bool swapped, const Label&, std::size_t y) {
    return swapped ? reach_l[y] : reach_r[y];
  });
  game.set_barb_check([&](bool swapped, const Channel& c, std::size_t y) {
    return swapped ? weak_l[y].count(c) > 0 : weak_r[y].count(c) > 0;
  });

  // Verdict by refinement; the game is replayed only to explain a refusal.
  const std::size_t na = reach_l.size();
  std::map<std::set<Channel>, std::uint32_t> barb_ids;
  std::vector<std::uint32_t> initial;
  Moves moves(na + reach_r.size());
  for (std::size_t i = 0; i < na; ++i) {
    initial.push_back(barb_ids.emplace(weak_l[i], barb_ids.size()).first->second);
    for (std::size_t t : reach_l[i]) moves[i].emplace_back(0, static_cast<std::uint32_t>(t));
  }
  for (std::size_t j = 0; j < reach_r.size(); ++j) {
    initial.push_back(barb_ids.emplace(weak_r[j], barb_ids.size()).first->second);
    for (std::size_t t : reach_r[j]) moves[na + j].emplace_back(0, static_cast<std::uint32_t>(na + t));
  }
  std::size_t rounds = 0;
  auto block = refine(std::move(initial), moves, rounds);
  if (block[0] == block[na]) {
    finish_related(result, same_block(block, na), rounds);
  } else {
    finish(result, game, game.solve());
    if (game.related(0, 0)) throw std::logic_error("refinement and game disagree");
  }
  return result;
}

BisimResult weak_bisim(const Network& m, const LocRelation& e, const Network& n,
                       const Environment& env, const BisimOptions& opts) {
  check_domain(m, e, n);
  BisimResult result;
  result.relation = make_relation(e);
  TransitionOptions topts{Mode::Open, shared_universe(m, n, env, opts)};
  result.left = explore(m, env, opts.bounds, topts);
  result.right = explore(n, env, opts.bounds, topts);
  WeakSetup ws{&result.left, &result.right, weak_closure(result.left), weak_closure(result.right)};
  std::size_t rounds = 0;
  auto fast = weak_fast(ws, result.relation, m, n, rounds);
  const bool fast_related =
      fast && std::binary_search(fast->begin(), fast->end(), StatePair{0, 0});
  if (fast_related) {
    finish_related(result, std::move(*fast), rounds);
  } else {
    Game game = weak_game(ws, result.relation);
    finish(result, game, game.solve());
    if (fast && game.related(0, 0)) throw std::logic_error("refinement and game disagree");
  }
  if (result.left.skipped_inputs || result.right.skipped_inputs) {
    if (!result.note.empty()) result.note += "; ";
    result.note += "inputs skipped for payloads the receiver cannot process";
  }
  return result;
}

// ---------------------------------------------------------------------------
// Independent verification

namespace {

/// Memoized closures and barbs, recomputed from the edge lists.
class Recheck {
 public:
  explicit Recheck(const BisimResult& r) : r_(r) {}

  const std::set<std::size_t>& closure(const StateSpace& s, std::size_t from, bool tau_only) {
    auto key = std::make_tuple(&s, from, tau_only);
    auto it = closures_.find(key);
    if (it != closures_.end()) return it->second;
    std::set<std::size_t> seen{from};
    std::vector<std::size_t> stack{from};
    while (!stack.empty()) {
      std::size_t cur = stack.back();
      stack.pop_back();
      for (std::size_t k : s.out[cur]) {
        const auto& e = s.edges[k];
        if (tau_only && !e.label.is_tau()) continue;
        if (seen.insert(e.to).second) stack.push_back(e.to);
      }
    }
    return closures_.emplace(key, std::move(seen)).first->second;
  }

  const std::set<Channel>& barbs_of(const StateSpace& s, std::size_t state) {
    auto key = std::make_pair(&s, state);
    auto it = barbs_.find(key);
    if (it != barbs_.end()) return it->second;
    return barbs_.emplace(key, barbs(s.states[state])).first->second;
  }

  std::set<std::size_t> weak_targets(const StateSpace& s, std::size_t from, const Label& l) {
    std::set<std::size_t> out;
    for (std::size_t mid : closure(s, from, true)) {
      for (std::size_t k : s.out[mid]) {
        const auto& e = s.edges[k];
        if (!(e.label == l)) continue;
        const auto& after = closure(s, e.to, true);
        out.insert(after.begin(), after.end());
      }
    }
    return out;
  }

  /// Admissible answers to a challenge.
  std::set<std::size_t> answers(bool swapped, const Label& label, std::size_t responder) {
    const StateSpace& resp = swapped ? r_.left : r_.right;
    if (r_.barbed) return closure(resp, responder, false);
    if (label.is_tau()) return closure(resp, responder, true);
    std::set<std::size_t> out;
    for (const auto& [p, q] : r_.relation) {
      const Location& from = swapped ? q : p;
      const Location& to = swapped ? p : q;
      if (from != label.location) continue;
      auto t = weak_targets(resp, responder, at(label, to));
      out.insert(t.begin(), t.end());
    }
    return out;
  }

 private:
  const BisimResult& r_;
  std::map<std::tuple<const StateSpace*, std::size_t, bool>, std::set<std::size_t>> closures_;
  std::map<std::pair<const StateSpace*, std::size_t>, std::set<Channel>> barbs_;
};

bool fail(std::string* why, std::string msg) {
  if (why) *why = std::move(msg);
  return false;
}

std::string pair_str(const StatePair& p) {
  return "(s" + std::to_string(p.left) + ",t" + std::to_string(p.right) + ")";
}

}  // namespace

bool verify_witness(const BisimResult& r, std::string* why) {
  if (r.verdict != Verdict::Related) return fail(why, "verdict is not Related");
  std::set<StatePair> rel(r.witness.begin(), r.witness.end());
  if (!rel.count({0, 0})) return fail(why, "initial pair missing");
  Recheck re(r);
  for (const auto& p : rel) {
    for (int side = 0; side < 2; ++side) {
      const bool swapped = side == 1;
      const StateSpace& chal = swapped ? r.right : r.left;
      const StateSpace& resp = swapped ? r.left : r.right;
      const std::size_t x = swapped ? p.right : p.left;
      const std::size_t y = swapped ? p.left : p.right;
      if (r.barbed) {
        for (const auto& c : re.barbs_of(chal, x)) {
          bool found = false;
          for (std::size_t t : re.closure(resp, y, false)) {
            if (re.barbs_of(resp, t).count(c)) {
              found = true;
              break;
            }
          }
          if (!found) return fail(why, pair_str(p) + ": barb " + c.name + " not matched");
        }
      }
      for (std::size_t k : chal.out[x]) {
        const auto& e = chal.edges[k];
        bool matched = false;
        for (std::size_t t : re.answers(swapped, e.label, y)) {
          StatePair q = swapped ? StatePair{t, e.to} : StatePair{e.to, t};
          if (rel.count(q)) {
            matched = true;
            break;
          }
        }
        if (!matched) return fail(why, pair_str(p) + ": move " + to_string(e.label) + " unmatched");
      }
    }
  }
  return true;
}

bool verify_certificate(const BisimResult& r, std::string* why) {
  if (r.verdict != Verdict::NotRelated) return fail(why, "verdict is not NotRelated");
  std::map<StatePair, const Refutation*> table;
  for (const auto& ref : r.certificate) table[ref.pair] = &ref;
  if (!table.count({0, 0})) return fail(why, "initial pair not refuted");
  Recheck re(r);
  for (const auto& ref : r.certificate) {
    const StateSpace& chal = ref.swapped ? r.right : r.left;
    const StateSpace& resp = ref.swapped ? r.left : r.right;
    const std::size_t x = ref.swapped ? ref.pair.right : ref.pair.left;
    const std::size_t y = ref.swapped ? ref.pair.left : ref.pair.right;
    if (x >= chal.states.size() || y >= resp.states.size()) {
      return fail(why, pair_str(ref.pair) + ": state out of range");
    }
    if (ref.kind == Refutation::Kind::Barb) {
      if (!r.barbed || !barbs(chal.states[x]).count(ref.barb)) {
        return fail(why, pair_str(ref.pair) + ": challenger lacks barb " + ref.barb.name);
      }
      for (std::size_t t : re.closure(resp, y, false)) {
        if (re.barbs_of(resp, t).count(ref.barb)) {
          return fail(why, pair_str(ref.pair) + ": responder reaches barb " + ref.barb.name);
        }
      }
      continue;
    }
    bool edge_ok = false;
    for (std::size_t k : chal.out[x]) {
      const auto& e = chal.edges[k];
      edge_ok = edge_ok || (e.to == ref.target &&
                            (r.barbed || e.label == ref.label));
    }
    if (!edge_ok) return fail(why, pair_str(ref.pair) + ": challenge is not a transition");
    std::set<StatePair> expected;
    for (std::size_t t : re.answers(ref.swapped, ref.label, y)) {
      expected.insert(ref.swapped ? StatePair{t, ref.target} : StatePair{ref.target, t});
    }
    std::set<StatePair> given(ref.responses.begin(), ref.responses.end());
    if (expected != given) return fail(why, pair_str(ref.pair) + ": answer set differs");
    for (const auto& q : given) {
      auto it = table.find(q);
      if (it == table.end() || it->second->rank >= ref.rank) {
        return fail(why, pair_str(ref.pair) + ": answer " + pair_str(q) + " not refuted earlier");
      }
    }
  }
  return true;
}

std::string serialize(const BisimResult& r) {
  std::string out = "bisim\n";
  out += std::string("  kind: ") + (r.barbed ? "weak-barbed" : "weak") + "\n";
  out += "  verdict: " + std::string(to_string(r.verdict)) + "\n";
  if (!r.barbed) out += "  relation: " + to_string(r.relation) + "\n";
  if (!r.note.empty()) out += "  note: " + r.note + "\n";
  out += "  iterations: " + std::to_string(r.iterations) + "\n";
  auto states = [&](const char* name, const char* prefix, const StateSpace& s) {
    out += std::string("  ") + name + ": " + std::to_string(s.states.size()) + " states" +
           (s.truncated ? " (truncated)" : "") + "\n";
    for (std::size_t i = 0; i < s.states.size(); ++i) {
      out += std::string("    ") + prefix + std::to_string(i) + ": " + s.states[i].key + "\n";
    }
  };
  states("left", "s", r.left);
  states("right", "t", r.right);
  if (r.verdict == Verdict::Related || !r.witness.empty()) {
    out += "  witness: " + std::to_string(r.witness.size()) + " pairs\n";
    for (const auto& p : r.witness) out += "    " + pair_str(p) + "\n";
  }
  if (!r.certificate.empty()) {
    out += "  certificate: " + std::to_string(r.certificate.size()) + " refutations\n";
    for (const auto& ref : r.certificate) {
      out += "    " + pair_str(ref.pair) + " rank " + std::to_string(ref.rank) + " " +
             (ref.swapped ? "right" : "left") + " ";
      if (ref.kind == Refutation::Kind::Barb) {
        out += "barb " + ref.barb.name + " unreachable\n";
        continue;
      }
      out += to_string(ref.label) + " -> " + (ref.swapped ? "t" : "s") +
             std::to_string(ref.target) + " answers:";
      if (ref.responses.empty()) out += " none";
      for (const auto& q : ref.responses) out += " " + pair_str(q);
      out += "\n";
    }
    out += "  play:\n";
    for (const auto& step : r.play) {
      out += std::string("    ") + (step.swapped ? "right" : "left") + " " + step.move;
      if (step.move.rfind("barb ", 0) == 0) {
        out += ", not reachable by the other side\n";
        continue;
      }
      out += std::string(" -> ") + (step.swapped ? "t" : "s") + std::to_string(step.target);
      out += step.answer ? ", answered by " + pair_str(*step.answer) : ", no answer";
      out += "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relation search

SearchResult search_E(const Network& m, const Network& n, const Environment& env,
                      const BisimOptions& opts, std::size_t cap) {
  const std::size_t size = m.topology.locations.size() * n.topology.locations.size();
  if (size > cap) {
    throw Error(ErrorCode::CapExceeded, std::to_string(size) + " candidate pairs exceed the cap of " +
                                            std::to_string(cap));
  }
  SearchResult out;
  TransitionOptions topts{Mode::Open, shared_universe(m, n, env, opts)};
  StateSpace left = explore(m, env, opts.bounds, topts);
  StateSpace right = explore(n, env, opts.bounds, topts);
  if (left.truncated || right.truncated) return out;
  WeakSetup ws{&left, &right, weak_closure(left), weak_closure(right)};
  auto related = [&](const LocRelation& e) {
    ++out.candidates_tried;
    std::size_t rounds = 0;
    if (auto fast = weak_fast(ws, e, m, n, rounds)) {
      return std::binary_search(fast->begin(), fast->end(), StatePair{0, 0});
    }
    Game g = weak_game(ws, e);
    g.solve();
    return g.related(0, 0);
  };

  LocRelation full = full_links(m, n);
  out.verdict = Verdict::NotRelated;
  // Enlarging E only adds answers, so no subset of a failing E succeeds.
  if (!related(full)) return out;
  std::vector<LocPair> optional;
  for (const auto& p : full) {
    LocRelation without;
    for (const auto& q : full) {
      if (q != p) without.push_back(q);
    }
    if (related(without)) {
      optional.push_back(p);
    } else {
      out.mandatory.push_back(p);
    }
  }
  for (std::size_t k = 0; k <= optional.size(); ++k) {
    std::vector<bool> pick(optional.size(), false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
      LocRelation e = out.mandatory;
      for (std::size_t i = 0; i < optional.size(); ++i) {
        if (pick[i]) e.push_back(optional[i]);
      }
      e = make_relation(std::move(e));
      if (related(e)) {
        out.verdict = Verdict::Related;
        out.relation = e;
        return out;
      }
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adapted triples, extensions and contexts

bool adapted(const std::vector<LocPair>& c, const std::vector<LocPair>& d, const LocRelation& e) {
  std::set<Location> observers;
  for (const auto& [a, _] : c) observers.insert(a);
  for (const auto& [a, _] : d) observers.insert(a);
  const std::set<LocPair> cs(c.begin(), c.end());
  const std::set<LocPair> ds(d.begin(), d.end());
  for (const auto& a : observers) {
    for (const auto& [b, b2] : e) {
      if (cs.count({a, b}) != ds.count({a, b2})) return false;
    }
  }
  return true;
}

std::vector<LocPair> derive_links(const std::vector<LocPair>& c, const LocRelation& e) {
  std::vector<LocPair> d;
  for (const auto& [a, b] : c) {
    for (const auto& [p, q] : e) {
      if (p == b) d.emplace_back(a, q);
    }
  }
  return make_relation(std::move(d));
}

Extension parallel_extend(const Network& o, const std::vector<LocPair>& c, const Network& m,
                          const LocRelation& e, const Network& n, const Environment& env,
                          const std::optional<std::vector<LocPair>>& d) {
  std::vector<LocPair> links = d ? *d : derive_links(c, e);
  if (!adapted(c, links, e)) {
    throw Error(ErrorCode::NotAdapted, "links " + to_string(make_relation(c)) + " and " +
                                           to_string(make_relation(links)) +
                                           " disagree on related locations");
  }
  Extension ext;
  ext.left = network_compose(o, m, c, env);
  ext.right = network_compose(o, n, links, env);
  ext.relation = make_relation(identity_relation(o));
  ext.relation.insert(ext.relation.end(), e.begin(), e.end());
  ext.relation = make_relation(std::move(ext.relation));
  return ext;
}

Context bare_hole(const Location& hole) {
  Context cx;
  cx.surround = make_network(Topology::make({hole}, {}), {{hole, proc::nil()}});
  cx.hole = hole;
  return cx;
}

Network context_apply(const Context& cx, const Network& n, const Environment& env) {
  Topology topology = topology_substitute(cx.surround.topology, n.topology, cx.hole);
  Network rest = cx.surround;
  rest.assignment.erase(cx.hole);
  std::set<Channel> in_rest;
  collect_channels(rest, env, in_rest);
  Network plugged = freshen_restricted(n, in_rest, env);
  std::set<Channel> in_plugged;
  collect_channels(plugged, env, in_plugged);
  rest = freshen_restricted(rest, in_plugged, env);
  Network out;
  out.topology = std::move(topology);
  out.assignment = rest.assignment;
  out.assignment.insert(plugged.assignment.begin(), plugged.assignment.end());
  out.restricted = rest.restricted;
  out.restricted.insert(out.restricted.end(), plugged.restricted.begin(), plugged.restricted.end());
  return network_restrict(out, cx.restrictions);
}

// ---------------------------------------------------------------------------
// Harmony

HarmonyReport harmony_check(const Network& m, const Environment& env, const Bounds& bounds,
                            const ReductionOptions& mutation) {
  HarmonyReport report;
  StateSpace space = explore(m, env, bounds);
  report.truncated = space.truncated;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < space.states.size(); ++i) index[space.states[i].key] = i;
  std::set<std::size_t> frontier(space.frontier.begin(), space.frontier.end());

  // The reduction side walks the written processes it produces itself.
  std::vector<bool> visited(space.states.size(), false);
  std::deque<Network> todo{m};
  visited[0] = true;
  while (!todo.empty()) {
    Network raw = std::move(todo.front());
    todo.pop_front();
    const std::size_t s = index.at(normalize_network(raw, env).key);
    if (frontier.count(s)) continue;
    ++report.states_checked;
    std::map<std::string, Network> reds;
    for (auto& r : reductions(raw, env, mutation)) {
      std::string key = normalize_network(r, env).key;
      reds.emplace(std::move(key), std::move(r));
    }
    std::set<std::string> lts;
    for (std::size_t e : space.out[s]) {
      const auto& edge = space.edges[e];
      if (edge.label.kind != Label::Kind::Input) lts.insert(space.states[edge.to].key);
    }
    HarmonyReport::Discrepancy d;
    d.state = space.states[s].key;
    for (const auto& [key, _] : reds) {
      if (!lts.count(key)) d.only_reductions.push_back(key);
    }
    for (const auto& key : lts) {
      if (!reds.count(key)) d.only_transitions.push_back(key);
    }
    if (!d.only_reductions.empty() || !d.only_transitions.empty()) {
      report.pass = false;
      report.discrepancies.push_back(std::move(d));
    }
    for (auto& [key, r] : reds) {
      auto it = index.find(key);
      if (it == index.end() || visited[it->second]) continue;
      visited[it->second] = true;
      todo.push_back(std::move(r));
    }
  }
  return report;
}

std::string to_string(const HarmonyReport& r) {
  std::string out = "harmony\n";
  out += std::string("  result: ") + (r.pass ? "pass" : "fail") + "\n";
  out += "  states checked: " + std::to_string(r.states_checked) + "\n";
  out += std::string("  truncated: ") + (r.truncated ? "true" : "false") + "\n";
  for (const auto& d : r.discrepancies) {
    out += "  counterexample: " + d.state + "\n";
    for (const auto& k : d.only_reductions) out += "    reduction only: " + k + "\n";
    for (const auto& k : d.only_transitions) out += "    transition only: " + k + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Soundness probe

namespace {

// SplitMix64: portable, so seeded reports are identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::size_t below(std::size_t n) { return n ? static_cast<std::size_t>(next() % n) : 0; }
  bool coin() { return next() & 1; }

 private:
  std::uint64_t state_;
};

std::vector<std::set<Location>> components(const LocRelation& e, bool left) {
  // Connected components of E seen as a bipartite graph; returns the
  // locations of one side per component.
  std::map<std::string, std::string> parent;
  auto key = [](bool l, const Location& p) { return std::string(l ? "L" : "R") + p.name; };
  std::function<std::string(const std::string&)> root = [&](const std::string& x) {
    auto it = parent.find(x);
    if (it == parent.end() || it->second == x) return x;
    return it->second = root(it->second);
  };
  for (const auto& [p, q] : e) {
    std::string a = root(key(true, p)), b = root(key(false, q));
    parent.emplace(a, a);
    parent.emplace(b, b);
    if (a != b) parent[a] = b;
  }
  std::map<std::string, std::set<Location>> groups;
  for (const auto& [p, q] : e) groups[root(key(true, p))].insert(left ? p : q);
  std::vector<std::set<Location>> out;
  for (auto& [_, g] : groups) out.push_back(std::move(g));
  return out;
}

}  // namespace

ProbeReport soundness_probe(const Network& m, const LocRelation& e, const Network& n,
                            const Environment& env, std::size_t trials, std::uint64_t seed,
                            const BisimOptions& opts) {
  ProbeReport report;
  report.precondition = weak_bisim(m, e, n, env, opts).verdict;
  if (report.precondition != Verdict::Related) return report;

  std::set<Channel> cm, cn;
  for (const auto& [_, p] : m.assignment) collect_channels(p, env, cm);
  for (const auto& [_, p] : n.assignment) collect_channels(p, env, cn);
  std::vector<Channel> shared;
  for (const auto& c : cm) {
    if (cn.count(c) && !m.is_restricted(c) && !n.is_restricted(c)) shared.push_back(c);
  }
  std::set<Channel> used = cm;
  used.insert(cn.begin(), cn.end());
  Channel reply("w");
  while (used.count(reply)) reply.name += '\'';
  std::vector<Channel> listen = shared;
  if (listen.empty()) listen.push_back(reply);
  std::vector<Value> values = payload_universe({&m, &n}, env, opts.universe);
  if (values.empty()) values.push_back(Value::integer(0));

  std::set<Location> taken(m.topology.locations.begin(), m.topology.locations.end());
  taken.insert(n.topology.locations.begin(), n.topology.locations.end());
  const auto comps_m = components(e, true);
  const auto comps_n = components(e, false);
  std::set<Location> related_m, related_n;
  for (const auto& [p, q] : e) {
    related_m.insert(p);
    related_n.insert(q);
  }

  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    ProbeTrial trial;
    const std::size_t k = 1 + rng.below(3);
    std::map<Location, Process> nodes;
    std::vector<Location> olocs;
    for (std::size_t i = 1; i <= k; ++i) {
      Location o("o" + std::to_string(i));
      while (taken.count(o)) o.name += '\'';
      olocs.push_back(o);
      const Channel& c = listen[rng.below(listen.size())];
      const Value& v = values[rng.below(values.size())];
      Process p;
      switch (rng.below(3)) {
        case 0: p = proc::input(c, "x", proc::nil()); break;
        case 1: p = proc::output(c, expr::lit(v), proc::nil()); break;
        default:
          p = proc::input(c, "x", proc::output(reply, expr::var("x"), proc::nil()));
          break;
      }
      nodes[o] = p;
    }
    std::vector<LocPair> oedges;
    for (std::size_t i = 0; i + 1 < olocs.size(); ++i) {
      if (rng.coin()) oedges.emplace_back(olocs[i], olocs[i + 1]);
    }
    Network o = make_network(Topology::make(olocs, oedges), nodes);
    {
      std::string desc;
      for (const auto& [loc, p] : nodes) {
        if (!desc.empty()) desc += " | ";
        desc += loc.name + ": " + to_string(p);
      }
      trial.observer = desc;
    }
    for (const auto& a : olocs) {
      for (std::size_t ci = 0; ci < comps_m.size(); ++ci) {
        if (!rng.coin()) continue;
        for (const auto& b : comps_m[ci]) trial.left_links.emplace_back(a, b);
        for (const auto& b : comps_n[ci]) trial.right_links.emplace_back(a, b);
      }
      for (const auto& b : m.topology.locations) {
        if (!related_m.count(b) && rng.coin()) trial.left_links.emplace_back(a, b);
      }
      for (const auto& b : n.topology.locations) {
        if (!related_n.count(b) && rng.coin()) trial.right_links.emplace_back(a, b);
      }
    }
    if (trial.left_links.empty() && trial.right_links.empty() && !comps_m.empty()) {
      const std::size_t ci = rng.below(comps_m.size());
      for (const auto& b : comps_m[ci]) trial.left_links.emplace_back(olocs.front(), b);
      for (const auto& b : comps_n[ci]) trial.right_links.emplace_back(olocs.front(), b);
    }
    trial.left_links = make_relation(trial.left_links);
    trial.right_links = make_relation(trial.right_links);
    if (rng.below(3) == 0) {
      std::vector<Channel> pool = shared;
      pool.push_back(reply);
      trial.restrictions.push_back(pool[rng.below(pool.size())]);
    }
    try {
      Extension ext = parallel_extend(o, trial.left_links, m, e, n, env, trial.right_links);
      trial.extension = weak_bisim(ext.left, ext.relation, ext.right, env, opts).verdict;
      Network lhs = network_restrict(ext.left, trial.restrictions);
      Network rhs = network_restrict(ext.right, trial.restrictions);
      trial.barbed = weak_barbed_bisim(lhs, rhs, env, opts).verdict;
    } catch (const Error&) {
      trial.barbed = trial.extension = Verdict::NotRelated;
    }
    if (trial.barbed == Verdict::NotRelated || trial.extension == Verdict::NotRelated) {
      ++report.failures;
    } else if (trial.barbed == Verdict::Inconclusive || trial.extension == Verdict::Inconclusive) {
      ++report.inconclusive;
    }
    report.trials.push_back(std::move(trial));
  }
  return report;
}

std::string to_string(const ProbeReport& r) {
  std::string out = "probe\n";
  out += "  precondition: " + std::string(to_string(r.precondition)) + "\n";
  out += "  trials: " + std::to_string(r.trials.size()) + "\n";
  out += "  failures: " + std::to_string(r.failures) + "\n";
  out += "  inconclusive: " + std::to_string(r.inconclusive) + "\n";
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    const auto& t = r.trials[i];
    out += "  trial " + std::to_string(i + 1) + "\n";
    out += "    observer: " + t.observer + "\n";
    out += "    left links: " + to_string(t.left_links) + "\n";
    out += "    right links: " + to_string(t.right_links) + "\n";
    out += "    restrict: {";
    for (std::size_t j = 0; j < t.restrictions.size(); ++j) {
      if (j) out += ", ";
      out += t.restrictions[j].name;
    }
    out += "}\n";
    out += "    barbed: " + std::string(to_string(t.barbed)) + "\n";
    out += "    extension: " + std::string(to_string(t.extension)) + "\n";
  }
  return out;
}

}  // namespace gcwn
