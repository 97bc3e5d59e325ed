#include "gcwn/gcwn.h"

#include <cstdlib>
#include <cstring>
#include <functional>
#include <json.hpp>
#include <set>

#include "gcwn/equivalence.hpp"
#include "gcwn/frontend.hpp"

struct gcwn_model {
  gcwn::SourceModel source;
  gcwn::Environment env;
};

namespace {

using nlohmann::json;
using namespace gcwn;

thread_local std::string last_error;

gcwn_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return GCWN_ERR_SYNTAX;
    case ErrorCode::UnknownNetwork: return GCWN_ERR_UNKNOWN_NETWORK;
    case ErrorCode::OpenExpression:
    case ErrorCode::ArityError:
    case ErrorCode::TypeError:
    case ErrorCode::Overflow:
    case ErrorCode::MalformedMessage:
    case ErrorCode::UnknownPrimitive:
    case ErrorCode::UnknownConstant:
    case ErrorCode::UnguardedRecursion: return GCWN_ERR_EVAL;
    case ErrorCode::BudgetExceeded:
    case ErrorCode::CapExceeded: return GCWN_ERR_BUDGET;
    default: return GCWN_ERR_INVALID_ARGUMENT;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

/// Runs `body`, converting exceptions into status codes.
gcwn_status guarded(const std::function<gcwn_status()>& body) {
  try {
    last_error.clear();
    return body();
  } catch (const ParseError& e) {
    last_error = e.what();
    return e.code() == ErrorCode::SyntaxError ? GCWN_ERR_SYNTAX : status_of(e.code());
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    last_error = std::string("internal: ") + e.what();
    return GCWN_ERR_INTERNAL;
  } catch (...) {
    last_error = "internal: unknown exception";
    return GCWN_ERR_INTERNAL;
  }
}

gcwn_status emit(char** out, const std::string& s) {
  if (!out) throw Error(ErrorCode::InvalidArgument, "null output pointer");
  *out = dup(s);
  if (!*out) throw std::runtime_error("out of memory");
  return GCWN_OK;
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string("null ") + what);
}

const Network& network(const gcwn_model* m, const char* name) {
  require(m, "model");
  require(name, "network name");
  const Network* n = m->source.find_network(name);
  if (!n) throw Error(ErrorCode::UnknownNetwork, std::string("no network named ") + name);
  return *n;
}

Bounds bounds_of(const gcwn_bounds& b) {
  if (b.max_states == 0 || b.max_depth == 0) {
    throw Error(ErrorCode::InvalidArgument, "bounds must be positive");
  }
  return Bounds{b.max_states, b.max_depth, b.strict != 0};
}

BisimOptions bisim_options(const gcwn_model* m, const gcwn_bounds& b) {
  BisimOptions o;
  o.bounds = bounds_of(b);
  if (m->source.universe) o.universe = *m->source.universe;
  return o;
}

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto z = s.find_last_not_of(" \t");
  return s.substr(a, z - a + 1);
}

LocRelation relation_of(const char* text, const Network& a, const Network& b) {
  std::string s = trim(text ? text : "");
  if (s == "id") {
    std::vector<LocPair> out;
    for (const auto& p : a.topology.locations) {
      if (b.topology.contains(p)) out.emplace_back(p, p);
    }
    return make_relation(std::move(out));
  }
  if (s == "all") return make_relation(full_links(a, b));
  std::vector<LocPair> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  };
  auto bad = [&]() -> Error {
    return Error(ErrorCode::InvalidArgument, "relation must look like (p,q),(p,q); got '" + s + "'");
  };
  auto name = [&] {
    skip();
    std::size_t j = i;
    while (j < s.size() && s[j] != ',' && s[j] != ')' && s[j] != '(' && s[j] != ' ') ++j;
    if (j == i) throw bad();
    std::string n = s.substr(i, j - i);
    i = j;
    skip();
    return Location(n);
  };
  if (s.size() >= 2 && s.front() == '{' && s.back() == '}') s = s.substr(1, s.size() - 2);
  skip();
  while (i < s.size()) {
    if (s[i] != '(') throw bad();
    ++i;
    Location p = name();
    if (i >= s.size() || s[i] != ',') throw bad();
    ++i;
    Location q = name();
    if (i >= s.size() || s[i] != ')') throw bad();
    ++i;
    skip();
    out.emplace_back(p, q);
    if (i < s.size()) {
      if (s[i] != ',') throw bad();
      ++i;
      skip();
    }
  }
  return make_relation(std::move(out));
}

json relation_json(const LocRelation& e) {
  json out = json::array();
  for (const auto& [p, q] : e) out.push_back({p.name, q.name});
  return out;
}

gcwn_status verdict_status(Verdict v) {
  switch (v) {
    case Verdict::Related: return GCWN_OK;
    case Verdict::NotRelated: return GCWN_NEGATIVE;
    case Verdict::Inconclusive: return GCWN_INCONCLUSIVE;
  }
  return GCWN_ERR_INTERNAL;
}

// ---------------------------------------------------------------------------
// Reduction sequences

struct TraceReport {
  bool truncated = false;
  bool goal = false;
  bool found = false;
  std::vector<Trace> traces;
};

std::string trace_text(const StateSpace& s, const Trace& t) {
  std::string out = "trace: " + std::to_string(t.labels.size()) + " steps\n";
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    out += "  [" + std::to_string(i) + "] " + display(s.states[t.states[i]]) + "\n";
    if (i < t.labels.size()) out += "      --" + to_string(t.labels[i]) + "-->\n";
  }
  return out;
}

json trace_json(const StateSpace& s, const Trace& t) {
  json states = json::array();
  for (std::size_t i : t.states) states.push_back(display(s.states[i]));
  json labels = json::array();
  for (const auto& l : t.labels) labels.push_back(to_string(l));
  return {{"steps", t.labels.size()}, {"states", states}, {"labels", labels}};
}

/// Maximal reduction sequences by depth-first search, cut at `max_steps`.
void enumerate(const StateSpace& s, std::size_t max_steps, std::size_t limit, TraceReport& r) {
  Trace cur;
  cur.states.push_back(0);
  std::function<void()> dfs = [&] {
    if (r.traces.size() >= limit) return;
    const std::size_t at = cur.states.back();
    if (s.terminal(at) || cur.labels.size() >= max_steps) {
      if (!cur.labels.empty()) r.traces.push_back(cur);
      return;
    }
    for (std::size_t e : s.out[at]) {
      cur.labels.push_back(s.edges[e].label);
      cur.states.push_back(s.edges[e].to);
      dfs();
      cur.labels.pop_back();
      cur.states.pop_back();
    }
  };
  dfs();
}

std::vector<StatePredicate> milestones(const gcwn_model* m, const std::string& spec) {
  std::vector<StatePredicate> out;
  std::size_t i = 0;
  while (i <= spec.size()) {
    std::size_t j = spec.find(',', i);
    if (j == std::string::npos) j = spec.size();
    std::string item = trim(spec.substr(i, j - i));
    i = j + 1;
    if (item.empty()) {
      if (j == spec.size()) break;
      continue;
    }
    std::vector<Location> only;
    if (auto at = item.find('@'); at != std::string::npos) {
      std::string locs = item.substr(at + 1);
      item = trim(item.substr(0, at));
      std::size_t k = 0;
      while (k <= locs.size()) {
        std::size_t z = locs.find('+', k);
        if (z == std::string::npos) z = locs.size();
        std::string loc = trim(locs.substr(k, z - k));
        if (loc.empty()) throw Error(ErrorCode::InvalidArgument, "empty location in milestone");
        only.emplace_back(loc);
        k = z + 1;
      }
    }
    auto target = normalize_network(network(m, item.c_str()), m->env);
    const Environment* env = &m->env;
    out.push_back([target, only, env](const NormalNetwork& s) {
      return s.network.topology == target.network.topology && nodes_match(s, target, *env, only);
    });
  }
  return out;
}

}  // namespace

extern "C" {

const char* gcwn_version(void) { return "1.0.0"; }

const char* gcwn_last_error(void) { return last_error.c_str(); }

void gcwn_free_string(char* s) { std::free(s); }

void gcwn_bounds_init(gcwn_bounds* b) {
  if (!b) return;
  const Bounds d;
  b->max_states = d.max_states;
  b->max_depth = d.max_depth;
  b->strict = 0;
}

void gcwn_reduce_options_init(gcwn_reduce_options* o) {
  if (!o) return;
  *o = gcwn_reduce_options{};
  gcwn_bounds_init(&o->bounds);
  o->max_steps = 20;
  o->max_traces = 50;
}

void gcwn_lts_options_init(gcwn_lts_options* o) {
  if (!o) return;
  *o = gcwn_lts_options{};
  gcwn_bounds_init(&o->bounds);
}

void gcwn_bisim_options_init(gcwn_bisim_options* o) {
  if (!o) return;
  *o = gcwn_bisim_options{};
  gcwn_bounds_init(&o->bounds);
  o->search_cap = 16;
}

void gcwn_harmony_options_init(gcwn_harmony_options* o) {
  if (!o) return;
  *o = gcwn_harmony_options{};
  gcwn_bounds_init(&o->bounds);
}

void gcwn_probe_options_init(gcwn_probe_options* o) {
  if (!o) return;
  *o = gcwn_probe_options{};
  gcwn_bounds_init(&o->bounds);
  o->trials = 25;
  o->seed = 1;
}

gcwn_status gcwn_model_parse(const char* text, gcwn_model** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "output pointer");
    *out = nullptr;
    auto m = std::make_unique<gcwn_model>();
    m->source = parse(text);
    m->env = m->source.environment();
    *out = m.release();
    return GCWN_OK;
  });
}

gcwn_status gcwn_model_load(const char* path, gcwn_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output pointer");
    *out = nullptr;
    auto m = std::make_unique<gcwn_model>();
    m->source = load(path);
    m->env = m->source.environment();
    *out = m.release();
    return GCWN_OK;
  });
}

void gcwn_model_free(gcwn_model* m) { delete m; }

gcwn_status gcwn_model_print(const gcwn_model* m, char** out) {
  return guarded([&] {
    require(m, "model");
    return emit(out, print(m->source));
  });
}

gcwn_status gcwn_model_networks(const gcwn_model* m, char** out) {
  return guarded([&] {
    require(m, "model");
    std::string s;
    for (const auto& n : m->source.networks) s += n.name + "\n";
    return emit(out, s);
  });
}

gcwn_status gcwn_validate(const gcwn_model* m, gcwn_format format, char** out) {
  return guarded([&] {
    require(m, "model");
    const auto diags = validate(m->source);
    if (format == GCWN_FORMAT_JSON) {
      json list = json::array();
      for (const auto& d : diags) {
        list.push_back({{"kind", std::string(to_string(d.kind))}, {"message", d.message}});
      }
      json doc = {{"clean", diags.empty()}, {"diagnostics", list}};
      emit(out, doc.dump(2));
    } else {
      std::string s;
      for (const auto& d : diags) s += std::string(to_string(d.kind)) + ": " + d.message + "\n";
      if (diags.empty()) s = "ok: " + std::to_string(m->source.networks.size()) + " networks, " +
                             std::to_string(m->source.definitions.size()) + " definitions\n";
      emit(out, s);
    }
    return diags.empty() ? GCWN_OK : GCWN_NEGATIVE;
  });
}

gcwn_status gcwn_barbs(const gcwn_model* m, const char* net, gcwn_format format, char** out) {
  return guarded([&] {
    const auto bs = barbs(network(m, net), m->env);
    if (format == GCWN_FORMAT_JSON) {
      json list = json::array();
      for (const auto& c : bs) list.push_back(c.name);
      return emit(out, json{{"network", net}, {"barbs", list}}.dump(2));
    }
    std::string s = "{";
    for (auto it = bs.begin(); it != bs.end(); ++it) {
      if (it != bs.begin()) s += ", ";
      s += it->name;
    }
    return emit(out, s + "}\n");
  });
}

gcwn_status gcwn_reduce(const gcwn_model* m, const char* net, const gcwn_reduce_options* o,
                        char** out) {
  return guarded([&] {
    require(o, "options");
    const Network& n = network(m, net);
    StateSpace s = explore(n, m->env, bounds_of(o->bounds));
    TraceReport r;
    r.truncated = s.truncated;
    std::vector<StatePredicate> stages;
    if (o->through) stages = milestones(m, o->through);
    if (o->find_barb) {
      Channel c(o->find_barb);
      stages.push_back([c](const NormalNetwork& x) { return barbs(x).count(c) > 0; });
    }
    if (o->find_terminal) {
      std::set<std::string> terminal;
      for (std::size_t i = 0; i < s.states.size(); ++i) {
        if (s.terminal(i) && std::find(s.frontier.begin(), s.frontier.end(), i) == s.frontier.end()) {
          terminal.insert(s.states[i].key);
        }
      }
      stages.push_back([terminal](const NormalNetwork& x) { return terminal.count(x.key) > 0; });
    }
    r.goal = !stages.empty();
    if (r.goal) {
      if (auto t = find_trace(s, stages, o->max_steps ? o->max_steps : SIZE_MAX)) {
        r.found = true;
        r.traces.push_back(*t);
      }
    } else {
      enumerate(s, o->max_steps ? o->max_steps : SIZE_MAX, o->max_traces ? o->max_traces : SIZE_MAX,
                r);
    }
    gcwn_status st = GCWN_OK;
    if (r.goal && !r.found) st = r.truncated ? GCWN_INCONCLUSIVE : GCWN_NEGATIVE;
    if (o->format == GCWN_FORMAT_JSON) {
      json traces = json::array();
      for (const auto& t : r.traces) traces.push_back(trace_json(s, t));
      json doc = {{"network", net},           {"states", s.states.size()},
                  {"truncated", r.truncated}, {"goal", r.goal},
                  {"found", r.found},         {"traces", traces}};
      emit(out, doc.dump(2));
    } else {
      std::string text = "explored: " + std::to_string(s.states.size()) + " states" +
                         (r.truncated ? " (truncated)" : "") + "\n";
      if (r.goal && !r.found) text += "no trace reaches the goal\n";
      if (!r.goal) text += "sequences: " + std::to_string(r.traces.size()) + "\n";
      for (const auto& t : r.traces) text += trace_text(s, t);
      emit(out, text);
    }
    return st;
  });
}

gcwn_status gcwn_lts(const gcwn_model* m, const char* net, const gcwn_lts_options* o,
                     char** out) {
  return guarded([&] {
    require(o, "options");
    const Network& n = network(m, net);
    TransitionOptions t;
    if (o->open) {
      t.mode = Mode::Open;
      t.universe = payload_universe({&n}, m->env,
                                    m->source.universe ? *m->source.universe : std::vector<Value>{});
    }
    StateSpace s = explore(n, m->env, bounds_of(o->bounds), t);
    emit(out, o->dot ? to_dot(s) : to_tree(s));
    return s.truncated ? GCWN_INCONCLUSIVE : GCWN_OK;
  });
}

gcwn_status gcwn_bisim(const gcwn_model* m, const char* left, const char* right,
                       const gcwn_bisim_options* o, char** out) {
  return guarded([&] {
    require(o, "options");
    const Network& a = network(m, left);
    const Network& b = network(m, right);
    BisimOptions opts = bisim_options(m, o->bounds);
    std::optional<SearchResult> search;
    LocRelation e;
    if (!o->barbed && o->search) {
      search = search_E(a, b, m->env, opts, o->search_cap);
      if (!search->relation) {
        json doc = {{"kind", "weak"},
                    {"search", true},
                    {"verdict", std::string(to_string(search->verdict))},
                    {"candidates_tried", search->candidates_tried}};
        std::string text = "bisim\n  kind: weak\n  search: no relation found\n  verdict: " +
                           std::string(to_string(search->verdict)) + "\n  candidates tried: " +
                           std::to_string(search->candidates_tried) + "\n";
        emit(out, o->format == GCWN_FORMAT_JSON ? doc.dump(2) : text);
        return verdict_status(search->verdict);
      }
      e = *search->relation;
    } else if (!o->barbed) {
      if (!o->relation) throw Error(ErrorCode::InvalidArgument, "a relation or search is required");
      e = relation_of(o->relation, a, b);
    }
    BisimResult r = o->barbed ? weak_barbed_bisim(a, b, m->env, opts)
                              : weak_bisim(a, e, b, m->env, opts);
    std::string why;
    bool verified = false;
    if (r.verdict == Verdict::Related) verified = verify_witness(r, &why);
    if (r.verdict == Verdict::NotRelated) verified = verify_certificate(r, &why);
    if (o->format == GCWN_FORMAT_JSON) {
      json witness = json::array();
      for (const auto& p : r.witness) witness.push_back({p.left, p.right});
      json cert = json::array();
      for (const auto& ref : r.certificate) {
        json item = {{"pair", {ref.pair.left, ref.pair.right}},
                     {"rank", ref.rank},
                     {"challenger", ref.swapped ? "right" : "left"}};
        if (ref.kind == Refutation::Kind::Barb) {
          item["barb"] = ref.barb.name;
        } else {
          item["move"] = to_string(ref.label);
          item["target"] = ref.target;
          json answers = json::array();
          for (const auto& q : ref.responses) answers.push_back({q.left, q.right});
          item["answers"] = answers;
        }
        cert.push_back(item);
      }
      json play = json::array();
      for (const auto& p : r.play) {
        json step = {{"challenger", p.swapped ? "right" : "left"}, {"move", p.move}};
        if (p.move.rfind("barb ", 0) != 0) step["target"] = p.target;
        if (p.answer) step["answer"] = {p.answer->left, p.answer->right};
        play.push_back(step);
      }
      json doc = {{"kind", r.barbed ? "weak-barbed" : "weak"},
                  {"verdict", std::string(to_string(r.verdict))},
                  {"left_states", r.left.states.size()},
                  {"right_states", r.right.states.size()},
                  {"truncated", r.left.truncated || r.right.truncated},
                  {"iterations", r.iterations},
                  {"verified", verified},
                  {"witness", witness},
                  {"certificate", cert},
                  {"play", play},
                  {"report", serialize(r)}};
      if (!r.barbed) doc["relation"] = relation_json(r.relation);
      if (search) {
        doc["search"] = true;
        doc["mandatory"] = relation_json(search->mandatory);
        doc["candidates_tried"] = search->candidates_tried;
      }
      if (!r.note.empty()) doc["note"] = r.note;
      if (!why.empty()) doc["verification_failure"] = why;
      emit(out, doc.dump(2));
    } else {
      std::string text = serialize(r);
      if (search) {
        text += "  search: smallest relation after " + std::to_string(search->candidates_tried) +
                " candidates\n";
      }
      if (r.verdict != Verdict::Inconclusive) {
        text += std::string("  verified: ") + (verified ? "yes" : "no, " + why) + "\n";
      }
      emit(out, text);
    }
    if (r.verdict != Verdict::Inconclusive && !verified) {
      throw std::runtime_error("independent verification failed: " + why);
    }
    return verdict_status(r.verdict);
  });
}

gcwn_status gcwn_harmony(const gcwn_model* m, const char* net, const gcwn_harmony_options* o,
                         char** out) {
  return guarded([&] {
    require(o, "options");
    ReductionOptions mutation;
    mutation.drop_last_receiver = o->inject_bug != 0;
    HarmonyReport r = harmony_check(network(m, net), m->env, bounds_of(o->bounds), mutation);
    if (o->format == GCWN_FORMAT_JSON) {
      json ds = json::array();
      for (const auto& d : r.discrepancies) {
        ds.push_back({{"state", d.state},
                      {"reduction_only", d.only_reductions},
                      {"transition_only", d.only_transitions}});
      }
      emit(out, json{{"network", net},
                     {"pass", r.pass},
                     {"states_checked", r.states_checked},
                     {"truncated", r.truncated},
                     {"discrepancies", ds}}
                    .dump(2));
    } else {
      emit(out, to_string(r));
    }
    if (!r.pass) return GCWN_NEGATIVE;
    return r.truncated ? GCWN_INCONCLUSIVE : GCWN_OK;
  });
}

gcwn_status gcwn_probe(const gcwn_model* m, const char* left, const char* right,
                       const gcwn_probe_options* o, char** out) {
  return guarded([&] {
    require(o, "options");
    const Network& a = network(m, left);
    const Network& b = network(m, right);
    if (!o->relation) throw Error(ErrorCode::InvalidArgument, "a relation is required");
    LocRelation e = relation_of(o->relation, a, b);
    ProbeReport r = soundness_probe(a, e, b, m->env, o->trials, o->seed, bisim_options(m, o->bounds));
    if (o->format == GCWN_FORMAT_JSON) {
      json trials = json::array();
      for (const auto& t : r.trials) {
        json restrict_list = json::array();
        for (const auto& c : t.restrictions) restrict_list.push_back(c.name);
        trials.push_back({{"observer", t.observer},
                          {"left_links", relation_json(t.left_links)},
                          {"right_links", relation_json(t.right_links)},
                          {"restrict", restrict_list},
                          {"barbed", std::string(to_string(t.barbed))},
                          {"extension", std::string(to_string(t.extension))}});
      }
      emit(out, json{{"relation", relation_json(e)},
                     {"seed", o->seed},
                     {"precondition", std::string(to_string(r.precondition))},
                     {"failures", r.failures},
                     {"inconclusive", r.inconclusive},
                     {"trials", trials}}
                    .dump(2));
    } else {
      emit(out, to_string(r));
    }
    if (r.precondition != Verdict::Related) return verdict_status(r.precondition);
    if (r.failures) return GCWN_NEGATIVE;
    return r.inconclusive ? GCWN_INCONCLUSIVE : GCWN_OK;
  });
}

}  // extern "C"
