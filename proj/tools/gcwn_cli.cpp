#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gcwn/gcwn.h"

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kNegative = 1, kUsage = 2, kInconclusive = 3 };

int exit_code(gcwn_status s) {
  switch (s) {
    case GCWN_OK: return kOk;
    case GCWN_NEGATIVE: return kNegative;
    case GCWN_INCONCLUSIVE:
    case GCWN_ERR_BUDGET: return kInconclusive;
    default: return kUsage;
  }
}

std::string status_name(gcwn_status s) {
  switch (s) {
    case GCWN_OK: return "ok";
    case GCWN_NEGATIVE: return "negative";
    case GCWN_INCONCLUSIVE: return "inconclusive";
    case GCWN_ERR_SYNTAX: return "syntax-error";
    case GCWN_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case GCWN_ERR_UNKNOWN_NETWORK: return "unknown-network";
    case GCWN_ERR_EVAL: return "evaluation-error";
    case GCWN_ERR_BUDGET: return "budget-exceeded";
    case GCWN_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

std::size_t env_size(const char* name, std::size_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  try {
    std::size_t used = 0;
    unsigned long long n = std::stoull(v, &used);
    if (used == std::string(v).size() && n > 0) return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
  }
  std::cerr << "warning: ignoring " << name << "=" << v << "\n";
  return fallback;
}

struct Common {
  std::string file;
  std::size_t max_states = 0;
  std::size_t max_depth = 0;
  bool strict = false;
  bool json = false;
};

/// Owns the model handle and the report string of one run.
class Run {
 public:
  Run(std::string command, const Common& c, std::vector<std::string> argv)
      : command_(std::move(command)), common_(c), argv_(std::move(argv)) {}
  ~Run() {
    gcwn_model_free(model_);
    gcwn_free_string(report_);
  }

  gcwn_bounds bounds() const {
    gcwn_bounds b;
    gcwn_bounds_init(&b);
    b.max_states = common_.max_states;
    b.max_depth = common_.max_depth;
    b.strict = common_.strict ? 1 : 0;
    return b;
  }
  gcwn_format format() const { return common_.json ? GCWN_FORMAT_JSON : GCWN_FORMAT_TEXT; }

  bool load() {
    status_ = gcwn_model_load(common_.file.c_str(), &model_);
    return status_ == GCWN_OK;
  }
  gcwn_model* model() { return model_; }
  char** report() { return &report_; }
  void add_artifact(const std::string& path) { artifacts_.push_back(path); }

  /// Prints the outcome and returns the process exit code.
  int finish(gcwn_status s, bool structured_report) {
    status_ = s;
    const bool failed = s != GCWN_OK && s != GCWN_NEGATIVE && s != GCWN_INCONCLUSIVE;
    const std::string text = report_ ? report_ : "";
    if (common_.json) {
      json doc;
      doc["command"] = command_;
      doc["argv"] = argv_;
      doc["file"] = common_.file;
      doc["bounds"] = {{"max_states", common_.max_states},
                       {"max_depth", common_.max_depth},
                       {"strict", common_.strict}};
      doc["status"] = status_name(s);
      doc["exit_code"] = exit_code(s);
      if (failed) doc["error"] = gcwn_last_error();
      if (!text.empty()) {
        if (structured_report) {
          doc["result"] = json::parse(text, nullptr, false);
        } else {
          doc["result"] = {{"text", text}};
        }
      }
      doc["artifacts"] = artifacts_;
      std::cout << doc.dump(2) << "\n";
    } else {
      std::cout << text;
      if (failed) std::cerr << "error: " << gcwn_last_error() << "\n";
    }
    return exit_code(s);
  }

  int fail_load() { return finish(status_, false); }

 private:
  std::string command_;
  Common common_;
  std::vector<std::string> argv_;
  gcwn_model* model_ = nullptr;
  char* report_ = nullptr;
  gcwn_status status_ = GCWN_OK;
  std::vector<std::string> artifacts_;
};

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based calculus for wireless networks: explore, compare and check models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gcwn_version()));

  Common common;
  common.max_states = env_size("GCWN_MAX_STATES", 50000);
  common.max_depth = env_size("GCWN_MAX_DEPTH", 200);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", common.file, "Model file (.gcwn)")->required()->check(CLI::ExistingFile);
    sub->add_option("--max-states", common.max_states, "State bound (env GCWN_MAX_STATES)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-depth", common.max_depth, "Depth bound (env GCWN_MAX_DEPTH)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--strict", common.strict, "Fail instead of truncating at a bound");
    sub->add_flag("--json", common.json, "Emit one structured JSON document");
  };

  std::string net, left, right, relation, find_barb, through, certificate, output;
  std::string mode = "closed", format = "tree";
  bool find_terminal = false, barbed = false, search = false, inject_bug = false;
  std::size_t max_steps = 20, max_traces = 50, cap = 16, trials = 25;
  std::uint64_t seed = 1;

  auto* validate = app.add_subcommand("validate", "Parse and check a model");
  add_common(validate);

  auto* print = app.add_subcommand("print", "Pretty-print a model");
  add_common(print);

  auto* barbs = app.add_subcommand("barbs", "Barbs of a network");
  add_common(barbs);
  barbs->add_option("net", net, "Network name")->required();

  auto* reduce = app.add_subcommand("reduce", "Reduction sequences of a network");
  add_common(reduce);
  reduce->add_option("net", net, "Network name")->required();
  reduce->add_option("--find-barb", find_barb, "Stop at a state offering this barb");
  reduce->add_flag("--find-terminal", find_terminal, "Stop at a state without reductions");
  reduce->add_option("--through", through,
                     "Milestones NET[@p+q],... the trace must pass in order");
  reduce->add_option("--max-steps", max_steps, "Longest sequence considered");
  reduce->add_option("--max-traces", max_traces, "Sequences listed without a goal");

  auto* lts = app.add_subcommand("lts", "Export the state space of a network");
  add_common(lts);
  lts->add_option("net", net, "Network name")->required();
  lts->add_option("--mode", mode, "closed or open")->check(CLI::IsMember({"closed", "open"}));
  lts->add_option("--format", format, "dot or tree")->check(CLI::IsMember({"dot", "tree"}));
  lts->add_option("-o,--output", output, "Write the export to a file");

  auto* bisim = app.add_subcommand("bisim", "Compare two networks");
  add_common(bisim);
  bisim->add_option("left", left, "Left network")->required();
  bisim->add_option("right", right, "Right network")->required();
  auto* rel = bisim->add_option("--E", relation, "Location relation: (p,q),... or id or all");
  auto* srch = bisim->add_flag("--search-E", search, "Search for a smallest relation");
  auto* brb = bisim->add_flag("--barbed", barbed, "Weak barbed bisimilarity");
  rel->excludes(srch)->excludes(brb);
  srch->excludes(brb);
  bisim->add_option("--cap", cap, "Largest |M|x|N| for the search");
  bisim->add_option("--certificate", certificate, "Write the witness or certificate here");

  auto* harmony = app.add_subcommand("harmony", "Differential check of the two semantics");
  add_common(harmony);
  harmony->add_option("net", net, "Network name")->required();
  harmony->add_flag("--inject-bug", inject_bug)->group("");

  auto* probe = app.add_subcommand("probe", "Sample contexts around a related pair");
  add_common(probe);
  probe->add_option("left", left, "Left network")->required();
  probe->add_option("right", right, "Right network")->required();
  probe->add_option("--E", relation, "Location relation")->required();
  probe->add_option("--trials", trials, "Number of contexts");
  probe->add_option("--seed", seed, "Sampler seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub == bisim && !barbed && !search && relation.empty()) {
    std::cerr << "bisim: one of --E, --search-E or --barbed is required\n";
    return kUsage;
  }
  Run run(sub->get_name(), common, std::vector<std::string>(argv + 1, argv + argc));
  if (!run.load()) return run.fail_load();
  gcwn_model* m = run.model();

  if (sub == validate) return run.finish(gcwn_validate(m, run.format(), run.report()), common.json);
  if (sub == print) return run.finish(gcwn_model_print(m, run.report()), false);
  if (sub == barbs) {
    return run.finish(gcwn_barbs(m, net.c_str(), run.format(), run.report()), common.json);
  }
  if (sub == reduce) {
    gcwn_reduce_options o;
    gcwn_reduce_options_init(&o);
    o.bounds = run.bounds();
    o.format = run.format();
    o.find_barb = find_barb.empty() ? nullptr : find_barb.c_str();
    o.find_terminal = find_terminal;
    o.through = through.empty() ? nullptr : through.c_str();
    o.max_steps = max_steps;
    o.max_traces = max_traces;
    return run.finish(gcwn_reduce(m, net.c_str(), &o, run.report()), common.json);
  }
  if (sub == lts) {
    gcwn_lts_options o;
    gcwn_lts_options_init(&o);
    o.bounds = run.bounds();
    o.open = mode == "open";
    o.dot = format == "dot";
    gcwn_status s = gcwn_lts(m, net.c_str(), &o, run.report());
    if (!output.empty() && *run.report()) {
      if (!write_file(output, *run.report())) {
        std::cerr << "error: cannot write " << output << "\n";
        return kUsage;
      }
      run.add_artifact(output);
    }
    return run.finish(s, false);
  }
  if (sub == bisim) {
    gcwn_bisim_options o;
    gcwn_bisim_options_init(&o);
    o.bounds = run.bounds();
    o.format = run.format();
    o.barbed = barbed;
    o.search = search;
    o.search_cap = cap;
    o.relation = relation.empty() ? nullptr : relation.c_str();
    gcwn_status s = gcwn_bisim(m, left.c_str(), right.c_str(), &o, run.report());
    if (!certificate.empty() && *run.report()) {
      std::string text = *run.report();
      if (common.json) {
        json doc = json::parse(text, nullptr, false);
        if (doc.is_object() && doc.contains("report")) text = doc["report"].get<std::string>();
      }
      if (!write_file(certificate, text)) {
        std::cerr << "error: cannot write " << certificate << "\n";
        return kUsage;
      }
      run.add_artifact(certificate);
    }
    return run.finish(s, common.json);
  }
  if (sub == harmony) {
    gcwn_harmony_options o;
    gcwn_harmony_options_init(&o);
    o.bounds = run.bounds();
    o.format = run.format();
    o.inject_bug = inject_bug;
    return run.finish(gcwn_harmony(m, net.c_str(), &o, run.report()), common.json);
  }
  if (sub == probe) {
    gcwn_probe_options o;
    gcwn_probe_options_init(&o);
    o.bounds = run.bounds();
    o.format = run.format();
    o.relation = relation.c_str();
    o.trials = trials;
    o.seed = seed;
    return run.finish(gcwn_probe(m, left.c_str(), right.c_str(), &o, run.report()), common.json);
  }
  return kUsage;
}
