// grammargen: command-line driver for induction, fitting, sampling and
// evaluation.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "grammargen.hpp"

using namespace grammargen;

namespace {

// Exit codes, one per failure category.
enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kValidation = 4,
  kInvalidArgument = 5,
  kExhausted = 6,
  kHashCollision = 7,
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::io: return kIo;
    case ErrorKind::validation: return kValidation;
    case ErrorKind::invalid_argument: return kInvalidArgument;
    case ErrorKind::exhausted: return kExhausted;
    case ErrorKind::hash_collision: return kHashCollision;
  }
  return kInternal;
}

struct Common {
  std::string config;
  std::string output;
  std::string log_level = "info";
  std::uint64_t seed = 1;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool lenient = false;
  std::size_t min_loop = 3;
  bool no_wobble = false;

  RnaRules rules() const { return RnaRules{min_loop, !no_wobble}; }
};

struct KernelFlags {
  unsigned r_max = 3, d_max = 3, bits = 16;
  KernelParams params() const { return KernelParams{r_max, d_max, bits}; }
};

struct EstimatorFlags {
  double nu = 0.5;
  unsigned epochs = 20;
  double eta0 = 0.5;
  OneClassParams params(std::uint64_t seed, unsigned bits) const { return OneClassParams{nu, epochs, eta0, seed, bits}; }
};

void add_common(CLI::App* sub, Common& c, bool needs_output = true) {
  sub->add_option("--config", c.config, "key=value file; command-line flags take precedence");
  auto* out = sub->add_option("-o,--output", c.output, "output file (a <output>.manifest.json is written next to it)");
  if (needs_output) out->required();
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--log-level", c.log_level, "trace|debug|info|warn|error|off");
  sub->add_flag("--lenient", c.lenient, "skip invalid records instead of failing");
  sub->add_option("--min-loop", c.min_loop, "minimum hairpin loop length for RNA structures");
  sub->add_flag("--no-wobble", c.no_wobble, "disallow G-U pairs");
}

void add_kernel(CLI::App* sub, KernelFlags& k) {
  sub->add_option("--r-max", k.r_max, "kernel neighbourhood radius");
  sub->add_option("--d-max", k.d_max, "kernel pair distance");
  sub->add_option("--feature-bits", k.bits, "log2 of the feature space size");
}

void add_estimator(CLI::App* sub, EstimatorFlags& e) {
  sub->add_option("--nu", e.nu, "one-class nu in (0, 1]");
  sub->add_option("--epochs", e.epochs, "SGD epochs");
  sub->add_option("--eta0", e.eta0, "initial learning rate");
}

json kernel_json(const KernelParams& k) {
  return json{{"max_radius", k.max_radius}, {"max_distance", k.max_distance}, {"feature_bits", k.feature_bits}};
}

json estimator_json(const OneClassParams& p) {
  return json{{"nu", p.nu}, {"epochs", p.epochs}, {"eta0", p.eta0}, {"seed", p.seed}, {"feature_bits", p.feature_bits}};
}

// --- config file -----------------------------------------------------------

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos)
      throw Error(ErrorKind::validation, path + ":" + std::to_string(number) + ": expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

bool truthy(const std::string& v) { return v == "1" || v == "true" || v == "yes" || v == "on"; }

/// Turns config entries into flags for `sub`, skipping keys already given on
/// the command line.
std::vector<std::string> config_arguments(CLI::App* sub, const std::string& path, const std::vector<std::string>& given) {
  std::vector<std::string> out;
  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = "--" + key;
    if (key == "config" || key == "output") continue;
    bool present = false;
    for (const auto& g : given) present = present || g == flag || g.rfind(flag + "=", 0) == 0;
    if (present) continue;
    const CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      throw Error(ErrorKind::invalid_argument, path + ": unknown key '" + key + "' for " + sub->get_name());
    }
    if (opt->get_expected_min() == 0) {
      if (truthy(value)) out.push_back(flag);
    } else {
      out.push_back(flag);
      out.push_back(value);
    }
  }
  return out;
}

// --- manifests and inputs --------------------------------------------------

json input_entry(const std::string& path) {
  const auto text = read_text(path);
  return json{{"path", path}, {"bytes", text.size()}, {"fnv1a", Certificate{hash_string(text)}.hex()}};
}

struct Run {
  std::string command;
  Common common;
  json inputs = json::array();
  json parameters = json::object();
  json results = json::object();
  json skipped = json::array();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write_manifest() const {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json m{{"tool", "grammargen"},
                 {"version", GRAMMARGEN_VERSION},
                 {"command", command},
                 {"inputs", inputs},
                 {"output", common.output},
                 {"seed", common.seed},
                 {"threads", common.threads},
                 {"lenient", common.lenient},
                 {"parameters", parameters},
                 {"results", results},
                 {"skipped", skipped},
                 {"wall_time_s", wall}};
    write_text(common.output + ".manifest.json", m.dump(2) + "\n");
  }
};

Corpus load(Run& run, const std::string& path) {
  run.inputs.push_back(input_entry(path));
  auto corpus = load_corpus(path, run.common.rules(), run.common.lenient);
  for (const auto& e : corpus.errors) {
    spdlog::warn("{}: skipped record {} at line {}: {}", path, e.name, e.line, e.message);
    run.skipped.push_back(json{{"input", path}, {"name", e.name}, {"line", e.line}, {"message", e.message}});
  }
  if (corpus.graphs.empty()) throw Error(ErrorKind::validation, path + ": no usable graphs");
  spdlog::info("{}: {} graphs", path, corpus.graphs.size());
  return corpus;
}

std::vector<CipParams> parse_grid(const std::vector<unsigned>& radii, unsigned thickness, unsigned base_thickness,
                                  bool coarsened) {
  std::vector<CipParams> grid;
  for (unsigned r : radii) {
    CipParams p{r, thickness, base_thickness, coarsened};
    p.validate();
    grid.push_back(p);
  }
  return grid;
}

// --- commands --------------------------------------------------------------

struct InduceFlags {
  std::string corpus;
  std::string coarsener = "none";
  std::vector<unsigned> radii{0, 1};
  unsigned thickness = 1;
  unsigned base_thickness = 2;
  std::size_t min_count = 1;
  bool exact_iso = false;
};

void run_induce(Run& run, const InduceFlags& f) {
  const auto corpus = load(run, f.corpus);
  const bool coarse = f.coarsener != "none";
  std::optional<Coarsener> co;
  if (coarse) co = Coarsener::from_name(f.coarsener);
  const auto grid = parse_grid(f.radii, f.thickness, f.base_thickness, coarse);
  InduceOptions opts{f.min_count, f.exact_iso, run.common.threads};
  const auto gr = induce(corpus.graphs, co ? &*co : nullptr, grid, opts);
  write_grammar(run.common.output, gr);
  json g = json::array();
  for (const auto& p : grid) g.push_back(params_to_json(p));
  run.parameters = {{"coarsener", f.coarsener}, {"grid", g}, {"min_count", f.min_count}, {"exact_iso", f.exact_iso}};
  run.results = {{"productions", gr.size()}, {"interfaces", gr.productions().size()},
                 {"productive_interfaces", gr.productive_interfaces()}};
  spdlog::info("grammar: {} productions, {} interfaces ({} productive)", gr.size(), gr.productions().size(),
               gr.productive_interfaces());
}

struct FitFlags {
  std::string corpus;
  KernelFlags kernel;
  EstimatorFlags est;
};

void run_fit(Run& run, const FitFlags& f) {
  const auto corpus = load(run, f.corpus);
  const auto kp = f.kernel.params();
  const auto hp = f.est.params(run.common.seed, kp.feature_bits);
  const auto model = fit(vectorize_all(corpus.graphs, kp), hp);
  write_model(run.common.output, model);
  run.parameters = {{"kernel", kernel_json(kp)}, {"estimator", estimator_json(hp)}};
  run.results = {{"rho", model.rho}, {"epoch_objective", model.epoch_objective}};
  spdlog::info("model: rho {:.6g}, final objective {:.6g}", model.rho, model.epoch_objective.back());
}

struct SampleFlags {
  std::string grammar, model, seed_graphs;
  std::size_t steps = 1000, burn_in = 100, interval = 50, attempts = kDefaultAttempts, chains = 1;
  std::string transformer = "none";
  double accept_floor = 1e-9;
  double audit_rate = 0.01;
  KernelFlags kernel;
};

void run_sample(Run& run, const SampleFlags& f) {
  run.inputs.push_back(input_entry(f.grammar));
  const auto gr = read_grammar(f.grammar);
  run.inputs.push_back(input_entry(f.model));
  const auto model = read_model(f.model);
  const auto seeds = load(run, f.seed_graphs);
  std::optional<Coarsener> co;
  if (gr.coarsened()) co = Coarsener::from_name(gr.coarsener());

  SamplerConfig cfg;
  cfg.steps = f.steps;
  cfg.burn_in = f.burn_in;
  cfg.sample_interval = f.interval;
  cfg.n_attempts = f.attempts;
  cfg.seed = run.common.seed;
  cfg.transformer = transformer_from_name(f.transformer);
  cfg.accept_floor = f.accept_floor;
  cfg.audit_rate = f.audit_rate;
  cfg.kernel = f.kernel.params();
  cfg.kernel.feature_bits = model.params.feature_bits;
  cfg.rules = run.common.rules();

  const auto set = run_chains(seeds.graphs, gr, model, co ? &*co : nullptr, cfg, f.chains, run.common.threads);
  write_text(run.common.output, samples_to_jsonl(set));
  const auto st = total_stats(set);
  std::size_t records = 0;
  for (const auto& c : set.chains) records += c.records.size();
  run.parameters = {{"steps", f.steps},          {"burn_in", f.burn_in},        {"interval", f.interval},
                    {"attempts", f.attempts},    {"chains", f.chains},          {"transformer", f.transformer},
                    {"accept_floor", f.accept_floor}, {"audit_rate", f.audit_rate}, {"kernel", kernel_json(cfg.kernel)}};
  run.results = {{"records", records},
                 {"proposed", st.proposed},
                 {"accepted", st.accepted},
                 {"exhausted", st.exhausted},
                 {"infeasible", st.infeasible},
                 {"audited", st.audited},
                 {"audit_failures", st.audit_failures},
                 {"audit_not_coarsenable", st.audit_not_coarsenable}};
  spdlog::info("{} records; {} of {} proposals accepted", records, st.accepted, st.proposed);
  if (st.audit_failures > 0) spdlog::error("{} closure audit failures", st.audit_failures);
}

struct EvaluateFlags {
  std::string real, gen;
  std::size_t folds = 5, reps = 7;
  KernelFlags kernel;
  EstimatorFlags est;
};

void run_evaluate(Run& run, const EvaluateFlags& f) {
  const auto real = load(run, f.real);
  const auto gen = load(run, f.gen);
  EvalConfig cfg;
  cfg.kernel = f.kernel.params();
  cfg.hp = f.est.params(run.common.seed, cfg.kernel.feature_bits);
  cfg.folds = f.folds;
  cfg.reps = f.reps;
  cfg.seed = run.common.seed;
  cfg.threads = run.common.threads;
  const auto rep = evaluate(real.graphs, gen.graphs, cfg);
  write_text(run.common.output, report_to_json(rep).dump(2) + "\n");
  run.parameters = {{"folds", f.folds}, {"reps", f.reps}, {"kernel", kernel_json(cfg.kernel)},
                    {"estimator", estimator_json(cfg.hp)}};
  run.results = {{"symmetrized_kl", rep.symmetrized_kl}, {"set_similarity", rep.set_similarity},
                 {"filter_pass_fraction", rep.filter_pass_fraction}};
  spdlog::info("KL {:.6g}, similarity {:.6g}, filter pass {:.4f}", rep.symmetrized_kl, rep.set_similarity,
               rep.filter_pass_fraction);
}

/// ">name" + sequence records; a following structure line is ignored. Lines
/// without a header are sequences named by their position.
std::vector<std::pair<std::string, std::string>> read_sequences(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line, name;
  bool pending = false;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '>') {
      name = line.substr(1);
      pending = true;
      continue;
    }
    if (line.find_first_not_of("().") == std::string::npos) continue;  // structure line
    out.emplace_back(pending ? name : std::to_string(n), line);
    pending = false;
    ++n;
  }
  return out;
}

struct FoldFlags {
  std::string input;
};

void run_fold(Run& run, const FoldFlags& f) {
  run.inputs.push_back(input_entry(f.input));
  std::string text;
  std::size_t folded = 0, pairs = 0;
  for (const auto& [name, seq] : read_sequences(read_text(f.input))) {
    try {
      const RnaRecord rec{name, nussinov_fold(seq, run.common.rules()), 0};
      text += format_dot_bracket(rec);
      pairs += rec.structure.pairs.size();
      ++folded;
    } catch (const Error& e) {
      if (!run.common.lenient || e.kind() != ErrorKind::validation)
        throw Error(e.kind(), name + ": " + e.what());
      spdlog::warn("skipped {}: {}", name, e.what());
      run.skipped.push_back(json{{"input", f.input}, {"name", name}, {"message", e.what()}});
    }
  }
  write_text(run.common.output, text);
  run.parameters = {{"min_loop", run.common.min_loop}, {"wobble", !run.common.no_wobble}};
  run.results = {{"folded", folded}, {"pairs", pairs}};
}

struct CoarsenFlags {
  std::string input;
  std::string coarsener = "rna";
};

void run_coarsen(Run& run, const CoarsenFlags& f) {
  const auto corpus = load(run, f.input);
  const auto co = Coarsener::from_name(f.coarsener);
  std::string text;
  for (std::size_t k = 0; k < corpus.graphs.size(); ++k) {
    const auto c = co.coarsen(corpus.graphs[k]);
    text += json{{"name", corpus.names[k]},
                 {"graph", graph_to_json(c.result.coarse)},
                 {"members", c.result.coarse_to_base}}
                .dump();
    text += '\n';
  }
  write_text(run.common.output, text);
  run.parameters = {{"coarsener", f.coarsener}};
  run.results = {{"graphs", corpus.graphs.size()}};
}

struct VectorizeFlags {
  std::string input;
  KernelFlags kernel;
};

void run_vectorize(Run& run, const VectorizeFlags& f) {
  const auto corpus = load(run, f.input);
  const auto kp = f.kernel.params();
  std::string text;
  for (const auto& g : corpus.graphs) text += to_svmlight(vectorize(g, kp)) + "\n";
  write_text(run.common.output, text);
  run.parameters = {{"kernel", kernel_json(kp)}};
  run.results = {{"vectors", corpus.graphs.size()}};
}

struct FiltersFlags {
  std::string input;
};

void run_filters(Run& run, const FiltersFlags& f) {
  const auto corpus = load(run, f.input);
  std::string text;
  std::size_t passed = 0;
  for (std::size_t k = 0; k < corpus.graphs.size(); ++k) {
    const auto r = rna_validity_filters(corpus.graphs[k]);
    passed += r.pass;
    json failed = json::array();
    for (char c : r.failed) failed.push_back(std::string(1, c));
    text += json{{"name", corpus.names[k]}, {"pass", r.pass}, {"failed", failed}}.dump() + "\n";
  }
  write_text(run.common.output, text);
  const double fraction = static_cast<double>(passed) / static_cast<double>(corpus.graphs.size());
  run.results = {{"graphs", corpus.graphs.size()}, {"passed", passed}, {"pass_fraction", fraction}};
  spdlog::info("{} of {} graphs pass all filters", passed, corpus.graphs.size());
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("grammargen");
  logger->set_pattern("%^[%l]%$ %v");
  spdlog::set_default_logger(logger);

  CLI::App app{"Graph grammar induction and Metropolis-Hastings sampling"};
  app.set_version_flag("--version", GRAMMARGEN_VERSION);
  app.require_subcommand(1);

  Common common;
  std::map<std::string, std::function<void(Run&)>> actions;

  InduceFlags induce_f;
  auto* induce_cmd = app.add_subcommand("induce", "learn a grammar from a corpus");
  add_common(induce_cmd, common);
  induce_cmd->add_option("--corpus", induce_f.corpus, "training graphs")->required();
  induce_cmd->add_option("--coarsener", induce_f.coarsener, "none|rna|mol")
      ->check(CLI::IsMember({"none", "rna", "mol"}));
  induce_cmd->add_option("--radii", induce_f.radii, "core radii")->delimiter(',');
  induce_cmd->add_option("--thickness", induce_f.thickness, "interface thickness (coarse hops when coarsened)");
  induce_cmd->add_option("--base-thickness", induce_f.base_thickness, "base-level interface thickness");
  induce_cmd->add_option("--min-count", induce_f.min_count, "drop productions seen fewer times");
  induce_cmd->add_flag("--exact-iso", induce_f.exact_iso, "confirm equal core certificates by isomorphism");
  actions["induce"] = [&](Run& r) { run_induce(r, induce_f); };

  FitFlags fit_f;
  auto* fit_cmd = app.add_subcommand("fit", "train the one-class density model");
  add_common(fit_cmd, common);
  fit_cmd->add_option("--corpus", fit_f.corpus, "training graphs")->required();
  add_kernel(fit_cmd, fit_f.kernel);
  add_estimator(fit_cmd, fit_f.est);
  actions["fit"] = [&](Run& r) { run_fit(r, fit_f); };

  SampleFlags sample_f;
  auto* sample_cmd = app.add_subcommand("sample", "run Metropolis-Hastings chains");
  add_common(sample_cmd, common);
  sample_cmd->add_option("--grammar", sample_f.grammar, "grammar file")->required();
  sample_cmd->add_option("--model", sample_f.model, "model file")->required();
  sample_cmd->add_option("--seed-graphs", sample_f.seed_graphs, "chain start graphs")->required();
  sample_cmd->add_option("--steps", sample_f.steps, "steps per chain");
  sample_cmd->add_option("--burn-in", sample_f.burn_in, "steps before the first record");
  sample_cmd->add_option("--interval", sample_f.interval, "steps between records");
  sample_cmd->add_option("--attempts", sample_f.attempts, "roots tried per proposal");
  sample_cmd->add_option("--chains", sample_f.chains, "number of chains")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--transformer", sample_f.transformer, "none|rna-refold")
      ->check(CLI::IsMember({"none", "rna-refold"}));
  sample_cmd->add_option("--accept-floor", sample_f.accept_floor, "score floor");
  sample_cmd->add_option("--audit-rate", sample_f.audit_rate, "fraction of proposals closure-checked");
  sample_cmd->add_option("--r-max", sample_f.kernel.r_max, "kernel radius (match the fit)");
  sample_cmd->add_option("--d-max", sample_f.kernel.d_max, "kernel distance (match the fit)");
  actions["sample"] = [&](Run& r) { run_sample(r, sample_f); };

  EvaluateFlags eval_f;
  auto* eval_cmd = app.add_subcommand("evaluate", "compare generated graphs with real ones");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--real", eval_f.real, "reference graphs")->required();
  eval_cmd->add_option("--gen", eval_f.gen, "generated graphs (JSONL samples accepted)")->required();
  eval_cmd->add_option("--folds", eval_f.folds, "cross-validation folds");
  eval_cmd->add_option("--reps", eval_f.reps, "repetitions");
  add_kernel(eval_cmd, eval_f.kernel);
  add_estimator(eval_cmd, eval_f.est);
  actions["evaluate"] = [&](Run& r) { run_evaluate(r, eval_f); };

  FoldFlags fold_f;
  auto* fold_cmd = app.add_subcommand("fold", "Nussinov-fold RNA sequences");
  add_common(fold_cmd, common);
  fold_cmd->add_option("--input", fold_f.input, "sequences or dot-bracket records")->required();
  actions["fold"] = [&](Run& r) { run_fold(r, fold_f); };

  CoarsenFlags coarsen_f;
  auto* coarsen_cmd = app.add_subcommand("coarsen", "emit coarse graphs");
  add_common(coarsen_cmd, common);
  coarsen_cmd->add_option("--input", coarsen_f.input, "graphs")->required();
  coarsen_cmd->add_option("--coarsener", coarsen_f.coarsener, "rna|mol")->check(CLI::IsMember({"rna", "mol"}));
  actions["coarsen"] = [&](Run& r) { run_coarsen(r, coarsen_f); };

  VectorizeFlags vec_f;
  auto* vec_cmd = app.add_subcommand("vectorize", "emit kernel feature vectors (index:weight lines)");
  add_common(vec_cmd, common);
  vec_cmd->add_option("--input", vec_f.input, "graphs")->required();
  add_kernel(vec_cmd, vec_f.kernel);
  actions["vectorize"] = [&](Run& r) { run_vectorize(r, vec_f); };

  FiltersFlags filt_f;
  auto* filt_cmd = app.add_subcommand("filters", "apply the RNA validity filters");
  add_common(filt_cmd, common);
  filt_cmd->add_option("--input", filt_f.input, "graphs")->required();
  actions["filters"] = [&](Run& r) { run_filters(r, filt_f); };

  try {
    // Config entries become flags unless the command line already sets them.
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t k = 0; k < args.size(); ++k) {
      std::string path;
      if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
      else if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
      if (path.empty() || args.empty()) continue;
      CLI::App* sub = nullptr;
      for (auto* s : app.get_subcommands({})) if (s->get_name() == args[0]) sub = s;
      if (!sub) break;
      const auto extra = config_arguments(sub, path, args);
      args.insert(args.begin() + 1, extra.begin(), extra.end());
      break;
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e.kind());
  }

  const auto level = spdlog::level::from_str(common.log_level);
  if (level == spdlog::level::off && common.log_level != "off") {
    spdlog::error("unknown log level '{}'", common.log_level);
    return kUsage;
  }
  spdlog::set_level(level);

  Run run;
  run.command = app.get_subcommands().front()->get_name();
  run.common = common;
  try {
    actions.at(run.command)(run);
    run.write_manifest();
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    spdlog::error("json: {}", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kInternal;
  }
  return kOk;
}
