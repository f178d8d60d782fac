// hydiag: diagnosability checking and diagnoser synthesis for quotient
// models and timed automata with faults.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hydiag/hydiag.hpp"

namespace {

using namespace hydiag;

enum Exit : int {
  kOk = 0,
  kInvalid = 1,
  kNotDiagnosable = 2,
  kNotProgressive = 3,
  kInconsistent = 4,
  kCapExceeded = 5,
};

struct Input {
  std::string path;
  bool ta = false;
  std::size_t max_classes = default_max_classes();
};

QuotientModel load(const Input& in) {
  if (in.ta) return region_quotient(load_ta(in.path), in.max_classes);
  return load_model(in.path);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw Error("cannot write '" + out_path + "'");
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json trace_json(const UTrace& t, const Vocabulary& v) {
  Json steps = Json::array();
  for (const auto& s : t.steps) steps.push_back({{"action", v.name(s.action)}, {"obs", v.name(s.observable)}});
  return {{"head", v.name(t.head)}, {"steps", std::move(steps)}};
}

Json names_json(const std::vector<ClassId>& cs, const QuotientModel& m) {
  Json a = Json::array();
  for (ClassId c : cs) a.push_back(m.info(c).name);
  return a;
}

// Validation and progressiveness gate shared by the analysis commands.
// Returns an exit code, or nullopt when the model is usable.
std::optional<int> gate(const QuotientModel& m, bool json, bool require_progress) {
  const auto rep = validate_model(m);
  if (!rep.ok()) {
    for (const auto& v : rep.violations)
      std::cerr << "invalid: " << to_string(v.rule) << " " << v.subject << ": " << v.message << "\n";
    return kInvalid;
  }
  if (!require_progress) return std::nullopt;
  const auto prog = check_progressive(m);
  if (!prog.progressive()) {
    if (json) {
      Json w{{"kind", prog.witness->kind == ProgressWitness::Kind::Deadlock ? "deadlock" : "silent-cycle"},
             {"classes", names_json(prog.witness->classes, m)},
             {"labels", prog.witness->labels}};
      std::cout << dump({{"progressive", false}, {"witness", std::move(w)}});
    } else {
      std::cout << "not progressive: " << describe(*prog.witness, m) << "\n";
    }
    return kNotProgressive;
  }
  return std::nullopt;
}

int cmd_validate(const Input& in, bool json) {
  const auto m = load(in);
  const auto rep = validate_model(m);
  if (json) {
    Json vs = Json::array();
    for (const auto& v : rep.violations)
      vs.push_back({{"rule", std::string(to_string(v.rule))}, {"subject", v.subject}, {"message", v.message}});
    std::cout << dump({{"ok", rep.ok()}, {"violations", std::move(vs)}});
  } else if (rep.ok()) {
    std::cout << "ok: " << m.class_count() << " classes\n";
  } else {
    for (const auto& v : rep.violations)
      std::cout << to_string(v.rule) << " " << v.subject << ": " << v.message << "\n";
  }
  return rep.ok() ? kOk : kInvalid;
}

int cmd_regions(const Input& in, const std::string& out) {
  const auto ta = load_ta(in.path);
  const auto m = region_quotient(ta, in.max_classes);
  emit(dump(to_json(m)), out);
  if (!out.empty())
    std::cout << m.class_count() << " classes (bound " << region_count_bound(ta) << ")\n";
  return kOk;
}

int cmd_estimator(const Input& in, bool json, const std::string& out) {
  const auto m = load(in);
  if (auto code = gate(m, false, false)) return *code;
  const auto est = build_estimator(m);
  if (json || !out.empty()) {
    emit(dump(to_json(est)), out);
    if (!out.empty()) std::cout << est.size() << " estimator states\n";
    return kOk;
  }
  const auto& v = est.vocabulary();
  for (std::size_t i = 0; i < est.size(); ++i) {
    const auto& s = est.states()[i];
    std::cout << i << " {";
    for (std::size_t k = 0; k < s.members.size(); ++k)
      std::cout << (k ? "," : "") << m.info(s.members[k]).name;
    std::cout << "} " << to_string(s.classification) << "\n";
  }
  for (const auto& [o, s] : est.initials()) std::cout << "init " << v.name(o) << " -> " << s.index() << "\n";
  for (const auto& t : est.transitions())
    std::cout << t.src.index() << " " << v.name(t.action) << " " << v.name(t.observable) << " -> "
              << t.dst.index() << "\n";
  return kOk;
}

int cmd_check(const Input& in, bool json) {
  const auto m = load(in);
  if (auto code = gate(m, json, true)) return *code;
  const auto est = build_estimator(m);
  const auto verdict = check_diagnosable(est);
  const auto& v = m.vocabulary();
  if (verdict.diagnosable()) {
    const auto bound = detection_delay_bound(est);
    if (json)
      std::cout << dump({{"progressive", true}, {"diagnosable", true}, {"estimator_states", est.size()},
                         {"detection_delay_bound", bound}});
    else
      std::cout << "diagnosable (" << est.size() << " estimator states, detection within " << bound
                << " events)\n";
    return kOk;
  }
  const auto& w = *verdict.witness;
  if (json) {
    Json states = Json::array();
    for (StateId s : verdict.cycle_states) states.push_back(s.index());
    std::cout << dump({{"progressive", true},
                       {"diagnosable", false},
                       {"estimator_states", est.size()},
                       {"witness", {{"prefix", trace_json(w.prefix, v)}, {"cycle", trace_json(w.cycle, v)}}},
                       {"cycle_states", std::move(states)}});
  } else {
    std::cout << "not diagnosable\n"
              << "prefix: " << format(w.prefix, v) << "\n"
              << "cycle: " << format(w.cycle, v) << "\n";
  }
  return kNotDiagnosable;
}

int cmd_synthesize(const Input& in, const std::string& out) {
  const auto m = load(in);
  if (auto code = gate(m, false, false)) return *code;
  const auto est = build_estimator(m);
  const auto d = synthesize(est);
  emit(dump(to_json(d)), out);
  if (!check_diagnosable(est).diagnosable())
    std::cerr << "warning: model is not diagnosable; the diagnoser is not winning\n";
  if (!out.empty()) std::cout << d.size() << " diagnoser states\n";
  return kOk;
}

std::vector<std::string> words(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

int cmd_run(const std::string& path) {
  const auto d = diagnoser_from_json(read_file(path));
  const auto& v = d.vocabulary();
  std::optional<StateId> cur;
  std::size_t index = 0;
  for (std::string line; std::getline(std::cin, line);) {
    const auto w = words(line);
    if (w.empty()) continue;
    ObsEvent ev;
    if (!cur) {
      if (w.size() != 2 || w[0] != "init") {
        std::cerr << "event " << index << ": expected 'init <obs>'\n";
        return kInvalid;
      }
      auto o = v.find_observable(w[1]);
      if (!o) throw NoConsistentExecution("unknown observable '" + w[1] + "'", index);
      ev = InitEvent{*o};
    } else {
      if (w.size() != 2 || w[0] == "init") {
        std::cerr << "event " << index << ": expected '<action> <obs>'\n";
        return kInvalid;
      }
      auto a = v.find_action(w[0]);
      auto o = v.find_observable(w[1]);
      if (!a) throw NoConsistentExecution("unknown action '" + w[0] + "'", index);
      if (!o) throw NoConsistentExecution("unknown observable '" + w[1] + "'", index);
      ev = StepEvent{*a, *o};
    }
    const auto [next, verdict] = step(d, cur, ev, index);
    cur = next;
    std::cout << to_string(verdict.answer) << " " << status_name(verdict.status) << "\n" << std::flush;
    ++index;
  }
  return kOk;
}

int cmd_oracle(const Input& in, bool json, std::optional<std::size_t> depth) {
  const auto m = load(in);
  if (auto code = gate(m, json, true)) return *code;
  const auto verdict = oracle::brute_force_diagnosable(m);
  const auto& v = m.vocabulary();
  Json j{{"diagnosable", verdict.diagnosable}};
  std::ostringstream text;
  text << (verdict.diagnosable ? "diagnosable" : "not diagnosable") << "\n";
  if (verdict.counterexample) {
    const auto& cx = *verdict.counterexample;
    j["counterexample"] = {{"prefix", trace_json(cx.shared_trace.prefix, v)},
                           {"cycle", trace_json(cx.shared_trace.cycle, v)},
                           {"faulty_run", names_json(cx.left_run, m)},
                           {"nonfaulty_run", names_json(cx.right_run, m)}};
    auto run = [&](const std::vector<ClassId>& r) {
      std::string s;
      for (ClassId c : r) s += (s.empty() ? "" : " ") + m.info(c).name;
      return s;
    };
    text << "prefix: " << format(cx.shared_trace.prefix, v) << "\n"
         << "cycle: " << format(cx.shared_trace.cycle, v) << "\n"
         << "faulty run: " << run(cx.left_run) << "\n"
         << "non-faulty run: " << run(cx.right_run) << "\n";
  }
  if (depth) {
    const auto traces = oracle::enumerate_utraces(m, *depth);
    const auto est = build_estimator(m);
    const auto d = synthesize(est);
    oracle::SimulationOptions opt;
    if (verdict.diagnosable) opt.delay_bound = detection_delay_bound(est);
    const auto rep = oracle::simulate_runs(m, d, *depth, opt);
    j["depth"] = *depth;
    j["utraces"] = traces.size();
    j["simulation"] = {{"exhaustive", rep.exhaustive},
                       {"configurations", rep.configurations},
                       {"faulty_runs_checked", rep.faulty_runs_checked},
                       {"losing_runs", rep.losing_count}};
    text << "utraces up to depth " << *depth << ": " << traces.size() << "\n"
         << "simulation: " << rep.configurations << " configurations"
         << (rep.exhaustive ? "" : " (sampled)") << ", " << rep.losing_count << " losing runs\n";
    if (!rep.losing.empty()) {
      const auto& lr = rep.losing.front();
      text << "first losing run (" << oracle::to_string(lr.kind) << "): " << format(lr.trace, v) << "\n";
    }
  }
  std::cout << (json ? dump(j) : text.str());
  return verdict.diagnosable ? kOk : kNotDiagnosable;
}

int cmd_fuzz(std::size_t models, std::uint64_t seed, bool json) {
  std::mt19937_64 rng(seed);
  std::size_t agree = 0, diagnosable = 0;
  std::optional<Json> first;
  for (std::size_t i = 0; i < models; ++i) {
    const auto m = random_model(rng);
    const bool fast = check_diagnosable(build_estimator(m)).diagnosable();
    const bool slow = oracle::brute_force_diagnosable(m).diagnosable;
    diagnosable += slow;
    if (fast == slow) {
      ++agree;
    } else if (!first) {
      first = Json{{"index", i}, {"estimator", fast}, {"oracle", slow}, {"model", to_json(m)}};
    }
  }
  if (json) {
    Json j{{"models", models}, {"seed", seed}, {"agreements", agree}, {"diagnosable", diagnosable}};
    if (first) j["first_disagreement"] = *first;
    std::cout << dump(j);
  } else {
    std::cout << "models: " << models << "\nagreements: " << agree << "\ndiagnosable: " << diagnosable
              << "\n";
    if (first)
      std::cout << "first disagreement (model " << (*first)["index"] << "):\n" << (*first)["model"].dump(2) << "\n";
  }
  return agree == models ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagnosability checking and diagnoser synthesis"};
  app.require_subcommand(1);

  Input in;
  bool json = false;
  std::string out;
  std::optional<std::size_t> depth;
  std::size_t models = 500;
  std::uint64_t seed = 1;
  std::string path;

  auto model_input = [&](CLI::App* sub, bool ta_flag) {
    sub->add_option("model", in.path, "Model file")->required()->check(CLI::ExistingFile);
    if (ta_flag) sub->add_flag("--ta", in.ta, "Read a timed automaton instead of a quotient");
    sub->add_option("--max-classes", in.max_classes, "Region count limit")->check(CLI::PositiveNumber);
  };
  auto format = [&](CLI::App* sub) {
    sub->add_option_function<std::string>(
           "--format", [&](const std::string& f) { json = f == "json"; }, "Output format")
        ->check(CLI::IsMember({"text", "json"}));
  };

  auto* validate = app.add_subcommand("validate", "Check the structural axioms of a model");
  model_input(validate, true);
  format(validate);
  auto* regions = app.add_subcommand("regions", "Compute the region quotient of a timed automaton");
  model_input(regions, false);
  regions->add_option("-o,--output", out, "Output file");
  auto* estimator = app.add_subcommand("estimator", "Build the state estimator");
  model_input(estimator, true);
  format(estimator);
  estimator->add_option("-o,--output", out, "Output file");
  auto* check = app.add_subcommand("check", "Decide diagnosability");
  model_input(check, true);
  format(check);
  auto* synth = app.add_subcommand("synthesize", "Synthesize a diagnoser");
  model_input(synth, true);
  synth->add_option("-o,--output", out, "Output file");
  auto* run = app.add_subcommand("run", "Run a diagnoser over events read from standard input");
  run->add_option("diagnoser", path, "Diagnoser file")->required()->check(CLI::ExistingFile);
  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force diagnosability via a twin plant");
  model_input(oracle_cmd, true);
  format(oracle_cmd);
  oracle_cmd->add_option("--depth", depth, "Also enumerate traces and simulate runs up to this depth");
  auto* fuzz = app.add_subcommand("fuzz", "Compare the estimator check with the oracle on random models");
  fuzz->add_option("--models", models, "Number of models")->check(CLI::PositiveNumber);
  fuzz->add_option("--seed", seed, "Random seed");
  format(fuzz);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*validate) return cmd_validate(in, json);
    if (*regions) return cmd_regions(in, out);
    if (*estimator) return cmd_estimator(in, json, out);
    if (*check) return cmd_check(in, json);
    if (*synth) return cmd_synthesize(in, out);
    if (*run) return cmd_run(path);
    if (*oracle_cmd) return cmd_oracle(in, json, depth);
    if (*fuzz) return cmd_fuzz(models, seed, json);
  } catch (const NoConsistentExecution& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInconsistent;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCapExceeded;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
