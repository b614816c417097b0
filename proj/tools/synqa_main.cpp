// synqa: build a syntactic Q&A benchmark from a treebank and evaluate models.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "synqa/extract.hpp"
#include "synqa/qgen.hpp"
#include "synqa/report.hpp"
#include "synqa/runner.hpp"
#include "synqa/sampler.hpp"
#include "synqa/serialize.hpp"

namespace fs = std::filesystem;
using namespace synqa;

namespace {

struct Globals {
  fs::path config_path;
  std::optional<std::uint64_t> seed;
  json config = json::object();

  void load() {
    if (!config_path.empty()) config = read_json_file(config_path);
  }
  std::uint64_t run_seed() const {
    if (seed) return *seed;
    return config.value("seed", std::uint64_t{0});
  }
  json section(const char* name) const {
    return config.contains(name) ? config.at(name) : json::object();
  }
  ModelEndpoint endpoint(const std::string& label) const {
    for (const auto& e : section("endpoints")) {
      auto ep = endpoint_from_json(e);
      if (ep.label == label) return ep;
    }
    throw ConfigError("no endpoint labelled '" + label + "' in the config");
  }
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

const PatternRuleSet& patterns_for(const Globals& g, const fs::path& flag,
                                   PatternRuleSet& storage) {
  fs::path p = flag.empty() ? fs::path(g.config.value("patterns", std::string()))
                            : flag;
  if (p.empty()) return default_patterns();
  storage = load_pattern_file(p);
  return storage;
}

TemplateSet templates_for(const Globals& g, const fs::path& flag) {
  fs::path p = flag.empty()
                   ? fs::path(g.config.value("templates", std::string()))
                   : flag;
  return p.empty() ? TemplateSet::defaults() : TemplateSet::load(p);
}

RunConfig run_config(const Globals& g, const std::string& setting,
                     const std::vector<std::uint64_t>& seeds) {
  RunConfig cfg = run_config_from_json(g.section("run"));
  if (!setting.empty()) cfg.setting = parse_setting(setting);
  if (!seeds.empty()) cfg.seeds = seeds;
  else if (g.seed && !g.section("run").contains("seeds")) cfg.seeds = {*g.seed};
  return cfg;
}

void print_diagnostics(const RunDiagnostics& d, std::size_t records) {
  std::cerr << "records " << records << ", requests " << d.requests
            << ", retries " << d.retries << ", failed " << d.failed_records
            << ", exemplar shortfalls " << d.exemplar_shortfalls << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Syntactic knowledge Q&A benchmark toolchain"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Random seed (overrides the config)");

  // extract
  auto* extract = app.add_subcommand("extract", "Extract facts from treebank files");
  std::vector<fs::path> treebanks;
  fs::path ex_out = "out", ex_patterns;
  unsigned ex_threads = std::max(1u, std::thread::hardware_concurrency());
  extract->add_option("treebank", treebanks, "Bracketed treebank files")
      ->required()->check(CLI::ExistingFile);
  extract->add_option("-o,--out", ex_out, "Output directory")->capture_default_str();
  extract->add_option("--patterns", ex_patterns, "Pattern file (default: built in)");
  extract->add_option("-j,--threads", ex_threads, "Worker threads")->capture_default_str();

  // generate
  auto* generate = app.add_subcommand("generate", "Render facts into questions");
  fs::path gen_facts = "out/facts.jsonl", gen_sentences = "out/sentences.jsonl",
           gen_out = "out/questions.jsonl", gen_templates;
  generate->add_option("--facts", gen_facts, "")->capture_default_str();
  generate->add_option("--sentences", gen_sentences, "")->capture_default_str();
  generate->add_option("--templates", gen_templates, "Template file (default: built in)");
  generate->add_option("-o,--out", gen_out, "")->capture_default_str();

  // sample
  auto* sample = app.add_subcommand("sample", "Draw balanced eval and exemplar sets");
  fs::path smp_questions = "out/questions.jsonl", smp_out = "out";
  std::optional<std::size_t> k_eval, k_exemplar;
  sample->add_option("--questions", smp_questions, "")->capture_default_str();
  sample->add_option("-o,--out", smp_out, "Output directory")->capture_default_str();
  sample->add_option("--k-eval", k_eval, "Questions per stratum (default 5)");
  sample->add_option("--k-exemplar", k_exemplar, "Exemplars per stratum (default 2)");

  // run
  auto* run = app.add_subcommand("run", "Query one endpoint over the eval set");
  fs::path run_eval_path = "out/eval.jsonl", run_ex = "out/exemplars.jsonl", run_out;
  std::string run_endpoint, run_setting;
  std::vector<std::uint64_t> run_seeds;
  run->add_option("--endpoint", run_endpoint, "Endpoint label from the config")->required();
  run->add_option("--eval", run_eval_path, "")->capture_default_str();
  run->add_option("--exemplars", run_ex, "")->capture_default_str();
  run->add_option("--setting", run_setting, "zero_shot or few_shot");
  run->add_option("--seeds", run_seeds, "Seeds (default from config, else 0 1 2)");
  run->add_option("-o,--out", run_out, "Run file (default out/runs/<endpoint>.jsonl)");

  // baseline
  auto* baseline = app.add_subcommand("baseline", "Random-answer baseline run file");
  fs::path bl_eval = "out/eval.jsonl", bl_out = "out/runs/random.jsonl";
  std::vector<std::uint64_t> bl_seeds;
  baseline->add_option("--eval", bl_eval, "")->capture_default_str();
  baseline->add_option("--seeds", bl_seeds, "Seeds (default: --seed)");
  baseline->add_option("-o,--out", bl_out, "")->capture_default_str();

  // score
  auto* score = app.add_subcommand("score", "Score a run file offline");
  fs::path sc_eval = "out/eval.jsonl", sc_run, sc_out;
  score->add_option("--eval", sc_eval, "")->capture_default_str();
  score->add_option("--run", sc_run, "Run file")->required()->check(CLI::ExistingFile);
  score->add_option("-o,--out", sc_out, "Scoreboard JSON (default: stdout)");

  // report
  auto* report = app.add_subcommand("report", "Tables from scoreboards");
  std::vector<std::string> rp_boards;
  fs::path rp_out;
  report->add_option("scoreboards", rp_boards, "LABEL=scoreboard.json ...")->required();
  report->add_option("-o,--out", rp_out, "Write <out>.txt and <out>.csv instead of stdout");

  // stats
  auto* stats = app.add_subcommand("stats", "Question or fact distribution");
  fs::path st_questions, st_facts;
  stats->add_option("--questions", st_questions, "questions.jsonl");
  stats->add_option("--facts", st_facts, "facts.jsonl");
  stats->add_flag("--json", "Print JSON instead of a table");

  // series
  auto* series = app.add_subcommand("series", "Evaluate a list of checkpoints");
  fs::path se_eval = "out/eval.jsonl", se_ex = "out/exemplars.jsonl", se_out = "out/series";
  std::vector<std::string> se_endpoints;
  std::string se_setting;
  std::vector<std::uint64_t> se_seeds;
  series->add_option("--endpoints", se_endpoints, "Endpoint labels in order")->required();
  series->add_option("--eval", se_eval, "")->capture_default_str();
  series->add_option("--exemplars", se_ex, "")->capture_default_str();
  series->add_option("--setting", se_setting, "zero_shot or few_shot");
  series->add_option("--seeds", se_seeds, "Seeds");
  series->add_option("-o,--out", se_out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    g.load();

    if (*extract) {
      PatternRuleSet storage;
      const auto& rules = patterns_for(g, ex_patterns, storage);
      std::vector<Sentence> sentences;
      for (const auto& p : treebanks) {
        auto part = read_treebank_file(p);
        sentences.insert(sentences.end(), std::make_move_iterator(part.begin()),
                         std::make_move_iterator(part.end()));
      }
      auto result = extract_corpus(sentences, rules, ex_threads);
      write_jsonl(ex_out / "facts.jsonl", result.facts);
      write_jsonl(ex_out / "sentences.jsonl", result.kept);
      write_json_file(ex_out / "extract_stats.json", extraction_summary(result.stats));
      std::cerr << result.stats.sentences << " sentences, " << result.facts.size()
                << " facts, " << result.stats.sentences_without_facts
                << " sentences without facts\n";
    } else if (*generate) {
      auto templates = templates_for(g, gen_templates);
      auto facts = read_jsonl<SyntacticFact>(gen_facts);
      auto sentences = read_jsonl<Sentence>(gen_sentences);
      GenerationStats st;
      auto questions = generate_questions(facts, sentences, templates, g.run_seed(), &st);
      write_jsonl(gen_out, questions);
      std::cerr << questions.size() << " questions from " << st.facts
                << " facts (MC skipped " << st.mc_skipped << ", TF skipped "
                << st.tf_skipped << ", no subject " << st.no_partner << ")\n";
    } else if (*sample) {
      auto cfg_json = g.section("sample");
      SampleConfig cfg;
      cfg.k_eval = k_eval.value_or(cfg_json.value("k_eval", cfg.k_eval));
      cfg.k_exemplar = k_exemplar.value_or(cfg_json.value("k_exemplar", cfg.k_exemplar));
      cfg.seed = g.run_seed();
      auto questions = read_jsonl<Question>(smp_questions);
      auto result = sample_balanced(questions, cfg);
      write_jsonl(smp_out / "eval.jsonl", result.eval);
      write_jsonl(smp_out / "exemplars.jsonl", result.exemplars);
      write_json_file(smp_out / "manifest.json", sample_manifest(cfg, result));
      std::cerr << result.eval.size() << " eval, " << result.exemplars.size()
                << " exemplars over " << result.strata.size() << " strata\n";
    } else if (*run) {
      auto ep = g.endpoint(run_endpoint);
      auto cfg = run_config(g, run_setting, run_seeds);
      cfg.output = run_out.empty() ? fs::path("out/runs") / (ep.label + ".jsonl") : run_out;
      auto eval = read_jsonl<Question>(run_eval_path);
      std::vector<Question> exemplars;
      if (cfg.setting == Setting::FewShot) exemplars = read_jsonl<Question>(run_ex);
      auto result = run_eval(ep, cfg, eval, exemplars);
      print_diagnostics(result.diagnostics, result.records.size());
    } else if (*baseline) {
      auto eval = read_jsonl<Question>(bl_eval);
      if (bl_seeds.empty()) bl_seeds = {g.run_seed()};
      std::vector<RunRecord> records;
      for (auto s : bl_seeds) {
        auto part = random_baseline(eval, s);
        records.insert(records.end(), part.begin(), part.end());
      }
      write_jsonl(bl_out, records);
    } else if (*score) {
      auto eval = read_jsonl<Question>(sc_eval);
      auto records = read_jsonl<RunRecord>(sc_run);
      auto board = score_run(records, eval);
      if (sc_out.empty()) std::cout << json(board).dump(2) << "\n";
      else write_json_file(sc_out, json(board));
    } else if (*report) {
      std::vector<LabeledScoreboard> rows;
      for (const auto& arg : rp_boards) {
        auto eq = arg.find('=');
        std::string label = eq == std::string::npos ? fs::path(arg).stem().string()
                                                    : arg.substr(0, eq);
        fs::path path = eq == std::string::npos ? arg : arg.substr(eq + 1);
        rows.push_back({label, read_json_file(path).get<Scoreboard>()});
      }
      std::string text = overall_table(rows) + "\n" + knowledge_point_table(rows);
      if (rp_out.empty()) {
        std::cout << text;
      } else {
        write_text(fs::path(rp_out.string() + ".txt"), text);
        write_text(fs::path(rp_out.string() + ".csv"), overall_csv(rows));
        write_text(fs::path(rp_out.string() + "_kp.csv"), knowledge_point_csv(rows));
      }
    } else if (*stats) {
      DistributionReport r;
      if (!st_questions.empty()) r = dataset_stats(read_jsonl<Question>(st_questions));
      else if (!st_facts.empty()) r = dataset_stats(read_jsonl<SyntacticFact>(st_facts));
      else throw ConfigError("stats needs --questions or --facts");
      if (stats->count("--json")) std::cout << distribution_json(r).dump(2) << "\n";
      else std::cout << distribution_table(r);
    } else if (*series) {
      std::vector<ModelEndpoint> endpoints;
      for (const auto& label : se_endpoints) endpoints.push_back(g.endpoint(label));
      auto cfg = run_config(g, se_setting, se_seeds);
      auto eval = read_jsonl<Question>(se_eval);
      std::vector<Question> exemplars;
      if (cfg.setting == Setting::FewShot) exemplars = read_jsonl<Question>(se_ex);
      auto result = checkpoint_series(endpoints, cfg, eval, exemplars, se_out / "runs");
      for (std::size_t i = 0; i < result.columns.size(); ++i) {
        const auto& col = result.columns[i];
        if (result.errors[i]) {
          std::cerr << col.label << ": " << *result.errors[i] << "\n";
          continue;
        }
        write_json_file(se_out / (col.label + ".scoreboard.json"), json(col.board));
      }
      write_text(se_out / "series.csv", series_csv(result.columns));
      std::cout << overall_table(result.columns);
    }
  } catch (const std::exception& e) {
    std::cerr << "synqa: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
