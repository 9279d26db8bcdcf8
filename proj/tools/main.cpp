// bioverify -- verification toolkit for LLM-generated biomedical
// associations: term checks against OBO ontologies, co-occurrence checks
// against abstract corpora, and a generation harness for chat-completion
// endpoints.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "bioverify/commands.hpp"
#include "bioverify/config.hpp"
#include "bioverify/version.hpp"

namespace {

using bioverify::RunConfig;
using bioverify::UsageError;

// flag values arrive as strings and flow through the same key/value setter
// the config file uses, so flags always win and the manifest snapshot sees
// the effective settings
struct PendingSettings {
  std::vector<std::pair<std::string, std::string>> entries;

  void set(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
  void apply(RunConfig& config) const {
    for (const auto& [key, value] : entries) bioverify::apply_config_entry(config, key, value);
  }
};

void add_common_flags(CLI::App* cmd, PendingSettings& pending) {
  cmd->add_option_function<std::string>(
         "--output-dir", [&pending](const std::string& v) { pending.set("output_dir", v); },
         "Run directory for reports and manifests");
  cmd->add_option_function<std::string>(
         "--workers", [&pending](const std::string& v) { pending.set("workers", v); },
         "Worker threads (0 = available parallelism; 1 = deterministic bytes)");
  cmd->add_option_function<std::string>(
         "--synonyms", [&pending](const std::string& v) { pending.set("synonyms", v); },
         "Expand ontology synonyms during literature scans (on|off)");
  cmd->add_option_function<std::string>(
         "--periods", [&pending](const std::string& v) { pending.set("periods", v); },
         "Publication periods, e.g. 2009:2014,2015:2019,2020:2024");
  cmd->add_option_function<std::string>(
         "--formats", [&pending](const std::string& v) { pending.set("formats", v); },
         "Report formats (csv,json,markdown)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verify LLM-generated biomedical associations against ontologies and literature"};
  app.set_version_flag("--version", std::string(bioverify::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "Flat key=value config file; flags override it");

  PendingSettings pending;

  auto* generate = app.add_subcommand("generate", "Drive association generation (Algorithm-1 loop)");
  auto* verify_terms = app.add_subcommand("verify-terms", "Term verification against ontologies");
  auto* verify_assoc = app.add_subcommand("verify-assoc", "Association verification by literature co-occurrence");
  auto* consistency = app.add_subcommand("consistency", "Cross-model consistency against simulated abstracts");
  auto* fixtures = app.add_subcommand("fixtures", "Generate synthetic corpora with planted co-occurrences");

  for (auto* cmd : {generate, verify_terms, verify_assoc, consistency, fixtures})
    add_common_flags(cmd, pending);

  auto add_kv = [&pending](CLI::App* cmd, const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        flag, [&pending, key](const std::string& v) { pending.set(key, v); }, help);
  };

  for (auto* cmd : {verify_terms, verify_assoc, generate, fixtures})
    add_kv(cmd, "--kind", "kind", "Association kind (disease-drug|disease-symptom|disease-gene|process-gene)");
  for (auto* cmd : {verify_terms, verify_assoc})
    add_kv(cmd, "--dataset", "dataset", "Association dataset JSON file");

  // repeatable prefixed options go through their own callbacks
  auto add_ontology_flag = [&pending](CLI::App* cmd) {
    cmd->add_option_function<std::vector<std::string>>(
        "--ontology",
        [&pending](const std::vector<std::string>& items) {
          for (const auto& item : items) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
              throw CLI::ValidationError("--ontology expects PREFIX=path");
            pending.set("ontology." + item.substr(0, eq), item.substr(eq + 1));
          }
        },
        "Ontology file as PREFIX=path (DOID, CHEBI, SYMP, GO); repeatable");
  };
  add_ontology_flag(verify_terms);
  add_ontology_flag(verify_assoc);
  add_ontology_flag(consistency);

  add_kv(verify_terms, "--lexicon", "lexicon", "Gene symbol lexicon, one symbol per line");

  add_kv(verify_assoc, "--corpus", "corpus", "Abstract corpus JSONL file");
  verify_assoc->add_flag_callback(
      "--derive-process-gene", [&pending] { pending.set("derive_process_gene", "on"); },
      "Verify the (GO process, gene) pairs derived from a disease-gene dataset");
  verify_assoc->add_flag_callback(
      "--verbose-hits", [&pending] { pending.set("verbose_hits", "on"); },
      "Emit full matched-document lists instead of the 20-id sample");

  consistency->add_option_function<std::vector<std::string>>(
      "--dataset",
      [&pending](const std::vector<std::string>& items) {
        for (const auto& item : items) {
          const auto eq = item.find('=');
          if (eq == std::string::npos) throw CLI::ValidationError("--dataset expects KIND=path");
          pending.set("consistency.dataset." + item.substr(0, eq), item.substr(eq + 1));
        }
      },
      "Dataset as KIND=path, e.g. disease-drug=dd.json; repeatable");
  consistency->add_option_function<std::vector<std::string>>(
      "--model-corpus",
      [&pending](const std::vector<std::string>& items) {
        for (const auto& item : items) {
          const auto eq = item.find('=');
          if (eq == std::string::npos)
            throw CLI::ValidationError("--model-corpus expects NAME=path");
          pending.set("consistency.corpus." + item.substr(0, eq), item.substr(eq + 1));
        }
      },
      "Simulated corpus as MODEL=path; repeatable");

  add_kv(generate, "--endpoint", "endpoint", "Chat-completion endpoint URL (or GENAI_ENDPOINT)");
  add_kv(generate, "--api-key", "api_key", "API key (or GENAI_API_KEY)");
  add_kv(generate, "--model", "model", "Model name recorded in provenance");
  add_kv(generate, "--mode", "mode", "associations (default) or abstracts");
  add_kv(generate, "--target", "target", "Total records (or abstracts) to accept");
  add_kv(generate, "--batch", "batch_size", "Associations requested per prompt");
  add_kv(generate, "--retry-limit", "retry_limit", "Retries per request after the first attempt");
  add_kv(generate, "--backoff-ms", "backoff_ms", "Base backoff in milliseconds (doubles per retry)");
  add_kv(generate, "--rpm", "rpm", "Requests-per-minute cap (0 = unlimited)");
  add_kv(generate, "--temperature", "temperature", "Sampling temperature passthrough");
  add_kv(generate, "--mock", "mock_fixture", "Recorded-response fixture file (offline transport)");
  add_kv(generate, "--exemplar", "exemplar_file", "One-shot exemplar JSON file");
  add_kv(generate, "--preamble", "preamble", "System preamble prepended to the prompt");
  add_kv(generate, "--disease-list", "disease_list", "Disease names for --mode abstracts");
  add_kv(generate, "--abstract-template", "abstract_template",
         "Prompt template with {disease} placeholder");

  add_kv(fixtures, "--seed", "seed", "Fixture RNG seed");
  add_kv(fixtures, "--docs", "fixtures.docs", "Synthetic corpus size");
  add_kv(fixtures, "--records", "fixtures.records", "Synthetic dataset size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  RunConfig config;
  try {
    if (!config_path.empty())
      bioverify::apply_config_map(config, bioverify::load_config_file(config_path));
    pending.apply(config);

    if (app.got_subcommand(verify_terms)) return bioverify::run_verify_terms(config, std::cerr);
    if (app.got_subcommand(verify_assoc)) return bioverify::run_verify_assoc(config, std::cerr);
    if (app.got_subcommand(consistency)) return bioverify::run_consistency(config, std::cerr);
    if (app.got_subcommand(generate)) return bioverify::run_generate(config, std::cerr);
    if (app.got_subcommand(fixtures)) return bioverify::run_fixtures(config, std::cerr);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
