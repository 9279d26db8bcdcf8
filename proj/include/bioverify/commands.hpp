#pragma once

#include <cstdlib>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "bioverify/config.hpp"
#include "bioverify/cooccur.hpp"
#include "bioverify/fixtures.hpp"
#include "bioverify/genharness.hpp"
#include "bioverify/http_transport.hpp"
#include "bioverify/report.hpp"
#include "bioverify/term_verify.hpp"

namespace bioverify {

namespace detail {

inline void require_exists(const std::filesystem::path& path, const std::string& what) {
  if (path.empty()) throw UsageError("missing required path: " + what);
  if (!std::filesystem::exists(path))
    throw UsageError(what + " does not exist: " + path.string());
}

struct LoadedOntologies {
  std::map<std::string, Ontology> by_prefix;
  OntologyBindings bindings() const {
    OntologyBindings b;
    if (auto it = by_prefix.find("DOID"); it != by_prefix.end()) b.disease = &it->second;
    if (auto it = by_prefix.find("CHEBI"); it != by_prefix.end()) b.drug = &it->second;
    if (auto it = by_prefix.find("SYMP"); it != by_prefix.end()) b.symptom = &it->second;
    if (auto it = by_prefix.find("GO"); it != by_prefix.end()) b.process = &it->second;
    return b;
  }
};

/// Loads every configured ontology and rejects files whose term IDs carry a
/// different prefix than the role they were supplied for.
inline LoadedOntologies load_ontologies(const RunConfig& config, RunManifest& manifest,
                                        std::ostream& log) {
  LoadedOntologies loaded;
  for (const auto& [prefix, path] : config.ontologies) {
    require_exists(path, "ontology file for prefix " + prefix);
    Ontology ont = load_ontology_file(path, prefix);
    if (!ont.terms.empty()) {
      const auto hist = prefix_histogram(ont);
      std::size_t matching = 0;
      if (auto it = hist.find(prefix); it != hist.end()) matching = it->second;
      if (matching == 0) {
        std::string dominant;
        std::size_t best = 0;
        for (const auto& [p, n] : hist)
          if (n > best) { best = n; dominant = p; }
        throw UsageError("ontology prefix mismatch: expected " + prefix + " but " + path.string() +
                         " contains " + dominant + " terms");
      }
    }
    if (ont.parse_warnings > 0)
      log << "warning: " << ont.parse_warnings << " malformed stanza(s) skipped in "
          << path.string() << "\n";
    manifest.add_input("ontology:" + prefix, path.string(), ont.source_checksum);
    loaded.by_prefix.emplace(prefix, std::move(ont));
  }
  return loaded;
}

inline std::vector<AssociationRecord> load_dataset(const std::filesystem::path& path,
                                                   AssociationKind kind, RunManifest& manifest,
                                                   std::ostream& log, const char* role = "dataset") {
  require_exists(path, role);
  const std::string text = read_file(path);
  manifest.add_input(role, path.string(), sha256_hex(text));
  ParseOutcome outcome = parse_associations(text, kind);
  if (!outcome.rejected.empty())
    log << "warning: " << outcome.rejected.size() << " of " << outcome.elements
        << " dataset elements rejected in " << path.string() << "\n";
  return std::move(outcome.records);
}

inline std::vector<ReportFormat> resolve_formats(const RunConfig& config) {
  std::vector<ReportFormat> formats;
  for (const auto& f : config.formats) formats.push_back(report_format_from_string(f));
  if (formats.empty()) throw UsageError("no report formats configured");
  return formats;
}

inline void write_manifest(const RunConfig& config, RunManifest& manifest) {
  manifest.created_at = utc_timestamp();
  manifest.config = config.snapshot;
  write_file(config.output_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
}

}  // namespace detail

/// verify-terms: Table-2-shaped term accuracy over one dataset.
inline int run_verify_terms(const RunConfig& config, std::ostream& log) {
  if (!config.kind) throw UsageError("verify-terms requires --kind");
  const AssociationKind kind = *config.kind;
  detail::require_exists(config.dataset, "dataset");

  RunManifest manifest;
  const auto loaded = detail::load_ontologies(config, manifest, log);
  const OntologyBindings bindings = loaded.bindings();

  GeneLexicon lexicon;
  const GeneLexicon* lexicon_ptr = nullptr;
  const bool needs_lexicon =
      kind == AssociationKind::DiseaseGene || kind == AssociationKind::ProcessGene;
  if (needs_lexicon || !config.lexicon.empty()) {
    detail::require_exists(config.lexicon, "gene lexicon");
    lexicon = load_gene_lexicon_file(config.lexicon);
    manifest.add_input("lexicon", config.lexicon.string(), lexicon.source_checksum);
    lexicon_ptr = &lexicon;
  }

  // missing-ontology errors surface before any record is scanned
  const auto records = detail::load_dataset(config.dataset, kind, manifest, log);
  TermAccuracyReport report;
  try {
    report = verify_dataset(kind, records, bindings, lexicon_ptr, config.effective_workers());
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  log << "verify-terms: " << report.records_unique << " unique records (" << report.duplicates
      << " duplicates removed)\n";

  const std::string digest = manifest.provenance_digest();
  for (const auto format : detail::resolve_formats(config)) {
    const auto name = std::string("term_accuracy.") + report_format_extension(format);
    write_file(config.output_dir / name, emit_term_accuracy(report, format, digest));
  }
  detail::write_manifest(config, manifest);
  return 0;
}

/// verify-assoc: literature co-occurrence per publication period, emitting
/// Table-3/4-shaped coverage rows plus per-record hit lines.
inline int run_verify_assoc(const RunConfig& config, std::ostream& log) {
  if (!config.kind) throw UsageError("verify-assoc requires --kind");
  AssociationKind kind = *config.kind;
  detail::require_exists(config.dataset, "dataset");
  detail::require_exists(config.corpus, "corpus");
  config.periods.validate();

  RunManifest manifest;
  const auto loaded = detail::load_ontologies(config, manifest, log);
  const OntologyBindings bindings = loaded.bindings();

  auto records = detail::load_dataset(config.dataset, kind, manifest, log);
  if (config.derive_process_gene) {
    if (kind != AssociationKind::DiseaseGene)
      throw UsageError("--derive-process-gene requires --kind disease-gene");
    const DeriveResult derived = derive_process_gene_pairs(records);
    if (derived.skipped > 0)
      log << "warning: " << derived.skipped << " records lacked process or gene fields\n";
    records = derived.records;
    kind = AssociationKind::ProcessGene;
  }
  const DedupResult dd = dedup(records);
  log << "verify-assoc: " << dd.unique.size() << " unique records (" << dd.duplicate_count
      << " duplicates removed)\n";

  const CorpusLoadResult corpus_load = load_corpus_file(config.corpus);
  manifest.add_input("corpus", config.corpus.string(), corpus_load.corpus.source_checksum);
  if (corpus_load.skipped_malformed + corpus_load.skipped_duplicates > 0)
    log << "warning: corpus skipped " << corpus_load.skipped_malformed << " malformed and "
        << corpus_load.skipped_duplicates << " duplicate line(s)\n";
  if (corpus_load.corpus.docs.empty()) log << "warning: corpus is empty; report flagged\n";

  const PatternResolver resolver = make_pattern_resolver(bindings, config.synonyms);
  const auto buckets = bucket_by_period(corpus_load.corpus, config.periods);
  if (const auto it = buckets.find(kOutOfRangeLabel); it != buckets.end() && !it->second.docs.empty())
    log << "note: " << it->second.docs.size()
        << " doc(s) outside all periods excluded from verification\n";

  const std::size_t sample_cap =
      config.verbose_hits ? std::numeric_limits<std::size_t>::max() : kDefaultHitSampleCap;
  std::vector<CoverageRow> rows;
  std::string hits_jsonl;
  const auto patterns = collect_patterns(dd.unique, resolver);
  for (const auto& period : config.periods.periods) {
    const Corpus& bucket = buckets.at(period.label);
    const OccurrenceIndex index = build_index(bucket, patterns, config.effective_workers());
    const auto hits = verify_associations_indexed(dd.unique, resolver, index, sample_cap);
    rows.push_back(coverage_stats(hits, kind, period.label));
    hits_jsonl += emit_hits_jsonl(hits, period.label);
  }

  const std::string digest = manifest.provenance_digest();
  std::map<std::string, std::string> metadata = {
      {"hit_ratio_denominator", "corpus_size"},
      {"synonyms", config.synonyms ? "on" : "off"},
  };
  if (corpus_load.corpus.docs.empty()) metadata["corpus_empty"] = "true";
  for (const auto format : detail::resolve_formats(config)) {
    const auto name = std::string("coverage.") + report_format_extension(format);
    write_file(config.output_dir / name, emit_coverage(rows, format, digest, metadata));
  }
  write_file(config.output_dir / "hits.jsonl", hits_jsonl);
  detail::write_manifest(config, manifest);
  return 0;
}

/// consistency: generated associations checked against per-model simulated
/// abstract corpora; one Table-5-shaped row per model per kind.
inline int run_consistency(const RunConfig& config, std::ostream& log) {
  if (config.kind_datasets.empty())
    throw UsageError("consistency requires at least one --dataset kind=path");
  if (config.model_corpora.empty())
    throw UsageError("consistency requires at least one --model-corpus name=path");

  RunManifest manifest;
  const auto loaded = detail::load_ontologies(config, manifest, log);
  const PatternResolver resolver =
      config.ontologies.empty() ? raw_pattern_resolver()
                                : make_pattern_resolver(loaded.bindings(), config.synonyms);

  std::map<std::string, std::vector<AssociationRecord>> datasets;
  for (const auto& [kind_name_str, path] : config.kind_datasets) {
    const AssociationKind kind = kind_from_string(kind_name_str);
    datasets[kind_name_str] =
        detail::load_dataset(path, kind, manifest, log, ("dataset:" + kind_name_str).c_str());
  }

  std::vector<ConsistencyRow> rows;
  for (const auto& [model, corpus_path] : config.model_corpora) {
    if (!std::filesystem::exists(corpus_path)) {
      log << "warning: simulated corpus for model " << model << " missing ("
          << corpus_path.string() << "); rows skipped\n";
      continue;
    }
    const CorpusLoadResult sim = load_corpus_file(corpus_path);
    manifest.add_input("corpus:" + model, corpus_path.string(), sim.corpus.source_checksum);
    for (const auto& [kind_name_str, records] : datasets) {
      ConsistencyRow row =
          consistency_check(records, sim.corpus, model, resolver, config.effective_workers());
      row.kind = kind_from_string(kind_name_str);
      if (row.flagged) log << "warning: " << model << "/" << kind_name_str << ": " << row.note << "\n";
      rows.push_back(std::move(row));
    }
  }

  const std::string digest = manifest.provenance_digest();
  for (const auto format : detail::resolve_formats(config)) {
    const auto name = std::string("consistency.") + report_format_extension(format);
    write_file(config.output_dir / name, emit_consistency(rows, format, digest));
  }
  detail::write_manifest(config, manifest);
  return 0;
}

namespace detail {

inline std::unique_ptr<Transport> make_transport(const RunConfig& config);

inline std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value && *value ? value : fallback;
}

inline int run_generate_abstracts(const RunConfig& config, Transport& transport,
                                  std::ostream& log);

}  // namespace detail

/// generate: drive a chat-completion endpoint (live or recorded) to produce
/// association datasets, or simulated abstracts in --mode abstracts.
inline int run_generate(const RunConfig& config, std::ostream& log) {
  auto transport = detail::make_transport(config);
  if (config.generate_mode == "abstracts")
    return detail::run_generate_abstracts(config, *transport, log);
  if (config.generate_mode != "associations")
    throw UsageError("unknown generate mode: " + config.generate_mode);
  if (!config.kind) throw UsageError("generate requires --kind");

  GenerationOptions options;
  options.prompt.kind = *config.kind;
  options.prompt.batch_size = config.batch_size;
  options.prompt.system_preamble = config.preamble;
  options.prompt.one_shot_example = config.exemplar_file.empty()
                                        ? default_one_shot_example(*config.kind)
                                        : read_file(config.exemplar_file);
  options.model = config.model;
  options.endpoint_label = config.mock_fixture.empty() ? config.endpoint : "mock";
  options.target_records = config.target_records;
  options.retry.retry_limit = config.retry_limit;
  options.retry.base_backoff = std::chrono::milliseconds(config.backoff_ms);
  options.requests_per_minute = config.requests_per_minute;
  if (config.temperature) options.sampling["temperature"] = *config.temperature;

  try {
    options.prompt.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const GenerationResult result = run_generation(options, *transport);
  const auto& s = result.session;
  log << "generate: " << s.requests_sent << " request(s), " << s.retries << " retries, "
      << s.records_accepted << " accepted, " << s.records_rejected << " rejected, "
      << s.responses_rejected << " response(s) rejected\n";

  RunManifest manifest;
  manifest.created_at = utc_timestamp();
  manifest.config = config.snapshot;

  const std::string dataset_name = std::string(kind_name(*config.kind)) + ".json";
  write_file(config.output_dir / dataset_name, serialize_associations(result.records));

  std::set<std::string> batch_ids;
  for (const auto& rec : result.records) batch_ids.insert(rec.provenance.batch_id);
  nlohmann::ordered_json side;
  side["kind"] = kind_name(*config.kind);
  side["model_name"] = config.model;
  side["endpoint"] = options.endpoint_label;
  side["records"] = result.records.size();
  side["batches"] = batch_ids.size();
  side["sampling"] = options.sampling;
  side["session"] = {{"requests_sent", s.requests_sent},
                     {"retries", s.retries},
                     {"records_accepted", s.records_accepted},
                     {"records_rejected", s.records_rejected},
                     {"responses_rejected", s.responses_rejected},
                     {"elements_seen", s.elements_seen}};
  side["target_reached"] = result.target_reached;
  write_file(config.output_dir / "session_manifest.json", side.dump(2) + "\n");

  std::string rejects;
  for (const auto& r : result.rejected) {
    nlohmann::ordered_json j;
    j["reason"] = r.reason;
    j["raw"] = r.raw;
    rejects += j.dump() + "\n";
  }
  write_file(config.output_dir / "rejected.jsonl", rejects);
  write_file(config.output_dir / "manifest.json", manifest.to_json().dump(2) + "\n");

  if (!result.target_reached) {
    log << "error: request budget exhausted before reaching target of " << config.target_records
        << " records\n";
    return 1;
  }
  return 0;
}

/// fixtures: synthetic corpus + dataset + ontology with planted co-occurrence
/// counts, plus a ground-truth manifest for them.
inline int run_fixtures(const RunConfig& config, std::ostream& log) {
  FixtureSpec spec;
  spec.seed = config.seed;
  spec.doc_count = config.fixture_docs;
  spec.record_count = config.fixture_records;
  spec.periods = config.periods;
  if (config.kind) spec.kind = *config.kind;

  FixtureBundle bundle;
  try {
    bundle = generate_fixture(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_file(config.output_dir / "corpus.jsonl", bundle.corpus_jsonl);
  write_file(config.output_dir / "dataset.json", bundle.dataset_json);
  write_file(config.output_dir / "ontology.obo", bundle.ontology_obo);
  write_file(config.output_dir / "fixture_manifest.json", bundle.manifest.dump(2) + "\n");
  log << "fixtures: " << spec.doc_count << " docs, " << spec.record_count << " records -> "
      << config.output_dir.string() << "\n";
  return 0;
}

namespace detail {

inline std::unique_ptr<Transport> make_transport(const RunConfig& config) {
  if (!config.mock_fixture.empty()) {
    require_exists(config.mock_fixture, "mock fixture");
    return std::make_unique<FixtureTransport>(config.mock_fixture);
  }
  const std::string endpoint = !config.endpoint.empty()
                                   ? config.endpoint
                                   : env_or("GENAI_ENDPOINT", "");
  if (endpoint.empty())
    throw UsageError("generate requires --endpoint (or GENAI_ENDPOINT) or --mock fixture file");
  const std::string api_key = !config.api_key.empty() ? config.api_key : env_or("GENAI_API_KEY", "");
  return std::make_unique<HttpTransport>(endpoint, api_key);
}

inline int run_generate_abstracts(const RunConfig& config, Transport& transport, std::ostream& log) {
  require_exists(config.disease_list, "disease list");
  if (config.abstract_template.find("{disease}") == std::string::npos)
    throw UsageError("abstract_template must contain the {disease} placeholder");

  std::vector<std::string> diseases;
  {
    std::istringstream in(read_file(config.disease_list));
    std::string line;
    while (std::getline(in, line))
      if (auto t = trim(line); !t.empty() && t.front() != '#') diseases.push_back(t);
  }
  if (diseases.empty()) throw UsageError("disease list is empty");

  GenerationSession session;
  session.model_name = config.model;
  RetryPolicy policy{config.retry_limit, std::chrono::milliseconds(config.backoff_ms)};
  nlohmann::json sampling = nlohmann::json::object();
  if (config.temperature) sampling["temperature"] = *config.temperature;

  std::string corpus_jsonl;
  std::size_t produced = 0;
  for (std::size_t i = 0; produced < config.target_records; ++i) {
    const std::string& disease = diseases[i % diseases.size()];
    std::string prompt = config.abstract_template;
    prompt.replace(prompt.find("{disease}"), 9, disease);
    const std::string body =
        request_batch(session, make_chat_request(config.model, prompt, sampling), transport, policy);
    const std::string content = trim(strip_code_fences(extract_content(body)));
    if (content.empty()) {
      ++session.responses_rejected;
      continue;
    }
    nlohmann::ordered_json doc;
    doc["doc_id"] = config.model + "-" + std::to_string(produced);
    doc["title"] = disease;
    doc["body"] = content;
    doc["year"] = config.simulated_year;
    corpus_jsonl += doc.dump() + "\n";
    ++produced;
    if (i > config.target_records * 4 + 4) break;  // budget guard
  }
  write_file(config.output_dir / (config.model + "_abstracts.jsonl"), corpus_jsonl);
  log << "generate: " << produced << " simulated abstract(s) written\n";
  return produced >= config.target_records ? 0 : 1;
}

}  // namespace detail

}  // namespace bioverify
