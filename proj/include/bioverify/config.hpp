#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "bioverify/assoc.hpp"
#include "bioverify/corpus.hpp"
#include "bioverify/util.hpp"

namespace bioverify {

/// Resolved run settings. Populated from a flat key/value config file first,
/// then overridden by command-line flags (flags win).
struct RunConfig {
  std::filesystem::path output_dir = "out";
  unsigned workers = 0;  // 0 -> available parallelism
  bool synonyms = true;
  PeriodSpec periods = PeriodSpec::default_spec();
  std::vector<std::string> formats = {"csv", "json", "markdown"};
  bool verbose_hits = false;

  std::optional<AssociationKind> kind;
  std::filesystem::path dataset;
  std::map<std::string, std::filesystem::path> ontologies;  // prefix -> OBO file
  std::filesystem::path lexicon;
  std::filesystem::path corpus;
  bool derive_process_gene = false;

  // consistency
  std::map<std::string, std::filesystem::path> kind_datasets;  // kind name -> dataset
  std::map<std::string, std::filesystem::path> model_corpora;  // model -> simulated corpus

  // generation
  std::string endpoint;
  std::string api_key;
  std::string model = "gpt-4o";
  std::string generate_mode = "associations";  // or "abstracts"
  std::size_t target_records = 50;
  int batch_size = 10;
  std::size_t retry_limit = 3;
  long backoff_ms = 250;
  double requests_per_minute = 0;
  std::optional<double> temperature;
  std::filesystem::path mock_fixture;
  std::filesystem::path exemplar_file;
  std::string preamble;
  std::filesystem::path disease_list;
  std::string abstract_template =
      "Write a biomedical abstract about the human disease {disease}.";
  int simulated_year = 2024;

  // fixtures
  std::uint64_t seed = 42;
  std::size_t fixture_docs = 10000;
  std::size_t fixture_records = 1000;

  std::map<std::string, std::string> snapshot;  // raw keys as given, for the manifest

  unsigned effective_workers() const {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
  }
};

/// Flat `key = value` file; '#' starts a comment. Values may be quoted.
inline std::map<std::string, std::string> load_config_file(const std::filesystem::path& path) {
  std::map<std::string, std::string> kv;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("config " + path.string() + ":" + std::to_string(lineno) +
                       ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty())
      throw UsageError("config " + path.string() + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

namespace detail {

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
  if (value == "off" || value == "false" || value == "0" || value == "no") return false;
  throw UsageError("config: " + key + " must be on/off, got '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  try {
    if constexpr (std::is_floating_point_v<T>)
      return static_cast<T>(std::stod(value));
    else
      return static_cast<T>(std::stoll(value));
  } catch (const std::exception&) {
    throw UsageError("config: " + key + " must be numeric, got '" + value + "'");
  }
}

inline std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

}  // namespace detail

/// Applies one key/value pair. Unknown keys are an error so typos surface at
/// startup, not as silently ignored settings.
inline void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
  config.snapshot[key] = value;
  if (key == "output_dir") config.output_dir = value;
  else if (key == "workers") config.workers = detail::parse_number<unsigned>(key, value);
  else if (key == "synonyms") config.synonyms = detail::parse_bool(key, value);
  else if (key == "periods") {
    try {
      config.periods = PeriodSpec::parse(value);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
  } else if (key == "formats") config.formats = detail::split_csv(value);
  else if (key == "verbose_hits") config.verbose_hits = detail::parse_bool(key, value);
  else if (key == "kind") config.kind = kind_from_string(value);
  else if (key == "dataset") config.dataset = value;
  else if (key.rfind("ontology.", 0) == 0) config.ontologies[key.substr(9)] = value;
  else if (key == "lexicon") config.lexicon = value;
  else if (key == "corpus") config.corpus = value;
  else if (key == "derive_process_gene") config.derive_process_gene = detail::parse_bool(key, value);
  else if (key.rfind("consistency.dataset.", 0) == 0) config.kind_datasets[key.substr(20)] = value;
  else if (key.rfind("consistency.corpus.", 0) == 0) config.model_corpora[key.substr(19)] = value;
  else if (key == "endpoint") config.endpoint = value;
  else if (key == "api_key") config.api_key = value;
  else if (key == "model") config.model = value;
  else if (key == "mode") config.generate_mode = value;
  else if (key == "target") config.target_records = detail::parse_number<std::size_t>(key, value);
  else if (key == "batch_size") config.batch_size = detail::parse_number<int>(key, value);
  else if (key == "retry_limit") config.retry_limit = detail::parse_number<std::size_t>(key, value);
  else if (key == "backoff_ms") config.backoff_ms = detail::parse_number<long>(key, value);
  else if (key == "rpm") config.requests_per_minute = detail::parse_number<double>(key, value);
  else if (key == "temperature") config.temperature = detail::parse_number<double>(key, value);
  else if (key == "mock_fixture") config.mock_fixture = value;
  else if (key == "exemplar_file") config.exemplar_file = value;
  else if (key == "preamble") config.preamble = value;
  else if (key == "disease_list") config.disease_list = value;
  else if (key == "abstract_template") config.abstract_template = value;
  else if (key == "simulated_year") config.simulated_year = detail::parse_number<int>(key, value);
  else if (key == "seed") config.seed = detail::parse_number<std::uint64_t>(key, value);
  else if (key == "fixtures.docs") config.fixture_docs = detail::parse_number<std::size_t>(key, value);
  else if (key == "fixtures.records")
    config.fixture_records = detail::parse_number<std::size_t>(key, value);
  else throw UsageError("config: unknown key '" + key + "'");
}

inline void apply_config_map(RunConfig& config, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) apply_config_entry(config, key, value);
}

}  // namespace bioverify
