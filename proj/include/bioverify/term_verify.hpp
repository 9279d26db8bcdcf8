#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "bioverify/assoc.hpp"
#include "bioverify/ontology.hpp"

namespace bioverify {

enum class MatchKind { NameLiteral, Synonym, Unverified };

inline const char* to_string(MatchKind m) {
  switch (m) {
    case MatchKind::NameLiteral: return "name";
    case MatchKind::Synonym: return "synonym";
    default: return "unverified";
  }
}

struct IdVerdict {
  bool syntactically_valid = false;
  bool exists_in_ontology = false;
  bool id_name_consistent = false;

  bool operator==(const IdVerdict&) const = default;
};

struct TermVerdict {
  std::string label;
  MatchKind match = MatchKind::Unverified;
  std::set<std::string> matched_ids;
  std::optional<IdVerdict> id_checked;
};

/// Literal name match first, then synonym match, both on normalized strings.
/// Exact equality only -- no fuzzy or edit-distance matching.
inline TermVerdict verify_term(const std::string& label, const Ontology& ontology) {
  TermVerdict v;
  v.label = label;
  const std::string key = normalize(label);
  if (key.empty()) return v;
  if (auto it = ontology.name_index.find(key); it != ontology.name_index.end()) {
    v.match = MatchKind::NameLiteral;
    v.matched_ids = it->second;
    return v;
  }
  if (auto it = ontology.synonym_index.find(key); it != ontology.synonym_index.end()) {
    v.match = MatchKind::Synonym;
    v.matched_ids = it->second;
  }
  return v;
}

/// The three checks form a chain: id_name_consistent implies
/// exists_in_ontology implies syntactically_valid. Later checks are only
/// attempted once the earlier ones hold.
inline IdVerdict validate_id(const TermRef& ref, const Ontology& ontology) {
  IdVerdict v;
  const std::string& id = ref.id;
  const std::string& prefix = ontology.prefix;
  if (id.size() <= prefix.size() + 1 || id.compare(0, prefix.size(), prefix) != 0 ||
      id[prefix.size()] != ':')
    return v;
  for (std::size_t i = prefix.size() + 1; i < id.size(); ++i)
    if (std::isdigit(static_cast<unsigned char>(id[i])) == 0) return v;
  v.syntactically_valid = true;

  const OntologyTerm* term = ontology.lookup(id);
  if (!term) return v;
  v.exists_in_ontology = true;

  const std::string key = normalize(ref.label);
  if (key.empty()) return v;
  if (normalize(term->name) == key) {
    v.id_name_consistent = true;
    return v;
  }
  for (const auto& syn : term->synonyms) {
    if (normalize(syn.text) == key) {
      v.id_name_consistent = true;
      break;
    }
  }
  return v;
}

/// Label verification plus the ID audit for the same reference.
inline TermVerdict verify_term_with_id(const TermRef& ref, const Ontology& ontology) {
  TermVerdict v = verify_term(ref.label, ontology);
  if (!ref.id.empty()) v.id_checked = validate_id(ref, ontology);
  return v;
}

/// Ontology handles for the sides of each association kind.
struct OntologyBindings {
  const Ontology* disease = nullptr;  // DOID
  const Ontology* drug = nullptr;     // ChEBI
  const Ontology* symptom = nullptr;  // SYMP
  const Ontology* process = nullptr;  // GO

  const Ontology* source_ontology(AssociationKind kind) const {
    return kind == AssociationKind::ProcessGene ? process : disease;
  }
  const Ontology* target_ontology(AssociationKind kind) const {
    switch (kind) {
      case AssociationKind::DiseaseDrug: return drug;
      case AssociationKind::DiseaseSymptom: return symptom;
      default: return nullptr;  // gene symbols are checked against the lexicon
    }
  }
};

/// Flat gene-symbol list, one symbol per line, matched on normalized form.
struct GeneLexicon {
  std::set<std::string> symbols;
  std::string source_checksum;

  bool contains(const std::string& label) const { return symbols.count(normalize(label)) > 0; }
};

inline GeneLexicon parse_gene_lexicon(std::string_view text) {
  GeneLexicon lex;
  lex.source_checksum = sha256_hex(text);
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (auto key = normalize(t); !key.empty()) lex.symbols.insert(key);
  }
  return lex;
}

inline GeneLexicon load_gene_lexicon_file(const std::filesystem::path& path) {
  return parse_gene_lexicon(read_file(path));
}

struct AccuracyRow {
  std::string category;
  std::string feature;
  std::size_t numerator = 0;
  std::size_t denominator = 0;

  /// Undefined when the denominator is zero; rendered as "n/a", never 0%.
  std::optional<double> fraction() const {
    if (denominator == 0) return std::nullopt;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

struct TermAccuracyReport {
  std::vector<AccuracyRow> rows;
  std::size_t records_in = 0;
  std::size_t records_unique = 0;
  std::size_t duplicates = 0;
};

namespace detail {

struct SideTally {
  std::size_t total = 0;
  std::size_t name_hits = 0;
  std::size_t synonym_hits = 0;
  std::size_t combined_hits = 0;
  std::size_t with_id = 0;
  std::size_t id_syntactic = 0;
  std::size_t id_exists = 0;
  std::size_t id_consistent = 0;
  std::size_t lexicon_total = 0;
  std::size_t lexicon_hits = 0;

  void merge(const SideTally& o) {
    total += o.total;
    name_hits += o.name_hits;
    synonym_hits += o.synonym_hits;
    combined_hits += o.combined_hits;
    with_id += o.with_id;
    id_syntactic += o.id_syntactic;
    id_exists += o.id_exists;
    id_consistent += o.id_consistent;
    lexicon_total += o.lexicon_total;
    lexicon_hits += o.lexicon_hits;
  }
};

struct CategoryPlan {
  std::string name;
  enum class Side { Source, Target, GoProcess } side;
  const Ontology* ontology = nullptr;  // null => gene lexicon category
};

inline std::vector<CategoryPlan> category_plans(AssociationKind kind, const OntologyBindings& onts) {
  using Side = CategoryPlan::Side;
  switch (kind) {
    case AssociationKind::DiseaseDrug:
      return {{"Disease", Side::Source, onts.disease}, {"Drug", Side::Target, onts.drug}};
    case AssociationKind::DiseaseSymptom:
      return {{"Disease", Side::Source, onts.disease}, {"Symptom", Side::Target, onts.symptom}};
    case AssociationKind::DiseaseGene:
      return {{"Disease", Side::Source, onts.disease},
              {"Genetic process", Side::GoProcess, onts.process},
              {"Gene", Side::Target, nullptr}};
    default:
      return {{"Genetic process", Side::Source, onts.process}, {"Gene", Side::Target, nullptr}};
  }
}

inline const TermRef* category_ref(const AssociationRecord& rec, CategoryPlan::Side side) {
  switch (side) {
    case CategoryPlan::Side::Source: return &rec.source;
    case CategoryPlan::Side::Target: return &rec.target;
    default: return rec.go_process ? &*rec.go_process : nullptr;
  }
}

inline void tally_record(const AssociationRecord& rec, const std::vector<CategoryPlan>& plans,
                         const GeneLexicon* lexicon, std::vector<SideTally>& tallies) {
  for (std::size_t c = 0; c < plans.size(); ++c) {
    const auto& plan = plans[c];
    const TermRef* ref = category_ref(rec, plan.side);
    if (!ref) continue;
    auto& t = tallies[c];
    if (!plan.ontology) {
      ++t.lexicon_total;
      if (lexicon && lexicon->contains(ref->label)) ++t.lexicon_hits;
      continue;
    }
    ++t.total;
    const TermVerdict v = verify_term_with_id(*ref, *plan.ontology);
    if (v.match == MatchKind::NameLiteral) ++t.name_hits;
    if (v.match == MatchKind::Synonym) ++t.synonym_hits;
    if (v.match != MatchKind::Unverified) ++t.combined_hits;
    if (v.id_checked) {
      ++t.with_id;
      if (v.id_checked->syntactically_valid) ++t.id_syntactic;
      if (v.id_checked->exists_in_ontology) ++t.id_exists;
      if (v.id_checked->id_name_consistent) ++t.id_consistent;
    }
  }
}

}  // namespace detail

/// Runs the term verifier over a deduplicated dataset and tallies per-category
/// accuracy rows. The synonym rate is reported on two bases (all records, and
/// the residual that failed literal match); interpretation is the reader's.
/// Counting is an order-independent reduction, so any worker count yields the
/// same report.
inline TermAccuracyReport verify_dataset(AssociationKind kind,
                                         const std::vector<AssociationRecord>& records,
                                         const OntologyBindings& ontologies,
                                         const GeneLexicon* gene_lexicon = nullptr,
                                         unsigned workers = 1) {
  const auto plans = detail::category_plans(kind, ontologies);
  for (const auto& plan : plans) {
    if (plan.name == "Gene") {
      if (!gene_lexicon)
        throw std::runtime_error("verify_dataset: gene lexicon required for " +
                                 std::string(kind_name(kind)) + " datasets");
    } else if (!plan.ontology) {
      throw std::runtime_error("verify_dataset: missing ontology for category " + plan.name);
    }
  }
  for (const auto& rec : records)
    if (rec.kind != kind)
      throw std::invalid_argument("verify_dataset: record kind does not match dataset kind");

  const DedupResult dd = dedup(records);

  std::vector<detail::SideTally> tallies(plans.size());
  if (workers <= 1 || dd.unique.size() < 2 * workers) {
    for (const auto& rec : dd.unique) detail::tally_record(rec, plans, gene_lexicon, tallies);
  } else {
    const std::size_t n = dd.unique.size();
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::vector<detail::SideTally>> locals(workers,
                                                       std::vector<detail::SideTally>(plans.size()));
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      threads.emplace_back([&, w, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i)
          detail::tally_record(dd.unique[i], plans, gene_lexicon, locals[w]);
      });
    }
    for (auto& t : threads) t.join();
    for (const auto& local : locals)
      for (std::size_t c = 0; c < plans.size(); ++c) tallies[c].merge(local[c]);
  }

  TermAccuracyReport report;
  report.records_in = records.size();
  report.records_unique = dd.unique.size();
  report.duplicates = dd.duplicate_count;
  for (std::size_t c = 0; c < plans.size(); ++c) {
    const auto& plan = plans[c];
    const auto& t = tallies[c];
    if (!plan.ontology) {
      report.rows.push_back({plan.name, "lexicon", t.lexicon_hits, t.lexicon_total});
      continue;
    }
    report.rows.push_back({plan.name, "name", t.name_hits, t.total});
    report.rows.push_back({plan.name, "synonym_all", t.synonym_hits, t.total});
    report.rows.push_back({plan.name, "synonym_residual", t.synonym_hits, t.total - t.name_hits});
    report.rows.push_back({plan.name, "name/synonym", t.combined_hits, t.total});
    report.rows.push_back({plan.name, "id_syntactic", t.id_syntactic, t.with_id});
    report.rows.push_back({plan.name, "id_exists", t.id_exists, t.with_id});
    report.rows.push_back({plan.name, "id_name_consistent", t.id_consistent, t.with_id});
  }
  return report;
}

}  // namespace bioverify
