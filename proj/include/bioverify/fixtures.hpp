#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bioverify/assoc.hpp"
#include "bioverify/corpus.hpp"

namespace bioverify {

/// Synthetic-fixture plan. Term tokens always carry digits while filler
/// vocabulary is purely alphabetic, so planted phrases can never collide with
/// background text and every co-occurrence count is known by construction.
struct FixtureSpec {
  std::uint64_t seed = 42;
  std::size_t doc_count = 10000;          // includes out-of-range docs
  std::size_t record_count = 1000;
  AssociationKind kind = AssociationKind::DiseaseSymptom;
  PeriodSpec periods = PeriodSpec::default_spec();
  std::size_t out_of_range_docs = 24;
  std::size_t max_plants_per_period = 4;
  unsigned unverified_percent = 40;       // records with no plants anywhere
  std::size_t synonym_every = 10;         // every k-th covered record gets synonym-only plants
};

struct FixtureBundle {
  std::string corpus_jsonl;
  std::string dataset_json;
  std::string ontology_obo;               // source-side ontology with synonyms
  nlohmann::ordered_json manifest;        // ground-truth counts and expected stats
};

namespace detail {

inline const char* kFillerWords[] = {
    "cohort",   "patients",  "clinical", "observed",  "baseline", "outcome",  "enrolled",
    "followup", "treatment", "measured", "controls",  "between",  "analysis", "reported",
    "subjects", "findings",  "elevated", "screening", "criteria", "duration", "moderate",
    "profile",  "samples",   "registry", "exposure",  "interval", "protocol", "assessed",
    "variance", "incidence", "approach", "evidence",  "clusters", "referral", "severity",
    "adjusted", "징후없음없",  "trial",    "records",   "visits"};
// (one multibyte entry above keeps the byte-passthrough path exercised)

inline constexpr std::size_t kFillerCount = sizeof(kFillerWords) / sizeof(kFillerWords[0]);

struct FixtureRng {
  std::mt19937_64 engine;
  explicit FixtureRng(std::uint64_t seed) : engine(seed) {}
  // modulo keeps the stream independent of libstdc++ distribution internals
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine() % n); }
};

inline std::string filler_words(FixtureRng& rng, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!out.empty()) out += " ";
    out += kFillerWords[rng.below(kFillerCount)];
  }
  return out;
}

struct PlantedRecord {
  AssociationRecord record;
  std::string source_phrase;   // normalized source label
  std::string synonym_phrase;  // normalized ontology synonym of the source
  std::string target_phrase;
  std::map<std::string, std::size_t> direct;         // period label -> planted docs
  std::map<std::string, std::size_t> synonym_extra;  // synonym-only planted docs
};

}  // namespace detail

inline FixtureBundle generate_fixture(const FixtureSpec& spec) {
  spec.periods.validate();
  if (spec.doc_count < spec.out_of_range_docs + 2 * spec.periods.periods.size())
    throw std::invalid_argument("fixture spec: too few docs for the period layout");
  detail::FixtureRng rng(spec.seed);

  // --- documents -----------------------------------------------------------
  std::vector<AbstractDoc> docs;
  docs.reserve(spec.doc_count);
  std::map<std::string, std::vector<std::size_t>> period_docs;  // label -> doc indexes
  std::vector<std::size_t> out_docs;
  const std::size_t in_range = spec.doc_count - spec.out_of_range_docs;
  for (std::size_t i = 0; i < spec.doc_count; ++i) {
    AbstractDoc doc;
    doc.doc_id = "SYN" + std::to_string(i);
    doc.title = detail::filler_words(rng, 3 + rng.below(3));
    doc.body = detail::filler_words(rng, 8 + rng.below(8));
    if (i < in_range) {
      const auto& period = spec.periods.periods[i % spec.periods.periods.size()];
      doc.year = period.start_year +
                 static_cast<int>(rng.below(
                     static_cast<std::size_t>(period.end_year - period.start_year + 1)));
      period_docs[period.label].push_back(i);
    } else {
      doc.year = (i % 2 == 0) ? spec.periods.periods.front().start_year - 1
                              : spec.periods.periods.back().end_year + 1;
      out_docs.push_back(i);
    }
    docs.push_back(std::move(doc));
  }

  // --- records and planting plan -------------------------------------------
  std::vector<detail::PlantedRecord> planted;
  planted.reserve(spec.record_count);
  for (std::size_t i = 0; i < spec.record_count; ++i) {
    detail::PlantedRecord p;
    const std::string n = std::to_string(i);
    const std::string source_label = "Dz" + n + " Type" + std::to_string(i % 7);
    const std::string synonym_label = "Alt" + n + " Form" + std::to_string(i % 5);
    const std::string target_label =
        (spec.kind == AssociationKind::DiseaseGene || spec.kind == AssociationKind::ProcessGene)
            ? "GENE" + n
            : "Sym" + n;

    AssociationRecord rec;
    rec.kind = spec.kind;
    switch (spec.kind) {
      case AssociationKind::DiseaseSymptom:
        rec.source = {"DOID:" + std::to_string(1000000 + i), source_label};
        rec.target = {"SYMPTOM:" + std::to_string(2000000 + i), target_label};
        break;
      case AssociationKind::DiseaseDrug:
        rec.source = {"DOID:" + std::to_string(1000000 + i), source_label};
        rec.target = {"ChEBI:" + std::to_string(3000000 + i), target_label};
        break;
      case AssociationKind::DiseaseGene:
        rec.source = {"DOID:" + std::to_string(1000000 + i), source_label};
        rec.target = {"", target_label};
        rec.gene_symbol = target_label;
        rec.go_process = TermRef{"GO:" + std::to_string(4000000 + i), "Process" + n + " Path" + n};
        break;
      case AssociationKind::ProcessGene:
        rec.source = {"GO:" + std::to_string(4000000 + i), source_label};
        rec.target = {"", target_label};
        break;
    }
    p.record = std::move(rec);
    p.source_phrase = normalize(source_label);
    p.synonym_phrase = normalize(synonym_label);
    p.target_phrase = normalize(target_label);

    const bool covered = rng.below(100) >= spec.unverified_percent;
    if (covered) {
      const bool with_synonyms = spec.synonym_every > 0 && i % spec.synonym_every == 3;
      for (const auto& period : spec.periods.periods) {
        // plants per (record, period) stay well under the pool size so that
        // distinct-document sampling always terminates
        const std::size_t cap = period_docs[period.label].size() / 2;
        const std::size_t direct = std::min(rng.below(spec.max_plants_per_period + 1), cap);
        p.direct[period.label] = direct;
        if (with_synonyms) p.synonym_extra[period.label] = std::min(rng.below(3), cap - direct);
      }
    }
    planted.push_back(std::move(p));
  }

  // --- apply plants ---------------------------------------------------------
  auto plant_into = [&](std::size_t doc_index, const std::string& left, const std::string& right) {
    std::string text = " " + left + " " + detail::kFillerWords[rng.below(detail::kFillerCount)] +
                       " " + right;
    if (rng.below(4) == 0)
      docs[doc_index].title += text;
    else
      docs[doc_index].body += text;
  };

  for (auto& p : planted) {
    for (const auto& period : spec.periods.periods) {
      const auto& pool = period_docs[period.label];
      std::set<std::size_t> used;
      const std::size_t direct = p.direct.count(period.label) ? p.direct[period.label] : 0;
      const std::size_t extra =
          p.synonym_extra.count(period.label) ? p.synonym_extra[period.label] : 0;
      for (std::size_t k = 0; k < direct + extra; ++k) {
        std::size_t doc_index = pool[rng.below(pool.size())];
        while (used.count(doc_index)) doc_index = pool[rng.below(pool.size())];
        used.insert(doc_index);
        plant_into(doc_index, k < direct ? p.source_phrase : p.synonym_phrase, p.target_phrase);
      }
    }
  }
  // single-side occurrences: each term appears, the pair never co-occurs
  const auto& first_pool = period_docs[spec.periods.periods.front().label];
  for (std::size_t i = 0; i < planted.size() && first_pool.size() >= 2; i += 13) {
    auto& p = planted[i];
    if (!p.direct.empty() || !p.synonym_extra.empty()) continue;
    const std::size_t a = first_pool[rng.below(first_pool.size())];
    std::size_t b = first_pool[rng.below(first_pool.size())];
    while (b == a) b = first_pool[rng.below(first_pool.size())];
    docs[a].body += " " + p.source_phrase;
    docs[b].body += " " + p.target_phrase;
  }
  // out-of-range plants prove period exclusion
  if (!out_docs.empty() && !planted.empty()) {
    auto& p = planted.front();
    plant_into(out_docs[0], p.source_phrase, p.target_phrase);
  }

  // --- serialize ------------------------------------------------------------
  FixtureBundle bundle;
  for (const auto& doc : docs) {
    nlohmann::ordered_json j;
    j["doc_id"] = doc.doc_id;
    j["title"] = doc.title;
    j["body"] = doc.body;
    j["year"] = doc.year;
    bundle.corpus_jsonl += j.dump() + "\n";
  }

  std::vector<AssociationRecord> records;
  records.reserve(planted.size());
  for (const auto& p : planted) records.push_back(p.record);
  bundle.dataset_json = serialize_associations(records);

  const std::string prefix = spec.kind == AssociationKind::ProcessGene ? "GO" : "DOID";
  std::string obo = "format-version: 1.2\n";
  for (const auto& p : planted) {
    obo += "\n[Term]\n";
    obo += "id: " + p.record.source.id + "\n";
    obo += "name: " + p.record.source.label + "\n";
    obo += "synonym: \"" + p.synonym_phrase + "\" EXACT []\n";
  }
  bundle.ontology_obo = std::move(obo);

  // --- ground truth ----------------------------------------------------------
  nlohmann::ordered_json manifest;
  manifest["seed"] = spec.seed;
  manifest["doc_count"] = spec.doc_count;
  manifest["record_count"] = spec.record_count;
  manifest["out_of_range_docs"] = spec.out_of_range_docs;
  manifest["kind"] = kind_name(spec.kind);
  manifest["ontology_prefix"] = prefix;
  auto periods = nlohmann::ordered_json::array();
  for (const auto& period : spec.periods.periods)
    periods.push_back(
        {{"label", period.label}, {"start", period.start_year}, {"end", period.end_year}});
  manifest["periods"] = std::move(periods);

  auto detail_rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < planted.size(); ++i) {
    const auto& p = planted[i];
    nlohmann::ordered_json row;
    row["index"] = i;
    row["source"] = p.record.source.label;
    row["target"] = p.record.target.label;
    row["direct"] = p.direct;
    row["synonym_extra"] = p.synonym_extra;
    detail_rows.push_back(std::move(row));
  }
  manifest["records"] = std::move(detail_rows);

  for (const bool synonyms_on : {true, false}) {
    nlohmann::ordered_json per_period = nlohmann::ordered_json::object();
    for (const auto& period : spec.periods.periods) {
      std::size_t verified = 0, covered_sum = 0;
      for (const auto& p : planted) {
        std::size_t count = p.direct.count(period.label) ? p.direct.at(period.label) : 0;
        if (synonyms_on && p.synonym_extra.count(period.label))
          count += p.synonym_extra.at(period.label);
        if (count > 0) {
          ++verified;
          covered_sum += count;
        }
      }
      nlohmann::ordered_json stats;
      stats["records"] = planted.size();
      stats["verified_count"] = verified;
      stats["verified_pct"] =
          planted.empty()
              ? nlohmann::ordered_json(nullptr)
              : nlohmann::ordered_json(static_cast<double>(verified) /
                                       static_cast<double>(planted.size()));
      stats["avg_frequency"] = verified == 0
                                   ? nlohmann::ordered_json(nullptr)
                                   : nlohmann::ordered_json(static_cast<double>(covered_sum) /
                                                            static_cast<double>(verified));
      per_period[period.label] = std::move(stats);
    }
    manifest[synonyms_on ? "expected_synonyms_on" : "expected_synonyms_off"] = std::move(per_period);
  }
  bundle.manifest = std::move(manifest);
  return bundle;
}

}  // namespace bioverify
