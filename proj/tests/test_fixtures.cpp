#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "bioverify/cooccur.hpp"
#include "bioverify/fixtures.hpp"

using namespace bioverify;

namespace {

FixtureSpec small_spec() {
  FixtureSpec spec;
  spec.seed = 7;
  spec.doc_count = 600;
  spec.record_count = 80;
  spec.out_of_range_docs = 6;
  return spec;
}

}  // namespace

TEST_CASE("fixture generation is deterministic per seed") {
  const FixtureBundle a = generate_fixture(small_spec());
  const FixtureBundle b = generate_fixture(small_spec());
  CHECK(a.corpus_jsonl == b.corpus_jsonl);
  CHECK(a.dataset_json == b.dataset_json);
  CHECK(a.ontology_obo == b.ontology_obo);
  CHECK(a.manifest == b.manifest);

  FixtureSpec other = small_spec();
  other.seed = 8;
  CHECK(generate_fixture(other).corpus_jsonl != a.corpus_jsonl);
}

TEST_CASE("generated corpus and dataset load cleanly") {
  const FixtureBundle bundle = generate_fixture(small_spec());
  const auto corpus = load_corpus_text(bundle.corpus_jsonl);
  CHECK(corpus.corpus.docs.size() == 600);
  CHECK(corpus.skipped_malformed == 0);
  CHECK(corpus.skipped_duplicates == 0);

  const auto dataset = parse_associations(bundle.dataset_json, AssociationKind::DiseaseSymptom);
  CHECK(dataset.records.size() == 80);
  CHECK(dataset.rejected.empty());
  CHECK(dedup(dataset.records).duplicate_count == 0);

  const Ontology ont = parse_obo_text(bundle.ontology_obo, "DOID");
  CHECK(ont.terms.size() == 80);
}

TEST_CASE("planted counts are recovered exactly by both engines") {
  const FixtureBundle bundle = generate_fixture(small_spec());
  const auto corpus = load_corpus_text(bundle.corpus_jsonl).corpus;
  const auto records =
      parse_associations(bundle.dataset_json, AssociationKind::DiseaseSymptom).records;
  const Ontology ont = parse_obo_text(bundle.ontology_obo, "DOID");

  OntologyBindings bindings;
  bindings.disease = &ont;
  const PeriodSpec periods = PeriodSpec::default_spec();
  const auto buckets = bucket_by_period(corpus, periods);

  for (const bool synonyms_on : {true, false}) {
    const PatternResolver resolver = make_pattern_resolver(bindings, synonyms_on);
    const auto patterns = collect_patterns(records, resolver);
    const char* key = synonyms_on ? "expected_synonyms_on" : "expected_synonyms_off";
    for (const auto& period : periods.periods) {
      const auto index = build_index(buckets.at(period.label), patterns, 2);
      const auto hits = verify_associations_indexed(records, resolver, index);
      // per-record exact recovery against the manifest
      for (std::size_t i = 0; i < hits.size(); ++i) {
        const auto& row = bundle.manifest["records"][i];
        std::size_t expected = 0;
        if (row["direct"].contains(period.label))
          expected += row["direct"][period.label].get<std::size_t>();
        if (synonyms_on && row["synonym_extra"].contains(period.label))
          expected += row["synonym_extra"][period.label].get<std::size_t>();
        INFO("record " << i << " period " << period.label << " synonyms " << synonyms_on);
        REQUIRE(hits[i].count == expected);
      }
      const auto stats = coverage_stats(hits, AssociationKind::DiseaseSymptom, period.label);
      const auto& expected_stats = bundle.manifest[key][period.label];
      CHECK(stats.verified_count == expected_stats["verified_count"].get<std::size_t>());
    }
  }
}

TEST_CASE("synonym-only plants vanish when synonyms are off") {
  FixtureSpec spec = small_spec();
  spec.record_count = 40;
  const FixtureBundle bundle = generate_fixture(spec);
  std::size_t on_total = 0, off_total = 0;
  for (const auto& period : spec.periods.periods) {
    on_total += bundle.manifest["expected_synonyms_on"][period.label]["verified_count"]
                    .get<std::size_t>();
    off_total += bundle.manifest["expected_synonyms_off"][period.label]["verified_count"]
                     .get<std::size_t>();
  }
  // the fixture plants synonym-only co-occurrences, so the two modes differ
  CHECK(on_total >= off_total);
  std::size_t synonym_records = 0;
  for (const auto& row : bundle.manifest["records"])
    for (const auto& [label, n] : row["synonym_extra"].items())
      synonym_records += n.get<std::size_t>() > 0;
  CHECK(synonym_records > 0);
}

TEST_CASE("fixture spec validation") {
  FixtureSpec bad;
  bad.doc_count = 4;
  bad.out_of_range_docs = 4;
  CHECK_THROWS_AS(generate_fixture(bad), std::invalid_argument);
}
