#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "bioverify/ontology.hpp"

using namespace bioverify;

namespace {

const char* kHypertensionStanza =
    "[Term]\n"
    "id: DOID:10763\n"
    "name: hypertension\n"
    "synonym: \"HTN\" EXACT []\n"
    "synonym: \"hyperpiesia\" EXACT []\n"
    "synonym: \"hypertensive disease\" RELATED []\n"
    "synonym: \"vascular hypertensive disorder\" EXACT []\n";

std::string fixture_path(const char* rel) { return std::string(BIOVERIFY_FIXTURE_DIR "/") + rel; }

}  // namespace

TEST_CASE("parse_obo reads a term stanza with scoped synonyms") {
  const Ontology ont = parse_obo_text(kHypertensionStanza, "DOID");
  REQUIRE(ont.terms.size() == 1);
  const auto& term = ont.terms.at("DOID:10763");
  CHECK(term.name == "hypertension");
  REQUIRE(term.synonyms.size() == 4);
  CHECK(term.synonyms[0].text == "HTN");
  CHECK(term.synonyms[0].scope == SynonymScope::Exact);
  CHECK(term.synonyms[1].text == "hyperpiesia");
  CHECK(term.synonyms[1].scope == SynonymScope::Exact);
  CHECK(term.synonyms[2].text == "hypertensive disease");
  CHECK(term.synonyms[2].scope == SynonymScope::Related);
  CHECK(term.synonyms[3].text == "vascular hypertensive disorder");
  CHECK(term.synonyms[3].scope == SynonymScope::Exact);
}

TEST_CASE("parse_obo on empty input yields an empty ontology") {
  const Ontology ont = parse_obo_text("", "DOID");
  CHECK(ont.terms.empty());
  CHECK(ont.name_index.empty());
  CHECK(ont.synonym_index.empty());
}

TEST_CASE("committed DOID fixture has 25 terms and 23 indexed names") {
  const Ontology ont = load_ontology_file(fixture_path("ontology/doid.obo"), "DOID");
  CHECK(ont.terms.size() == 25);
  CHECK(ont.name_index.size() == 23);  // two obsolete terms excluded
  CHECK(ont.parse_warnings == 0);
  std::size_t obsolete = 0;
  for (const auto& [id, term] : ont.terms) obsolete += term.obsolete;
  CHECK(obsolete == 2);
}

TEST_CASE("stanza without an id is skipped with a counted warning") {
  const Ontology ont = parse_obo_text(
      "[Term]\nname: orphan stanza\n\n[Term]\nid: DOID:1\nname: kept\n", "DOID");
  CHECK(ont.terms.size() == 1);
  CHECK(ont.parse_warnings == 1);
}

TEST_CASE("unrecognized synonym scope maps to Unspecified") {
  const Ontology ont = parse_obo_text(
      "[Term]\nid: DOID:9351\nname: diabetes mellitus\nsynonym: \"sugar disease\" COLLOQUIAL []\n",
      "DOID");
  const auto& term = ont.terms.at("DOID:9351");
  REQUIRE(term.synonyms.size() == 1);
  CHECK(term.synonyms[0].scope == SynonymScope::Unspecified);
}

TEST_CASE("unreadable stream is a hard error") {
  std::ifstream missing("/nonexistent/path/to/ontology.obo");
  CHECK_THROWS_AS(parse_obo(missing, "DOID"), std::runtime_error);
  CHECK_THROWS_AS(load_ontology_file("/nonexistent/path/to/ontology.obo", "DOID"),
                  std::runtime_error);
}

TEST_CASE("lookup is exact; alt_ids resolve to the owning term") {
  const Ontology ont = load_ontology_file(fixture_path("ontology/doid.obo"), "DOID");
  const OntologyTerm* direct = ont.lookup("DOID:10763");
  REQUIRE(direct != nullptr);
  CHECK(direct->name == "hypertension");
  const OntologyTerm* via_alt = ont.lookup("DOID:10762");
  REQUIRE(via_alt != nullptr);
  CHECK(via_alt->id == "DOID:10763");
  CHECK(ont.lookup("DOID:99999999") == nullptr);
  CHECK(ont.lookup("DOID:10762 ") == nullptr);  // no trimming on lookup
}

TEST_CASE("parsing the same bytes twice yields structurally equal ontologies") {
  const std::string text = read_file(fixture_path("ontology/doid.obo"));
  const Ontology a = parse_obo_text(text, "DOID");
  const Ontology b = parse_obo_text(text, "DOID");
  CHECK(a == b);
}

TEST_CASE("index soundness and obsolete exclusion") {
  const Ontology ont = load_ontology_file(fixture_path("ontology/doid.obo"), "DOID");
  for (const auto& [key, ids] : ont.name_index) {
    for (const auto& id : ids) {
      const auto& term = ont.terms.at(id);
      CHECK_FALSE(term.obsolete);
      CHECK(normalize(term.name) == key);
    }
  }
  for (const auto& [key, ids] : ont.synonym_index) {
    for (const auto& id : ids) {
      const auto& term = ont.terms.at(id);
      CHECK_FALSE(term.obsolete);
      bool found = false;
      for (const auto& syn : term.synonyms) found = found || normalize(syn.text) == key;
      CHECK(found);
    }
  }
  // the obsolete hypertension variant must not leak into either index
  CHECK(ont.name_index.count(normalize("obsolete borderline hypertension")) == 0);
  CHECK(ont.synonym_index.count(normalize("borderline HTN")) == 0);
}

TEST_CASE("rebuild_indexes is deterministic") {
  Ontology ont = load_ontology_file(fixture_path("ontology/doid.obo"), "DOID");
  const auto names = ont.name_index;
  const auto synonyms = ont.synonym_index;
  ont.rebuild_indexes();
  CHECK(ont.name_index == names);
  CHECK(ont.synonym_index == synonyms);
}

TEST_CASE("duplicate normalized names map to sets of ids") {
  const Ontology ont = parse_obo_text(
      "[Term]\nid: DOID:1\nname: Same Thing\n\n[Term]\nid: DOID:2\nname: same-thing\n", "DOID");
  const auto& ids = ont.name_index.at("same thing");
  CHECK(ids == std::set<std::string>{"DOID:1", "DOID:2"});
}

TEST_CASE("prefix histogram flags alien files") {
  const Ontology ont = load_ontology_file(fixture_path("ontology/symp.obo"), "DOID");
  const auto hist = prefix_histogram(ont);
  CHECK(hist.count("DOID") == 0);
  CHECK(hist.at("SYMP") == ont.terms.size());
}
