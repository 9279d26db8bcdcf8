#pragma once

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bioverify/sha256.hpp"
#include "bioverify/text.hpp"
#include "bioverify/util.hpp"

namespace bioverify {

enum class SynonymScope { Exact, Related, Broad, Narrow, Unspecified };

inline SynonymScope synonym_scope_from_keyword(std::string_view keyword) {
  if (keyword == "EXACT") return SynonymScope::Exact;
  if (keyword == "RELATED") return SynonymScope::Related;
  if (keyword == "BROAD") return SynonymScope::Broad;
  if (keyword == "NARROW") return SynonymScope::Narrow;
  return SynonymScope::Unspecified;
}

inline const char* to_string(SynonymScope scope) {
  switch (scope) {
    case SynonymScope::Exact: return "EXACT";
    case SynonymScope::Related: return "RELATED";
    case SynonymScope::Broad: return "BROAD";
    case SynonymScope::Narrow: return "NARROW";
    default: return "UNSPECIFIED";
  }
}

struct Synonym {
  std::string text;
  SynonymScope scope = SynonymScope::Unspecified;

  bool operator==(const Synonym&) const = default;
};

struct OntologyTerm {
  std::string id;
  std::string name;
  std::vector<Synonym> synonyms;
  std::vector<std::string> alt_ids;
  bool obsolete = false;

  bool operator==(const OntologyTerm&) const = default;
};

/// Immutable after construction; safe to share across concurrent readers.
struct Ontology {
  std::string prefix;  // expected ID prefix, e.g. "DOID"
  std::map<std::string, OntologyTerm> terms;
  std::map<std::string, std::set<std::string>> name_index;     // normalize(name) -> ids
  std::map<std::string, std::set<std::string>> synonym_index;  // normalize(synonym) -> ids
  std::map<std::string, std::string> alt_index;                // alt_id -> owning id
  std::size_t parse_warnings = 0;
  std::string source_checksum;

  /// Exact-string lookup; alt_ids resolve to their owning term. No trimming.
  const OntologyTerm* lookup(const std::string& id) const {
    if (auto it = terms.find(id); it != terms.end()) return &it->second;
    if (auto at = alt_index.find(id); at != alt_index.end()) return &terms.at(at->second);
    return nullptr;
  }

  /// Indexes are a pure function of `terms`: non-obsolete names and synonyms
  /// only, keyed by their normalized form.
  void rebuild_indexes() {
    name_index.clear();
    synonym_index.clear();
    alt_index.clear();
    for (const auto& [id, term] : terms) {
      for (const auto& alt : term.alt_ids) alt_index.emplace(alt, id);
      if (term.obsolete) continue;
      if (auto key = normalize(term.name); !key.empty()) name_index[key].insert(id);
      for (const auto& syn : term.synonyms)
        if (auto key = normalize(syn.text); !key.empty()) synonym_index[key].insert(id);
    }
  }

  bool operator==(const Ontology&) const = default;
};

namespace detail {

// Truncates an OBO tag value at an unescaped trailing comment (" !").
inline std::string strip_obo_comment(std::string_view value) {
  if (auto pos = value.find(" !"); pos != std::string_view::npos) value = value.substr(0, pos);
  return trim(value);
}

// `synonym: "TEXT" SCOPE [xrefs]` -- scope keyword optional; unrecognized
// keywords map to Unspecified, never to failure.
inline std::optional<Synonym> parse_synonym_value(std::string_view value) {
  const std::string v = trim(value);
  if (v.empty()) return std::nullopt;
  Synonym syn;
  if (v.front() == '"') {
    std::string text;
    std::size_t i = 1;
    for (; i < v.size(); ++i) {
      if (v[i] == '\\' && i + 1 < v.size()) {
        text.push_back(v[++i]);
        continue;
      }
      if (v[i] == '"') break;
      text.push_back(v[i]);
    }
    syn.text = trim(text);
    std::string rest = i < v.size() ? trim(v.substr(i + 1)) : std::string();
    if (!rest.empty() && rest.front() != '[') {
      const auto end = rest.find_first_of(" \t[");
      syn.scope = synonym_scope_from_keyword(rest.substr(0, end));
    }
  } else {
    // no quoted form; take the whole value as the synonym text
    syn.text = trim(strip_obo_comment(v));
  }
  if (syn.text.empty()) return std::nullopt;
  return syn;
}

}  // namespace detail

/// Parses OBO 1.2 flat-file text. Only the tags id, name, synonym, alt_id and
/// is_obsolete are interpreted; every other tag and every non-[Term] stanza is
/// skipped. Stanzas without an id (or non-obsolete stanzas without a name)
/// are dropped with a counted warning.
inline Ontology parse_obo(std::istream& in, std::string expected_prefix) {
  if (!in) throw std::runtime_error("obo: unreadable input stream");
  Ontology ont;
  ont.prefix = std::move(expected_prefix);

  bool in_stanza = false;
  bool stanza_is_term = false;
  OntologyTerm current;
  bool has_id = false;

  auto flush = [&] {
    if (!in_stanza || !stanza_is_term) return;
    if (!has_id || (!current.obsolete && trim(current.name).empty())) {
      ++ont.parse_warnings;
      return;
    }
    if (!ont.terms.emplace(current.id, current).second) ++ont.parse_warnings;  // duplicate id
  };

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.size() >= 2 && stripped.front() == '[' && stripped.back() == ']') {
      flush();
      in_stanza = true;
      stanza_is_term = (stripped == "[Term]");
      current = {};
      has_id = false;
      continue;
    }
    if (!in_stanza || !stanza_is_term) continue;
    const auto colon = stripped.find(':');
    if (colon == std::string::npos) continue;
    const std::string tag = trim(stripped.substr(0, colon));
    const std::string value = trim(stripped.substr(colon + 1));
    if (tag == "id") {
      if (auto id = detail::strip_obo_comment(value); !id.empty()) {
        current.id = id;
        has_id = true;
      }
    } else if (tag == "name") {
      current.name = detail::strip_obo_comment(value);
    } else if (tag == "alt_id") {
      if (auto alt = detail::strip_obo_comment(value); !alt.empty()) current.alt_ids.push_back(alt);
    } else if (tag == "is_obsolete") {
      current.obsolete = detail::strip_obo_comment(value).rfind("true", 0) == 0;
    } else if (tag == "synonym") {
      if (auto syn = detail::parse_synonym_value(value)) current.synonyms.push_back(std::move(*syn));
    }
  }
  if (in.bad()) throw std::runtime_error("obo: stream read failure");
  flush();
  ont.rebuild_indexes();
  return ont;
}

inline Ontology parse_obo_text(std::string_view text, std::string expected_prefix) {
  std::istringstream in{std::string(text)};
  Ontology ont = parse_obo(in, std::move(expected_prefix));
  ont.source_checksum = sha256_hex(text);
  return ont;
}

inline Ontology load_ontology_file(const std::filesystem::path& path, std::string expected_prefix) {
  return parse_obo_text(read_file(path), std::move(expected_prefix));
}

/// Histogram of ID prefixes over all terms; used to flag prefix mismatches
/// between a configured ontology role and the file actually supplied.
inline std::map<std::string, std::size_t> prefix_histogram(const Ontology& ont) {
  std::map<std::string, std::size_t> hist;
  for (const auto& [id, term] : ont.terms) {
    const auto colon = id.find(':');
    ++hist[colon == std::string::npos ? id : id.substr(0, colon)];
  }
  return hist;
}

}  // namespace bioverify
