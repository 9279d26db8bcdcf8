#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "bioverify/assoc.hpp"
#include "bioverify/corpus.hpp"
#include "bioverify/term_verify.hpp"
#include "bioverify/text.hpp"

namespace bioverify {

/// One side of an association as searched in the literature: the normalized
/// label plus any normalized ontology synonyms resolved for it.
struct TermPattern {
  std::string primary;
  std::vector<std::string> alternates;
};

/// Distinct non-empty strings of a pattern, primary first.
inline std::vector<std::string> pattern_strings(const TermPattern& p) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  if (!p.primary.empty() && seen.insert(p.primary).second) out.push_back(p.primary);
  for (const auto& alt : p.alternates)
    if (!alt.empty() && seen.insert(alt).second) out.push_back(alt);
  return out;
}

inline std::string doc_match_text(const AbstractDoc& doc) { return doc.title + " " + doc.body; }

/// True iff the normalized doc text contains the primary or any alternate as
/// a contiguous whole-token phrase.
inline bool doc_contains(std::string_view doc_text, const TermPattern& pattern) {
  const auto tokens = tokenize(normalize(doc_text));
  for (const auto& s : pattern_strings(pattern))
    if (contains_token_phrase(tokens, tokenize(s))) return true;
  return false;
}

struct RecordPatterns {
  TermPattern source;
  TermPattern target;
};

using PatternResolver = std::function<RecordPatterns(const AssociationRecord&)>;

/// When a label verifies against its ontology, the matched terms' names and
/// synonyms become alternates; otherwise the normalized label alone is the
/// pattern. With use_synonyms off, labels are always searched bare.
inline TermPattern resolve_term_pattern(const std::string& label, const Ontology* ontology,
                                        bool use_synonyms) {
  TermPattern p;
  p.primary = normalize(label);
  if (!ontology || !use_synonyms || p.primary.empty()) return p;
  const TermVerdict v = verify_term(label, *ontology);
  if (v.match == MatchKind::Unverified) return p;
  std::set<std::string> seen{p.primary};
  for (const auto& id : v.matched_ids) {
    const OntologyTerm* term = ontology->lookup(id);
    if (!term) continue;
    if (auto n = normalize(term->name); !n.empty() && seen.insert(n).second)
      p.alternates.push_back(n);
    for (const auto& syn : term->synonyms)
      if (auto s = normalize(syn.text); !s.empty() && seen.insert(s).second)
        p.alternates.push_back(s);
  }
  return p;
}

inline PatternResolver make_pattern_resolver(const OntologyBindings& bindings, bool use_synonyms) {
  return [bindings, use_synonyms](const AssociationRecord& rec) {
    RecordPatterns rp;
    rp.source = resolve_term_pattern(rec.source.label, bindings.source_ontology(rec.kind),
                                     use_synonyms);
    rp.target = resolve_term_pattern(rec.target.label, bindings.target_ontology(rec.kind),
                                     use_synonyms);
    return rp;
  };
}

/// Labels searched bare, no ontology expansion.
inline PatternResolver raw_pattern_resolver() {
  return [](const AssociationRecord& rec) {
    RecordPatterns rp;
    rp.source.primary = normalize(rec.source.label);
    rp.target.primary = normalize(rec.target.label);
    return rp;
  };
}

struct AssociationHit {
  AssociationRecord record;
  std::size_t count = 0;      // docs containing both sides
  double hit_ratio = 0.0;     // count / corpus size; 0 for an empty corpus
  std::vector<std::string> matched_doc_ids;  // first `sample_cap` matches
};

inline constexpr std::size_t kDefaultHitSampleCap = 20;

/// Direct nested-loop scan: for each record, walk every document and test
/// both sides. Quadratic and single-threaded on purpose -- this is the
/// reference the indexed engine is checked against, and it stays that way.
inline std::vector<AssociationHit> verify_associations_naive(
    const std::vector<AssociationRecord>& records, const Corpus& corpus,
    const PatternResolver& resolve, std::size_t sample_cap = kDefaultHitSampleCap) {
  std::vector<AssociationHit> hits;
  hits.reserve(records.size());
  for (const auto& rec : records) {
    const RecordPatterns rp = resolve(rec);
    AssociationHit hit;
    hit.record = rec;
    for (const auto& doc : corpus.docs) {
      const std::string text = doc_match_text(doc);
      if (doc_contains(text, rp.source) && doc_contains(text, rp.target)) {
        ++hit.count;
        if (hit.matched_doc_ids.size() < sample_cap) hit.matched_doc_ids.push_back(doc.doc_id);
      }
    }
    hit.hit_ratio =
        corpus.docs.empty() ? 0.0 : static_cast<double>(hit.count) / static_cast<double>(corpus.docs.size());
    hits.push_back(std::move(hit));
  }
  return hits;
}

/// Posting lists over normalized token phrases. doc_ids maps ordinals back to
/// document identifiers; postings are ascending ordinal runs.
struct OccurrenceIndex {
  std::map<std::string, std::vector<std::uint32_t>> postings;
  std::vector<std::string> doc_ids;

  std::size_t corpus_size() const { return doc_ids.size(); }
};

namespace detail {

struct PhraseTable {
  std::vector<std::string> phrases;               // unique, sorted
  std::vector<std::vector<std::string>> tokens;   // per phrase
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_token;
};

inline PhraseTable make_phrase_table(const std::vector<TermPattern>& patterns) {
  PhraseTable table;
  std::set<std::string> unique;
  for (const auto& p : patterns)
    for (auto& s : pattern_strings(p)) unique.insert(std::move(s));
  table.phrases.assign(unique.begin(), unique.end());
  table.tokens.reserve(table.phrases.size());
  for (std::size_t i = 0; i < table.phrases.size(); ++i) {
    table.tokens.push_back(tokenize(table.phrases[i]));
    if (!table.tokens.back().empty()) table.by_first_token[table.tokens.back()[0]].push_back(i);
  }
  return table;
}

// Single pass over one document: every phrase starting at each token position
// is tried via the first-token bucket; at most one posting per (phrase, doc).
inline void scan_doc(const std::vector<std::string>& doc_tokens, const PhraseTable& table,
                     std::uint32_t ordinal, std::vector<std::vector<std::uint32_t>>& postings,
                     std::vector<char>& matched, std::vector<std::size_t>& touched) {
  for (std::size_t i = 0; i < doc_tokens.size(); ++i) {
    const auto bucket = table.by_first_token.find(doc_tokens[i]);
    if (bucket == table.by_first_token.end()) continue;
    for (const std::size_t pid : bucket->second) {
      if (matched[pid]) continue;
      const auto& phrase = table.tokens[pid];
      if (i + phrase.size() > doc_tokens.size()) continue;
      std::size_t j = 1;
      while (j < phrase.size() && doc_tokens[i + j] == phrase[j]) ++j;
      if (j == phrase.size()) {
        matched[pid] = 1;
        touched.push_back(pid);
        postings[pid].push_back(ordinal);
      }
    }
  }
  for (const std::size_t pid : touched) matched[pid] = 0;
  touched.clear();
}

}  // namespace detail

/// Builds postings for every pattern string in one pass per document.
/// Documents are partitioned across workers in contiguous ordinal ranges and
/// merged in worker order, so any worker count yields the identical index.
inline OccurrenceIndex build_index(const Corpus& corpus, const std::vector<TermPattern>& patterns,
                                   unsigned workers = 1) {
  const detail::PhraseTable table = detail::make_phrase_table(patterns);
  OccurrenceIndex index;
  index.doc_ids.reserve(corpus.docs.size());
  for (const auto& doc : corpus.docs) index.doc_ids.push_back(doc.doc_id);

  const std::size_t n = corpus.docs.size();
  const std::size_t phrase_count = table.phrases.size();
  if (workers == 0) workers = 1;
  const unsigned used = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));

  std::vector<std::vector<std::vector<std::uint32_t>>> locals(
      used, std::vector<std::vector<std::uint32_t>>(phrase_count));
  const std::size_t chunk = used ? (n + used - 1) / used : 0;

  auto work = [&](unsigned w, std::size_t lo, std::size_t hi) {
    std::vector<char> matched(phrase_count, 0);
    std::vector<std::size_t> touched;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto tokens = tokenize(normalize(doc_match_text(corpus.docs[i])));
      detail::scan_doc(tokens, table, static_cast<std::uint32_t>(i), locals[w], matched, touched);
    }
  };

  if (used <= 1) {
    work(0, 0, n);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < used; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      threads.emplace_back(work, w, lo, hi);
    }
    for (auto& t : threads) t.join();
  }

  for (std::size_t pid = 0; pid < phrase_count; ++pid) {
    auto& posting = index.postings[table.phrases[pid]];
    for (const auto& local : locals)
      posting.insert(posting.end(), local[pid].begin(), local[pid].end());
  }
  return index;
}

namespace detail {

inline std::vector<std::uint32_t> side_postings(const TermPattern& pattern,
                                                const OccurrenceIndex& index) {
  std::vector<std::uint32_t> merged;
  for (const auto& s : pattern_strings(pattern)) {
    const auto it = index.postings.find(s);
    if (it == index.postings.end())
      throw std::runtime_error("pattern missing from index: '" + s + "' (index/batch mismatch)");
    std::vector<std::uint32_t> next;
    next.reserve(merged.size() + it->second.size());
    std::set_union(merged.begin(), merged.end(), it->second.begin(), it->second.end(),
                   std::back_inserter(next));
    merged = std::move(next);
  }
  return merged;
}

}  // namespace detail

/// Posting-intersection equivalent of the nested-loop scan. Results are
/// exactly equal to verify_associations_naive on the same inputs.
inline std::vector<AssociationHit> verify_associations_indexed(
    const std::vector<AssociationRecord>& records, const PatternResolver& resolve,
    const OccurrenceIndex& index, std::size_t sample_cap = kDefaultHitSampleCap) {
  const std::size_t corpus_size = index.corpus_size();
  std::vector<AssociationHit> hits;
  hits.reserve(records.size());
  for (const auto& rec : records) {
    const RecordPatterns rp = resolve(rec);
    const auto source_docs = detail::side_postings(rp.source, index);
    const auto target_docs = detail::side_postings(rp.target, index);
    std::vector<std::uint32_t> both;
    std::set_intersection(source_docs.begin(), source_docs.end(), target_docs.begin(),
                          target_docs.end(), std::back_inserter(both));
    AssociationHit hit;
    hit.record = rec;
    hit.count = both.size();
    hit.hit_ratio =
        corpus_size == 0 ? 0.0 : static_cast<double>(hit.count) / static_cast<double>(corpus_size);
    const std::size_t take = std::min(sample_cap, both.size());
    hit.matched_doc_ids.reserve(take);
    for (std::size_t i = 0; i < take; ++i) hit.matched_doc_ids.push_back(index.doc_ids[both[i]]);
    hits.push_back(std::move(hit));
  }
  return hits;
}

/// Convenience: resolve all patterns for a record batch (both sides).
inline std::vector<TermPattern> collect_patterns(const std::vector<AssociationRecord>& records,
                                                 const PatternResolver& resolve) {
  std::vector<TermPattern> patterns;
  patterns.reserve(records.size() * 2);
  for (const auto& rec : records) {
    RecordPatterns rp = resolve(rec);
    patterns.push_back(std::move(rp.source));
    patterns.push_back(std::move(rp.target));
  }
  return patterns;
}

/// One (kind, period) row of the coverage report.
struct CoverageRow {
  AssociationKind kind = AssociationKind::DiseaseDrug;
  std::string period_label;
  std::size_t record_count = 0;
  std::size_t verified_count = 0;                 // records with count > 0
  std::optional<double> verified_pct;             // undefined when record_count == 0
  std::optional<double> unverified_pct;
  std::optional<double> avg_frequency;            // mean count over verified records
};

inline CoverageRow coverage_stats(const std::vector<AssociationHit>& hits, AssociationKind kind,
                                  std::string period_label) {
  CoverageRow row;
  row.kind = kind;
  row.period_label = std::move(period_label);
  row.record_count = hits.size();
  std::size_t covered_sum = 0;
  for (const auto& hit : hits) {
    if (hit.count > 0) {
      ++row.verified_count;
      covered_sum += hit.count;
    }
  }
  if (row.record_count > 0) {
    row.verified_pct = static_cast<double>(row.verified_count) / static_cast<double>(row.record_count);
    row.unverified_pct = 1.0 - *row.verified_pct;
  }
  if (row.verified_count > 0)
    row.avg_frequency = static_cast<double>(covered_sum) / static_cast<double>(row.verified_count);
  return row;
}

}  // namespace bioverify
