#pragma once

#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bioverify/sha256.hpp"
#include "bioverify/util.hpp"

namespace bioverify {

struct AbstractDoc {
  std::string doc_id;
  std::string title;
  std::string body;
  int year = 0;

  bool operator==(const AbstractDoc&) const = default;
};

inline constexpr int kMinDocYear = 1800;
inline constexpr int kMaxDocYear = 2100;
inline constexpr const char* kOutOfRangeLabel = "out_of_range";

struct PeriodSpec {
  struct Period {
    std::string label;
    int start_year = 0;
    int end_year = 0;  // inclusive
  };
  std::vector<Period> periods;

  /// Non-overlapping, ascending, inclusive bounds, distinct labels.
  void validate() const {
    if (periods.empty()) throw std::invalid_argument("period spec: no periods");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < periods.size(); ++i) {
      const auto& p = periods[i];
      if (p.label.empty() || p.label == kOutOfRangeLabel)
        throw std::invalid_argument("period spec: bad label '" + p.label + "'");
      if (!labels.insert(p.label).second)
        throw std::invalid_argument("period spec: duplicate label '" + p.label + "'");
      if (p.start_year > p.end_year)
        throw std::invalid_argument("period spec: start after end in '" + p.label + "'");
      if (i > 0 && periods[i - 1].end_year >= p.start_year)
        throw std::invalid_argument("period spec: periods overlap or are out of order at '" +
                                    p.label + "'");
    }
  }

  const Period* find(int year) const {
    for (const auto& p : periods)
      if (year >= p.start_year && year <= p.end_year) return &p;
    return nullptr;
  }

  static PeriodSpec default_spec() {
    return PeriodSpec{{{"2009-2014", 2009, 2014}, {"2015-2019", 2015, 2019}, {"2020-2024", 2020, 2024}}};
  }

  /// Parses "2009:2014,2015:2019,2020:2024"; labels are "start-end".
  static PeriodSpec parse(std::string_view text) {
    PeriodSpec spec;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("period spec: expected start:end in '" + item + "'");
      try {
        const int start = std::stoi(trim(item.substr(0, colon)));
        const int end = std::stoi(trim(item.substr(colon + 1)));
        spec.periods.push_back({std::to_string(start) + "-" + std::to_string(end), start, end});
      } catch (const std::exception&) {
        throw std::invalid_argument("period spec: bad year in '" + item + "'");
      }
    }
    spec.validate();
    return spec;
  }
};

struct Corpus {
  std::vector<AbstractDoc> docs;
  std::string source_checksum;
};

struct CorpusLoadResult {
  Corpus corpus;
  std::size_t skipped_malformed = 0;
  std::size_t skipped_duplicates = 0;
};

namespace detail {

inline bool read_doc(const nlohmann::json& obj, AbstractDoc& doc) {
  if (!obj.is_object()) return false;
  const auto id = obj.find("doc_id");
  if (id == obj.end()) return false;
  if (id->is_string())
    doc.doc_id = id->get<std::string>();
  else if (id->is_number_integer())
    doc.doc_id = std::to_string(id->get<long long>());
  else
    return false;
  if (doc.doc_id.empty()) return false;

  const auto title = obj.find("title");
  if (title == obj.end() || !title->is_string()) return false;
  doc.title = title->get<std::string>();

  auto body = obj.find("body");
  if (body == obj.end()) body = obj.find("abstract");
  if (body == obj.end() || !body->is_string()) return false;
  doc.body = body->get<std::string>();

  const auto year = obj.find("year");
  if (year == obj.end()) return false;
  if (year->is_number_integer()) {
    doc.year = year->get<int>();
  } else if (year->is_string()) {
    try {
      doc.year = std::stoi(year->get<std::string>());
    } catch (const std::exception&) {
      return false;
    }
  } else {
    return false;
  }
  return doc.year >= kMinDocYear && doc.year <= kMaxDocYear;
}

}  // namespace detail

/// Line-delimited JSON records: {doc_id, title, body|abstract, year}.
/// Malformed lines and duplicate doc_ids are skipped and counted.
inline CorpusLoadResult load_corpus_text(std::string_view text) {
  CorpusLoadResult result;
  result.corpus.source_checksum = sha256_hex(text);
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    AbstractDoc doc;
    if (obj.is_discarded() || !detail::read_doc(obj, doc)) {
      ++result.skipped_malformed;
      continue;
    }
    if (!seen.insert(doc.doc_id).second) {
      ++result.skipped_duplicates;
      continue;
    }
    result.corpus.docs.push_back(std::move(doc));
  }
  return result;
}

inline CorpusLoadResult load_corpus(std::istream& in) {
  if (!in) throw std::runtime_error("corpus: unreadable input stream");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("corpus: stream read failure");
  return load_corpus_text(buf.str());
}

inline CorpusLoadResult load_corpus_file(const std::filesystem::path& path) {
  return load_corpus_text(read_file(path));
}

/// Places each doc in the unique period containing its year; docs outside
/// every period land in the "out_of_range" bucket, which callers report but
/// exclude from verification. All labels are present even when empty.
inline std::map<std::string, Corpus> bucket_by_period(const Corpus& corpus, const PeriodSpec& spec) {
  spec.validate();
  std::map<std::string, Corpus> buckets;
  for (const auto& p : spec.periods) buckets[p.label].source_checksum = corpus.source_checksum;
  buckets[kOutOfRangeLabel].source_checksum = corpus.source_checksum;
  for (const auto& doc : corpus.docs) {
    const auto* p = spec.find(doc.year);
    buckets[p ? p->label : kOutOfRangeLabel].docs.push_back(doc);
  }
  return buckets;
}

}  // namespace bioverify
