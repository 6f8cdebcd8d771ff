#ifndef DOCBIAS_CORPUS_HPP_
#define DOCBIAS_CORPUS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace docbias {

// Seven-point bias scale. Ordinal encoding is fixed at -3..+3.
enum class BiasLabel : int {
  FarLeft = 0,
  Left,
  LeftCenter,
  Center,
  RightCenter,
  Right,
  FarRight,
};

constexpr int kNumBiasLabels = 7;

const char* to_string(BiasLabel label);
std::optional<BiasLabel> parse_bias_label(const std::string& s);
int ordinal(BiasLabel label);  // -3..+3

struct RawArticle {
  std::string id;
  std::string title;
  std::string body;
  std::string domain;
  std::string topic;
  std::optional<BiasLabel> article_label;  // human label, where annotated
};

struct Document {
  std::string id;
  std::vector<std::vector<std::string>> sentences;  // lemma tokens
  std::string domain;
  std::string topic;
  BiasLabel label = BiasLabel::Center;              // weak label from domain
  std::optional<BiasLabel> article_label;
};

struct SplitSpec {
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;

  std::uint64_t hash() const;
  std::string to_json() const;
  static SplitSpec from_json(const std::string& json_text);
};

using LemmaTable = std::unordered_map<std::string, std::string>;
using Stoplist = std::unordered_set<std::string>;
using DomainTable = std::map<std::string, BiasLabel>;

// Strips HTML tags and URLs, removes control characters, maps unicode
// space variants to plain spaces, collapses whitespace. Input must be
// valid UTF-8; context names the offending article in ingest errors.
std::string clean_text(const std::string& raw, const std::string& context = "");

// Sentence split on . ! ? with an abbreviation guard; tokens are
// lowercased, stripped of punctuation, filtered by the stoplist and mapped
// through the lemma table (identity fallback). Empty sentences are dropped.
std::vector<std::vector<std::string>> segment_and_lemmatize(
    const std::string& text, const LemmaTable& lemmas = {},
    const Stoplist& stoplist = {});

// Exact hostname lookup; unknown domains return nullopt (caller excludes
// the article with a warning).
std::optional<BiasLabel> assign_weak_label(const RawArticle& article,
                                           const DomainTable& table);

struct CleanOptions {
  LemmaTable lemmas;
  Stoplist stoplist;
  bool include_title = false;  // prepend title as the first sentence
};

// Full ingestion of one article: clean, segment, label. Returns nullopt if
// the domain is unknown or the article is empty after cleaning.
std::optional<Document> ingest_article(const RawArticle& article,
                                       const DomainTable& table,
                                       const CleanOptions& opts);

SplitSpec make_split(const std::vector<std::string>& doc_ids,
                     std::uint64_t seed, double fraction = 0.8);

// Stratified variant: splits each label group separately.
SplitSpec make_split_stratified(const std::vector<Document>& docs,
                                std::uint64_t seed, double fraction = 0.8);

// File loaders. Errors carry line numbers.
std::vector<RawArticle> load_corpus_jsonl(const std::string& path);
DomainTable load_domain_table(const std::string& path);
LemmaTable load_lemma_table(const std::string& path);
Stoplist load_stoplist(const std::string& path);

std::string document_to_json(const Document& doc);
Document document_from_json(const std::string& json_text);
std::vector<Document> load_documents_jsonl(const std::string& path);
void save_documents_jsonl(const std::string& path,
                          const std::vector<Document>& docs);

}  // namespace docbias

#endif
