#ifndef DOCBIAS_GRAPH_HPP_
#define DOCBIAS_GRAPH_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "docbias/corpus.hpp"

namespace docbias {

enum class GraphVariant { Base, WordNode, VectorNode };

const char* to_string(GraphVariant v);
std::optional<GraphVariant> parse_graph_variant(const std::string& s);

// Per-document co-occurrence counts. Unigram counts carry multiplicity;
// a distinct unordered lemma pair is counted once per sentence containing
// both lemmas.
struct CooccurrenceStats {
  std::map<std::string, long> unigram;
  long total_unigrams = 0;
  std::map<std::pair<std::string, std::string>, long> pair;  // key: u < v
  long total_pairs = 0;
};

struct GraphNode {
  std::string lemma;
  std::vector<double> attr;  // VectorNode only: word vector ++ mean sentiment
};

struct GraphEdge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

struct DocGraph {
  std::string doc_id;
  GraphVariant variant = GraphVariant::Base;
  std::vector<GraphNode> nodes;  // lemma-sorted
  std::vector<GraphEdge> edges;  // u < v, each pair once

  std::vector<std::vector<int>> adjacency() const;
  std::vector<int> degrees() const;
};

using WordVectors = std::unordered_map<std::string, std::vector<double>>;
using SentimentLexicon = std::unordered_map<std::string, double>;

struct EmptyDocumentError : std::runtime_error {
  explicit EmptyDocumentError(const std::string& doc_id)
      : std::runtime_error("document " + doc_id + " has no lemmas") {}
};

CooccurrenceStats count_cooccurrence(const Document& doc);

// Normalized PMI per the per-document counts; nullopt drops the edge
// (non-positive weight). A pair that is the whole document (P_pair = 1)
// maps to weight 1.0.
std::optional<double> npmi_weight(const CooccurrenceStats& stats,
                                  const std::string& w1,
                                  const std::string& w2);

DocGraph build_graph(const Document& doc, GraphVariant variant,
                     const WordVectors* vectors = nullptr,
                     const SentimentLexicon* lexicon = nullptr);

std::string export_graphml(const DocGraph& g);
std::string export_dot(const DocGraph& g);

// Parses GraphML produced by export_graphml (not a general XML parser).
DocGraph import_graphml(const std::string& xml);

// `lemma v1 v2 ... vd`, dimension inferred from the first line.
WordVectors load_word_vectors(const std::string& path);
// `token<TAB>valence`, valences must lie in [-1, 1].
SentimentLexicon load_sentiment_lexicon(const std::string& path);

std::string graph_to_json(const DocGraph& g);
DocGraph graph_from_json(const std::string& json_text);
std::vector<DocGraph> load_graphs_jsonl(const std::string& path);
void save_graphs_jsonl(const std::string& path,
                       const std::vector<DocGraph>& graphs);

}  // namespace docbias

#endif
