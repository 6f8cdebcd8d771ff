#ifndef DOCBIAS_WL_HPP_
#define DOCBIAS_WL_HPP_

#include <string>
#include <vector>

#include "docbias/graph.hpp"

namespace docbias {

// The subtree-label "document" of one graph: initial labels followed by
// the labels of each refinement iteration, nodes in lemma-sorted order.
struct FeatureDoc {
  std::string doc_id;
  std::vector<std::string> tokens;  // (iterations+1) * node count
};

// Base: decimal node degree. WordNode: the lemma. VectorNode: attribute
// vector quantized per component at step 0.25 ("q:0,-2").
std::string initial_label(const DocGraph& g, int node_index);

std::string quantize_attr(const std::vector<double>& attr, double step = 0.25);

FeatureDoc wl_relabel(const DocGraph& g, int iterations = 2);

std::string feature_doc_to_json(const FeatureDoc& fd);
void save_feature_docs_jsonl(const std::string& path,
                             const std::vector<FeatureDoc>& docs);

}  // namespace docbias

#endif
