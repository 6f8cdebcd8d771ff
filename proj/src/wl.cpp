#include "docbias/wl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "docbias/util.hpp"
#include "json.hpp"

namespace docbias {

std::string quantize_attr(const std::vector<double>& attr, double step) {
  std::string out = "q:";
  for (std::size_t i = 0; i < attr.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(static_cast<long long>(std::floor(attr[i] / step)));
  }
  return out;
}

std::string initial_label(const DocGraph& g, int node_index) {
  switch (g.variant) {
    case GraphVariant::Base: {
      auto deg = g.degrees();
      return std::to_string(deg[node_index]);
    }
    case GraphVariant::WordNode:
      return g.nodes[node_index].lemma;
    case GraphVariant::VectorNode:
      return quantize_attr(g.nodes[node_index].attr);
  }
  return "";
}

FeatureDoc wl_relabel(const DocGraph& g, int iterations) {
  FeatureDoc fd;
  fd.doc_id = g.doc_id;
  const std::size_t n = g.nodes.size();

  // visit order: lemma-sorted, ties by index
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (g.nodes[a].lemma != g.nodes[b].lemma)
      return g.nodes[a].lemma < g.nodes[b].lemma;
    return a < b;
  });

  auto adj = g.adjacency();
  auto deg = g.degrees();

  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (g.variant) {
      case GraphVariant::Base:
        labels[i] = std::to_string(deg[i]);
        break;
      case GraphVariant::WordNode:
        labels[i] = g.nodes[i].lemma;
        break;
      case GraphVariant::VectorNode:
        labels[i] = quantize_attr(g.nodes[i].attr);
        break;
    }
  }

  fd.tokens.reserve((iterations + 1) * n);
  for (int v : order) fd.tokens.push_back(labels[v]);

  for (int it = 0; it < iterations; ++it) {
    std::vector<std::string> next(n);
    for (std::size_t v = 0; v < n; ++v) {
      std::vector<std::string> nbr;
      nbr.reserve(adj[v].size());
      for (int u : adj[v]) nbr.push_back(labels[u]);
      std::sort(nbr.begin(), nbr.end());
      std::string input = labels[v];
      input += '|';
      for (std::size_t k = 0; k < nbr.size(); ++k) {
        if (k) input += ',';
        input += nbr[k];
      }
      next[v] = hex64(fnv1a64(input));
    }
    labels = std::move(next);
    for (int v : order) fd.tokens.push_back(labels[v]);
  }
  return fd;
}

std::string feature_doc_to_json(const FeatureDoc& fd) {
  nlohmann::ordered_json j;
  j["doc_id"] = fd.doc_id;
  j["tokens"] = fd.tokens;
  return j.dump();
}

void save_feature_docs_jsonl(const std::string& path,
                             const std::vector<FeatureDoc>& docs) {
  std::ostringstream out;
  for (const auto& fd : docs) out << feature_doc_to_json(fd) << "\n";
  write_file(path, out.str());
}

}  // namespace docbias
