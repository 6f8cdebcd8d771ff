#include "docbias/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "docbias/util.hpp"
#include "json.hpp"

namespace docbias {

using json = nlohmann::ordered_json;

const char* to_string(GraphVariant v) {
  switch (v) {
    case GraphVariant::Base: return "base";
    case GraphVariant::WordNode: return "word";
    case GraphVariant::VectorNode: return "vector";
  }
  return "base";
}

std::optional<GraphVariant> parse_graph_variant(const std::string& s) {
  std::string norm = lower_ascii(trim(s));
  if (norm == "base") return GraphVariant::Base;
  if (norm == "word" || norm == "word-node" || norm == "wordnode")
    return GraphVariant::WordNode;
  if (norm == "vector" || norm == "vector-node" || norm == "vectornode")
    return GraphVariant::VectorNode;
  return std::nullopt;
}

std::vector<std::vector<int>> DocGraph::adjacency() const {
  std::vector<std::vector<int>> adj(nodes.size());
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

std::vector<int> DocGraph::degrees() const {
  std::vector<int> deg(nodes.size(), 0);
  for (const auto& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

CooccurrenceStats count_cooccurrence(const Document& doc) {
  CooccurrenceStats stats;
  for (const auto& sentence : doc.sentences) {
    for (const auto& lemma : sentence) {
      ++stats.unigram[lemma];
      ++stats.total_unigrams;
    }
    std::set<std::string> uniq(sentence.begin(), sentence.end());
    for (auto it = uniq.begin(); it != uniq.end(); ++it) {
      auto jt = it;
      for (++jt; jt != uniq.end(); ++jt) {
        ++stats.pair[{*it, *jt}];
        ++stats.total_pairs;
      }
    }
  }
  return stats;
}

std::optional<double> npmi_weight(const CooccurrenceStats& stats,
                                  const std::string& w1,
                                  const std::string& w2) {
  auto key = w1 < w2 ? std::make_pair(w1, w2) : std::make_pair(w2, w1);
  auto it = stats.pair.find(key);
  long pair_count = it == stats.pair.end() ? 0 : it->second;
  if (pair_count <= 0) {
    throw std::logic_error("npmi_weight called on pair with zero count: " +
                           w1 + "," + w2);
  }
  double p_pair = static_cast<double>(pair_count) / stats.total_pairs;
  double p1 = static_cast<double>(stats.unigram.at(w1)) / stats.total_unigrams;
  double p2 = static_cast<double>(stats.unigram.at(w2)) / stats.total_unigrams;
  if (p_pair >= 1.0) return 1.0;  // single-pair document: denominator is zero
  double weight = std::log2(p_pair / (p1 * p2)) / (-std::log2(p_pair));
  if (weight <= 0.0) return std::nullopt;
  return weight;
}

DocGraph build_graph(const Document& doc, GraphVariant variant,
                     const WordVectors* vectors,
                     const SentimentLexicon* lexicon) {
  CooccurrenceStats stats = count_cooccurrence(doc);
  if (stats.total_unigrams == 0) throw EmptyDocumentError(doc.id);

  DocGraph g;
  g.doc_id = doc.id;
  g.variant = variant;

  std::size_t dim = 0;
  if (variant == GraphVariant::VectorNode && vectors && !vectors->empty()) {
    dim = vectors->begin()->second.size();
  }

  std::map<std::string, int> index;
  for (const auto& [lemma, count] : stats.unigram) {
    GraphNode node;
    node.lemma = lemma;
    if (variant == GraphVariant::VectorNode) {
      node.attr.assign(dim, 0.0);
      if (vectors) {
        auto it = vectors->find(lemma);
        if (it != vectors->end()) node.attr = it->second;
      }
      // mean valence across this lemma's occurrences in the article; the
      // lexicon is per-lemma so the mean equals the lookup (0 if absent)
      double valence = 0.0;
      if (lexicon) {
        auto it = lexicon->find(lemma);
        if (it != lexicon->end()) valence = it->second;
      }
      node.attr.push_back(valence);
    }
    index[lemma] = static_cast<int>(g.nodes.size());
    g.nodes.push_back(std::move(node));
  }

  for (const auto& [key, count] : stats.pair) {
    auto weight = npmi_weight(stats, key.first, key.second);
    if (!weight) continue;
    GraphEdge e;
    e.u = index[key.first];
    e.v = index[key.second];
    e.weight = *weight;
    g.edges.push_back(e);
  }
  return g;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string xml_unescape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
      if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
      if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
      if (s.compare(i, 6, "&quot;") == 0) { out += '"'; i += 6; continue; }
      if (s.compare(i, 6, "&apos;") == 0) { out += '\''; i += 6; continue; }
    }
    out += s[i++];
  }
  return out;
}

}  // namespace

std::string export_graphml(const DocGraph& g) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
  bool with_labels = g.variant != GraphVariant::Base;
  if (with_labels) {
    out << "  <key id=\"label\" for=\"node\" attr.name=\"label\" "
           "attr.type=\"string\"/>\n";
  }
  out << "  <key id=\"w\" for=\"edge\" attr.name=\"w\" "
         "attr.type=\"double\"/>\n";
  out << "  <graph id=\"" << xml_escape(g.doc_id)
      << "\" edgedefault=\"undirected\">\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    out << "    <node id=\"n" << i << "\">";
    if (with_labels) {
      out << "<data key=\"label\">" << xml_escape(g.nodes[i].lemma)
          << "</data>";
    }
    out << "</node>\n";
  }
  for (const auto& e : g.edges) {
    out << "    <edge source=\"n" << e.u << "\" target=\"n" << e.v << "\">"
        << "<data key=\"w\">" << repr_double(e.weight) << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

std::string export_dot(const DocGraph& g) {
  std::ostringstream out;
  out << "graph doc {\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    out << "  n" << i;
    if (g.variant != GraphVariant::Base) {
      std::string label = g.nodes[i].lemma;
      std::string escaped;
      for (char c : label) {
        if (c == '"' || c == '\\') escaped += '\\';
        escaped += c;
      }
      out << " [label=\"" << escaped << "\"]";
    }
    out << ";\n";
  }
  for (const auto& e : g.edges) {
    out << "  n" << e.u << " -- n" << e.v << " [weight="
        << repr_double(e.weight) << "];\n";
  }
  out << "}\n";
  return out.str();
}

namespace {

// Pulls attribute="value" out of a tag body.
std::string attr_value(const std::string& tag, const std::string& name) {
  std::string needle = name + "=\"";
  auto pos = tag.find(needle);
  if (pos == std::string::npos) return "";
  pos += needle.size();
  auto end = tag.find('"', pos);
  if (end == std::string::npos) return "";
  return tag.substr(pos, end - pos);
}

}  // namespace

DocGraph import_graphml(const std::string& xml) {
  DocGraph g;
  g.variant = GraphVariant::Base;
  std::map<std::string, int> node_index;
  std::size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    std::size_t close = xml.find('>', pos);
    if (close == std::string::npos) break;
    std::string tag = xml.substr(pos + 1, close - pos - 1);
    if (tag.rfind("graph ", 0) == 0) {
      g.doc_id = xml_unescape(attr_value(tag, "id"));
    } else if (tag.rfind("node ", 0) == 0 || tag.rfind("node/", 0) == 0) {
      std::string id = attr_value(tag, "id");
      GraphNode node;
      // inline <data key="label">...</data> before </node>
      std::size_t node_end = xml.find("</node>", close);
      std::size_t self_end = tag.back() == '/' ? close : node_end;
      if (node_end != std::string::npos && tag.back() != '/') {
        std::string body = xml.substr(close + 1, node_end - close - 1);
        auto dpos = body.find("<data key=\"label\">");
        if (dpos != std::string::npos) {
          dpos += std::strlen("<data key=\"label\">");
          auto dend = body.find("</data>", dpos);
          node.lemma = xml_unescape(body.substr(dpos, dend - dpos));
          g.variant = GraphVariant::WordNode;
        }
      }
      if (node.lemma.empty()) node.lemma = id;
      node_index[id] = static_cast<int>(g.nodes.size());
      g.nodes.push_back(std::move(node));
      pos = self_end;
      continue;
    } else if (tag.rfind("edge ", 0) == 0) {
      GraphEdge e;
      e.u = node_index.at(attr_value(tag, "source"));
      e.v = node_index.at(attr_value(tag, "target"));
      std::size_t edge_end = xml.find("</edge>", close);
      if (edge_end != std::string::npos) {
        std::string body = xml.substr(close + 1, edge_end - close - 1);
        auto dpos = body.find("<data key=\"w\">");
        if (dpos != std::string::npos) {
          dpos += std::strlen("<data key=\"w\">");
          auto dend = body.find("</data>", dpos);
          e.weight = std::strtod(body.substr(dpos, dend - dpos).c_str(),
                                 nullptr);
        }
        pos = edge_end;
      }
      g.edges.push_back(e);
      continue;
    }
    pos = close + 1;
  }
  return g;
}

WordVectors load_word_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word vectors " + path);
  WordVectors vectors;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    std::string lemma;
    ss >> lemma;
    std::vector<double> vec;
    double v;
    while (ss >> v) vec.push_back(v);
    if (vec.empty()) {
      throw IngestError(path + " line " + std::to_string(line_no) +
                        ": no vector components");
    }
    if (dim == 0) {
      dim = vec.size();
    } else if (vec.size() != dim) {
      throw IngestError(path + " line " + std::to_string(line_no) +
                        ": dimension mismatch (" + std::to_string(vec.size()) +
                        " vs " + std::to_string(dim) + ")");
    }
    vectors[lemma] = std::move(vec);
  }
  return vectors;
}

SentimentLexicon load_sentiment_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sentiment lexicon " + path);
  SentimentLexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IngestError(path + " line " + std::to_string(line_no) +
                        ": expected token<TAB>valence");
    }
    std::string token = trim(line.substr(0, tab));
    double valence = std::strtod(line.substr(tab + 1).c_str(), nullptr);
    if (valence < -1.0 || valence > 1.0 || !std::isfinite(valence)) {
      throw IngestError(path + " line " + std::to_string(line_no) +
                        ": valence outside [-1,1]");
    }
    lexicon[token] = valence;
  }
  return lexicon;
}

std::string graph_to_json(const DocGraph& g) {
  json j;
  j["doc_id"] = g.doc_id;
  j["variant"] = to_string(g.variant);
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    json node;
    node["lemma"] = n.lemma;
    if (!n.attr.empty()) node["attr"] = n.attr;
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back(json::array({e.u, e.v, e.weight}));
  }
  j["edges"] = std::move(edges);
  return j.dump();
}

DocGraph graph_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  DocGraph g;
  g.doc_id = j.at("doc_id").get<std::string>();
  auto variant = parse_graph_variant(j.at("variant").get<std::string>());
  if (!variant) throw IoError("graph " + g.doc_id + ": unknown variant");
  g.variant = *variant;
  for (const auto& node : j.at("nodes")) {
    GraphNode n;
    n.lemma = node.at("lemma").get<std::string>();
    if (node.contains("attr")) n.attr = node["attr"].get<std::vector<double>>();
    g.nodes.push_back(std::move(n));
  }
  for (const auto& edge : j.at("edges")) {
    GraphEdge e;
    e.u = edge.at(0).get<int>();
    e.v = edge.at(1).get<int>();
    e.weight = edge.at(2).get<double>();
    g.edges.push_back(e);
  }
  return g;
}

std::vector<DocGraph> load_graphs_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graphs file " + path);
  std::vector<DocGraph> graphs;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    graphs.push_back(graph_from_json(line));
  }
  return graphs;
}

void save_graphs_jsonl(const std::string& path,
                       const std::vector<DocGraph>& graphs) {
  std::ostringstream out;
  for (const auto& g : graphs) out << graph_to_json(g) << "\n";
  write_file(path, out.str());
}

}  // namespace docbias
