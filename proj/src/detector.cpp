#include "docbias/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace docbias {

using nlohmann::json;

std::string to_string(LabelScheme scheme) {
  switch (scheme) {
    case LabelScheme::Full: return "full";
    case LabelScheme::LeftCenterRight: return "lcr";
    case LabelScheme::Binary: return "binary";
  }
  return "?";
}

LabelScheme parse_label_scheme(const std::string& name) {
  if (name == "full") return LabelScheme::Full;
  if (name == "lcr") return LabelScheme::LeftCenterRight;
  if (name == "binary") return LabelScheme::Binary;
  throw ConfigError("unknown label scheme '" + name +
                    "' (expected full, lcr, or binary)");
}

std::string map_label(BiasLabel label, LabelScheme scheme) {
  switch (scheme) {
    case LabelScheme::Full:
      return to_string(label);
    case LabelScheme::LeftCenterRight:
      switch (label) {
        case BiasLabel::FarLeft:
        case BiasLabel::Left:
        case BiasLabel::LeftCenter: return "left";
        case BiasLabel::Center: return "center";
        case BiasLabel::RightCenter:
        case BiasLabel::Right:
        case BiasLabel::FarRight: return "right";
      }
      break;
    case LabelScheme::Binary:
      switch (label) {
        case BiasLabel::LeftCenter:
        case BiasLabel::Center:
        case BiasLabel::RightCenter: return "unbiased";
        default: return "biased";
      }
  }
  throw std::logic_error("unreachable label mapping");
}

std::vector<std::string> scheme_classes(LabelScheme scheme) {
  switch (scheme) {
    case LabelScheme::Full: {
      std::vector<std::string> out;
      for (int i = 0; i < kNumBiasLabels; ++i) {
        out.push_back(to_string(static_cast<BiasLabel>(i)));
      }
      return out;
    }
    case LabelScheme::LeftCenterRight:
      return {"left", "center", "right"};
    case LabelScheme::Binary:
      return {"biased", "unbiased"};
  }
  return {};
}

std::vector<std::string> regroup_predictions(
    const std::vector<std::string>& full_predictions, LabelScheme target) {
  std::vector<std::string> out;
  out.reserve(full_predictions.size());
  for (const auto& p : full_predictions) {
    auto label = parse_bias_label(p);
    if (!label) {
      throw UserError("cannot regroup prediction '" + p +
                      "': not a seven-way label");
    }
    out.push_back(map_label(*label, target));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(Aggregation agg) {
  switch (agg) {
    case Aggregation::None: return "none";
    case Aggregation::Mean: return "mean";
    case Aggregation::TopicDiffAvg: return "topic_diff_avg";
    case Aggregation::TopicDiffNorm: return "topic_diff_norm";
  }
  return "?";
}

Aggregation parse_aggregation(const std::string& name) {
  if (name == "none") return Aggregation::None;
  if (name == "mean") return Aggregation::Mean;
  if (name == "topic_diff_avg") return Aggregation::TopicDiffAvg;
  if (name == "topic_diff_norm") return Aggregation::TopicDiffNorm;
  throw ConfigError("unknown aggregation '" + name +
                    "' (expected none, mean, topic_diff_avg, topic_diff_norm)");
}

std::vector<DomainVector> aggregate_domains(
    const std::vector<ArticleVector>& articles, Aggregation agg) {
  if (agg == Aggregation::None) {
    throw UserError("aggregation 'none' keeps article granularity; "
                    "aggregate_domains only handles domain-level schemes");
  }
  if (articles.empty()) return {};
  std::size_t dim = articles.front().values.size();
  for (const auto& a : articles) {
    if (a.values.size() != dim) {
      throw UserError("article vector dimension mismatch at " + a.doc_id);
    }
  }

  // topic means over every article passed in
  std::map<std::string, std::vector<double>> topic_sum;
  std::map<std::string, int> topic_count;
  if (agg == Aggregation::TopicDiffAvg || agg == Aggregation::TopicDiffNorm) {
    for (const auto& a : articles) {
      auto& sum = topic_sum[a.topic];
      if (sum.empty()) sum.assign(dim, 0.0);
      for (std::size_t i = 0; i < dim; ++i) sum[i] += a.values[i];
      ++topic_count[a.topic];
    }
    for (auto& [topic, sum] : topic_sum) {
      for (auto& v : sum) v /= topic_count[topic];
    }
  }

  std::map<std::string, DomainVector> domains;
  for (const auto& a : articles) {
    auto it = domains.find(a.domain);
    if (it == domains.end()) {
      DomainVector dv;
      dv.domain = a.domain;
      dv.label = a.label;
      dv.values.assign(dim, 0.0);
      it = domains.emplace(a.domain, std::move(dv)).first;
    } else if (it->second.label != a.label) {
      throw UserError("domain " + a.domain + " carries conflicting labels '" +
                      it->second.label + "' and '" + a.label + "'");
    }
    DomainVector& dv = it->second;
    ++dv.article_count;
    switch (agg) {
      case Aggregation::Mean:
        for (std::size_t i = 0; i < dim; ++i) dv.values[i] += a.values[i];
        break;
      case Aggregation::TopicDiffAvg: {
        const auto& t = topic_sum[a.topic];
        for (std::size_t i = 0; i < dim; ++i) dv.values[i] += a.values[i] - t[i];
        break;
      }
      case Aggregation::TopicDiffNorm: {
        const auto& t = topic_sum[a.topic];
        for (std::size_t i = 0; i < dim; ++i) {
          double d = a.values[i] - t[i];
          dv.values[i] += d * d;
        }
        break;
      }
      case Aggregation::None:
        break;
    }
  }

  std::vector<DomainVector> out;
  for (auto& [name, dv] : domains) {
    switch (agg) {
      case Aggregation::Mean:
      case Aggregation::TopicDiffAvg:
        for (auto& v : dv.values) v /= dv.article_count;
        break;
      case Aggregation::TopicDiffNorm:
        for (auto& v : dv.values) v = std::sqrt(v);
        break;
      case Aggregation::None:
        break;
    }
    out.push_back(std::move(dv));
  }
  return out;
}

// ---------------------------------------------------------------------------
// softmax regression
// ---------------------------------------------------------------------------

namespace {

// probabilities for one example given row-major K x (d+1) weights
void softmax_row(const double* weights, int n_classes, int dim,
                 const double* x, double* probs) {
  int stride = dim + 1;
  double max_score = -1e300;
  for (int k = 0; k < n_classes; ++k) {
    const double* w = weights + static_cast<std::size_t>(k) * stride;
    double s = w[dim];  // bias
    for (int i = 0; i < dim; ++i) s += w[i] * x[i];
    probs[k] = s;
    max_score = std::max(max_score, s);
  }
  double z = 0.0;
  for (int k = 0; k < n_classes; ++k) {
    probs[k] = std::exp(probs[k] - max_score);
    z += probs[k];
  }
  for (int k = 0; k < n_classes; ++k) probs[k] /= z;
}

}  // namespace

double softmax_objective(const std::vector<double>& weights, int n_classes,
                         int dim, const std::vector<double>& features,
                         const std::vector<int>& targets, double lambda,
                         std::vector<double>* grad) {
  int stride = dim + 1;
  std::size_t n = targets.size();
  if (grad) grad->assign(weights.size(), 0.0);
  std::vector<double> probs(n_classes);
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = features.data() + r * dim;
    softmax_row(weights.data(), n_classes, dim, x, probs.data());
    double p = std::max(probs[targets[r]], 1e-300);
    loss -= std::log(p);
    if (grad) {
      for (int k = 0; k < n_classes; ++k) {
        double g = probs[k] - (k == targets[r] ? 1.0 : 0.0);
        double* gw = grad->data() + static_cast<std::size_t>(k) * stride;
        for (int i = 0; i < dim; ++i) gw[i] += g * x[i];
        gw[dim] += g;
      }
    }
  }
  loss /= static_cast<double>(n);
  double penalty = 0.0;
  for (int k = 0; k < n_classes; ++k) {
    const double* w = weights.data() + static_cast<std::size_t>(k) * stride;
    for (int i = 0; i < dim; ++i) penalty += w[i] * w[i];
  }
  loss += 0.5 * lambda * penalty;
  if (grad) {
    double inv_n = 1.0 / static_cast<double>(n);
    for (int k = 0; k < n_classes; ++k) {
      double* gw = grad->data() + static_cast<std::size_t>(k) * stride;
      const double* w = weights.data() + static_cast<std::size_t>(k) * stride;
      for (int i = 0; i < dim; ++i) gw[i] = gw[i] * inv_n + lambda * w[i];
      gw[dim] *= inv_n;
    }
  }
  return loss;
}

SoftmaxModel train_softmax(const std::vector<std::vector<double>>& features,
                           const std::vector<std::string>& labels,
                           const std::vector<std::string>& class_order,
                           const SoftmaxParams& params) {
  if (features.size() != labels.size()) {
    throw UserError("feature/label count mismatch");
  }
  if (features.empty()) throw UserError("no training examples");

  std::set<std::string> present(labels.begin(), labels.end());
  SoftmaxModel model;
  for (const auto& c : class_order) {
    if (present.count(c)) model.classes.push_back(c);
  }
  for (const auto& l : present) {
    if (std::find(class_order.begin(), class_order.end(), l) ==
        class_order.end()) {
      throw UserError("training label '" + l + "' not in the class order");
    }
  }
  if (model.classes.size() < 2) {
    throw UserError("training set has fewer than two classes");
  }

  int K = static_cast<int>(model.classes.size());
  int dim = static_cast<int>(features.front().size());
  model.dim = dim;
  std::size_t n = features.size();

  std::vector<double> flat(n * dim);
  std::vector<int> targets(n);
  std::map<std::string, int> class_index;
  for (int k = 0; k < K; ++k) class_index[model.classes[k]] = k;
  for (std::size_t r = 0; r < n; ++r) {
    if (features[r].size() != static_cast<std::size_t>(dim)) {
      throw UserError("inconsistent feature dimension at row " +
                      std::to_string(r));
    }
    std::copy(features[r].begin(), features[r].end(), flat.begin() + r * dim);
    targets[r] = class_index.at(labels[r]);
  }

  int stride = dim + 1;
  model.weights.assign(static_cast<std::size_t>(K) * stride, 0.0);

  std::vector<double> grad;
  std::vector<double> trial(model.weights.size());
  double obj = softmax_objective(model.weights, K, dim, flat, targets,
                                 params.lambda, &grad);

  double best_obj = obj;
  std::vector<double> best_weights = model.weights;

  int iter = 0;
  for (; iter < params.max_iter; ++iter) {
    double gnorm2 = 0.0;
    for (double g : grad) gnorm2 += g * g;
    double gnorm = std::sqrt(gnorm2);
    model.final_grad_norm = gnorm;
    if (gnorm <= params.tol) {
      model.converged = true;
      break;
    }
    // backtracking line search along -grad with the Armijo condition
    double step = 1.0;
    double new_obj = obj;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < trial.size(); ++i) {
        trial[i] = model.weights[i] - step * grad[i];
      }
      new_obj = softmax_objective(trial, K, dim, flat, targets,
                                  params.lambda, nullptr);
      if (new_obj <= obj - params.armijo_c * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow; keep the best iterate
    model.weights.swap(trial);
    obj = softmax_objective(model.weights, K, dim, flat, targets,
                            params.lambda, &grad);
    if (obj < best_obj) {
      best_obj = obj;
      best_weights = model.weights;
    }
  }
  model.iterations = iter;
  if (!model.converged) {
    model.weights = best_weights;
    obj = softmax_objective(model.weights, K, dim, flat, targets,
                            params.lambda, &grad);
    double gnorm2 = 0.0;
    for (double g : grad) gnorm2 += g * g;
    model.final_grad_norm = std::sqrt(gnorm2);
  }
  model.final_objective = obj;
  return model;
}

std::vector<double> softmax_probabilities(const SoftmaxModel& model,
                                          const std::vector<double>& features) {
  if (features.size() != static_cast<std::size_t>(model.dim)) {
    throw UserError("feature dimension " + std::to_string(features.size()) +
                    " does not match model dimension " +
                    std::to_string(model.dim));
  }
  std::vector<double> probs(model.classes.size());
  softmax_row(model.weights.data(), static_cast<int>(model.classes.size()),
              model.dim, features.data(), probs.data());
  return probs;
}

Prediction predict_one(const SoftmaxModel& model, const std::string& id,
                       const std::string& true_label,
                       const std::vector<double>& features) {
  auto probs = softmax_probabilities(model, features);
  int best = 0;
  for (int k = 1; k < static_cast<int>(probs.size()); ++k) {
    if (probs[k] > probs[best]) best = k;
  }
  Prediction p;
  p.id = id;
  p.true_label = true_label;
  p.pred_label = model.classes[best];
  p.prob_max = probs[best];
  return p;
}

ZeroRule train_zero_rule(const std::vector<std::string>& labels,
                         const std::vector<std::string>& class_order) {
  if (labels.empty()) throw UserError("no training labels");
  std::map<std::string, long> counts;
  for (const auto& l : labels) ++counts[l];
  ZeroRule zr;
  long best = -1;
  for (const auto& c : class_order) {
    auto it = counts.find(c);
    if (it != counts.end() && it->second > best) {
      best = it->second;
      zr.majority = c;
    }
  }
  if (best < 0) throw UserError("no training label matches the class order");
  return zr;
}

void save_softmax(const SoftmaxModel& model, const std::string& path) {
  json j;
  j["classes"] = model.classes;
  j["dim"] = model.dim;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  j["final_objective"] = model.final_objective;
  j["final_grad_norm"] = model.final_grad_norm;
  j["weights"] = model.weights;
  write_file(path, j.dump(2) + "\n");
}

SoftmaxModel load_softmax(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  SoftmaxModel model;
  model.classes = j.at("classes").get<std::vector<std::string>>();
  model.dim = j.at("dim").get<int>();
  model.iterations = j.at("iterations").get<int>();
  model.converged = j.at("converged").get<bool>();
  model.final_objective = j.at("final_objective").get<double>();
  model.final_grad_norm = j.at("final_grad_norm").get<double>();
  model.weights = j.at("weights").get<std::vector<double>>();
  if (model.weights.size() !=
      model.classes.size() * static_cast<std::size_t>(model.dim + 1)) {
    throw IoError(path + ": weight matrix size does not match classes/dim");
  }
  return model;
}

void save_predictions_csv(const std::string& path,
                          const std::vector<Prediction>& preds,
                          const std::string& scheme,
                          const std::string& aggregation,
                          const std::string& embedding_config) {
  std::ostringstream out;
  out << "doc_or_domain_id,true_label,pred_label,scheme,aggregation,"
         "embedding_config,prob_max\n";
  for (const auto& p : preds) {
    out << csv_escape(p.id) << ',' << p.true_label << ',' << p.pred_label
        << ',' << scheme << ',' << aggregation << ','
        << csv_escape(embedding_config) << ',' << repr_double(p.prob_max)
        << '\n';
  }
  write_file(path, out.str());
}

std::vector<Prediction> load_predictions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open predictions " + path);
  std::vector<Prediction> preds;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("doc_or_domain_id", 0) == 0) continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() < 7) {
      throw IoError(path + ": short prediction row '" + line + "'");
    }
    Prediction p;
    p.id = fields[0];
    p.true_label = fields[1];
    p.pred_label = fields[2];
    p.prob_max = std::strtod(fields[6].c_str(), nullptr);
    preds.push_back(std::move(p));
  }
  return preds;
}

}  // namespace docbias
