#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "docbias/corpus.hpp"
#include "docbias/util.hpp"

namespace docbias {

// ---------------------------------------------------------------------------
// label schemes
// ---------------------------------------------------------------------------

enum class LabelScheme { Full, LeftCenterRight, Binary };

std::string to_string(LabelScheme scheme);
LabelScheme parse_label_scheme(const std::string& name);

// maps a seven-way label into the scheme's label string
std::string map_label(BiasLabel label, LabelScheme scheme);

// class names in canonical order for a scheme
std::vector<std::string> scheme_classes(LabelScheme scheme);

// regroups prediction strings made under the Full scheme into a coarser
// scheme; regrouping into Full is the identity
std::vector<std::string> regroup_predictions(
    const std::vector<std::string>& full_predictions, LabelScheme target);

// ---------------------------------------------------------------------------
// domain aggregation
// ---------------------------------------------------------------------------

enum class Aggregation { None, Mean, TopicDiffAvg, TopicDiffNorm };

std::string to_string(Aggregation agg);
Aggregation parse_aggregation(const std::string& name);

struct ArticleVector {
  std::string doc_id;
  std::string domain;
  std::string topic;
  std::string label;  // scheme-mapped label string
  std::vector<double> values;
};

struct DomainVector {
  std::string domain;
  std::string label;
  int article_count = 0;
  std::vector<double> values;
};

// collapses article vectors into one vector per domain; Aggregation::None is
// rejected here (the caller keeps article granularity instead).  Topic means
// are taken over all articles passed in.  Domains with zero articles do not
// appear.  Throws UserError when a domain carries conflicting labels.
std::vector<DomainVector> aggregate_domains(
    const std::vector<ArticleVector>& articles, Aggregation agg);

// ---------------------------------------------------------------------------
// softmax regression
// ---------------------------------------------------------------------------

struct SoftmaxParams {
  double lambda = 1e-4;      // L2 strength; bias column exempt
  double tol = 1e-6;         // gradient-norm stopping threshold
  int max_iter = 500;
  double armijo_c = 1e-4;
};

struct SoftmaxModel {
  std::vector<std::string> classes;      // canonical order, training subset
  std::vector<double> weights;           // K x (d+1) row-major, bias last
  int dim = 0;
  int iterations = 0;
  bool converged = false;
  double final_objective = 0.0;
  double final_grad_norm = 0.0;

  const double* row(int k) const { return weights.data() + static_cast<std::size_t>(k) * (dim + 1); }
};

struct Prediction {
  std::string id;
  std::string true_label;
  std::string pred_label;
  double prob_max = 0.0;
};

// objective = mean cross-entropy + (lambda/2)*||W||^2 (bias excluded); the
// gradient is written to grad (same layout as weights) when non-null
double softmax_objective(const std::vector<double>& weights, int n_classes,
                         int dim, const std::vector<double>& features,
                         const std::vector<int>& targets, double lambda,
                         std::vector<double>* grad);

SoftmaxModel train_softmax(const std::vector<std::vector<double>>& features,
                           const std::vector<std::string>& labels,
                           const std::vector<std::string>& class_order,
                           const SoftmaxParams& params = {});

// probabilities for one feature vector, in model.classes order
std::vector<double> softmax_probabilities(const SoftmaxModel& model,
                                          const std::vector<double>& features);

Prediction predict_one(const SoftmaxModel& model, const std::string& id,
                       const std::string& true_label,
                       const std::vector<double>& features);

// majority-class baseline; ties break toward the earlier canonical class
struct ZeroRule {
  std::string majority;
};
ZeroRule train_zero_rule(const std::vector<std::string>& labels,
                         const std::vector<std::string>& class_order);

void save_softmax(const SoftmaxModel& model, const std::string& path);
SoftmaxModel load_softmax(const std::string& path);

void save_predictions_csv(const std::string& path,
                          const std::vector<Prediction>& preds,
                          const std::string& scheme,
                          const std::string& aggregation,
                          const std::string& embedding_config);
std::vector<Prediction> load_predictions_csv(const std::string& path);

}  // namespace docbias
