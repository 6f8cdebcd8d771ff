#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "docbias/corpus.hpp"
#include "docbias/detector.hpp"
#include "docbias/graph.hpp"
#include "docbias/util.hpp"

namespace docbias {

// ---------------------------------------------------------------------------
// scores
// ---------------------------------------------------------------------------

struct MetricPair {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

// accuracy and macro F1; macro averages per-class F1 over the classes present
// in `truths` (a class with no correct predictions contributes 0)
MetricPair score(const std::vector<std::string>& preds,
                 const std::vector<std::string>& truths);

// ---------------------------------------------------------------------------
// statistics
// ---------------------------------------------------------------------------

struct WilcoxonResult {
  double p = 1.0;
  double w_plus = 0.0;   // signed-rank statistic (positive ranks)
  int n = 0;             // pairs remaining after zero differences dropped
  bool degenerate = false;  // all differences were zero
  bool exact = false;       // exact enumeration (vs normal approximation)
};

// one-sided signed-rank test of H1: differences > 0; zero differences are
// dropped, tied magnitudes get average ranks; exact null for n <= 20
WilcoxonResult wilcoxon_one_sided(const std::vector<double>& diffs);

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;
  int n = 0;
  bool undefined = false;  // zero variance on either side
};

// product-moment correlation with two-sided p from the t distribution
PearsonResult pearson_r(const std::vector<double>& x,
                        const std::vector<double>& y);

// regularized incomplete beta I_x(a, b)
double incomplete_beta(double a, double b, double x);

// ---------------------------------------------------------------------------
// graph metrics
// ---------------------------------------------------------------------------

struct GraphMetricVector {
  double nodes = 0.0;
  double edges = 0.0;
  double density = 0.0;
  double mean_degree = 0.0;
  double max_degree = 0.0;
  double mean_clustering = 0.0;
  double transitivity = 0.0;
  double components = 0.0;
  double largest_component_fraction = 0.0;
  double assortativity = 0.0;
  bool assortativity_defined = false;
  bool empty = false;

  std::vector<double> values() const;
  static const std::vector<std::string>& names();
};

GraphMetricVector graph_metrics(const DocGraph& g);

// ---------------------------------------------------------------------------
// metrics baseline
// ---------------------------------------------------------------------------

struct MetricsBaselineResult {
  MetricPair test_score;
  std::vector<int> dropped_columns;  // constant under the training split
  std::vector<std::string> warnings;
};

// standardizes columns to training z-scores (constant columns dropped with a
// warning), trains the softmax classifier, and scores the test rows
MetricsBaselineResult metrics_baseline(
    const std::vector<std::vector<double>>& train_x,
    const std::vector<std::string>& train_labels,
    const std::vector<std::vector<double>>& test_x,
    const std::vector<std::string>& test_labels,
    const std::vector<std::string>& class_order,
    const SoftmaxParams& params = {});

// ---------------------------------------------------------------------------
// experiment grid
// ---------------------------------------------------------------------------

struct GridArticle {
  std::string doc_id;
  std::string domain;
  std::string topic;
  BiasLabel label = BiasLabel::Center;
  std::vector<double> values;
};

struct GridSpec {
  std::string dataset;
  std::string split_hash;
  std::vector<std::string> embeddings;
  std::vector<LabelScheme> schemes;
  std::vector<Aggregation> aggregations;
  std::vector<std::uint64_t> seeds;
  // embedding pairs compared with the signed-rank test, besides the implicit
  // comparison of every embedding against the zero-rule baseline
  std::vector<std::pair<std::string, std::string>> comparison_pairs;
  bool regroup_full = true;  // derive lcr/binary cells from full predictions
  SoftmaxParams softmax;
};

// supplies article vectors for one embedding configuration and seed
using CellProvider = std::function<void(
    const std::string& embedding, std::uint64_t seed,
    std::vector<GridArticle>& train, std::vector<GridArticle>& test)>;

struct GridCell {
  std::string embedding;
  std::string scheme;
  std::string aggregation;
  std::uint64_t seed = 0;
  bool derived_from_full = false;
  bool ok = false;
  std::string error;
  MetricPair model;
  MetricPair zero_rule;
  int n_train_units = 0;
  int n_test_units = 0;
};

struct GridComparison {
  std::string a;
  std::string b;
  std::string scheme;
  std::string aggregation;
  std::string metric;  // accuracy | macro_f1
  int n = 0;
  double mean_diff = 0.0;
  double p = 1.0;
  bool degenerate = false;
};

struct GridSummary {
  std::string embedding;
  std::string scheme;
  std::string aggregation;
  int n = 0;
  double accuracy_mean = 0.0, accuracy_std = 0.0;
  double macro_f1_mean = 0.0, macro_f1_std = 0.0;
};

struct ExperimentReport {
  std::string dataset;
  std::string split_hash;
  std::vector<GridCell> cells;
  std::vector<GridComparison> comparisons;
  std::vector<GridSummary> summaries;
};

// classification units for one grid cell: articles as-is under
// Aggregation::None, otherwise one row per domain
struct CellUnits {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> features;
  std::vector<std::string> labels;
};
CellUnits grid_units(const std::vector<GridArticle>& articles,
                     LabelScheme scheme, Aggregation agg);

// fills summaries and signed-rank comparisons from report.cells
void finalize_report(
    ExperimentReport& report,
    const std::vector<std::pair<std::string, std::string>>& comparison_pairs);

ExperimentReport run_grid(const GridSpec& spec, const CellProvider& provider);

// "0.592 (.151)" — three decimals, std shown without its leading zero
std::string format_mean_std(double mean, double stddev);

std::string report_to_json(const ExperimentReport& report);
void save_report(const ExperimentReport& report, const std::string& dir);

}  // namespace docbias
