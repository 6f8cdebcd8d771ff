#include "docbias/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"

namespace docbias {

using ordered_json = nlohmann::ordered_json;

MetricPair score(const std::vector<std::string>& preds,
                 const std::vector<std::string>& truths) {
  if (preds.size() != truths.size()) {
    throw UserError("prediction/truth length mismatch: " +
                    std::to_string(preds.size()) + " vs " +
                    std::to_string(truths.size()));
  }
  if (preds.empty()) throw UserError("nothing to score");

  long correct = 0;
  std::map<std::string, long> tp, fp, fn;
  std::set<std::string> truth_classes;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    truth_classes.insert(truths[i]);
    if (preds[i] == truths[i]) {
      ++correct;
      ++tp[truths[i]];
    } else {
      ++fp[preds[i]];
      ++fn[truths[i]];
    }
  }
  MetricPair out;
  out.accuracy = static_cast<double>(correct) / preds.size();
  double f1_sum = 0.0;
  for (const auto& c : truth_classes) {
    double tpc = tp.count(c) ? tp[c] : 0;
    double denom = 2 * tpc + (fp.count(c) ? fp[c] : 0) +
                   (fn.count(c) ? fn[c] : 0);
    f1_sum += denom > 0 ? 2 * tpc / denom : 0.0;
  }
  out.macro_f1 = f1_sum / truth_classes.size();
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// average ranks of |values|, scaled by 2 so ties stay integral
std::vector<long> doubled_ranks(const std::vector<double>& mags) {
  std::size_t n = mags.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return mags[a] < mags[b]; });
  std::vector<long> out(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && mags[order[j + 1]] == mags[order[i]]) ++j;
    // positions i..j share the average of ranks i+1..j+1
    long doubled = static_cast<long>(i + 1 + j + 1);  // 2 * average rank
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = doubled;
    i = j + 1;
  }
  return out;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_one_sided(const std::vector<double>& diffs) {
  WilcoxonResult res;
  std::vector<double> mags;
  std::vector<bool> positive;
  for (double d : diffs) {
    if (d == 0.0) continue;
    mags.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  res.n = static_cast<int>(mags.size());
  if (res.n == 0) {
    res.degenerate = true;
    res.p = 1.0;
    return res;
  }

  std::vector<long> d_ranks = doubled_ranks(mags);
  long w2 = 0;  // 2 * W+
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (positive[i]) w2 += d_ranks[i];
  }
  res.w_plus = w2 / 2.0;

  if (res.n <= 20) {
    // null distribution of 2*W+ by subset-sum counting, equivalent to
    // enumerating all 2^n sign assignments
    long total = 0;
    for (long r : d_ranks) total += r;
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    for (long r : d_ranks) {
      for (long s = total; s >= r; --s) count[s] += count[s - r];
    }
    double ge = 0.0;
    for (long s = w2; s <= total; ++s) ge += count[s];
    res.p = ge / std::pow(2.0, res.n);
    res.exact = true;
  } else {
    double n = res.n;
    double mean = n * (n + 1) / 4.0;
    double var = n * (n + 1) * (2 * n + 1) / 24.0;
    // tie correction: sum over groups of t^3 - t, in doubled-rank units the
    // group sizes are recovered by counting equal magnitudes
    std::map<double, long> groups;
    for (double m : mags) ++groups[m];
    double tie_term = 0.0;
    for (const auto& [mag, t] : groups) {
      tie_term += static_cast<double>(t) * t * t - t;
    }
    var -= tie_term / 48.0;
    if (var <= 0.0) {
      res.degenerate = true;
      res.p = 1.0;
      return res;
    }
    double z = (res.w_plus - mean - 0.5) / std::sqrt(var);
    res.p = normal_sf(z);
  }
  return res;
}

// ---------------------------------------------------------------------------

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // continued fraction (modified Lentz)
  auto betacf = [](double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 3e-14, fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
      int m2 = 2 * m;
      double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < fpmin) d = fpmin;
      c = 1.0 + aa / c;
      if (std::fabs(c) < fpmin) c = fpmin;
      d = 1.0 / d;
      h *= d * c;
      aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < fpmin) d = fpmin;
      c = 1.0 + aa / c;
      if (std::fabs(c) < fpmin) c = fpmin;
      d = 1.0 / d;
      double del = d * c;
      h *= del;
      if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
  };
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

PearsonResult pearson_r(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size()) throw UserError("pearson length mismatch");
  PearsonResult res;
  res.n = static_cast<int>(x.size());
  if (res.n < 3) throw UserError("pearson needs at least 3 pairs");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < res.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= res.n;
  my /= res.n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int i = 0; i < res.n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    res.undefined = true;
    return res;
  }
  res.r = sxy / std::sqrt(sxx * syy);
  if (res.r > 1.0) res.r = 1.0;
  if (res.r < -1.0) res.r = -1.0;
  double nu = res.n - 2;
  double r2 = res.r * res.r;
  if (r2 >= 1.0) {
    res.p = 0.0;
  } else {
    double t2 = r2 * nu / (1.0 - r2);
    res.p = incomplete_beta(nu / 2.0, 0.5, nu / (nu + t2));
  }
  return res;
}

// ---------------------------------------------------------------------------

std::vector<double> GraphMetricVector::values() const {
  return {nodes,      edges,        density,     mean_degree,
          max_degree, mean_clustering, transitivity, components,
          largest_component_fraction, assortativity};
}

const std::vector<std::string>& GraphMetricVector::names() {
  static const std::vector<std::string> kNames = {
      "nodes",      "edges",          "density",      "mean_degree",
      "max_degree", "mean_clustering", "transitivity", "components",
      "largest_component_fraction",    "degree_assortativity"};
  return kNames;
}

GraphMetricVector graph_metrics(const DocGraph& g) {
  GraphMetricVector m;
  std::size_t n = g.nodes.size();
  std::size_t e = g.edges.size();
  if (n == 0) {
    m.empty = true;
    return m;
  }
  m.nodes = static_cast<double>(n);
  m.edges = static_cast<double>(e);
  if (n > 1) m.density = 2.0 * e / (static_cast<double>(n) * (n - 1));

  std::vector<std::vector<int>> adj(n);
  for (const auto& edge : g.edges) {
    adj[edge.u].push_back(edge.v);
    adj[edge.v].push_back(edge.u);
  }
  std::vector<std::set<int>> nbr(n);
  for (std::size_t v = 0; v < n; ++v) nbr[v] = {adj[v].begin(), adj[v].end()};

  double deg_sum = 0.0;
  long max_deg = 0;
  for (std::size_t v = 0; v < n; ++v) {
    long k = static_cast<long>(adj[v].size());
    deg_sum += k;
    max_deg = std::max(max_deg, k);
  }
  m.mean_degree = deg_sum / n;
  m.max_degree = static_cast<double>(max_deg);

  // triangles through each node, local clustering, wedge count
  double clustering_sum = 0.0;
  double triangles3 = 0.0;  // 3 * triangle count = closed wedges
  double wedges = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    long k = static_cast<long>(adj[v].size());
    if (k < 2) continue;
    long links = 0;
    for (std::size_t i = 0; i + 1 < adj[v].size(); ++i) {
      for (std::size_t j = i + 1; j < adj[v].size(); ++j) {
        if (nbr[adj[v][i]].count(adj[v][j])) ++links;
      }
    }
    double possible = k * (k - 1) / 2.0;
    clustering_sum += links / possible;
    triangles3 += links;  // each triangle closes one wedge at each corner
    wedges += possible;
  }
  m.mean_clustering = clustering_sum / n;
  m.transitivity = wedges > 0 ? triangles3 / wedges : 0.0;

  // connected components by BFS
  std::vector<int> comp(n, -1);
  int n_comp = 0;
  std::size_t largest = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<std::size_t> stack = {s};
    comp[s] = n_comp;
    std::size_t size = 0;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      ++size;
      for (int w : adj[v]) {
        if (comp[w] < 0) {
          comp[w] = n_comp;
          stack.push_back(w);
        }
      }
    }
    largest = std::max(largest, size);
    ++n_comp;
  }
  m.components = n_comp;
  m.largest_component_fraction = static_cast<double>(largest) / n;

  // degree assortativity: correlation of endpoint degrees over directed edges
  if (e > 0) {
    double sx = 0.0, sy = 0.0, sxy = 0.0, sx2 = 0.0, sy2 = 0.0;
    double cnt = 2.0 * e;
    for (const auto& edge : g.edges) {
      double du = static_cast<double>(adj[edge.u].size());
      double dv = static_cast<double>(adj[edge.v].size());
      sx += du + dv;
      sy += du + dv;
      sxy += 2 * du * dv;
      sx2 += du * du + dv * dv;
      sy2 += du * du + dv * dv;
    }
    double cov = sxy / cnt - (sx / cnt) * (sy / cnt);
    double vx = sx2 / cnt - (sx / cnt) * (sx / cnt);
    double vy = sy2 / cnt - (sy / cnt) * (sy / cnt);
    if (vx > 1e-12 && vy > 1e-12) {
      m.assortativity = cov / std::sqrt(vx * vy);
      m.assortativity_defined = true;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

MetricsBaselineResult metrics_baseline(
    const std::vector<std::vector<double>>& train_x,
    const std::vector<std::string>& train_labels,
    const std::vector<std::vector<double>>& test_x,
    const std::vector<std::string>& test_labels,
    const std::vector<std::string>& class_order,
    const SoftmaxParams& params) {
  if (train_x.empty() || test_x.empty()) {
    throw UserError("metrics baseline needs train and test rows");
  }
  std::size_t dim = train_x.front().size();
  for (const auto& row : train_x) {
    if (row.size() != dim) throw UserError("ragged metric rows");
  }
  for (const auto& row : test_x) {
    if (row.size() != dim) throw UserError("ragged metric rows");
  }

  MetricsBaselineResult result;
  std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
  for (const auto& row : train_x) {
    for (std::size_t j = 0; j < dim; ++j) mean[j] += row[j];
  }
  for (std::size_t j = 0; j < dim; ++j) mean[j] /= train_x.size();
  for (const auto& row : train_x) {
    for (std::size_t j = 0; j < dim; ++j) {
      double d = row[j] - mean[j];
      sd[j] += d * d;
    }
  }
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < dim; ++j) {
    sd[j] = std::sqrt(sd[j] / train_x.size());
    if (sd[j] > 0.0) {
      keep.push_back(j);
    } else {
      result.dropped_columns.push_back(static_cast<int>(j));
      result.warnings.push_back("metric column " + std::to_string(j) +
                                " is constant on the training split; dropped");
    }
  }
  if (keep.empty()) {
    throw UserError("every metric column is constant on the training split");
  }

  auto standardize = [&](const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
      std::vector<double> z;
      z.reserve(keep.size());
      for (std::size_t j : keep) z.push_back((row[j] - mean[j]) / sd[j]);
      out.push_back(std::move(z));
    }
    return out;
  };

  SoftmaxModel model = train_softmax(standardize(train_x), train_labels,
                                     class_order, params);
  auto test_z = standardize(test_x);
  std::vector<std::string> preds;
  preds.reserve(test_z.size());
  for (const auto& row : test_z) {
    preds.push_back(predict_one(model, "", "", row).pred_label);
  }
  result.test_score = score(preds, test_labels);
  return result;
}

// ---------------------------------------------------------------------------
// experiment grid
// ---------------------------------------------------------------------------

CellUnits grid_units(const std::vector<GridArticle>& articles,
                     LabelScheme scheme, Aggregation agg) {
  CellUnits units;
  if (agg == Aggregation::None) {
    for (const auto& a : articles) {
      units.ids.push_back(a.doc_id);
      units.features.push_back(a.values);
      units.labels.push_back(map_label(a.label, scheme));
    }
    return units;
  }
  std::vector<ArticleVector> avs;
  avs.reserve(articles.size());
  for (const auto& a : articles) {
    ArticleVector av;
    av.doc_id = a.doc_id;
    av.domain = a.domain;
    av.topic = a.topic;
    av.label = map_label(a.label, scheme);
    av.values = a.values;
    avs.push_back(std::move(av));
  }
  for (auto& dv : aggregate_domains(avs, agg)) {
    units.ids.push_back(dv.domain);
    units.features.push_back(std::move(dv.values));
    units.labels.push_back(dv.label);
  }
  return units;
}

namespace {

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / (xs.size() - 1));
}

}  // namespace

ExperimentReport run_grid(const GridSpec& spec, const CellProvider& provider) {
  if (spec.embeddings.empty()) throw ConfigError("grid needs embeddings");
  if (spec.schemes.empty()) throw ConfigError("grid needs label schemes");
  if (spec.aggregations.empty()) throw ConfigError("grid needs aggregations");
  if (spec.seeds.empty()) throw ConfigError("grid needs seeds");

  ExperimentReport report;
  report.dataset = spec.dataset;
  report.split_hash = spec.split_hash;

  bool wants_full = std::find(spec.schemes.begin(), spec.schemes.end(),
                              LabelScheme::Full) != spec.schemes.end();

  for (const auto& embedding : spec.embeddings) {
    for (std::uint64_t seed : spec.seeds) {
      std::vector<GridArticle> train, test;
      std::string fetch_error;
      try {
        provider(embedding, seed, train, test);
      } catch (const std::exception& e) {
        fetch_error = e.what();
      }
      for (LabelScheme scheme : spec.schemes) {
        for (Aggregation agg : spec.aggregations) {
          GridCell cell;
          cell.embedding = embedding;
          cell.scheme = to_string(scheme);
          cell.aggregation = to_string(agg);
          cell.seed = seed;
          if (!fetch_error.empty()) {
            cell.error = fetch_error;
            report.cells.push_back(std::move(cell));
            continue;
          }
          try {
            CellUnits tr = grid_units(train, scheme, agg);
            CellUnits te = grid_units(test, scheme, agg);
            cell.n_train_units = static_cast<int>(tr.ids.size());
            cell.n_test_units = static_cast<int>(te.ids.size());
            auto classes = scheme_classes(scheme);
            SoftmaxModel model = train_softmax(tr.features, tr.labels,
                                               classes, spec.softmax);
            std::vector<std::string> preds, full_preds;
            preds.reserve(te.ids.size());
            for (std::size_t i = 0; i < te.ids.size(); ++i) {
              preds.push_back(
                  predict_one(model, te.ids[i], te.labels[i], te.features[i])
                      .pred_label);
            }
            cell.model = score(preds, te.labels);
            ZeroRule zr = train_zero_rule(tr.labels, classes);
            std::vector<std::string> zr_preds(te.ids.size(), zr.majority);
            cell.zero_rule = score(zr_preds, te.labels);
            cell.ok = true;

            // coarse-scheme cells derived by regrouping full predictions
            if (scheme == LabelScheme::Full && spec.regroup_full) {
              for (LabelScheme target :
                   {LabelScheme::LeftCenterRight, LabelScheme::Binary}) {
                GridCell derived = cell;
                derived.scheme = to_string(target);
                derived.derived_from_full = true;
                std::vector<std::string> re_preds =
                    regroup_predictions(preds, target);
                std::vector<std::string> re_truth;
                re_truth.reserve(te.labels.size());
                for (const auto& t : te.labels) {
                  re_truth.push_back(map_label(*parse_bias_label(t), target));
                }
                derived.model = score(re_preds, re_truth);
                std::vector<std::string> re_zr =
                    regroup_predictions(zr_preds, target);
                derived.zero_rule = score(re_zr, re_truth);
                report.cells.push_back(std::move(derived));
              }
            }
          } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
          }
          report.cells.push_back(std::move(cell));
        }
      }
    }
  }
  (void)wants_full;

  finalize_report(report, spec.comparison_pairs);
  return report;
}

void finalize_report(
    ExperimentReport& report,
    const std::vector<std::pair<std::string, std::string>>& comparison_pairs) {
  report.summaries.clear();
  report.comparisons.clear();

  // group native (non-derived) cells by embedding/scheme/aggregation
  std::map<std::tuple<std::string, std::string, std::string>,
           std::map<std::uint64_t, const GridCell*>>
      by_config;
  for (const auto& cell : report.cells) {
    if (!cell.ok || cell.derived_from_full) continue;
    by_config[{cell.embedding, cell.scheme, cell.aggregation}][cell.seed] =
        &cell;
  }

  for (const auto& [key, by_seed] : by_config) {
    const auto& [embedding, scheme, agg] = key;
    GridSummary s;
    s.embedding = embedding;
    s.scheme = scheme;
    s.aggregation = agg;
    std::vector<double> accs, f1s;
    for (const auto& [seed, cell] : by_seed) {
      accs.push_back(cell->model.accuracy);
      f1s.push_back(cell->model.macro_f1);
    }
    s.n = static_cast<int>(accs.size());
    for (double a : accs) s.accuracy_mean += a;
    for (double f : f1s) s.macro_f1_mean += f;
    s.accuracy_mean /= s.n;
    s.macro_f1_mean /= s.n;
    s.accuracy_std = sample_std(accs, s.accuracy_mean);
    s.macro_f1_std = sample_std(f1s, s.macro_f1_mean);
    report.summaries.push_back(std::move(s));
  }

  // signed-rank comparisons: each embedding against its zero-rule baseline,
  // then requested embedding pairs, pairing per-seed scores
  auto add_comparison = [&](const std::string& a, const std::string& b,
                            const std::string& scheme, const std::string& agg,
                            const std::string& metric,
                            const std::vector<double>& diffs) {
    if (diffs.empty()) return;
    WilcoxonResult w = wilcoxon_one_sided(diffs);
    GridComparison c;
    c.a = a;
    c.b = b;
    c.scheme = scheme;
    c.aggregation = agg;
    c.metric = metric;
    c.n = static_cast<int>(diffs.size());
    for (double d : diffs) c.mean_diff += d;
    c.mean_diff /= diffs.size();
    c.p = w.p;
    c.degenerate = w.degenerate;
    report.comparisons.push_back(std::move(c));
  };

  for (const auto& [key, by_seed] : by_config) {
    const auto& [embedding, scheme, agg] = key;
    std::vector<double> acc_diffs, f1_diffs;
    for (const auto& [seed, cell] : by_seed) {
      acc_diffs.push_back(cell->model.accuracy - cell->zero_rule.accuracy);
      f1_diffs.push_back(cell->model.macro_f1 - cell->zero_rule.macro_f1);
    }
    add_comparison(embedding, "zero_rule", scheme, agg, "accuracy", acc_diffs);
    add_comparison(embedding, "zero_rule", scheme, agg, "macro_f1", f1_diffs);
  }

  std::set<std::pair<std::string, std::string>> combos;
  for (const auto& [key, by_seed] : by_config) {
    combos.insert({std::get<1>(key), std::get<2>(key)});
  }
  for (const auto& [a, b] : comparison_pairs) {
    for (const auto& [scheme, agg] : combos) {
      auto ita = by_config.find({a, scheme, agg});
      auto itb = by_config.find({b, scheme, agg});
      if (ita == by_config.end() || itb == by_config.end()) continue;
      std::vector<double> acc_diffs, f1_diffs;
      for (const auto& [seed, cell_a] : ita->second) {
        auto itc = itb->second.find(seed);
        if (itc == itb->second.end()) continue;
        acc_diffs.push_back(cell_a->model.accuracy -
                            itc->second->model.accuracy);
        f1_diffs.push_back(cell_a->model.macro_f1 -
                           itc->second->model.macro_f1);
      }
      add_comparison(a, b, scheme, agg, "accuracy", acc_diffs);
      add_comparison(a, b, scheme, agg, "macro_f1", f1_diffs);
    }
  }
}

std::string format_mean_std(double mean, double stddev) {
  char mbuf[32], sbuf[32];
  std::snprintf(mbuf, sizeof(mbuf), "%.3f", mean);
  std::snprintf(sbuf, sizeof(sbuf), "%.3f", stddev);
  std::string s = sbuf;
  if (s.rfind("0.", 0) == 0) s = s.substr(1);
  return std::string(mbuf) + " (" + s + ")";
}

std::string report_to_json(const ExperimentReport& report) {
  ordered_json j;
  j["dataset"] = report.dataset;
  j["split_hash"] = report.split_hash;
  j["cells"] = ordered_json::array();
  for (const auto& c : report.cells) {
    ordered_json jc;
    jc["embedding"] = c.embedding;
    jc["scheme"] = c.scheme;
    jc["aggregation"] = c.aggregation;
    jc["seed"] = c.seed;
    jc["derived_from_full"] = c.derived_from_full;
    jc["ok"] = c.ok;
    if (!c.ok) {
      jc["error"] = c.error;
    } else {
      jc["accuracy"] = c.model.accuracy;
      jc["macro_f1"] = c.model.macro_f1;
      jc["zero_rule_accuracy"] = c.zero_rule.accuracy;
      jc["zero_rule_macro_f1"] = c.zero_rule.macro_f1;
      jc["n_train_units"] = c.n_train_units;
      jc["n_test_units"] = c.n_test_units;
    }
    j["cells"].push_back(std::move(jc));
  }
  j["comparisons"] = ordered_json::array();
  for (const auto& c : report.comparisons) {
    ordered_json jc;
    jc["a"] = c.a;
    jc["b"] = c.b;
    jc["scheme"] = c.scheme;
    jc["aggregation"] = c.aggregation;
    jc["metric"] = c.metric;
    jc["n"] = c.n;
    jc["mean_diff"] = c.mean_diff;
    jc["p_value"] = c.p;
    jc["degenerate"] = c.degenerate;
    j["comparisons"].push_back(std::move(jc));
  }
  j["summaries"] = ordered_json::array();
  for (const auto& s : report.summaries) {
    ordered_json js;
    js["embedding"] = s.embedding;
    js["scheme"] = s.scheme;
    js["aggregation"] = s.aggregation;
    js["n"] = s.n;
    js["accuracy"] = format_mean_std(s.accuracy_mean, s.accuracy_std);
    js["macro_f1"] = format_mean_std(s.macro_f1_mean, s.macro_f1_std);
    js["accuracy_mean"] = s.accuracy_mean;
    js["accuracy_std"] = s.accuracy_std;
    js["macro_f1_mean"] = s.macro_f1_mean;
    js["macro_f1_std"] = s.macro_f1_std;
    j["summaries"].push_back(std::move(js));
  }
  return j.dump(2) + "\n";
}

void save_report(const ExperimentReport& report, const std::string& dir) {
  write_file(dir + "/report.json", report_to_json(report));

  std::ostringstream summary;
  summary << "embedding,scheme,aggregation,n_seeds,accuracy,macro_f1\n";
  for (const auto& s : report.summaries) {
    summary << s.embedding << ',' << s.scheme << ',' << s.aggregation << ','
            << s.n << ',' << csv_escape(format_mean_std(s.accuracy_mean,
                                                        s.accuracy_std))
            << ',' << csv_escape(format_mean_std(s.macro_f1_mean,
                                                 s.macro_f1_std))
            << '\n';
  }
  write_file(dir + "/summary.csv", summary.str());

  std::ostringstream comp;
  comp << "a,b,scheme,aggregation,metric,n,mean_diff,p_value,degenerate\n";
  for (const auto& c : report.comparisons) {
    comp << c.a << ',' << c.b << ',' << c.scheme << ',' << c.aggregation
         << ',' << c.metric << ',' << c.n << ',' << repr_double(c.mean_diff)
         << ',' << repr_double(c.p) << ',' << (c.degenerate ? "true" : "false")
         << '\n';
  }
  write_file(dir + "/comparisons.csv", comp.str());
}

}  // namespace docbias
