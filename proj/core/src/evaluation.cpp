#include "lagraph/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <stdexcept>

#include "lagraph/ops.hpp"
#include "lagraph/optim.hpp"

namespace lagraph {

using nlohmann::json;

Matrix extract_graph_repr(const GraphDataset& dataset, Encoder& encoder) {
  if (dataset.feature_dim != encoder.config.input_dim) {
    throw ShapeError("extract_graph_repr: dataset feature dim " + std::to_string(dataset.feature_dim) +
                     " does not match encoder input dim " + std::to_string(encoder.config.input_dim));
  }
  NoGradGuard guard;
  const std::size_t q = encoder.config.hidden_dim;
  const std::size_t layers = encoder.layers.size();
  Matrix out(dataset.size(), layers * q);
  constexpr std::size_t chunk = 256;
  for (std::size_t begin = 0; begin < dataset.size(); begin += chunk) {
    const std::size_t end = std::min(dataset.size(), begin + chunk);
    std::vector<const Graph*> members;
    for (std::size_t i = begin; i < end; ++i) members.push_back(&dataset.graphs[i]);
    const GraphBatch batch = batch_graphs(std::span<const Graph* const>(members));
    auto hs = encode(batch, encoder, Mode::eval, false);
    for (std::size_t l = 0; l < layers; ++l) {
      const Matrix z = readout_sum(hs[l], batch).value();
      for (std::size_t g = 0; g < z.rows(); ++g)
        for (std::size_t c = 0; c < q; ++c) out(begin + g, l * q + c) = z(g, c);
    }
  }
  return out;
}

Matrix extract_node_repr(const Graph& graph, Encoder& encoder, bool concat_raw) {
  NoGradGuard guard;
  const Graph* one = &graph;
  const GraphBatch batch = batch_graphs(std::span<const Graph* const>(&one, 1));
  Matrix h = encode(batch, encoder, Mode::eval, false).back().value();
  if (!concat_raw) return h;
  const Matrix blocks[] = {graph.features, h};
  return hconcat(blocks);
}

namespace {

void fnv(std::uint64_t& h, std::span<const double> values) {
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
}

}  // namespace

std::uint64_t model_checksum(const Encoder& encoder) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& p : encoder.parameters()) fnv(h, p.value().data());
  for (const auto& l : encoder.layers) {
    for (const auto* bn : {l.bn_inner ? &*l.bn_inner : nullptr, l.bn_out ? &*l.bn_out : nullptr}) {
      if (!bn) continue;
      fnv(h, bn->running_mean);
      fnv(h, bn->running_var);
    }
  }
  return h;
}

json EvalReport::to_json() const {
  return {{"metric", metric},       {"classifier", classifier},
          {"fold_scores", fold_scores}, {"mean", mean},
          {"std", std},             {"hyperparameters", hyperparameters},
          {"seed", seed},           {"warnings", warnings}};
}

void finalize(EvalReport& r) {
  if (r.fold_scores.empty()) throw std::invalid_argument("report without scores");
  const double n = static_cast<double>(r.fold_scores.size());
  double s = 0.0;
  for (double v : r.fold_scores) s += v;
  r.mean = s / n;
  double ss = 0.0;
  for (double v : r.fold_scores) ss += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(ss / n);
}

// ---- logistic regression -------------------------------------------------

namespace {

LogReg logreg_train(const Matrix& x, const Matrix& targets, bool multilabel,
                    const LogRegOptions& o, Rng& rng) {
  if (x.rows() != targets.rows()) throw ShapeError("logreg: sample count mismatch");
  if (x.rows() == 0) throw std::invalid_argument("logreg: empty training set");
  if (!all_finite(x)) throw std::invalid_argument("logreg: non-finite representations");
  const std::size_t n = x.rows(), c = targets.cols();
  std::vector<Value> params = {Value::parameter(xavier_init(x.cols(), c, rng)),
                               Value::parameter(Matrix(1, c))};
  AdamState state;
  AdamOptions ao;
  ao.lr = o.lr;
  for (std::size_t e = 0; e < o.epochs; ++e) {
    const Matrix& w = params[0].value();
    Matrix s = multiply(x, w);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < c; ++k) s(r, k) += params[1].value()(0, k);
    // s becomes dL/ds of the mean loss.
    for (std::size_t r = 0; r < n; ++r) {
      auto row = s.row(r);
      if (multilabel) {
        for (std::size_t k = 0; k < c; ++k) row[k] = 1.0 / (1.0 + std::exp(-row[k])) - targets(r, k);
      } else {
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (double& v : row) z += (v = std::exp(v - mx));
        for (std::size_t k = 0; k < c; ++k) row[k] = row[k] / z - targets(r, k);
      }
      for (double& v : row) v /= static_cast<double>(n);
    }
    Matrix gw = multiply_tn(x, s);
    if (o.weight_decay != 0.0) gw += w * o.weight_decay;
    Matrix gb(1, c);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < c; ++k) gb(0, k) += s(r, k);
    const Matrix grads[] = {gw, gb};
    adam_step(params, grads, state, ao);
  }
  LogReg m;
  m.weight = params[0].value();
  m.bias = params[1].value();
  m.multilabel = multilabel;
  return m;
}

}  // namespace

Matrix one_hot(std::span<const std::size_t> labels, std::size_t num_classes) {
  Matrix y(labels.size(), num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes) throw std::out_of_range("label outside [0, num_classes)");
    y(i, labels[i]) = 1.0;
  }
  return y;
}

LogReg logreg_fit(const Matrix& x, std::span<const std::size_t> labels, std::size_t num_classes,
                  const LogRegOptions& options, Rng& rng) {
  if (labels.size() != x.rows()) throw ShapeError("logreg_fit: label count mismatch");
  LogReg m = logreg_train(x, one_hot(labels, num_classes), false, options, rng);
  m.degenerate = std::adjacent_find(labels.begin(), labels.end(), std::not_equal_to<>()) == labels.end();
  return m;
}

LogReg logreg_fit_multilabel(const Matrix& x, const Matrix& targets, const LogRegOptions& options,
                             Rng& rng) {
  return logreg_train(x, targets, true, options, rng);
}

Matrix logreg_scores(const LogReg& model, const Matrix& x) {
  Matrix s = multiply(x, model.weight);
  for (std::size_t r = 0; r < s.rows(); ++r)
    for (std::size_t k = 0; k < s.cols(); ++k) s(r, k) += model.bias(0, k);
  return s;
}

std::vector<std::size_t> logreg_predict(const LogReg& model, const Matrix& x) {
  const Matrix s = logreg_scores(model, x);
  std::vector<std::size_t> out(s.rows());
  for (std::size_t r = 0; r < s.rows(); ++r) {
    auto row = s.row(r);
    out[r] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

Matrix logreg_predict_multilabel(const LogReg& model, const Matrix& x) {
  Matrix s = logreg_scores(model, x);
  for (double& v : s.data()) v = v > 0.0 ? 1.0 : 0.0;
  return s;
}

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    throw std::invalid_argument("accuracy: need equally sized non-empty label lists");
  }
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

double micro_f1(const Matrix& predicted, const Matrix& truth) {
  require_same_shape(predicted, truth, "micro_f1");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted.data()[i] > 0.5, t = truth.data()[i] > 0.5;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  const double denom = 2 * tp + fp + fn;
  return denom == 0 ? 1.0 : 2 * tp / denom;
}

EvalReport logreg_evaluate(const Matrix& reprs, std::span<const std::size_t> labels,
                           std::size_t num_classes, std::span<const std::size_t> train,
                           std::span<const std::size_t> test, const LogRegOptions& options,
                           std::uint64_t seed, std::size_t repetitions) {
  if (train.empty() || test.empty()) throw std::invalid_argument("logreg_evaluate: empty split");
  if (repetitions < 1) throw std::invalid_argument("logreg_evaluate: repetitions must be >= 1");
  EvalReport report;
  report.metric = "accuracy";
  report.classifier = "logistic-regression";
  report.seed = seed;
  report.hyperparameters = {{"lr", options.lr},
                            {"weight_decay", options.weight_decay},
                            {"epochs", options.epochs},
                            {"repetitions", repetitions}};
  const Matrix xtr = select_rows(reprs, train), xte = select_rows(reprs, test);
  std::vector<std::size_t> ytr, yte;
  for (std::size_t i : train) ytr.push_back(labels[i]);
  for (std::size_t i : test) yte.push_back(labels[i]);
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    Rng rng(derive_seed(seed, rep));
    LogReg m = logreg_fit(xtr, ytr, num_classes, options, rng);
    if (m.degenerate && rep == 0) report.warnings.push_back("single-class training set");
    report.fold_scores.push_back(accuracy(logreg_predict(m, xte), yte));
  }
  finalize(report);
  return report;
}

// ---- linear SVM ----------------------------------------------------------

namespace {

Matrix standardize_augment(const Matrix& x, std::span<const double> mean,
                           std::span<const double> scale) {
  Matrix out(x.rows(), x.cols() + 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - mean[c]) / scale[c];
    out(r, x.cols()) = 1.0;
  }
  return out;
}

Matrix dual_cd(const Matrix& xa, std::span<const double> y, const SvmOptions& o, Rng& rng) {
  const std::size_t n = xa.rows(), p = xa.cols();
  const double diag = 1.0 / (2.0 * o.c);
  std::vector<double> alpha(n, 0.0), qii(n);
  Matrix w(p, 1);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : xa.row(i)) s += v * v;
    qii[i] = s + diag;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < o.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double pg_max = -INFINITY, pg_min = INFINITY;
    for (std::size_t i : order) {
      auto xi = xa.row(i);
      double wx = 0.0;
      for (std::size_t k = 0; k < p; ++k) wx += w(k, 0) * xi[k];
      const double g = y[i] * wx - 1.0 + diag * alpha[i];
      const double pg = alpha[i] == 0.0 ? std::min(g, 0.0) : g;
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::max(alpha[i] - g / qii[i], 0.0);
        const double d = (alpha[i] - old) * y[i];
        for (std::size_t k = 0; k < p; ++k) w(k, 0) += d * xi[k];
      }
    }
    if (pg_max - pg_min < o.tolerance) break;
  }
  return w;
}

}  // namespace

double svm_primal_objective(const Matrix& w, const Matrix& x_aug, std::span<const double> y,
                            double c) {
  double obj = 0.5 * squared_norm(w);
  const Matrix s = multiply(x_aug, w);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double m = std::max(0.0, 1.0 - y[i] * s(i, 0));
    obj += c * m * m;
  }
  return obj;
}

LinearSvm svm_fit(const Matrix& x, std::span<const std::size_t> labels, const SvmOptions& o,
                  Rng& rng) {
  if (labels.size() != x.rows() || x.rows() == 0) {
    throw std::invalid_argument("svm_fit: need one label per non-empty sample");
  }
  if (!(o.c > 0.0)) throw std::invalid_argument("svm_fit: C must be positive");
  LinearSvm m;
  const std::size_t n = x.rows(), p = x.cols();
  m.feature_mean.assign(p, 0.0);
  m.feature_scale.assign(p, 1.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < p; ++c) m.feature_mean[c] += x(r, c) / static_cast<double>(n);
  for (std::size_t c = 0; c < p; ++c) {
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += (x(r, c) - m.feature_mean[c]) * (x(r, c) - m.feature_mean[c]);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    m.feature_scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  const Matrix xa = standardize_augment(x, m.feature_mean, m.feature_scale);
  m.classes.assign(labels.begin(), labels.end());
  std::sort(m.classes.begin(), m.classes.end());
  m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
  // Two classes share one problem: positive is classes[1].
  const std::size_t problems = m.classes.size() <= 2 ? 1 : m.classes.size();
  std::vector<double> y(n);
  for (std::size_t k = 0; k < problems; ++k) {
    const std::size_t positive = m.classes.size() == 1 ? m.classes[0]
                                 : m.classes.size() == 2 ? m.classes[1]
                                                         : m.classes[k];
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == positive ? 1.0 : -1.0;
    m.weights.push_back(dual_cd(xa, y, o, rng));
  }
  return m;
}

std::vector<std::size_t> svm_predict(const LinearSvm& m, const Matrix& x) {
  const Matrix xa = standardize_augment(x, m.feature_mean, m.feature_scale);
  std::vector<std::size_t> out(x.rows());
  std::vector<Matrix> scores;
  for (const auto& w : m.weights) scores.push_back(multiply(xa, w));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (m.classes.size() == 1) {
      out[r] = m.classes[0];
    } else if (m.classes.size() == 2) {
      out[r] = scores[0](r, 0) > 0.0 ? m.classes[1] : m.classes[0];
    } else {
      std::size_t best = 0;
      for (std::size_t k = 1; k < scores.size(); ++k)
        if (scores[k](r, 0) > scores[best](r, 0)) best = k;
      out[r] = m.classes[best];
    }
  }
  return out;
}

std::vector<std::size_t> kfold_assignment(std::span<const std::size_t> labels, std::size_t folds,
                                          Rng& rng, bool* stratified) {
  if (folds < 2) throw std::invalid_argument("k-fold needs at least 2 folds");
  if (labels.size() < folds) {
    throw std::invalid_argument("k-fold: " + std::to_string(labels.size()) + " samples for " +
                                std::to_string(folds) + " folds");
  }
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  bool strat = true;
  for (const auto& [c, idx] : by_class) strat = strat && idx.size() >= folds;
  if (stratified) *stratified = strat;
  std::vector<std::size_t> fold_of(labels.size());
  std::size_t next = 0;
  if (strat) {
    for (auto& [c, idx] : by_class) {
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t i : idx) fold_of[i] = next++ % folds;
    }
  } else {
    std::vector<std::size_t> all(labels.size());
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    for (std::size_t i : all) fold_of[i] = next++ % folds;
  }
  return fold_of;
}

std::vector<double> default_c_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}; }

EvalReport linsvm_kfold(const Matrix& reprs, std::span<const std::size_t> labels,
                        std::size_t folds, std::span<const double> c_grid, std::uint64_t seed) {
  if (labels.size() != reprs.rows()) throw ShapeError("linsvm_kfold: label count mismatch");
  if (c_grid.empty()) throw std::invalid_argument("linsvm_kfold: empty C grid");
  if (!all_finite(reprs)) throw std::invalid_argument("linsvm_kfold: non-finite representations");
  Rng rng(seed);
  bool stratified = true;
  const auto fold_of = kfold_assignment(labels, folds, rng, &stratified);

  EvalReport report;
  report.metric = "accuracy";
  report.classifier = "linear-svm";
  report.seed = seed;
  if (!stratified) {
    report.warnings.push_back("a class has fewer members than folds; using a non-stratified split");
  }
  std::vector<double> chosen;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < labels.size(); ++i) (fold_of[i] == f ? test : train).push_back(i);
    std::vector<std::size_t> shuffled = train;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const std::size_t n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.1 * train.size())));
    std::vector<std::size_t> val(shuffled.begin(), shuffled.begin() + n_val);
    std::vector<std::size_t> inner(shuffled.begin() + n_val, shuffled.end());
    auto labels_of = [&](const std::vector<std::size_t>& idx) {
      std::vector<std::size_t> y;
      for (std::size_t i : idx) y.push_back(labels[i]);
      return y;
    };
    double best_c = c_grid[0], best_acc = -1.0;
    if (!inner.empty()) {
      const Matrix x_in = select_rows(reprs, inner), x_val = select_rows(reprs, val);
      const auto y_in = labels_of(inner), y_val = labels_of(val);
      for (double c : c_grid) {
        SvmOptions o;
        o.c = c;
        const double acc = accuracy(svm_predict(svm_fit(x_in, y_in, o, rng), x_val), y_val);
        if (acc > best_acc) best_acc = acc, best_c = c;
      }
    }
    SvmOptions o;
    o.c = best_c;
    const auto model = svm_fit(select_rows(reprs, train), labels_of(train), o, rng);
    report.fold_scores.push_back(accuracy(svm_predict(model, select_rows(reprs, test)), labels_of(test)));
    chosen.push_back(best_c);
  }
  report.hyperparameters = {{"folds", folds},
                            {"c_grid", std::vector<double>(c_grid.begin(), c_grid.end())},
                            {"chosen_c", chosen},
                            {"stratified", stratified},
                            {"validation_fraction", 0.1}};
  finalize(report);
  return report;
}

}  // namespace lagraph
