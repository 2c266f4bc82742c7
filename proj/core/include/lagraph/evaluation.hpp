#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lagraph/graph.hpp"
#include "lagraph/models.hpp"
#include "lagraph/rng.hpp"

namespace lagraph {

/// Per graph: sum-pooled embeddings of every encoder layer, concatenated.
/// Runs in eval mode without recording gradients.
Matrix extract_graph_repr(const GraphDataset& dataset, Encoder& encoder);

/// Per node: [X | H_last] with concat_raw, else H_last.
Matrix extract_node_repr(const Graph& graph, Encoder& encoder, bool concat_raw);

/// FNV-1a over every parameter and running statistic.
std::uint64_t model_checksum(const Encoder& encoder);

struct EvalReport {
  std::string metric;
  std::string classifier;
  std::vector<double> fold_scores;
  double mean = 0.0;
  double std = 0.0;  ///< population standard deviation of fold_scores
  nlohmann::json hyperparameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

/// Fills mean and population std from fold_scores.
void finalize(EvalReport& report);

// ---- logistic regression -------------------------------------------------

struct LogRegOptions {
  double lr = 0.01;
  double weight_decay = 0.0;  ///< L2 coefficient added to the gradient
  std::size_t epochs = 300;
};

struct LogReg {
  Matrix weight;  ///< p x c
  Matrix bias;    ///< 1 x c
  bool multilabel = false;
  bool degenerate = false;  ///< training set held a single class
};

/// Softmax regression trained full-batch with Adam on mean cross-entropy.
LogReg logreg_fit(const Matrix& x, std::span<const std::size_t> labels, std::size_t num_classes,
                  const LogRegOptions& options, Rng& rng);
/// Independent sigmoids for a 0/1 label matrix (samples x classes).
LogReg logreg_fit_multilabel(const Matrix& x, const Matrix& targets, const LogRegOptions& options,
                             Rng& rng);

Matrix logreg_scores(const LogReg& model, const Matrix& x);
std::vector<std::size_t> logreg_predict(const LogReg& model, const Matrix& x);
/// 0/1 predictions (score > 0) for multi-label models.
Matrix logreg_predict_multilabel(const LogReg& model, const Matrix& x);

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth);
double micro_f1(const Matrix& predicted, const Matrix& truth);
/// One-hot of single-label predictions, for micro_f1.
Matrix one_hot(std::span<const std::size_t> labels, std::size_t num_classes);

/// Logistic regression on split.train, scored on split.test.
EvalReport logreg_evaluate(const Matrix& reprs, std::span<const std::size_t> labels,
                           std::size_t num_classes, std::span<const std::size_t> train,
                           std::span<const std::size_t> test, const LogRegOptions& options,
                           std::uint64_t seed, std::size_t repetitions = 1);

// ---- linear SVM ----------------------------------------------------------

struct SvmOptions {
  double c = 1.0;
  double tolerance = 1e-3;  ///< projected-gradient spread stopping rule
  std::size_t max_epochs = 1000;
};

struct LinearSvm {
  std::vector<Matrix> weights;  ///< one (p+1) x 1 column per one-vs-rest problem, bias last
  std::vector<std::size_t> classes;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
};

/// L2-regularized squared-hinge linear SVM, one-vs-rest, solved by dual
/// coordinate descent. Features are standardized with training statistics
/// and a constant bias feature is appended.
LinearSvm svm_fit(const Matrix& x, std::span<const std::size_t> labels, const SvmOptions& options,
                  Rng& rng);
std::vector<std::size_t> svm_predict(const LinearSvm& model, const Matrix& x);

/// Primal objective 0.5|w|^2 + C sum max(0, 1 - y w.x)^2 of one binary problem
/// on standardized, bias-augmented features.
double svm_primal_objective(const Matrix& w, const Matrix& x_aug, std::span<const double> y,
                            double c);

/// fold_of[i] in [0, folds). Stratified per class when every class has at
/// least `folds` members; otherwise a plain shuffled split and *stratified
/// is set to false.
std::vector<std::size_t> kfold_assignment(std::span<const std::size_t> labels, std::size_t folds,
                                          Rng& rng, bool* stratified = nullptr);

std::vector<double> default_c_grid();

/// Stratified k-fold evaluation. Per fold, C is chosen by accuracy on a 10%
/// validation split of the training folds, then the SVM is refit on all
/// training folds and scored on the held-out fold.
EvalReport linsvm_kfold(const Matrix& reprs, std::span<const std::size_t> labels,
                        std::size_t folds, std::span<const double> c_grid, std::uint64_t seed);

}  // namespace lagraph
