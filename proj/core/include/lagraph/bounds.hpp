#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lagraph/graph.hpp"
#include "lagraph/loss.hpp"
#include "lagraph/models.hpp"
#include "lagraph/rng.hpp"

namespace lagraph {

enum class PriorKind { gaussian, uniform };

/// Synthetic latent graph: X = F + E with F drawn from the prior and E
/// independent zero-mean Gaussian noise whose per-element sd is
/// noise_sd(v, k) <= sigma.
struct SyntheticSetup {
  Graph graph;  ///< fixed adjacency; features unused
  std::size_t feature_dim = 2;
  PriorKind prior = PriorKind::gaussian;
  double prior_mean = 0.0;
  double prior_scale = 1.0;  ///< sd (gaussian) or half-width (uniform)
  Matrix noise_sd;           ///< |V| x d
  double sigma = 0.0;        ///< max of noise_sd
  double mask_ratio = 0.25;
  double mask_noise_sd = 0.5;
  MaskMode mask_mode = MaskMode::gaussian;

  std::size_t num_nodes() const { return graph.num_nodes(); }
};

struct SetupOptions {
  std::size_t num_nodes = 8;
  std::size_t feature_dim = 4;
  double edge_probability = 0.3;
  PriorKind prior = PriorKind::gaussian;
  double prior_mean = 0.0;
  double prior_scale = 1.0;
  double sigma = 0.5;
  double min_noise_fraction = 0.5;  ///< element sd = sigma * U[min_noise_fraction, 1]
  double mask_ratio = 0.25;
  double mask_noise_sd = 0.5;
  MaskMode mask_mode = MaskMode::gaussian;
};

/// Erdos-Renyi adjacency and per-element noise levels drawn from rng.
SyntheticSetup make_setup(const SetupOptions& options, Rng& rng);

struct LatentSample {
  Matrix F;
  Matrix X;
};

/// One draw of (F, X) for the setup's adjacency.
LatentSample gen_pair(const SyntheticSetup& setup, Rng& rng);

/// Output of a network f on a batch of copies of the setup graph: the
/// prediction of X (rows x d) and the node embedding used by the corollaries.
struct NetworkOutput {
  Matrix output;
  Matrix embedding;
};
using Network = std::function<NetworkOutput(const GraphBatch& batch, const Matrix& x)>;

/// Norm-free encoder followed by an MLP decoder, evaluated without gradients.
Network gnn_network(Encoder& encoder, Decoder& decoder);
Network identity_network();
/// Every node of every copy is mapped to the same row of c (|V| x d).
Network constant_network(Matrix c);

struct BoundEstimate {
  std::string which;  ///< theorem1 | corollary1 | corollary2
  double lhs_mean = 0.0;
  double lhs_se = 0.0;
  double reconstruction_mean = 0.0;
  double invariance = 0.0;  ///< E_J[ E|.|^2 / |J| ]^(1/2)
  double invariance_se = 0.0;
  double multiplier = 0.0;  ///< 2 sigma |V| (times l, times k l)
  double rhs_mean = 0.0;
  double rhs_se = 0.0;
  double slack = 0.0;
  double slack_se = 0.0;
  /// Same bound with the multiplier scaled by sqrt(d).
  double slack_sqrt_d = 0.0;
  double slack_sqrt_d_se = 0.0;
  double ell = 1.0;
  double k = 1.0;
  std::size_t n_samples = 0;
  std::size_t n_masks = 0;

  bool holds(double n_se = 2.0) const { return slack >= -n_se * slack_se; }
  bool holds_sqrt_d(double n_se = 2.0) const { return slack_sqrt_d >= -n_se * slack_sqrt_d_se; }
  nlohmann::json to_json() const;
};

struct MonteCarloOptions {
  std::size_t n_samples = 512;
  std::size_t n_masks = 8;
  double multiplier_scale = 1.0;  ///< test hook; 1 leaves the bound untouched
};

/// Theorem-1 estimate: LHS = E[|f(X) - F|^2 + |X - F|^2],
/// RHS = E|f(X) - X|^2 + 2 sigma |V| E_J[E|f_J(X) - f_J(X_Jc)|^2 / |J|]^(1/2).
/// The J expectation averages n_masks fixed subsets; each is paired with
/// every data draw and a fresh mask matrix.
BoundEstimate estimate_theorem1(const Network& f, const SyntheticSetup& setup,
                                const MonteCarloOptions& options, Rng& rng);

/// Theorem 1 together with both corollaries from the same draws: corollary 1
/// uses the embeddings of the masked rows with multiplier 2 sigma |V| ell,
/// corollary 2 the sum-pooled embeddings with multiplier 2 sigma |V| k ell.
std::vector<BoundEstimate> estimate_bounds(const Network& f, const SyntheticSetup& setup,
                                           double ell, double k, const MonteCarloOptions& options,
                                           Rng& rng);

struct InnerProductEstimate {
  double mean = 0.0;
  double se = 0.0;
  double expected = 0.0;
  std::size_t n_samples = 0;

  bool within(double n_se = 3.0) const;
  nlohmann::json to_json() const;
};

/// E<f_J(A, X_input) - F_J, X_J - F_J> with a fresh (F, X, J, M) per draw.
/// With blind set, f sees the masked features X_Jc; otherwise it sees X.
/// `expected` is 0 for blind networks and (|J|/|V|) * sum of noise variances
/// otherwise (the value for the identity network).
InnerProductEstimate check_dae_inner_product(const Network& f, const SyntheticSetup& setup,
                                             bool blind, std::size_t n_samples, Rng& rng);

struct GeneratorCheck {
  double max_abs_mean_z = 0.0;    ///< max over elements of |mean(X - F)| / SE
  double max_variance_excess = 0.0;  ///< max over elements of (var - sigma^2) / SE(var)
  std::size_t n_samples = 0;
};

GeneratorCheck check_generator(const SyntheticSetup& setup, std::size_t n_samples, Rng& rng);

// ---- verification suites -------------------------------------------------

struct VerifyOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string suite = "all";  ///< theorem1 | corollaries | dae | all
  MonteCarloOptions mc;
};

struct TrialConfig {
  SetupOptions setup;
  EncoderConfig encoder;
  DecoderConfig decoder;
};

/// Randomized trial: 4-32 nodes, d 2-8, Gaussian prior, sigma in [0.1, 1],
/// random GCN or GIN encoder without normalization and an MLP decoder.
TrialConfig random_trial(Rng& rng);

struct VerificationReport {
  nlohmann::json records = nlohmann::json::array();
  std::size_t hard_failures = 0;
  std::size_t checks = 0;
  double seconds = 0.0;

  bool passed() const { return hard_failures == 0; }
  nlohmann::json to_json() const;
};

VerificationReport run_verification(const VerifyOptions& options);

}  // namespace lagraph
