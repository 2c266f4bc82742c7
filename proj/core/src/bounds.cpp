#include "lagraph/bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "lagraph/datasets.hpp"
#include "lagraph/ops.hpp"
#include "lagraph/power_iteration.hpp"

namespace lagraph {

using nlohmann::json;

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;  ///< sample sd (n - 1)
  double se() const { return n > 0 ? sd / std::sqrt(static_cast<double>(n)) : 0.0; }
  std::size_t n = 0;
};

Moments moments(std::span<const double> v) {
  Moments m;
  m.n = v.size();
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

GraphBatch replicate(const Graph& g, std::size_t copies) {
  std::vector<const Graph*> members(copies, &g);
  return batch_graphs(std::span<const Graph* const>(members));
}

double row_sq_dist(const Matrix& a, const Matrix& b, std::size_t r) {
  auto x = a.row(r), y = b.row(r);
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  return s;
}

std::vector<std::size_t> sample_subset(std::size_t n, double ratio, Rng& rng) {
  auto j = sample_without_replacement(n, masked_count(n, ratio), rng);
  std::sort(j.begin(), j.end());
  return j;
}

void fill_mask_row(std::span<double> row, const SyntheticSetup& s, Rng& rng) {
  if (s.mask_mode == MaskMode::zeros || s.mask_noise_sd == 0.0) {
    std::fill(row.begin(), row.end(), 0.0);
    return;
  }
  std::normal_distribution<double> normal(0.0, s.mask_noise_sd);
  for (double& v : row) v = normal(rng);
}

/// F and X for `copies` independent draws stacked graph by graph.
LatentSample gen_stacked(const SyntheticSetup& s, std::size_t copies, Rng& rng) {
  const std::size_t n = s.num_nodes(), d = s.feature_dim;
  LatentSample out{Matrix(copies * n, d), Matrix(copies * n, d)};
  for (std::size_t c = 0; c < copies; ++c) {
    LatentSample one = gen_pair(s, rng);
    for (std::size_t v = 0; v < n; ++v) {
      std::copy(one.F.row(v).begin(), one.F.row(v).end(), out.F.row(c * n + v).begin());
      std::copy(one.X.row(v).begin(), one.X.row(v).end(), out.X.row(c * n + v).begin());
    }
  }
  return out;
}

}  // namespace

SyntheticSetup make_setup(const SetupOptions& o, Rng& rng) {
  if (o.num_nodes < 1 || o.feature_dim < 1) throw std::invalid_argument("make_setup: empty graph");
  if (!(o.sigma >= 0.0)) throw std::invalid_argument("make_setup: sigma must be non-negative");
  if (!(o.min_noise_fraction >= 0.0 && o.min_noise_fraction <= 1.0)) {
    throw std::invalid_argument("make_setup: min_noise_fraction outside [0, 1]");
  }
  SyntheticSetup s;
  const auto edges = erdos_renyi_edges(o.num_nodes, o.edge_probability, rng);
  s.graph = make_graph(o.num_nodes, edges, Matrix(o.num_nodes, o.feature_dim));
  s.feature_dim = o.feature_dim;
  s.prior = o.prior;
  s.prior_mean = o.prior_mean;
  s.prior_scale = o.prior_scale;
  s.noise_sd = Matrix(o.num_nodes, o.feature_dim);
  std::uniform_real_distribution<double> u(o.min_noise_fraction, 1.0);
  s.sigma = 0.0;
  for (double& v : s.noise_sd.data()) {
    v = o.sigma * u(rng);
    s.sigma = std::max(s.sigma, v);
  }
  s.mask_ratio = o.mask_ratio;
  s.mask_noise_sd = o.mask_noise_sd;
  s.mask_mode = o.mask_mode;
  return s;
}

LatentSample gen_pair(const SyntheticSetup& s, Rng& rng) {
  const std::size_t n = s.num_nodes(), d = s.feature_dim;
  LatentSample out{Matrix(n, d), Matrix(n, d)};
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (double& f : out.F.data()) {
    f = s.prior_mean + s.prior_scale * (s.prior == PriorKind::gaussian ? normal(rng) : uniform(rng));
  }
  for (std::size_t i = 0; i < n * d; ++i) {
    out.X.data()[i] = out.F.data()[i] + s.noise_sd.data()[i] * normal(rng);
  }
  return out;
}

Network gnn_network(Encoder& encoder, Decoder& decoder) {
  return [&encoder, &decoder](const GraphBatch& batch, const Matrix& x) {
    NoGradGuard guard;
    auto hs = encode(batch, Value::constant(x), encoder, Mode::eval, false);
    Value out = decode(hs.back(), decoder, Mode::eval, &batch, false);
    return NetworkOutput{out.value(), hs.back().value()};
  };
}

Network identity_network() {
  return [](const GraphBatch&, const Matrix& x) { return NetworkOutput{x, x}; };
}

Network constant_network(Matrix c) {
  return [c = std::move(c)](const GraphBatch& batch, const Matrix& x) {
    if (x.cols() != c.cols()) throw ShapeError("constant_network: feature dim mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t g = 0; g < batch.num_graphs(); ++g) {
      if (batch.graph_size(g) != c.rows()) throw ShapeError("constant_network: node count mismatch");
      for (std::size_t v = 0; v < c.rows(); ++v)
        std::copy(c.row(v).begin(), c.row(v).end(), out.row(batch.offsets[g] + v).begin());
    }
    return NetworkOutput{out, out};
  };
}

json BoundEstimate::to_json() const {
  return {{"which", which},
          {"lhs_mean", lhs_mean},
          {"lhs_se", lhs_se},
          {"rhs_mean", rhs_mean},
          {"rhs_se", rhs_se},
          {"reconstruction_mean", reconstruction_mean},
          {"invariance", invariance},
          {"invariance_se", invariance_se},
          {"multiplier", multiplier},
          {"slack", slack},
          {"slack_se", slack_se},
          {"slack_sqrt_d", slack_sqrt_d},
          {"slack_sqrt_d_se", slack_sqrt_d_se},
          {"ell", ell},
          {"k", k},
          {"n_samples", n_samples},
          {"n_masks", n_masks}};
}

std::vector<BoundEstimate> estimate_bounds(const Network& f, const SyntheticSetup& setup,
                                           double ell, double k, const MonteCarloOptions& o,
                                           Rng& rng) {
  if (o.n_samples < 2 || o.n_masks < 1) {
    throw std::invalid_argument("estimate_bounds: need >= 2 samples and >= 1 mask draw");
  }
  const std::size_t n = setup.num_nodes(), B = o.n_samples;
  const GraphBatch batch = replicate(setup.graph, B);
  const LatentSample data = gen_stacked(setup, B, rng);
  const NetworkOutput clean = f(batch, data.X);
  if (!clean.output.same_shape(data.X)) {
    throw ShapeError("estimate_bounds: network output " +
                     shape_string(clean.output.rows(), clean.output.cols()) + ", expected " +
                     shape_string(data.X.rows(), data.X.cols()));
  }
  std::vector<double> lhs(B, 0.0), rec(B, 0.0), diff(B);
  for (std::size_t s = 0; s < B; ++s) {
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t r = s * n + v;
      lhs[s] += row_sq_dist(clean.output, data.F, r) + row_sq_dist(data.X, data.F, r);
      rec[s] += row_sq_dist(clean.output, data.X, r);
    }
    diff[s] = rec[s] - lhs[s];
  }
  const std::size_t q = clean.embedding.cols();
  auto pooled = [&](const Matrix& h, std::size_t s) {
    std::vector<double> z(q, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      auto row = h.row(s * n + v);
      for (std::size_t c = 0; c < q; ++c) z[c] += row[c];
    }
    return z;
  };
  std::vector<std::vector<double>> z_clean(B);
  for (std::size_t s = 0; s < B; ++s) z_clean[s] = pooled(clean.embedding, s);

  // terms[kind][m] = sqrt(mean_s g / |J|); delta[kind][m] = its delta-method SE.
  std::vector<double> terms[3], delta[3];
  for (std::size_t m = 0; m < o.n_masks; ++m) {
    const auto J = sample_subset(n, setup.mask_ratio, rng);
    Matrix x_masked = data.X;
    for (std::size_t s = 0; s < B; ++s)
      for (std::size_t j : J) fill_mask_row(x_masked.row(s * n + j), setup, rng);
    const NetworkOutput masked = f(batch, x_masked);
    std::vector<double> g[3] = {std::vector<double>(B, 0.0), std::vector<double>(B, 0.0),
                                std::vector<double>(B, 0.0)};
    for (std::size_t s = 0; s < B; ++s) {
      for (std::size_t j : J) {
        g[0][s] += row_sq_dist(clean.output, masked.output, s * n + j);
        g[1][s] += row_sq_dist(clean.embedding, masked.embedding, s * n + j);
      }
      const auto zm = pooled(masked.embedding, s);
      for (std::size_t c = 0; c < q; ++c) g[2][s] += (z_clean[s][c] - zm[c]) * (z_clean[s][c] - zm[c]);
    }
    const double size_j = static_cast<double>(J.size());
    for (int kind = 0; kind < 3; ++kind) {
      const Moments mg = moments(g[kind]);
      const double t = std::sqrt(mg.mean / size_j);
      terms[kind].push_back(t);
      delta[kind].push_back(t > 0.0 ? mg.se() / size_j / (2.0 * t) : 0.0);
    }
  }

  const Moments ml = moments(lhs), mr = moments(rec), md = moments(diff);
  const double d = static_cast<double>(setup.feature_dim);
  const double base = 2.0 * setup.sigma * static_cast<double>(n) * o.multiplier_scale;
  const char* names[3] = {"theorem1", "corollary1", "corollary2"};
  const double mults[3] = {base, base * ell, base * k * ell};
  std::vector<BoundEstimate> out;
  for (int kind = 0; kind < 3; ++kind) {
    const Moments mt = moments(terms[kind]);
    double within = 0.0;
    for (double x : delta[kind]) within += x;
    within /= static_cast<double>(delta[kind].size());
    const double inv_se = std::sqrt(mt.se() * mt.se() + within * within);
    BoundEstimate e;
    e.which = names[kind];
    e.lhs_mean = ml.mean;
    e.lhs_se = ml.se();
    e.reconstruction_mean = mr.mean;
    e.invariance = mt.mean;
    e.invariance_se = inv_se;
    e.multiplier = mults[kind];
    e.rhs_mean = mr.mean + e.multiplier * e.invariance;
    e.rhs_se = std::sqrt(mr.se() * mr.se() + e.multiplier * e.multiplier * inv_se * inv_se);
    e.slack = e.rhs_mean - e.lhs_mean;
    e.slack_se = std::sqrt(md.se() * md.se() + e.multiplier * e.multiplier * inv_se * inv_se);
    const double mult_d = e.multiplier * std::sqrt(d);
    e.slack_sqrt_d = mr.mean + mult_d * e.invariance - e.lhs_mean;
    e.slack_sqrt_d_se = std::sqrt(md.se() * md.se() + mult_d * mult_d * inv_se * inv_se);
    e.ell = kind == 0 ? 1.0 : ell;
    e.k = kind == 2 ? k : 1.0;
    e.n_samples = B;
    e.n_masks = o.n_masks;
    out.push_back(e);
  }
  return out;
}

BoundEstimate estimate_theorem1(const Network& f, const SyntheticSetup& setup,
                                const MonteCarloOptions& options, Rng& rng) {
  return estimate_bounds(f, setup, 1.0, 1.0, options, rng).front();
}

bool InnerProductEstimate::within(double n_se) const {
  return std::abs(mean - expected) <= n_se * se;
}

json InnerProductEstimate::to_json() const {
  return {{"mean", mean}, {"se", se}, {"expected", expected}, {"n_samples", n_samples}};
}

InnerProductEstimate check_dae_inner_product(const Network& f, const SyntheticSetup& setup,
                                             bool blind, std::size_t n_samples, Rng& rng) {
  if (n_samples < 2) throw std::invalid_argument("check_dae_inner_product: need >= 2 samples");
  const std::size_t n = setup.num_nodes(), d = setup.feature_dim, B = n_samples;
  const GraphBatch batch = replicate(setup.graph, B);
  const LatentSample data = gen_stacked(setup, B, rng);
  std::vector<std::vector<std::size_t>> J(B);
  Matrix x_in = data.X;
  for (std::size_t s = 0; s < B; ++s) {
    J[s] = sample_subset(n, setup.mask_ratio, rng);
    if (blind)
      for (std::size_t j : J[s]) fill_mask_row(x_in.row(s * n + j), setup, rng);
  }
  const Matrix out = f(batch, x_in).output;
  std::vector<double> ip(B, 0.0);
  for (std::size_t s = 0; s < B; ++s) {
    for (std::size_t j : J[s]) {
      const std::size_t r = s * n + j;
      for (std::size_t c = 0; c < d; ++c)
        ip[s] += (out(r, c) - data.F(r, c)) * (data.X(r, c) - data.F(r, c));
    }
  }
  const Moments m = moments(ip);
  InnerProductEstimate e;
  e.mean = m.mean;
  e.se = m.se();
  e.n_samples = B;
  if (!blind) {
    double total = 0.0;
    for (double sd : setup.noise_sd.data()) total += sd * sd;
    e.expected = static_cast<double>(masked_count(n, setup.mask_ratio)) / static_cast<double>(n) * total;
  }
  return e;
}

GeneratorCheck check_generator(const SyntheticSetup& setup, std::size_t n_samples, Rng& rng) {
  if (n_samples < 2) throw std::invalid_argument("check_generator: need >= 2 samples");
  const std::size_t n = setup.num_nodes(), d = setup.feature_dim;
  Matrix sum(n, d), sum_sq(n, d);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const LatentSample p = gen_pair(setup, rng);
    for (std::size_t i = 0; i < n * d; ++i) {
      const double e = p.X.data()[i] - p.F.data()[i];
      sum.data()[i] += e;
      sum_sq.data()[i] += e * e;
    }
  }
  GeneratorCheck out;
  out.n_samples = n_samples;
  out.max_variance_excess = -INFINITY;
  const double ns = static_cast<double>(n_samples);
  for (std::size_t v = 0; v < n; ++v) {
    double group_sum = 0.0, group_var = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double mean = sum(v, c) / ns;
      const double var = (sum_sq(v, c) - ns * mean * mean) / (ns - 1.0);
      group_sum += sum(v, c);
      group_var += var;
      const double var_se = var * std::sqrt(2.0 / (ns - 1.0));
      const double excess = var_se > 0.0 ? (var - setup.sigma * setup.sigma) / var_se
                                         : (var > setup.sigma * setup.sigma ? INFINITY : -INFINITY);
      out.max_variance_excess = std::max(out.max_variance_excess, excess);
    }
    // Node group: mean of the d*n_samples noise values against its SE.
    const double cnt = ns * static_cast<double>(d);
    const double se = std::sqrt(group_var / static_cast<double>(d) / cnt);
    if (se > 0.0) out.max_abs_mean_z = std::max(out.max_abs_mean_z, std::abs(group_sum / cnt) / se);
  }
  return out;
}

TrialConfig random_trial(Rng& rng) {
  auto uniform_int = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  TrialConfig t;
  t.setup.num_nodes = uniform_int(4, 32);
  t.setup.feature_dim = uniform_int(2, 8);
  t.setup.edge_probability = uniform(0.1, 0.5);
  t.setup.prior = PriorKind::gaussian;
  t.setup.prior_mean = 0.0;
  t.setup.prior_scale = 1.0;
  t.setup.sigma = uniform(0.1, 1.0);
  t.setup.mask_ratio = uniform(0.1, 0.5);
  t.setup.mask_noise_sd = 0.5;
  t.encoder.kind = uniform_int(0, 1) == 0 ? EncoderKind::gcn : EncoderKind::gin;
  t.encoder.input_dim = t.setup.feature_dim;
  t.encoder.hidden_dim = uniform_int(4, 32);
  t.encoder.num_layers = uniform_int(1, 3);
  t.encoder.batch_norm = false;
  t.decoder.kind = DecoderKind::mlp;
  t.decoder.input_dim = t.encoder.hidden_dim;
  t.decoder.hidden_dim = uniform_int(4, 32);
  t.decoder.output_dim = t.setup.feature_dim;
  t.decoder.num_layers = uniform_int(1, 2);
  t.decoder.batch_norm = false;
  return t;
}

json VerificationReport::to_json() const {
  return {{"records", records},
          {"summary",
           {{"checks", checks},
            {"hard_failures", hard_failures},
            {"passed", passed()},
            {"seconds", seconds}}}};
}

namespace {

json setup_json(const TrialConfig& t, const SyntheticSetup& s) {
  return {{"num_nodes", s.num_nodes()},
          {"feature_dim", s.feature_dim},
          {"num_edges", s.graph.num_edges()},
          {"sigma", s.sigma},
          {"mask_ratio", s.mask_ratio},
          {"mask_noise_sd", s.mask_noise_sd},
          {"encoder", to_string(t.encoder.kind)},
          {"encoder_layers", t.encoder.num_layers},
          {"hidden_dim", t.encoder.hidden_dim},
          {"decoder_layers", t.decoder.num_layers}};
}

}  // namespace

VerificationReport run_verification(const VerifyOptions& o) {
  if (o.trials < 1) throw std::invalid_argument("verify: trials must be at least 1");
  const bool all = o.suite == "all";
  const bool thm = all || o.suite == "theorem1";
  const bool cor = all || o.suite == "corollaries";
  const bool dae = all || o.suite == "dae";
  if (!thm && !cor && !dae) {
    throw std::invalid_argument("verify: unknown suite '" + o.suite +
                                "' (expected theorem1|corollaries|dae|all)");
  }
  const auto start = std::chrono::steady_clock::now();
  VerificationReport report;
  auto record = [&](json r, bool pass, bool hard) {
    r["pass"] = pass;
    r["hard"] = hard;
    ++report.checks;
    if (hard && !pass) ++report.hard_failures;
    report.records.push_back(std::move(r));
  };

  for (std::size_t t = 0; t < o.trials; ++t) {
    Rng rng(derive_seed(o.seed, t));
    const TrialConfig cfg = random_trial(rng);
    const SyntheticSetup setup = make_setup(cfg.setup, rng);
    Encoder enc = make_encoder(cfg.encoder, rng);
    Decoder dec = make_decoder(cfg.decoder, rng);
    const Network f = gnn_network(enc, dec);
    const json info = setup_json(cfg, setup);
    if (thm || cor) {
      const double ell = cor ? lipschitz_upper(dec) : 1.0;
      const double k = std::sqrt(static_cast<double>(setup.num_nodes()));
      const auto est = estimate_bounds(f, setup, ell, k, o.mc, rng);
      for (const auto& e : est) {
        if ((e.which == "theorem1" && !thm) || (e.which != "theorem1" && !cor)) continue;
        record({{"suite", e.which == "theorem1" ? "theorem1" : "corollaries"},
                {"check", e.which},
                {"trial", t},
                {"setup", info},
                {"estimate", e.to_json()}},
               e.holds(), true);
      }
    }
    if (dae) {
      const auto e = check_dae_inner_product(f, setup, true, o.mc.n_samples * o.mc.n_masks, rng);
      record({{"suite", "dae"}, {"check", "blind-gnn"}, {"trial", t}, {"setup", info},
              {"estimate", e.to_json()}},
             e.within(3.0), false);
    }
  }

  Rng rng(derive_seed(o.seed, 0xC0117201ULL));
  SetupOptions so;
  so.num_nodes = 12;
  so.feature_dim = 4;
  so.sigma = 0.8;
  so.mask_ratio = 0.25;
  const SyntheticSetup control = make_setup(so, rng);
  TrialConfig ctrl_cfg;
  ctrl_cfg.setup = so;
  ctrl_cfg.encoder = {EncoderKind::gin, so.feature_dim, 16, 2, false, true};
  ctrl_cfg.decoder = {DecoderKind::mlp, 16, 16, so.feature_dim, 2, false};
  const json info = setup_json(ctrl_cfg, control);
  const std::size_t big = o.mc.n_samples * o.mc.n_masks;
  if (thm) {
    Matrix c(control.num_nodes(), control.feature_dim);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : c.data()) v = normal(rng);
    const auto e = estimate_theorem1(constant_network(c), control, o.mc, rng);
    record({{"suite", "theorem1"}, {"check", "constant-equality"}, {"setup", info},
            {"estimate", e.to_json()}},
           std::abs(e.rhs_mean - e.lhs_mean) <= 3.0 * e.slack_se, true);
    const auto id = estimate_theorem1(identity_network(), control, o.mc, rng);
    record({{"suite", "theorem1"}, {"check", "identity-network"}, {"setup", info},
            {"estimate", id.to_json()}, {"holds_sqrt_d", id.holds_sqrt_d()}},
           id.holds(), false);
  }
  if (dae) {
    Encoder enc = make_encoder(ctrl_cfg.encoder, rng);
    Decoder dec = make_decoder(ctrl_cfg.decoder, rng);
    const auto blind = check_dae_inner_product(gnn_network(enc, dec), control, true, big, rng);
    record({{"suite", "dae"}, {"check", "blind-gnn-control"}, {"setup", info},
            {"estimate", blind.to_json()}},
           blind.within(3.0), true);
    const Network zero = constant_network(Matrix(control.num_nodes(), control.feature_dim));
    const auto z = check_dae_inner_product(zero, control, true, big, rng);
    record({{"suite", "dae"}, {"check", "zero-network"}, {"setup", info}, {"estimate", z.to_json()}},
           z.within(3.0), true);
    const auto id = check_dae_inner_product(identity_network(), control, false, big, rng);
    record({{"suite", "dae"}, {"check", "identity-control"}, {"setup", info},
            {"estimate", id.to_json()}},
           id.within(3.0) && id.mean > 0.0, true);
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace lagraph
