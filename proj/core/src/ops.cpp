#include "lagraph/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lagraph {
namespace {

void check_same(const Value& a, const Value& b, const char* op) {
  require_same_shape(a.value(), b.value(), op);
}

void check_scalar(const Value& x, const char* op) {
  if (x.rows() != 1 || x.cols() != 1) {
    throw ShapeError(std::string(op) + ": expected 1x1 input, got " +
                     shape_string(x.rows(), x.cols()));
  }
}

std::vector<double> resolve_row_weights(std::span<const double> w, std::size_t rows,
                                        const char* op) {
  if (w.empty()) return std::vector<double>(rows, rows == 0 ? 0.0 : 1.0 / double(rows));
  if (w.size() != rows) {
    throw ShapeError(std::string(op) + ": " + std::to_string(w.size()) + " row weights for " +
                     std::to_string(rows) + " rows");
  }
  return {w.begin(), w.end()};
}

// Row-wise log-softmax.
Matrix log_softmax(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto in = z.row(r);
    auto o = out.row(r);
    const double m = *std::max_element(in.begin(), in.end());
    double s = 0.0;
    for (double v : in) s += std::exp(v - m);
    const double lse = m + std::log(s);
    for (std::size_t j = 0; j < in.size(); ++j) o[j] = in[j] - lse;
  }
  return out;
}

}  // namespace

Value matmul(const Value& a, const Value& b) {
  Matrix out = multiply(a.value(), b.value());
  return OpBuilder::make("matmul", std::move(out), {a, b},
                         [a, b](const Matrix& g, std::vector<Matrix*>& in) {
                           if (in[0]) *in[0] += multiply_nt(g, b.value());
                           if (in[1]) *in[1] += multiply_tn(a.value(), g);
                         });
}

Value spmm(std::shared_ptr<const SparseMatrix> s, const Value& d) {
  if (!s) throw std::invalid_argument("spmm: null sparse matrix");
  Matrix out = s->multiply(d.value());
  return OpBuilder::make("spmm", std::move(out), {d},
                         [s](const Matrix& g, std::vector<Matrix*>& in) {
                           if (in[0]) *in[0] += s->transpose_multiply(g);
                         });
}

Value add(const Value& a, const Value& b) {
  check_same(a, b, "add");
  return OpBuilder::make("add", a.value() + b.value(), {a, b},
                         [](const Matrix& g, std::vector<Matrix*>& in) {
                           if (in[0]) *in[0] += g;
                           if (in[1]) *in[1] += g;
                         });
}

Value sub(const Value& a, const Value& b) {
  check_same(a, b, "sub");
  return OpBuilder::make("sub", a.value() - b.value(), {a, b},
                         [](const Matrix& g, std::vector<Matrix*>& in) {
                           if (in[0]) *in[0] += g;
                           if (in[1]) *in[1] -= g;
                         });
}

Value hadamard(const Value& a, const Value& b) {
  check_same(a, b, "hadamard");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.value().data()[i];
  return OpBuilder::make("hadamard", std::move(out), {a, b},
                         [a, b](const Matrix& g, std::vector<Matrix*>& in) {
                           const auto ga = g.data();
                           if (in[0]) {
                             auto dst = in[0]->data();
                             auto bv = b.value().data();
                             for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += ga[i] * bv[i];
                           }
                           if (in[1]) {
                             auto dst = in[1]->data();
                             auto av = a.value().data();
                             for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += ga[i] * av[i];
                           }
                         });
}

Value scale(const Value& a, double s) {
  return OpBuilder::make("scale", a.value() * s, {a},
                         [s](const Matrix& g, std::vector<Matrix*>& in) {
                           if (in[0]) *in[0] += g * s;
                         });
}

Value relu(const Value& a) {
  Matrix out = a.value();
  for (auto& v : out.data()) v = v > 0.0 ? v : 0.0;
  return OpBuilder::make("relu", std::move(out), {a},
                         [a](const Matrix& g, std::vector<Matrix*>& in) {
                           if (!in[0]) return;
                           auto dst = in[0]->data();
                           auto x = a.value().data();
                           auto gd = g.data();
                           for (std::size_t i = 0; i < dst.size(); ++i)
                             if (x[i] > 0.0) dst[i] += gd[i];
                         });
}

Value add_bias(const Value& x, const Value& bias) {
  if (bias.rows() != 1 || bias.cols() != x.cols()) {
    throw ShapeError("add_bias: bias " + shape_string(bias.rows(), bias.cols()) + " for input " +
                     shape_string(x.rows(), x.cols()));
  }
  Matrix out = x.value();
  auto b = bias.value().row(0);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto o = out.row(r);
    for (std::size_t c = 0; c < o.size(); ++c) o[c] += b[c];
  }
  return OpBuilder::make("add_bias", std::move(out), {x, bias},
                         [](const Matrix& g, std::vector<Matrix*>& in) {
                           if (in[0]) *in[0] += g;
                           if (in[1]) {
                             auto dst = in[1]->row(0);
                             for (std::size_t r = 0; r < g.rows(); ++r) {
                               auto gr = g.row(r);
                               for (std::size_t c = 0; c < gr.size(); ++c) dst[c] += gr[c];
                             }
                           }
                         });
}

Value row_select(const Value& h, std::span<const std::size_t> indices) {
  Matrix out = select_rows(h.value(), indices);
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return OpBuilder::make("row_select", std::move(out), {h},
                         [idx = std::move(idx)](const Matrix& g, std::vector<Matrix*>& in) {
                           if (!in[0]) return;
                           for (std::size_t i = 0; i < idx.size(); ++i) {
                             auto dst = in[0]->row(idx[i]);
                             auto src = g.row(i);
                             for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
                           }
                         });
}

Value segment_sum(const Value& h, std::span<const std::size_t> offsets) {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != h.rows() ||
      !std::is_sorted(offsets.begin(), offsets.end())) {
    throw ShapeError("segment_sum: offsets must run from 0 to " + std::to_string(h.rows()) +
                     " in non-decreasing order");
  }
  const std::size_t segments = offsets.size() - 1;
  const Matrix& hv = h.value();
  Matrix out(segments, hv.cols());
  for (std::size_t s = 0; s < segments; ++s) {
    auto o = out.row(s);
    for (std::size_t r = offsets[s]; r < offsets[s + 1]; ++r) {
      auto src = hv.row(r);
      for (std::size_t c = 0; c < src.size(); ++c) o[c] += src[c];
    }
  }
  std::vector<std::size_t> off(offsets.begin(), offsets.end());
  return OpBuilder::make("segment_sum", std::move(out), {h},
                         [off = std::move(off)](const Matrix& g, std::vector<Matrix*>& in) {
                           if (!in[0]) return;
                           for (std::size_t s = 0; s + 1 < off.size(); ++s) {
                             auto gs = g.row(s);
                             for (std::size_t r = off[s]; r < off[s + 1]; ++r) {
                               auto dst = in[0]->row(r);
                               for (std::size_t c = 0; c < gs.size(); ++c) dst[c] += gs[c];
                             }
                           }
                         });
}

Value concat_cols(std::span<const Value> blocks) {
  std::vector<Matrix> mats;
  mats.reserve(blocks.size());
  for (const auto& b : blocks) mats.push_back(b.value());
  Matrix out = hconcat(mats);
  std::vector<std::size_t> widths;
  for (const auto& m : mats) widths.push_back(m.cols());
  std::vector<Value> inputs(blocks.begin(), blocks.end());
  return OpBuilder::make("concat_cols", std::move(out), std::move(inputs),
                         [widths = std::move(widths)](const Matrix& g, std::vector<Matrix*>& in) {
                           std::size_t off = 0;
                           for (std::size_t k = 0; k < widths.size(); ++k) {
                             if (in[k]) {
                               for (std::size_t r = 0; r < g.rows(); ++r) {
                                 auto src = g.row(r);
                                 auto dst = in[k]->row(r);
                                 for (std::size_t c = 0; c < widths[k]; ++c) dst[c] += src[off + c];
                               }
                             }
                             off += widths[k];
                           }
                         });
}

Value sum(const Value& a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return OpBuilder::make("sum", Matrix::scalar(s), {a},
                         [](const Matrix& g, std::vector<Matrix*>& in) {
                           if (!in[0]) return;
                           const double gv = g(0, 0);
                           for (auto& v : in[0]->data()) v += gv;
                         });
}

Value sum_squares(const Value& a) {
  return OpBuilder::make("sum_squares", Matrix::scalar(squared_norm(a.value())), {a},
                         [a](const Matrix& g, std::vector<Matrix*>& in) {
                           if (!in[0]) return;
                           const double gv = 2.0 * g(0, 0);
                           auto dst = in[0]->data();
                           auto x = a.value().data();
                           for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += gv * x[i];
                         });
}

Value mse_per(const Value& a, const Value& b, double divisor) {
  if (!(divisor > 0.0)) throw std::invalid_argument("mse_per: divisor must be positive");
  std::vector<double> w(a.rows(), 1.0 / divisor);
  return weighted_sse(a, b, w);
}

Value weighted_sse(const Value& a, const Value& b, std::span<const double> row_weights) {
  check_same(a, b, "weighted_sse");
  if (row_weights.size() != a.rows()) {
    throw ShapeError("weighted_sse: " + std::to_string(row_weights.size()) +
                     " row weights for " + std::to_string(a.rows()) + " rows");
  }
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  double total = 0.0;
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double s = 0.0;
    auto ar = av.row(r);
    auto br = bv.row(r);
    for (std::size_t c = 0; c < ar.size(); ++c) {
      const double d = ar[c] - br[c];
      s += d * d;
    }
    total += row_weights[r] * s;
  }
  std::vector<double> w(row_weights.begin(), row_weights.end());
  return OpBuilder::make("weighted_sse", Matrix::scalar(total), {a, b},
                         [a, b, w = std::move(w)](const Matrix& g, std::vector<Matrix*>& in) {
                           const Matrix& av = a.value();
                           const Matrix& bv = b.value();
                           for (std::size_t r = 0; r < av.rows(); ++r) {
                             const double k = 2.0 * w[r] * g(0, 0);
                             auto ar = av.row(r);
                             auto br = bv.row(r);
                             for (std::size_t c = 0; c < ar.size(); ++c) {
                               const double d = k * (ar[c] - br[c]);
                               if (in[0]) (*in[0])(r, c) += d;
                               if (in[1]) (*in[1])(r, c) -= d;
                             }
                           }
                         });
}

Value sqrt_eps(const Value& x, double eps) {
  check_scalar(x, "sqrt_eps");
  const double v = x.value()(0, 0);
  if (v < 0.0) throw std::domain_error("sqrt_eps: negative input " + std::to_string(v));
  if (eps < 0.0) throw std::domain_error("sqrt_eps: negative eps");
  const double y = std::sqrt(v + eps);
  return OpBuilder::make("sqrt_eps", Matrix::scalar(y), {x},
                         [y](const Matrix& g, std::vector<Matrix*>& in) {
                           if (in[0]) (*in[0])(0, 0) += g(0, 0) / (2.0 * y);
                         });
}

Value softmax_ce(const Value& logits, const Matrix& targets, std::span<const double> row_weights) {
  require_same_shape(logits.value(), targets, "softmax_ce");
  for (std::size_t r = 0; r < targets.rows(); ++r) {
    double s = 0.0;
    for (double v : targets.row(r)) s += v;
    if (std::abs(s - 1.0) > 1e-9) {
      throw std::invalid_argument("softmax_ce: target row " + std::to_string(r) +
                                  " does not sum to 1");
    }
  }
  auto w = resolve_row_weights(row_weights, logits.rows(), "softmax_ce");
  Matrix logp = log_softmax(logits.value());
  double total = 0.0;
  for (std::size_t r = 0; r < logp.rows(); ++r) {
    double ce = 0.0;
    auto lr = logp.row(r);
    auto tr = targets.row(r);
    for (std::size_t c = 0; c < lr.size(); ++c) ce -= tr[c] * lr[c];
    total += w[r] * ce;
  }
  return OpBuilder::make(
      "softmax_ce", Matrix::scalar(total), {logits},
      [logp = std::move(logp), targets, w = std::move(w)](const Matrix& g,
                                                          std::vector<Matrix*>& in) {
        if (!in[0]) return;
        for (std::size_t r = 0; r < logp.rows(); ++r) {
          const double k = w[r] * g(0, 0);
          auto lr = logp.row(r);
          auto tr = targets.row(r);
          auto dst = in[0]->row(r);
          for (std::size_t c = 0; c < lr.size(); ++c) dst[c] += k * (std::exp(lr[c]) - tr[c]);
        }
      });
}

Value kl_div(const Value& p_logits, const Value& q_logits, std::span<const double> row_weights) {
  check_same(p_logits, q_logits, "kl_div");
  auto w = resolve_row_weights(row_weights, p_logits.rows(), "kl_div");
  Matrix lp = log_softmax(p_logits.value());
  Matrix lq = log_softmax(q_logits.value());
  double total = 0.0;
  for (std::size_t r = 0; r < lp.rows(); ++r) {
    double kl = 0.0;
    auto a = lp.row(r);
    auto b = lq.row(r);
    for (std::size_t c = 0; c < a.size(); ++c) kl += std::exp(a[c]) * (a[c] - b[c]);
    total += w[r] * kl;
  }
  return OpBuilder::make(
      "kl_div", Matrix::scalar(total), {p_logits, q_logits},
      [lp = std::move(lp), lq = std::move(lq), w = std::move(w)](const Matrix& g,
                                                                 std::vector<Matrix*>& in) {
        for (std::size_t r = 0; r < lp.rows(); ++r) {
          const double k = w[r] * g(0, 0);
          auto a = lp.row(r);
          auto b = lq.row(r);
          double mean_d = 0.0;
          for (std::size_t c = 0; c < a.size(); ++c) mean_d += std::exp(a[c]) * (a[c] - b[c]);
          for (std::size_t c = 0; c < a.size(); ++c) {
            const double p = std::exp(a[c]);
            const double q = std::exp(b[c]);
            if (in[0]) (*in[0])(r, c) += k * p * ((a[c] - b[c]) - mean_d);
            if (in[1]) (*in[1])(r, c) += k * (q - p);
          }
        }
      });
}

Value batch_norm(const Value& x, const Value& gamma, const Value& beta, double eps,
                 BatchMoments* moments) {
  const Matrix& xv = x.value();
  const std::size_t n = xv.rows(), q = xv.cols();
  if (gamma.rows() != 1 || gamma.cols() != q || beta.rows() != 1 || beta.cols() != q) {
    throw ShapeError("batch_norm: scale/shift must be 1x" + std::to_string(q));
  }
  std::vector<double> mean(q, 0.0), var(q, 0.0);
  if (n > 0) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < q; ++c) mean[c] += xv(r, c);
    for (auto& m : mean) m /= double(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < q; ++c) {
        const double d = xv(r, c) - mean[c];
        var[c] += d * d;
      }
    for (auto& v : var) v /= double(n);
  }
  std::vector<double> inv(q);
  for (std::size_t c = 0; c < q; ++c) inv[c] = 1.0 / std::sqrt(var[c] + eps);
  Matrix xhat(n, q), out(n, q);
  auto gm = gamma.value().row(0);
  auto bt = beta.value().row(0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < q; ++c) {
      xhat(r, c) = (xv(r, c) - mean[c]) * inv[c];
      out(r, c) = gm[c] * xhat(r, c) + bt[c];
    }
  if (moments) *moments = {mean, var};
  return OpBuilder::make(
      "batch_norm", std::move(out), {x, gamma, beta},
      [xhat = std::move(xhat), inv = std::move(inv), gamma](const Matrix& g,
                                                            std::vector<Matrix*>& in) {
        const std::size_t n = xhat.rows(), q = xhat.cols();
        auto gm = gamma.value().row(0);
        std::vector<double> sum_g(q, 0.0), sum_gx(q, 0.0);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c < q; ++c) {
            sum_g[c] += g(r, c);
            sum_gx[c] += g(r, c) * xhat(r, c);
          }
        if (in[1])
          for (std::size_t c = 0; c < q; ++c) (*in[1])(0, c) += sum_gx[c];
        if (in[2])
          for (std::size_t c = 0; c < q; ++c) (*in[2])(0, c) += sum_g[c];
        if (in[0] && n > 0) {
          const double nn = double(n);
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < q; ++c) {
              // dxhat = g·γ; sums scale by γ as well.
              const double dxh = g(r, c) * gm[c];
              (*in[0])(r, c) += inv[c] / nn *
                                (nn * dxh - gm[c] * sum_g[c] - xhat(r, c) * gm[c] * sum_gx[c]);
            }
        }
      });
}

Value batch_norm_fixed(const Value& x, const Value& gamma, const Value& beta,
                       std::span<const double> mean, std::span<const double> variance,
                       double eps) {
  const Matrix& xv = x.value();
  const std::size_t n = xv.rows(), q = xv.cols();
  if (gamma.cols() != q || beta.cols() != q || mean.size() != q || variance.size() != q) {
    throw ShapeError("batch_norm_fixed: statistics must have " + std::to_string(q) + " entries");
  }
  std::vector<double> inv(q), mu(mean.begin(), mean.end());
  for (std::size_t c = 0; c < q; ++c) inv[c] = 1.0 / std::sqrt(variance[c] + eps);
  Matrix out(n, q);
  auto gm = gamma.value().row(0);
  auto bt = beta.value().row(0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < q; ++c) out(r, c) = (xv(r, c) - mu[c]) * inv[c] * gm[c] + bt[c];
  return OpBuilder::make(
      "batch_norm_fixed", std::move(out), {x, gamma, beta},
      [x, gamma, mu = std::move(mu), inv = std::move(inv)](const Matrix& g,
                                                         std::vector<Matrix*>& in) {
        const Matrix& xv = x.value();
        auto gm = gamma.value().row(0);
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) {
            const double xh = (xv(r, c) - mu[c]) * inv[c];
            if (in[0]) (*in[0])(r, c) += g(r, c) * inv[c] * gm[c];
            if (in[1]) (*in[1])(0, c) += g(r, c) * xh;
            if (in[2]) (*in[2])(0, c) += g(r, c);
          }
      });
}

}  // namespace lagraph
