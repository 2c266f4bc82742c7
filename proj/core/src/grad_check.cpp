#include "lagraph/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lagraph {

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  os << (passed ? "ok" : "FAILED") << " max_rel_error=" << max_rel_error << " over "
     << coordinates << " coordinates (param " << worst_param << " index " << worst_index
     << ": analytic " << worst_analytic << " numeric " << worst_numeric << ")";
  return os.str();
}

GradCheckReport grad_check_against(const std::function<Value()>& f, std::vector<Value> params,
                                   const std::vector<Matrix>& analytic,
                                   GradCheckOptions options) {
  if (!(options.step > 0.0)) throw std::invalid_argument("grad_check: step must be positive");
  if (analytic.size() != params.size()) {
    throw std::invalid_argument("grad_check: one analytic gradient per parameter required");
  }
  GradCheckReport report;
  const double h = options.step;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Matrix& theta = params[p].mutable_value();
    require_same_shape(theta, analytic[p], "grad_check");
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double saved = theta.data()[i];
      double plus = 0.0, minus = 0.0;
      {
        NoGradGuard guard;
        theta.data()[i] = saved + h;
        plus = f().value().item();
        theta.data()[i] = saved - h;
        minus = f().value().item();
      }
      theta.data()[i] = saved;
      const double numeric = (plus - minus) / (2.0 * h);
      const double a = analytic[p].data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.abs_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.coordinates;
      if (!(rel <= report.max_rel_error)) {
        report.max_rel_error = rel;
        report.worst_param = p;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  report.passed = std::isfinite(report.max_rel_error) && report.max_rel_error <= options.tolerance;
  return report;
}

GradCheckReport grad_check(const std::function<Value()>& f, std::vector<Value> params,
                           GradCheckOptions options) {
  for (auto& p : params) p.zero_grad();
  Value loss = f();
  backward(loss);
  std::vector<Matrix> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p.grad());
  return grad_check_against(f, std::move(params), analytic, options);
}

}  // namespace lagraph
