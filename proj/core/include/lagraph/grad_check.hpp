#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lagraph/autodiff.hpp"

namespace lagraph {

struct GradCheckOptions {
  double step = 1e-3;
  double tolerance = 1e-4;
  /// Denominator floor of the relative error |a−n| / max(|a|, |n|, floor),
  /// so that exactly-zero gradients are compared absolutely.
  double abs_floor = 1e-2;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
  bool passed = true;
  std::string summary() const;
};

/// Compares the analytic gradient of a scalar-valued closure against central
/// differences, one coordinate at a time. The closure must rebuild the graph
/// from the current parameter values on every call.
GradCheckReport grad_check(const std::function<Value()>& f, std::vector<Value> params,
                           GradCheckOptions options = {});

/// Variant with caller-supplied analytic gradients, one per parameter. Used to
/// validate the checker itself.
GradCheckReport grad_check_against(const std::function<Value()>& f, std::vector<Value> params,
                                   const std::vector<Matrix>& analytic,
                                   GradCheckOptions options = {});

}  // namespace lagraph
