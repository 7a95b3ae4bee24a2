#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lexmemm::optim {

// Evaluates f(x) and writes its gradient into `grad`.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 200;
  double gradient_tolerance = 1e-5;  // on max |g_i|
  double armijo = 1e-4;
  int max_line_search_steps = 60;
};

enum class LbfgsStatus { kConverged, kMaxIterations, kLineSearchFailed };

struct LbfgsResult {
  LbfgsStatus status = LbfgsStatus::kMaxIterations;
  int iterations = 0;
  double initial_value = 0.0;
  double value = 0.0;
  double gradient_max_norm = 0.0;
};

// Minimizes `f` starting from `x` (updated in place). Throws NumericError if
// the objective or gradient becomes non-finite.
LbfgsResult minimize(const Objective& f, std::vector<double>& x, const LbfgsOptions& opts);

}  // namespace lexmemm::optim
