#include "lexmemm/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "lexmemm/error.hpp"

namespace lexmemm::optim {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double evaluate(const Objective& f, std::span<const double> x, std::span<double> g, int iteration) {
  const double value = f(x, g);
  if (!std::isfinite(value) || !all_finite(g)) {
    throw NumericError("non-finite objective or gradient at iteration " + std::to_string(iteration));
  }
  return value;
}

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

}  // namespace

LbfgsResult minimize(const Objective& f, std::vector<double>& x, const LbfgsOptions& opts) {
  const std::size_t n = x.size();
  std::vector<double> g(n), x_new(n), g_new(n), d(n);
  std::deque<Correction> history;
  std::vector<double> alpha(static_cast<std::size_t>(opts.memory));

  LbfgsResult result;
  double fx = evaluate(f, x, g, 0);
  result.initial_value = fx;
  result.value = fx;
  result.gradient_max_norm = max_abs(g);
  if (result.gradient_max_norm <= opts.gradient_tolerance) {
    result.status = LbfgsStatus::kConverged;
    return result;
  }

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    // Two-loop recursion: d = -H g.
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    for (std::size_t k = history.size(); k-- > 0;) {
      alpha[k] = history[k].rho * dot(history[k].s, d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * history[k].y[i];
    }
    if (!history.empty()) {
      const auto& last = history.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& v : d) v *= gamma;
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const double beta = history[k].rho * dot(history[k].y, d);
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[k] - beta) * history[k].s[i];
    }

    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      // Lost descent; restart from steepest descent.
      history.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = dot(g, d);
    }

    double step = history.empty() ? std::min(1.0, 1.0 / std::sqrt(dot(g, g))) : 1.0;
    bool accepted = false;
    double f_new = fx;
    for (int ls = 0; ls < opts.max_line_search_steps; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
      f_new = evaluate(f, x_new, g_new, iter);
      if (f_new <= fx + opts.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    result.iterations = iter;
    if (!accepted) {
      result.status = LbfgsStatus::kLineSearchFailed;
      return result;
    }

    Correction c{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      c.s[i] = x_new[i] - x[i];
      c.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(c.s, c.y);
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    result.value = fx;
    result.gradient_max_norm = max_abs(g);
    if (sy > 1e-12 * std::sqrt(dot(c.s, c.s) * dot(c.y, c.y))) {
      c.rho = 1.0 / sy;
      history.push_back(std::move(c));
      if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
    }
    if (result.gradient_max_norm <= opts.gradient_tolerance) {
      result.status = LbfgsStatus::kConverged;
      return result;
    }
  }
  result.status = LbfgsStatus::kMaxIterations;
  return result;
}

}  // namespace lexmemm::optim
