// Copyright 2026-present the nctmc project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nctmc/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace nctmc {

namespace {

GaussLegendreRule build_rule(int n) {
  if (n < 1) throw std::invalid_argument("GaussLegendreRule: n must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = 3.14159265358979323846;
  const int half = (n + 1) / 2;
  for (int k = 0; k < half; ++k) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[k] = -x;
    rule.nodes[n - 1 - k] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[k] = w;
    rule.weights[n - 1 - k] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendreRule& GaussLegendreRule::get(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
  const GaussLegendreRule& rule = GaussLegendreRule::get(n);
  const double mid = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += rule.weights[k] * f(mid + hw * rule.nodes[k]);
  return acc * hw;
}

void composite_nodes(double a, double b, int total_points, int panels, bool grade_toward_b,
                     std::vector<double>& nodes, std::vector<double>& weights) {
  if (total_points < 1) throw std::invalid_argument("composite_nodes: total_points must be >= 1");
  panels = std::max(1, std::min(panels, total_points));
  const int per_panel = std::max(1, total_points / panels);
  // Geometric breakpoints halving toward the graded end.
  std::vector<double> cuts(panels + 1);
  cuts[0] = 0.0;
  cuts[panels] = 1.0;
  for (int k = 1; k < panels; ++k) cuts[k] = 1.0 - std::pow(0.5, k);
  nodes.clear();
  weights.clear();
  const GaussLegendreRule& rule = GaussLegendreRule::get(per_panel);
  for (int p = 0; p < panels; ++p) {
    double lo_frac = cuts[p], hi_frac = cuts[p + 1];
    double lo, hi;
    if (grade_toward_b) {
      lo = a + (b - a) * lo_frac;
      hi = a + (b - a) * hi_frac;
    } else {
      lo = b - (b - a) * hi_frac;
      hi = b - (b - a) * lo_frac;
    }
    const double mid = 0.5 * (lo + hi);
    const double hw = 0.5 * (hi - lo);
    for (int k = 0; k < per_panel; ++k) {
      nodes.push_back(mid + hw * rule.nodes[k]);
      weights.push_back(hw * rule.weights[k]);
    }
  }
}

double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int total_points, int panels, bool grade_toward_b) {
  std::vector<double> nodes, weights;
  composite_nodes(a, b, total_points, panels, grade_toward_b, nodes, weights);
  double acc = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) acc += weights[k] * f(nodes[k]);
  return acc;
}

namespace {

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double whole,
                    double rel_tol, int depth, int max_depth) {
  const double mid = 0.5 * (a + b);
  const double left = integrate_gl(f, a, mid, 7);
  const double right = integrate_gl(f, mid, b, 7);
  const double refined = left + right;
  const double err = std::abs(refined - whole);
  if (depth >= max_depth || err <= rel_tol * (std::abs(refined) + 1e-300)) {
    return refined;
  }
  return adaptive_rec(f, a, mid, left, rel_tol, depth + 1, max_depth) +
         adaptive_rec(f, mid, b, right, rel_tol, depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  const double whole = integrate_gl(f, a, b, 7);
  return adaptive_rec(f, a, b, whole, rel_tol, 0, max_depth);
}

}  // namespace nctmc
