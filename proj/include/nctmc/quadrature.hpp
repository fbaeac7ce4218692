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

#ifndef NCTMC_QUADRATURE_HPP
#define NCTMC_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace nctmc {

/// Gauss-Legendre rule on [-1, 1]; nodes/weights computed to machine
/// precision by Newton iteration on the Legendre recurrence and cached per n.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  static const GaussLegendreRule& get(int n);
};

/// n-point Gauss-Legendre on [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

/// Composite Gauss-Legendre on [a, b]: total_points split across panels whose
/// widths shrink geometrically toward b (where the near-singular end of the
/// noise schedule sits). grade_toward_b=false grades toward a instead.
double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int total_points, int panels = 8, bool grade_toward_b = true);

/// Node/weight layout of integrate_composite, exposed so exact objectives can
/// evaluate per-node quantities on exactly the same grid.
void composite_nodes(double a, double b, int total_points, int panels, bool grade_toward_b,
                     std::vector<double>& nodes, std::vector<double>& weights);

/// Adaptive quadrature: Gauss-Legendre panels refined by bisection until the
/// two-half refinement changes the panel value by less than rel_tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, int max_depth = 48);

}  // namespace nctmc

#endif  // NCTMC_QUADRATURE_HPP
