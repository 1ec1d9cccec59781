#pragma once

#include <functional>
#include <vector>

namespace lpslab::detail {

/// Composite Gauss–Legendre rule on [a, b]: `panels` equal panels of `order` nodes each.
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadRule composite_gauss(double a, double b, int panels, int order = 16);
double integrate(const std::function<double(double)>& f, double a, double b, int panels, int order = 16);

} // namespace lpslab::detail
