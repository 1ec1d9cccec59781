#include "quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <stdexcept>

namespace lpslab::detail {

QuadRule composite_gauss(double a, double b, int panels, int order) {
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order));
    if (!t) throw std::runtime_error("composite_gauss: table allocation failed");
    QuadRule rule;
    rule.nodes.reserve(static_cast<std::size_t>(panels * order));
    rule.weights.reserve(static_cast<std::size_t>(panels * order));
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        for (int i = 0; i < order; ++i) {
            double xi = 0.0, wi = 0.0;
            gsl_integration_glfixed_point(lo, lo + w, static_cast<std::size_t>(i), &xi, &wi, t);
            rule.nodes.push_back(xi);
            rule.weights.push_back(wi);
        }
    }
    gsl_integration_glfixed_table_free(t);
    return rule;
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels, int order) {
    QuadRule r = composite_gauss(a, b, panels, order);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
    return s;
}

} // namespace lpslab::detail
