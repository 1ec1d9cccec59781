#pragma once

#include <map>
#include <string>
#include <utility>

#include "lpslab/grid.hpp"

namespace lpslab {

/** [[Λ_k]]_α(x) for k in a scale range and |α| ≤ order. */
class MomentTable {
public:
    MomentTable() = default;
    MomentTable(ScaleRange scales, int order, int dim) : scales_(scales), order_(order), dim_(dim) {}

    const ScaleRange& scales() const { return scales_; }
    int order() const { return order_; }
    int dim() const { return dim_; }
    bool contains(int k, const MultiIndex& alpha) const { return table_.count({k, alpha}) > 0; }
    const GridFunction& at(int k, const MultiIndex& alpha) const;
    void set(int k, const MultiIndex& alpha, GridFunction values);
    const std::map<std::pair<int, MultiIndex>, GridFunction>& entries() const { return table_; }
    /// sup over stored keys with |α| in [lo, hi] and all x of |[[Λ_k]]_α(x)|.
    double sup_abs(int lo, int hi) const;
    /// Rows (k, alpha, x_index, value).
    std::string csv() const;

private:
    ScaleRange scales_;
    int order_ = 0;
    int dim_ = 1;
    std::map<std::pair<int, MultiIndex>, GridFunction> table_;
};

} // namespace lpslab
