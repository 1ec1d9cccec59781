#include "lpslab/moment_table.hpp"

#include <cmath>
#include <stdexcept>

#include "lpslab/csv.hpp"

namespace lpslab {

const GridFunction& MomentTable::at(int k, const MultiIndex& alpha) const {
    auto it = table_.find({k, alpha});
    if (it == table_.end())
        throw std::out_of_range("moment table has no entry for k = " + std::to_string(k) + ", alpha = " +
                                alpha.to_string());
    return it->second;
}

void MomentTable::set(int k, const MultiIndex& alpha, GridFunction values) {
    if (alpha.dim() != dim_) throw std::invalid_argument("multi-index dimension differs from table dimension");
    table_.insert_or_assign({k, alpha}, std::move(values));
}

double MomentTable::sup_abs(int lo, int hi) const {
    double m = 0.0;
    for (const auto& [key, v] : table_) {
        const int o = key.second.order();
        if (o >= lo && o <= hi) m = std::max(m, v.max_abs());
    }
    return m;
}

std::string MomentTable::csv() const {
    CsvWriter out({"k", "alpha", "x_index", "value"});
    for (const auto& [key, v] : table_)
        for (std::size_t i = 0; i < v.size(); ++i)
            out.row({fmt(static_cast<long long>(key.first)), key.second.to_string(),
                     fmt(static_cast<long long>(i)), fmt(v[i])});
    return out.text();
}

} // namespace lpslab
