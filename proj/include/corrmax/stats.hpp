#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "corrmax/matrix.hpp"

namespace corrmax::stats {

enum class ZeroVariancePolicy { error, drop };

struct StandardizeReport {
    std::vector<std::int64_t> zero_variance_cols; // 1-based, dropped or offending
    std::int64_t retained = 0;
};

// Rescale every column to mean 0 and sum of squares 1. Constant columns
// either raise DegenerateDataError (policy error) or are dropped and listed
// in the report.
std::pair<DataMatrix, StandardizeReport>
standardize_columns(const DataMatrix& m, ZeroVariancePolicy policy = ZeroVariancePolicy::error);

// Upper triangle of a symmetric p x p matrix, packed row-wise (i < j).
struct CorrMatrix {
    std::int64_t p = 0;
    std::vector<double> upper;

    static std::size_t pair_index(std::int64_t p, std::int64_t i, std::int64_t j);
    double at(std::int64_t i, std::int64_t j) const { return upper[pair_index(p, i, j)]; }
};

// Sample correlation matrix: Gram matrix of standardized columns, computed
// in cache-blocked panels with compensated accumulation. The result is
// bit-identical for any OpenMP thread count: every pair's value reduces its
// row blocks in a fixed order.
CorrMatrix correlation_matrix(const DataMatrix& m,
                              ZeroVariancePolicy policy = ZeroVariancePolicy::error);

// A max-entry statistic value with its (0-based) argmax pair; ties resolve
// to the lexicographically smallest pair.
struct MaxEntry {
    double value = 0.0;
    std::int64_t i = 0;
    std::int64_t j = 0;
};

// L_n: largest |corr(i,j)| over i < j.
MaxEntry l_statistic(const DataMatrix& m,
                     ZeroVariancePolicy policy = ZeroVariancePolicy::error);

// W_n: largest |sum_k X_ki X_kj| over i < j (uncentered cross products).
MaxEntry w_statistic(const DataMatrix& m);

// T_n: largest |sum_k U_ki V_kj| over ordered pairs i != j.
MaxEntry t_statistic(const DataMatrix& u, const DataMatrix& v);

// max over m-subsets of prod |x_i|, which equals the product of the m
// largest magnitudes; partial selection, O(n) expected.
double max_product_statistic(std::span<const double> x, int m);

} // namespace corrmax::stats

// Serial reference implementations: straightforward double loops with plain
// accumulation. These are the oracles the blocked kernels are tested against
// and the baseline the benchmark compares to.
namespace corrmax::stats_ref {

stats::CorrMatrix correlation_matrix(const stats::DataMatrix& m);
stats::MaxEntry l_statistic(const stats::DataMatrix& m);
stats::MaxEntry w_statistic(const stats::DataMatrix& m);
stats::MaxEntry t_statistic(const stats::DataMatrix& u, const stats::DataMatrix& v);

// Explicit enumeration over all m-subsets; feasible only for small C(n,m).
double max_product_statistic(std::span<const double> x, int m);

} // namespace corrmax::stats_ref
