#include "corrmax/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace corrmax::stats_ref {

using stats::CorrMatrix;
using stats::DataMatrix;
using stats::MaxEntry;

namespace {

void take_if_better(MaxEntry& best, double value, std::int64_t i, std::int64_t j) {
    if (value > best.value) {
        best = {value, i, j};
    }
}

} // namespace

CorrMatrix correlation_matrix(const DataMatrix& m) {
    const std::int64_t n = m.rows();
    const std::int64_t p = m.cols();
    if (n < 2 || p < 2) throw std::invalid_argument("reference correlation needs n,p >= 2");

    std::vector<double> mean(static_cast<std::size_t>(p), 0.0);
    for (std::int64_t i = 0; i < p; ++i) {
        double s = 0.0;
        for (std::int64_t k = 0; k < n; ++k) s += m.at(k, i);
        mean[static_cast<std::size_t>(i)] = s / static_cast<double>(n);
    }

    std::vector<double> ss(static_cast<std::size_t>(p), 0.0);
    for (std::int64_t i = 0; i < p; ++i) {
        double s = 0.0;
        for (std::int64_t k = 0; k < n; ++k) {
            const double d = m.at(k, i) - mean[static_cast<std::size_t>(i)];
            s += d * d;
        }
        ss[static_cast<std::size_t>(i)] = s;
    }

    CorrMatrix corr;
    corr.p = p;
    corr.upper.assign(static_cast<std::size_t>(p) * (p - 1) / 2, 0.0);
    for (std::int64_t i = 0; i < p; ++i) {
        for (std::int64_t j = i + 1; j < p; ++j) {
            double s = 0.0;
            for (std::int64_t k = 0; k < n; ++k) {
                s += (m.at(k, i) - mean[static_cast<std::size_t>(i)]) *
                     (m.at(k, j) - mean[static_cast<std::size_t>(j)]);
            }
            corr.upper[CorrMatrix::pair_index(p, i, j)] =
                s / std::sqrt(ss[static_cast<std::size_t>(i)] * ss[static_cast<std::size_t>(j)]);
        }
    }
    return corr;
}

MaxEntry l_statistic(const DataMatrix& m) {
    const CorrMatrix corr = stats_ref::correlation_matrix(m);
    MaxEntry best{-1.0, -1, -1};
    for (std::int64_t i = 0; i < corr.p; ++i) {
        for (std::int64_t j = i + 1; j < corr.p; ++j) {
            take_if_better(best, std::fabs(corr.at(i, j)), i, j);
        }
    }
    return best;
}

MaxEntry w_statistic(const DataMatrix& m) {
    const std::int64_t n = m.rows();
    const std::int64_t p = m.cols();
    MaxEntry best{-1.0, -1, -1};
    for (std::int64_t i = 0; i < p; ++i) {
        for (std::int64_t j = i + 1; j < p; ++j) {
            double s = 0.0;
            for (std::int64_t k = 0; k < n; ++k) s += m.at(k, i) * m.at(k, j);
            take_if_better(best, std::fabs(s), i, j);
        }
    }
    return best;
}

MaxEntry t_statistic(const DataMatrix& u, const DataMatrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw std::invalid_argument("reference t_statistic needs identical shapes");
    const std::int64_t n = u.rows();
    const std::int64_t p = u.cols();
    MaxEntry best{-1.0, -1, -1};
    for (std::int64_t i = 0; i < p; ++i) {
        for (std::int64_t j = 0; j < p; ++j) {
            if (i == j) continue;
            double s = 0.0;
            for (std::int64_t k = 0; k < n; ++k) s += u.at(k, i) * v.at(k, j);
            take_if_better(best, std::fabs(s), i, j);
        }
    }
    return best;
}

namespace {

void subsets(std::span<const double> x, int m, std::size_t start, double prod, double& best) {
    if (m == 0) {
        if (prod > best) best = prod;
        return;
    }
    for (std::size_t i = start; i + static_cast<std::size_t>(m) <= x.size() + 1 && i < x.size();
         ++i) {
        subsets(x, m - 1, i + 1, prod * std::fabs(x[i]), best);
    }
}

} // namespace

double max_product_statistic(std::span<const double> x, int m) {
    if (m < 1 || static_cast<std::size_t>(m) > x.size())
        throw std::invalid_argument("bad m for reference max_product_statistic");
    double best = -1.0;
    subsets(x, m, 0, 1.0, best);
    return best;
}

} // namespace corrmax::stats_ref
