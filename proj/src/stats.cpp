#include "corrmax/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "corrmax/errors.hpp"
#include "corrmax/kahan.hpp"

namespace corrmax::stats {

namespace {

// Panel width (columns) and row-block length for the Gram kernels. One
// panel-pair working set is 2 * kPanel * kRowBlock doubles (~512 KB), sized
// for L2 residency.
constexpr std::int64_t kPanel = 64;
constexpr std::int64_t kRowBlock = 512;

// Partial dot products of a row block for a 2x2 column tile.
inline void dot2x2(const double* a0, const double* a1, const double* b0, const double* b1,
                   std::int64_t len, double out[4]) {
    double s00 = 0.0, s01 = 0.0, s10 = 0.0, s11 = 0.0;
#pragma omp simd reduction(+ : s00, s01, s10, s11)
    for (std::int64_t k = 0; k < len; ++k) {
        s00 += a0[k] * b0[k];
        s01 += a0[k] * b1[k];
        s10 += a1[k] * b0[k];
        s11 += a1[k] * b1[k];
    }
    out[0] = s00;
    out[1] = s01;
    out[2] = s10;
    out[3] = s11;
}

inline void dot1x2(const double* a0, const double* b0, const double* b1, std::int64_t len,
                   double out[2]) {
    double s0 = 0.0, s1 = 0.0;
#pragma omp simd reduction(+ : s0, s1)
    for (std::int64_t k = 0; k < len; ++k) {
        s0 += a0[k] * b0[k];
        s1 += a0[k] * b1[k];
    }
    out[0] = s0;
    out[1] = s1;
}

inline double dot1x1(const double* a0, const double* b0, std::int64_t len) {
    double s = 0.0;
#pragma omp simd reduction(+ : s)
    for (std::int64_t k = 0; k < len; ++k) s += a0[k] * b0[k];
    return s;
}

// One panel pair: all dot products of columns [ia, ia+wa) of A against
// columns [jb, jb+wb) of B, row blocks combined per pair in fixed order via
// compensated accumulation. `sums`/`carries` are caller scratch of wa*wb.
void panel_pair(const DataMatrix& a, const DataMatrix& b, std::int64_t ia, std::int64_t wa,
                std::int64_t jb, std::int64_t wb, double* sums, double* carries) {
    const std::int64_t n = a.rows();
    std::fill(sums, sums + wa * wb, 0.0);
    std::fill(carries, carries + wa * wb, 0.0);

    auto accum = [&](std::int64_t ii, std::int64_t jj, double v) {
        double& s = sums[ii * wb + jj];
        double& c = carries[ii * wb + jj];
        const double t = s + v;
        if (std::fabs(s) >= std::fabs(v)) {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    };

    for (std::int64_t k0 = 0; k0 < n; k0 += kRowBlock) {
        const std::int64_t len = std::min(kRowBlock, n - k0);
        std::int64_t jj = 0;
        for (; jj + 1 < wb; jj += 2) {
            const double* b0 = b.col(jb + jj) + k0;
            const double* b1 = b.col(jb + jj + 1) + k0;
            std::int64_t ii = 0;
            for (; ii + 1 < wa; ii += 2) {
                double out[4];
                dot2x2(a.col(ia + ii) + k0, a.col(ia + ii + 1) + k0, b0, b1, len, out);
                accum(ii, jj, out[0]);
                accum(ii, jj + 1, out[1]);
                accum(ii + 1, jj, out[2]);
                accum(ii + 1, jj + 1, out[3]);
            }
            if (ii < wa) {
                double out[2];
                dot1x2(a.col(ia + ii) + k0, b0, b1, len, out);
                accum(ii, jj, out[0]);
                accum(ii, jj + 1, out[1]);
            }
        }
        if (jj < wb) {
            const double* b0 = b.col(jb + jj) + k0;
            std::int64_t ii = 0;
            for (; ii + 1 < wa; ii += 2) {
                double out[2];
                dot1x2(b0, a.col(ia + ii) + k0, a.col(ia + ii + 1) + k0, len, out);
                accum(ii, jj, out[0]);
                accum(ii + 1, jj, out[1]);
            }
            if (ii < wa) accum(ii, jj, dot1x1(a.col(ia + ii) + k0, b0, len));
        }
    }

    for (std::int64_t t = 0; t < wa * wb; ++t) sums[t] += carries[t];
}

struct PanelPair {
    std::int64_t ia, jb;
};

std::vector<PanelPair> upper_panel_pairs(std::int64_t p) {
    std::vector<PanelPair> pairs;
    for (std::int64_t ia = 0; ia < p; ia += kPanel) {
        for (std::int64_t jb = ia; jb < p; jb += kPanel) pairs.push_back({ia, jb});
    }
    return pairs;
}

std::vector<PanelPair> all_panel_pairs(std::int64_t p) {
    std::vector<PanelPair> pairs;
    for (std::int64_t ia = 0; ia < p; ia += kPanel) {
        for (std::int64_t jb = 0; jb < p; jb += kPanel) pairs.push_back({ia, jb});
    }
    return pairs;
}

bool better(double value, std::int64_t i, std::int64_t j, const MaxEntry& cur) {
    if (value != cur.value) return value > cur.value;
    return i < cur.i || (i == cur.i && j < cur.j);
}

// Streaming max |dot| over i < j (symmetric input, a == b) without
// materializing the Gram matrix.
MaxEntry max_abs_upper(const DataMatrix& a) {
    const std::int64_t p = a.cols();
    const auto pairs = upper_panel_pairs(p);
    MaxEntry best{-1.0, -1, -1};

#pragma omp parallel
    {
        std::vector<double> sums(kPanel * kPanel), carries(kPanel * kPanel);
        MaxEntry local{-1.0, -1, -1};
#pragma omp for schedule(dynamic)
        for (std::size_t t = 0; t < pairs.size(); ++t) {
            const auto [ia, jb] = pairs[t];
            const std::int64_t wa = std::min(kPanel, p - ia);
            const std::int64_t wb = std::min(kPanel, p - jb);
            panel_pair(a, a, ia, wa, jb, wb, sums.data(), carries.data());
            for (std::int64_t ii = 0; ii < wa; ++ii) {
                const std::int64_t i = ia + ii;
                const std::int64_t j0 = (jb == ia) ? ii + 1 : 0;
                for (std::int64_t jj = j0; jj < wb; ++jj) {
                    const double v = std::fabs(sums[ii * wb + jj]);
                    if (better(v, i, jb + jj, local)) local = {v, i, jb + jj};
                }
            }
        }
#pragma omp critical
        {
            if (better(local.value, local.i, local.j, best)) best = local;
        }
    }
    return best;
}

MaxEntry max_abs_offdiag(const DataMatrix& a, const DataMatrix& b) {
    const std::int64_t p = a.cols();
    const auto pairs = all_panel_pairs(p);
    MaxEntry best{-1.0, -1, -1};

#pragma omp parallel
    {
        std::vector<double> sums(kPanel * kPanel), carries(kPanel * kPanel);
        MaxEntry local{-1.0, -1, -1};
#pragma omp for schedule(dynamic)
        for (std::size_t t = 0; t < pairs.size(); ++t) {
            const auto [ia, jb] = pairs[t];
            const std::int64_t wa = std::min(kPanel, p - ia);
            const std::int64_t wb = std::min(kPanel, p - jb);
            panel_pair(a, b, ia, wa, jb, wb, sums.data(), carries.data());
            for (std::int64_t ii = 0; ii < wa; ++ii) {
                for (std::int64_t jj = 0; jj < wb; ++jj) {
                    if (ia + ii == jb + jj) continue;
                    const double v = std::fabs(sums[ii * wb + jj]);
                    if (better(v, ia + ii, jb + jj, local)) local = {v, ia + ii, jb + jj};
                }
            }
        }
#pragma omp critical
        {
            if (better(local.value, local.i, local.j, best)) best = local;
        }
    }
    return best;
}

} // namespace

std::size_t CorrMatrix::pair_index(std::int64_t p, std::int64_t i, std::int64_t j) {
    // Packed row-wise upper triangle: (i, j), i < j.
    return static_cast<std::size_t>(i * (2 * p - i - 1) / 2 + (j - i - 1));
}

std::pair<DataMatrix, StandardizeReport> standardize_columns(const DataMatrix& m,
                                                             ZeroVariancePolicy policy) {
    if (m.rows() < 2) throw std::invalid_argument("standardize needs at least 2 rows");
    m.validate_finite();

    const std::int64_t n = m.rows();
    const std::int64_t p = m.cols();

    StandardizeReport report;
    std::vector<bool> keep(static_cast<std::size_t>(p), true);
    for (std::int64_t i = 0; i < p; ++i) {
        const double* c = m.col(i);
        const auto [mn, mx] = std::minmax_element(c, c + n);
        if (*mn == *mx) {
            if (policy == ZeroVariancePolicy::error) {
                std::ostringstream os;
                os << "zero-variance column " << (i + 1);
                throw DegenerateDataError(os.str());
            }
            keep[static_cast<std::size_t>(i)] = false;
            report.zero_variance_cols.push_back(i + 1);
        }
    }

    std::int64_t kept = 0;
    for (std::int64_t i = 0; i < p; ++i) kept += keep[static_cast<std::size_t>(i)];
    report.retained = kept;
    if (kept == 0) throw DegenerateDataError("all columns have zero variance");

    DataMatrix out(n, kept);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < p; ++i) {
        if (!keep[static_cast<std::size_t>(i)]) continue;
        std::int64_t dst = 0;
        for (std::int64_t t = 0; t < i; ++t) dst += keep[static_cast<std::size_t>(t)];

        const double* src = m.col(i);
        double* d = out.col(dst);

        StableSum mean_acc;
        for (std::int64_t k = 0; k < n; ++k) mean_acc.add(src[k]);
        const double mean = mean_acc.get() / static_cast<double>(n);

        StableSum ss_acc;
        for (std::int64_t k = 0; k < n; ++k) {
            const double dev = src[k] - mean;
            d[k] = dev;
            ss_acc.add(dev * dev);
        }
        const double inv_norm = 1.0 / std::sqrt(ss_acc.get());
        for (std::int64_t k = 0; k < n; ++k) d[k] *= inv_norm;
    }
    return {std::move(out), std::move(report)};
}

CorrMatrix correlation_matrix(const DataMatrix& m, ZeroVariancePolicy policy) {
    if (m.rows() < 2) throw std::invalid_argument("correlation needs at least 2 rows");
    auto [z, report] = standardize_columns(m, policy);
    const std::int64_t p = z.cols();
    if (p < 2) throw std::invalid_argument("correlation needs at least 2 columns");

    CorrMatrix corr;
    corr.p = p;
    corr.upper.assign(static_cast<std::size_t>(p) * (p - 1) / 2, 0.0);

    const auto pairs = upper_panel_pairs(p);
#pragma omp parallel
    {
        std::vector<double> sums(kPanel * kPanel), carries(kPanel * kPanel);
#pragma omp for schedule(dynamic)
        for (std::size_t t = 0; t < pairs.size(); ++t) {
            const auto [ia, jb] = pairs[t];
            const std::int64_t wa = std::min(kPanel, p - ia);
            const std::int64_t wb = std::min(kPanel, p - jb);
            panel_pair(z, z, ia, wa, jb, wb, sums.data(), carries.data());
            for (std::int64_t ii = 0; ii < wa; ++ii) {
                const std::int64_t j0 = (jb == ia) ? ii + 1 : 0;
                for (std::int64_t jj = j0; jj < wb; ++jj) {
                    corr.upper[CorrMatrix::pair_index(p, ia + ii, jb + jj)] = sums[ii * wb + jj];
                }
            }
        }
    }
    return corr;
}

MaxEntry l_statistic(const DataMatrix& m, ZeroVariancePolicy policy) {
    if (m.cols() < 2) throw std::invalid_argument("l_statistic needs at least 2 columns");
    if (m.rows() < 2) throw std::invalid_argument("l_statistic needs at least 2 rows");
    auto [z, report] = standardize_columns(m, policy);
    if (z.cols() < 2) throw DegenerateDataError("fewer than 2 columns left after drops");
    return max_abs_upper(z);
}

MaxEntry w_statistic(const DataMatrix& m) {
    if (m.cols() < 2) throw std::invalid_argument("w_statistic needs at least 2 columns");
    m.validate_finite();
    return max_abs_upper(m);
}

MaxEntry t_statistic(const DataMatrix& u, const DataMatrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw std::invalid_argument("t_statistic needs U and V of identical shape");
    if (u.cols() < 2) throw std::invalid_argument("t_statistic needs at least 2 columns");
    u.validate_finite();
    v.validate_finite();
    return max_abs_offdiag(u, v);
}

double max_product_statistic(std::span<const double> x, int m) {
    if (m < 1) throw std::invalid_argument("max_product_statistic needs m >= 1");
    if (static_cast<std::size_t>(m) > x.size())
        throw std::invalid_argument("max_product_statistic needs m <= length(x)");

    std::vector<double> mags(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mags[i] = std::fabs(x[i]);
    std::nth_element(mags.begin(), mags.begin() + (m - 1), mags.end(), std::greater<double>());
    std::sort(mags.begin(), mags.begin() + m, std::greater<double>());
    double prod = 1.0;
    for (int h = 0; h < m; ++h) prod *= mags[static_cast<std::size_t>(h)];
    return prod;
}

} // namespace corrmax::stats
