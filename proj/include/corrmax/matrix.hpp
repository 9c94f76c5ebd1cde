#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace corrmax::stats {

// n x p array of observations, rows = samples, columns = variables.
// Column-major so each column is contiguous for the centering and Gram
// passes.
class DataMatrix {
public:
    DataMatrix() = default;
    DataMatrix(std::int64_t n, std::int64_t p)
        : n_(n), p_(p), values_(static_cast<std::size_t>(n * p), 0.0) {}

    std::int64_t rows() const { return n_; }
    std::int64_t cols() const { return p_; }

    double& at(std::int64_t k, std::int64_t i) { return values_[idx(k, i)]; }
    double at(std::int64_t k, std::int64_t i) const { return values_[idx(k, i)]; }

    double* col(std::int64_t i) { return values_.data() + static_cast<std::size_t>(i) * n_; }
    const double* col(std::int64_t i) const {
        return values_.data() + static_cast<std::size_t>(i) * n_;
    }
    std::span<double> col_span(std::int64_t i) { return {col(i), static_cast<std::size_t>(n_)}; }
    std::span<const double> col_span(std::int64_t i) const {
        return {col(i), static_cast<std::size_t>(n_)};
    }

    const std::vector<double>& data() const { return values_; }
    std::vector<double>& data() { return values_; }

    // Throws std::invalid_argument naming the first non-finite cell (1-based
    // row/column coordinates).
    void validate_finite() const;

private:
    std::size_t idx(std::int64_t k, std::int64_t i) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(k);
    }

    std::int64_t n_ = 0;
    std::int64_t p_ = 0;
    std::vector<double> values_;
};

// CSV reader: comma-delimited 64-bit floats, optional header row (detected
// when the first row has a non-numeric token). NaN/Inf cells are rejected
// with their 1-based row/column coordinates in the exception message.
DataMatrix read_csv(const std::string& path);

// Upper-triangle CSV of a p x p symmetric matrix given as packed i<j values:
// header "i,j,value", one row per pair.
void write_upper_triangle_csv(const std::string& path, std::int64_t p,
                              const std::vector<double>& upper);

} // namespace corrmax::stats
