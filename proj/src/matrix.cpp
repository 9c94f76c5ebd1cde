#include "corrmax/matrix.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace corrmax::stats {

void DataMatrix::validate_finite() const {
    for (std::int64_t i = 0; i < p_; ++i) {
        const double* c = col(i);
        for (std::int64_t k = 0; k < n_; ++k) {
            if (!std::isfinite(c[k])) {
                std::ostringstream os;
                os << "non-finite value at row " << (k + 1) << ", column " << (i + 1);
                throw std::invalid_argument(os.str());
            }
        }
    }
}

namespace {

bool parse_field(const std::string& field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    if (begin == end) return false;
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

DataMatrix read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    std::int64_t p = -1;
    std::int64_t file_row = 0;
    bool first_data_row = true;

    while (std::getline(in, line)) {
        ++file_row;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const auto fields = split_row(line);

        std::vector<double> row(fields.size());
        bool all_numeric = true;
        std::size_t bad_col = 0;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!parse_field(fields[i], row[i])) {
                all_numeric = false;
                bad_col = i;
                break;
            }
        }

        if (!all_numeric) {
            if (first_data_row) continue; // header row
            std::ostringstream os;
            os << "unparseable value at row " << file_row << ", column " << (bad_col + 1);
            throw std::invalid_argument(os.str());
        }
        first_data_row = false;

        for (std::size_t i = 0; i < row.size(); ++i) {
            if (!std::isfinite(row[i])) {
                std::ostringstream os;
                os << "non-finite value at row " << file_row << ", column " << (i + 1);
                throw std::invalid_argument(os.str());
            }
        }

        if (p < 0) {
            p = static_cast<std::int64_t>(row.size());
        } else if (static_cast<std::int64_t>(row.size()) != p) {
            std::ostringstream os;
            os << "row " << file_row << " has " << row.size() << " fields, expected " << p;
            throw std::invalid_argument(os.str());
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw std::invalid_argument("no data rows in " + path);

    DataMatrix m(static_cast<std::int64_t>(rows.size()), p);
    for (std::int64_t k = 0; k < m.rows(); ++k) {
        for (std::int64_t i = 0; i < p; ++i) {
            m.at(k, i) = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        }
    }
    return m;
}

void write_upper_triangle_csv(const std::string& path, std::int64_t p,
                              const std::vector<double>& upper) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    std::fprintf(f, "i,j,value\n");
    std::size_t idx = 0;
    for (std::int64_t i = 0; i < p; ++i) {
        for (std::int64_t j = i + 1; j < p; ++j) {
            std::fprintf(f, "%lld,%lld,%.17g\n", static_cast<long long>(i + 1),
                         static_cast<long long>(j + 1), upper[idx++]);
        }
    }
    std::fclose(f);
}

} // namespace corrmax::stats
