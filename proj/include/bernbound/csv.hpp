#pragma once

// Dense matrices as CSV: one row per line, ',' separator, %.17g so the text
// round-trips every double exactly.

#include <Eigen/Core>

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bernbound {

inline void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& a, const std::string& header = {}) {
    if (!header.empty()) os << header << '\n';
    char buf[40];
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
            os << (j ? "," : "") << buf;
        }
        os << '\n';
    }
}

/// Reads a rectangular numeric CSV. A first line that does not parse as
/// numbers is treated as a header and skipped.
inline Eigen::MatrixXd read_matrix_csv(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size()) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw std::invalid_argument("read_matrix_csv: non-numeric cell in '" + line + "'");
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::invalid_argument("read_matrix_csv: ragged rows");
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return a;
}

} // namespace bernbound
