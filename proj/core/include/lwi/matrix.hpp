#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace lwi {

// Row-major dense matrix with optional column names. Deliberately minimal:
// design matrices are built once and read sequentially.
struct DataMatrix {
    size_t n_rows = 0;
    size_t n_cols = 0;
    std::vector<double> data;       // n_rows * n_cols
    std::vector<std::string> names; // empty or n_cols entries

    DataMatrix() = default;
    DataMatrix(size_t rows, size_t cols) : n_rows(rows), n_cols(cols), data(rows * cols, 0.0) {}

    double& at(size_t r, size_t c) { return data[r * n_cols + c]; }
    double at(size_t r, size_t c) const { return data[r * n_cols + c]; }
    const double* row(size_t r) const { return data.data() + r * n_cols; }

    DataMatrix take_rows(const std::vector<size_t>& rows) const {
        DataMatrix out(rows.size(), n_cols);
        out.names = names;
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t c = 0; c < n_cols; ++c) out.at(i, c) = at(rows[i], c);
        return out;
    }
};

} // namespace lwi
