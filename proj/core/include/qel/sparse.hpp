#pragma once

#include <cstdint>
#include <vector>

namespace qel {

// Row-major CSR sparse matrix, square or rectangular, nonnegative use.
struct SparseMatrix {
    std::uint32_t nrows = 0, ncols = 0;
    std::vector<std::uint64_t> row_ptr;  // size nrows+1
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::uint64_t nnz() const { return val.size(); }
    double max_entry() const;
    double max_row_sum() const;

    // y = A x (y resized; no allocation growth across repeated calls with
    // a caller-held y).
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y;
        apply(x, y);
        return y;
    }
    SparseMatrix transpose() const;
    // B[j][i] = A[i][j] * scale_row[i] / scale_row[j] (volume-weighted dual).
    SparseMatrix transpose_scaled(const std::vector<double>& scale) const;
};

struct TripletBuilder {
    std::uint32_t nrows = 0, ncols = 0;
    std::vector<std::uint32_t> rows, cols;
    std::vector<double> vals;

    TripletBuilder(std::uint32_t nr, std::uint32_t nc) : nrows(nr), ncols(nc) {}
    void add(std::uint32_t r, std::uint32_t c, double v) {
        rows.push_back(r);
        cols.push_back(c);
        vals.push_back(v);
    }
    // Sorts, merges duplicates, drops exact zeros.
    SparseMatrix build() const;
};

}  // namespace qel
