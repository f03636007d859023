#include "qel/sparse.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qel {

double SparseMatrix::max_entry() const {
    double m = 0.0;
    for (double v : val) m = std::max(m, v);
    return m;
}

double SparseMatrix::max_row_sum() const {
    double m = 0.0;
    for (std::uint32_t r = 0; r < nrows; ++r) {
        double s = 0.0;
        for (auto k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k];
        m = std::max(m, s);
    }
    return m;
}

void SparseMatrix::apply(const std::vector<double>& x, std::vector<double>& y) const {
    if (x.size() != ncols) throw std::invalid_argument("SparseMatrix::apply: dimension mismatch");
    y.assign(nrows, 0.0);
    for (std::uint32_t r = 0; r < nrows; ++r) {
        double s = 0.0;
        for (auto k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
        y[r] = s;
    }
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix t;
    t.nrows = ncols;
    t.ncols = nrows;
    t.row_ptr.assign(t.nrows + 1, 0);
    for (auto c : col) ++t.row_ptr[c + 1];
    for (std::uint32_t r = 0; r < t.nrows; ++r) t.row_ptr[r + 1] += t.row_ptr[r];
    t.col.resize(nnz());
    t.val.resize(nnz());
    std::vector<std::uint64_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (std::uint32_t r = 0; r < nrows; ++r)
        for (auto k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            auto pos = next[col[k]]++;
            t.col[pos] = r;
            t.val[pos] = val[k];
        }
    return t;
}

SparseMatrix SparseMatrix::transpose_scaled(const std::vector<double>& scale) const {
    if (scale.size() != nrows || nrows != ncols)
        throw std::invalid_argument("transpose_scaled: square matrix + matching scale required");
    SparseMatrix t = transpose();
    for (std::uint32_t r = 0; r < t.nrows; ++r)
        for (auto k = t.row_ptr[r]; k < t.row_ptr[r + 1]; ++k)
            t.val[k] *= scale[t.col[k]] / scale[r];
    return t;
}

SparseMatrix TripletBuilder::build() const {
    std::vector<std::uint64_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
        if (rows[a] != rows[b]) return rows[a] < rows[b];
        if (cols[a] != cols[b]) return cols[a] < cols[b];
        return a < b;
    });
    SparseMatrix m;
    m.nrows = nrows;
    m.ncols = ncols;
    m.row_ptr.assign(nrows + 1, 0);
    std::uint32_t last_r = 0, last_c = 0;
    bool have_last = false;
    for (auto idx : order) {
        double v = vals[idx];
        if (v == 0.0) continue;
        if (have_last && last_r == rows[idx] && last_c == cols[idx]) {
            m.val.back() += v;
            continue;
        }
        m.col.push_back(cols[idx]);
        m.val.push_back(v);
        ++m.row_ptr[rows[idx] + 1];
        last_r = rows[idx];
        last_c = cols[idx];
        have_last = true;
    }
    for (std::uint32_t r = 0; r < nrows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

}  // namespace qel
