#include "qel/ulam.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "qel/util.hpp"

namespace qel {
namespace {

// Overlap of the segment [b0,b1] with the axis grid; appends
// (cell index along axis, overlap length). Circle axes fold shifted
// copies of the segment back into the fundamental domain.
void axis_overlaps(const CellPartition& part, int axis, bool wraps, double b0, double b1,
                   std::vector<std::pair<int, double>>& out) {
    const double lo = part.space.lo[axis], hi = part.space.hi[axis];
    const double w = part.width(axis);
    const int res = part.resolution;
    auto accumulate = [&](double a0, double a1) {
        a0 = std::max(a0, lo);
        a1 = std::min(a1, hi);
        if (a1 <= a0) return;
        int i0 = std::max(0, int((a0 - lo) / w));
        int i1 = std::min(res - 1, int((a1 - lo) / w));
        for (int i = i0; i <= i1; ++i) {
            double c0 = lo + i * w, c1 = c0 + w;
            double ov = std::min(a1, c1) - std::max(a0, c0);
            if (ov > 0.0) out.emplace_back(i, ov);
        }
    };
    if (!wraps) {
        accumulate(b0, b1);
        return;
    }
    const double len = hi - lo;
    int kmin = int(std::floor((lo - b1) / len));
    int kmax = int(std::ceil((hi - b0) / len));
    for (int k = kmin; k <= kmax; ++k) accumulate(b0 + k * len, b1 + k * len);
}

}  // namespace

UlamOperator assemble(const MapSystem& map, const NoiseKernel& kernel, const WeightFunction& weight,
                      const CellPartition& partition, const std::vector<std::uint32_t>& active_cells,
                      const AssembleOptions& opts) {
    if (active_cells.empty()) throw std::invalid_argument("assemble: no active cells");
    const int d = map.space.dim();
    const double eps = kernel.epsilon;

    std::vector<std::int32_t> local(partition.size(), -1);
    for (std::uint32_t i = 0; i < active_cells.size(); ++i) local[active_cells[i]] = std::int32_t(i);

    const auto q = gauss_nodes01(opts.quad_nodes_per_axis);
    const size_t n_nodes = d == 1 ? q.size() : q.size() * q.size();
    const std::uint32_t n = std::uint32_t(active_cells.size());

    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);

    auto do_range = [&](std::uint32_t r0, std::uint32_t r1) {
        std::vector<double> rowbuf(n, 0.0);
        std::vector<std::uint32_t> touched;
        std::vector<std::pair<int, double>> ov0, ov1;
        State lo, hi;
        for (std::uint32_t r = r0; r < r1; ++r) {
            partition.bounds(active_cells[r], lo, hi);
            touched.clear();
            for (size_t s = 0; s < n_nodes; ++s) {
                State x{0.0, 0.0};
                x[0] = lo[0] + q[s % q.size()] * (hi[0] - lo[0]);
                if (d == 2) x[1] = lo[1] + q[s / q.size()] * (hi[1] - lo[1]);
                if (map.in_hole(x)) continue;
                const double w = std::exp(weight(x)) / double(n_nodes);
                State y = map.eval(x);
                if (eps == 0.0) {
                    // deterministic (classic Ulam) path: node -> target cell
                    State yw = map.space.wrap(y);
                    if (!map.space.contains(yw) || map.in_hole(yw)) continue;
                    auto g = partition.cell_of(yw);
                    if (g == std::numeric_limits<std::uint32_t>::max() || local[g] < 0) continue;
                    auto lc = std::uint32_t(local[g]);
                    if (rowbuf[lc] == 0.0) touched.push_back(lc);
                    rowbuf[lc] += w;
                    continue;
                }
                double norm = 1.0;
                for (int a = 0; a < d; ++a) norm *= 2.0 * eps;
                ov0.clear();
                axis_overlaps(partition, 0, map.space.wraps(), y[0] - eps, y[0] + eps, ov0);
                if (d == 1) {
                    for (const auto& [i0, l0] : ov0) {
                        auto lc32 = local[std::uint32_t(i0)];
                        if (lc32 < 0) continue;
                        auto lc = std::uint32_t(lc32);
                        if (rowbuf[lc] == 0.0) touched.push_back(lc);
                        rowbuf[lc] += w * l0 / norm;
                    }
                } else {
                    ov1.clear();
                    axis_overlaps(partition, 1, false, y[1] - eps, y[1] + eps, ov1);
                    for (const auto& [i1, l1] : ov1)
                        for (const auto& [i0, l0] : ov0) {
                            auto g = std::uint32_t(i0) + std::uint32_t(partition.resolution) * std::uint32_t(i1);
                            auto lc32 = local[g];
                            if (lc32 < 0) continue;
                            auto lc = std::uint32_t(lc32);
                            if (rowbuf[lc] == 0.0) touched.push_back(lc);
                            rowbuf[lc] += w * l0 * l1 / norm;
                        }
                }
            }
            std::sort(touched.begin(), touched.end());
            auto& out = rows[r];
            out.reserve(touched.size());
            for (auto lc : touched) {
                if (rowbuf[lc] != 0.0) out.emplace_back(lc, rowbuf[lc]);
                rowbuf[lc] = 0.0;
            }
        }
    };

    int threads = std::max(1, opts.threads);
    if (threads == 1 || n < 64) {
        do_range(0, n);
    } else {
        std::vector<std::thread> pool;
        std::uint32_t chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::uint32_t r0 = std::min<std::uint32_t>(n, t * chunk);
            std::uint32_t r1 = std::min<std::uint32_t>(n, r0 + chunk);
            if (r0 < r1) pool.emplace_back(do_range, r0, r1);
        }
        for (auto& th : pool) th.join();
    }

    UlamOperator op;
    op.cells = active_cells;
    op.volumes.assign(n, partition.cell_volume());
    op.weight_applied = true;
    op.epsilon = eps;
    op.resolution = partition.resolution;
    op.weight_id = weight.holder_note;

    auto& m = op.matrix;
    m.nrows = m.ncols = n;
    m.row_ptr.assign(n + 1, 0);
    for (std::uint32_t r = 0; r < n; ++r) m.row_ptr[r + 1] = m.row_ptr[r] + rows[r].size();
    m.col.resize(m.row_ptr[n]);
    m.val.resize(m.row_ptr[n]);
    for (std::uint32_t r = 0; r < n; ++r) {
        auto base = m.row_ptr[r];
        for (size_t k = 0; k < rows[r].size(); ++k) {
            m.col[base + k] = rows[r][k].first;
            m.val[base + k] = rows[r][k].second;
        }
    }
    op.zero_flagged = m.nnz() == 0;
    return op;
}

DualOperator dual(const UlamOperator& op) {
    return DualOperator{op.matrix.transpose_scaled(op.volumes)};
}

std::vector<double> apply(const UlamOperator& op, const std::vector<double>& f) {
    std::vector<double> out;
    op.matrix.apply(f, out);
    return out;
}

void dump_operator(const UlamOperator& op, const std::string& csv_path,
                   const std::string& sidecar_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("dump_operator: cannot open " + csv_path);
    csv << "row,col,value\n";
    for (std::uint32_t r = 0; r < op.matrix.nrows; ++r)
        for (auto k = op.matrix.row_ptr[r]; k < op.matrix.row_ptr[r + 1]; ++k)
            csv << r << ',' << op.matrix.col[k] << ',' << fmt_double(op.matrix.val[k]) << '\n';

    nlohmann::json side;
    side["resolution"] = op.resolution;
    side["epsilon"] = op.epsilon;
    side["weight_id"] = op.weight_id;
    side["active_cells"] = op.cells;
    side["volumes"] = op.volumes;
    std::string volbytes;
    for (double v : op.volumes) volbytes += fmt_double(v) + "\n";
    side["volumes_digest"] = digest_hex(volbytes);
    std::ofstream js(sidecar_path);
    if (!js) throw std::runtime_error("dump_operator: cannot open " + sidecar_path);
    js << side.dump(2) << '\n';
}

UlamOperator load_operator(const std::string& csv_path, const std::string& sidecar_path) {
    std::ifstream js(sidecar_path);
    if (!js) throw std::runtime_error("load_operator: cannot open " + sidecar_path);
    nlohmann::json side = nlohmann::json::parse(js);
    UlamOperator op;
    op.resolution = side["resolution"].get<int>();
    op.epsilon = side["epsilon"].get<double>();
    op.weight_id = side["weight_id"].get<std::string>();
    op.cells = side["active_cells"].get<std::vector<std::uint32_t>>();
    op.volumes = side["volumes"].get<std::vector<double>>();
    op.weight_applied = true;

    std::ifstream csv(csv_path);
    if (!csv) throw std::runtime_error("load_operator: cannot open " + csv_path);
    std::string line;
    std::getline(csv, line);  // header
    TripletBuilder tb(std::uint32_t(op.cells.size()), std::uint32_t(op.cells.size()));
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
        double v = 0.0;
        std::from_chars(line.data() + c2 + 1, line.data() + line.size(), v);
        tb.add(std::uint32_t(std::stoul(line.substr(0, c1))),
               std::uint32_t(std::stoul(line.substr(c1 + 1, c2 - c1 - 1))), v);
    }
    op.matrix = tb.build();
    op.matrix.nrows = op.matrix.ncols = std::uint32_t(op.cells.size());
    if (op.matrix.row_ptr.size() != op.cells.size() + 1)
        op.matrix.row_ptr.resize(op.cells.size() + 1, op.matrix.nnz());
    op.zero_flagged = op.matrix.nnz() == 0;
    return op;
}

}  // namespace qel
