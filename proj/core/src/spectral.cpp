#include "qel/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace qel {
namespace {

// Iterative Tarjan over a thresholded adjacency structure.
std::vector<std::vector<std::uint32_t>> strongly_connected(const SparseMatrix& A, double thresh) {
    const std::uint32_t n = A.nrows;
    std::vector<int> dfs_num(n, -1), low(n, 0), stack_idx(n, -1);
    std::vector<std::uint32_t> stack;
    std::vector<std::vector<std::uint32_t>> sccs;
    int counter = 0;

    struct Frame {
        std::uint32_t v;
        std::uint64_t edge;
    };
    std::vector<Frame> call;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (dfs_num[root] != -1) continue;
        call.push_back({root, A.row_ptr[root]});
        dfs_num[root] = low[root] = counter++;
        stack_idx[root] = int(stack.size());
        stack.push_back(root);
        while (!call.empty()) {
            auto& fr = call.back();
            bool descended = false;
            while (fr.edge < A.row_ptr[fr.v + 1]) {
                auto k = fr.edge++;
                if (A.val[k] <= thresh) continue;
                std::uint32_t w = A.col[k];
                if (dfs_num[w] == -1) {
                    dfs_num[w] = low[w] = counter++;
                    stack_idx[w] = int(stack.size());
                    stack.push_back(w);
                    call.push_back({w, A.row_ptr[w]});
                    descended = true;
                    break;
                } else if (stack_idx[w] != -1) {
                    low[fr.v] = std::min(low[fr.v], dfs_num[w]);
                }
            }
            if (descended) continue;
            std::uint32_t v = fr.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == dfs_num[v]) {
                std::vector<std::uint32_t> scc;
                int si = stack_idx[v];
                for (size_t i = si; i < stack.size(); ++i) {
                    scc.push_back(stack[i]);
                    stack_idx[stack[i]] = -1;
                }
                stack.resize(si);
                sccs.push_back(std::move(scc));
            }
        }
    }
    return sccs;
}

SparseMatrix submatrix(const SparseMatrix& A, const std::vector<std::uint32_t>& idx,
                       double thresh) {
    std::vector<std::int32_t> local(A.nrows, -1);
    for (std::uint32_t i = 0; i < idx.size(); ++i) local[idx[i]] = std::int32_t(i);
    TripletBuilder tb(std::uint32_t(idx.size()), std::uint32_t(idx.size()));
    for (std::uint32_t i = 0; i < idx.size(); ++i) {
        std::uint32_t r = idx[i];
        for (auto k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
            if (A.val[k] <= thresh) continue;
            if (local[A.col[k]] >= 0) tb.add(i, std::uint32_t(local[A.col[k]]), A.val[k]);
        }
    }
    return tb.build();
}

// gcd of cycle lengths via BFS levels inside one SCC.
int scc_period(const SparseMatrix& A, const std::vector<std::uint32_t>& scc, double thresh) {
    if (scc.size() == 1) {
        // period 1 iff self-loop; acyclic singleton reported as period 1 too
        return 1;
    }
    std::vector<std::int32_t> local(A.nrows, -1);
    for (std::uint32_t i = 0; i < scc.size(); ++i) local[scc[i]] = std::int32_t(i);
    std::vector<int> level(scc.size(), -1);
    std::queue<std::uint32_t> bfs;
    level[0] = 0;
    bfs.push(0);
    long long g = 0;
    while (!bfs.empty()) {
        std::uint32_t u = bfs.front();
        bfs.pop();
        std::uint32_t gu = scc[u];
        for (auto k = A.row_ptr[gu]; k < A.row_ptr[gu + 1]; ++k) {
            if (A.val[k] <= thresh) continue;
            auto lv = local[A.col[k]];
            if (lv < 0) continue;
            if (level[lv] == -1) {
                level[lv] = level[u] + 1;
                bfs.push(std::uint32_t(lv));
            } else {
                g = std::gcd(g, (long long)std::abs(level[u] + 1 - level[lv]));
            }
        }
    }
    return g == 0 ? 1 : int(g);
}

}  // namespace

PowerResult power_leading(const SparseMatrix& A, double tol, int max_iter, int steps,
                          const std::vector<double>* start) {
    PowerResult res;
    const std::uint32_t n = A.nrows;
    if (n == 0) return res;
    std::vector<double> v, z, tmp;
    if (start && start->size() == n) {
        v = *start;
        double mx = 0.0;
        for (double x : v) mx = std::max(mx, std::fabs(x));
        if (mx <= 0.0) v.assign(n, 1.0);
        else
            for (auto& x : v) x = std::max(0.0, x) / mx;
    } else {
        v.assign(n, 1.0);
    }
    double lam_k = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        // z = A^steps v
        A.apply(v, z);
        for (int s = 1; s < steps; ++s) {
            A.apply(z, tmp);
            z.swap(tmp);
        }
        double vmax = 0.0, zmax = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) {
            vmax = std::max(vmax, v[i]);
            zmax = std::max(zmax, z[i]);
        }
        if (zmax == 0.0) {  // nilpotent direction: spectral radius 0
            res.lambda = 0.0;
            res.vec = v;
            res.residual = 0.0;
            res.iters = it + 1;
            res.converged = true;
            return res;
        }
        const double thresh = 1e-12 * vmax;
        lam_k = 0.0;
        for (std::uint32_t i = 0; i < n; ++i)
            if (v[i] > thresh) lam_k = std::max(lam_k, z[i] / v[i]);
        double resid = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) resid = std::max(resid, std::fabs(z[i] - lam_k * v[i]));
        for (std::uint32_t i = 0; i < n; ++i) v[i] = z[i] / zmax;
        res.iters = it + 1;
        if (resid <= tol * std::max(lam_k, 1e-300)) {
            res.converged = true;
            break;
        }
    }
    res.lambda = std::pow(lam_k, 1.0 / steps);
    res.vec = std::move(v);
    // residual on the stepped operator, relative to lam_k
    {
        A.apply(res.vec, z);
        for (int s = 1; s < steps; ++s) {
            A.apply(z, tmp);
            z.swap(tmp);
        }
        double r = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) r = std::max(r, std::fabs(z[i] - lam_k * res.vec[i]));
        res.residual = r;
    }
    return res;
}

PeriodInfo detect_period(const SparseMatrix& A, double support_tol_rel) {
    PeriodInfo info;
    info.class_of.assign(A.nrows, -1);
    const double thresh = support_tol_rel * A.max_entry();
    info.sccs = strongly_connected(A, thresh);
    info.scc_lambda.assign(info.sccs.size(), 0.0);
    info.scc_period.assign(info.sccs.size(), 1);
    for (size_t s = 0; s < info.sccs.size(); ++s) {
        const auto& scc = info.sccs[s];
        bool has_cycle = scc.size() > 1;
        if (!has_cycle) {
            std::uint32_t v = scc[0];
            for (auto k = A.row_ptr[v]; k < A.row_ptr[v + 1]; ++k)
                if (A.col[k] == v && A.val[k] > thresh) has_cycle = true;
        }
        if (!has_cycle) continue;  // nilpotent singleton, lambda 0
        auto sub = submatrix(A, scc, thresh);
        int k = scc_period(A, scc, thresh);
        info.scc_period[s] = k;
        auto pr = power_leading(sub, 1e-12, 20000, k);
        info.scc_lambda[s] = pr.lambda;
    }
    double best = 0.0, second = 0.0;
    for (size_t s = 0; s < info.sccs.size(); ++s) {
        if (info.scc_lambda[s] > best) {
            second = best;
            best = info.scc_lambda[s];
            info.dominant_scc = int(s);
        } else {
            second = std::max(second, info.scc_lambda[s]);
        }
    }
    if (info.dominant_scc >= 0) {
        info.k = info.scc_period[info.dominant_scc];
        info.near_degenerate = second > 0.0 && (best - second) <= 1e-6 * best;
        // cyclic class labels: BFS levels mod k inside the dominant SCC
        const auto& scc = info.sccs[info.dominant_scc];
        std::vector<std::int32_t> local(A.nrows, -1);
        for (std::uint32_t i = 0; i < scc.size(); ++i) local[scc[i]] = std::int32_t(i);
        std::vector<int> level(scc.size(), -1);
        std::queue<std::uint32_t> bfs;
        level[0] = 0;
        bfs.push(0);
        while (!bfs.empty()) {
            auto u = bfs.front();
            bfs.pop();
            for (auto k2 = A.row_ptr[scc[u]]; k2 < A.row_ptr[scc[u] + 1]; ++k2) {
                if (A.val[k2] <= thresh) continue;
                auto lv = local[A.col[k2]];
                if (lv >= 0 && level[lv] == -1) {
                    level[lv] = level[u] + 1;
                    bfs.push(std::uint32_t(lv));
                }
            }
        }
        for (std::uint32_t i = 0; i < scc.size(); ++i)
            info.class_of[scc[i]] = ((level[i] % info.k) + info.k) % info.k;
    }
    return info;
}

SpectralTriple solve_triple(const UlamOperator& op, const SolveOptions& opts) {
    if (op.matrix.nnz() == 0) throw std::runtime_error("solve_triple: zero operator");
    const auto info = detect_period(op.matrix);
    const int k = info.dominant_scc >= 0 ? info.k : 1;
    const SparseMatrix L = op.matrix.transpose_scaled(op.volumes);

    auto extract = [&](const SparseMatrix& A, const std::vector<double>* start) {
        auto pr = power_leading(A, opts.tol, opts.max_iter, k, start);
        if (!pr.converged)
            throw std::runtime_error("solve_triple: power iteration did not converge");
        if (k > 1 && pr.lambda > 0.0) {
            // average the k cyclic images to get a genuine eigenvector of A
            std::vector<double> acc = pr.vec, cur = pr.vec, nxt;
            for (int t = 1; t < k; ++t) {
                A.apply(cur, nxt);
                cur.swap(nxt);
                double sc = std::pow(pr.lambda, t);
                for (size_t i = 0; i < acc.size(); ++i) acc[i] += cur[i] / sc;
            }
            for (auto& x : acc) x /= k;
            pr.vec = std::move(acc);
        }
        return pr;
    };

    auto pg = extract(op.matrix, opts.g_start);
    auto pm = extract(L, opts.m_start);
    if (std::fabs(pg.lambda - pm.lambda) > 1e-8 * std::max(1.0, pg.lambda))
        throw std::runtime_error("solve_triple: Koopman/dual leading eigenvalues disagree");

    SpectralTriple t;
    t.lambda = pg.lambda;
    t.period = k;
    t.cyclic_class = info.class_of;
    t.near_degenerate = info.near_degenerate;
    t.residual = std::max(pg.residual, pm.residual);
    t.g = std::move(pg.vec);
    t.m = std::move(pm.vec);

    double sm = 0.0;
    for (size_t i = 0; i < t.m.size(); ++i) sm += t.m[i] * op.volumes[i];
    if (sm > 0.0)
        for (auto& x : t.m) x /= sm;
    double sg = 0.0;
    for (size_t i = 0; i < t.g.size(); ++i) sg += t.g[i] * t.m[i] * op.volumes[i];
    if (sg > 0.0)
        for (auto& x : t.g) x /= sg;
    return t;
}

QuasiErgodicMeasure quasi_ergodic(const SpectralTriple& triple, const UlamOperator& op) {
    QuasiErgodicMeasure nu;
    nu.weights.resize(triple.g.size());
    double total = 0.0, wmax = 0.0;
    for (size_t i = 0; i < nu.weights.size(); ++i) {
        nu.weights[i] = triple.g[i] * triple.m[i] * op.volumes[i];
        total += nu.weights[i];
    }
    if (total <= 0.0)
        throw std::runtime_error("quasi_ergodic: g*m vanishes everywhere");
    for (auto& w : nu.weights) {
        w /= total;
        wmax = std::max(wmax, w);
    }
    for (std::uint32_t i = 0; i < nu.weights.size(); ++i)
        if (nu.weights[i] > 1e-12 * wmax) nu.support.push_back(i);
    return nu;
}

}  // namespace qel
