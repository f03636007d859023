#include "qel/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qel/graph.hpp"
#include "qel/util.hpp"

namespace qel {
namespace {

struct DensePerronRaw {
    double lambda = 0.0;
    std::vector<double> right, left;
    int period = 1;
    std::vector<std::complex<double>> rotated;
};

std::vector<double> positive_real_vector(const Eigen::VectorXcd& v, bool enforce_sign) {
    const auto n = v.size();
    std::vector<double> out(n);
    double mx = 0.0;
    Eigen::Index imax = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(v[i]) > mx) {
            mx = std::abs(v[i]);
            imax = i;
        }
    // rotate so the largest entry is real positive, then take real parts
    std::complex<double> phase = mx > 0.0 ? v[imax] / std::abs(v[imax]) : 1.0;
    double neg = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        out[i] = (v[i] / phase).real();
        neg = std::min(neg, out[i]);
    }
    if (enforce_sign && neg < -1e-10 * std::max(mx, 1e-300))
        throw std::runtime_error("dense_perron: Perron vector has sign changes");
    for (auto& x : out) x = std::max(0.0, x);
    return out;
}

// Uncapped dense Perron data (internal; used by pressure() on symbolic
// models whose recurrent component can exceed the 64-state API contract).
DensePerronRaw dense_perron_raw(const Eigen::MatrixXd& A, bool enforce_sign) {
    DensePerronRaw out;
    const auto n = A.rows();
    if (n == 0) return out;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense_perron: eigensolver failed");
    const auto& ev = es.eigenvalues();
    double rho = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) rho = std::max(rho, std::abs(ev[i]));
    out.lambda = rho;
    if (rho == 0.0) {
        out.right.assign(n, 0.0);
        out.left.assign(n, 0.0);
        return out;
    }
    Eigen::Index best = 0;
    double bestdist = 1e300;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(ev[i]) >= rho * (1.0 - 1e-9)) out.rotated.push_back(ev[i]);
        double d = std::abs(ev[i] - std::complex<double>(rho, 0.0));
        if (d < bestdist) {
            bestdist = d;
            best = i;
        }
    }
    out.period = int(out.rotated.size());
    out.right = positive_real_vector(es.eigenvectors().col(best), enforce_sign);

    Eigen::EigenSolver<Eigen::MatrixXd> esl(A.transpose());
    if (esl.info() != Eigen::Success) throw std::runtime_error("dense_perron: eigensolver failed");
    Eigen::Index bestl = 0;
    bestdist = 1e300;
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = std::abs(esl.eigenvalues()[i] - std::complex<double>(rho, 0.0));
        if (d < bestdist) {
            bestdist = d;
            bestl = i;
        }
    }
    out.left = positive_real_vector(esl.eigenvectors().col(bestl), enforce_sign);
    return out;
}

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
    const auto n = Eigen::Index(m.size());
    Eigen::MatrixXd A(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (Eigen::Index(m[i].size()) != n)
            throw std::invalid_argument("dense matrix must be square");
        for (Eigen::Index j = 0; j < n; ++j) A(i, j) = m[i][j];
    }
    return A;
}

}  // namespace

PerronData dense_perron(const DenseMatrix& matrix, const std::vector<double>& vols) {
    if (matrix.size() > 64) throw std::invalid_argument("dense_perron: size > 64");
    auto raw = dense_perron_raw(to_eigen(matrix), true);
    PerronData out;
    out.lambda = raw.lambda;
    out.period = raw.period;
    out.rotated = raw.rotated;
    out.g = raw.right;
    out.m = raw.left;
    const size_t n = matrix.size();
    std::vector<double> v = vols.empty() ? std::vector<double>(n, 1.0) : vols;
    double sm = 0.0;
    for (size_t i = 0; i < n; ++i) sm += out.m[i] * v[i];
    if (sm > 0.0)
        for (auto& x : out.m) x /= sm;
    double sg = 0.0;
    for (size_t i = 0; i < n; ++i) sg += out.g[i] * out.m[i] * v[i];
    if (sg > 0.0)
        for (auto& x : out.g) x /= sg;
    return out;
}

namespace {

// forward/backward rescaled vectors shared by the two conditioned readouts
void check_chain_args(const DenseMatrix& w, int n, int start) {
    if (w.size() > 64) throw std::invalid_argument("conditioned average: size > 64");
    if (n < 1 || n > 10000) throw std::invalid_argument("conditioned average: n out of [1,1e4]");
    if (start < 0 || size_t(start) >= w.size())
        throw std::invalid_argument("conditioned average: bad start state");
}

void rescale(std::vector<double>& v) {
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::fabs(x));
    if (mx == 0.0) throw std::runtime_error("conditioned average: full absorption");
    for (auto& x : v) x /= mx;
}

}  // namespace

double exact_conditioned_average(const DenseMatrix& weighted, const std::vector<double>& h, int n,
                                 int start) {
    check_chain_args(weighted, n, start);
    const size_t s = weighted.size();
    // backward survival vectors B_j = P^j 1, rescaled per step
    std::vector<std::vector<double>> B(n + 1, std::vector<double>(s));
    B[0].assign(s, 1.0);
    for (int j = 1; j <= n; ++j) {
        for (size_t i = 0; i < s; ++i) {
            double acc = 0.0;
            for (size_t k = 0; k < s; ++k) acc += weighted[i][k] * B[j - 1][k];
            B[j][i] = acc;
        }
        rescale(B[j]);
    }
    // forward row vectors f_i = e_x P^i, rescaled per step
    std::vector<double> f(s, 0.0), fn(s);
    f[start] = 1.0;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double num = 0.0, den = 0.0;
        for (size_t k = 0; k < s; ++k) {
            num += f[k] * h[k] * B[n - i][k];
            den += f[k] * B[n - i][k];
        }
        if (den <= 0.0) throw std::runtime_error("conditioned average: zero survival mass");
        acc += num / den;
        for (size_t k = 0; k < s; ++k) {
            double a2 = 0.0;
            for (size_t r = 0; r < s; ++r) a2 += f[r] * weighted[r][k];
            fn[k] = a2;
        }
        rescale(fn);
        f.swap(fn);
    }
    return acc / n;
}

double exact_conditioned_snapshot(const DenseMatrix& weighted, const std::vector<double>& h, int n,
                                  int start) {
    check_chain_args(weighted, n, start);
    const size_t s = weighted.size();
    std::vector<double> f(s, 0.0), fn(s);
    f[start] = 1.0;
    for (int i = 0; i < n; ++i) {
        for (size_t k = 0; k < s; ++k) {
            double a2 = 0.0;
            for (size_t r = 0; r < s; ++r) a2 += f[r] * weighted[r][k];
            fn[k] = a2;
        }
        rescale(fn);
        f.swap(fn);
    }
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < s; ++k) {
        num += f[k] * h[k];
        den += f[k];
    }
    if (den <= 0.0) throw std::runtime_error("conditioned snapshot: zero survival mass");
    return num / den;
}

EquilibriumState pressure(const MarkovModel& model) {
    const size_t n = model.states.size();
    if (n == 0) throw std::invalid_argument("pressure: empty model");
    std::vector<std::vector<int>> adj(n);
    for (size_t y = 0; y < n; ++y)
        for (auto x : model.succ[y]) adj[y].push_back(int(x));

    auto sccs = scc_of_digraph(adj);
    // pick the SCC with the largest restricted leading eigenvalue
    int best = -1;
    double best_lambda = -1.0;
    DensePerronRaw best_raw;
    std::vector<int> best_nodes;
    for (auto& scc : sccs) {
        bool cyc = scc.size() > 1;
        if (!cyc)
            for (int x : adj[scc[0]])
                if (x == scc[0]) cyc = true;
        if (!cyc) continue;
        std::sort(scc.begin(), scc.end());
        std::map<int, int> loc;
        for (size_t i = 0; i < scc.size(); ++i) loc[scc[i]] = int(i);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(scc.size(), scc.size());
        for (size_t i = 0; i < scc.size(); ++i)
            for (int x : adj[scc[i]]) {
                auto it = loc.find(x);
                if (it != loc.end()) A(it->second, i) = std::exp(model.potential[scc[i]]);
            }
        // A acts on functions: (A f)(x) = sum_{y->x} e^{psi(y)} f(y)
        auto raw = dense_perron_raw(A, false);
        if (raw.lambda > best_lambda) {
            best_lambda = raw.lambda;
            best = int(&scc - &sccs[0]);
            best_raw = raw;
            best_nodes = scc;
        }
    }
    if (best < 0 || best_lambda <= 0.0)
        throw std::runtime_error("pressure: no recurrent component (reducible model)");

    // Doob transform on the chosen component. With u the right eigenvector
    // of the edge-weight matrix W[y][x] = e^{psi(y)} adj(y->x) (so
    // W u = lambda u reads e^{psi(y)} sum_{y->x} u(x) = lambda u(y)),
    // Q[y][x] = W[y][x] u(x) / (lambda u(y)) is stochastic and pi = u*v
    // is its stationary law.
    const size_t ns = best_nodes.size();
    std::map<int, int> loc;
    for (size_t i = 0; i < ns; ++i) loc[best_nodes[i]] = int(i);
    // note: dense_perron_raw above was run on A = W^T (functions indexed by
    // target); so u = left of A = raw.left, v = right of A = raw.right.
    const auto& u = best_raw.left;
    const auto& v = best_raw.right;
    std::vector<double> pi(ns);
    double spi = 0.0;
    for (size_t i = 0; i < ns; ++i) {
        pi[i] = u[i] * v[i];
        spi += pi[i];
    }
    if (spi <= 0.0) throw std::runtime_error("pressure: degenerate stationary law");
    for (auto& x : pi) x /= spi;

    double entropy = 0.0, integral = 0.0;
    for (size_t i = 0; i < ns; ++i) {
        int y = best_nodes[i];
        integral += pi[i] * model.potential[y];
        double ey = std::exp(model.potential[y]);
        for (int x : adj[y]) {
            auto it = loc.find(x);
            if (it == loc.end()) continue;
            double q = ey * u[it->second] / (best_lambda * u[i]);
            if (q > 0.0) entropy -= pi[i] * q * std::log(q);
        }
    }

    EquilibriumState eq;
    eq.pressure = std::log(best_lambda);
    eq.entropy = entropy;
    eq.integral = integral;
    eq.measure.assign(n, 0.0);
    for (size_t i = 0; i < ns; ++i) eq.measure[best_nodes[i]] = pi[i];
    eq.note = model.note;
    if (std::fabs(eq.pressure - eq.entropy - eq.integral) > 1e-9)
        throw std::runtime_error("pressure: variational identity violated beyond 1e-9");
    return eq;
}

namespace {

std::string word_string(std::uint64_t w, int depth) {
    std::string s(depth, '0');
    for (int i = 0; i < depth; ++i)
        if (w >> (depth - 1 - i) & 1u) s[i] = '1';
    return s;
}

MarkovModel model_from_words(std::vector<std::uint64_t> words, int depth,
                             const std::function<double(double)>& deriv_at,
                             const std::function<double(double)>& phi,
                             const std::vector<std::pair<double, double>>& intervals) {
    MarkovModel m;
    std::map<std::uint64_t, std::uint32_t> index;
    for (size_t i = 0; i < words.size(); ++i) index[words[i]] = std::uint32_t(i);
    const std::uint64_t mask = (depth >= 64) ? ~0ull : ((1ull << depth) - 1);
    m.words = words;
    m.intervals = intervals;
    m.succ.resize(words.size());
    for (size_t i = 0; i < words.size(); ++i) {
        m.states.push_back(word_string(words[i], depth));
        double mid = 0.5 * (intervals[i].first + intervals[i].second);
        m.branch_deriv.push_back(deriv_at(mid));
        m.potential.push_back(phi(mid) - std::log(deriv_at(mid)));
        for (std::uint64_t b = 0; b <= 1; ++b) {
            std::uint64_t next = ((words[i] << 1) & mask) | b;
            auto it = index.find(next);
            if (it != index.end()) m.succ[i].push_back(it->second);
        }
    }
    return m;
}

}  // namespace

MarkovModel doubling_hole_model(int depth, const std::function<bool(double)>& hole,
                                const std::function<double(double)>& phi) {
    if (depth < 1 || depth > 24) throw std::invalid_argument("doubling_hole_model: bad depth");
    std::vector<std::uint64_t> words;
    std::vector<std::pair<double, double>> ivs;
    const double scale = std::pow(2.0, -depth);
    for (std::uint64_t w = 0; w < (1ull << depth); ++w) {
        double lo = w * scale, hi = lo + scale;
        if (hole && hole(0.5 * (lo + hi))) continue;
        words.push_back(w);
        ivs.emplace_back(lo, hi);
    }
    if (words.empty()) throw std::runtime_error("doubling_hole_model: empty survivor model");
    std::function<double(double)> phi2 = phi ? phi : [](double) { return 0.0; };
    return model_from_words(words, depth, [](double) { return 2.0; }, phi2, ivs);
}

MarkovModel logistic_repeller_model(double a, int depth, double hole_radius,
                                    const std::function<double(double)>& phi) {
    if (depth < 1 || depth > 24) throw std::invalid_argument("logistic_repeller_model: bad depth");
    auto T = [a](double x) { return a * x * (1.0 - x); };
    double x = 0.5;
    for (int i = 0; i < 4000; ++i) x = T(x);
    std::vector<double> cycle{x, T(x), T(T(x))};
    std::sort(cycle.begin(), cycle.end());
    auto hole = [&](double y) {
        for (double p : cycle)
            if (std::fabs(y - p) < hole_radius) return true;
        return false;
    };

    // depth-d cylinders by backward inverse-branch composition:
    // I(b . w) = h_b(I(w) clipped to [0, a/4])
    std::vector<std::uint64_t> words;
    std::vector<std::pair<double, double>> ivs;
    struct Node {
        int level;              // symbols remaining to prepend
        std::uint64_t suffix;   // bits w_j..w_{d-1}, w_j most significant
        double lo, hi;
    };
    std::vector<Node> stack{{depth, 0, 0.0, 1.0}};
    const double ymax = a / 4.0;
    while (!stack.empty()) {
        Node nd = stack.back();
        stack.pop_back();
        if (nd.level == 0) {
            double mid = 0.5 * (nd.lo + nd.hi);
            if (!hole(mid)) {
                words.push_back(nd.suffix);
                ivs.emplace_back(nd.lo, nd.hi);
            }
            continue;
        }
        double l = std::max(0.0, nd.lo), r = std::min(ymax, nd.hi);
        if (r <= l) continue;
        double sl = std::sqrt(std::max(0.0, 1.0 - 4.0 * l / a));
        double sr = std::sqrt(std::max(0.0, 1.0 - 4.0 * r / a));
        int shift = depth - nd.level;
        // branch 0: increasing inverse (1-s)/2; branch 1: decreasing (1+s)/2
        stack.push_back({nd.level - 1, nd.suffix, 0.5 * (1.0 - sl), 0.5 * (1.0 - sr)});
        stack.push_back(
            {nd.level - 1, (1ull << shift) | nd.suffix, 0.5 * (1.0 + sr), 0.5 * (1.0 + sl)});
    }
    if (words.empty()) throw std::runtime_error("logistic_repeller_model: empty survivor model");

    // sort states by word for a deterministic layout
    std::vector<size_t> order(words.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t i, size_t j) { return words[i] < words[j]; });
    std::vector<std::uint64_t> w2;
    std::vector<std::pair<double, double>> iv2;
    for (auto i : order) {
        w2.push_back(words[i]);
        iv2.push_back(ivs[i]);
    }

    std::function<double(double)> phi2 = phi ? phi : [](double) { return 0.0; };
    auto m = model_from_words(
        w2, depth, [a](double y) { return std::fabs(a * (1.0 - 2.0 * y)); }, phi2, iv2);
    m.note =
        "subshift entropy reported in log form (log((1+sqrt5)/2) ~ 0.4812 for the period-3 "
        "window); some sources quote the golden ratio itself";
    return m;
}

MarkovModel fixed_point_model(double deriv, double t) {
    MarkovModel m;
    m.states = {"0"};
    m.words = {0};
    m.intervals = {{0.0, 0.0}};
    m.succ = {{0}};
    m.branch_deriv = {deriv};
    m.potential = {-t * std::log(deriv)};
    return m;
}

nlohmann::json model_to_json(const MarkovModel& m) {
    nlohmann::json j;
    j["states"] = m.states;
    std::vector<std::array<std::uint32_t, 2>> edges;
    for (std::uint32_t y = 0; y < m.succ.size(); ++y)
        for (auto x : m.succ[y]) edges.push_back({y, x});
    j["adjacency"] = edges;
    j["potential"] = m.potential;
    j["branch_deriv"] = m.branch_deriv;
    if (!m.note.empty()) j["note"] = m.note;
    return j;
}

nlohmann::json equilibrium_to_json(const EquilibriumState& e) {
    nlohmann::json j;
    j["measure"] = e.measure;
    j["pressure"] = e.pressure;
    j["entropy"] = e.entropy;
    j["integral"] = e.integral;
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

}  // namespace qel
