#include "qel/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "qel/util.hpp"

namespace qel {

ConditionedEstimate run_conditioned(const MapSystem& map, const NoiseKernel& kernel,
                                    const WeightFunction& weight,
                                    const std::function<double(const State&)>& h,
                                    const std::vector<State>& initial, int n, int N,
                                    std::uint64_t seed, const SimulateOptions& opts) {
    if (n < 1) throw std::invalid_argument("run_conditioned: n < 1");
    if (N < 100) throw std::invalid_argument("run_conditioned: N < 100");
    if (initial.empty()) throw std::invalid_argument("run_conditioned: empty initial law");

    std::mt19937_64 rng(seed);
    std::vector<State> pos(N);
    for (int i = 0; i < N; ++i) pos[i] = initial[i % initial.size()];
    std::vector<double> logw(N, 0.0), acc_h(N, 0.0);
    std::vector<int> root(N);  // founding lineage, survives resampling
    for (int i = 0; i < N; ++i) root[i] = i;
    std::vector<char> alive(N, 1);
    double log_norm = 0.0;
    ConditionedEstimate est;
    est.n = n;
    est.N = N;
    est.ess_min = double(N);
    std::vector<double> hist;
    hist.push_back(1.0);

    std::ofstream trace;
    if (!opts.trace_csv_path.empty()) {
        trace.open(opts.trace_csv_path);
        trace << "n,lambda_hat_running,estimate_running,ess\n";
    }

    std::vector<double> w(N);
    auto weights_now = [&](double& wsum, double& wsq, double& wmaxlog) {
        wmaxlog = -1e300;
        for (int i = 0; i < N; ++i)
            if (alive[i]) wmaxlog = std::max(wmaxlog, logw[i]);
        wsum = wsq = 0.0;
        for (int i = 0; i < N; ++i) {
            w[i] = alive[i] ? std::exp(logw[i] - wmaxlog) : 0.0;
            wsum += w[i];
            wsq += w[i] * w[i];
        }
    };

    int steps_done = 0;
    for (int step = 0; step < n; ++step) {
        // accrue the observable and the soft-killing weight at X_step
        for (int i = 0; i < N; ++i) {
            if (!alive[i]) continue;
            acc_h[i] += h(pos[i]);
            logw[i] += weight(pos[i]);
        }
        double wsum, wsq, wmaxlog;
        weights_now(wsum, wsq, wmaxlog);
        if (wsum <= 0.0) {
            est.extinct = true;
            break;
        }
        double ess = wsum * wsum / wsq;
        est.ess_min = std::min(est.ess_min, ess);
        if (trace.is_open()) {
            double run_est = 0.0;
            for (int i = 0; i < N; ++i) run_est += w[i] * acc_h[i] / (step + 1);
            run_est /= wsum;
            double run_lam =
                std::exp((log_norm + wmaxlog + std::log(wsum / N)) / double(step + 1));
            trace << step + 1 << ',' << fmt_double(run_lam) << ',' << fmt_double(run_est) << ','
                  << fmt_double(ess) << '\n';
        }
        if (ess < 0.5 * N) {
            // multinomial resampling; fold the mean weight into log_norm
            log_norm += wmaxlog + std::log(wsum / N);
            std::discrete_distribution<int> pick(w.begin(), w.end());
            std::vector<State> np(N);
            std::vector<double> na(N);
            std::vector<int> nr(N);
            for (int i = 0; i < N; ++i) {
                int j = pick(rng);
                np[i] = pos[j];
                na[i] = acc_h[j];
                nr[i] = root[j];
            }
            pos.swap(np);
            acc_h.swap(na);
            root.swap(nr);
            std::fill(logw.begin(), logw.end(), 0.0);
            std::fill(alive.begin(), alive.end(), char(1));
        }
        // hard-killing transition
        int live = 0;
        for (int i = 0; i < N; ++i) {
            if (!alive[i]) continue;
            auto next = sample_step(map, kernel, pos[i], rng);
            if (next) {
                pos[i] = *next;
                ++live;
            } else {
                alive[i] = 0;
            }
        }
        hist.push_back(double(live) / N);
        ++steps_done;
        if (live == 0) {
            est.extinct = true;
            break;
        }
    }

    if (est.extinct) {
        est.survival_hist = hist;
        return est;
    }

    double wsum, wsq, wmaxlog;
    weights_now(wsum, wsq, wmaxlog);
    est.lambda_hat = std::exp((log_norm + wmaxlog + std::log(wsum / N)) / double(n));
    double value = 0.0;
    for (int i = 0; i < N; ++i) value += w[i] * acc_h[i] / double(n);
    value /= wsum;
    est.value = value;

    // Bootstrap over founding lineages: after resampling, particles sharing
    // a root ancestor are strongly correlated, so the iid unit is the
    // lineage, not the particle.
    std::vector<double> fam_num(N, 0.0), fam_den(N, 0.0);
    for (int i = 0; i < N; ++i) {
        fam_num[root[i]] += w[i] * acc_h[i] / double(n);
        fam_den[root[i]] += w[i];
    }
    std::vector<double> reps(opts.bootstrap_reps);
    std::uniform_int_distribution<int> unif(0, N - 1);
    for (int b = 0; b < opts.bootstrap_reps; ++b) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < N; ++i) {
            int j = unif(rng);
            num += fam_num[j];
            den += fam_den[j];
        }
        reps[b] = den > 0.0 ? num / den : 0.0;
    }
    double mean = 0.0;
    for (double r : reps) mean += r;
    mean /= reps.size();
    double var = 0.0;
    for (double r : reps) var += (r - mean) * (r - mean);
    est.stderr_ = std::sqrt(var / std::max<size_t>(1, reps.size() - 1));
    if (opts.record_survival) est.survival_hist = hist;
    return est;
}

std::vector<double> survival_curve(const MapSystem& map, const NoiseKernel& kernel,
                                   const std::vector<State>& initial, int n_max, int N,
                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<State> pos(N);
    for (int i = 0; i < N; ++i) pos[i] = initial[i % initial.size()];
    std::vector<char> alive(N, 1);
    std::vector<double> out;
    out.push_back(1.0);
    for (int step = 0; step < n_max; ++step) {
        int live = 0;
        for (int i = 0; i < N; ++i) {
            if (!alive[i]) continue;
            auto next = sample_step(map, kernel, pos[i], rng);
            if (next) {
                pos[i] = *next;
                ++live;
            } else {
                alive[i] = 0;
            }
        }
        out.push_back(double(live) / N);
    }
    return out;
}

std::vector<State> uniform_over_cells(const CellPartition& partition,
                                      const std::vector<std::uint32_t>& cells, int N,
                                      std::uint64_t seed) {
    if (cells.empty()) throw std::invalid_argument("uniform_over_cells: no cells");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, cells.size() - 1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<State> out(N);
    State lo, hi;
    for (int i = 0; i < N; ++i) {
        partition.bounds(cells[pick(rng)], lo, hi);
        State x{0.0, 0.0};
        for (int a = 0; a < partition.space.dim(); ++a) x[a] = lo[a] + u01(rng) * (hi[a] - lo[a]);
        out[i] = x;
    }
    return out;
}

MapSystem chain_map(const DenseMatrix& rows) {
    const size_t n = rows.size();
    if (n == 0) throw std::invalid_argument("chain_map: empty chain");
    MapSystem m;
    m.id = "chain";
    m.space.kind = SpaceKind::Interval;
    auto table = rows;  // owned copy
    m.eval = [table, n](const State& x) -> State {
        double t = x[0] * double(n);
        auto i = std::min(n - 1, size_t(std::max(0.0, t)));
        double u = t - double(i);
        double cum = 0.0;
        for (size_t j = 0; j < n; ++j) {
            double p = table[i][j];
            if (p > 0.0 && u < cum + p)
                return {(double(j) + (u - cum) / p) / double(n), 0.0};
            cum += p;
        }
        return {2.0, 0.0};  // sub-stochastic deficiency: absorbed
    };
    m.deriv = [table, n](const State& x) {
        double t = x[0] * double(n);
        auto i = std::min(n - 1, size_t(std::max(0.0, t)));
        double u = t - double(i);
        double cum = 0.0;
        for (size_t j = 0; j < n; ++j) {
            double p = table[i][j];
            if (p > 0.0 && u < cum + p) return 1.0 / p;
            cum += p;
        }
        return 1.0;
    };
    return m;
}

}  // namespace qel
