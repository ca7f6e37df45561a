#include "edist/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>
#include <vector>

#include <json.hpp>

#include "edist/approx.hpp"
#include "edist/moments.hpp"

namespace edist {

std::string to_string(Method m) {
    switch (m) {
        case Method::empirical: return "empirical";
        case Method::taylor: return "taylor";
        case Method::gaussian_exact: return "gaussian_exact";
        case Method::adjusted: return "adjusted";
    }
    return "empirical";
}

Method method_from_string(const std::string& name) {
    if (name == "empirical") return Method::empirical;
    if (name == "taylor") return Method::taylor;
    if (name == "gaussian_exact") return Method::gaussian_exact;
    if (name == "adjusted") return Method::adjusted;
    throw std::invalid_argument("unknown method: " + name);
}

namespace detail {

namespace {

constexpr std::size_t BLOCK_ROWS = 128;

inline double row_distance(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double diff = a[k] - b[k];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

inline double row_distance_sq(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double diff = a[k] - b[k];
        acc += diff * diff;
    }
    return acc;
}

// Fixed-order compensated reduction of the per-task partial sums; the partial
// vector is indexed by task, so the result is independent of thread count.
double kahan_total(const std::vector<double>& parts) {
    double sum = 0.0;
    double c = 0.0;
    for (double p : parts) {
        const double y = p - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// Runs tasks [0, count) over `threads` workers with a static partition and
// collects one partial sum per task.
template <class TaskFn>
double run_partials(std::size_t count, int threads, TaskFn&& task) {
    std::vector<double> parts(count, 0.0);
    const int workers = std::max(1, threads);
    if (workers == 1 || count <= 1) {
        for (std::size_t t = 0; t < count; ++t) parts[t] = task(t);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < count; t += static_cast<std::size_t>(workers)) {
                    parts[t] = task(t);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return kahan_total(parts);
}

template <bool Squared>
double cross_sum(const DatasetMatrix& x, const DatasetMatrix& y, int threads) {
    const std::size_t bx = (x.n + BLOCK_ROWS - 1) / BLOCK_ROWS;
    const std::size_t by = (y.n + BLOCK_ROWS - 1) / BLOCK_ROWS;
    return run_partials(bx * by, threads, [&](std::size_t t) {
        const std::size_t bi = t / by;
        const std::size_t bj = t % by;
        const std::size_t i0 = bi * BLOCK_ROWS;
        const std::size_t i1 = std::min(i0 + BLOCK_ROWS, x.n);
        const std::size_t j0 = bj * BLOCK_ROWS;
        const std::size_t j1 = std::min(j0 + BLOCK_ROWS, y.n);
        double acc = 0.0;
        for (std::size_t i = i0; i < i1; ++i) {
            const double* xi = x.row(i);
            for (std::size_t j = j0; j < j1; ++j) {
                acc += Squared ? row_distance_sq(xi, y.row(j), x.d)
                               : row_distance(xi, y.row(j), x.d);
            }
        }
        return acc;
    });
}

// Ordered within-pair sum: twice the strict upper triangle, accumulated over
// the upper-triangle blocks in a fixed order.
template <bool Squared>
double within_sum(const DatasetMatrix& x, int threads) {
    const std::size_t b = (x.n + BLOCK_ROWS - 1) / BLOCK_ROWS;
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    blocks.reserve(b * (b + 1) / 2);
    for (std::size_t bi = 0; bi < b; ++bi) {
        for (std::size_t bj = bi; bj < b; ++bj) {
            blocks.emplace_back(bi, bj);
        }
    }
    const double upper = run_partials(blocks.size(), threads, [&](std::size_t t) {
        const auto [bi, bj] = blocks[t];
        const std::size_t i0 = bi * BLOCK_ROWS;
        const std::size_t i1 = std::min(i0 + BLOCK_ROWS, x.n);
        const std::size_t j0 = bj * BLOCK_ROWS;
        const std::size_t j1 = std::min(j0 + BLOCK_ROWS, x.n);
        double acc = 0.0;
        for (std::size_t i = i0; i < i1; ++i) {
            const double* xi = x.row(i);
            const std::size_t js = (bi == bj) ? i + 1 : j0;
            for (std::size_t j = js; j < j1; ++j) {
                acc += Squared ? row_distance_sq(xi, x.row(j), x.d)
                               : row_distance(xi, x.row(j), x.d);
            }
        }
        return acc;
    });
    return 2.0 * upper;
}

// True when both matrices hold exactly the same values in the same layout.
bool same_content(const DatasetMatrix& x, const DatasetMatrix& y) {
    return x.n == y.n && x.d == y.d && x.values == y.values;
}

// Orders the pair (x, y) canonically by content so the statistic is exactly
// symmetric: returns true when the canonical order is (y, x).
bool canonical_swap(const DatasetMatrix& x, const DatasetMatrix& y) {
    if (x.n != y.n) return x.n > y.n;
    return std::lexicographical_compare(y.values.begin(), y.values.end(),
                                        x.values.begin(), x.values.end());
}

} // namespace

double sum_cross_distance(const DatasetMatrix& x, const DatasetMatrix& y, int threads) {
    return cross_sum<false>(x, y, threads);
}

double sum_within_distance(const DatasetMatrix& x, int threads) {
    return within_sum<false>(x, threads);
}

void attach_coefficient(DistanceEstimate& e) {
    const double denom = 2.0 * e.e_xy;
    if (denom < 1e-12) {
        if (std::abs(e.value) < 1e-12) {
            e.h = 0.0;
            e.flags.degenerate = true;
            return;
        }
        throw std::invalid_argument("identical degenerate inputs");
    }
    double h = e.value / denom;
    if (h < 0.0) {
        if (h < -1e-6) e.flags.clamped_nonneg = true;
        h = 0.0;
    } else if (h > 1.0) {
        if (h > 1.0 + 1e-6) e.flags.clamped_unit = true;
        h = 1.0;
    }
    e.h = h;
}

} // namespace detail

double mean_pairwise_distance(const DatasetMatrix& x, const DatasetMatrix& y, int threads) {
    validate_matrix(x);
    validate_matrix(y);
    require_same_dim(x, y);
    return detail::cross_sum<false>(x, y, threads) /
           (static_cast<double>(x.n) * static_cast<double>(y.n));
}

DistanceEstimate energy_statistic(const DatasetMatrix& x, const DatasetMatrix& y,
                                  int threads) {
    validate_matrix(x);
    validate_matrix(y);
    require_same_dim(x, y);
    const auto start = std::chrono::steady_clock::now();
    DistanceEstimate e;
    e.method = Method::empirical;
    if (detail::same_content(x, y)) {
        // One within-pass serves all three terms, so the statistic cancels to
        // exactly zero for identical samples.
        const double nn = static_cast<double>(x.n) * static_cast<double>(x.n);
        const double within = detail::within_sum<false>(x, threads) / nn;
        e.e_xy = within;
        e.e_xx = within;
        e.e_yy = within;
        e.value = 0.0;
    } else {
        const bool swap = detail::canonical_swap(x, y);
        const DatasetMatrix& a = swap ? y : x;
        const DatasetMatrix& b = swap ? x : y;
        const double na = static_cast<double>(a.n);
        const double nb = static_cast<double>(b.n);
        const double e_ab = detail::cross_sum<false>(a, b, threads) / (na * nb);
        const double e_aa = detail::within_sum<false>(a, threads) / (na * na);
        const double e_bb = detail::within_sum<false>(b, threads) / (nb * nb);
        e.e_xy = e_ab;
        e.e_xx = swap ? e_bb : e_aa;
        e.e_yy = swap ? e_aa : e_bb;
        e.value = 2.0 * e_ab - e_aa - e_bb;
    }
    e.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::steady_clock::now() - start);
    return e;
}

DistanceEstimate energy_estimate(const DatasetMatrix& x, const DatasetMatrix& y,
                                 Method method, int threads) {
    if (method == Method::empirical) {
        DistanceEstimate e = energy_statistic(x, y, threads);
        detail::attach_coefficient(e);
        return e;
    }
    validate_matrix(x);
    validate_matrix(y);
    require_same_dim(x, y);
    const auto start = std::chrono::steady_clock::now();
    const MomentSummary sx = summarize(x, 4);
    const MomentSummary sy = summarize(y, 4);
    DistanceEstimate e = energy_from_summaries(sx, sy, method);
    e.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::steady_clock::now() - start);
    return e;
}

double energy_coefficient(const DatasetMatrix& x, const DatasetMatrix& y, Method method,
                          int threads) {
    return *energy_estimate(x, y, method, threads).h;
}

double quadratic_distance(const DatasetMatrix& x, const DatasetMatrix& y, int threads) {
    validate_matrix(x);
    validate_matrix(y);
    require_same_dim(x, y);
    if (detail::same_content(x, y)) {
        return 0.0;
    }
    const double n = static_cast<double>(x.n);
    const double m = static_cast<double>(y.n);
    const double e_xy = detail::cross_sum<true>(x, y, threads) / (n * m);
    const double e_xx = detail::within_sum<true>(x, threads) / (n * n);
    const double e_yy = detail::within_sum<true>(y, threads) / (m * m);
    return 2.0 * e_xy - e_xx - e_yy;
}

std::string to_json_string(const DistanceEstimate& e) {
    nlohmann::json j;
    j["method"] = to_string(e.method);
    j["e_xy"] = e.e_xy;
    j["e_xx"] = e.e_xx;
    j["e_yy"] = e.e_yy;
    j["d2"] = e.value;
    if (e.h) {
        j["h"] = *e.h;
    }
    j["flags"] = {{"clamped_nonneg", e.flags.clamped_nonneg},
                  {"clamped_unit", e.flags.clamped_unit},
                  {"degenerate", e.flags.degenerate}};
    j["elapsed_ns"] = e.elapsed.count();
    return j.dump();
}

} // namespace edist
