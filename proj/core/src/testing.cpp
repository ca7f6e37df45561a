#include "edist/testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "edist/empirical.hpp"
#include "edist/rng.hpp"

namespace edist {

namespace {

// Largest pooled size for which the full distance matrix is cached; beyond
// it each replicate recomputes pair sums streamingly.
constexpr std::size_t MATRIX_CACHE_LIMIT = 4096;

struct PooledDistances {
    std::size_t total = 0;
    std::vector<double> matrix;   // total*total when cached, else empty
    std::vector<double> row_sums; // per pooled row
    double grand_total = 0.0;     // sum over all ordered pairs
    const DatasetMatrix* pooled = nullptr;

    bool cached() const { return !matrix.empty(); }

    double dist(std::size_t i, std::size_t j) const {
        if (cached()) {
            return matrix[i * total + j];
        }
        double acc = 0.0;
        const double* a = pooled->row(i);
        const double* b = pooled->row(j);
        for (std::size_t k = 0; k < pooled->d; ++k) {
            const double diff = a[k] - b[k];
            acc += diff * diff;
        }
        return std::sqrt(acc);
    }
};

// Energy statistic scaled by n*m/(n+m), evaluated for the subset `group_a`
// (size n) of the pooled rows via within/cross pair sums.
double scaled_statistic(const PooledDistances& p, const std::vector<std::uint32_t>& group_a,
                        std::size_t n, std::size_t m) {
    double within_a_upper = 0.0;
    for (std::size_t u = 0; u < group_a.size(); ++u) {
        for (std::size_t v = u + 1; v < group_a.size(); ++v) {
            within_a_upper += p.dist(group_a[u], group_a[v]);
        }
    }
    const double s_a = 2.0 * within_a_upper;
    double r_a = 0.0;
    for (const auto i : group_a) {
        r_a += p.row_sums[i];
    }
    const double s_ab = r_a - s_a;                        // ordered cross pairs a->b
    const double s_b = p.grand_total - 2.0 * r_a + s_a;   // ordered pairs within b
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    const double e = 2.0 * s_ab / (dn * dm) - s_a / (dn * dn) - s_b / (dm * dm);
    return dn * dm / (dn + dm) * e;
}

} // namespace

TestResult permutation_test(const DatasetMatrix& x, const DatasetMatrix& y, std::uint64_t B,
                            std::uint64_t seed) {
    validate_matrix(x);
    validate_matrix(y);
    require_same_dim(x, y);
    if (B < 99) {
        throw std::invalid_argument("insufficient permutations");
    }
    const std::size_t n = x.n;
    const std::size_t m = y.n;
    const std::size_t total = n + m;

    // Canonical pooled ordering: rows sorted lexicographically, labels
    // attached, making the whole result invariant to input row order.
    std::vector<std::pair<std::vector<double>, std::uint8_t>> tagged;
    tagged.reserve(total);
    for (std::size_t i = 0; i < n; ++i) {
        tagged.emplace_back(std::vector<double>(x.row(i), x.row(i) + x.d), 0);
    }
    for (std::size_t j = 0; j < m; ++j) {
        tagged.emplace_back(std::vector<double>(y.row(j), y.row(j) + y.d), 1);
    }
    std::stable_sort(tagged.begin(), tagged.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    DatasetMatrix pooled(total, x.d);
    std::vector<std::uint32_t> observed_a; // pooled positions of the x rows
    observed_a.reserve(n);
    for (std::size_t i = 0; i < total; ++i) {
        std::copy(tagged[i].first.begin(), tagged[i].first.end(), pooled.row(i));
        if (tagged[i].second == 0) {
            observed_a.push_back(static_cast<std::uint32_t>(i));
        }
    }

    PooledDistances p;
    p.total = total;
    p.pooled = &pooled;
    p.row_sums.assign(total, 0.0);
    if (total <= MATRIX_CACHE_LIMIT) {
        p.matrix.assign(total * total, 0.0);
        for (std::size_t i = 0; i < total; ++i) {
            for (std::size_t j = i + 1; j < total; ++j) {
                double acc = 0.0;
                const double* a = pooled.row(i);
                const double* b = pooled.row(j);
                for (std::size_t k = 0; k < pooled.d; ++k) {
                    const double diff = a[k] - b[k];
                    acc += diff * diff;
                }
                const double dv = std::sqrt(acc);
                p.matrix[i * total + j] = dv;
                p.matrix[j * total + i] = dv;
            }
        }
    }
    for (std::size_t i = 0; i < total; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < total; ++j) {
            if (j != i) acc += p.dist(i, j);
        }
        p.row_sums[i] = acc;
        p.grand_total += acc;
    }

    // Replicates enumerate the smaller group for the subset pair sums.
    const bool enumerate_x = n <= m;
    const std::size_t g = enumerate_x ? n : m;

    const double observed = scaled_statistic(p, observed_a, n, m);

    std::vector<std::uint32_t> indices(total);
    std::vector<std::uint32_t> group(g);
    std::uint64_t count_ge = 0;
    for (std::uint64_t b = 0; b < B; ++b) {
        std::iota(indices.begin(), indices.end(), 0u);
        Stream rng(seed, b + 1);
        // Fisher-Yates prefix: after g steps the first g entries are a
        // uniform subset in uniform order.
        for (std::size_t i = 0; i < g; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(
                                          rng.next_u64() % static_cast<std::uint64_t>(total - i));
            std::swap(indices[i], indices[j]);
        }
        group.assign(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(g));
        const double stat = enumerate_x ? scaled_statistic(p, group, n, m)
                                        : scaled_statistic(p, group, m, n);
        if (stat >= observed) {
            ++count_ge;
        }
    }

    TestResult r;
    r.statistic = observed;
    r.permutations = B;
    r.seed = seed;
    r.p_value = static_cast<double>(1 + count_ge) / static_cast<double>(B + 1);
    for (auto& [alpha, reject] : r.reject_at) {
        reject = r.p_value <= alpha;
    }
    return r;
}

std::string to_json_string(const TestResult& r) {
    nlohmann::json j;
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value;
    j["permutations"] = r.permutations;
    j["seed"] = r.seed;
    nlohmann::json rej = nlohmann::json::object();
    char buf[8];
    for (const auto& [alpha, reject] : r.reject_at) {
        std::snprintf(buf, sizeof(buf), "%.2f", alpha);
        rej[buf] = reject;
    }
    j["reject_at"] = rej;
    return j.dump();
}

} // namespace edist
