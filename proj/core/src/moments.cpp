#include "edist/moments.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace edist {

namespace detail {

namespace {

// Binomial coefficients through order 6.
constexpr double BINOM[7][7] = {
    {1, 0, 0, 0, 0, 0, 0},  {1, 1, 0, 0, 0, 0, 0},   {1, 2, 1, 0, 0, 0, 0},
    {1, 3, 3, 1, 0, 0, 0},  {1, 4, 6, 4, 1, 0, 0},   {1, 5, 10, 10, 5, 1, 0},
    {1, 6, 15, 20, 15, 6, 1},
};

// Pools central sums a[2..pmax] (count na, mean gap delta = mean_b - mean_a)
// with b[2..pmax] (count nb) into out[2..pmax].
inline void merge_central_sums(double na, const double* a, double nb, const double* b,
                               double delta, int pmax, double* out) {
    const double nn = na + nb;
    const double fa = -delta * nb / nn;
    const double fb = delta * na / nn;
    const double g = delta * na * nb / nn;
    for (int p = 2; p <= pmax; ++p) {
        double v = a[p] + b[p];
        double pa = fa;
        double pb = fb;
        for (int k = 1; k <= p - 2; ++k) {
            v += BINOM[p][k] * (pa * a[p - k] + pb * b[p - k]);
            pa *= fa;
            pb *= fb;
        }
        double gp = 1.0;
        for (int t = 0; t < p; ++t) gp *= g;
        double inv_b = 1.0; // 1 / nb^{p-1}
        double inv_a = 1.0; // (-1/na)^{p-1}
        for (int t = 0; t < p - 1; ++t) {
            inv_b /= nb;
            inv_a /= -na;
        }
        out[p] = v + gp * (inv_b - inv_a);
    }
}

} // namespace

MomentAccumulator::MomentAccumulator(std::size_t dim, int ord) : d(dim), order(ord) {
    mean.assign(d, 0.0);
    m2.assign(d, 0.0);
    m3.assign(d, 0.0);
    m4.assign(d, 0.0);
    if (order == 6) {
        m5.assign(d, 0.0);
        m6.assign(d, 0.0);
    }
}

void MomentAccumulator::push_row(const double* row) {
    const int pmax = order;
    if (n == 0) {
        for (std::size_t j = 0; j < d; ++j) mean[j] = row[j];
        n = 1;
        return;
    }
    const double na = static_cast<double>(n);
    double a[7];
    double b[7] = {0, 0, 0, 0, 0, 0, 0};
    double out[7];
    for (std::size_t j = 0; j < d; ++j) {
        a[2] = m2[j];
        a[3] = m3[j];
        a[4] = m4[j];
        if (order == 6) {
            a[5] = m5[j];
            a[6] = m6[j];
        }
        const double delta = row[j] - mean[j];
        merge_central_sums(na, a, 1.0, b, delta, pmax, out);
        m2[j] = out[2];
        m3[j] = out[3];
        m4[j] = out[4];
        if (order == 6) {
            m5[j] = out[5];
            m6[j] = out[6];
        }
        mean[j] += delta / (na + 1.0);
    }
    ++n;
}

void MomentAccumulator::merge_from(const MomentAccumulator& other) {
    if (other.n == 0) {
        return;
    }
    if (n == 0) {
        *this = other;
        return;
    }
    const int pmax = order;
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(other.n);
    double a[7];
    double b[7];
    double out[7];
    for (std::size_t j = 0; j < d; ++j) {
        a[2] = m2[j];
        a[3] = m3[j];
        a[4] = m4[j];
        b[2] = other.m2[j];
        b[3] = other.m3[j];
        b[4] = other.m4[j];
        if (order == 6) {
            a[5] = m5[j];
            a[6] = m6[j];
            b[5] = other.m5[j];
            b[6] = other.m6[j];
        }
        const double delta = other.mean[j] - mean[j];
        merge_central_sums(na, a, nb, b, delta, pmax, out);
        m2[j] = out[2];
        m3[j] = out[3];
        m4[j] = out[4];
        if (order == 6) {
            m5[j] = out[5];
            m6[j] = out[6];
        }
        mean[j] += delta * nb / (na + nb);
    }
    n += other.n;
}

MomentSummary MomentAccumulator::finish() const {
    MomentSummary s;
    s.n = n;
    s.d = d;
    s.order = order;
    s.mean = mean;
    s.s2 = m2;
    s.s3 = m3;
    s.s4 = m4;
    if (order == 6) {
        s.s5 = m5;
        s.s6 = m6;
    }
    return s;
}

} // namespace detail

MomentSummary summarize(const DatasetMatrix& data, int order) {
    if (data.empty()) {
        throw std::invalid_argument("empty input");
    }
    return summarize_rows(data.n, data.d, order, [&](std::size_t i) { return data.row(i); });
}

MomentSummary merge(const MomentSummary& a, const MomentSummary& b) {
    if (a.d != b.d) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(a.d) + " vs " +
                                    std::to_string(b.d));
    }
    if (a.order != b.order) {
        throw std::invalid_argument("order mismatch: " + std::to_string(a.order) + " vs " +
                                    std::to_string(b.order));
    }
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    detail::MomentAccumulator acc(a.d, a.order);
    acc.n = a.n;
    acc.mean = a.mean;
    acc.m2 = a.s2;
    acc.m3 = a.s3;
    acc.m4 = a.s4;
    detail::MomentAccumulator other(b.d, b.order);
    other.n = b.n;
    other.mean = b.mean;
    other.m2 = b.s2;
    other.m3 = b.s3;
    other.m4 = b.s4;
    if (a.order == 6) {
        acc.m5 = a.s5;
        acc.m6 = a.s6;
        other.m5 = b.s5;
        other.m6 = b.s6;
    }
    acc.merge_from(other);
    return acc.finish();
}

double sixth_cumulant(double m2, double m3, double m4, double m6) {
    return m6 - 15.0 * m4 * m2 - 10.0 * m3 * m3 + 30.0 * m2 * m2 * m2;
}

DerivedMoments derived_moments(const MomentSummary& s, std::size_t i) {
    if (i >= s.d) {
        throw std::invalid_argument("feature index out of range");
    }
    if (s.n < 2) {
        throw std::invalid_argument("insufficient samples for variance");
    }
    DerivedMoments out;
    const double n = static_cast<double>(s.n);
    out.mean = s.mean[i];
    const double var = s.s2[i] / n;
    out.variance = var < 0.0 ? 0.0 : var;
    if (out.variance <= 0.0) {
        out.degenerate = true;
        if (s.order == 6) {
            out.sixth_cumulant = 0.0;
        }
        return out;
    }
    const double sigma = std::sqrt(out.variance);
    out.skewness = (s.s3[i] / n) / (sigma * sigma * sigma);
    out.kurtosis_excess = (s.s4[i] / n) / (out.variance * out.variance) - 3.0;
    if (s.order == 6) {
        out.sixth_cumulant =
            sixth_cumulant(out.variance, s.s3[i] / n, s.s4[i] / n, s.s6[i] / n);
    }
    return out;
}

std::string to_json_string(const MomentSummary& s) {
    nlohmann::json j;
    j["n"] = s.n;
    j["d"] = s.d;
    j["order"] = s.order;
    j["mean"] = s.mean;
    j["s2"] = s.s2;
    j["s3"] = s.s3;
    j["s4"] = s.s4;
    if (s.order == 6) {
        j["s5"] = s.s5;
        j["s6"] = s.s6;
    }
    return j.dump();
}

namespace {

std::vector<double> require_array(const nlohmann::json& j, const char* key, std::size_t d) {
    if (!j.contains(key) || !j[key].is_array()) {
        throw std::runtime_error(std::string("summary field '") + key +
                                 "' missing or not an array");
    }
    std::vector<double> out;
    out.reserve(j[key].size());
    for (const auto& v : j[key]) {
        if (!v.is_number()) {
            throw std::runtime_error(std::string("summary field '") + key +
                                     "' holds a non-numeric entry");
        }
        out.push_back(v.get<double>());
    }
    if (out.size() != d) {
        throw std::runtime_error(std::string("summary field '") + key + "' has length " +
                                 std::to_string(out.size()) + ", expected " +
                                 std::to_string(d));
    }
    return out;
}

} // namespace

MomentSummary summary_from_json_string(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw std::runtime_error("malformed summary JSON");
    }
    MomentSummary s;
    if (!j.contains("n") || !j["n"].is_number_unsigned()) {
        throw std::runtime_error("summary field 'n' missing or invalid");
    }
    if (!j.contains("d") || !j["d"].is_number_unsigned()) {
        throw std::runtime_error("summary field 'd' missing or invalid");
    }
    if (!j.contains("order") || !j["order"].is_number_integer()) {
        throw std::runtime_error("summary field 'order' missing or invalid");
    }
    s.n = j["n"].get<std::uint64_t>();
    s.d = j["d"].get<std::size_t>();
    s.order = j["order"].get<int>();
    if (s.order != 4 && s.order != 6) {
        throw std::runtime_error("summary order must be 4 or 6");
    }
    if (s.d == 0) {
        throw std::runtime_error("summary dimension must be positive");
    }
    s.mean = require_array(j, "mean", s.d);
    s.s2 = require_array(j, "s2", s.d);
    s.s3 = require_array(j, "s3", s.d);
    s.s4 = require_array(j, "s4", s.d);
    if (s.order == 6) {
        s.s5 = require_array(j, "s5", s.d);
        s.s6 = require_array(j, "s6", s.d);
    }
    return s;
}

} // namespace edist
