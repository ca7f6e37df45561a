#include "edist/synth.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "edist/rng.hpp"

namespace edist {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& text, const std::string& spec) {
    const std::string t = strip(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || t.empty()) {
        throw std::invalid_argument("invalid distribution spec: " + spec);
    }
    return v;
}

// Splits "a, b" into raw argument strings.
std::vector<std::string> split_args(const std::string& inner) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = inner.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(inner.substr(start));
            return out;
        }
        out.push_back(inner.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string format_number(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

} // namespace

DistributionSpec DistributionSpec::parse(const std::string& text) {
    const std::string t = strip(text);
    const std::size_t open = t.find('(');
    if (open == std::string::npos || t.back() != ')') {
        throw std::invalid_argument("invalid distribution spec: " + text);
    }
    std::string name = strip(t.substr(0, open));
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const std::string inner = t.substr(open + 1, t.size() - open - 2);
    const auto args = split_args(inner);

    DistributionSpec spec;
    auto need = [&](std::size_t k) {
        if (args.size() != k) {
            throw std::invalid_argument("invalid distribution spec: " + text);
        }
    };
    if (name == "normal" || name == "n") {
        need(2);
        spec.family = Family::normal;
        spec.p1 = parse_number(args[0], text);
        spec.p2 = parse_number(args[1], text);
        if (!(spec.p2 > 0.0)) {
            throw std::invalid_argument("normal sigma must be positive: " + text);
        }
    } else if (name == "exponential" || name == "exp") {
        need(1);
        spec.family = Family::exponential;
        std::string a = strip(args[0]);
        // Rate parameterization by default; "scale=theta" selects the scale
        // form (rate = 1/theta).
        if (a.rfind("rate=", 0) == 0) {
            spec.p1 = parse_number(a.substr(5), text);
        } else if (a.rfind("scale=", 0) == 0) {
            const double theta = parse_number(a.substr(6), text);
            if (!(theta > 0.0)) {
                throw std::invalid_argument("exponential scale must be positive: " + text);
            }
            spec.p1 = 1.0 / theta;
        } else {
            spec.p1 = parse_number(a, text);
        }
        if (!(spec.p1 > 0.0)) {
            throw std::invalid_argument("exponential rate must be positive: " + text);
        }
        spec.p2 = 0.0;
    } else if (name == "student_t" || name == "t") {
        need(1);
        spec.family = Family::student_t;
        spec.p1 = parse_number(args[0], text);
        if (!(spec.p1 > 0.0)) {
            throw std::invalid_argument("t degrees of freedom must be positive: " + text);
        }
        spec.p2 = 0.0;
    } else if (name == "beta") {
        need(2);
        spec.family = Family::beta;
        spec.p1 = parse_number(args[0], text);
        spec.p2 = parse_number(args[1], text);
        if (!(spec.p1 > 0.0) || !(spec.p2 > 0.0)) {
            throw std::invalid_argument("beta parameters must be positive: " + text);
        }
    } else if (name == "gamma") {
        need(2);
        spec.family = Family::gamma;
        spec.p1 = parse_number(args[0], text);
        spec.p2 = parse_number(args[1], text);
        if (!(spec.p1 > 0.0) || !(spec.p2 > 0.0)) {
            throw std::invalid_argument("gamma parameters must be positive: " + text);
        }
    } else if (name == "bernoulli") {
        need(1);
        spec.family = Family::bernoulli;
        spec.p1 = parse_number(args[0], text);
        if (!(spec.p1 > 0.0) || !(spec.p1 < 1.0)) {
            throw std::invalid_argument("bernoulli p must lie in (0, 1): " + text);
        }
        spec.p2 = 0.0;
    } else {
        throw std::invalid_argument("unknown distribution family: " + text);
    }
    return spec;
}

std::string DistributionSpec::to_string() const {
    switch (family) {
        case Family::normal:
            return "normal(" + format_number(p1) + "," + format_number(p2) + ")";
        case Family::exponential:
            return "exp(" + format_number(p1) + ")";
        case Family::student_t:
            return "t(" + format_number(p1) + ")";
        case Family::beta:
            return "beta(" + format_number(p1) + "," + format_number(p2) + ")";
        case Family::gamma:
            return "gamma(" + format_number(p1) + "," + format_number(p2) + ")";
        case Family::bernoulli:
            return "bernoulli(" + format_number(p1) + ")";
    }
    return "";
}

TheoreticalMoments theoretical_moments(const DistributionSpec& spec) {
    TheoreticalMoments m;
    switch (spec.family) {
        case Family::normal:
            m.mean = spec.p1;
            m.variance = spec.p2 * spec.p2;
            m.skewness = 0.0;
            m.kurtosis_excess = 0.0;
            return m;
        case Family::exponential: {
            const double beta = spec.p1;
            m.mean = 1.0 / beta;
            m.variance = 1.0 / (beta * beta);
            m.skewness = 2.0;
            m.kurtosis_excess = 6.0;
            return m;
        }
        case Family::student_t: {
            const double df = spec.p1;
            if (df <= 4.0) {
                throw std::invalid_argument("kurtosis undefined");
            }
            m.mean = 0.0;
            m.variance = df / (df - 2.0);
            m.skewness = 0.0;
            m.kurtosis_excess = 6.0 / (df - 4.0);
            return m;
        }
        case Family::beta: {
            const double a = spec.p1;
            const double b = spec.p2;
            const double s = a + b;
            m.mean = a / s;
            m.variance = a * b / (s * s * (s + 1.0));
            m.skewness = 2.0 * (b - a) * std::sqrt(s + 1.0) / ((s + 2.0) * std::sqrt(a * b));
            m.kurtosis_excess = 6.0 * ((a - b) * (a - b) * (s + 1.0) - a * b * (s + 2.0)) /
                                (a * b * (s + 2.0) * (s + 3.0));
            return m;
        }
        case Family::gamma: {
            const double k = spec.p1;
            const double theta = spec.p2;
            m.mean = k * theta;
            m.variance = k * theta * theta;
            m.skewness = 2.0 / std::sqrt(k);
            m.kurtosis_excess = 6.0 / k;
            return m;
        }
        case Family::bernoulli: {
            const double p = spec.p1;
            const double q = 1.0 - p;
            m.mean = p;
            m.variance = p * q;
            m.skewness = (1.0 - 2.0 * p) / std::sqrt(p * q);
            m.kurtosis_excess = (1.0 - 6.0 * p * q) / (p * q);
            return m;
        }
    }
    throw std::invalid_argument("unknown distribution family");
}

DatasetMatrix sample(const DistributionSpec& spec, std::size_t n, std::size_t d,
                     std::uint64_t seed) {
    if (n == 0 || d == 0) {
        throw std::invalid_argument("empty input");
    }
    DatasetMatrix m(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        Stream rng(seed, i);
        double* row = m.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            switch (spec.family) {
                case Family::normal:
                    row[j] = spec.p1 + spec.p2 * rng.normal();
                    break;
                case Family::exponential:
                    row[j] = rng.exponential(spec.p1);
                    break;
                case Family::student_t:
                    row[j] = rng.student_t(spec.p1);
                    break;
                case Family::beta:
                    row[j] = rng.beta(spec.p1, spec.p2);
                    break;
                case Family::gamma:
                    row[j] = rng.gamma(spec.p1, spec.p2);
                    break;
                case Family::bernoulli:
                    row[j] = rng.bernoulli(spec.p1) ? 1.0 : 0.0;
                    break;
            }
        }
    }
    return m;
}

} // namespace edist
