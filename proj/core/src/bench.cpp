#include "edist/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "edist/rng.hpp"

namespace edist {

namespace {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base ^ mix64((index + 1) * Stream::GOLDEN));
}

std::string flags_token(const EstimateFlags& f) {
    std::string out;
    auto add = [&out](const char* name) {
        if (!out.empty()) out.push_back('|');
        out += name;
    };
    if (f.clamped_nonneg) add("clamped_nonneg");
    if (f.clamped_unit) add("clamped_unit");
    if (f.degenerate) add("degenerate");
    return out;
}

nlohmann::json flags_json(const EstimateFlags& f) {
    return {{"clamped_nonneg", f.clamped_nonneg},
            {"clamped_unit", f.clamped_unit},
            {"degenerate", f.degenerate}};
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Quotes a CSV field when it contains a comma, quote, or newline.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::size_t require_positive_size(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
        throw std::runtime_error("config key '" + key + "' must be a positive integer");
    }
    return v.get<std::size_t>();
}

} // namespace

BenchConfig config_from_json_string(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw std::runtime_error("bench config must be a JSON object");
    }
    static const std::set<std::string> known = {
        "distributions", "pairs", "sizes", "methods", "d", "repetitions", "seed", "threads"};
    for (const auto& item : j.items()) {
        if (!known.contains(item.key())) {
            throw std::runtime_error("unknown config key: " + item.key());
        }
    }
    BenchConfig c;
    if (!j.contains("distributions") || !j["distributions"].is_array() ||
        j["distributions"].empty()) {
        throw std::runtime_error("config key 'distributions' must be a non-empty array");
    }
    for (const auto& v : j["distributions"]) {
        if (!v.is_string()) {
            throw std::runtime_error("distributions entries must be strings");
        }
        c.distributions.push_back(DistributionSpec::parse(v.get<std::string>()));
    }
    if (j.contains("pairs")) {
        if (!j["pairs"].is_array()) {
            throw std::runtime_error("config key 'pairs' must be an array of [i, j] pairs");
        }
        for (const auto& p : j["pairs"]) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() ||
                !p[1].is_number_unsigned()) {
                throw std::runtime_error("config key 'pairs' must be an array of [i, j] pairs");
            }
            const auto a = p[0].get<std::size_t>();
            const auto b = p[1].get<std::size_t>();
            if (a >= c.distributions.size() || b >= c.distributions.size()) {
                throw std::runtime_error("pair index out of range");
            }
            c.pairs.emplace_back(a, b);
        }
    }
    if (c.pairs.empty()) {
        for (std::size_t i = 0; i < c.distributions.size(); ++i) {
            c.pairs.emplace_back(i, i);
        }
    }
    if (j.contains("sizes")) {
        if (!j["sizes"].is_array() || j["sizes"].empty()) {
            throw std::runtime_error("config key 'sizes' must be a non-empty array");
        }
        c.sizes.clear();
        for (const auto& v : j["sizes"]) {
            c.sizes.push_back(require_positive_size(v, "sizes"));
        }
    }
    if (j.contains("methods")) {
        if (!j["methods"].is_array() || j["methods"].empty()) {
            throw std::runtime_error("config key 'methods' must be a non-empty array");
        }
        c.methods.clear();
        for (const auto& v : j["methods"]) {
            if (!v.is_string()) {
                throw std::runtime_error("methods entries must be strings");
            }
            c.methods.push_back(method_from_string(v.get<std::string>()));
        }
    }
    if (j.contains("d")) {
        c.d = require_positive_size(j["d"], "d");
    }
    if (j.contains("repetitions")) {
        c.repetitions = static_cast<int>(require_positive_size(j["repetitions"], "repetitions"));
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) {
            throw std::runtime_error("config key 'seed' must be a non-negative integer");
        }
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("threads")) {
        c.threads = static_cast<int>(require_positive_size(j["threads"], "threads"));
    }
    return c;
}

BenchReport run_bench(const BenchConfig& config) {
    BenchReport report;
    report.config = config;
    std::uint64_t row_counter = 0;
    for (const auto& [ia, ib] : config.pairs) {
        const DistributionSpec& da = config.distributions[ia];
        const DistributionSpec& db = config.distributions[ib];
        for (const std::size_t n : config.sizes) {
            for (const Method method : config.methods) {
                std::vector<double> hs;
                std::vector<std::int64_t> times;
                hs.reserve(static_cast<std::size_t>(config.repetitions));
                times.reserve(static_cast<std::size_t>(config.repetitions));
                for (int rep = 0; rep < config.repetitions; ++rep) {
                    const std::uint64_t row_seed = derive_seed(config.seed, row_counter);
                    ++row_counter;
                    const DatasetMatrix xa = sample(da, n, config.d, derive_seed(row_seed, 0));
                    const DatasetMatrix xb = sample(db, n, config.d, derive_seed(row_seed, 1));
                    if (rep == 0) {
                        (void)energy_estimate(xa, xb, method, config.threads); // warm-up
                    }
                    const DistanceEstimate est =
                        energy_estimate(xa, xb, method, config.threads);
                    BenchRow row;
                    row.dist_a = da.to_string();
                    row.dist_b = db.to_string();
                    row.n = n;
                    row.method = method;
                    row.rep = rep;
                    row.h = est.h.value_or(0.0);
                    row.flags = est.flags;
                    row.seed = row_seed;
                    row.elapsed_ns = est.elapsed.count();
                    hs.push_back(row.h);
                    times.push_back(row.elapsed_ns);
                    report.rows.push_back(std::move(row));
                }
                BenchCell cell;
                cell.dist_a = da.to_string();
                cell.dist_b = db.to_string();
                cell.n = n;
                cell.method = method;
                double hsum = 0.0;
                std::int64_t tsum = 0;
                for (const double h : hs) hsum += h;
                for (const std::int64_t t : times) tsum += t;
                cell.mean_h = hsum / static_cast<double>(hs.size());
                cell.mean_elapsed_ns = tsum / static_cast<std::int64_t>(times.size());
                std::sort(times.begin(), times.end());
                const std::size_t mid = times.size() / 2;
                cell.median_elapsed_ns = (times.size() % 2 == 1)
                                             ? times[mid]
                                             : (times[mid - 1] + times[mid]) / 2;
                report.cells.push_back(std::move(cell));
            }
        }
    }
    return report;
}

std::string report_to_json_string(const BenchReport& r) {
    nlohmann::json j;
    nlohmann::json cfg;
    nlohmann::json dists = nlohmann::json::array();
    for (const auto& d : r.config.distributions) {
        dists.push_back(d.to_string());
    }
    cfg["distributions"] = std::move(dists);
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [a, b] : r.config.pairs) {
        pairs.push_back({a, b});
    }
    cfg["pairs"] = std::move(pairs);
    cfg["sizes"] = r.config.sizes;
    nlohmann::json methods = nlohmann::json::array();
    for (const Method m : r.config.methods) {
        methods.push_back(to_string(m));
    }
    cfg["methods"] = std::move(methods);
    cfg["d"] = r.config.d;
    cfg["repetitions"] = r.config.repetitions;
    cfg["seed"] = r.config.seed;
    cfg["threads"] = r.config.threads;
    j["config"] = std::move(cfg);

    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"dist_a", row.dist_a},
                        {"dist_b", row.dist_b},
                        {"n", row.n},
                        {"method", to_string(row.method)},
                        {"rep", row.rep},
                        {"h", row.h},
                        {"flags", flags_json(row.flags)},
                        {"seed", row.seed},
                        {"elapsed_ns", row.elapsed_ns}});
    }
    j["rows"] = std::move(rows);

    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : r.cells) {
        cells.push_back({{"dist_a", cell.dist_a},
                         {"dist_b", cell.dist_b},
                         {"n", cell.n},
                         {"method", to_string(cell.method)},
                         {"mean_h", cell.mean_h},
                         {"mean_elapsed_ns", cell.mean_elapsed_ns},
                         {"median_elapsed_ns", cell.median_elapsed_ns}});
    }
    j["cells"] = std::move(cells);
    return j.dump();
}

std::string report_to_csv_string(const BenchReport& r) {
    std::ostringstream out;
    out << "dist_a,dist_b,n,method,rep,h,flags,seed,elapsed_ns\n";
    for (const auto& row : r.rows) {
        out << csv_field(row.dist_a) << ',' << csv_field(row.dist_b) << ',' << row.n
            << ',' << to_string(row.method) << ',' << row.rep << ','
            << format_double(row.h) << ',' << flags_token(row.flags) << ',' << row.seed
            << ',' << row.elapsed_ns << '\n';
    }
    return out.str();
}

std::int64_t time_median_ns(const std::function<void()>& fn, int reps) {
    if (reps < 1) {
        throw std::invalid_argument("repetitions must be positive");
    }
    fn(); // warm-up
    std::vector<std::int64_t> times;
    times.reserve(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    const std::size_t mid = times.size() / 2;
    return (times.size() % 2 == 1) ? times[mid] : (times[mid - 1] + times[mid]) / 2;
}

} // namespace edist
