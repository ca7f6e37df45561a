#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "edist/approx.hpp"
#include "edist/bench.hpp"
#include "edist/csv.hpp"
#include "edist/empirical.hpp"
#include "edist/moments.hpp"
#include "edist/proto.hpp"
#include "edist/synth.hpp"
#include "edist/testing.hpp"

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string format = "json";
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path);
    }
    out << text;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text << "\n";
    } else {
        write_file(out_path, text + "\n");
    }
}

bool is_summary_path(const std::string& path) {
    return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

void require_json_format(const GlobalOpts& g, const std::string& subcommand) {
    if (g.format != "json") {
        throw std::runtime_error("csv format not supported for " + subcommand);
    }
}

std::pair<std::string, std::uint16_t> parse_hostport(const std::string& addr) {
    const auto pos = addr.rfind(':');
    if (pos == std::string::npos || pos + 1 == addr.size()) {
        throw std::runtime_error("address must be HOST:PORT: " + addr);
    }
    std::string host = addr.substr(0, pos);
    if (host.empty()) {
        host = "127.0.0.1";
    }
    const unsigned long port = std::stoul(addr.substr(pos + 1));
    if (port > 65535) {
        throw std::runtime_error("invalid port in address: " + addr);
    }
    return {host, static_cast<std::uint16_t>(port)};
}

std::string distance_csv(const edist::DistanceEstimate& e) {
    std::ostringstream out;
    char num[32];
    out << "method,e_xy,e_xx,e_yy,d2,h,flags,elapsed_ns\n";
    out << edist::to_string(e.method) << ',';
    auto put = [&](double v) {
        std::snprintf(num, sizeof(num), "%.17g", v);
        out << num << ',';
    };
    put(e.e_xy);
    put(e.e_xx);
    put(e.e_yy);
    put(e.value);
    if (e.h) {
        std::snprintf(num, sizeof(num), "%.17g", *e.h);
        out << num;
    }
    out << ',';
    std::string flags;
    auto add = [&flags](const char* name) {
        if (!flags.empty()) flags.push_back('|');
        flags += name;
    };
    if (e.flags.clamped_nonneg) add("clamped_nonneg");
    if (e.flags.clamped_unit) add("clamped_unit");
    if (e.flags.degenerate) add("degenerate");
    out << flags << ',' << e.elapsed.count();
    return out.str();
}

int cmd_summarize(const GlobalOpts& g, const std::string& data_path, int order,
                  const std::string& out_path) {
    require_json_format(g, "summarize");
    const edist::DatasetMatrix m = edist::load_csv(data_path);
    const edist::MomentSummary s = edist::summarize(m, order);
    emit(edist::to_json_string(s), out_path);
    return 0;
}

int cmd_distance(const GlobalOpts& g, const std::string& a_path, const std::string& b_path,
                 const std::string& method_name, const std::string& out_path) {
    const edist::Method method = edist::method_from_string(method_name);
    const bool a_summary = is_summary_path(a_path);
    const bool b_summary = is_summary_path(b_path);
    edist::DistanceEstimate est;
    if (a_summary || b_summary) {
        if (method == edist::Method::empirical) {
            throw std::runtime_error("empirical method requires raw data");
        }
        const edist::MomentSummary sa =
            a_summary ? edist::summary_from_json_string(read_file(a_path))
                      : edist::summarize(edist::load_csv(a_path), 4);
        const edist::MomentSummary sb =
            b_summary ? edist::summary_from_json_string(read_file(b_path))
                      : edist::summarize(edist::load_csv(b_path), 4);
        est = edist::energy_from_summaries(sa, sb, method);
    } else {
        const edist::DatasetMatrix x = edist::load_csv(a_path);
        const edist::DatasetMatrix y = edist::load_csv(b_path);
        est = edist::energy_estimate(x, y, method, g.threads);
    }
    if (g.format == "csv") {
        emit(distance_csv(est), out_path);
    } else {
        emit(edist::to_json_string(est), out_path);
    }
    return 0;
}

int cmd_hmatrix(const GlobalOpts& g, const std::vector<std::string>& inputs,
                const std::vector<std::string>& ids, const std::string& method_name,
                const std::string& out_path) {
    require_json_format(g, "hmatrix");
    if (inputs.size() < 2) {
        throw std::runtime_error("need at least 2 nodes");
    }
    if (!ids.empty() && ids.size() != inputs.size()) {
        throw std::runtime_error("--ids must name every input");
    }
    const edist::Method method = edist::method_from_string(method_name);
    edist::Registry registry;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const std::string id = ids.empty() ? inputs[i] : ids[i];
        edist::MomentSummary s =
            is_summary_path(inputs[i])
                ? edist::summary_from_json_string(read_file(inputs[i]))
                : edist::summarize(edist::load_csv(inputs[i]), 4);
        if (!registry.emplace(id, std::move(s)).second) {
            throw std::runtime_error("duplicate node_id: " + id);
        }
    }
    emit(edist::to_json_string(edist::h_matrix(registry, method)), out_path);
    return 0;
}

int cmd_permtest(const GlobalOpts& g, const std::string& a_path, const std::string& b_path,
                 int permutations, const std::string& out_path) {
    require_json_format(g, "permtest");
    const edist::DatasetMatrix x = edist::load_csv(a_path);
    const edist::DatasetMatrix y = edist::load_csv(b_path);
    const edist::TestResult r = edist::permutation_test(x, y, permutations, g.seed);
    emit(edist::to_json_string(r), out_path);
    return 0;
}

int cmd_synth(const GlobalOpts& g, const std::string& dist, std::size_t n, std::size_t d,
              const std::string& out_path) {
    const edist::DistributionSpec spec = edist::DistributionSpec::parse(dist);
    const edist::DatasetMatrix m = edist::sample(spec, n, d, g.seed);
    const std::string text = edist::to_csv_string(m);
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
    return 0;
}

int cmd_bench(const GlobalOpts& g, const std::string& config_path,
              const std::string& out_path) {
    edist::BenchConfig config = config_path.empty()
                                    ? edist::BenchConfig{}
                                    : edist::config_from_json_string(read_file(config_path));
    if (config_path.empty()) {
        config.distributions.push_back(edist::DistributionSpec::parse("normal(0,1)"));
        config.pairs.emplace_back(0, 0);
    }
    config.seed = g.seed;
    config.threads = g.threads;
    const edist::BenchReport report = edist::run_bench(config);
    if (g.format == "csv") {
        const std::string text = edist::report_to_csv_string(report);
        if (out_path.empty() || out_path == "-") {
            std::cout << text;
        } else {
            write_file(out_path, text);
        }
    } else {
        emit(edist::report_to_json_string(report), out_path);
    }
    return 0;
}

int cmd_coordinator(const GlobalOpts& g, const std::string& listen_addr,
                    std::size_t min_nodes, const std::string& method_name,
                    const std::string& out_path, const std::string& port_file) {
    require_json_format(g, "coordinator");
    if (min_nodes < 2) {
        throw std::runtime_error("--min-nodes must be at least 2");
    }
    const edist::Method method = edist::method_from_string(method_name);
    const auto [host, port] = parse_hostport(listen_addr);
    edist::TcpListener listener(host, port);
    if (!port_file.empty()) {
        write_file(port_file, std::to_string(listener.port()) + "\n");
    }
    edist::Coordinator coordinator;
    while (coordinator.node_count() < min_nodes) {
        const auto stream = listener.accept();
        edist::serve_connection(coordinator, *stream);
    }
    listener.close();
    const edist::HMatrix h = edist::h_matrix(coordinator.snapshot(), method);
    write_file(out_path, edist::to_json_string(h) + "\n");
    nlohmann::json done;
    done["ok"] = true;
    done["nodes"] = coordinator.node_count();
    done["out"] = out_path;
    std::cout << done.dump() << "\n";
    return 0;
}

int cmd_node(const GlobalOpts& g, const std::string& connect_addr,
             const std::string& data_path, const std::string& node_id, int order,
             bool digest) {
    require_json_format(g, "node");
    const std::string raw = read_file(data_path);
    const edist::DatasetMatrix m = edist::parse_csv(raw, data_path);
    edist::NodeSummaryMessage msg;
    msg.node_id = node_id;
    msg.summary = edist::summarize(m, order);
    if (digest) {
        msg.sample_digest = edist::fnv1a64_hex(raw);
    }
    const auto [host, port] = parse_hostport(connect_addr);
    const auto stream = edist::tcp_connect(host, port);
    const std::string response = edist::publish_summary(*stream, msg);
    stream->close();
    std::cout << response << "\n";
    const nlohmann::json j = nlohmann::json::parse(response, nullptr, false);
    return (!j.is_discarded() && j.is_object() && j.value("ok", false)) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-distance feature heterogeneity toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Base RNG seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads for pairwise kernels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    std::string data_path, a_path, b_path, method_name = "empirical";
    std::string out_path, dist_spec = "normal(0,1)";
    std::string listen_addr, connect_addr, node_id, port_file, config_path;
    std::vector<std::string> inputs, ids;
    int order = 4;
    int permutations = 999;
    std::size_t synth_n = 1000, synth_d = 1, min_nodes = 2;
    bool digest = false;

    CLI::App* summarize = app.add_subcommand("summarize", "Moment summary of a CSV dataset");
    summarize->add_option("--data", data_path, "Input CSV file")->required();
    summarize->add_option("--order", order, "Highest raw order kept: 4 or 6")
        ->check(CLI::IsMember({4, 6}))
        ->capture_default_str();
    summarize->add_option("--out", out_path, "Output path (default stdout)");

    CLI::App* distance = app.add_subcommand(
        "distance", "Energy distance and normalized coefficient between two inputs");
    distance->add_option("--a", a_path, "First input (.csv data or .json summary)")->required();
    distance->add_option("--b", b_path, "Second input (.csv data or .json summary)")->required();
    distance->add_option("--method", method_name,
                         "empirical | taylor | gaussian_exact | adjusted")
        ->capture_default_str();
    distance->add_option("--out", out_path, "Output path (default stdout)");

    CLI::App* hmatrix = app.add_subcommand(
        "hmatrix", "Pairwise coefficient matrix over several inputs");
    hmatrix->add_option("--inputs", inputs, "Input files (.csv data or .json summaries)")
        ->required()
        ->expected(-2);
    hmatrix->add_option("--ids", ids, "Node ids matching --inputs (default: the paths)");
    hmatrix->add_option("--method", method_name, "Estimation method")->capture_default_str();
    hmatrix->add_option("--out", out_path, "Output path (default stdout)");

    CLI::App* permtest = app.add_subcommand(
        "permtest", "Two-sample permutation test of equal distributions");
    permtest->add_option("--a", a_path, "First sample CSV")->required();
    permtest->add_option("--b", b_path, "Second sample CSV")->required();
    permtest->add_option("--permutations", permutations, "Replicates B (>= 99)")
        ->capture_default_str();
    permtest->add_option("--out", out_path, "Output path (default stdout)");

    CLI::App* synth = app.add_subcommand("synth", "Sample a synthetic dataset to CSV");
    synth->add_option("--dist", dist_spec,
                      "Distribution spec, e.g. normal(0,1), exp(rate=2), t(5)")
        ->capture_default_str();
    synth->add_option("--n", synth_n, "Rows")->capture_default_str();
    synth->add_option("--d", synth_d, "Columns (i.i.d. features)")->capture_default_str();
    synth->add_option("--out", out_path, "Output path (default stdout)");

    CLI::App* bench = app.add_subcommand("bench", "Accuracy/timing grid over distributions");
    bench->add_option("--config", config_path, "JSON config file (see README)");
    bench->add_option("--out", out_path, "Output path (default stdout)");

    CLI::App* coordinator = app.add_subcommand(
        "coordinator", "Collect node summaries over TCP, then write the coefficient matrix");
    coordinator->add_option("--listen", listen_addr, "HOST:PORT (port 0 = ephemeral)")
        ->required();
    coordinator->add_option("--min-nodes", min_nodes, "Nodes to wait for")->required();
    coordinator->add_option("--method", method_name, "Estimation method")
        ->capture_default_str();
    coordinator->add_option("--out", out_path, "Coefficient matrix output file")->required();
    coordinator->add_option("--port-file", port_file,
                            "Write the bound port here once listening");

    CLI::App* node = app.add_subcommand(
        "node", "Summarize a CSV file and publish it to a coordinator");
    node->add_option("--connect", connect_addr, "Coordinator HOST:PORT")->required();
    node->add_option("--data", data_path, "Input CSV file")->required();
    node->add_option("--id", node_id, "Unique node id")->required();
    node->add_option("--order", order, "Summary order: 4 or 6")
        ->check(CLI::IsMember({4, 6}))
        ->capture_default_str();
    node->add_flag("--digest", digest, "Attach an FNV-1a digest of the raw file bytes");

    for (CLI::App* sub : app.get_subcommands(nullptr)) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (summarize->parsed()) {
            return cmd_summarize(g, data_path, order, out_path);
        }
        if (distance->parsed()) {
            return cmd_distance(g, a_path, b_path, method_name, out_path);
        }
        if (hmatrix->parsed()) {
            return cmd_hmatrix(g, inputs, ids, method_name, out_path);
        }
        if (permtest->parsed()) {
            return cmd_permtest(g, a_path, b_path, permutations, out_path);
        }
        if (synth->parsed()) {
            return cmd_synth(g, dist_spec, synth_n, synth_d, out_path);
        }
        if (bench->parsed()) {
            return cmd_bench(g, config_path, out_path);
        }
        if (coordinator->parsed()) {
            return cmd_coordinator(g, listen_addr, min_nodes, method_name, out_path,
                                   port_file);
        }
        if (node->parsed()) {
            return cmd_node(g, connect_addr, data_path, node_id, order, digest);
        }
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cout << err.dump() << "\n";
        return 1;
    }
    return 0;
}
