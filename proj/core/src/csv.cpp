#include "edist/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace edist {

namespace {

[[noreturn]] void fail_at(const std::string& name, std::size_t line, std::size_t col,
                          const std::string& what) {
    throw std::runtime_error(name + ":" + std::to_string(line) + ":" +
                             std::to_string(col) + ": " + what);
}

// Splits one CSV line on commas; no quoting (numeric data only).
std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

} // namespace

DatasetMatrix parse_csv(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(name + ":1:1: missing header line");
    }
    DatasetMatrix m;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trimmed(line).empty()) {
            continue; // ignore blank lines (trailing newline etc.)
        }
        const auto fields = split_fields(line);
        if (m.d == 0) {
            m.d = fields.size();
        } else if (fields.size() != m.d) {
            fail_at(name, lineno, 1,
                    "expected " + std::to_string(m.d) + " fields, got " +
                        std::to_string(fields.size()));
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const std::string cell = trimmed(fields[j]);
            double v = 0.0;
            const char* first = cell.data();
            const char* last = cell.data() + cell.size();
            const auto res = std::from_chars(first, last, v);
            if (res.ec != std::errc{} || res.ptr != last || cell.empty()) {
                fail_at(name, lineno, j + 1, "invalid number '" + cell + "'");
            }
            if (!std::isfinite(v)) {
                fail_at(name, lineno, j + 1, "non-finite value");
            }
            m.values.push_back(v);
        }
        ++m.n;
    }
    return m;
}

DatasetMatrix load_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_csv(buf.str(), path);
}

std::string to_csv_string(const DatasetMatrix& m) {
    std::ostringstream out;
    for (std::size_t j = 0; j < m.d; ++j) {
        if (j) out << ',';
        out << 'x' << (j + 1);
    }
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.d; ++j) {
            if (j) out << ',';
            const auto res = std::to_chars(buf, buf + sizeof(buf), m.at(i, j));
            out.write(buf, res.ptr - buf);
        }
        out << '\n';
    }
    return out.str();
}

void save_csv(const DatasetMatrix& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path);
    }
    f << to_csv_string(m);
    if (!f) {
        throw std::runtime_error("write failed: " + path);
    }
}

} // namespace edist
