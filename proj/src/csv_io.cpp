#include "pillow/csv_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace pillow {

namespace {

void put(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

std::vector<double> parse_row(const std::string& line, int expected, int row) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(expected));
    const char* p = line.c_str();
    while (true) {
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(p, &end);
        if (end == p || errno == ERANGE)
            throw DomainError("csv: malformed value in row " + std::to_string(row));
        out.push_back(v);
        while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
        if (*end == '\0') break;
        if (*end != ',') throw DomainError("csv: expected ',' in row " + std::to_string(row));
        p = end + 1;
    }
    if (static_cast<int>(out.size()) != expected)
        throw DomainError("csv: row " + std::to_string(row) + " has " + std::to_string(out.size()) +
                          " values, expected " + std::to_string(expected));
    return out;
}

int parse_header(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DomainError("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("n=", 0) != 0) throw DomainError("csv: first line must be n=<int>");
    char* end = nullptr;
    const long n = std::strtol(line.c_str() + 2, &end, 10);
    if (end == line.c_str() + 2 || *end != '\0' || n < 2 || n > 1 << 16)
        throw DomainError("csv: bad grid size in header '" + line + "'");
    return static_cast<int>(n);
}

std::string next_line(std::istream& is, int row) {
    std::string line;
    if (!std::getline(is, line)) throw DomainError("csv: missing row " + std::to_string(row));
    return line;
}

template <class G>
G read_path(const std::filesystem::path& path, G (*reader)(std::istream&)) {
    std::ifstream in(path);
    if (!in) throw DomainError("csv: cannot open " + path.string());
    return reader(in);
}

}  // namespace

void write_csv(std::ostream& os, const GridFn1D& g) {
    os << "n=" << g.n() << '\n';
    for (int i = 0; i <= g.n(); ++i) {
        if (i) os << ',';
        put(os, g[i]);
    }
    os << '\n';
}

void write_csv(std::ostream& os, const GridFn2D& g) {
    os << "n=" << g.n() << '\n';
    for (int i = 0; i <= g.n(); ++i) {
        for (int j = 0; j <= g.n(); ++j) {
            if (j) os << ',';
            put(os, g(i, j));
        }
        os << '\n';
    }
}

GridFn1D read_csv_1d(std::istream& is) {
    const int n = parse_header(is);
    return GridFn1D(n, parse_row(next_line(is, 0), n + 1, 0));
}

GridFn2D read_csv_2d(std::istream& is) {
    const int n = parse_header(is);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) {
        const auto row = parse_row(next_line(is, i), n + 1, i);
        values.insert(values.end(), row.begin(), row.end());
    }
    return GridFn2D(n, std::move(values));
}

GridFn1D read_csv_1d(const std::filesystem::path& path) {
    return read_path<GridFn1D>(path, &read_csv_1d);
}

GridFn2D read_csv_2d(const std::filesystem::path& path) {
    return read_path<GridFn2D>(path, &read_csv_2d);
}

std::string to_csv(const GridFn2D& g) {
    std::ostringstream os;
    write_csv(os, g);
    return os.str();
}

}  // namespace pillow
