#include "uai/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace uai {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_double(const std::string& tok, double& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

} // namespace

ReturnSeries read_returns_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("csv: cannot open '" + path + "'");

    ReturnSeries series;
    series.origin = path;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = strip(line);
        if (t.empty() || t[0] == '#') continue;

        // Last comma-separated field is the value; a leading timestamp column
        // is permitted and ignored.
        const std::size_t comma = t.rfind(',');
        const std::string value_tok = strip(comma == std::string::npos ? t : t.substr(comma + 1));

        double v = 0.0;
        if (!parse_double(value_tok, v)) {
            if (!seen_data && !header_skipped) {
                header_skipped = true; // single leading header line
                continue;
            }
            throw std::runtime_error("csv: parse error at line " + std::to_string(line_no) +
                                     " of '" + path + "': '" + t + "'");
        }
        seen_data = true;
        series.values.push_back(v);
    }
    if (series.values.empty())
        throw std::runtime_error("csv: no data rows in '" + path + "'");
    return series;
}

void write_returns_csv(const std::string& path, const ReturnSeries& series) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("csv: cannot open '" + path + "' for writing");
    out << "# return series";
    if (series.origin) out << ": " << *series.origin;
    out << "\n";
    char buf[40];
    for (double v : series.values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << "\n";
    }
    if (!out)
        throw std::runtime_error("csv: write failure on '" + path + "'");
}

} // namespace uai
