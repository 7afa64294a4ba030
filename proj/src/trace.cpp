#include "sicmag/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace sicmag {

void Trace::validate() const {
    if (x.size() != y.size()) throw std::invalid_argument("Trace: x/y length mismatch");
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size())
        throw std::invalid_argument("write_csv: header/column count mismatch");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw std::invalid_argument("write_csv: ragged columns");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t j = 0; j < header.size(); ++j)
        out << (j ? "," : "") << header[j];
    out << "\n";
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j)
            out << (j ? "," : "") << format_double(columns[j][i]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

void write_trace_csv(const std::string& path, const Trace& trace) {
    trace.validate();
    write_csv(path, {trace.x_label, trace.y_label}, {trace.x, trace.y});
}

namespace {

double parse_field(const std::string& field, const std::string& path, int line_no) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{})
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": not a number: '" + field + "'");
    return v;
}

}  // namespace

Trace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_trace_csv: cannot open " + path);

    Trace trace;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 2)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected at least two columns");
        if (!header_seen) {
            // header row is mandatory and must not be numeric
            double dummy;
            const auto res =
                std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), dummy);
            if (res.ec == std::errc{})
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": missing header row");
            trace.x_label = fields[0];
            trace.y_label = fields[1];
            header_seen = true;
            continue;
        }
        trace.x.push_back(parse_field(fields[0], path, line_no));
        trace.y.push_back(parse_field(fields[1], path, line_no));
    }
    if (!header_seen) throw std::runtime_error(path + ": empty file");
    return trace;
}

}  // namespace sicmag
