#pragma once

#include <string>
#include <vector>

namespace sicmag {

// Uniformly or segment-sampled series. The CSV form is the interchange
// contract between simulate and fit: mandatory header row with
// unit-suffixed column names, '.' decimal separator, shortest
// round-trippable float formatting.
struct Trace {
    std::vector<double> x;
    std::vector<double> y;
    std::string x_label = "x";
    std::string y_label = "y";

    std::size_t size() const { return x.size(); }
    void validate() const;
};

std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

void write_trace_csv(const std::string& path, const Trace& trace);

// Reads the first two numeric columns; '#' lines are comments. Throws
// std::runtime_error with a line diagnostic on schema violations.
Trace read_trace_csv(const std::string& path);

}  // namespace sicmag
