#include "ffr/timeseries.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ffr {

std::size_t TimeSeries::add_channel(const std::string& name) {
    names.push_back(name);
    cols.emplace_back();
    return cols.size() - 1;
}

const std::vector<double>& TimeSeries::col(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return cols[i];
    throw std::out_of_range("TimeSeries: no channel named '" + name + "'");
}

bool TimeSeries::has(const std::string& name) const {
    for (const auto& n : names)
        if (n == name) return true;
    return false;
}

void write_csv(std::ostream& os, const TimeSeries& ts) {
    os << "t";
    for (const auto& n : ts.names) os << "," << n;
    os << "\n";
    char buf[32];
    for (std::size_t k = 0; k < ts.time.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.10g", ts.time[k]);
        os << buf;
        for (const auto& c : ts.cols) {
            std::snprintf(buf, sizeof(buf), "%.10g", c[k]);
            os << "," << buf;
        }
        os << "\n";
    }
}

TimeSeries read_csv(std::istream& is) {
    TimeSeries ts;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_csv: empty input");
    std::stringstream header(line);
    std::string field;
    bool first = true;
    while (std::getline(header, field, ',')) {
        if (first) {
            if (field != "t") throw std::runtime_error("read_csv: first column must be 't'");
            first = false;
        } else {
            ts.add_channel(field);
        }
    }
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::size_t idx = 0;
        while (std::getline(ss, field, ',')) {
            double v;
            try {
                v = std::stod(field);
            } catch (const std::exception&) {
                throw std::runtime_error("read_csv: bad number at row " + std::to_string(row));
            }
            if (idx == 0)
                ts.time.push_back(v);
            else if (idx <= ts.cols.size())
                ts.cols[idx - 1].push_back(v);
            else
                throw std::runtime_error("read_csv: extra field at row " + std::to_string(row));
            ++idx;
        }
        if (idx != ts.cols.size() + 1) throw std::runtime_error("read_csv: short row " + std::to_string(row));
    }
    return ts;
}

}  // namespace ffr
