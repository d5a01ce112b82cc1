#ifndef FFR_TIMESERIES_HPP
#define FFR_TIMESERIES_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace ffr {

/// Uniformly sampled multi-channel record. Channel order is the insertion
/// order and is preserved verbatim in CSV output.
struct TimeSeries {
    std::vector<double> time;
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;

    std::size_t size() const { return time.size(); }

    /// Registers a channel and returns its column index. (An index, not a
    /// reference: later registrations may reallocate the column storage.)
    std::size_t add_channel(const std::string& name);
    std::vector<double>& operator[](std::size_t idx) { return cols[idx]; }
    const std::vector<double>& col(const std::string& name) const;
    bool has(const std::string& name) const;
};

/// Writes "t,<name>,..." header plus one row per sample using a fixed
/// %.10g format so identical runs produce byte-identical files.
void write_csv(std::ostream& os, const TimeSeries& ts);
TimeSeries read_csv(std::istream& is);

}  // namespace ffr

#endif
