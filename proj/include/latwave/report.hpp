#ifndef LATWAVE_REPORT_HPP
#define LATWAVE_REPORT_HPP

#include <string>
#include <vector>

namespace latwave {

// 17-significant-digit text form used by every emitter.
std::string fmt17(double v);

// write-temp-then-rename; filesystem errors propagate verbatim.
void atomic_write(const std::string& path, const std::string& content);

struct CsvColumn {
    std::string name;
    const std::vector<double>* values;
};

// CSV with fmt17 cells; all columns must have equal length.
void write_csv(const std::string& path, const std::vector<CsvColumn>& cols);

// pass/fail plus the numeric margin (positive = slack, negative = breach)
struct Certificate {
    std::string name;
    bool pass = false;
    double margin = 0.0;
};

} // namespace latwave

#endif
