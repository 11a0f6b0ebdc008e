#include "latwave/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace latwave {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);  // throws fs::filesystem_error verbatim
}

void write_csv(const std::string& path, const std::vector<CsvColumn>& cols) {
    if (cols.empty()) throw std::invalid_argument("write_csv: no columns");
    std::size_t n = cols.front().values->size();
    for (const auto& c : cols)
        if (c.values->size() != n)
            throw std::invalid_argument("write_csv: column length mismatch");
    std::string out;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out += ',';
        out += cols[c].name;
    }
    out += '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out += ',';
            out += fmt17((*cols[c].values)[i]);
        }
        out += '\n';
    }
    atomic_write(path, out);
}

} // namespace latwave
