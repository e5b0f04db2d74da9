#ifndef SFHD_CSV_HPP
#define SFHD_CSV_HPP

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace sfhd::io {

/// Decimal formatting for all CSV/CLI numeric output: '.' separator,
/// 15 significant digits.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        out_ << header << '\n';
    }

    template <typename... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((out_ << (first ? "" : ","), first = false, put(fields)), ...);
        out_ << '\n';
    }

private:
    void put(double v) { out_ << num(v); }
    void put(int v) { out_ << v; }
    void put(const std::string& s) { out_ << s; }
    void put(const char* s) { out_ << s; }

    std::ofstream out_;
};

} // namespace sfhd::io

#endif
