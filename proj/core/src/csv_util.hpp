#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "qpr/errors.hpp"

namespace qpr::detail {

// 17 significant digits: enough for exact double round-trips, and stable
// output bytes for the determinism contract.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Builds the whole file in memory and writes it in one shot.
class CsvBuilder {
public:
    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void raw(const std::string& line) { out_ << line << "\n"; }

    template <class... Parts>
    void row(const Parts&... parts) {
        bool first = true;
        ((out_ << (first ? "" : ","), first = false, put(parts)), ...);
        out_ << "\n";
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("output", "cannot write '" + path + "'");
        f << out_.str();
    }

private:
    void put(double v) { out_ << fmt17(v); }
    void put(int v) { out_ << v; }
    void put(const std::string& v) { out_ << v; }
    void put(const char* v) { out_ << v; }

    std::ostringstream out_;
};

} // namespace qpr::detail
