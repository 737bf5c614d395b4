#pragma once

// Instance file format (v1), consumed by the `radius` CLI command:
//
//   skewshadow-instance v1 lambda0=<..> lambda1=<..> d=<..>
//   <bit> <r>
//   ...
//
// one line per step, bit in {0,1}, r in [-1,1]. Floating-point fields are
// written with 17 significant digits so a write/read round trip is bit-exact.

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewshadow {

struct Instance {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double d = 0.0;
    std::vector<std::uint8_t> symbols;
    std::vector<double> noise;
};

/// Shortest-faithful decimal form: 17 significant digits round-trip any
/// double exactly.
inline std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class InstanceParseError : public std::runtime_error {
public:
    InstanceParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

inline void write_instance(std::ostream& out, const Instance& instance) {
    out << "skewshadow-instance v1 lambda0=" << format_g17(instance.lambda0)
        << " lambda1=" << format_g17(instance.lambda1)
        << " d=" << format_g17(instance.d) << "\n";
    for (std::size_t i = 0; i < instance.symbols.size(); ++i) {
        out << static_cast<int>(instance.symbols[i] ? 1 : 0) << " "
            << format_g17(instance.noise[i]) << "\n";
    }
}

namespace detail {

inline double parse_double_field(const std::string& token, const std::string& key,
                                 std::size_t line) {
    if (token.rfind(key + "=", 0) != 0) {
        throw InstanceParseError(line, "expected " + key + "=<value>, got '" + token + "'");
    }
    const std::string value = token.substr(key.size() + 1);
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(value, &used);
    } catch (const std::exception&) {
        throw InstanceParseError(line, "cannot parse " + key + " value '" + value + "'");
    }
    if (used != value.size()) {
        throw InstanceParseError(line, "trailing characters in " + key + " value '" + value + "'");
    }
    return x;
}

} // namespace detail

inline Instance read_instance(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw InstanceParseError(1, "empty input");
    }
    std::istringstream hs(header);
    std::string magic, version, f0, f1, f2;
    if (!(hs >> magic >> version >> f0 >> f1 >> f2)) {
        throw InstanceParseError(1, "malformed header");
    }
    if (magic != "skewshadow-instance") {
        throw InstanceParseError(1, "bad magic '" + magic + "'");
    }
    if (version != "v1") {
        throw InstanceParseError(1, "unsupported version '" + version + "'");
    }
    Instance instance;
    instance.lambda0 = detail::parse_double_field(f0, "lambda0", 1);
    instance.lambda1 = detail::parse_double_field(f1, "lambda1", 1);
    instance.d = detail::parse_double_field(f2, "d", 1);

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        int bit = 0;
        double r = 0.0;
        if (!(ls >> bit >> r)) {
            throw InstanceParseError(line_no, "expected '<bit> <r>'");
        }
        std::string extra;
        if (ls >> extra) {
            throw InstanceParseError(line_no, "trailing characters '" + extra + "'");
        }
        if (bit != 0 && bit != 1) {
            throw InstanceParseError(line_no, "bit must be 0 or 1");
        }
        if (!(r >= -1.0 && r <= 1.0)) {
            throw InstanceParseError(line_no, "r must lie in [-1, 1]");
        }
        instance.symbols.push_back(static_cast<std::uint8_t>(bit));
        instance.noise.push_back(r);
    }
    return instance;
}

} // namespace skewshadow
