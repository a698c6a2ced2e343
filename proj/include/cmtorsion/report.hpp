#pragma once

// Machine-readable verification reports. JSON is emitted by a fixed-order
// serializer with 17-significant-digit floats so identical runs produce
// identical bytes; text uses 8 significant digits. wall_time is zeroed by
// default for reproducibility and carries real timings only when requested.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmt {

struct Case {
    std::string name;
    bool pass = false;
    double measured = 0;
    double expected = 0;
    double tolerance = 0;
    std::string anchor; // mathematical identity tag, or "plumbing"
};

struct Report {
    std::string suite;
    std::vector<Case> cases;
    double wall_time = 0;

    bool all_pass() const {
        for (const auto& c : cases)
            if (!c.pass) return false;
        return true;
    }
    Report& add(const std::string& name, double measured, double expected, double tol,
                const std::string& anchor) {
        Case c;
        c.name = name;
        c.measured = measured;
        c.expected = expected;
        c.tolerance = tol;
        c.anchor = anchor;
        c.pass = std::abs(measured - expected) <= tol;
        cases.push_back(c);
        return *this;
    }
    // one-sided criterion: pass when measured >= threshold
    Report& add_at_least(const std::string& name, double measured, double threshold,
                         const std::string& anchor) {
        Case c;
        c.name = name;
        c.measured = measured;
        c.expected = threshold;
        c.tolerance = 0;
        c.anchor = anchor;
        c.pass = measured >= threshold;
        cases.push_back(c);
        return *this;
    }
};

namespace detail {
inline std::string fmt_double(double v, int sig) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", sig, v);
    return buf;
}
inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default: out += c;
        }
    }
    return out;
}
} // namespace detail

inline std::string emit_json(const Report& r) {
    std::string out = "{\"suite\":\"" + detail::json_escape(r.suite) + "\",\"cases\":[";
    for (size_t i = 0; i < r.cases.size(); ++i) {
        const Case& c = r.cases[i];
        if (i) out += ",";
        out += "{\"name\":\"" + detail::json_escape(c.name) + "\"";
        out += ",\"status\":\"" + std::string(c.pass ? "pass" : "fail") + "\"";
        out += ",\"measured\":" + detail::fmt_double(c.measured, 17);
        out += ",\"expected\":" + detail::fmt_double(c.expected, 17);
        out += ",\"tolerance\":" + detail::fmt_double(c.tolerance, 17);
        out += ",\"anchor\":\"" + detail::json_escape(c.anchor) + "\"}";
    }
    out += "],\"wall_time\":" + detail::fmt_double(r.wall_time, 17) + "}\n";
    return out;
}

inline std::string emit_csv(const Report& r) {
    std::string out = "name,status,measured,expected,tolerance,anchor\n";
    for (const Case& c : r.cases) {
        out += c.name + "," + (c.pass ? "pass" : "fail") + "," +
               detail::fmt_double(c.measured, 17) + "," + detail::fmt_double(c.expected, 17) +
               "," + detail::fmt_double(c.tolerance, 17) + "," + c.anchor + "\n";
    }
    return out;
}

inline std::string emit_text(const Report& r) {
    std::string out = "suite: " + r.suite + "\n";
    for (const Case& c : r.cases) {
        out += std::string(c.pass ? "  pass  " : "  FAIL  ") + c.name +
               "  measured=" + detail::fmt_double(c.measured, 8) +
               "  expected=" + detail::fmt_double(c.expected, 8) +
               "  tol=" + detail::fmt_double(c.tolerance, 8) + "  [" + c.anchor + "]\n";
    }
    out += "wall_time: " + detail::fmt_double(r.wall_time, 8) + " s\n";
    return out;
}

inline std::string emit(const Report& r, const std::string& format) {
    if (format == "json") return emit_json(r);
    if (format == "csv") return emit_csv(r);
    if (format == "text") return emit_text(r);
    throw std::invalid_argument("emit: unknown format " + format);
}

// Write-then-rename so readers never observe a partial file.
inline void write_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("write_atomic: cannot open " + tmp);
        f << content;
        if (!f.good()) throw std::runtime_error("write_atomic: write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("write_atomic: rename failed for " + path);
}

} // namespace cmt
