#include "fsflow/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fsflow {

void Report::add(const std::string& name, double value, double threshold, const std::string& comparison,
                 const std::string& note) {
    ReportEntry e;
    e.name = name;
    e.value = value;
    e.threshold = threshold;
    e.comparison = comparison;
    e.note = note;
    if (comparison == "<=")
        e.pass = value <= threshold;
    else if (comparison == ">=")
        e.pass = value >= threshold;
    else if (comparison == "<")
        e.pass = value < threshold;
    else if (comparison == ">")
        e.pass = value > threshold;
    else if (comparison == "abs<=")
        e.pass = std::abs(value) <= threshold;
    else
        throw std::invalid_argument("Report::add: unknown comparison '" + comparison + "'");
    entries.push_back(std::move(e));
}

bool Report::all_pass() const {
    for (const auto& e : entries)
        if (!e.pass) return false;
    return true;
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "experiment: " << experiment << "\n";
    for (const auto& w : warnings) os << "warning: " << w << "\n";
    char buf[256];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof(buf), "[%s] %-42s value=%.6g %s %.6g", e.pass ? "PASS" : "FAIL", e.name.c_str(),
                      e.value, e.comparison.c_str(), e.threshold);
        os << buf;
        if (!e.note.empty()) os << "  (" << e.note << ")";
        os << "\n";
    }
    for (const auto& a : artifacts) os << "artifact: " << a << "\n";
    os << (all_pass() ? "RESULT: PASS" : "RESULT: FAIL") << "\n";
    return os.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary); // LF endings on every platform
    if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    char buf[64];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            out << buf;
        }
        out << '\n';
    }
}

} // namespace fsflow
