#pragma once

#include <string>
#include <vector>

namespace fsflow {

/// One pass/fail row: a numeric claim together with the tolerance it was
/// tested against.
struct ReportEntry {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string comparison = "<="; // how value relates to threshold for a pass
    bool pass = false;
    std::string note;
};

struct Report {
    std::string experiment;
    std::string config_dump;
    std::vector<std::string> warnings;
    std::vector<ReportEntry> entries;
    std::vector<std::string> artifacts; // emitted file paths

    void add(const std::string& name, double value, double threshold, const std::string& comparison,
             const std::string& note = "");
    bool all_pass() const;
    std::string to_text() const;
};

/// RFC-4180-style CSV: header row, comma separation, '.' decimal point,
/// shortest round-trip formatting, LF line endings.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

} // namespace fsflow
