// Internal helpers shared by the experiment runner and the report reader.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace udiff {
struct VerificationReport;

/// claims.csv content for a report.
std::string claims_csv(const VerificationReport& report);
}

namespace udiff::bundle {

/// A CSV table with a header row. Numbers are written with 17 significant digits.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row();
    CsvTable& add(const std::string& cell);
    CsvTable& add(const char* cell) { return add(std::string(cell)); }
    CsvTable& add(double value);
    CsvTable& add(int value);
    CsvTable& add(bool value);

    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string format_number(double value);
std::string quote(const std::string& cell);

/// RFC 4180 style split of a whole file; throws InputError on unbalanced quotes.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

} // namespace udiff::bundle
