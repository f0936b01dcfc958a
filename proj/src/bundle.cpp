#include "bundle.hpp"

#include "udiff/error.hpp"
#include "udiff/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace udiff {
namespace bundle {

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row()
{
    rows_.emplace_back();
    return *this;
}

CsvTable& CsvTable::add(const std::string& cell)
{
    if (rows_.empty())
        rows_.emplace_back();
    rows_.back().push_back(quote(cell));
    return *this;
}

CsvTable& CsvTable::add(double value) { return add(format_number(value)); }
CsvTable& CsvTable::add(int value) { return add(std::to_string(value)); }
CsvTable& CsvTable::add(bool value) { return add(std::string(value ? "true" : "false")); }

std::string CsvTable::str() const
{
    std::string out;
    for (std::size_t j = 0; j < header_.size(); ++j)
        out += (j ? "," : "") + quote(header_[j]);
    out += '\n';
    for (const auto& r : rows_) {
        if (r.size() != header_.size())
            throw NumericError("CSV row width does not match its header");
        for (std::size_t j = 0; j < r.size(); ++j)
            out += (j ? "," : "") + r[j];
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path.string() + "'");
    out << str();
}

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string quote(const std::string& cell)
{
    if (cell.find_first_of(",\"\n\r") == std::string::npos)
        return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> current;
    std::string cell;
    bool quoted = false, row_open = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        row_open = true;
        if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            current.push_back(std::move(cell));
            cell.clear();
        } else if (c == '\n') {
            current.push_back(std::move(cell));
            cell.clear();
            rows.push_back(std::move(current));
            current.clear();
            row_open = false;
        } else if (c != '\r') {
            cell += c;
        }
    }
    if (quoted)
        throw InputError("CSV ends inside a quoted field");
    if (row_open) {
        current.push_back(std::move(cell));
        rows.push_back(std::move(current));
    }
    return rows;
}

} // namespace bundle

namespace {

const std::vector<std::string> claim_header{"claim", "suite", "verdict", "anchor", "summary", "evidence"};

std::string join(const std::vector<std::string>& items, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
        out += (i ? sep : "") + items[i];
    return out;
}

} // namespace

std::string claims_csv(const VerificationReport& report)
{
    bundle::CsvTable table(claim_header);
    for (const auto& c : report.claims)
        table.row().add(c.id).add(c.suite).add(to_string(c.verdict)).add(c.anchor).add(c.summary).add(
            join(c.evidence, ";"));
    return table.str();
}

VerificationReport load_report(const std::filesystem::path& bundle_dir)
{
    if (!std::filesystem::is_directory(bundle_dir))
        throw InputError("bundle directory '" + bundle_dir.string() + "' does not exist");
    const auto path = bundle_dir / "claims.csv";
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("bundle '" + bundle_dir.string() + "' has no claims.csv");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto rows = bundle::parse_csv(buffer.str());
    if (rows.empty() || rows.front() != claim_header)
        throw InputError("claims.csv in '" + bundle_dir.string() + "' has an unexpected header");

    VerificationReport report;
    std::map<std::string, int> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != claim_header.size())
            throw InputError("claims.csv row " + std::to_string(i + 1) + " has " + std::to_string(r.size())
                             + " fields");
        if (seen[r[0]]++)
            throw InputError("claims.csv lists claim " + r[0] + " twice");
        ClaimResult c;
        c.id = r[0];
        c.suite = r[1];
        c.verdict = verdict_from_string(r[2]);
        c.anchor = r[3];
        c.summary = r[4];
        std::stringstream ev(r[5]);
        std::string item;
        while (std::getline(ev, item, ';'))
            if (!item.empty())
                c.evidence.push_back(item);
        report.claims.push_back(std::move(c));
    }

    std::ifstream timing(bundle_dir / "timing.txt");
    std::string id;
    double seconds = 0.0;
    while (timing >> id >> seconds)
        for (auto& c : report.claims)
            if (c.id == id)
                c.runtime_seconds = seconds;
    return report;
}

std::string render_report(const VerificationReport& report)
{
    if (report.claims.empty())
        return "no claims\n";
    std::size_t anchor_width = 6;
    for (const auto& c : report.claims)
        anchor_width = std::max(anchor_width, c.anchor.size());
    std::ostringstream out;
    out << std::left << std::setw(6) << "claim" << std::setw(19) << "verdict" << std::setw(static_cast<int>(anchor_width) + 2)
        << "anchor"
        << "key numbers\n";
    int counts[4] = {0, 0, 0, 0};
    for (const auto& c : report.claims) {
        out << std::setw(6) << c.id << std::setw(19) << to_string(c.verdict)
            << std::setw(static_cast<int>(anchor_width) + 2) << c.anchor << c.summary << '\n';
        ++counts[static_cast<int>(c.verdict)];
    }
    out << '\n'
        << report.claims.size() << " claims: " << counts[0] << " pass, " << counts[1] << " bounded-surrogate, "
        << counts[2] << " fail, " << counts[3] << " skipped\n";
    return out.str();
}

} // namespace udiff
