#include "halfcrack/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "halfcrack/errors.hpp"

namespace halfcrack {

int CsvTable::column(const std::string& name) const
{
    for (size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

}  // namespace

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open CSV file '" + path + "'");
    }
    CsvTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        if (t.header.empty()) {
            t.header = split(line);
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != t.header.size()) {
            throw DomainError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(t.header.size()) + " fields, found " +
                              std::to_string(fields.size()));
        }
        std::vector<double> row;
        for (const std::string& f : fields) {
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(f.c_str(), &end);
            if (f.empty() || end != f.c_str() + f.size() || errno == ERANGE) {
                throw DomainError(path + ":" + std::to_string(lineno) + ": '" + f +
                                  "' is not a number");
            }
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) {
        throw DomainError(path + ": CSV file has no header");
    }
    return t;
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const CsvTable& table)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write CSV file '" + path + "'");
    }
    for (size_t k = 0; k < table.header.size(); ++k) {
        out << (k ? "," : "") << table.header[k];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (size_t k = 0; k < row.size(); ++k) {
            out << (k ? "," : "") << format_double(row[k]);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

}  // namespace halfcrack
