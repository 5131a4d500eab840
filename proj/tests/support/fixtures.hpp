#pragma once

#include "aramaid/model_format.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsupport
{

inline std::string models_dir()
{
    return ARAMAID_MODELS_DIR;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline aramaid::Diagram parse_or_throw(const std::string& text)
{
    auto r = aramaid::parse_model(text);
    if (!r.ok())
    {
        std::string msg;
        for (const auto& d : r.diagnostics)
            msg += aramaid::format_diagnostic("<text>", d) + "\n";
        throw std::runtime_error(msg);
    }
    return std::move(*r.diagram);
}

/// A CSV file as a header plus rows of cells. No quoting support; the
/// fixtures never need it.
struct Csv
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw std::runtime_error("no column " + name);
    }
};

inline std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep))
        out.push_back(cell);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

inline Csv parse_csv(const std::string& text)
{
    Csv csv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty() || line.front() == '#')
            continue;
        if (csv.header.empty())
            csv.header = split(line, ',');
        else
            csv.rows.push_back(split(line, ','));
    }
    return csv;
}

/// The published defender table keyed by "DP,DF,DT,DR,UC,UA".
inline std::map<std::string, double> t12_expected()
{
    const Csv csv = parse_csv(read_file(models_dir() + "/golden/T12_expected.csv"));
    std::map<std::string, double> out;
    const std::size_t eu = csv.column("eu");
    for (const auto& r : csv.rows)
    {
        std::string key;
        for (std::size_t i = 0; i < eu; ++i)
            key += (i ? "," : "") + r[i];
        out[key] = std::stod(r[eu]);
    }
    return out;
}

}  // namespace testsupport
