#include "cathsim/characterization/characterization.hpp"

#include "cathsim/errors.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <sstream>

namespace cathsim::characterization {

namespace {

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_number(const std::string &cell, std::size_t line, const std::string &column)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw ParseError(line, "column '" + column + "': not a number: '" + cell + "'");
    }
    return v;
}

} // namespace

std::vector<LoadCase> read_load_cases_csv(std::istream &in)
{
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> cols;

    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto header = split(line);
        for (std::size_t i = 0; i < header.size(); ++i) {
            cols[header[i]] = i;
        }
        break;
    }
    if (!cols.contains("weight_g")) {
        throw ParseError(line_no, "missing header or mandatory column 'weight_g'");
    }

    std::vector<LoadCase> out;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto cells = split(line);
        auto cell = [&](const char *name) -> const std::string * {
            const auto it = cols.find(name);
            if (it == cols.end() || it->second >= cells.size() || cells[it->second].empty()) {
                return nullptr;
            }
            return &cells[it->second];
        };

        LoadCase c;
        const std::string *w = cell("weight_g");
        if (!w) {
            throw ParseError(line_no, "missing weight_g");
        }
        c.weight_g = parse_number(*w, line_no, "weight_g");
        if (c.weight_g < 0.0) {
            throw ParseError(line_no, "negative weight");
        }
        c.index = static_cast<int>(out.size());
        if (const auto *s = cell("index")) {
            c.index = static_cast<int>(parse_number(*s, line_no, "index"));
        }
        c.force_n = c.weight_g * kNewtonsPerGram;
        if (const auto *s = cell("force_N")) {
            c.force_n = parse_number(*s, line_no, "force_N");
        }
        if (const auto *s = cell("loading_mm")) {
            c.tip_loading_mm = parse_number(*s, line_no, "loading_mm");
        }
        if (const auto *s = cell("unloading_mm")) {
            c.tip_unloading_mm = parse_number(*s, line_no, "unloading_mm");
        }
        if (const auto *s = cell("sim_target_mm")) {
            c.sim_target_mm = parse_number(*s, line_no, "sim_target_mm");
        }
        out.push_back(c);
    }
    if (out.empty()) {
        throw ParseError(line_no, "no load cases");
    }
    return out;
}

} // namespace cathsim::characterization
