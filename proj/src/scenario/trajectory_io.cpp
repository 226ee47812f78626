#include "cathsim/scenario/trajectory_io.hpp"

#include "cathsim/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace cathsim::scenario {

namespace {

constexpr const char *kHeader = "rep,t_s,cmd_T_mm,cmd_R_deg,cmd_B_deg,tip_x_cm,tip_y_cm,tip_z_cm,flags";

double number(const std::string &cell, std::size_t line)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw ParseError(line, "not a number: '" + cell + "'");
    }
    return v;
}

} // namespace

void write_log_csv(std::ostream &out, const TrajectoryLog &log)
{
    out << kHeader << '\n';
    char buf[256];
    for (const auto &s : log.samples) {
        // %.17g keeps the round trip exact.
        std::snprintf(buf, sizeof buf, "%d,%.6f,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%u\n", s.rep, s.t_s,
                      s.cmd.translation_mm, s.cmd.rotation_deg, s.cmd.knob_deg, s.tip_cm.x(), s.tip_cm.y(),
                      s.tip_cm.z(), static_cast<unsigned>(s.flags));
        out << buf;
    }
}

TrajectoryLog read_log_csv(std::istream &in)
{
    TrajectoryLog log;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError(1, "empty trajectory file");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kHeader) {
        throw ParseError(line_no, "unexpected header");
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) {
            cells.push_back(c);
        }
        if (cells.size() != 9) {
            throw ParseError(line_no, "expected 9 columns, got " + std::to_string(cells.size()));
        }
        TrajectorySample s;
        s.rep = static_cast<int>(number(cells[0], line_no));
        s.t_s = number(cells[1], line_no);
        s.cmd = {number(cells[2], line_no), number(cells[3], line_no), number(cells[4], line_no)};
        s.tip_cm = Vec3(number(cells[5], line_no), number(cells[6], line_no), number(cells[7], line_no));
        s.flags = static_cast<std::uint8_t>(number(cells[8], line_no));
        log.samples.push_back(s);
    }
    return log;
}

void write_error_report(std::ostream &out, const std::string &scenario, const ErrorReport &report)
{
    char buf[160];
    out << "scenario  plane  MEE (cm)  MAE (cm)\n";
    for (std::size_t k = 0; k < kPlanes.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%-9s %-6s %8.4f  %8.4f\n", scenario.c_str(), plane_name(kPlanes[k]),
                      report.pooled[k].mee_cm, report.pooled[k].mae_cm);
        out << buf;
    }
    if (report.per_rep.size() > 1) {
        out << "\nper repetition\nrep  plane  MEE (cm)  MAE (cm)\n";
        for (std::size_t r = 0; r < report.per_rep.size(); ++r) {
            for (std::size_t k = 0; k < kPlanes.size(); ++k) {
                std::snprintf(buf, sizeof buf, "%-4d %-6s %8.4f  %8.4f\n", report.reps[r], plane_name(kPlanes[k]),
                              report.per_rep[r][k].mee_cm, report.per_rep[r][k].mae_cm);
                out << buf;
            }
        }
    }
}

std::string error_report_to_json(const std::string &scenario, const ErrorReport &report)
{
    auto planes = [](const PlaneErrors &pe) {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t k = 0; k < kPlanes.size(); ++k) {
            arr.push_back({{"plane", plane_name(kPlanes[k])},
                           {"mee_cm", pe[k].mee_cm},
                           {"mae_cm", pe[k].mae_cm},
                           {"samples", pe[k].samples}});
        }
        return arr;
    };
    nlohmann::json j;
    j["scenario"] = scenario;
    j["pooled"] = planes(report.pooled);
    j["per_rep"] = nlohmann::json::array();
    for (std::size_t r = 0; r < report.per_rep.size(); ++r) {
        j["per_rep"].push_back({{"rep", report.reps[r]}, {"planes", planes(report.per_rep[r])}});
    }
    return j.dump(2);
}

void write_approach_stats(std::ostream &out, const ApproachStats &stats)
{
    char buf[200];
    out << "point  T (mm)  R (deg)  B (deg)    x (cm)   y (cm)   z (cm)    sd x     sd y     sd z\n";
    for (std::size_t i = 0; i < stats.targets.size(); ++i) {
        const auto &t = stats.targets[i];
        const auto &m = stats.mean_cm[i];
        const auto &s = stats.std_cm[i];
        std::snprintf(buf, sizeof buf, "%-5zu %7.1f %8.1f %8.1f  %8.3f %8.3f %8.3f  %7.4f  %7.4f  %7.4f%s\n", i,
                      t.translation_mm, t.rotation_deg, t.knob_deg, m.x(), m.y(), m.z(), s.x(), s.y(), s.z(),
                      stats.clamped[i] ? "  (clamped)" : "");
        out << buf;
    }
    out << "cycles: " << stats.cycles << '\n';
}

std::string approach_stats_to_json(const ApproachStats &stats)
{
    nlohmann::json j;
    j["cycles"] = stats.cycles;
    j["points"] = nlohmann::json::array();
    for (std::size_t i = 0; i < stats.targets.size(); ++i) {
        const auto &t = stats.targets[i];
        const auto &m = stats.mean_cm[i];
        const auto &s = stats.std_cm[i];
        j["points"].push_back({{"target", {t.translation_mm, t.rotation_deg, t.knob_deg}},
                               {"mean_cm", {m.x(), m.y(), m.z()}},
                               {"std_cm", {s.x(), s.y(), s.z()}},
                               {"clamped", static_cast<bool>(stats.clamped[i])}});
    }
    return j.dump(2);
}

} // namespace cathsim::scenario
