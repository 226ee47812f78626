#pragma once

#include "cathsim/scenario/metrics.hpp"

#include <iosfwd>
#include <string>

namespace cathsim::scenario {

// rep,t_s,cmd_T_mm,cmd_R_deg,cmd_B_deg,tip_x_cm,tip_y_cm,tip_z_cm,flags
void write_log_csv(std::ostream &out, const TrajectoryLog &log);
// Throws ParseError with a 1-based line number.
TrajectoryLog read_log_csv(std::istream &in);

// Plain-text table with one row per plane, in x-y, x-z, y-z order.
void write_error_report(std::ostream &out, const std::string &scenario, const ErrorReport &report);
std::string error_report_to_json(const std::string &scenario, const ErrorReport &report);

void write_approach_stats(std::ostream &out, const ApproachStats &stats);
std::string approach_stats_to_json(const ApproachStats &stats);

} // namespace cathsim::scenario
