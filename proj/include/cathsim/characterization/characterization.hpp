#pragma once

#include "cathsim/rod/rod_params.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cathsim::characterization {

inline constexpr double kNewtonsPerGram = 9.81e-3;

// One row of a loading-unloading experiment. Displacements are tip
// displacements relative to the unloaded pose.
struct LoadCase
{
    int index = 0;
    double weight_g = 0.0;
    double force_n = 0.0;
    double tip_loading_mm = 0.0;
    double tip_unloading_mm = 0.0;
    // Reference simulated displacement to calibrate against, when known.
    std::optional<double> sim_target_mm;
};

// Force over loading displacement, in N/m. Throws PreconditionError for a
// non-positive displacement.
double point_ratio(const LoadCase &c);

// Ordinary least-squares slope of force (N) against loading displacement
// (m), intercept free. Throws PreconditionError on fewer than two cases and
// on identical displacements.
double trend_slope(std::span<const LoadCase> cases);

// Unloading displacement of the zero-load case.
double hysteresis_residual(std::span<const LoadCase> cases);

// ratio(F) = c0 + c1 F + c2 F^2 over the loaded cases.
struct QuadraticFit
{
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    double operator()(double force) const { return c0 + force * (c1 + force * c2); }
};

QuadraticFit fit_quadratic_ratio(std::span<const LoadCase> cases);

std::vector<LoadCase> cases_from_weights(std::span<const double> weights_g);

// Tip displacement (mm) along a transverse tip force, gravity excluded.
double simulate_tip_deflection_mm(double force_n, const rod::RodMaterial &material);

// Bisection (in log E) until the simulated displacement under the case's
// force matches its target (sim_target_mm, else tip_loading_mm).
// Throws CalibrationError when the target cannot be bracketed.
double calibrate_E(const LoadCase &target_case, const rod::RodMaterial &material, double tolerance_mm = 1e-4);

// Closed-form small-deflection cantilever modulus F L^3 / (3 I delta).
double linear_beam_modulus(double force_n, double deflection_m, double length_m, double second_moment);

struct CharacterizationConfig
{
    enum class Mode
    {
        SingleModulus,  // material.youngs_modulus for every case
        PerCaseTargets, // calibrate E per case against sim_target_mm
    };

    Mode mode = Mode::SingleModulus;
    // Displacement play of the unloading branch; defaults to the measured residual.
    std::optional<double> play_mm;
};

struct CharacterizationResult
{
    std::vector<int> indices;
    std::vector<double> forces_n;
    std::vector<double> point_ratios;  // N/m; 0 for unloaded cases
    double trend_slope = 0.0;          // N/m
    double residual_offset_mm = 0.0;   // simulated unloaded position after a full cycle
    double measured_residual_mm = 0.0;
    double calibrated_E = 0.0;         // Pa
    std::vector<double> per_case_E;
    std::vector<double> per_case_sim_mm;
    std::vector<double> per_case_unloading_sim_mm;
    std::vector<double> per_case_error_pct; // % of active length
    std::optional<QuadraticFit> quadratic;
};

// Throws Error carrying the failing case index when a rod solve fails.
CharacterizationResult run_characterization(std::span<const LoadCase> cases, const rod::RodMaterial &material,
                                            const CharacterizationConfig &cfg = {});

// Columns: index, weight_g, force_N, loading_mm, unloading_mm, [sim_target_mm].
// Only weight_g is mandatory; a missing force is derived from the weight.
// Throws ParseError with a 1-based line number, also for a file without
// any case.
std::vector<LoadCase> read_load_cases_csv(std::istream &in);

void write_result_table(std::ostream &out, std::span<const LoadCase> cases, const CharacterizationResult &r);
std::string result_to_json(const CharacterizationResult &r);

} // namespace cathsim::characterization
