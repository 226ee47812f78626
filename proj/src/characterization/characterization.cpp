#include "cathsim/characterization/characterization.hpp"

#include "cathsim/errors.hpp"
#include "cathsim/rod/cosserat.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <ostream>

namespace cathsim::characterization {

double point_ratio(const LoadCase &c)
{
    if (!(c.tip_loading_mm > 0.0)) {
        throw PreconditionError("point_ratio: undefined for a zero loading displacement (case " +
                                std::to_string(c.index) + ")");
    }
    return c.force_n / (c.tip_loading_mm * 1e-3);
}

double trend_slope(std::span<const LoadCase> cases)
{
    if (cases.size() < 2) {
        throw PreconditionError("trend_slope: at least two cases are required");
    }
    const double n = static_cast<double>(cases.size());
    double mx = 0.0, my = 0.0;
    for (const auto &c : cases) {
        mx += c.tip_loading_mm * 1e-3;
        my += c.force_n;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto &c : cases) {
        const double dx = c.tip_loading_mm * 1e-3 - mx;
        sxx += dx * dx;
        sxy += dx * (c.force_n - my);
    }
    if (!(sxx > 0.0)) {
        throw PreconditionError("trend_slope: singular fit, all displacements are identical");
    }
    return sxy / sxx;
}

double hysteresis_residual(std::span<const LoadCase> cases)
{
    for (const auto &c : cases) {
        if (c.index == 0) {
            return c.tip_unloading_mm;
        }
    }
    throw PreconditionError("hysteresis_residual: the zero-load case (index 0) is missing");
}

QuadraticFit fit_quadratic_ratio(std::span<const LoadCase> cases)
{
    std::vector<const LoadCase *> loaded;
    for (const auto &c : cases) {
        if (c.tip_loading_mm > 0.0) {
            loaded.push_back(&c);
        }
    }
    if (loaded.size() < 3) {
        throw PreconditionError("fit_quadratic_ratio: at least three loaded cases are required");
    }
    Eigen::MatrixXd a(loaded.size(), 3);
    Eigen::VectorXd y(loaded.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        const double f = loaded[i]->force_n;
        a(i, 0) = 1.0;
        a(i, 1) = f;
        a(i, 2) = f * f;
        y(i) = point_ratio(*loaded[i]);
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
    return {c(0), c(1), c(2)};
}

std::vector<LoadCase> cases_from_weights(std::span<const double> weights_g)
{
    std::vector<LoadCase> out;
    out.reserve(weights_g.size());
    for (std::size_t i = 0; i < weights_g.size(); ++i) {
        LoadCase c;
        c.index = static_cast<int>(i);
        c.weight_g = weights_g[i];
        c.force_n = weights_g[i] * kNewtonsPerGram;
        out.push_back(c);
    }
    return out;
}

double simulate_tip_deflection_mm(double force_n, const rod::RodMaterial &material)
{
    if (force_n == 0.0) {
        return 0.0;
    }
    const rod::RodParams params = rod::make_rod_params(material);
    const rod::Vec3 direction = rod::Vec3::UnitY();
    const rod::RodState s = rod::solve_static(params, rod::TipLoad{force_n * direction, rod::Vec3::Zero()});
    return 1e3 * s.tip().p.dot(direction);
}

double linear_beam_modulus(double force_n, double deflection_m, double length_m, double second_moment)
{
    if (!(deflection_m > 0.0)) {
        throw PreconditionError("linear_beam_modulus: deflection must be positive");
    }
    return force_n * std::pow(length_m, 3) / (3.0 * second_moment * deflection_m);
}

double calibrate_E(const LoadCase &target_case, const rod::RodMaterial &material, double tolerance_mm)
{
    const double target = target_case.sim_target_mm.value_or(target_case.tip_loading_mm);
    if (!(target > 0.0) || !(target_case.force_n > 0.0)) {
        throw CalibrationError("calibrate_E: target case needs positive force and displacement");
    }
    const double seed =
        linear_beam_modulus(target_case.force_n, target * 1e-3, material.length, material.second_moment);

    rod::RodMaterial m = material;
    auto deflection = [&](double e) {
        m.youngs_modulus = e;
        return simulate_tip_deflection_mm(target_case.force_n, m);
    };

    // Deflection decreases monotonically with E.
    double lo = seed / 4.0;
    double hi = seed * 4.0;
    double f_lo, f_hi;
    try {
        f_lo = deflection(lo);
        f_hi = deflection(hi);
    } catch (const Error &e) {
        throw CalibrationError(std::string("calibrate_E: bracket evaluation failed: ") + e.what());
    }
    if (!(f_lo >= target && f_hi <= target)) {
        throw CalibrationError("calibrate_E: target displacement cannot be bracketed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double f = deflection(mid);
        if (std::abs(f - target) < tolerance_mm) {
            return mid;
        }
        if (f > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw CalibrationError("calibrate_E: bisection did not reach the tolerance");
}

namespace {

struct CaseSimulation
{
    double modulus = 0.0;
    double loading_mm = 0.0;
};

CaseSimulation simulate_case(const LoadCase &c, const rod::RodMaterial &material,
                             CharacterizationConfig::Mode mode)
{
    CaseSimulation out;
    out.modulus = material.youngs_modulus;
    if (c.force_n == 0.0) {
        return out;
    }
    rod::RodMaterial m = material;
    if (mode == CharacterizationConfig::Mode::PerCaseTargets && c.sim_target_mm) {
        m.youngs_modulus = calibrate_E(c, material);
        out.modulus = m.youngs_modulus;
    }
    out.loading_mm = simulate_tip_deflection_mm(c.force_n, m);
    return out;
}

} // namespace

CharacterizationResult run_characterization(std::span<const LoadCase> cases, const rod::RodMaterial &material,
                                            const CharacterizationConfig &cfg)
{
    CharacterizationResult r;
    r.calibrated_E = material.youngs_modulus;
    if (cases.empty()) {
        return r;
    }
    for (std::size_t i = 1; i < cases.size(); ++i) {
        if (cases[i].force_n < cases[i - 1].force_n) {
            throw PreconditionError("run_characterization: loads must be ascending");
        }
    }

    std::vector<std::future<CaseSimulation>> jobs;
    jobs.reserve(cases.size());
    for (const auto &c : cases) {
        jobs.push_back(std::async(std::launch::async, simulate_case, std::cref(c), std::cref(material), cfg.mode));
    }

    const double length_mm = material.length * 1e3;
    bool calibrated_set = false;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const LoadCase &c = cases[i];
        CaseSimulation sim;
        try {
            sim = jobs[i].get();
        } catch (const Error &e) {
            throw Error("run_characterization: case " + std::to_string(c.index) + " failed: " + e.what());
        }
        r.indices.push_back(c.index);
        r.forces_n.push_back(c.force_n);
        r.point_ratios.push_back(c.tip_loading_mm > 0.0 ? point_ratio(c) : 0.0);
        r.per_case_E.push_back(sim.modulus);
        r.per_case_sim_mm.push_back(sim.loading_mm);
        const bool measured = c.tip_loading_mm > 0.0 || c.force_n == 0.0;
        r.per_case_error_pct.push_back(measured ? (c.tip_loading_mm - sim.loading_mm) / length_mm * 100.0 : 0.0);
        if (!calibrated_set && c.force_n > 0.0) {
            r.calibrated_E = sim.modulus;
            calibrated_set = true;
        }
    }

    bool has_displacements = false;
    for (const auto &c : cases) {
        has_displacements = has_displacements || c.tip_loading_mm > 0.0;
    }
    if (has_displacements) {
        r.trend_slope = trend_slope(cases);
        std::size_t loaded = 0;
        for (const auto &c : cases) {
            loaded += c.tip_loading_mm > 0.0 ? 1 : 0;
        }
        if (loaded >= 3) {
            r.quadratic = fit_quadratic_ratio(cases);
        }
    }
    try {
        r.measured_residual_mm = hysteresis_residual(cases);
    } catch (const PreconditionError &) {
        r.measured_residual_mm = 0.0;
    }

    // Unloading branch: heaviest to lightest through a one-sided play of
    // width `play`, so unloading never drops below loading.
    const double play = cfg.play_mm.value_or(r.measured_residual_mm);
    r.per_case_unloading_sim_mm.assign(cases.size(), 0.0);
    double y = r.per_case_sim_mm.back();
    for (std::size_t k = cases.size(); k-- > 0;) {
        y = std::min(y, r.per_case_sim_mm[k] + play);
        y = std::max(y, r.per_case_sim_mm[k]);
        r.per_case_unloading_sim_mm[k] = y;
    }
    r.residual_offset_mm = r.per_case_unloading_sim_mm.front();
    return r;
}

void write_result_table(std::ostream &out, std::span<const LoadCase> cases, const CharacterizationResult &r)
{
    out << "index,weight_g,force_N,loading_mm,unloading_mm,point_ratio_N_per_m,modulus_Pa,sim_loading_mm,"
           "sim_unloading_mm,error_pct\n";
    out << std::fixed;
    for (std::size_t i = 0; i < r.indices.size(); ++i) {
        const LoadCase &c = cases[i];
        out << c.index << ',' << std::setprecision(2) << c.weight_g << ',' << std::setprecision(4) << c.force_n
            << ',' << std::setprecision(2) << c.tip_loading_mm << ',' << c.tip_unloading_mm << ','
            << std::setprecision(3) << r.point_ratios[i] << ',' << std::scientific << std::setprecision(5)
            << r.per_case_E[i] << std::fixed << ',' << std::setprecision(2) << r.per_case_sim_mm[i] << ','
            << r.per_case_unloading_sim_mm[i] << ',' << r.per_case_error_pct[i] << '\n';
    }
}

std::string result_to_json(const CharacterizationResult &r)
{
    nlohmann::json j;
    j["indices"] = r.indices;
    j["forces_N"] = r.forces_n;
    j["point_ratios_N_per_m"] = r.point_ratios;
    j["trend_slope_N_per_m"] = r.trend_slope;
    j["residual_offset_mm"] = r.residual_offset_mm;
    j["measured_residual_mm"] = r.measured_residual_mm;
    j["calibrated_E_Pa"] = r.calibrated_E;
    j["per_case_E_Pa"] = r.per_case_E;
    j["per_case_sim_mm"] = r.per_case_sim_mm;
    j["per_case_unloading_sim_mm"] = r.per_case_unloading_sim_mm;
    j["per_case_error_pct"] = r.per_case_error_pct;
    if (r.quadratic) {
        j["quadratic_ratio_fit"] = {{"c0", r.quadratic->c0}, {"c1", r.quadratic->c1}, {"c2", r.quadratic->c2}};
    }
    return j.dump(2);
}

} // namespace cathsim::characterization
