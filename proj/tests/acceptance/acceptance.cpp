// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failures.

#include "cathsim/catheter/catheter_model.hpp"
#include "cathsim/characterization/characterization.hpp"
#include "cathsim/errors.hpp"
#include "cathsim/rod/cosserat.hpp"
#include "cathsim/scenario/runner.hpp"
#include "cathsim/teleop/clutch.hpp"
#include "cathsim/teleop/follower.hpp"
#include "cathsim/teleop/follower_server.hpp"
#include "cathsim/teleop/gripper.hpp"
#include "cathsim/teleop/rtt.hpp"
#include "cathsim/teleop/wire.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

using namespace cathsim;

namespace {

int g_failures = 0;

void report(bool ok, const char *name, const std::string &detail)
{
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    g_failures += ok ? 0 : 1;
}

template <typename... A>
std::string fmt(const char *f, A... a)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

std::vector<characterization::LoadCase> table3()
{
    std::ifstream in(std::string(CATHSIM_DATA_DIR) + "/table3.csv");
    return characterization::read_load_cases_csv(in);
}

// Reference columns of the load table, cases 1..10.
constexpr double kRefRatio[10] = {1.968, 2.005, 2.097, 2.209, 2.354, 2.504, 2.607, 2.776, 2.882, 3.038};
constexpr double kRefErrorPct[10] = {2.56, 4.84, 7.21, 9.36, 11.51, 13.29, 15.54, 16.41, 19.10, 20.47};

void cantilever()
{
    catheter::CatheterSpec spec;
    const rod::RodMaterial m = spec.material();
    const rod::RodParams p = rod::make_rod_params(m);
    const double ei = m.youngs_modulus * m.second_moment;
    double worst = 0.0, slowest = 0.0, max_frac = 0.0;
    for (double f : {0.001, 0.003, 0.006}) {
        const auto t0 = std::chrono::steady_clock::now();
        const rod::RodState s = rod::solve_static(p, {{0.0, f, 0.0}, rod::Vec3::Zero()});
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double beam = f * std::pow(m.length, 3) / (3.0 * ei);
        worst = std::max(worst, std::abs(s.tip().p.y() - beam) / beam);
        slowest = std::max(slowest, secs);
        max_frac = std::max(max_frac, beam / m.length);
    }
    report(worst < 0.02 && slowest < 1.0 && max_frac < 0.05, "cantilever-oracle",
           fmt("max rel error %.3f%% (< 2%%), slowest solve %.4f s (< 1 s), deflection up to %.2f%% of L, N=41",
               100 * worst, slowest, 100 * max_frac));
}

void table3_arithmetic()
{
    const auto cases = table3();
    double worst_ratio = 0.0, worst_err = 0.0;
    for (int i = 1; i <= 10; ++i) {
        const auto &c = cases[i];
        worst_ratio = std::max(worst_ratio, std::abs(characterization::point_ratio(c) - kRefRatio[i - 1]));
        const double err = (c.tip_loading_mm - *c.sim_target_mm) / 80.0 * 100.0;
        worst_err = std::max(worst_err, std::abs(err - kRefErrorPct[i - 1]));
    }
    const double slope = characterization::trend_slope(cases);
    const double resid = characterization::hysteresis_residual(cases);
    const bool ok = worst_ratio <= 0.005 && std::abs(slope - 3.018) <= 0.02 && std::abs(resid - 7.79) < 1e-12 &&
                    worst_err <= 0.05;
    report(ok, "table3-arithmetic",
           fmt("max |ratio - reference| %.4f (<= 0.005), trend slope %.4f N/m (3.018 +/- 0.02), residual %.2f mm, "
               "max error-column deviation %.4f (<= 0.05)",
               worst_ratio, slope, resid, worst_err));
}

void calibrated_e()
{
    const auto cases = table3();
    characterization::CharacterizationConfig cfg;
    cfg.mode = characterization::CharacterizationConfig::Mode::PerCaseTargets;
    const auto r = characterization::run_characterization(cases, catheter::CatheterSpec{}.material(), cfg);
    double worst_mm = 0.0, worst_pct = 0.0;
    for (int i = 1; i <= 10; ++i) {
        worst_mm = std::max(worst_mm, std::abs(r.per_case_sim_mm[i] - *cases[i].sim_target_mm));
        worst_pct = std::max(worst_pct, std::abs(r.per_case_error_pct[i] - kRefErrorPct[i - 1]));
    }
    report(worst_mm < 0.05 && worst_pct <= 0.1, "calibrated-E",
           fmt("max |sim - target| %.5f mm (< 0.05), max |error%% - reference| %.4f (<= 0.1), E(case 1) = %.5g Pa",
               worst_mm, worst_pct, r.calibrated_E));
}

void bending()
{
    // Rod-level tip angle on the default catheter, gravity included.
    auto sweep = [](const std::vector<double> &knobs) {
        catheter::CatheterModel model;
        std::vector<double> tips;
        for (double k : knobs) {
            model.apply({0.0, 0.0, k});
            tips.push_back(model.tip_pose().bend_angle_deg);
        }
        return tips;
    };
    std::vector<double> dz;
    for (double k = 0; k <= 10; k += 1) dz.push_back(k);
    for (double k = 9; k >= -10; k -= 1) dz.push_back(k);
    for (double k = -9; k <= 0; k += 1) dz.push_back(k);
    double max_dz = 0.0;
    for (double t : sweep(dz)) max_dz = std::max(max_dz, std::abs(t));

    const double at35 = sweep({35.0}).back();

    std::vector<double> cycle;
    for (double k = 0; k <= 35; k += 1) cycle.push_back(k);
    for (double k = 34; k >= -35; k -= 1) cycle.push_back(k);
    for (double k = -34; k <= 0; k += 1) cycle.push_back(k);
    const auto tips = sweep(cycle);
    double area = 0.0;
    for (std::size_t i = 1; i < cycle.size(); ++i) {
        area += 0.5 * (tips[i] + tips[i - 1]) * (cycle[i] - cycle[i - 1]);
    }
    area = std::abs(area);
    const double residual = tips.back() - tips.front();

    report(max_dz < 3.0 && at35 >= 90.0 && area > 0.0 && std::abs(residual) > 1e-3, "bending-nonlinearity",
           fmt("max |tip| within +/-10 deg knob %.3f deg (< 3), knob 35 -> %.2f deg (>= 90), loop area %.1f deg^2, "
               "residual after +/-35 cycle %.3f deg",
               max_dz, at35, area, residual));
}

void metrics()
{
    std::mt19937_64 rng(20261015);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    bool ordered = true;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<rod::Vec3> ref(2 + rng() % 20);
        for (auto &p : ref) p = rod::Vec3(u(rng), u(rng), u(rng));
        scenario::TrajectoryLog log;
        const int n = 1 + static_cast<int>(rng() % 50);
        for (int i = 0; i < n; ++i) {
            scenario::TrajectorySample s;
            s.rep = static_cast<int>(rng() % 3);
            s.t_s = i * 0.004;
            s.tip_cm = rod::Vec3(u(rng), u(rng), u(rng));
            log.samples.push_back(s);
        }
        const auto r = scenario::compute_errors(log, ref);
        for (std::size_t k = 0; k < 3; ++k) {
            ordered = ordered && r.pooled[k].mae_cm >= r.pooled[k].mee_cm;
            for (const auto &pe : r.per_rep) ordered = ordered && pe[k].mae_cm >= pe[k].mee_cm;
        }
    }

    // 3-4-5: reference runs along (4, -3) in each plane, samples sit at a
    // constant (0.3, 0.4) offset, which is normal to it.
    bool exact = true;
    std::string got;
    for (std::size_t k = 0; k < 3; ++k) {
        auto embed = [k](double a, double b) {
            switch (k) {
            case 0: return rod::Vec3(a, b, 0.0);
            case 1: return rod::Vec3(a, 0.0, b);
            default: return rod::Vec3(0.0, a, b);
            }
        };
        std::vector<rod::Vec3> ref{embed(0, 0), embed(4, -3), embed(8, -6)};
        scenario::TrajectoryLog log;
        for (int i = 0; i <= 20; ++i) {
            scenario::TrajectorySample s;
            s.t_s = i * 0.004;
            s.tip_cm = embed(0.4 * i + 0.3, -0.3 * i + 0.4);
            log.samples.push_back(s);
        }
        const auto r = scenario::compute_errors(log, ref);
        exact = exact && std::abs(r.pooled[k].mee_cm - 0.5) < 1e-12 && std::abs(r.pooled[k].mae_cm - 0.7) < 1e-12;
        got += fmt(" %s=(%.12f, %.12f)", scenario::plane_name(scenario::kPlanes[k]), r.pooled[k].mee_cm,
                   r.pooled[k].mae_cm);
    }
    report(ordered && exact, "metric-consistency",
           std::string(ordered ? "MAE >= MEE in every plane for 1000 random logs" : "MAE < MEE found") +
               "; 3-4-5 fixture MEE/MAE:" + got);
}

void scenarios()
{
    bool closed = true;
    for (auto kind : {scenario::PathKind::Circular, scenario::PathKind::Infinity, scenario::PathKind::Spiral}) {
        const auto prog = scenario::gen_path(kind);
        const auto pts = scenario::expand(prog);
        closed = closed && pts.front() == pts.back() && pts.front() == prog.init;
    }

    auto gap_for = [](catheter::CatheterSpec spec, catheter::BendingMapConfig map) {
        const auto prog = scenario::gen_path(scenario::PathKind::Infinity);
        scenario::InProcessSystem sys(teleop::FollowerSession(catheter::CatheterModel(spec, map)));
        const auto log = scenario::run_scenario(prog, sys);
        double lo = 1e9, hi = 0.0;
        for (int r = 0; r < log.repetitions(); ++r) {
            const auto g = scenario::two_path_gap(log.rep(r), prog.segments[0].target, prog.segments[1].target);
            lo = std::min(lo, g.mean_cm);
            hi = std::max(hi, g.max_cm);
        }
        return std::pair{lo, hi};
    };
    const auto [def_lo, def_hi] = gap_for(catheter::CatheterSpec{}, catheter::BendingMapConfig{});
    catheter::CatheterSpec ideal;
    ideal.gravity_enabled = false;
    const auto [id_lo, id_hi] = gap_for(ideal, catheter::BendingMapConfig::ideal());
    (void)def_hi;
    (void)id_lo;
    report(closed && def_lo > 0.1 && id_hi < 0.05, "scenario-closure-two-path",
           fmt("programs closed: %s; infinity subpath-2 gap default min-over-reps mean %.3f cm (> 0.1), ideal max "
               "%.2e cm (< 0.05)",
               closed ? "yes" : "no", def_lo, id_hi));
}

void protocol()
{
    std::mt19937_64 rng(7);
    bool roundtrip = true;
    for (int i = 0; i < 100000; ++i) {
        teleop::WireMessage m;
        m.type = static_cast<teleop::MsgType>(rng() % 4);
        m.seq = static_cast<std::uint32_t>(rng());
        m.timestamp_us = rng();
        m.translation_um = static_cast<std::int32_t>(rng());
        m.rotation_mdeg = static_cast<std::int32_t>(rng());
        m.knob_mdeg = static_cast<std::int32_t>(rng());
        m.flags = static_cast<std::uint8_t>(rng());
        roundtrip = roundtrip && teleop::decode(teleop::encode(m)) == m;
    }

    bool rejected = true;
    std::size_t trials = 0;
    for (int msg = 0; msg < 50; ++msg) {
        teleop::WireMessage m = teleop::make_command(static_cast<std::uint32_t>(rng()), rng(), {55.0, 12.5, -7.25});
        const teleop::Frame f = teleop::encode(m);
        for (std::size_t i = 0; i < f.size(); ++i) {
            for (int v = 0; v < 256; ++v) {
                if (v == f[i]) continue;
                teleop::Frame g = f;
                g[i] = static_cast<std::uint8_t>(v);
                ++trials;
                try {
                    teleop::decode(g);
                    rejected = false;
                } catch (const CorruptionError &) {
                }
            }
        }
    }

    // Real datagram sockets on loopback.
    double median_ms = 1e9;
    std::size_t received = 0;
    {
        teleop::FollowerServer server(std::make_unique<teleop::UdpChannel>("127.0.0.1", 0), teleop::FollowerSession{});
        server.start();
        teleop::UdpChannel master("127.0.0.1", 0);
        const auto s = teleop::measure_rtt(master, server.address(), 10000);
        median_ms = s.median_us / 1000.0;
        received = s.received;
    }

    // Replays: duplicates and late copies of delivered commands leave the
    // full follower state unchanged; reordering drops superseded commands
    // and ends on the newest setpoint.
    std::vector<teleop::WireMessage> stream;
    std::uniform_real_distribution<double> ut(0.0, 130.0), ur(-400.0, 400.0), ub(-40.0, 40.0);
    for (std::uint32_t s = 1; s <= 2000; ++s) {
        stream.push_back(teleop::make_command(s, s * 10000ull, {ut(rng), ur(rng), ub(rng)}));
    }
    auto final_state = [](const std::vector<teleop::WireMessage> &msgs) {
        teleop::FollowerSession f;
        for (const auto &m : msgs) f.apply(teleop::decode(teleop::encode(m)), m.timestamp_us);
        return std::pair{f.state(), f.counters()};
    };
    const auto [clean, clean_counters] = final_state(stream);
    std::vector<teleop::WireMessage> replay;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        replay.push_back(stream[i]);
        if (rng() % 3 == 0) replay.push_back(stream[i]);
        if (i > 5 && rng() % 4 == 0) replay.push_back(stream[i - 1 - rng() % 5]);
    }
    const auto [dup, dup_counters] = final_state(replay);
    std::vector<teleop::WireMessage> shuffled = stream;
    for (std::size_t i = 0; i + 4 < shuffled.size(); i += 4) {
        std::shuffle(shuffled.begin() + i, shuffled.begin() + i + 4, rng);
    }
    const auto [reord, reord_counters] = final_state(shuffled);
    const bool replay_ok = dup == clean && dup_counters.duplicates + dup_counters.stale == replay.size() - stream.size() &&
                           reord.tuple() == clean.tuple();

    report(roundtrip && rejected && median_ms < 2.0 && received == 10000 && replay_ok, "protocol",
           fmt("1e5 round trips %s; %zu single-byte corruptions %s; loopback RTT median %.4f ms over %zu/10000 "
               "pongs (< 2 ms); duplicate/late replay state %s, reordered final setpoint %s",
               roundtrip ? "exact" : "MISMATCH", trials, rejected ? "all rejected" : "NOT all rejected", median_ms,
               received, dup == clean ? "identical" : "DIFFERS", reord.tuple() == clean.tuple() ? "identical" : "DIFFERS"));
}

void state_machines()
{
    // Gripper: breadth-first enumeration of reachable states.
    teleop::GripperConfig cfg;
    const double dts[] = {0.0, 1.0, 10.0, 25.0, 49.0, 50.0, 60.0};
    auto key = [](const teleop::GripperState &s) {
        return std::tuple{static_cast<int>(s.phase), s.cart_gripper, s.static_gripper, s.overlap_timer_ms};
    };
    std::set<decltype(key(teleop::GripperState{}))> seen;
    std::vector<teleop::GripperState> frontier{teleop::GripperState{}};
    seen.insert(key(frontier.front()));
    bool always_one = true, both_only_in_overlap = true, cart_only_when_translating = true;
    while (!frontier.empty()) {
        const auto s = frontier.back();
        frontier.pop_back();
        always_one = always_one && (s.cart_gripper || s.static_gripper);
        const bool overlap = s.phase == teleop::GripperPhase::HandoffToCart || s.phase == teleop::GripperPhase::HandoffToStatic;
        both_only_in_overlap = both_only_in_overlap && (!(s.cart_gripper && s.static_gripper) || overlap);
        for (bool moving : {false, true}) {
            for (double dt : dts) {
                const auto n = teleop::gripper_schedule(moving, s, dt, cfg);
                if (n.cart_gripper && !n.static_gripper && !moving) cart_only_when_translating = false;
                if (seen.insert(key(n)).second) frontier.push_back(n);
            }
        }
    }

    // Clutch: random interleavings of pedal toggles and handle motion.
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    const teleop::ClutchConfig ccfg;
    bool bookkeeping = true;
    for (int run = 0; run < 10000; ++run) {
        teleop::ClutchState c;
        double sum_t = 0.0, sum_r = 0.0, sum_b = 0.0;
        const int events = 1 + static_cast<int>(rng() % 40);
        for (int e = 0; e < events; ++e) {
            if (rng() % 4 == 0) {
                teleop::set_pedal(c, !c.engaged);
                continue;
            }
            // The handle cannot leave its track.
            const double want = d(rng);
            const double dt = std::clamp(c.master_travel_mm + want, 0.0, ccfg.master_track_mm()) - c.master_travel_mm;
            teleop::InputDelta delta{dt, d(rng), d(rng)};
            teleop::InputDelta realized;
            teleop::master_apply(delta, c, ccfg, &realized);
            bookkeeping = bookkeeping && realized.translation_mm == delta.translation_mm;
            if (c.engaged) {
                sum_t += delta.translation_mm;
                sum_r += delta.rotation_deg;
            }
            sum_b += delta.knob_deg;
        }
        const auto cmd = c.command();
        bookkeeping = bookkeeping && std::abs(cmd.translation_mm - sum_t) < 1e-9 &&
                      std::abs(cmd.rotation_deg - sum_r) < 1e-9 && std::abs(cmd.knob_deg - sum_b) < 1e-9 &&
                      c.master_travel_mm >= 0.0 && c.master_travel_mm <= ccfg.master_track_mm();
    }
    report(always_one && both_only_in_overlap && cart_only_when_translating && bookkeeping, "clutch-gripper",
           fmt("%zu reachable gripper states, >=1 engaged in all: %s, both only in overlap: %s, cart-only only while "
               "translating: %s; clutch command == sum of engaged deltas over 1e4 interleavings: %s",
               seen.size(), always_one ? "yes" : "no", both_only_in_overlap ? "yes" : "no",
               cart_only_when_translating ? "yes" : "no", bookkeeping ? "yes" : "no"));
}

void dynamics()
{
    catheter::CatheterSpec spec;
    rod::RodParams p = rod::make_rod_params(spec.material(), {}, {0.0, -catheter::kGravity, 0.0});

    // Release a tip load and let the damped rod settle under gravity.
    const rod::RodState target = rod::solve_static(p);
    rod::RodState s = rod::solve_static(p, {{0.0, 0.02, 0.0}, rod::Vec3::Zero()});
    const double gap0 = (s.tip().p - target.tip().p).norm();
    const auto c = rod::bdf_coeffs(0.01);
    double settle_time = -1.0;
    while (s.time < 5.0 - 1e-9) {
        s = rod::step_dynamics(s, p, c);
        if (settle_time < 0.0 && (s.tip().p - target.tip().p).norm() < 1e-4) settle_time = s.time;
    }
    const double gap_end = (s.tip().p - target.tip().p).norm();

    // dt-halving, successive differences at t = 0.02 s.
    p.gravity.setZero();
    const rod::RodState start = rod::solve_static(p, {{0.0, 0.01, 0.0}, rod::Vec3::Zero()});
    std::vector<rod::Vec3> tips;
    for (double dt : {4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4}) {
        rod::RodState r = start;
        const auto cc = rod::bdf_coeffs(dt);
        const int n = static_cast<int>(std::lround(0.02 / dt));
        for (int i = 0; i < n; ++i) r = rod::step_dynamics(r, p, cc);
        tips.push_back(r.tip().p);
    }
    double min_order = 1e9;
    std::string orders;
    for (std::size_t i = 0; i + 2 < tips.size(); ++i) {
        const double o = std::log2((tips[i] - tips[i + 1]).norm() / (tips[i + 1] - tips[i + 2]).norm());
        min_order = std::min(min_order, o);
        orders += fmt(" %.2f", o);
    }
    report(settle_time >= 0.0 && gap_end < 1e-4 && min_order >= 1.0, "dynamics",
           fmt("released from %.2e m, tip within 1e-4 m of static at t = %.2f s, gap at 5 s %.2e m; observed orders%s "
               "(>= 1)",
               gap0, settle_time, gap_end, orders.c_str()));
}

} // namespace

int main()
{
    struct Check
    {
        const char *name;
        void (*fn)();
    };
    const Check checks[] = {{"cantilever-oracle", cantilever},
                            {"table3-arithmetic", table3_arithmetic},
                            {"calibrated-E", calibrated_e},
                            {"bending-nonlinearity", bending},
                            {"metric-consistency", metrics},
                            {"scenario-closure-two-path", scenarios},
                            {"protocol", protocol},
                            {"clutch-gripper", state_machines},
                            {"dynamics", dynamics}};
    for (const auto &c : checks) {
        try {
            c.fn();
        } catch (const std::exception &e) {
            report(false, c.name, std::string("exception: ") + e.what());
        }
    }
    std::printf("%d failure(s)\n", g_failures);
    return g_failures;
}
