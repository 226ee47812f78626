#include "cathsim/errors.hpp"
#include "cathsim/scenario/runner.hpp"
#include "cathsim/scenario/trajectory_io.hpp"
#include "cathsim/teleop/follower_server.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace cathsim;
using namespace cathsim::scenario;

namespace {

catheter::CatheterModel ideal_model()
{
    catheter::CatheterSpec spec;
    spec.gravity_enabled = false;
    return catheter::CatheterModel(spec, catheter::BendingMapConfig::ideal());
}

ScenarioProgram coarse(PathKind kind, int reps = 1)
{
    ScenarioParams p;
    p.step_deg = 5.0;
    p.step_mm = 2.5;
    p.repetitions = reps;
    return gen_path(kind, p);
}

std::vector<ActuationTuple> commands(const std::vector<TrajectorySample> &rep)
{
    std::vector<ActuationTuple> out;
    for (const auto &s : rep) out.push_back(s.cmd);
    return out;
}

} // namespace

TEST_CASE("path programs")
{
    const auto circ = gen_path(PathKind::Circular);
    CHECK(circ.init == ActuationTuple{55.0, 0.0, 25.0});
    CHECK(circ.end() == circ.init);
    const auto pts = expand(circ);
    CHECK(pts.front() == circ.init);
    CHECK(pts.back() == circ.init);
    double max_r = 0.0;
    for (const auto &p : pts) max_r = std::max(max_r, p.rotation_deg);
    CHECK(max_r == 360.0);

    const auto inf = gen_path(PathKind::Infinity);
    CHECK(inf.init == ActuationTuple{55.0, 0.0, 30.0});
    for (const auto &p : expand(inf)) {
        CHECK(p.knob_deg >= -30.0);
        CHECK(p.knob_deg <= 30.0);
    }
    CHECK(expand(inf).back() == inf.init);

    const auto spi = gen_path(PathKind::Spiral);
    CHECK(spi.segments.front().target == ActuationTuple{100.0, 360.0, 30.0});
    CHECK(spi.end() == spi.init);

    CHECK_THROWS_AS(parse_path_kind("zigzag"), ParameterError);
    CHECK(parse_path_kind("infinity") == PathKind::Infinity);
    CHECK(approaching_targets().size() == 6);
}

TEST_CASE("interpolation")
{
    const auto s = interpolate({0, 0, 0}, {1, 10, 0}, 0.5, 1.0);
    CHECK(s.size() == 10);
    CHECK(s.back() == ActuationTuple{1, 10, 0});
    // A zero-length move still issues the target once.
    const auto hold = interpolate({1, 2, 3}, {1, 2, 3}, 0.5, 1.0);
    REQUIRE(hold.size() == 1);
    CHECK(hold.front() == ActuationTuple{1, 2, 3});
}

TEST_CASE("error metrics")
{
    std::vector<Vec3> ref{{0, 0, 0}, {1, 1, 1}, {2, 0, 3}};
    TrajectoryLog log;
    for (const auto &p : ref) {
        TrajectorySample s;
        s.tip_cm = p;
        log.samples.push_back(s);
    }
    const auto r = compute_errors(log, ref);
    for (const auto &pe : r.pooled) {
        CHECK(pe.mee_cm == 0.0);
        CHECK(pe.mae_cm == 0.0);
    }

    // Offset (0.3, 0.4) normal to a reference along (4, -3) in x-y.
    TrajectoryLog off;
    std::vector<Vec3> line{{0, 0, 0}, {8, -6, 0}};
    for (int i = 0; i <= 10; ++i) {
        TrajectorySample s;
        s.tip_cm = Vec3(0.8 * i + 0.3, -0.6 * i + 0.4, 0);
        off.samples.push_back(s);
    }
    const auto r2 = compute_errors(off, line);
    CHECK(r2.pooled[0].mee_cm == doctest::Approx(0.5));
    CHECK(r2.pooled[0].mae_cm == doctest::Approx(0.7));

    CHECK_THROWS_AS(compute_errors(TrajectoryLog{}, ref), EmptyInputError);
    CHECK_THROWS_AS(compute_errors(log, {Vec3::Zero()}), PreconditionError);
}

TEST_CASE("error metric is insensitive to reference density")
{
    auto circle = [](int n) {
        std::vector<Vec3> c;
        for (int i = 0; i <= n; ++i) {
            const double a = 2 * std::numbers::pi * i / n;
            c.emplace_back(3 * std::cos(a), 3 * std::sin(a), 2 * std::cos(a));
        }
        return c;
    };
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.2);
    std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
    TrajectoryLog log;
    for (int i = 0; i < 2000; ++i) {
        const double a = ang(rng);
        TrajectorySample s;
        s.tip_cm = Vec3(3 * std::cos(a) + noise(rng), 3 * std::sin(a) + noise(rng), 2 * std::cos(a) + noise(rng));
        log.samples.push_back(s);
    }
    const auto a = compute_errors(log, circle(360));
    const auto b = compute_errors(log, circle(720));
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(a.pooled[k].mee_cm - b.pooled[k].mee_cm) / b.pooled[k].mee_cm < 0.01);
    }
}

TEST_CASE("ideal circular run is a closed planar circle and deterministic")
{
    const auto prog = coarse(PathKind::Circular);
    InProcessSystem a{teleop::FollowerSession(ideal_model())};
    InProcessSystem b{teleop::FollowerSession(ideal_model())};
    const auto la = run_scenario(prog, a);
    const auto lb = run_scenario(prog, b);
    REQUIRE(la.samples.size() == lb.samples.size());
    bool identical = true;
    for (std::size_t i = 0; i < la.samples.size(); ++i) {
        identical = identical && la.samples[i].tip_cm == lb.samples[i].tip_cm && la.samples[i].cmd == lb.samples[i].cmd;
    }
    CHECK(identical);

    const double z0 = la.samples.front().tip_cm.z();
    const double r0 = la.samples.front().tip_cm.template head<2>().norm();
    double dz = 0.0, dr = 0.0;
    for (const auto &s : la.samples) {
        dz = std::max(dz, std::abs(s.tip_cm.z() - z0));
        dr = std::max(dr, std::abs(s.tip_cm.template head<2>().norm() - r0));
    }
    CHECK(dz < 1e-6);
    CHECK(dr < 1e-6);
    CHECK(r0 > 1.0);
    CHECK((la.samples.back().tip_cm - la.samples.front().tip_cm).norm() < 1e-6);
}

TEST_CASE("repetitions share the commanded stream")
{
    const auto prog = coarse(PathKind::Infinity, 5);
    InProcessSystem sys(teleop::FollowerSession{});
    const auto log = run_scenario(prog, sys);
    REQUIRE(log.repetitions() == 5);
    const auto first = commands(log.rep(0));
    for (int r = 1; r < 5; ++r) CHECK(commands(log.rep(r)) == first);
    CHECK(log.rep(0).front().t_s == 0.0);
}

TEST_CASE("two-path behaviour on the infinity program")
{
    const auto prog = coarse(PathKind::Infinity);
    InProcessSystem def(teleop::FollowerSession{});
    const auto g = two_path_gap(run_scenario(prog, def).rep(0), prog.segments[0].target, prog.segments[1].target);
    CHECK(g.pairs > 0);
    CHECK(g.mean_cm > 0.1);

    InProcessSystem ideal{teleop::FollowerSession(ideal_model())};
    const auto h = two_path_gap(run_scenario(prog, ideal).rep(0), prog.segments[0].target, prog.segments[1].target);
    CHECK(h.max_cm < 0.05);
}

TEST_CASE("approaching")
{
    const auto targets = approaching_targets();
    InProcessSystem ideal{teleop::FollowerSession(ideal_model())};
    const auto a = run_approaching(targets, 3, ideal, {}, 2.5, 5.0);
    for (const auto &s : a.stats.std_cm) CHECK(s.norm() == 0.0);

    InProcessSystem def(teleop::FollowerSession{});
    const auto b = run_approaching(targets, 3, def, {}, 2.5, 5.0);
    double worst = 0.0;
    for (const auto &s : b.stats.std_cm) worst = std::max(worst, s.norm());
    CHECK(worst > 0.0);
    bool any_clamped = false;
    for (bool c : b.stats.clamped) any_clamped = any_clamped || c;
    CHECK(any_clamped);
    CHECK_THROWS_AS(run_approaching({}, 1, def), PreconditionError);
}

TEST_CASE("trajectory csv round trip")
{
    const auto prog = coarse(PathKind::Spiral);
    InProcessSystem sys(teleop::FollowerSession{});
    const auto log = run_scenario(prog, sys);
    std::stringstream buf;
    write_log_csv(buf, log);
    const auto back = read_log_csv(buf);
    REQUIRE(back.samples.size() == log.samples.size());
    for (std::size_t i = 0; i < log.samples.size(); ++i) {
        CHECK(back.samples[i].tip_cm == log.samples[i].tip_cm);
        CHECK(back.samples[i].cmd == log.samples[i].cmd);
        CHECK(back.samples[i].t_s == log.samples[i].t_s);
    }
    std::istringstream bad("nope\n");
    CHECK_THROWS_AS(read_log_csv(bad), ParseError);
}

TEST_CASE("lossy link gives the same final state as in-process")
{
    const auto prog = coarse(PathKind::Infinity);
    InProcessSystem local(teleop::FollowerSession{});
    run_scenario(prog, local);

    auto [master, follower] = teleop::make_simulated_link({0.0, 0.0, 0.1, 11}, {0.0, 0.0, 0.1, 12});
    teleop::FollowerServer server(std::move(follower), teleop::FollowerSession{});
    server.start();
    LinkedSystem linked(std::move(master), server, {std::chrono::milliseconds(20), 20});
    run_scenario(prog, linked);
    CHECK(linked.resends() > 0);
    CHECK(server.state() == local.session().state());
}

TEST_CASE("dead link aborts with a partial log")
{
    auto [master, follower] = teleop::make_simulated_link({0.0, 0.0, 1.0, 1}, {});
    teleop::FollowerServer server(std::move(follower), teleop::FollowerSession{});
    server.start();
    LinkedSystem linked(std::move(master), server, {std::chrono::milliseconds(2), 3});
    CHECK_THROWS_AS(run_scenario(coarse(PathKind::Circular), linked), ScenarioAbortedError);
}
