#include "cathsim/catheter/catheter_model.hpp"
#include "cathsim/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace cathsim;
using namespace cathsim::catheter;

TEST_CASE("dead zone and play")
{
    CHECK(dead_zone(5.0, 10.0) == 0.0);
    CHECK(dead_zone(-10.0, 10.0) == 0.0);
    CHECK(dead_zone(15.0, 10.0) == doctest::Approx(5.0));
    CHECK(dead_zone(-15.0, 10.0) == doctest::Approx(-5.0));
    CHECK(play_operator(10.0, 0.0, 8.0) == doctest::Approx(6.0));
    CHECK(play_operator(10.0, 8.0, 8.0) == doctest::Approx(8.0));
    CHECK(play_operator(0.0, 8.0, 8.0) == doctest::Approx(4.0));
    CHECK(play_operator(3.0, 0.0, 0.0) == doctest::Approx(3.0));
}

TEST_CASE("knob to tip angle")
{
    BendingMapConfig cfg;
    SUBCASE("inside the dead zone")
    {
        ActuationState s;
        CHECK(knob_to_tip_angle(5.0, s, cfg) == doctest::Approx(0.0));
    }
    SUBCASE("full knob gives at least 90 degrees")
    {
        ActuationState s;
        CHECK(knob_to_tip_angle(35.0, s, cfg) >= 90.0);
        ActuationState l;
        CHECK(knob_to_tip_angle(-35.0, l, cfg) <= -90.0);
    }
    SUBCASE("hysteresis residual after a right sweep")
    {
        ActuationState s;
        double tip = 0.0;
        for (double k = 0; k <= 35; k += 1) tip = knob_to_tip_angle(k, s, cfg);
        for (double k = 34; k >= 0; k -= 1) tip = knob_to_tip_angle(k, s, cfg);
        CHECK(tip > 0.0);
        CHECK(s.hysteresis_memory == doctest::Approx(4.0));
    }
    SUBCASE("branches differ by play times gain at mid range")
    {
        ActuationState s;
        double up = 0.0, down = 0.0;
        for (double k = 0; k <= 35; k += 1) {
            const double t = knob_to_tip_angle(k, s, cfg);
            if (k == 22) up = t;
        }
        for (double k = 34; k >= 22; k -= 1) down = knob_to_tip_angle(k, s, cfg);
        CHECK(down - up >= cfg.backlash_play * cfg.gain_right - 1e-9);
    }
    SUBCASE("limit")
    {
        ActuationState s;
        CHECK_THROWS_AS(knob_to_tip_angle(36.0, s, cfg), LimitError);
    }
}

TEST_CASE("bending map calibration")
{
    const auto knobs = bending_sweep_protocol(35.0, 1.0, true);
    SUBCASE("round trip on the default map")
    {
        BendingMapConfig truth;
        auto fit = calibrate_bending_map(simulate_sweep(knobs, truth));
        CHECK(fit.gain_right == doctest::Approx(truth.gain_right).epsilon(0.01));
        CHECK(fit.gain_left == doctest::Approx(truth.gain_left).epsilon(0.01));
        CHECK(fit.dead_zone_half_width == doctest::Approx(truth.dead_zone_half_width).epsilon(0.01));
        CHECK(fit.backlash_play == doctest::Approx(truth.backlash_play).epsilon(0.01));
    }
    SUBCASE("asymmetric gains are told apart")
    {
        BendingMapConfig truth;
        truth.gain_right = 5.2;
        truth.gain_left = 3.9;
        truth.dead_zone_half_width = 6.0;
        truth.backlash_play = 5.0;
        auto fit = calibrate_bending_map(simulate_sweep(knobs, truth));
        CHECK(fit.gain_right == doctest::Approx(5.2).epsilon(0.01));
        CHECK(fit.gain_left == doctest::Approx(3.9).epsilon(0.01));
        CHECK(fit.gain_right != doctest::Approx(fit.gain_left));
    }
    SUBCASE("zero play")
    {
        BendingMapConfig truth;
        truth.backlash_play = 0.0;
        auto fit = calibrate_bending_map(simulate_sweep(knobs, truth));
        CHECK(fit.backlash_play == doctest::Approx(0.0).epsilon(1e-6));
    }
    SUBCASE("all samples in the dead zone")
    {
        const auto small = bending_sweep_protocol(9.0, 1.0, true);
        CHECK_THROWS_AS(calibrate_bending_map(simulate_sweep(small, BendingMapConfig{})), CalibrationError);
    }
}

TEST_CASE("knob to tensions")
{
    CatheterSpec spec;
    BendingMapConfig cfg;
    auto zero = knob_to_tensions(0.0, spec, cfg);
    CHECK(zero.first == 0.0);
    CHECK(zero.second == 0.0);
    auto right = knob_to_tensions(10.0, spec, cfg);
    CHECK(right.first > 0.0);
    CHECK(right.second == 0.0);
    auto left = knob_to_tensions(-10.0, spec, cfg);
    CHECK(left.first == 0.0);
    CHECK(left.second > 0.0);
    CHECK(left.second / right.first == doctest::Approx(cfg.gain_left / cfg.gain_right));
}

TEST_CASE("forward kinematics")
{
    CatheterSpec spec;
    spec.gravity_enabled = false;
    BendingMapConfig cfg;
    SUBCASE("home")
    {
        auto pose = forward_kinematics({}, spec, cfg);
        CHECK((pose.position_cm - Vec3(0, 0, 8.0)).norm() < 1e-7);
    }
    SUBCASE("translation is rigid")
    {
        ActuationState a;
        a.translation_mm = 55.0;
        auto pose = forward_kinematics(a, spec, cfg);
        CHECK(pose.position_cm.z() == doctest::Approx(8.0 + 5.5));
    }
    SUBCASE("half turn mirrors through the axis")
    {
        ActuationState a;
        a.translation_mm = 30.0;
        a.knob_deg = 25.0;
        a.hysteresis_memory = 11.0;
        auto p0 = forward_kinematics(a, spec, cfg).position_cm;
        a.rotation_deg = 180.0;
        auto p1 = forward_kinematics(a, spec, cfg).position_cm;
        CHECK(p1.x() == doctest::Approx(-p0.x()).epsilon(1e-9));
        CHECK(p1.y() == doctest::Approx(-p0.y()).epsilon(1e-9));
        CHECK(p1.z() == doctest::Approx(p0.z()).epsilon(1e-9));
        CHECK(std::abs(p0.y()) > 1.0);
    }
}

TEST_CASE("catheter model keeps path memory")
{
    CatheterModel m;
    m.apply({55.0, 0.0, 30.0});
    const double up = m.tip_pose().bend_angle_deg;
    m.apply({55.0, 0.0, 0.0});
    m.apply({55.0, 0.0, 30.0});
    CHECK(m.tip_pose().bend_angle_deg == doctest::Approx(up).epsilon(1e-9));
    m.apply({55.0, 0.0, 20.0});
    const double back = m.tip_pose().bend_angle_deg;
    m.reset();
    m.apply({55.0, 0.0, 20.0});
    CHECK(back > m.tip_pose().bend_angle_deg);
    CHECK_THROWS_AS(m.apply({0.0, 0.0, 40.0}), LimitError);
}

TEST_CASE("catheter constants validation")
{
    CatheterSpec spec;
    spec.tendon_offset_radius = 0.01;
    CHECK_THROWS_AS(spec.validate(), ParameterError);
}

TEST_CASE("monotone sweeps give monotone tip angles")
{
    BendingMapConfig cfg;
    ActuationState s;
    double prev = -1e9;
    for (double k = 0; k <= 35; k += 0.5) {
        const double t = knob_to_tip_angle(k, s, cfg);
        CHECK(t >= prev);
        prev = t;
    }
    for (double k = 35; k >= -35; k -= 0.5) {
        const double t = knob_to_tip_angle(k, s, cfg);
        CHECK(t <= prev);
        prev = t;
    }
}

TEST_CASE("rotation equivariance with gravity off")
{
    CatheterSpec spec;
    spec.gravity_enabled = false;
    BendingMapConfig cfg;
    ActuationState a;
    a.translation_mm = 40.0;
    a.knob_deg = 30.0;
    a.hysteresis_memory = 16.0;
    const Vec3 p0 = forward_kinematics(a, spec, cfg).position_cm;
    for (double phi : {37.0, 90.0, 200.0, -75.0}) {
        ActuationState b = a;
        b.rotation_deg = phi;
        const Vec3 p = forward_kinematics(b, spec, cfg).position_cm;
        const Vec3 expect = rod::rotation_z(phi * M_PI / 180.0) * p0;
        CHECK((p - expect).norm() < 1e-9);
    }
}
