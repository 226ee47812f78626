#include "cathsim/errors.hpp"
#include "cathsim/rod/cosserat.hpp"

#include <doctest.h>

#include <cmath>

using namespace cathsim;
using namespace cathsim::rod;

namespace {

RodParams catheter_params(double modulus = 1.7347e8)
{
    RodMaterial m;
    m.youngs_modulus = modulus;
    m.area = hollow_tube_area(0.002667, m.second_moment);
    return make_rod_params(m);
}

} // namespace

TEST_CASE("hat and vee")
{
    CHECK(hat(Vec3::Zero()).isZero());
    CHECK((vee(hat(Vec3(1, 2, 3))) - Vec3(1, 2, 3)).norm() == doctest::Approx(0.0));
    CHECK((hat(Vec3::UnitZ()) * Vec3::UnitX() - Vec3::UnitY()).norm() == doctest::Approx(0.0));
    Mat3 sym = Mat3::Identity();
    CHECK_THROWS_AS(vee(sym), PreconditionError);
}

TEST_CASE("orthonormalize recovers a rotation")
{
    Mat3 r = rotation_z(0.3);
    r(0, 1) += 1e-4;
    CHECK(orthonormality_defect(r) > 1e-5);
    CHECK(orthonormality_defect(orthonormalize(r)) < 1e-12);
}

TEST_CASE("bdf coefficients")
{
    auto a = bdf_coeffs(1.0, 0.0);
    CHECK(a.c0 == doctest::Approx(1.5));
    CHECK(a.c1 == doctest::Approx(-2.0));
    CHECK(a.c2 == doctest::Approx(0.5));
    CHECK(a.d1 == doctest::Approx(0.0));

    auto b = bdf_coeffs(0.01, 0.0);
    CHECK(b.c0 == doctest::Approx(150.0));
    CHECK(b.c1 == doctest::Approx(-200.0));
    CHECK(b.c2 == doctest::Approx(50.0));

    auto c = bdf_coeffs(1.0, -0.2);
    CHECK(c.c0 == doctest::Approx(1.625));
    CHECK(c.c1 == doctest::Approx(-2.0));
    CHECK(c.c2 == doctest::Approx(0.375));
    CHECK(c.d1 == doctest::Approx(-0.25));

    CHECK_THROWS_AS(bdf_coeffs(0.0), ParameterError);
    CHECK_THROWS_AS(bdf_coeffs(0.01, 0.1), ParameterError);
    CHECK(static_coeffs().is_static());
}

TEST_CASE("straight rod is an equilibrium")
{
    RodParams p = catheter_params();
    RodNode n;
    auto d = rod_derivatives(n, p, static_coeffs(), HistoryTerms{});
    CHECK(d.v_s.norm() == doctest::Approx(0.0));
    CHECK(d.u_s.norm() == doctest::Approx(0.0));

    auto s = integrate_shape(n, p, static_coeffs());
    CHECK((s.tip().p - Vec3(0, 0, 0.08)).norm() < 1e-12);
}

TEST_CASE("constant curvature traces a circular arc")
{
    RodParams p = catheter_params();
    const double kappa = 20.0;
    p.u_ref = Vec3(kappa, 0, 0);
    RodNode base;
    base.u = p.u_ref;
    auto s = integrate_shape(base, p, static_coeffs());
    const Vec3 centre(0, -1.0 / kappa, 0);
    double worst = 0.0;
    for (const auto &n : s.nodes) worst = std::max(worst, std::abs((n.p - centre).norm() - 1.0 / kappa));
    CHECK(worst < 5.0 * p.s_step());
    // Arc end at angle kappa * L about x.
    const Vec3 expect(0, (std::cos(kappa * 0.08) - 1) / kappa, std::sin(kappa * 0.08) / kappa);
    CHECK((s.tip().p - expect).norm() < 5.0 * p.s_step());
}

TEST_CASE("static solve")
{
    RodParams p = catheter_params();
    SUBCASE("unloaded")
    {
        auto s = solve_static(p);
        CHECK((s.tip().p - Vec3(0, 0, 0.08)).norm() < 1e-9);
    }
    SUBCASE("small transverse force matches the cantilever oracle")
    {
        const double f = 0.001;
        const double ei = 1.7347e8 * 1.9165e-12;
        auto s = solve_static(p, {{0, f, 0}, Vec3::Zero()});
        const double beam = f * std::pow(0.08, 3) / (3 * ei);
        CHECK(std::abs(s.tip().p.y() - beam) / beam < 0.02);
        CHECK(max_orthonormality_defect(s) < 1e-8);
    }
    SUBCASE("first characterization load")
    {
        auto s = solve_static(p, {{0, 0.0498, 0}, Vec3::Zero()});
        CHECK(s.tip().p.y() * 1e3 == doctest::Approx(23.27).epsilon(0.001));
    }
    SUBCASE("tendon pulls towards its side")
    {
        RodParams q = p;
        q.tendons.push_back({Vec3(0, 0.9e-3, 0), 0.2});
        auto s = solve_static(q);
        CHECK(s.tip().p.y() > 0.0);
        CHECK(s.tip().p.norm() < 0.08);
    }
    SUBCASE("gravity sags the tip")
    {
        RodParams q = p;
        q.gravity = Vec3(0, -9.81, 0);
        auto s = solve_static(q);
        CHECK(s.tip().p.y() < 0.0);
    }
    SUBCASE("iteration limit")
    {
        RodParams q = p;
        q.shooting.max_iterations = 1;
        CHECK_THROWS_AS(solve_static(q, {{0, 0.15, 0}, Vec3::Zero()}), ConvergenceError);
    }
}

TEST_CASE("invalid parameters")
{
    RodParams p = catheter_params();
    p.nodes = 1;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    RodMaterial m;
    m.youngs_modulus = -1;
    CHECK_THROWS_AS(make_rod_params(m), ParameterError);
}

TEST_CASE("dynamics")
{
    RodParams p = catheter_params();
    p.gravity = Vec3(0, -9.81, 0);
    const auto c = bdf_coeffs(0.01);
    SUBCASE("equilibrium is a fixed point")
    {
        auto s0 = solve_static(p);
        auto s = s0;
        for (int i = 0; i < 100; ++i) s = step_dynamics(s, p, c);
        CHECK((s.tip().p - s0.tip().p).norm() < 1e-6);
        CHECK(s.time == doctest::Approx(1.0));
    }
    SUBCASE("damped release settles on the static solution")
    {
        auto target = solve_static(p);
        auto s = solve_static(p, {{0.01, 0.01, 0}, Vec3::Zero()});
        for (int i = 0; i < 100; ++i) s = step_dynamics(s, p, c);
        CHECK((s.tip().p - target.tip().p).norm() < 1e-4);
        CHECK(max_orthonormality_defect(s) < 1e-6);
    }
    CHECK_THROWS_AS(step_dynamics(solve_static(p), p, static_coeffs()), ParameterError);
}

TEST_CASE("planar tendon loading stays planar and mirrors")
{
    RodParams p = catheter_params();
    RodParams up = p, down = p;
    up.tendons = {{Vec3(0, 0.9e-3, 0), 0.15}, {Vec3(0, -0.9e-3, 0), 0.0}};
    down.tendons = {{Vec3(0, 0.9e-3, 0), 0.0}, {Vec3(0, -0.9e-3, 0), 0.15}};
    const auto a = solve_static(up);
    const auto b = solve_static(down);
    double off_plane = 0.0, mirror = 0.0;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        off_plane = std::max({off_plane, std::abs(a.nodes[i].p.x()), std::abs(b.nodes[i].p.x())});
        mirror = std::max(mirror, (a.nodes[i].p - Vec3(b.nodes[i].p.x(), -b.nodes[i].p.y(), b.nodes[i].p.z())).norm());
    }
    CHECK(off_plane < 1e-9);
    CHECK(mirror < 1e-9);
    // Constant-curvature estimate: L * theta / 2 with theta = tau r L / EI.
    CHECK(a.tip().p.y() == doctest::Approx(0.08 * 0.0325 / 2).epsilon(0.05));
}

TEST_CASE("default grid against a fine grid")
{
    RodMaterial m;
    m.youngs_modulus = 1.7347e8;
    m.area = hollow_tube_area(0.002667, m.second_moment);
    const TipLoad load{{0, 0.0498, 0}, Vec3::Zero()};
    const double coarse = solve_static(make_rod_params(m), load).tip().p.y();
    m.nodes = 161;
    const double fine = solve_static(make_rod_params(m), load).tip().p.y();
    CHECK(std::abs(coarse - fine) / fine < 0.005);
}
