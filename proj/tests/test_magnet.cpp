#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "irmen/constants.hpp"
#include "irmen/magnet.hpp"
#include "irmen/rng.hpp"
#include "oracles.hpp"

using namespace irmen;
using irmen::consts::mu0;

namespace {
const MagnetGeometry kGeom{};      // 60 x 15 x 6 nm
const MagnetParams kParams{};      // CoFeB-like defaults

MagnetState settle_t0(MagnetState s, const MagnetGeometry& g, const MagnetParams& p,
                      const Vec3& h_extra, double duration, double dt) {
    const Vec3 n = demag_factors(g);
    auto field = [&](const Vec3& m, double) {
        return anisotropy_field(m, p) + demag_field(m, p, n) + h_extra;
    };
    const int steps = static_cast<int>(duration / dt);
    for (int i = 0; i < steps; i++) s = rk4_step(s, field, Vec3{0, 0, 0}, i * dt, dt, p);
    return s;
}
}  // namespace

TEST_CASE("demag factors sum to one and order with aspect ratio") {
    const Vec3 n = demag_factors(kGeom);
    CHECK(n.x + n.y + n.z == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n.x > 0.0);
    // longest edge has the smallest factor, thinnest the largest
    CHECK(n.x < n.y);
    CHECK(n.y < n.z);
}

TEST_CASE("demag factors of a cube are exactly one third") {
    const Vec3 n = demag_factors({50e-9, 50e-9, 50e-9});
    CHECK(n.x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(n.y == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(n.z == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("demag factors are scale invariant") {
    const Vec3 a = demag_factors({60e-9, 15e-9, 6e-9});
    const Vec3 b = demag_factors({60e-3, 15e-3, 6e-3});
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-13));
    CHECK(a.y == doctest::Approx(b.y).epsilon(1e-13));
    CHECK(a.z == doctest::Approx(b.z).epsilon(1e-13));
}

TEST_CASE("thin film limit concentrates the factor on the normal") {
    const Vec3 n = demag_factors({1e-6, 1e-6, 1e-9});
    CHECK(n.z > 0.995);
    CHECK(n.x < 0.0025);
}

TEST_CASE("closed form demag factors match surface integral oracle") {
    // oracle works in scale free units, use nanometres
    for (double length : {17.0, 30.0, 60.0}) {
        const Vec3 impl = demag_factors({length * 1e-9, 15e-9, 6e-9});
        const Vec3 ref = oracle::demag_factors_numeric(length, 15.0, 6.0);
        CHECK(std::abs(impl.x - ref.x) < 1e-6);
        CHECK(std::abs(impl.y - ref.y) < 1e-6);
        CHECK(std::abs(impl.z - ref.z) < 1e-6);
    }
}

TEST_CASE("geometry validation") {
    CHECK_THROWS(demag_factors({0.0, 15e-9, 6e-9}));
    CHECK_THROWS(validate(MagnetGeometry{-1e-9, 15e-9, 6e-9}));
    CHECK_THROWS(validate(MagnetGeometry{10e-9, 15e-9, 6e-9}));  // length < width
    CHECK_NOTHROW(validate(kGeom));
}

TEST_CASE("uniaxial anisotropy field along the easy axis") {
    // 2K/(mu0 Ms) * mx, easy axis x
    const Vec3 h = anisotropy_field(Vec3{1, 0, 0}, kParams);
    CHECK(h.x == doctest::Approx(4.21292e4).epsilon(1e-4));
    CHECK(h.y == 0.0);
    CHECK(h.z == 0.0);
    const Vec3 tilted = anisotropy_field(Vec3{0.5, 0.6, 0.3}, kParams);
    CHECK(tilted.x == doctest::Approx(0.5 * 4.21292e4).epsilon(1e-4));
}

TEST_CASE("demag field opposes magnetization componentwise") {
    const Vec3 n = demag_factors(kGeom);
    const Vec3 m{0.2, -0.5, 0.8};
    const Vec3 h = demag_field(m, kParams, n);
    CHECK(h.x == doctest::Approx(-kParams.ms * n.x * m.x));
    CHECK(h.y == doctest::Approx(-kParams.ms * n.y * m.y));
    CHECK(h.z == doctest::Approx(-kParams.ms * n.z * m.z));
}

TEST_CASE("magnetoelectric field converts capacitor voltage to a y field") {
    // alpha_me * (v / t_me) / mu0 with alpha_me = 10 / c
    const Vec3 h = me_field(0.1, kParams);
    CHECK(h.x == 0.0);
    CHECK(h.z == 0.0);
    CHECK(h.y == doctest::Approx(2.65442e6).epsilon(1e-4));
    // linear in voltage, sign carries through
    CHECK(me_field(-0.05, kParams).y == doctest::Approx(-0.5 * 2.65442e6).epsilon(1e-4));
}

TEST_CASE("thermal field amplitude follows the fluctuation dissipation value") {
    const double sigma = thermal_field_sigma(kParams, kGeom, 1e-12);
    CHECK(sigma == doctest::Approx(5696.9).epsilon(1e-3));
    // scales as 1/sqrt(V dt)
    const double sigma2 = thermal_field_sigma(kParams, kGeom, 4e-12);
    CHECK(sigma2 == doctest::Approx(0.5 * sigma).epsilon(1e-9));
    MagnetParams cold = kParams;
    cold.temperature = 0.0;
    CHECK(thermal_field_sigma(cold, kGeom, 1e-12) == 0.0);
    CHECK_THROWS(thermal_field_sigma(kParams, kGeom, 0.0));
}

TEST_CASE("field sample total is the exact sum of contributions") {
    Rng rng(1, {2});
    const Vec3 m = normalized(Vec3{0.3, -0.4, 0.2});
    const Vec3 n = demag_factors(kGeom);
    const Vec3 ht = thermal_field(kParams, kGeom, 1e-12, rng);
    const FieldSample f = field_sample(m, 0.07, kParams, n, ht);
    const Vec3 sum = f.anisotropy + f.demag + f.me + f.thermal;
    CHECK(f.total.x == sum.x);
    CHECK(f.total.y == sum.y);
    CHECK(f.total.z == sum.z);
    CHECK(norm(f.thermal) > 0.0);
}

TEST_CASE("llg torque is orthogonal to m and vanishes when m is along the field") {
    const Vec3 h{1e4, -3e4, 2e4};
    for (const Vec3& m : {Vec3{1, 0, 0}, Vec3{0.6, 0.64, 0.48}, Vec3{-0.2, 0.9, 0.38}}) {
        const Vec3 mm = normalized(m);
        const Vec3 r = llg_rhs(mm, h, kParams);
        CHECK(std::abs(dot(r, mm)) < 1e-6 * norm(r) + 1e-30);
    }
    // rounding in the cross product leaves a residual proportional to the
    // torque scale gamma mu0 |H|, not an absolute epsilon
    const Vec3 aligned = llg_rhs(normalized(Vec3{1e4, -3e4, 2e4}), h, kParams);
    CHECK(norm(aligned) < 1e-12 * kParams.gamma * mu0 * norm(h));
}

TEST_CASE("precession sense about the field") {
    // m along +x, field along +z: dm/dt = -gamma mu0 (m x H) points along +y
    MagnetParams undamped = kParams;
    undamped.alpha = 0.0;
    const Vec3 r = llg_rhs(Vec3{1, 0, 0}, Vec3{0, 0, 1e5}, undamped);
    CHECK(r.y > 0.0);
    CHECK(std::abs(r.x) < 1e-12 * r.y);
    CHECK(r.y == doctest::Approx(kParams.gamma * mu0 * 1e5).epsilon(1e-12));
}

TEST_CASE("larmor frequency in a constant field within 0.1 percent") {
    const double h0 = 1e5;
    const double omega = kParams.gamma * mu0 * h0;  // 2.2128e10 rad/s
    const double period = 2.0 * M_PI / omega;
    const double dt = period / 64.0;
    auto field = [&](const Vec3&, double) { return Vec3{0, 0, h0}; };
    MagnetParams undamped = kParams;
    undamped.alpha = 1e-12;  // pure precession
    MagnetState s{Vec3{std::sin(1.0), 0.0, std::cos(1.0)}};
    double phi_prev = 0.0, phi_acc = 0.0;
    const int n = 64 * 10;  // ten periods
    for (int i = 0; i < n; i++) {
        s = rk4_step(s, field, Vec3{0, 0, 0}, i * dt, dt, undamped);
        const double phi = std::atan2(s.m.y, s.m.x);
        double d = phi - phi_prev;
        if (d > M_PI) d -= 2.0 * M_PI;
        if (d < -M_PI) d += 2.0 * M_PI;
        phi_acc += d;
        phi_prev = phi;
    }
    const double omega_meas = phi_acc / (n * dt);
    CHECK(omega_meas == doctest::Approx(omega).epsilon(1e-3));
    // cone angle preserved without damping, up to integrator truncation
    CHECK(s.m.z == doctest::Approx(std::cos(1.0)).epsilon(1e-5));
}

TEST_CASE("integrator converges at fourth order against the damped closed form") {
    const double h0 = 1e5, alpha = 0.05, theta0 = 1.0, phi0 = 0.3;
    const double gp = kParams.gamma * mu0;
    MagnetParams p = kParams;
    p.alpha = alpha;
    auto field = [&](const Vec3&, double) { return Vec3{0, 0, h0}; };
    auto exact = [&](double t) {
        const double theta = 2.0 * std::atan(std::tan(0.5 * theta0) * std::exp(-gp * alpha * h0 * t));
        const double phi = phi0 + gp * h0 * t;
        return Vec3{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
    };
    const double t_final = 2.0 * 2.0 * M_PI / (gp * h0);
    auto run = [&](int steps) {
        MagnetState s{exact(0.0)};
        const double dt = t_final / steps;
        for (int i = 0; i < steps; i++) s = rk4_step(s, field, Vec3{0, 0, 0}, i * dt, dt, p);
        return norm(s.m - exact(t_final));
    };
    const double e1 = run(25);
    const double e2 = run(50);
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.8);
    CHECK(order < 4.5);
}

TEST_CASE("unit norm is preserved through long thermal runs") {
    MagnetParams p = kParams;
    MagnetState s{Vec3{1, 0, 0}};
    const Vec3 n = demag_factors(kGeom);
    const double dt = 1e-12;
    Rng rng(77, {0});
    const double sigma = thermal_field_sigma(p, kGeom, dt);
    auto field = [&](const Vec3& m, double) { return anisotropy_field(m, p) + demag_field(m, p, n); };
    double worst = 0.0;
    for (int i = 0; i < 200000; i++) {
        const Vec3 ht = rng.normal3() * sigma;
        s = rk4_step(s, field, ht, i * dt, dt, p);
        worst = std::max(worst, std::abs(norm(s.m) - 1.0));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("zero temperature relaxation returns to the easy axis") {
    MagnetState s{Vec3{std::cos(1.0), std::sin(1.0), 0.0}};  // 57 degrees off axis
    s = settle_t0(s, kGeom, kParams, Vec3{0, 0, 0}, 5e-9, 1e-12);
    CHECK(s.m.x > 0.999);
    CHECK(std::abs(s.m.z) < 1e-3);
}

TEST_CASE("static y field tilts the equilibrium by field over total stiffness") {
    const double k_tot = inplane_stiffness(kParams, kGeom);
    const double h_k = 2.0 * k_tot / (mu0 * kParams.ms);
    for (double frac : {0.15, 0.45}) {
        MagnetState s{Vec3{1, 0, 0}};
        s = settle_t0(s, kGeom, kParams, Vec3{0, frac * h_k, 0}, 8e-9, 1e-12);
        CHECK(s.m.y == doctest::Approx(frac).epsilon(2e-3));
    }
}

TEST_CASE("thermal stability ratios for the length family") {
    MagnetGeometry small = kGeom;
    small.length = 17e-9;
    CHECK(thermal_stability(kParams, small) == doctest::Approx(16.6226).epsilon(1e-3));
    CHECK(thermal_stability(kParams, kGeom) == doctest::Approx(58.668).epsilon(1e-3));
    MagnetParams cold = kParams;
    cold.temperature = 0.0;
    CHECK_THROWS(thermal_stability(cold, kGeom));
}

TEST_CASE("in plane stiffness grows with length across the family") {
    double prev = 0.0;
    for (double length : {17.0, 25.0, 30.0, 40.0, 50.0, 60.0}) {
        MagnetGeometry g = kGeom;
        g.length = length * 1e-9;
        const double k_tot = inplane_stiffness(kParams, g);
        CHECK(k_tot > prev);
        prev = k_tot;
    }
    CHECK(prev > 1e5);  // the 60 nm device is strongly stiffened by shape
}

TEST_CASE("sampled occupancy matches the Boltzmann sphere integral") {
    // small cube so shape anisotropy cancels and the barrier is a few kBT
    MagnetGeometry cube{6.5e-9, 6.5e-9, 6.5e-9};
    MagnetParams p = kParams;
    const Vec3 n = demag_factors(cube);
    const Vec3 h_bias{3.5e3, 0.0, 0.0};
    const double dt = 5e-13;
    const double sigma = thermal_field_sigma(p, cube, dt);
    auto field = [&](const Vec3& m, double) {
        return anisotropy_field(m, p) + demag_field(m, p, n) + h_bias;
    };
    Rng rng(2024, {11});
    MagnetState s{Vec3{1, 0, 0}};
    const int burn = 200000, run = 3000000;
    for (int i = 0; i < burn; i++) s = rk4_step(s, field, rng.normal3() * sigma, 0, dt, p);
    long plus = 0;
    for (int i = 0; i < run; i++) {
        s = rk4_step(s, field, rng.normal3() * sigma, 0, dt, p);
        if (s.m.x > 0.0) plus++;
    }
    const double p_emp = double(plus) / run;
    const double ratio = oracle::boltzmann_ratio(p.k_u, p.ms, p.temperature, cube.volume(), n, h_bias);
    const double p_ref = ratio / (1.0 + ratio);
    // loose bound here, the acceptance suite runs the long batched version
    CHECK(p_emp == doctest::Approx(p_ref).epsilon(0.08));
}
