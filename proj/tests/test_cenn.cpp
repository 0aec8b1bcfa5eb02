#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "irmen/cell.hpp"
#include "irmen/cenn.hpp"
#include "irmen/energy.hpp"

using namespace irmen;

namespace {

GridParams cold_params() {
    GridParams p;
    p.magnet.temperature = 0.0;
    return p;
}

GridParams warm_params() { return GridParams{}; }

Template copy_template() {
    Template t;
    t.b[4] = 1.0;
    return t;
}

std::vector<double> test_image(int n, double lo = -0.9, double hi = 0.9) {
    std::vector<double> v(n);
    Rng r(0xfeedULL, {1});
    for (double& x : v) x = r.uniform(lo, hi);
    return v;
}

double rms_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s / a.size());
}

}  // namespace

TEST_CASE("quantize: unlimited precision leaves the template unchanged") {
    Template t;
    t.b = {0.11, -0.7, 0.3, 0.0, 1.9, -0.05, 0.42, 0.9, -1.3};
    t.a[4] = 0.37;
    t.z = -0.61;
    const Template q = quantize_weights(t, Template::unlimited_bits);
    for (int k = 0; k < 9; ++k) {
        CHECK(q.a[k] == t.a[k]);
        CHECK(q.b[k] == t.b[k]);
    }
    CHECK(q.z == t.z);
}

TEST_CASE("quantize: one bit collapses to {-w_max, 0, +w_max}") {
    Template t;
    t.b = {0.6, -0.2, 0.0, 1.2, -1.2, 0.9, 0.1, -0.55, 0.3};
    t.z = 0.4;
    const Template q = quantize_weights(t, 1);
    const double w_max = 1.2;
    for (double w : q.b) {
        const bool on_grid = w == 0.0 || w == w_max || w == -w_max;
        CHECK(on_grid);
    }
    CHECK(q.b[3] == w_max);
    CHECK(q.b[4] == -w_max);
    CHECK(q.b[2] == 0.0);
}

TEST_CASE("quantize: error bounded by half a step and MSE nonincreasing in bits") {
    Template t;
    t.b = {0.813, -0.226, 0.004, 1.171, -0.518, 0.99, 0.333, -0.75, 0.062};
    t.a = {0.0, 0.12, 0.0, -0.41, 0.77, 0.0, 0.0, -0.08, 0.0};
    t.z = -0.354;
    double prev_mse = 1e300;
    for (int bits = 1; bits <= 12; ++bits) {
        const Template q = quantize_weights(t, bits);
        const double step = 1.171 / static_cast<double>(1ll << (bits - 1));
        double mse = 0.0;
        for (int k = 0; k < 9; ++k) {
            CHECK(std::abs(q.a[k] - t.a[k]) <= 0.5 * step + 1e-15);
            CHECK(std::abs(q.b[k] - t.b[k]) <= 0.5 * step + 1e-15);
            mse += (q.a[k] - t.a[k]) * (q.a[k] - t.a[k]);
            mse += (q.b[k] - t.b[k]) * (q.b[k] - t.b[k]);
        }
        mse += (q.z - t.z) * (q.z - t.z);
        CHECK(mse <= prev_mse + 1e-18);
        prev_mse = mse;
    }
}

TEST_CASE("quantize: idempotent at fixed bits, rejects bits < 1") {
    Template t;
    t.b = {0.6, -0.2, 0.0, 1.2, -1.2, 0.9, 0.1, -0.55, 0.3};
    for (int bits : {1, 3, 6}) {
        const Template q1 = quantize_weights(t, bits);
        const Template q2 = quantize_weights(q1, bits);
        for (int k = 0; k < 9; ++k) CHECK(q2.b[k] == q1.b[k]);
    }
    CHECK_THROWS(quantize_weights(t, 0));
    CHECK_THROWS(quantize_weights(t, -3));
}

TEST_CASE("ota_current: linear region, clamp and input-range contract") {
    CHECK(ota_current(0.0, 1.0) == 0.0);
    CHECK(ota_current(1.0, 1.0) == doctest::Approx(1e-6));
    CHECK(ota_current(1.0, 2.0) == doctest::Approx(1e-6));  // hard clamp
    CHECK(ota_current(-1.0, 2.0) == doctest::Approx(-1e-6));
    CHECK(ota_current(0.5, -0.6) == doctest::Approx(-0.3e-6));
    CHECK_THROWS(ota_current(1.2, 1.0));
}

TEST_CASE("synapse splitting keeps large weights linear over the full range") {
    CHECK(synapse_ota_count(0.0) == 0);
    CHECK(synapse_ota_count(0.5) == 1);
    CHECK(synapse_ota_count(1.0) == 1);
    CHECK(synapse_ota_count(2.0) == 2);
    CHECK(synapse_ota_count(-2.3) == 3);
    // one OTA would clamp weight 2 at 1; the split pair stays linear
    CHECK(synapse_current(0.9, 2.0) == doctest::Approx(1.8));
    CHECK(synapse_current(-0.9, 2.0) == doctest::Approx(-1.8));
    CHECK(synapse_current(0.3, -2.3) == doctest::Approx(-0.69));
    CHECK(synapse_current(1.0, 0.4) == doctest::Approx(0.4));
}

TEST_CASE("stage timing validation") {
    StageTiming ok;
    validate(ok);
    StageTiming bad;
    bad.powered_window = 2e-9;
    CHECK_THROWS(validate(bad));
    StageTiming zero;
    zero.powered_window = 0.0;
    CHECK_THROWS(validate(zero));
}

TEST_CASE("zero template: compute grid decays toward rest") {
    const GridParams p = cold_params();
    CennGrid a(4, 4, p, 1, 0);
    CennGrid b(4, 4, p, 1, 1);
    b.load(std::vector<double>(16, 0.8));
    REQUIRE(b.output(1, 1) > 0.7);
    stage_step(a, b, Template{}, StageTiming{});
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) CHECK(std::abs(b.output(r, c)) < 0.02);
}

TEST_CASE("copy stage at T=0 reproduces the memory image") {
    const GridParams p = cold_params();
    CennGrid a(6, 5, p, 7, 0);
    CennGrid b(6, 5, p, 7, 1);
    const std::vector<double> img = test_image(30);
    a.load(img);
    stage_step(a, b, copy_template(), StageTiming{});
    for (int i = 0; i < 30; ++i) {
        CHECK(b.latch[i] == doctest::Approx(a.latch[i]).epsilon(0.02));
        CHECK(std::abs(b.latch[i] - img[i]) < 5e-3);
    }
}

TEST_CASE("memory grid is unchanged by being read: voltage bit-identical, output < 1e-3") {
    const GridParams p = cold_params();
    CennGrid a(5, 5, p, 3, 0);
    CennGrid b(5, 5, p, 3, 1);
    a.load(test_image(25));
    const std::vector<double> v_before = a.vcap;
    const std::vector<double> out_before = a.latch;

    Template busy;  // every neighbor active, worst-case read traffic
    busy.b = {0.2, -0.3, 0.1, 0.5, 1.0, -0.4, 0.3, 0.2, -0.1};
    busy.a[4] = 0.5;
    busy.z = 0.2;
    stage_step(a, b, busy, StageTiming{});

    for (int i = 0; i < 25; ++i) {
        CHECK(a.vcap[i] == v_before[i]);  // capacitor never touched by reads
        CHECK(std::abs(a.latch[i] - out_before[i]) < 1e-3);
    }
}

TEST_CASE("round trip: two copy stages recover the original image") {
    const GridParams p = cold_params();
    CennGrid a(6, 6, p, 11, 0);
    CennGrid b(6, 6, p, 11, 1);
    const std::vector<double> img = test_image(36, -0.85, 0.85);
    a.load(img);

    const std::vector<Template> temps{copy_template(), copy_template()};
    std::vector<StageRecord> records;
    const int last = run_schedule(a, b, alternate_roles(temps), StageTiming{}, OtaModel{}, records);
    CHECK(last == 0);  // second copy wrote A again

    CHECK(rms_diff(a.latch, img) < 0.02);  // round-trip contract
    CHECK(rms_diff(a.latch, img) < 0.01);
    CHECK(records.size() == 2);
}

TEST_CASE("run_schedule rejects an empty schedule; records exact stage delay") {
    const GridParams p = cold_params();
    CennGrid a(3, 3, p, 1, 0);
    CennGrid b(3, 3, p, 1, 1);
    std::vector<StageRecord> records;
    CHECK_THROWS(run_schedule(a, b, {}, StageTiming{}, OtaModel{}, records));

    a.load(std::vector<double>(9, 0.5));
    const std::vector<Template> temps{copy_template(), copy_template(), copy_template()};
    run_schedule(a, b, alternate_roles(temps), StageTiming{}, OtaModel{}, records);
    REQUIRE(records.size() == 3);
    double total = 0.0;
    for (const StageRecord& r : records) {
        CHECK(r.delay == 1.5e-9);
        total += r.delay;
    }
    CHECK(total == doctest::Approx(4.5e-9).epsilon(1e-12));
}

TEST_CASE("role alternation: consecutive stages write opposite grids") {
    const std::vector<Template> temps(5, copy_template());
    const std::vector<ScheduleStage> sched = alternate_roles(temps);
    for (std::size_t k = 1; k < sched.size(); ++k)
        CHECK(sched[k].write_grid == 1 - sched[k - 1].write_grid);
}

TEST_CASE("single-cell grid matches the scalar cell simulator at T=0") {
    const GridParams p = cold_params();
    CennGrid g(1, 1, p, 5, 0);
    g.load({0.6});

    // the calibrated drive lands the capacitor exactly on u * v_sat
    CHECK(std::abs(g.vcap[0] - 0.6 * g.v_sat) < 1e-12);

    CellSim sim(p.cell, p.magnet, p.geometry);
    CellState s;
    Rng r(5, {99});
    sim.write_window(s, 0.6 * sim.quasi_static_gain(), r);
    sim.hold(s, 1.5e-9 - p.cell.t_window - p.cell.t_read, r);
    const ReadResult rd = sim.read_pulse(s, r);
    CHECK(std::abs(g.latch[0] - rd.value) < 1e-3);
    CHECK(std::abs(g.vcap[0] - s.v_cap) < 1e-12);
}

TEST_CASE("determinism: same seed gives bit-identical outputs at 300 K") {
    auto run = [](std::uint64_t seed) {
        const GridParams p = warm_params();
        CennGrid a(4, 4, p, seed, 0);
        CennGrid b(4, 4, p, seed, 1);
        a.load(test_image(16));
        std::vector<StageRecord> rec;
        run_schedule(a, b, alternate_roles({copy_template(), copy_template()}), StageTiming{},
                     OtaModel{}, rec);
        return a.latch;
    };
    const std::vector<double> x = run(42);
    const std::vector<double> y = run(42);
    const std::vector<double> z = run(43);
    CHECK(x == y);
    CHECK(x != z);
}

namespace {

// sd of repeated memory-grid readouts, one stage apart
double latch_noise_sd(const GridParams& p, std::uint64_t seed) {
    CennGrid mem(2, 2, p, seed, 0);
    CennGrid scratch(2, 2, p, seed, 1);
    mem.load(std::vector<double>(4, 0.0));
    std::vector<double> samples;
    for (int k = 0; k < 40; ++k) {
        stage_step(mem, scratch, Template{}, StageTiming{});
        for (double v : mem.latch) samples.push_back(v);
    }
    double mean = 0.0, var = 0.0;
    for (double s : samples) mean += s;
    mean /= samples.size();
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= samples.size() - 1;
    return std::sqrt(var);
}

}  // namespace

TEST_CASE("thermal read noise shrinks with magnet volume through the read chain") {
    // equilibrium sigma(m_y) is 0.0296 at 60 nm, but the fluctuation rides
    // the GHz precession line, which the cascaded sense and latch poles
    // attenuate; the latched leftover measures near 1.5e-3
    const double sd60 = latch_noise_sd(warm_params(), 21);
    CHECK(sd60 > 5e-4);
    CHECK(sd60 < 3e-3);

    // shorter magnet: bigger sigma (smaller K V) and a slower, less
    // attenuated precession line; both push read noise up (measures ~16x)
    GridParams p17 = warm_params();
    p17.geometry.length = 17e-9;
    const double sd17 = latch_noise_sd(p17, 21);
    CHECK(sd17 > 6.0 * sd60);
    CHECK(sd17 < 40.0 * sd60);
}

TEST_CASE("stage energy: zero grid is free, components extensive, records match") {
    Template t = copy_template();
    t.z = 0.3;
    const CellParams cp;
    const StageRecord zero = stage_energy(0, 5, t, OtaModel{}, cp, 0.0154, StageTiming{});
    CHECK(zero.total() == 0.0);

    const StageRecord one = stage_energy(7, 5, t, OtaModel{}, cp, 0.0154, StageTiming{});
    const StageRecord two = stage_energy(14, 5, t, OtaModel{}, cp, 0.0154, StageTiming{});
    CHECK(two.ota_static == doctest::Approx(2.0 * one.ota_static));
    CHECK(two.gate_cycling == doctest::Approx(2.0 * one.gate_cycling));
    CHECK(two.access_cycling == doctest::Approx(2.0 * one.access_cycling));
    CHECK(two.drive == doctest::Approx(2.0 * one.drive));
    CHECK(one.n_otas == 2 * 35);  // copy weight + bias OTA per cell

    const EnergyReport rep = image_energy({one, two});
    CHECK(rep.total == doctest::Approx(one.total() + two.total()));
    CHECK(rep.delay == doctest::Approx(3.0e-9));
    CHECK(total_delay(28) == doctest::Approx(42e-9).epsilon(1e-12));
    CHECK(total_delay(0) == 0.0);
}

TEST_CASE("saturating drive: outputs pinned at +-1 for large template sums") {
    const GridParams p = cold_params();
    CennGrid a(3, 3, p, 9, 0);
    CennGrid b(3, 3, p, 9, 1);
    a.load(std::vector<double>(9, 0.9));
    Template t;
    t.b[4] = 1.0;
    t.z = 2.0;  // pushes every cell far past saturation
    stage_step(a, b, t, StageTiming{});
    for (int i = 0; i < 9; ++i) CHECK(b.latch[i] > 0.999);
    t.z = -2.0;
    t.b[4] = -1.0;
    stage_step(b, a, t, StageTiming{});
    for (int i = 0; i < 9; ++i) CHECK(a.latch[i] < -0.999);
}
