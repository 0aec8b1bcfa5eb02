#include "irmen/cenn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace irmen {

// ---------------------------------------------------------------------------
// Templates and the behavioral OTA.

Template quantize_weights(const Template& t, int bits) {
    if (bits <= 0) throw std::invalid_argument("quantize_weights: bits must be >= 1");
    Template q = t;
    if (bits >= 53) {  // finer than a double's mantissa: identity
        q.precision_bits = Template::unlimited_bits;
        return q;
    }
    q.precision_bits = bits;
    double w_max = std::abs(t.z);
    for (double w : t.a) w_max = std::max(w_max, std::abs(w));
    for (double w : t.b) w_max = std::max(w_max, std::abs(w));
    if (w_max == 0.0) return q;
    const double lim = static_cast<double>(1ll << (bits - 1));
    const double step = w_max / lim;
    auto snap = [&](double w) { return std::clamp(std::round(w / step), -lim, lim) * step; };
    for (auto& w : q.a) w = snap(w);
    for (auto& w : q.b) w = snap(w);
    q.z = snap(t.z);
    return q;
}

void validate(const OtaModel& m) {
    if (!(m.max_current > 0)) throw std::invalid_argument("OtaModel: max_current must be > 0");
    if (!(m.supply > 0)) throw std::invalid_argument("OtaModel: supply must be > 0");
    if (!(m.v_threshold > 0)) throw std::invalid_argument("OtaModel: v_threshold must be > 0");
    if (m.gate_cap < 0 || m.static_power < 0)
        throw std::invalid_argument("OtaModel: capacitance and power must be >= 0");
}

double ota_current(double v_in_normalized, double weight, const OtaModel& ota) {
    if (std::abs(v_in_normalized) > 1.05)
        throw std::invalid_argument("ota_current: normalized input out of range");
    const double i = weight * v_in_normalized * ota.max_current;
    return std::clamp(i, -ota.max_current, ota.max_current);
}

int synapse_ota_count(double weight) {
    if (weight == 0.0) return 0;
    return std::max(1, static_cast<int>(std::ceil(std::abs(weight) - 1e-12)));
}

double synapse_current(double x, double weight) {
    if (weight == 0.0) return 0.0;
    const int n = synapse_ota_count(weight);
    return n * std::clamp(weight / n * x, -1.0, 1.0);
}

void validate(const StageTiming& t) {
    if (!(t.powered_window > 0)) throw std::invalid_argument("StageTiming: powered_window must be > 0");
    if (!(t.stage_delay >= t.powered_window))
        throw std::invalid_argument("StageTiming: stage_delay shorter than powered_window");
}

// ---------------------------------------------------------------------------
// Plane stepper.

namespace engine {
namespace {

constexpr int resample = 2;  // steps per thermal field refresh

// One RK4 step of every cell in the plane. The magnetoelectric drive of cell
// i at window time t is ha[i] * U(t) + hb[i] * E(t), where U is the slewed
// drive rise and E the discharge decay; the caller passes both envelopes at
// the step's substage times (holds use U = 1, E = 0). Straight-line per cell
// so the loop vectorizes.
void plane_step(int n, const MacrospinKernel& k, double* __restrict mx,
                double* __restrict my, double* __restrict mz, double* __restrict sense,
                const double* __restrict ha, const double* __restrict hb, double U0,
                double Um, double U1, double E0, double Em, double E1,
                const double* __restrict htx, const double* __restrict hty,
                const double* __restrict htz, double dt, double ea, double eb) {
    const double kdx = k.dx, kdy = k.dy, kdz = k.dz, gp = k.gp, al = k.alpha;
    const double h2 = 0.5 * dt, h6 = dt / 6.0;

#define IRMEN_LLG(AX, AY, AZ, HY, KX, KY, KZ)                                       \
    hx_ = kdx * (AX) + tx;                                                          \
    hy_ = kdy * (AY) + (HY) + ty;                                                   \
    hz_ = kdz * (AZ) + tz;                                                          \
    cx = (AY)*hz_ - (AZ)*hy_;                                                       \
    cy = (AZ)*hx_ - (AX)*hz_;                                                       \
    cz = (AX)*hy_ - (AY)*hx_;                                                       \
    qx = (AY)*cz - (AZ)*cy;                                                         \
    qy = (AZ)*cx - (AX)*cz;                                                         \
    qz = (AX)*cy - (AY)*cx;                                                         \
    KX = -gp * (cx + al * qx);                                                      \
    KY = -gp * (cy + al * qy);                                                      \
    KZ = -gp * (cz + al * qz)

    for (int i = 0; i < n; ++i) {
        const double tx = htx[i], ty = hty[i], tz = htz[i];
        const double hy0 = ha[i] * U0 + hb[i] * E0;
        const double hym = ha[i] * Um + hb[i] * Em;
        const double hy1 = ha[i] * U1 + hb[i] * E1;
        const double x0 = mx[i], y0 = my[i], z0 = mz[i];
        double hx_, hy_, hz_, cx, cy, cz, qx, qy, qz;
        double k1x, k1y, k1z, k2x, k2y, k2z, k3x, k3y, k3z, k4x, k4y, k4z;

        IRMEN_LLG(x0, y0, z0, hy0, k1x, k1y, k1z);
        double ax = x0 + h2 * k1x, ay = y0 + h2 * k1y, az = z0 + h2 * k1z;
        IRMEN_LLG(ax, ay, az, hym, k2x, k2y, k2z);
        ax = x0 + h2 * k2x;
        ay = y0 + h2 * k2y;
        az = z0 + h2 * k2z;
        IRMEN_LLG(ax, ay, az, hym, k3x, k3y, k3z);
        ax = x0 + dt * k3x;
        ay = y0 + dt * k3y;
        az = z0 + dt * k3z;
        IRMEN_LLG(ax, ay, az, hy1, k4x, k4y, k4z);

        double ox = x0 + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        double oy = y0 + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        double oz = z0 + h6 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        const double inv = 1.0 / std::sqrt(ox * ox + oy * oy + oz * oz);
        ox *= inv;
        oy *= inv;
        oz *= inv;
        mx[i] = ox;
        my[i] = oy;
        mz[i] = oz;
        sense[i] = ea * sense[i] + eb * 0.5 * (y0 + oy);
    }
#undef IRMEN_LLG
}

struct Scratch {
    std::vector<double> ha, hb, htx, hty, htz;
    void resize(int n) {
        ha.resize(n);
        hb.resize(n);
        htx.assign(n, 0.0);
        hty.assign(n, 0.0);
        htz.assign(n, 0.0);
    }
};

Scratch& scratch() {
    static thread_local Scratch s;
    return s;
}

// The thermal field is held over `resample` consecutive steps, so its
// variance is the fluctuation-dissipation value for that hold interval, not
// for a single dt.
void run_steps(const Block& blk, const MacrospinKernel& k, Scratch& sc, double tau_in,
               double tau_slew, double sense_tau, double latch_tau, double* latch,
               int steps, double dt) {
    const double ea = std::exp(-dt / sense_tau);
    const double eb = 1.0 - ea;
    const double el = latch_tau > 0.0 ? std::exp(-dt / latch_tau) : 0.0;
    const bool thermal = k.sigma1 > 0.0;
    for (int s = 0; s < steps; ++s) {
        if (thermal && s % resample == 0) {
            const int span = std::min(resample, steps - s);
            const double sig = k.sigma(span * dt);
            for (int i = 0; i < blk.n; ++i) {
                sc.htx[i] = sig * blk.rng[i].normal();
                sc.hty[i] = sig * blk.rng[i].normal();
                sc.htz[i] = sig * blk.rng[i].normal();
            }
        }
        double U0 = 1.0, Um = 1.0, U1 = 1.0;
        double E0 = 0.0, Em = 0.0, E1 = 0.0;
        if (tau_in > 0.0) {
            U0 = drive_response(s * dt, tau_in, tau_slew);
            Um = drive_response((s + 0.5) * dt, tau_in, tau_slew);
            U1 = drive_response((s + 1.0) * dt, tau_in, tau_slew);
            E0 = std::exp(-(s * dt) / tau_in);
            Em = std::exp(-((s + 0.5) * dt) / tau_in);
            E1 = std::exp(-((s + 1.0) * dt) / tau_in);
        }
        plane_step(blk.n, k, blk.mx, blk.my, blk.mz, blk.sense, sc.ha.data(), sc.hb.data(),
                   U0, Um, U1, E0, Em, E1, sc.htx.data(), sc.hty.data(), sc.htz.data(), dt,
                   ea, eb);
        if (latch)
            for (int i = 0; i < blk.n; ++i)
                latch[i] = el * latch[i] + (1.0 - el) * blk.sense[i];
    }
}

}  // namespace

void window(const Block& blk, const MacrospinKernel& k, double tau_in, double tau_slew,
            double sense_tau, const double* vinf, int steps, double dt) {
    if (steps <= 0 || dt <= 0) throw std::invalid_argument("window: bad step partition");
    Scratch& sc = scratch();
    sc.resize(blk.n);
    for (int i = 0; i < blk.n; ++i) {
        sc.ha[i] = k.me_per_volt * vinf[i];
        sc.hb[i] = k.me_per_volt * blk.vcap[i];
    }
    run_steps(blk, k, sc, tau_in, tau_slew, sense_tau, 0.0, nullptr, steps, dt);
    const double w = steps * dt;
    const double E = std::exp(-w / tau_in);
    const double U = drive_response(w, tau_in, tau_slew);
    for (int i = 0; i < blk.n; ++i) blk.vcap[i] = blk.vcap[i] * E + vinf[i] * U;
}

void coast(const Block& blk, const MacrospinKernel& k, double sense_tau, double kick_v,
           int steps, double dt) {
    if (steps <= 0 || dt <= 0) throw std::invalid_argument("coast: bad step partition");
    Scratch& sc = scratch();
    sc.resize(blk.n);
    for (int i = 0; i < blk.n; ++i) {
        sc.ha[i] = k.me_per_volt * (blk.vcap[i] + kick_v);
        sc.hb[i] = 0.0;
    }
    run_steps(blk, k, sc, 0.0, 0.0, sense_tau, 0.0, nullptr, steps, dt);
}

void read(const Block& blk, const MacrospinKernel& k, double sense_tau, double latch_tau,
          double kick_v, double* latch, int steps, double dt) {
    if (steps <= 0 || dt <= 0) throw std::invalid_argument("read: bad step partition");
    Scratch& sc = scratch();
    sc.resize(blk.n);
    for (int i = 0; i < blk.n; ++i) {
        sc.ha[i] = k.me_per_volt * (blk.vcap[i] + kick_v);
        sc.hb[i] = 0.0;
    }
    run_steps(blk, k, sc, 0.0, 0.0, sense_tau, latch_tau, latch, steps, dt);
}

}  // namespace engine

// ---------------------------------------------------------------------------
// Grid.

CennGrid::CennGrid(int rows, int cols, const GridParams& p, std::uint64_t seed,
                   std::uint64_t grid_id)
    : n_rows(rows), n_cols(cols), params(p) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("CennGrid: empty grid");
    validate(p.cell);
    validate(p.magnet);
    validate(p.geometry);
    if (!(p.dt_window > 0) || !(p.dt_hold > 0) || !(p.dt_read > 0))
        throw std::invalid_argument("CennGrid: time steps must be > 0");
    const int n = rows * cols;
    mx.assign(n, 1.0);
    my.assign(n, 0.0);
    mz.assign(n, 0.0);
    vcap.assign(n, 0.0);
    sense.assign(n, 0.0);
    latch.assign(n, 0.0);
    rng.reserve(n);
    for (int i = 0; i < n; ++i)
        rng.emplace_back(seed, std::initializer_list<std::uint64_t>{
                                   grid_id, static_cast<std::uint64_t>(i)});
    kernel = MacrospinKernel::make(p.magnet, p.geometry);
    v_sat = saturation_voltage(p.magnet, p.geometry);
    r_shunt = shunt_resistance(p.cell, p.magnet, p.geometry);
    tau_in = input_tau(p.cell, p.magnet, p.geometry);
    tau_sense = sense_tau(p.cell);
}

StagePartition partition_stage(const GridParams& gp, const StageTiming& timing) {
    validate(timing);
    const double t_read = gp.cell.t_read;
    const double settle = timing.stage_delay - timing.powered_window - t_read;
    if (settle < 0)
        throw std::invalid_argument("stage timing: window plus read pulse exceed stage_delay");
    StagePartition p;
    p.n_window = std::max(1, static_cast<int>(std::lround(timing.powered_window / gp.dt_window)));
    p.dt_window = timing.powered_window / p.n_window;
    p.n_settle = std::max(1, static_cast<int>(std::lround(settle / gp.dt_hold)));
    p.dt_settle = settle / p.n_settle;
    p.n_read = std::max(1, static_cast<int>(std::lround(t_read / gp.dt_read)));
    p.dt_read = t_read / p.n_read;
    return p;
}

namespace {

engine::Block block_of(CennGrid& g) {
    return {g.mx.data(), g.my.data(), g.mz.data(),
            g.vcap.data(), g.sense.data(), g.rng.data(), g.size()};
}

// Read pulse over the whole grid: kick on, latch filter tracking the sense
// node from its settled value, sampled at the end of the pulse.
void read_and_latch(CennGrid& g, const StagePartition& p) {
    const double kick = g.params.cell.read_disturb * g.params.cell.v_drive;
    std::copy(g.sense.begin(), g.sense.end(), g.latch.begin());
    engine::read(block_of(g), g.kernel, g.tau_sense, g.params.cell.t_latch, kick,
                 g.latch.data(), p.n_read, p.dt_read);
}

// Written grid: powered window toward vinf, settle, end-of-stage read.
void advance_written(CennGrid& g, const std::vector<double>& vinf, const StageTiming& timing) {
    const StagePartition p = partition_stage(g.params, timing);
    engine::window(block_of(g), g.kernel, g.tau_in, g.params.cell.t_slew, g.tau_sense,
                   vinf.data(), p.n_window, p.dt_window);
    engine::coast(block_of(g), g.kernel, g.tau_sense, 0.0, p.n_settle, p.dt_settle);
    read_and_latch(g, p);
}

// Memory grid: fresh read first (its latch feeds this stage's drive), then
// isolated hold out to the stage delay.
void advance_memory(CennGrid& g, const StageTiming& timing) {
    const StagePartition p = partition_stage(g.params, timing);
    read_and_latch(g, p);
    const double rest = timing.stage_delay - g.params.cell.t_read;
    const int n = std::max(1, static_cast<int>(std::lround(rest / g.params.dt_hold)));
    engine::coast(block_of(g), g.kernel, g.tau_sense, 0.0, n, rest / n);
}

double finite_window_gain(const CennGrid& g, const StageTiming& timing) {
    return 1.0 / drive_response(timing.powered_window, g.tau_in, g.params.cell.t_slew);
}

}  // namespace

void CennGrid::load(const std::vector<double>& values, const StageTiming& timing) {
    if (static_cast<int>(values.size()) != size())
        throw std::invalid_argument("CennGrid::load: value count mismatch");
    const double gain = finite_window_gain(*this, timing) * params.cell.i_unit * r_shunt;
    std::vector<double> vinf(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        vinf[i] = std::clamp(values[i] * gain, -params.cell.v_rail, params.cell.v_rail);
    advance_written(*this, vinf, timing);
}

std::vector<ScheduleStage> alternate_roles(const std::vector<Template>& temps, int first_write) {
    std::vector<ScheduleStage> out;
    out.reserve(temps.size());
    for (std::size_t k = 0; k < temps.size(); ++k)
        out.push_back({temps[k], static_cast<int>((first_write + k) % 2), ""});
    return out;
}

StageRecord stage_step(CennGrid& mem, CennGrid& comp, const Template& t,
                       const StageTiming& timing, const OtaModel& ota) {
    if (mem.n_rows != comp.n_rows || mem.n_cols != comp.n_cols)
        throw std::invalid_argument("stage_step: grid dimensions differ");
    validate(ota);

    advance_memory(mem, timing);

    long ota_per_cell = synapse_ota_count(t.z);
    for (int k = 0; k < 9; ++k)
        ota_per_cell += synapse_ota_count(t.a[k]) + synapse_ota_count(t.b[k]);

    const double gain = finite_window_gain(comp, timing) * comp.params.cell.i_unit * comp.r_shunt;
    const double rail = comp.params.cell.v_rail;
    const int R = comp.n_rows, C = comp.n_cols;
    std::vector<double> vinf(comp.size());
    double drive_write = 0.0;
    const double bias = synapse_current(1.0, t.z);
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
            double u = bias;
            for (int k = 0; k < 9; ++k) {
                const int rr = r + k / 3 - 1;
                const int cc = c + k % 3 - 1;
                if (rr < 0 || rr >= R || cc < 0 || cc >= C) continue;  // fixed-zero boundary
                const int j = rr * C + cc;
                if (t.a[k] != 0.0) u += synapse_current(comp.latch[j], t.a[k]);
                if (t.b[k] != 0.0) u += synapse_current(mem.latch[j], t.b[k]);
            }
            const double v = std::clamp(u * gain, -rail, rail);
            vinf[r * C + c] = v;
            drive_write += v * v / comp.r_shunt * timing.powered_window;
        }
    }
    advance_written(comp, vinf, timing);

    StageRecord rec;
    rec.n_otas = ota_per_cell * comp.size();
    rec.n_cells = comp.size();
    rec.n_reads = mem.size();
    const double swing = 2.0 * ota.supply;
    rec.ota_static = rec.n_otas * ota.static_power * timing.powered_window;
    rec.gate_cycling = rec.n_otas * 0.5 * ota.gate_cap * swing * swing;
    rec.access_cycling = rec.n_otas * 0.5 * ota.gate_cap * ota.v_threshold * ota.v_threshold;
    const CellParams& cp = mem.params.cell;
    rec.drive = drive_write + rec.n_reads * cp.v_drive * cp.v_drive / (cp.r_fm + cp.r_gnd) * cp.t_read;
    rec.delay = timing.stage_delay;
    return rec;
}

int run_schedule(CennGrid& a, CennGrid& b, const std::vector<ScheduleStage>& schedule,
                 const StageTiming& timing, const OtaModel& ota,
                 std::vector<StageRecord>& records) {
    if (schedule.empty()) throw std::invalid_argument("run_schedule: empty schedule");
    int last = -1;
    for (const ScheduleStage& st : schedule) {
        if (st.write_grid != 0 && st.write_grid != 1)
            throw std::invalid_argument("run_schedule: write_grid must be 0 or 1");
        CennGrid& comp = st.write_grid == 0 ? a : b;
        CennGrid& mem = st.write_grid == 0 ? b : a;
        StageRecord rec = stage_step(mem, comp, st.temp, timing, ota);
        rec.tag = st.tag;
        records.push_back(rec);
        last = st.write_grid;
    }
    return last;
}

StageRecord stage_energy(int rows, int cols, const Template& t, const OtaModel& ota,
                         const CellParams& cell, double v_sat, const StageTiming& timing) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("stage_energy: negative grid");
    validate(ota);
    validate(cell);
    long ota_per_cell = synapse_ota_count(t.z);
    for (int k = 0; k < 9; ++k)
        ota_per_cell += synapse_ota_count(t.a[k]) + synapse_ota_count(t.b[k]);
    StageRecord rec;
    rec.n_cells = static_cast<long>(rows) * cols;
    rec.n_reads = rec.n_cells;
    rec.n_otas = ota_per_cell * rec.n_cells;
    const double swing = 2.0 * ota.supply;
    rec.ota_static = rec.n_otas * ota.static_power * timing.powered_window;
    rec.gate_cycling = rec.n_otas * 0.5 * ota.gate_cap * swing * swing;
    rec.access_cycling = rec.n_otas * 0.5 * ota.gate_cap * ota.v_threshold * ota.v_threshold;
    // full-scale bound for the write shunt plus the read stack dissipation
    rec.drive = rec.n_cells * v_sat * cell.i_unit * timing.powered_window +
                rec.n_reads * cell.v_drive * cell.v_drive / (cell.r_fm + cell.r_gnd) * cell.t_read;
    rec.delay = timing.stage_delay;
    return rec;
}

}  // namespace irmen
