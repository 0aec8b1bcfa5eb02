#pragma once

#include <cmath>

#include "irmen/magnet.hpp"
#include "irmen/rng.hpp"

namespace irmen {

/// Electrical environment of one neuron cell: the input capacitor charged by
/// OTA current behind access transistors, the shunt that sets the full-scale
/// operating point, and the spin-orbit read stack that senses m_y.
struct CellParams {
    double c_in = 1e-15;          // F, input capacitor
    double v_rail = 0.5;          // V, capacitor clamp (supply rails)
    double r_ir = 20e3;           // ohm, spin-orbit source impedance
    double r_fm = 10e3;           // ohm, magnet stack series resistance
    double r_gnd = 10e3;          // ohm, ground return resistance
    double c_load = 1e-15;        // F, readout node capacitance
    double v_drive = 0.1;         // V, charge-line drive during reads
    double eta = 0.8;             // spin to charge conversion efficiency
    double read_disturb = 1e-4;   // fraction of v_drive coupled onto the cap while reading
    double i_unit = 1e-6;         // A, full-scale OTA output current
    double t_window = 130e-12;    // s, powered integration window per stage
    double t_read = 200e-12;      // s, read pulse width
    double t_slew = 40e-12;       // s, OTA output turn-on time constant
    double t_latch = 60e-12;      // s, latch input time constant during reads
};
void validate(const CellParams& p);

// Open-circuit read amplitude: V1 = v_drive * eta * r_ir / (r_fm + r_gnd).
// The sensed voltage is V1 * m_y.
double v1_reference(const CellParams& p);

// Capacitor voltage at which the equilibrium m_y reaches +-1:
//   v_sat = 2 * K_tot * t_me / (Ms * alpha_me).
double saturation_voltage(const MagnetParams& mp, const MagnetGeometry& g);

// Shunt chosen so a full-scale input current settles exactly at v_sat.
double shunt_resistance(const CellParams& p, const MagnetParams& mp, const MagnetGeometry& g);

// Zero-temperature equilibrium transfer function from capacitor voltage to
// m_y: a straight line that clips at +-1 once |v| exceeds v_sat.
double equilibrium_my(double v_cap, const MagnetParams& mp, const MagnetGeometry& g);

// Time constants of the electrical input node and of the magnet's small-angle
// relaxation about the easy axis (used to size settle phases).
double input_tau(const CellParams& p, const MagnetParams& mp, const MagnetGeometry& g);
double magnet_relax_tau(const MagnetParams& mp, const MagnetGeometry& g);
double sense_tau(const CellParams& p);  // r_ir * c_load

// Normalized capacitor step response when the OTA output current itself turns
// on with time constant tau_slew: the cascade of the slew and the input RC.
// Rises 0 -> 1; tau_slew = 0 degenerates to 1 - exp(-t/tau_in). The slew
// matters beyond energy realism: an abruptly switched drive rings the magnet
// hard enough to disturb first reads.
double drive_response(double t, double tau_in, double tau_slew);

// ---------------------------------------------------------------------------
// Fused macrospin stepper. The effective field of an axis-aligned prism is
// diagonal in m plus a constant magnetoelectric term along y, which makes the
// right-hand side cheap enough for grid-scale integration. Cross-checked
// against the generic rk4_step in the tests.
struct MacrospinKernel {
    double dx = 0.0;           // field = (dx*mx, dy*my + hy, dz*mz) in A/m
    double dy = 0.0;
    double dz = 0.0;
    double me_per_volt = 0.0;  // A/m of y field per volt on the capacitor
    double gp = 0.0;           // gamma * mu0
    double alpha = 0.0;
    double sigma1 = 0.0;       // thermal sigma for dt = 1 s; sigma(dt) = sigma1/sqrt(dt)

    static MacrospinKernel make(const MagnetParams& p, const MagnetGeometry& g);

    double sigma(double dt) const { return sigma1 / std::sqrt(dt); }

    Vec3 rhs(const Vec3& m, double hy, const Vec3& ht) const {
        const double hx_ = dx * m.x + ht.x;
        const double hy_ = dy * m.y + hy + ht.y;
        const double hz_ = dz * m.z + ht.z;
        // m x H and m x (m x H)
        const double cx = m.y * hz_ - m.z * hy_;
        const double cy = m.z * hx_ - m.x * hz_;
        const double cz = m.x * hy_ - m.y * hx_;
        const double dx2 = m.y * cz - m.z * cy;
        const double dy2 = m.z * cx - m.x * cz;
        const double dz2 = m.x * cy - m.y * cx;
        return {-gp * (cx + alpha * dx2), -gp * (cy + alpha * dy2), -gp * (cz + alpha * dz2)};
    }

    // One RK4 step with the magnetoelectric field sampled at the substage
    // times (hy0 at t, hym at t+dt/2, hy1 at t+dt) and a thermal field frozen
    // across the step. Renormalizes.
    void step(Vec3& m, double hy0, double hym, double hy1, const Vec3& ht, double dt) const {
        const Vec3 k1 = rhs(m, hy0, ht);
        const Vec3 k2 = rhs(m + (0.5 * dt) * k1, hym, ht);
        const Vec3 k3 = rhs(m + (0.5 * dt) * k2, hym, ht);
        const Vec3 k4 = rhs(m + dt * k3, hy1, ht);
        Vec3 out = m + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double inv = 1.0 / norm(out);
        m = {out.x * inv, out.y * inv, out.z * inv};
    }

    void step(Vec3& m, double hy, const Vec3& ht, double dt) const { step(m, hy, hy, hy, ht, dt); }
};

// ---------------------------------------------------------------------------
// Cell-level state and operations (used directly by the memory and transfer
// experiments; the grid engine fuses the same physics over whole planes).

struct CellState {
    MagnetState magnet{Vec3{1, 0, 0}};
    double v_cap = 0.0;  // held on the isolated capacitor between windows
    double sense = 0.0;  // continuously filtered m_y seen by the sense amp
};

struct ReadResult {
    double v_out = 0.0;  // latched sense voltage, V1 * value
    double value = 0.0;  // normalized readout in [-1, 1]
};

struct CellSim {
    CellParams cell;
    MagnetParams magnet;
    MagnetGeometry geometry;
    double dt = 1.3e-12;       // step for driven phases (window, read)
    double dt_hold = 2.74e-12; // step for long isolated holds

    // derived at construction
    MacrospinKernel kernel;
    double v_sat = 0.0;
    double r_shunt = 0.0;
    double v1 = 0.0;

    CellSim(const CellParams& c, const MagnetParams& m, const MagnetGeometry& g);

    // Drive the powered window with current u*i_unit (u normalized, pre-gain
    // applied by the caller), then isolate the capacitor. The drive that makes
    // the capacitor land exactly on u*v_sat despite the finite window is
    // u * quasi_static_gain().
    void write_window(CellState& s, double u, Rng& rng) const;
    double quasi_static_gain() const;

    // Let the isolated cell evolve for `duration` (thermal only at T > 0).
    void hold(CellState& s, double duration, Rng& rng) const;

    // 200 ps read pulse: drives the charge line, couples a transient
    // read_disturb * v_drive onto the capacitor for the pulse duration, and
    // latches the sense node through the latch input pole (t_latch), sampled
    // at the end of the pulse. The cascaded r_ir * c_load and t_latch poles
    // pass the stored level but reject the GHz precession ring, so reads
    // settle on m_y and not on write transients. The stored capacitor
    // voltage is unchanged.
    ReadResult read_pulse(CellState& s, Rng& rng) const;

    // Place the magnet at its zero-temperature equilibrium for the stored
    // capacitor voltage (convenient initial condition for experiments).
    void seat_equilibrium(CellState& s) const;
};

}  // namespace irmen
