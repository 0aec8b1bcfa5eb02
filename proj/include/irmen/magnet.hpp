#pragma once

#include <stdexcept>

#include "irmen/constants.hpp"
#include "irmen/rng.hpp"
#include "irmen/vec3.hpp"

// Stochastic macrospin model of the cell's free-layer nanomagnet.
//
// Frame convention, used throughout the project: the magnet's long (easy) axis
// is +x, the in-plane hard axis (magnetoelectric coupling and readout axis) is
// +y, and +z is out of plane. The neuron state is m_y.
namespace irmen {

struct MagnetGeometry {
    double length = 60e-9;    // m, easy axis
    double width = 15e-9;     // m, ME/readout axis
    double thickness = 6e-9;  // m, out of plane

    double volume() const { return length * width * thickness; }
};

struct MagnetParams {
    double ms = 1.7e6;                    // saturation magnetization, A/m
    double k_u = 4.5e4;                   // uniaxial crystalline anisotropy, J/m^3
    double alpha = 0.01;                  // Gilbert damping
    double gamma = consts::gamma_e;       // gyromagnetic ratio, rad/(s*T)
    double temperature = 300.0;           // K
    double alpha_me = 10.0 / consts::c_light;  // ME coefficient, s/m
    double me_thickness = 1e-9;           // ME dielectric thickness, m
};

struct MagnetState {
    Vec3 m{1.0, 0.0, 0.0};  // unit magnetization
};

// One effective-field evaluation broken out by contribution. total is the
// exact sum of the four components.
struct FieldSample {
    Vec3 anisotropy;
    Vec3 demag;
    Vec3 me;
    Vec3 thermal;
    Vec3 total;
};

void validate(const MagnetGeometry& g);
void validate(const MagnetParams& p);

// Diagonal demagnetizing factors (Nx, Ny, Nz) of the rectangular prism,
// analytic closed form for uniform magnetization. Factors sum to 1.
Vec3 demag_factors(const MagnetGeometry& g);

// H_k = 2*K*(m.e)*e / (mu0*Ms) with e = +x.
Vec3 anisotropy_field(const Vec3& m, const MagnetParams& p);

// H_d = -Ms * diag(N) * m.
Vec3 demag_field(const Vec3& m, const MagnetParams& p, const Vec3& n_factors);

// H_me = alpha_me * E / mu0 along +y, with E = v_cap / me_thickness.
Vec3 me_field(double v_cap, const MagnetParams& p);

// Brown's thermal field for one integration step of length dt: per-component
// i.i.d. normal with variance 2*alpha*kB*T / (gamma*mu0^2*Ms*V*dt).
Vec3 thermal_field(const MagnetParams& p, const MagnetGeometry& g, double dt, Rng& rng);
double thermal_field_sigma(const MagnetParams& p, const MagnetGeometry& g, double dt);

FieldSample field_sample(const Vec3& m, double v_cap, const MagnetParams& p,
                         const Vec3& n_factors, const Vec3& h_thermal);

// Landau-Lifshitz right-hand side with Gilbert damping:
//   dm/dt = -gamma*mu0 * [ m x H  +  alpha * m x (m x H) ].
Vec3 llg_rhs(const Vec3& m, const Vec3& h_eff, const MagnetParams& p);

// Classic RK4 step of the LLG under a caller-supplied deterministic field
// field_at(m, t); h_thermal is held constant across the four substages
// (Stratonovich-consistent closure) and added to every field evaluation.
// Renormalizes m afterwards. dt must be positive.
template <class FieldAt>
MagnetState rk4_step(const MagnetState& s, FieldAt&& field_at, const Vec3& h_thermal,
                     double t, double dt, const MagnetParams& p) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be > 0");
    const Vec3 m1 = s.m;
    const Vec3 k1 = llg_rhs(m1, field_at(m1, t) + h_thermal, p);
    const Vec3 m2 = m1 + (0.5 * dt) * k1;
    const Vec3 k2 = llg_rhs(m2, field_at(m2, t + 0.5 * dt) + h_thermal, p);
    const Vec3 m3 = m1 + (0.5 * dt) * k2;
    const Vec3 k3 = llg_rhs(m3, field_at(m3, t + 0.5 * dt) + h_thermal, p);
    const Vec3 m4 = m1 + dt * k3;
    const Vec3 k4 = llg_rhs(m4, field_at(m4, t + dt) + h_thermal, p);
    Vec3 m = m1 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return {normalized(m)};
}

// Thermal stability factor Delta = K*V / (kB*T). Requires T > 0.
double thermal_stability(const MagnetParams& p, const MagnetGeometry& g);

// Total in-plane stiffness opposing x -> y rotation: crystalline anisotropy
// plus shape anisotropy, K_tot = K + 0.5*mu0*Ms^2*(Ny - Nx). Sets the ME
// voltage that saturates the transfer function.
double inplane_stiffness(const MagnetParams& p, const MagnetGeometry& g);

}  // namespace irmen
