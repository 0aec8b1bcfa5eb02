#include <cmath>
#include <stdexcept>

#include "irmen/magnet.hpp"

namespace irmen {

void validate(const MagnetGeometry& g) {
    if (!(g.length > 0.0 && g.width > 0.0 && g.thickness > 0.0)) {
        throw std::invalid_argument("magnet geometry: all dimensions must be > 0");
    }
    if (g.length < g.width) {
        throw std::invalid_argument("magnet geometry: length must be >= width (easy axis along length)");
    }
}

void validate(const MagnetParams& p) {
    if (!(p.ms > 0.0)) throw std::invalid_argument("magnet params: Ms must be > 0");
    if (!(p.k_u > 0.0)) throw std::invalid_argument("magnet params: K must be > 0");
    if (!(p.alpha > 0.0)) throw std::invalid_argument("magnet params: alpha must be > 0");
    if (!(p.gamma > 0.0)) throw std::invalid_argument("magnet params: gamma must be > 0");
    if (p.temperature < 0.0) throw std::invalid_argument("magnet params: T must be >= 0");
    if (!(p.me_thickness > 0.0)) throw std::invalid_argument("magnet params: ME thickness must be > 0");
}

Vec3 anisotropy_field(const Vec3& m, const MagnetParams& p) {
    const double h = 2.0 * p.k_u / (consts::mu0 * p.ms) * m.x;
    return {h, 0.0, 0.0};
}

Vec3 demag_field(const Vec3& m, const MagnetParams& p, const Vec3& n) {
    return {-p.ms * n.x * m.x, -p.ms * n.y * m.y, -p.ms * n.z * m.z};
}

Vec3 me_field(double v_cap, const MagnetParams& p) {
    const double e_field = v_cap / p.me_thickness;
    return {0.0, p.alpha_me * e_field / consts::mu0, 0.0};
}

double thermal_field_sigma(const MagnetParams& p, const MagnetGeometry& g, double dt) {
    if (p.temperature == 0.0) return 0.0;
    if (!(dt > 0.0)) throw std::invalid_argument("thermal_field: dt must be > 0");
    const double var = 2.0 * p.alpha * consts::kB * p.temperature /
                       (p.gamma * consts::mu0 * consts::mu0 * p.ms * g.volume() * dt);
    return std::sqrt(var);
}

Vec3 thermal_field(const MagnetParams& p, const MagnetGeometry& g, double dt, Rng& rng) {
    const double sigma = thermal_field_sigma(p, g, dt);
    if (sigma == 0.0) return {0.0, 0.0, 0.0};
    return sigma * rng.normal3();
}

FieldSample field_sample(const Vec3& m, double v_cap, const MagnetParams& p,
                         const Vec3& n_factors, const Vec3& h_thermal) {
    FieldSample f;
    f.anisotropy = anisotropy_field(m, p);
    f.demag = demag_field(m, p, n_factors);
    f.me = me_field(v_cap, p);
    f.thermal = h_thermal;
    f.total = f.anisotropy + f.demag + f.me + f.thermal;
    return f;
}

Vec3 llg_rhs(const Vec3& m, const Vec3& h_eff, const MagnetParams& p) {
    const Vec3 mxh = cross(m, h_eff);
    const Vec3 mxmxh = cross(m, mxh);
    return (-p.gamma * consts::mu0) * (mxh + p.alpha * mxmxh);
}

double thermal_stability(const MagnetParams& p, const MagnetGeometry& g) {
    if (!(p.temperature > 0.0)) {
        throw std::invalid_argument("thermal_stability: requires T > 0");
    }
    return p.k_u * g.volume() / (consts::kB * p.temperature);
}

double inplane_stiffness(const MagnetParams& p, const MagnetGeometry& g) {
    const Vec3 n = demag_factors(g);
    return p.k_u + 0.5 * consts::mu0 * p.ms * p.ms * (n.y - n.x);
}

}  // namespace irmen
