#include "irmen/cell.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "irmen/constants.hpp"

namespace irmen {

using consts::kB;
using consts::mu0;

void validate(const CellParams& p) {
    if (!(p.c_in > 0.0)) throw std::invalid_argument("cell: c_in must be > 0");
    if (!(p.v_rail > 0.0)) throw std::invalid_argument("cell: v_rail must be > 0");
    if (!(p.r_ir > 0.0 && p.r_fm > 0.0 && p.r_gnd > 0.0))
        throw std::invalid_argument("cell: resistances must be > 0");
    if (!(p.c_load > 0.0)) throw std::invalid_argument("cell: c_load must be > 0");
    if (!(p.v_drive > 0.0)) throw std::invalid_argument("cell: v_drive must be > 0");
    if (!(p.eta > 0.0 && p.eta <= 1.0)) throw std::invalid_argument("cell: eta must be in (0,1]");
    if (!(p.read_disturb >= 0.0 && p.read_disturb < 1.0))
        throw std::invalid_argument("cell: read_disturb must be in [0,1)");
    if (!(p.i_unit > 0.0)) throw std::invalid_argument("cell: i_unit must be > 0");
    if (!(p.t_window > 0.0 && p.t_read > 0.0))
        throw std::invalid_argument("cell: timing must be > 0");
    if (!(p.t_slew >= 0.0)) throw std::invalid_argument("cell: t_slew must be >= 0");
    if (!(p.t_latch >= 0.0)) throw std::invalid_argument("cell: t_latch must be >= 0");
}

double v1_reference(const CellParams& p) {
    return p.v_drive * p.eta * p.r_ir / (p.r_fm + p.r_gnd);
}

double saturation_voltage(const MagnetParams& mp, const MagnetGeometry& g) {
    const double k_tot = inplane_stiffness(mp, g);
    return 2.0 * k_tot * mp.me_thickness / (mp.ms * mp.alpha_me);
}

double shunt_resistance(const CellParams& p, const MagnetParams& mp, const MagnetGeometry& g) {
    return saturation_voltage(mp, g) / p.i_unit;
}

double equilibrium_my(double v_cap, const MagnetParams& mp, const MagnetGeometry& g) {
    return std::clamp(v_cap / saturation_voltage(mp, g), -1.0, 1.0);
}

double input_tau(const CellParams& p, const MagnetParams& mp, const MagnetGeometry& g) {
    return shunt_resistance(p, mp, g) * p.c_in;
}

double magnet_relax_tau(const MagnetParams& mp, const MagnetGeometry& g) {
    const Vec3 n = demag_factors(g);
    const double k_y = inplane_stiffness(mp, g);
    const double k_z = mp.k_u + 0.5 * mu0 * mp.ms * mp.ms * (n.z - n.x);
    const double h_y = 2.0 * k_y / (mu0 * mp.ms);
    const double h_z = 2.0 * k_z / (mu0 * mp.ms);
    const double rate = 0.5 * mp.alpha * mp.gamma * mu0 * (h_y + h_z);
    return 1.0 / rate;
}

double sense_tau(const CellParams& p) { return p.r_ir * p.c_load; }

double drive_response(double t, double tau_in, double tau_slew) {
    if (t <= 0.0) return 0.0;
    if (tau_slew <= 0.0) return 1.0 - std::exp(-t / tau_in);
    const double d = tau_in - tau_slew;
    if (std::abs(d) < 1e-9 * tau_in) {
        const double x = t / tau_in;
        return 1.0 - (1.0 + x) * std::exp(-x);
    }
    return 1.0 - (tau_in * std::exp(-t / tau_in) - tau_slew * std::exp(-t / tau_slew)) / d;
}

MacrospinKernel MacrospinKernel::make(const MagnetParams& p, const MagnetGeometry& g) {
    validate(p);
    validate(g);
    const Vec3 n = demag_factors(g);
    MacrospinKernel k;
    k.dx = 2.0 * p.k_u / (mu0 * p.ms) - p.ms * n.x;
    k.dy = -p.ms * n.y;
    k.dz = -p.ms * n.z;
    k.me_per_volt = p.alpha_me / (p.me_thickness * mu0);
    k.gp = p.gamma * mu0;
    k.alpha = p.alpha;
    k.sigma1 = std::sqrt(2.0 * p.alpha * kB * p.temperature /
                         (p.gamma * mu0 * mu0 * p.ms * g.volume()));
    return k;
}

CellSim::CellSim(const CellParams& c, const MagnetParams& m, const MagnetGeometry& g)
    : cell(c), magnet(m), geometry(g) {
    validate(c);
    validate(m);
    validate(g);
    kernel = MacrospinKernel::make(m, g);
    v_sat = saturation_voltage(m, g);
    r_shunt = shunt_resistance(c, m, g);
    v1 = v1_reference(c);
}

namespace {
// advance the first-order sense filter by one step, trapezoid input
inline void sense_step(double& s, double my0, double my1, double decay) {
    s = decay * s + (1.0 - decay) * 0.5 * (my0 + my1);
}
}  // namespace

void CellSim::write_window(CellState& s, double u, Rng& rng) const {
    const int n = std::max(1, static_cast<int>(std::lround(cell.t_window / dt)));
    const double h = cell.t_window / n;
    const double tau = r_shunt * cell.c_in;
    const double v_inf = std::clamp(u * cell.i_unit * r_shunt, -cell.v_rail, cell.v_rail);
    const double v0 = s.v_cap;
    const double sigma = magnet.temperature > 0.0 ? kernel.sigma(h) : 0.0;
    const double decay = std::exp(-h / (cell.r_ir * cell.c_load));
    // stored charge bleeds off as soon as the switch closes; the fresh drive
    // current ramps with t_slew
    auto v_at = [&](double t) {
        const double v = v0 * std::exp(-t / tau) + v_inf * drive_response(t, tau, cell.t_slew);
        return std::clamp(v, -cell.v_rail, cell.v_rail);
    };
    for (int i = 0; i < n; i++) {
        const double t = i * h;
        const double hy0 = kernel.me_per_volt * v_at(t);
        const double hym = kernel.me_per_volt * v_at(t + 0.5 * h);
        const double hy1 = kernel.me_per_volt * v_at(t + h);
        const Vec3 ht = sigma > 0.0 ? rng.normal3() * sigma : Vec3{0, 0, 0};
        const double my0 = s.magnet.m.y;
        kernel.step(s.magnet.m, hy0, hym, hy1, ht, h);
        sense_step(s.sense, my0, s.magnet.m.y, decay);
    }
    s.v_cap = v_at(cell.t_window);
}

double CellSim::quasi_static_gain() const {
    const double tau = r_shunt * cell.c_in;
    return 1.0 / drive_response(cell.t_window, tau, cell.t_slew);
}

void CellSim::hold(CellState& s, double duration, Rng& rng) const {
    if (duration <= 0.0) return;
    const int n = std::max(1, static_cast<int>(std::lround(duration / dt_hold)));
    const double h = duration / n;
    const double sigma = magnet.temperature > 0.0 ? kernel.sigma(h) : 0.0;
    const double hy = kernel.me_per_volt * s.v_cap;
    const double decay = std::exp(-h / (cell.r_ir * cell.c_load));
    for (int i = 0; i < n; i++) {
        const Vec3 ht = sigma > 0.0 ? rng.normal3() * sigma : Vec3{0, 0, 0};
        const double my0 = s.magnet.m.y;
        kernel.step(s.magnet.m, hy, ht, h);
        sense_step(s.sense, my0, s.magnet.m.y, decay);
    }
}

ReadResult CellSim::read_pulse(CellState& s, Rng& rng) const {
    const int n = std::max(1, static_cast<int>(std::lround(cell.t_read / dt)));
    const double h = cell.t_read / n;
    const double sigma = magnet.temperature > 0.0 ? kernel.sigma(h) : 0.0;
    // capacitive coupling from the drive line: present only while driven
    const double hy = kernel.me_per_volt * (s.v_cap + cell.read_disturb * cell.v_drive);
    const double decay = std::exp(-h / (cell.r_ir * cell.c_load));
    const double el = cell.t_latch > 0.0 ? std::exp(-h / cell.t_latch) : 0.0;
    double f = s.sense;  // latch input connects to the settled sense node
    for (int i = 0; i < n; i++) {
        const Vec3 ht = sigma > 0.0 ? rng.normal3() * sigma : Vec3{0, 0, 0};
        const double my0 = s.magnet.m.y;
        kernel.step(s.magnet.m, hy, ht, h);
        sense_step(s.sense, my0, s.magnet.m.y, decay);
        f = el * f + (1.0 - el) * s.sense;
    }
    ReadResult r;
    r.value = f;
    r.v_out = v1 * r.value;
    return r;
}

void CellSim::seat_equilibrium(CellState& s) const {
    const double my = equilibrium_my(s.v_cap, magnet, geometry);
    const double mx = std::sqrt(std::max(0.0, 1.0 - my * my));
    s.magnet.m = {mx, my, 0.0};
    s.sense = my;
}

}  // namespace irmen
