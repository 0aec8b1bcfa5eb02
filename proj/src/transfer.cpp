#include "irmen/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace irmen {

namespace {

double sat_g(double x, double p) {
    const double ax = std::abs(x);
    if (ax == 0.0) return 0.0;
    const double lg = p * std::log(ax);
    if (lg > 700.0) return x > 0 ? 1.0 : -1.0;  // deep saturation
    return x / std::exp(std::log1p(std::exp(lg)) / p);
}

// g'(x) = (1 + |x|^p)^(-1/p - 1)
double sat_g_slope(double x, double p) {
    const double ax = std::abs(x);
    if (ax == 0.0) return 1.0;
    const double lg = p * std::log(ax);
    if (lg > 700.0) return 0.0;
    return std::exp(-(1.0 / p + 1.0) * std::log1p(std::exp(lg)));
}

}  // namespace

double TransferFit::operator()(double u) const { return m * sat_g(a * u / m, p); }

double TransferFit::slope(double u) const { return a * sat_g_slope(a * u / m, p); }

std::vector<TransferSample> measure_transfer(const CellParams& cell, const MagnetParams& magnet,
                                             const MagnetGeometry& geometry, double stage_delay,
                                             int n_points, double u_max) {
    if (n_points < 2) throw std::invalid_argument("measure_transfer: need at least 2 points");
    if (!(u_max > 0)) throw std::invalid_argument("measure_transfer: u_max must be > 0");
    MagnetParams cold = magnet;
    cold.temperature = 0.0;
    const CellSim sim(cell, cold, geometry);
    const double settle = stage_delay - cell.t_window - cell.t_read;
    if (settle < 0)
        throw std::invalid_argument("measure_transfer: stage_delay shorter than window plus read");
    const double gain = sim.quasi_static_gain();

    std::vector<TransferSample> out;
    out.reserve(n_points);
    Rng rng(0, {0});  // unused at T = 0 but required by the stepper API
    for (int i = 0; i < n_points; ++i) {
        const double u = -u_max + 2.0 * u_max * i / (n_points - 1);
        CellState s;
        sim.write_window(s, u * gain, rng);
        sim.hold(s, settle, rng);
        const ReadResult r = sim.read_pulse(s, rng);
        out.push_back({u, r.value});
    }
    return out;
}

TransferFit fit_transfer(const std::vector<TransferSample>& samples) {
    if (samples.size() < 4) throw std::invalid_argument("fit_transfer: too few samples");

    auto sse = [&](const std::array<double, 3>& x) {
        const double a = x[0], m = x[1], p = x[2];
        if (!(a > 0.0) || !(m > 0.05) || !(p > 1.0) || p > 200.0) return 1e18;
        double s = 0.0;
        for (const auto& q : samples) {
            const double e = m * sat_g(a * q.u / m, p) - q.y;
            s += e * e;
        }
        return s;
    };

    // Nelder-Mead on (a, m, p).
    std::array<std::array<double, 3>, 4> pt = {{{1.0, 1.0, 30.0},
                                                {1.05, 1.0, 30.0},
                                                {1.0, 1.05, 30.0},
                                                {1.0, 1.0, 40.0}}};
    std::array<double, 4> f{};
    for (int i = 0; i < 4; ++i) f[i] = sse(pt[i]);

    for (int iter = 0; iter < 600; ++iter) {
        std::array<int, 4> ord = {0, 1, 2, 3};
        std::sort(ord.begin(), ord.end(), [&](int i, int j) { return f[i] < f[j]; });
        std::array<std::array<double, 3>, 4> sp;
        std::array<double, 4> sf{};
        for (int i = 0; i < 4; ++i) {
            sp[i] = pt[ord[i]];
            sf[i] = f[ord[i]];
        }
        pt = sp;
        f = sf;
        if (f[3] - f[0] < 1e-16 * (1.0 + f[0])) break;

        std::array<double, 3> c{};  // centroid of the best three
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) c[k] += pt[i][k] / 3.0;
        auto blend = [&](double t) {
            std::array<double, 3> x{};
            for (int k = 0; k < 3; ++k) x[k] = c[k] + t * (pt[3][k] - c[k]);
            return x;
        };
        const auto xr = blend(-1.0);
        const double fr = sse(xr);
        if (fr < f[0]) {
            const auto xe = blend(-2.0);
            const double fe = sse(xe);
            if (fe < fr) {
                pt[3] = xe;
                f[3] = fe;
            } else {
                pt[3] = xr;
                f[3] = fr;
            }
        } else if (fr < f[2]) {
            pt[3] = xr;
            f[3] = fr;
        } else {
            const auto xc = blend(0.5);
            const double fc = sse(xc);
            if (fc < f[3]) {
                pt[3] = xc;
                f[3] = fc;
            } else {
                for (int i = 1; i < 4; ++i) {
                    for (int k = 0; k < 3; ++k) pt[i][k] = pt[0][k] + 0.5 * (pt[i][k] - pt[0][k]);
                    f[i] = sse(pt[i]);
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (f[i] < f[best]) best = i;
    TransferFit fit;
    fit.a = pt[best][0];
    fit.m = pt[best][1];
    fit.p = pt[best][2];
    fit.residual = std::sqrt(f[best] / samples.size());
    return fit;
}

TransferFit fit_device_transfer(const CellParams& cell, const MagnetParams& magnet,
                                const MagnetGeometry& geometry, double stage_delay) {
    return fit_transfer(measure_transfer(cell, magnet, geometry, stage_delay, 81, 2.0));
}

}  // namespace irmen
