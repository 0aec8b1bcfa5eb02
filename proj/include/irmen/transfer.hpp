#pragma once

#include <vector>

#include "irmen/cell.hpp"
#include "irmen/magnet.hpp"

namespace irmen {

/// The reference transfer the neuron approximates: a unit-slope line clipping
/// at +-1.
inline double saturated_linear(double u) { return u < -1.0 ? -1.0 : (u > 1.0 ? 1.0 : u); }

struct TransferSample {
    double u = 0.0;  // normalized drive
    double y = 0.0;  // latched readout
};

/// Smooth odd saturating response fitted to the measured zero-temperature
/// device curve: T(u) = m * g(a*u/m) with g(x) = x / (1 + |x|^p)^(1/p).
/// a is the small-signal slope, m the saturation level, p the knee sharpness.
struct TransferFit {
    double a = 1.0;
    double m = 1.0;
    double p = 30.0;
    double residual = 0.0;  // rms misfit against the measured samples

    double operator()(double u) const;
    double slope(double u) const;  // dT/du, positive everywhere
};

/// Latched output of one full write-settle-read stage per drive value, at zero
/// temperature, on a fresh cell. n_points samples spread evenly over
/// [-u_max, u_max].
std::vector<TransferSample> measure_transfer(const CellParams& cell, const MagnetParams& magnet,
                                             const MagnetGeometry& geometry, double stage_delay,
                                             int n_points, double u_max);

/// Nelder-Mead least-squares fit of TransferFit to measured samples.
TransferFit fit_transfer(const std::vector<TransferSample>& samples);

/// measure + fit with the artifact's default sampling (81 points to +-2).
TransferFit fit_device_transfer(const CellParams& cell, const MagnetParams& magnet,
                                const MagnetGeometry& geometry, double stage_delay);

}  // namespace irmen
