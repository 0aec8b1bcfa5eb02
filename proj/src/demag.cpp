#include <cmath>

#include "irmen/magnet.hpp"

namespace irmen {

namespace {

// Closed-form demagnetizing factor of a rectangular prism with half-edges
// (a, b, c), magnetized along the c edge (Aharoni's expression). The three
// factors of a prism are this function evaluated under cyclic permutation.
double prism_factor(double a, double b, double c) {
    const double a2 = a * a, b2 = b * b, c2 = c * c;
    const double abc = std::sqrt(a2 + b2 + c2);
    const double ab = std::sqrt(a2 + b2);
    const double ac = std::sqrt(a2 + c2);
    const double bc = std::sqrt(b2 + c2);

    double s = 0.0;
    s += (b2 - c2) / (2.0 * b * c) * std::log((abc - a) / (abc + a));
    s += (a2 - c2) / (2.0 * a * c) * std::log((abc - b) / (abc + b));
    s += b / (2.0 * c) * std::log((ab + a) / (ab - a));
    s += a / (2.0 * c) * std::log((ab + b) / (ab - b));
    s += c / (2.0 * a) * std::log((bc - b) / (bc + b));
    s += c / (2.0 * b) * std::log((ac - a) / (ac + a));
    s += 2.0 * std::atan(a * b / (c * abc));
    s += (a2 * a + b2 * b - 2.0 * c2 * c) / (3.0 * a * b * c);
    s += (a2 + b2 - 2.0 * c2) / (3.0 * a * b * c) * abc;
    s += c / (a * b) * (ac + bc);
    s -= (ab * ab * ab + bc * bc * bc + ac * ac * ac) / (3.0 * a * b * c);
    return s / M_PI;
}

}  // namespace

Vec3 demag_factors(const MagnetGeometry& g) {
    validate(g);
    const double a = 0.5 * g.length;
    const double b = 0.5 * g.width;
    const double c = 0.5 * g.thickness;
    // Nx: magnetized along the length edge, etc.
    const double nx = prism_factor(b, c, a);
    const double ny = prism_factor(c, a, b);
    const double nz = prism_factor(a, b, c);
    return {nx, ny, nz};
}

}  // namespace irmen
