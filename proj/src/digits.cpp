#include "irmen/digits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace irmen {

namespace {

struct Pt {
    double x, y;  // unit box, y grows downward
};

using Stroke = std::vector<Pt>;

void arc(Stroke& s, double cx, double cy, double rx, double ry, double a0, double a1,
         int segs = 14) {
    for (int i = 0; i <= segs; ++i) {
        const double a = a0 + (a1 - a0) * i / segs;
        s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    }
}

// Skeletons hand-tuned on an ASCII rendering; angles are standard
// math-convention but y points down, so positive sweep turns clockwise.
std::vector<Stroke> skeleton(int digit) {
    const double pi = 3.14159265358979323846;
    std::vector<Stroke> s;
    switch (digit) {
        case 0: {
            Stroke o;
            arc(o, 0.50, 0.50, 0.21, 0.32, -0.5 * pi, 1.5 * pi, 22);
            s.push_back(o);
            break;
        }
        case 1: {
            s.push_back({{0.36, 0.30}, {0.53, 0.15}, {0.53, 0.85}});
            break;
        }
        case 2: {
            Stroke t;
            arc(t, 0.49, 0.33, 0.20, 0.17, -0.85 * pi, 0.15 * pi, 12);
            t.push_back({0.34, 0.82});
            t.push_back({0.72, 0.82});
            s.push_back(t);
            break;
        }
        case 3: {
            Stroke a3;
            arc(a3, 0.47, 0.32, 0.18, 0.16, -0.75 * pi, 0.45 * pi, 12);
            Stroke b3;
            arc(b3, 0.47, 0.65, 0.21, 0.19, -0.45 * pi, 0.75 * pi, 12);
            s.push_back(a3);
            s.push_back(b3);
            break;
        }
        case 4: {
            s.push_back({{0.62, 0.14}, {0.27, 0.58}, {0.78, 0.58}});
            s.push_back({{0.60, 0.32}, {0.60, 0.86}});
            break;
        }
        case 5: {
            Stroke t;
            t.push_back({0.70, 0.16});
            t.push_back({0.36, 0.16});
            t.push_back({0.33, 0.45});
            arc(t, 0.47, 0.63, 0.22, 0.19, -0.35 * pi, 0.80 * pi, 14);
            s.push_back(t);
            break;
        }
        case 6: {
            Stroke t;
            t.push_back({0.62, 0.14});
            arc(t, 0.47, 0.62, 0.19, 0.22, -0.70 * pi, -0.50 * pi, 4);
            arc(t, 0.47, 0.64, 0.19, 0.19, -0.50 * pi, 1.50 * pi, 18);
            s.push_back(t);
            break;
        }
        case 7: {
            s.push_back({{0.30, 0.17}, {0.72, 0.17}, {0.44, 0.85}});
            break;
        }
        case 8: {
            Stroke a8;
            arc(a8, 0.50, 0.32, 0.17, 0.16, -0.5 * pi, 1.5 * pi, 18);
            Stroke b8;
            arc(b8, 0.50, 0.66, 0.20, 0.19, -0.5 * pi, 1.5 * pi, 18);
            s.push_back(a8);
            s.push_back(b8);
            break;
        }
        case 9: {
            Stroke o;
            arc(o, 0.50, 0.35, 0.18, 0.18, -0.5 * pi, 1.5 * pi, 18);
            s.push_back(o);
            s.push_back({{0.68, 0.35}, {0.63, 0.85}});
            break;
        }
        default:
            throw std::invalid_argument("render_digit: class out of range");
    }
    return s;
}

double dist_to_segment(double px, double py, const Pt& a, const Pt& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double ex = px - (a.x + t * dx), ey = py - (a.y + t * dy);
    return std::sqrt(ex * ex + ey * ey);
}

}  // namespace

void render_digit(int digit, Rng& rng, std::uint8_t* out, int rows, int cols) {
    auto strokes = skeleton(digit);

    const double theta = rng.normal() * 0.10;
    const double shear = rng.normal() * 0.12;
    const double sx = 1.0 + rng.normal() * 0.08;
    const double sy = 1.0 + rng.normal() * 0.08;
    const double tx = rng.normal() * 0.035;
    const double ty = rng.normal() * 0.035;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double jit = 0.018;

    for (auto& stroke : strokes) {
        for (auto& p : stroke) {
            double x = p.x - 0.5 + rng.normal() * jit;
            double y = p.y - 0.5 + rng.normal() * jit;
            x = sx * (x + shear * y);
            y = sy * y;
            p.x = ct * x - st * y + 0.5 + tx;
            p.y = st * x + ct * y + 0.5 + ty;
        }
    }

    // Stroke radius and ink level vary per sample; the box maps onto the
    // centered 20x20 region of the 28x28 frame.
    const double radius = 0.050 + 0.012 * rng.normal();
    const double r = std::clamp(radius, 0.030, 0.075);
    const double aa = 0.024;
    const double ink = std::clamp(0.90 + 0.10 * rng.normal(), 0.55, 1.0);
    const double box = std::min(rows, cols) - 8.0;
    const double ox = (cols - box) / 2.0, oy = (rows - box) / 2.0;

    for (int py = 0; py < rows; ++py) {
        for (int px = 0; px < cols; ++px) {
            const double ux = (px + 0.5 - ox) / box;
            const double uy = (py + 0.5 - oy) / box;
            double d = 1e9;
            for (const auto& stroke : strokes)
                for (std::size_t i = 0; i + 1 < stroke.size(); ++i)
                    d = std::min(d, dist_to_segment(ux, uy, stroke[i], stroke[i + 1]));
            const double cover = std::clamp((r + aa - d) / (2.0 * aa), 0.0, 1.0);
            const double shade = cover * cover * (3.0 - 2.0 * cover) * ink;
            out[py * cols + px] = static_cast<std::uint8_t>(std::lround(255.0 * shade));
        }
    }
}

void make_digit_set(int per_class, std::uint64_t seed, std::vector<std::uint8_t>& pixels,
                    std::vector<std::uint8_t>& labels, int rows, int cols) {
    if (per_class <= 0) throw std::invalid_argument("make_digit_set: per_class must be > 0");
    const std::size_t per = std::size_t(rows) * cols;
    pixels.assign(std::size_t(per_class) * 10 * per, 0);
    labels.resize(std::size_t(per_class) * 10);
    std::size_t k = 0;
    for (int idx = 0; idx < per_class; ++idx) {
        for (int d = 0; d < 10; ++d, ++k) {
            Rng rng(seed, {std::uint64_t(d), std::uint64_t(idx)});
            render_digit(d, rng, pixels.data() + k * per, rows, cols);
            labels[k] = static_cast<std::uint8_t>(d);
        }
    }
}

}  // namespace irmen
