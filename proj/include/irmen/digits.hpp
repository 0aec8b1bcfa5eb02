#pragma once

#include <cstdint>
#include <vector>

#include "irmen/rng.hpp"

namespace irmen {

// Procedural handwritten-style digit renderer. Each class is a set of stroke
// polylines in a unit box; per sample the control points get Gaussian jitter
// and a random affine (scale, rotation, shear, shift), then an anti-aliased
// distance field paints the strokes into the standard 28x28 grid with a 4 px
// margin. Deterministic given the Rng stream.
void render_digit(int digit, Rng& rng, std::uint8_t* out, int rows = 28, int cols = 28);

/// Balanced class-ordered set: per_class samples of each digit 0..9, streams
/// keyed (seed, {digit, index}) so any subset is reproducible independently.
void make_digit_set(int per_class, std::uint64_t seed, std::vector<std::uint8_t>& pixels,
                    std::vector<std::uint8_t>& labels, int rows = 28, int cols = 28);

}  // namespace irmen
