#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "irmen/weights.hpp"

namespace irmen {

struct LayerSpec {
    enum class Kind { conv, pool, fc };
    Kind kind = Kind::conv;
    int out_channels = 0;  // conv
    int kernel = 3;        // conv; the synapse array is 3x3, anything else is rejected
    int units = 0;         // fc
};

struct NetworkSpec {
    int input_rows = 28;
    int input_cols = 28;
    std::vector<LayerSpec> layers;

    /// conv(8) + pool + conv(16) + pool + fc(10), the default classifier.
    static NetworkSpec lenet_small();
};

struct PlaneShape {
    int channels = 0, rows = 0, cols = 0;
    int size() const { return channels * rows * cols; }
};

/// One synapse of a cell's drive program: source plane/cell and device weight.
struct CellTerm {
    std::uint32_t plane = 0;
    std::uint32_t cell = 0;
    double w = 0.0;
};

/// Drive program of one written plane, CSR over output cells. Cell i draws
/// terms[off[i]..off[i+1]) plus its bias synapse.
struct PlaneProgram {
    int out_plane = -1;
    std::vector<std::uint32_t> off;  // n_cells + 1 entries
    std::vector<CellTerm> terms;
    std::vector<double> bias;        // n_cells entries
};

struct StagePlan {
    std::string tag;
    bool margin = false;   // power-gated filler slot: time passes, nothing switches
    PlaneProgram program;  // empty when margin
    long n_otas = 0;       // unit OTAs powered during the window (bias included)
    long n_cells = 0;
    long n_reads = 0;      // end-of-stage read pulses latching the written plane
};

// Stage schedule compiled from a NetworkSpec. The stage-count law is fixed:
// every conv layer (activation fused) occupies exactly 2 slots, every pool
// exactly 12. The pool decomposition is a constant of this artifact: 4
// switching slots (horizontal pairwise-max as difference + combine, then the
// same vertically) followed by 8 power-gated margin slots that keep layer
// timing data-independent.
struct CompiledNetwork {
    NetworkSpec spec;
    std::vector<PlaneShape> planes;  // plane 0 is the input raster
    std::vector<std::string> plane_tags;
    std::vector<StagePlan> stages;

    // digital head, excluded from the analog schedule
    std::vector<double> fc_w, fc_b;  // fc_out x fc_in row-major, fc_out
    int fc_in = 0, fc_out = 0;
    bool fc_only = false;  // no analog layers: empty schedule, head only

    int n_stages() const { return static_cast<int>(stages.size()); }
    long total_otas() const;
};

struct CompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Binds a layer spec to bundle weights ("conv1.w", "conv1.b", ..., "fc.w",
/// "fc.b"; logical values) and lowers it to plane programs in device units
/// (synapse weight = logical/2, border fold into per-cell bias = zero padding).
CompiledNetwork compile_network(const NetworkSpec& spec, const WeightsBundle& weights);

/// Randomly initialized logical bundle for a spec (He-style fan-in scaling),
/// the starting point for training and fixtures.
WeightsBundle init_weights(const NetworkSpec& spec, std::uint64_t seed);

/// Per-layer quantization of the logical conv weights and biases to the given
/// DAC resolution; the digital head is left untouched. bits <= 0: identity.
WeightsBundle quantize_bundle(const WeightsBundle& w, int bits);

}  // namespace irmen
