#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "irmen/cell.hpp"
#include "irmen/energy.hpp"

namespace irmen {

// ---------------------------------------------------------------------------
// Templates and the behavioral OTA.

/// 3x3 cloning template. b weights read the opposite (memory) grid, a weights
/// read the latched outputs of the grid being written, z is a bias current.
/// Neighborhood index k = (dr + 1) * 3 + (dc + 1) for dr, dc in {-1, 0, 1}.
struct Template {
    std::array<double, 9> a{};
    std::array<double, 9> b{};
    double z = 0.0;
    int precision_bits = unlimited_bits;

    static constexpr int unlimited_bits = 64;
};

/// Uniform symmetric quantization of every weight (a, b and z) onto a signed
/// grid of step w_max / 2^(bits-1), where w_max is the largest weight
/// magnitude in the template. bits >= 53 (beyond a double's mantissa) means
/// unlimited and returns the template unchanged.
Template quantize_weights(const Template& t, int bits);

struct OtaModel {
    double max_current = 1e-6;    // A, one OTA's output clamp
    double supply = 0.5;          // V, rails at +-supply
    double v_threshold = 0.2;     // V, access transistor gate swing
    double gate_cap = 0.15e-15;   // F, per OTA input gate
    double static_power = 1.6e-6; // W, bias current while powered
    double mirror_ratio = 2.0;    // informational: output stage mirror ratio
};
void validate(const OtaModel& m);

/// One OTA's output current for a normalized input voltage: linear
/// transconductance (weight 1 gives max_current at input 1) with a hard clamp
/// at +-max_current. |v_in_normalized| may not exceed 1.05.
double ota_current(double v_in_normalized, double weight, const OtaModel& ota = {});

/// A weight of magnitude above 1 is realized as ceil(|w|) parallel unit OTAs
/// so each stays inside its clamp over the full input range.
int synapse_ota_count(double weight);

/// Net normalized current of one synapse: the parallel-OTA sum with each
/// unit's clamp applied. Equals weight * x whenever |weight / n * x| <= 1.
double synapse_current(double x, double weight);

struct StageTiming {
    double powered_window = 130e-12;  // s, OTA drive per stage
    double stage_delay = 1.5e-9;      // s, total time per stage
};
void validate(const StageTiming& t);

// ---------------------------------------------------------------------------
// Low-level plane stepper. Cells are stored as parallel arrays so a whole
// plane advances through straight-line vectorized RK4; the grid API and the
// network pipeline both sit on these two segment loops.

namespace engine {

/// Views into the per-cell arrays of one plane (all length n).
struct Block {
    double* mx = nullptr;
    double* my = nullptr;
    double* mz = nullptr;
    double* vcap = nullptr;
    double* sense = nullptr;
    Rng* rng = nullptr;
    int n = 0;
};

/// Powered window: each capacitor relaxes toward its drive target vinf[i]
/// through the RC (tau_in) fed by an OTA whose output ramps with tau_slew;
/// stored charge bleeds off un-slewed. Magnets follow the resulting
/// magnetoelectric field. On exit vcap holds the end-of-window voltage and
/// stays frozen. Clamping the targets is the caller's job.
void window(const Block& blk, const MacrospinKernel& k, double tau_in, double tau_slew,
            double sense_tau, const double* vinf, int steps, double dt);

/// Isolated evolution at frozen vcap. kick_v adds a capacitively coupled
/// offset to the magnetoelectric drive (the read disturbance) without
/// touching the stored voltage.
void coast(const Block& blk, const MacrospinKernel& k, double sense_tau,
           double kick_v, int steps, double dt);

/// Read pulse: coast with the read kick while the latch filter (latch_tau)
/// tracks the sense node; latch[i] must enter holding its read-start value
/// and exits holding the end-of-pulse latched output.
void read(const Block& blk, const MacrospinKernel& k, double sense_tau, double latch_tau,
          double kick_v, double* latch, int steps, double dt);

}  // namespace engine

// ---------------------------------------------------------------------------
// Grid of cells with latched outputs, one of the ping-pong pair.

struct GridParams {
    CellParams cell;
    MagnetParams magnet;
    MagnetGeometry geometry;
    double dt_window = 1.3e-12;
    double dt_hold = 2.5e-12;
    double dt_read = 2.5e-12;
};

struct CennGrid {
    int n_rows = 0;
    int n_cols = 0;
    GridParams params;

    // per-cell state, row-major
    std::vector<double> mx, my, mz;
    std::vector<double> vcap;
    std::vector<double> sense;
    std::vector<double> latch;  // sense output sampled at the end of the last read pulse
    std::vector<Rng> rng;

    // derived at construction
    MacrospinKernel kernel;
    double v_sat = 0.0;
    double r_shunt = 0.0;
    double tau_in = 0.0;
    double tau_sense = 0.0;

    CennGrid(int rows, int cols, const GridParams& p, std::uint64_t seed,
             std::uint64_t grid_id);

    int size() const { return n_rows * n_cols; }
    int index(int r, int c) const { return r * n_cols + c; }
    double output(int r, int c) const { return latch[index(r, c)]; }

    /// Drive every cell to the given normalized values (a full write pass:
    /// window, settle, read) so the grid holds and has latched the image.
    /// Advances one stage_delay of simulated time.
    void load(const std::vector<double>& values, const StageTiming& timing = {});
};

/// Time slicing of one stage at the configured integrator steps: window,
/// settle and read segments, each with substep = span / n exactly.
struct StagePartition {
    int n_window = 0, n_settle = 0, n_read = 0;
    double dt_window = 0.0, dt_settle = 0.0, dt_read = 0.0;
};
StagePartition partition_stage(const GridParams& p, const StageTiming& timing);

// ---------------------------------------------------------------------------
// Stage execution.

struct ScheduleStage {
    Template temp;
    int write_grid = 1;  // 0 writes grid A, 1 writes grid B
    std::string tag;
};

/// Build the alternating role assignment: stage k writes grid (start + k) % 2.
std::vector<ScheduleStage> alternate_roles(const std::vector<Template>& temps,
                                           int first_write = 1);

/// One CeNN stage: reads every mem cell once through a fresh 200 ps read
/// pulse, drives the compute grid's capacitors through the template OTAs for
/// the powered window, lets both grids evolve out to stage_delay, and latches
/// the compute grid's outputs with an end-of-stage read. Advances both grids
/// exactly stage_delay of simulated time. mem is unchanged apart from the
/// read perturbation.
StageRecord stage_step(CennGrid& mem, CennGrid& comp, const Template& t,
                       const StageTiming& timing, const OtaModel& ota = {});

/// Run a stage list over the ping-pong pair, appending one energy record per
/// stage. Returns the index (0 = A, 1 = B) of the grid written last.
int run_schedule(CennGrid& a, CennGrid& b, const std::vector<ScheduleStage>& schedule,
                 const StageTiming& timing, const OtaModel& ota,
                 std::vector<StageRecord>& records);

/// Energy of one uniform-template stage on an rows x cols grid, from counts
/// alone (no simulation): used for schedule-level accounting and tests.
StageRecord stage_energy(int rows, int cols, const Template& t, const OtaModel& ota,
                         const CellParams& cell, double v_sat_drive,
                         const StageTiming& timing);

}  // namespace irmen
