#pragma once

#include <cstdint>
#include <vector>

#include "irmen/cenn.hpp"
#include "irmen/energy.hpp"
#include "irmen/idx.hpp"
#include "irmen/network.hpp"
#include "irmen/transfer.hpp"

namespace irmen {

/// device: every written plane is integrated through the full macrospin /
/// capacitor physics at the configured temperature and geometry. ideal: the
/// same stage algebra with the fitted saturating response in place of the
/// physics (the surrogate the trainer optimizes).
enum class InferMode { device, ideal };

struct InferOptions {
    InferMode mode = InferMode::device;
    std::uint64_t seed = 1;
    std::uint64_t image_id = 0;  // stream id; evaluate() sets it to the image index
    const TransferFit* fit = nullptr;  // required for ideal mode
    bool keep_planes = false;          // retain every latched plane in the result
    StageTiming timing{};
    OtaModel ota{};
};

struct InferResult {
    int predicted = -1;
    std::vector<double> scores;                // fc_out entries
    std::vector<std::vector<double>> planes;   // per-plane latched values when kept
    std::vector<std::vector<double>> drives;   // per-plane raw drive sums when kept
    EnergyReport energy;                       // analog schedule; margin slots cost nothing
};

/// Classifies one image (row-major, values in [-1, 1], shape = spec input).
/// Planes run in schedule order on fresh per-plane cell arrays; each plane is
/// written during its stage's powered window and latched by the end-of-stage
/// read. Thermal streams are keyed (seed, image_id, plane, cell), so results
/// never depend on evaluation order.
InferResult infer_image(const CompiledNetwork& net, const GridParams& dev, const float* image,
                        const InferOptions& opt);

struct EvalResult {
    int n = 0;
    int correct = 0;
    double accuracy = 0.0;
    double mean_image_energy = 0.0;  // J
    std::vector<int> predictions;
};

/// Classifies the first subset_n images (entire set when subset_n <= 0) on a
/// work pool of `jobs` threads. Throws on an empty dataset or a shape
/// mismatch against the network spec.
EvalResult evaluate(const CompiledNetwork& net, const GridParams& dev, const Dataset& data,
                    int subset_n, const InferOptions& opt, int jobs = 1);

/// Largest normalized drive the write chain can realize: the capacitor rails
/// clip any stage drive beyond +-this. Both modes share the clip.
double drive_clamp_limit(const GridParams& dev, const StageTiming& timing);

}  // namespace irmen
