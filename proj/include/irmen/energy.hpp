#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace irmen {

/// Energy spent in one stage, split the way the hardware spends it: biasing
/// the OTAs for the powered window, cycling their gate capacitors, cycling
/// the weight-storage access transistors, and the drive current dissipated in
/// the write shunt and the read stack.
struct StageRecord {
    std::string tag;            // layer label, e.g. "conv1" or "pool1-maxh"
    long n_otas = 0;            // unit OTAs active this stage
    long n_cells = 0;           // cells driven this stage
    long n_reads = 0;           // memory cells read this stage
    double ota_static = 0.0;    // J
    double gate_cycling = 0.0;  // J
    double access_cycling = 0.0;  // J
    double drive = 0.0;         // J
    double delay = 0.0;         // s

    double total() const { return ota_static + gate_cycling + access_cycling + drive; }
};

struct EnergyReport {
    std::vector<StageRecord> stages;

    double ota_static = 0.0;
    double gate_cycling = 0.0;
    double access_cycling = 0.0;
    double drive = 0.0;
    double total = 0.0;
    double delay = 0.0;

    // Fixed reference points for the comparison report: a charge-based CeNN
    // implementation of the same network costs 12 nJ and 240.5 ns per image.
    static constexpr double baseline_energy = 12e-9;
    static constexpr double baseline_delay = 240.5e-9;
};

/// Sum a list of stage records into a report (totals plus the record list).
EnergyReport image_energy(const std::vector<StageRecord>& stages);

double total_delay(std::size_t n_stages, double stage_delay = 1.5e-9);

void write_csv(const EnergyReport& r, std::ostream& out);
void write_json(const EnergyReport& r, std::ostream& out);

}  // namespace irmen
