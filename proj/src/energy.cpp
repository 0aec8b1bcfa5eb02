#include "irmen/energy.hpp"

#include <json.hpp>

#include <ostream>

namespace irmen {

EnergyReport image_energy(const std::vector<StageRecord>& stages) {
    EnergyReport r;
    r.stages = stages;
    for (const StageRecord& s : stages) {
        r.ota_static += s.ota_static;
        r.gate_cycling += s.gate_cycling;
        r.access_cycling += s.access_cycling;
        r.drive += s.drive;
        r.delay += s.delay;
    }
    r.total = r.ota_static + r.gate_cycling + r.access_cycling + r.drive;
    return r;
}

double total_delay(std::size_t n_stages, double stage_delay) {
    return static_cast<double>(n_stages) * stage_delay;
}

void write_csv(const EnergyReport& r, std::ostream& out) {
    out << "stage,tag,n_otas,n_cells,n_reads,ota_static_j,gate_cycling_j,access_cycling_j,"
           "drive_j,total_j,delay_s\n";
    out.precision(12);
    for (std::size_t i = 0; i < r.stages.size(); ++i) {
        const StageRecord& s = r.stages[i];
        out << i + 1 << ',' << s.tag << ',' << s.n_otas << ',' << s.n_cells << ','
            << s.n_reads << ',' << s.ota_static << ',' << s.gate_cycling << ','
            << s.access_cycling << ',' << s.drive << ',' << s.total() << ',' << s.delay
            << '\n';
    }
    out << "total,,,,," << r.ota_static << ',' << r.gate_cycling << ',' << r.access_cycling
        << ',' << r.drive << ',' << r.total << ',' << r.delay << '\n';
}

void write_json(const EnergyReport& r, std::ostream& out) {
    nlohmann::json j;
    j["per_image_total_j"] = r.total;
    j["delay_s"] = r.delay;
    j["components"] = {{"ota_static_j", r.ota_static},
                       {"gate_cycling_j", r.gate_cycling},
                       {"access_cycling_j", r.access_cycling},
                       {"drive_j", r.drive}};
    j["baseline"] = {{"energy_j", EnergyReport::baseline_energy},
                     {"delay_s", EnergyReport::baseline_delay},
                     {"energy_ratio", EnergyReport::baseline_energy / (r.total > 0 ? r.total : 1.0)},
                     {"delay_ratio", EnergyReport::baseline_delay / (r.delay > 0 ? r.delay : 1.0)}};
    nlohmann::json stages = nlohmann::json::array();
    for (const StageRecord& s : r.stages) {
        stages.push_back({{"tag", s.tag},
                          {"n_otas", s.n_otas},
                          {"n_cells", s.n_cells},
                          {"n_reads", s.n_reads},
                          {"ota_static_j", s.ota_static},
                          {"gate_cycling_j", s.gate_cycling},
                          {"access_cycling_j", s.access_cycling},
                          {"drive_j", s.drive},
                          {"total_j", s.total()},
                          {"delay_s", s.delay}});
    }
    j["stages"] = stages;
    out << j.dump(2) << '\n';
}

}  // namespace irmen
