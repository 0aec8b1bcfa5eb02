#include "irmen/infer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace irmen {

namespace {

struct DeviceConsts {
    MacrospinKernel kernel;
    double v_sat, r_shunt, tau_in, tau_sense, write_gain;
    StagePartition part;
};

DeviceConsts derive(const GridParams& dev, const StageTiming& timing) {
    validate(dev.cell);
    DeviceConsts d;
    d.kernel = MacrospinKernel::make(dev.magnet, dev.geometry);
    d.v_sat = saturation_voltage(dev.magnet, dev.geometry);
    d.r_shunt = shunt_resistance(dev.cell, dev.magnet, dev.geometry);
    d.tau_in = input_tau(dev.cell, dev.magnet, dev.geometry);
    d.tau_sense = sense_tau(dev.cell);
    d.part = partition_stage(dev, timing);
    d.write_gain = dev.cell.i_unit * d.r_shunt /
                   drive_response(timing.powered_window, d.tau_in, dev.cell.t_slew);
    return d;
}

// Plane write in device mode: fresh cells, powered window toward vinf, settle,
// end-of-stage read into latch.
void run_plane(const GridParams& dev, const DeviceConsts& d, const std::vector<double>& vinf,
               std::uint64_t seed, std::uint64_t image_id, std::uint32_t plane_uid,
               std::vector<double>& latch) {
    const int n = static_cast<int>(vinf.size());
    std::vector<double> mx(n, 1.0), my(n, 0.0), mz(n, 0.0), vcap(n, 0.0), sense(n, 0.0);
    std::vector<Rng> rng;
    rng.reserve(n);
    for (int i = 0; i < n; ++i)
        rng.emplace_back(seed, std::initializer_list<std::uint64_t>{
                                   image_id, plane_uid, std::uint64_t(i)});
    engine::Block blk{mx.data(), my.data(), mz.data(), vcap.data(), sense.data(), rng.data(), n};
    engine::window(blk, d.kernel, d.tau_in, dev.cell.t_slew, d.tau_sense, vinf.data(),
                   d.part.n_window, d.part.dt_window);
    engine::coast(blk, d.kernel, d.tau_sense, 0.0, d.part.n_settle, d.part.dt_settle);
    const double kick = dev.cell.read_disturb * dev.cell.v_drive;
    latch.assign(sense.begin(), sense.end());
    engine::read(blk, d.kernel, d.tau_sense, dev.cell.t_latch, kick, latch.data(), d.part.n_read,
                 d.part.dt_read);
}

}  // namespace

InferResult infer_image(const CompiledNetwork& net, const GridParams& dev, const float* image,
                        const InferOptions& opt) {
    if (opt.mode == InferMode::ideal && opt.fit == nullptr)
        throw std::invalid_argument("infer: ideal mode needs a fitted transfer");
    validate(opt.ota);
    const DeviceConsts d = derive(dev, opt.timing);
    const double rail = dev.cell.v_rail;
    const CellParams& cp = dev.cell;

    std::vector<std::vector<double>> latch(net.planes.size());
    latch[0].resize(net.planes[0].size());
    for (int i = 0; i < net.planes[0].size(); ++i) {
        const double v = image[i];
        if (!(v >= -1.0f && v <= 1.0f))
            throw std::invalid_argument("infer: input pixel outside [-1, 1]");
        latch[0][i] = v;
    }

    InferResult out;
    std::vector<double> vinf;
    for (const auto& st : net.stages) {
        StageRecord rec;
        rec.tag = st.tag;
        rec.delay = opt.timing.stage_delay;
        if (st.margin) {
            out.energy.stages.push_back(std::move(rec));
            continue;
        }
        const PlaneProgram& prog = st.program;
        const int n = net.planes[prog.out_plane].size();
        vinf.assign(n, 0.0);
        std::vector<double> u_raw(n, 0.0);
        double drive_write = 0.0;
        for (int i = 0; i < n; ++i) {
            double u = synapse_current(1.0, prog.bias[i]);
            for (std::uint32_t k = prog.off[i]; k < prog.off[i + 1]; ++k) {
                const CellTerm& t = prog.terms[k];
                u += synapse_current(latch[t.plane][t.cell], t.w);
            }
            u_raw[i] = u;
            const double v = std::clamp(u * d.write_gain, -rail, rail);
            vinf[i] = v;
            drive_write += v * v / d.r_shunt * opt.timing.powered_window;
        }

        if (opt.mode == InferMode::device) {
            run_plane(dev, d, vinf, opt.seed, opt.image_id, std::uint32_t(prog.out_plane),
                      latch[prog.out_plane]);
        } else {
            auto& lp = latch[prog.out_plane];
            lp.resize(n);
            // The rails clip any drive the write chain cannot realize; beyond
            // them the fitted response sees the railed value, same as the
            // device.
            const double u_max = rail / d.write_gain;
            for (int i = 0; i < n; ++i)
                lp[i] = (*opt.fit)(std::clamp(u_raw[i], -u_max, u_max));
        }
        if (opt.keep_planes) {
            if (out.drives.empty()) out.drives.resize(net.planes.size());
            out.drives[prog.out_plane] = std::move(u_raw);
        }

        rec.n_otas = st.n_otas;
        rec.n_cells = st.n_cells;
        rec.n_reads = st.n_reads;
        const double swing = 2.0 * opt.ota.supply;
        rec.ota_static = rec.n_otas * opt.ota.static_power * opt.timing.powered_window;
        rec.gate_cycling = rec.n_otas * 0.5 * opt.ota.gate_cap * swing * swing;
        rec.access_cycling =
            rec.n_otas * 0.5 * opt.ota.gate_cap * opt.ota.v_threshold * opt.ota.v_threshold;
        rec.drive = drive_write + rec.n_reads * cp.v_drive * cp.v_drive / (cp.r_fm + cp.r_gnd) *
                                      cp.t_read;
        out.energy.stages.push_back(std::move(rec));
    }
    out.energy = image_energy(out.energy.stages);

    // Digital head on the last latched plane, in the logical [0, 1] encoding.
    const auto& feat = latch[net.planes.size() - 1];
    if (static_cast<int>(feat.size()) != net.fc_in)
        throw std::logic_error("infer: fc input size mismatch");
    out.scores.assign(net.fc_out, 0.0);
    for (int o = 0; o < net.fc_out; ++o) {
        double s = net.fc_b[o];
        const double* w = net.fc_w.data() + std::size_t(o) * net.fc_in;
        for (int i = 0; i < net.fc_in; ++i) s += w[i] * 0.5 * (feat[i] + 1.0);
        out.scores[o] = s;
    }
    out.predicted = static_cast<int>(std::max_element(out.scores.begin(), out.scores.end()) -
                                     out.scores.begin());
    if (opt.keep_planes) out.planes = std::move(latch);
    return out;
}

EvalResult evaluate(const CompiledNetwork& net, const GridParams& dev, const Dataset& data,
                    int subset_n, const InferOptions& opt, int jobs) {
    if (data.count == 0) throw std::invalid_argument("evaluate: empty dataset");
    if (data.rows != net.spec.input_rows || data.cols != net.spec.input_cols)
        throw std::invalid_argument("evaluate: dataset shape does not match the network input");
    const int n = (subset_n <= 0 || subset_n > data.count) ? data.count : subset_n;

    EvalResult res;
    res.n = n;
    res.predictions.assign(n, -1);
    std::vector<double> energies(n, 0.0);

    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            InferOptions o = opt;
            o.image_id = std::uint64_t(i);
            o.keep_planes = false;
            const InferResult r = infer_image(net, dev, data.image(i), o);
            res.predictions[i] = r.predicted;
            energies[i] = r.energy.total;
        }
    };
    const int nw = std::max(1, std::min(jobs, n));
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    double esum = 0.0;
    for (int i = 0; i < n; ++i) {
        if (res.predictions[i] == data.labels[i]) ++res.correct;
        esum += energies[i];
    }
    res.accuracy = double(res.correct) / n;
    res.mean_image_energy = esum / n;
    return res;
}

double drive_clamp_limit(const GridParams& dev, const StageTiming& timing) {
    const DeviceConsts d = derive(dev, timing);
    return dev.cell.v_rail / d.write_gain;
}

}  // namespace irmen

