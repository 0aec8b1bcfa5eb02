#include "irmen/network.hpp"

#include <cmath>

#include "irmen/cenn.hpp"
#include "irmen/rng.hpp"

namespace irmen {

NetworkSpec NetworkSpec::lenet_small() {
    NetworkSpec s;
    s.layers = {{LayerSpec::Kind::conv, 8, 3, 0},
                {LayerSpec::Kind::pool, 0, 0, 0},
                {LayerSpec::Kind::conv, 16, 3, 0},
                {LayerSpec::Kind::pool, 0, 0, 0},
                {LayerSpec::Kind::fc, 0, 0, 10}};
    return s;
}

long CompiledNetwork::total_otas() const {
    long n = 0;
    for (const auto& st : stages) n += st.n_otas;
    return n;
}

namespace {

std::string layer_name(const LayerSpec& l, int conv_idx, int pool_idx) {
    switch (l.kind) {
        case LayerSpec::Kind::conv: return "conv" + std::to_string(conv_idx);
        case LayerSpec::Kind::pool: return "pool" + std::to_string(pool_idx);
        default: return "fc";
    }
}

const WeightTensor& expect(const WeightsBundle& w, const std::string& name,
                           std::vector<std::uint32_t> shape) {
    const WeightTensor* t = w.find(name);
    if (!t) throw CompileError("compile: bundle is missing tensor \"" + name + "\"");
    if (t->shape != shape) {
        auto fmt = [](const std::vector<std::uint32_t>& s) {
            std::string r;
            for (auto d : s) r += (r.empty() ? "" : "x") + std::to_string(d);
            return r;
        };
        throw CompileError("compile: tensor \"" + name + "\" has shape " + fmt(t->shape) +
                           ", expected " + fmt(shape));
    }
    return *t;
}

void seal_stage(StagePlan& st, const CompiledNetwork& net) {
    const PlaneShape& shape = net.planes[st.program.out_plane];
    st.n_cells = shape.size();
    st.n_reads = st.n_cells;
    long otas = 0;
    for (const auto& t : st.program.terms) otas += synapse_ota_count(t.w);
    for (double b : st.program.bias) otas += synapse_ota_count(b);
    st.n_otas = otas;
}

int add_plane(CompiledNetwork& net, const std::string& tag, PlaneShape shape) {
    net.planes.push_back(shape);
    net.plane_tags.push_back(tag);
    return static_cast<int>(net.planes.size()) - 1;
}

// Pairwise max along one axis as two saturating stages. With inputs a, b in
// [-1, 1]: c1 = sat(a - b - 1) and out = sat(b + c1 + 1) equal max(a, b)
// exactly under the hard clamp.
void emit_pair_max(CompiledNetwork& net, const std::string& tag, int src, bool horizontal) {
    const PlaneShape in = net.planes[src];
    PlaneShape out = in;
    (horizontal ? out.cols : out.rows) /= 2;

    const int diff = add_plane(net, tag + (horizontal ? "-hdiff" : "-vdiff"), out);
    const int comb = add_plane(net, tag + (horizontal ? "-hmax" : "-vmax"), out);

    auto src_index = [&](int ch, int r, int c, int second) {
        const int rr = horizontal ? r : 2 * r + second;
        const int cc = horizontal ? 2 * c + second : c;
        return std::uint32_t((ch * in.rows + rr) * in.cols + cc);
    };

    StagePlan sd;
    sd.tag = tag + (horizontal ? "-hdiff" : "-vdiff");
    sd.program.out_plane = diff;
    StagePlan sc;
    sc.tag = tag + (horizontal ? "-hmax" : "-vmax");
    sc.program.out_plane = comb;
    sd.program.off.push_back(0);
    sc.program.off.push_back(0);
    std::uint32_t cell = 0;
    for (int ch = 0; ch < out.channels; ++ch) {
        for (int r = 0; r < out.rows; ++r) {
            for (int c = 0; c < out.cols; ++c, ++cell) {
                const std::uint32_t a = src_index(ch, r, c, 0);
                const std::uint32_t b = src_index(ch, r, c, 1);
                sd.program.terms.push_back({std::uint32_t(src), a, 1.0});
                sd.program.terms.push_back({std::uint32_t(src), b, -1.0});
                sd.program.bias.push_back(-1.0);
                sd.program.off.push_back(std::uint32_t(sd.program.terms.size()));
                sc.program.terms.push_back({std::uint32_t(src), b, 1.0});
                sc.program.terms.push_back({std::uint32_t(diff), cell, 1.0});
                sc.program.bias.push_back(1.0);
                sc.program.off.push_back(std::uint32_t(sc.program.terms.size()));
            }
        }
    }
    seal_stage(sd, net);
    seal_stage(sc, net);
    net.stages.push_back(std::move(sd));
    net.stages.push_back(std::move(sc));
}

}  // namespace

CompiledNetwork compile_network(const NetworkSpec& spec, const WeightsBundle& weights) {
    if (spec.input_rows <= 0 || spec.input_cols <= 0)
        throw CompileError("compile: nonpositive input shape");
    if (spec.layers.empty()) throw CompileError("compile: network has no layers");

    CompiledNetwork net;
    net.spec = spec;
    add_plane(net, "input", {1, spec.input_rows, spec.input_cols});

    bool any_analog = false, saw_fc = false;
    int conv_idx = 0, pool_idx = 0, cur = 0;
    for (const auto& layer : spec.layers) {
        const std::string name =
            layer_name(layer, conv_idx + (layer.kind == LayerSpec::Kind::conv ? 1 : 0),
                       pool_idx + (layer.kind == LayerSpec::Kind::pool ? 1 : 0));
        if (saw_fc)
            throw CompileError("compile: layer " + name + " follows the fc head; fc must be last");
        const PlaneShape in = net.planes[cur];

        switch (layer.kind) {
            case LayerSpec::Kind::conv: {
                ++conv_idx;
                any_analog = true;
                if (layer.kernel != 3)
                    throw CompileError("compile: layer " + name + ": kernel " +
                                       std::to_string(layer.kernel) +
                                       "x" + std::to_string(layer.kernel) +
                                       " unsupported; the synapse array is 3x3");
                if (layer.out_channels <= 0)
                    throw CompileError("compile: layer " + name + ": out_channels must be >= 1");
                const auto co = std::uint32_t(layer.out_channels);
                const auto ci = std::uint32_t(in.channels);
                const auto& W = expect(weights, name + ".w", {co, ci, 3, 3});
                const auto& B = expect(weights, name + ".b", {co});

                const PlaneShape shape{layer.out_channels, in.rows, in.cols};
                const int raw = add_plane(net, name + "-raw", shape);
                const int act = add_plane(net, name, shape);

                // Device lowering: synapse weight w = logical/2 on the source
                // latch, and the same w folded into the cell bias so a present
                // neighbor contributes w*(r+1) = logical*rho. Border cells skip
                // both halves, which is zero padding in logical space.
                StagePlan sr;
                sr.tag = name;
                sr.program.out_plane = raw;
                sr.program.off.push_back(0);
                for (int oc = 0; oc < shape.channels; ++oc) {
                    for (int r = 0; r < shape.rows; ++r) {
                        for (int c = 0; c < shape.cols; ++c) {
                            double bias = B.data[oc];
                            for (int ic = 0; ic < in.channels; ++ic) {
                                for (int dr = -1; dr <= 1; ++dr) {
                                    for (int dc = -1; dc <= 1; ++dc) {
                                        const int rr = r + dr, cc = c + dc;
                                        if (rr < 0 || rr >= in.rows || cc < 0 || cc >= in.cols)
                                            continue;
                                        const double w =
                                            0.5 * W.data[((std::size_t(oc) * in.channels + ic) * 3 +
                                                          (dr + 1)) *
                                                             3 +
                                                         (dc + 1)];
                                        bias += w;
                                        if (w == 0.0) continue;
                                        sr.program.terms.push_back(
                                            {std::uint32_t(cur),
                                             std::uint32_t((ic * in.rows + rr) * in.cols + cc), w});
                                    }
                                }
                            }
                            sr.program.bias.push_back(bias);
                            sr.program.off.push_back(std::uint32_t(sr.program.terms.size()));
                        }
                    }
                }
                seal_stage(sr, net);
                net.stages.push_back(std::move(sr));

                // Fused activation slot: out = sat(2c - 1), the rectifier in
                // the [-1, 1] encoding.
                StagePlan sa;
                sa.tag = name + "-act";
                sa.program.out_plane = act;
                sa.program.off.push_back(0);
                for (int i = 0; i < shape.size(); ++i) {
                    sa.program.terms.push_back({std::uint32_t(raw), std::uint32_t(i), 2.0});
                    sa.program.bias.push_back(-1.0);
                    sa.program.off.push_back(std::uint32_t(sa.program.terms.size()));
                }
                seal_stage(sa, net);
                net.stages.push_back(std::move(sa));
                cur = act;
                break;
            }
            case LayerSpec::Kind::pool: {
                ++pool_idx;
                any_analog = true;
                if (in.rows % 2 != 0 || in.cols % 2 != 0)
                    throw CompileError("compile: layer " + name + ": input " +
                                       std::to_string(in.rows) + "x" + std::to_string(in.cols) +
                                       " not divisible by the 2x2 pool");
                emit_pair_max(net, name, cur, true);
                cur = static_cast<int>(net.planes.size()) - 1;
                emit_pair_max(net, name, cur, false);
                cur = static_cast<int>(net.planes.size()) - 1;
                for (int g = 0; g < 8; ++g) {
                    StagePlan m;
                    m.tag = name + "-gated-" + std::to_string(g + 5);
                    m.margin = true;
                    net.stages.push_back(std::move(m));
                }
                break;
            }
            case LayerSpec::Kind::fc: {
                saw_fc = true;
                if (layer.units <= 0)
                    throw CompileError("compile: layer fc: units must be >= 1");
                net.fc_in = in.size();
                net.fc_out = layer.units;
                const auto& W = expect(weights, "fc.w",
                                       {std::uint32_t(layer.units), std::uint32_t(in.size())});
                const auto& B = expect(weights, "fc.b", {std::uint32_t(layer.units)});
                net.fc_w = W.data;
                net.fc_b = B.data;
                break;
            }
        }
    }
    if (!saw_fc) throw CompileError("compile: network needs a final fc head");
    net.fc_only = !any_analog;
    return net;
}

WeightsBundle init_weights(const NetworkSpec& spec, std::uint64_t seed) {
    WeightsBundle w;
    int conv_idx = 0, channels = 1, rows = spec.input_rows, cols = spec.input_cols;
    std::uint64_t tensor_id = 0;
    auto fill = [&](const std::string& name, std::vector<std::uint32_t> shape, double scale) {
        WeightTensor t;
        t.name = name;
        t.shape = std::move(shape);
        t.data.resize(t.size());
        Rng rng(seed, {0xBEEFull, tensor_id++});
        for (auto& x : t.data) x = scale * rng.normal();
        w.tensors.push_back(std::move(t));
    };
    for (const auto& layer : spec.layers) {
        switch (layer.kind) {
            case LayerSpec::Kind::conv: {
                ++conv_idx;
                const std::string name = "conv" + std::to_string(conv_idx);
                const double scale = std::sqrt(2.0 / (9.0 * channels));
                fill(name + ".w",
                     {std::uint32_t(layer.out_channels), std::uint32_t(channels), 3, 3}, scale);
                fill(name + ".b", {std::uint32_t(layer.out_channels)}, 0.0);
                channels = layer.out_channels;
                break;
            }
            case LayerSpec::Kind::pool:
                rows /= 2;
                cols /= 2;
                break;
            case LayerSpec::Kind::fc: {
                const int fan_in = channels * rows * cols;
                fill("fc.w", {std::uint32_t(layer.units), std::uint32_t(fan_in)},
                     std::sqrt(2.0 / fan_in));
                fill("fc.b", {std::uint32_t(layer.units)}, 0.0);
                break;
            }
        }
    }
    return w;
}

WeightsBundle quantize_bundle(const WeightsBundle& w, int bits) {
    WeightsBundle q = w;
    for (auto& t : q.tensors) {
        if (t.name == "fc.w" || t.name == "fc.b") continue;  // digital head
        quantize_tensor(t.data, bits);
    }
    return q;
}

}  // namespace irmen
