#include "irmen/idx.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace irmen {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803u;
constexpr std::uint32_t kLabelMagic = 0x00000801u;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error("idx: " + path + ": " + what);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

std::uint32_t be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void put_be32(std::ofstream& out, std::uint32_t v) {
    const char b[4] = {char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
    out.write(b, 4);
}

std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", v);
    return buf;
}

}  // namespace

Dataset load_idx_pair(const std::string& images_path, const std::string& labels_path) {
    const auto img = read_file(images_path);
    if (img.size() < 16) fail(images_path, "truncated header");
    if (be32(img.data()) != kImageMagic)
        fail(images_path, "bad magic " + hex32(be32(img.data())) + ", want " + hex32(kImageMagic));
    Dataset d;
    d.count = static_cast<int>(be32(img.data() + 4));
    d.rows = static_cast<int>(be32(img.data() + 8));
    d.cols = static_cast<int>(be32(img.data() + 12));
    if (d.count <= 0 || d.rows <= 0 || d.cols <= 0) fail(images_path, "empty dimensions");
    const std::size_t need = 16 + std::size_t(d.count) * d.rows * d.cols;
    if (img.size() < need)
        fail(images_path, "truncated payload: " + std::to_string(img.size()) + " bytes, need " +
                              std::to_string(need));

    const auto lab = read_file(labels_path);
    if (lab.size() < 8) fail(labels_path, "truncated header");
    if (be32(lab.data()) != kLabelMagic)
        fail(labels_path, "bad magic " + hex32(be32(lab.data())) + ", want " + hex32(kLabelMagic));
    const int n_labels = static_cast<int>(be32(lab.data() + 4));
    if (n_labels != d.count)
        fail(labels_path, "label count " + std::to_string(n_labels) + " != image count " +
                              std::to_string(d.count));
    if (lab.size() < 8 + std::size_t(n_labels)) fail(labels_path, "truncated payload");

    d.pixels.resize(std::size_t(d.count) * d.rows * d.cols);
    for (std::size_t i = 0; i < d.pixels.size(); ++i)
        d.pixels[i] = static_cast<float>(img[16 + i]) * (2.0f / 255.0f) - 1.0f;
    d.labels.assign(lab.begin() + 8, lab.begin() + 8 + n_labels);
    for (int i = 0; i < n_labels; ++i)
        if (d.labels[i] > 9)
            fail(labels_path, "label " + std::to_string(d.labels[i]) + " at record " +
                                  std::to_string(i) + " out of range");
    return d;
}

void save_idx_pair(const std::string& images_path, const std::string& labels_path,
                   const std::vector<std::uint8_t>& pixels,
                   const std::vector<std::uint8_t>& labels, int rows, int cols) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("idx: nonpositive image shape");
    const std::size_t per = std::size_t(rows) * cols;
    if (per == 0 || pixels.size() % per != 0 || pixels.size() / per != labels.size())
        throw std::invalid_argument("idx: pixel/label sizes inconsistent with shape");
    const auto n = static_cast<std::uint32_t>(labels.size());

    std::ofstream img(images_path, std::ios::binary | std::ios::trunc);
    if (!img) fail(images_path, "cannot open for writing");
    put_be32(img, kImageMagic);
    put_be32(img, n);
    put_be32(img, static_cast<std::uint32_t>(rows));
    put_be32(img, static_cast<std::uint32_t>(cols));
    img.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!img) fail(images_path, "write failed");

    std::ofstream lab(labels_path, std::ios::binary | std::ios::trunc);
    if (!lab) fail(labels_path, "cannot open for writing");
    put_be32(lab, kLabelMagic);
    put_be32(lab, n);
    lab.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
    if (!lab) fail(labels_path, "write failed");
}

Dataset load_mnist(const std::string& dir, const std::string& which) {
    if (which != "train" && which != "t10k")
        throw std::invalid_argument("load_mnist: split must be \"train\" or \"t10k\"");
    const std::string img = dir + "/" + which + "-images-idx3-ubyte";
    const std::string lab = dir + "/" + which + "-labels-idx1-ubyte";
    std::ifstream probe(img, std::ios::binary);
    if (!probe)
        throw std::runtime_error("load_mnist: missing " + img +
                                 " (point IRMEN_DATA_DIR or io.data_dir at a directory holding "
                                 "the IDX file pair, or generate one with the dataset tool)");
    return load_idx_pair(img, lab);
}

Dataset subset(const Dataset& d, int n) {
    if (n <= 0 || n >= d.count) return d;
    Dataset s;
    s.count = n;
    s.rows = d.rows;
    s.cols = d.cols;
    const std::size_t per = std::size_t(d.rows) * d.cols;
    s.pixels.assign(d.pixels.begin(), d.pixels.begin() + per * n);
    s.labels.assign(d.labels.begin(), d.labels.begin() + n);
    return s;
}

}  // namespace irmen
