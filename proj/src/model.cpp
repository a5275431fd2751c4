#include "semturbo/model.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace semturbo::nn {

namespace {

constexpr char kMagic[4] = {'S', 'E', 'M', 'W'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "weights file IO assumes a little-endian host");

void put_u32(std::ofstream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}

void put_f32(std::ofstream& os, const std::vector<float>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(float)));
}

[[noreturn]] void format_error(const std::string& what, std::uint64_t offset) {
    throw std::runtime_error("weights file: " + what + " at byte offset " + std::to_string(offset));
}

struct Reader {
    std::ifstream is;
    std::uint64_t offset = 0;

    explicit Reader(const std::string& path) : is(path, std::ios::binary) {
        if (!is) throw std::runtime_error("weights file: cannot open " + path);
    }
    void read(void* dst, std::size_t n, const char* what) {
        is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is.gcount()) != n) format_error(std::string("truncated ") + what, offset);
        offset += n;
    }
    std::uint32_t u32(const char* what) {
        std::uint32_t v;
        read(&v, 4, what);
        return v;
    }
    std::uint8_t u8(const char* what) {
        std::uint8_t v;
        read(&v, 1, what);
        return v;
    }
};

}  // namespace

void save_weights(const Model<float>& m, const std::string& path) {
    for (const auto& l : m.layers)
        for (float v : l.w)
            if (!std::isfinite(v)) throw std::runtime_error("save_weights: non-finite parameter");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("save_weights: cannot open " + path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(m.layers.size()));
    for (const auto& l : m.layers) {
        const std::uint8_t kind = static_cast<std::uint8_t>(l.spec.kind);
        const std::uint8_t act = static_cast<std::uint8_t>(l.spec.act);
        os.write(reinterpret_cast<const char*>(&kind), 1);
        os.write(reinterpret_cast<const char*>(&act), 1);
        put_u32(os, static_cast<std::uint32_t>(l.spec.filters));
        put_u32(os, static_cast<std::uint32_t>(l.in_c));
        put_u32(os, static_cast<std::uint32_t>(l.spec.kernel_h));
        put_u32(os, static_cast<std::uint32_t>(l.spec.kernel_w));
        put_u32(os, static_cast<std::uint32_t>(l.spec.stride));
        put_f32(os, l.w);
        put_f32(os, l.b);
    }
    if (!os) throw std::runtime_error("save_weights: write failed for " + path);
}

Model<float> load_weights(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.read(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) format_error("bad magic", 0);
    const std::uint32_t version = r.u32("version");
    if (version != kVersion) format_error("unsupported version " + std::to_string(version), 4);
    const std::uint32_t n_layers = r.u32("layer count");
    if (n_layers > 1024) format_error("implausible layer count", 8);

    Model<float> m;
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        const std::uint64_t layer_off = r.offset;
        const std::uint8_t kind = r.u8("layer kind");
        const std::uint8_t act = r.u8("activation");
        if (kind > 1) format_error("unknown layer kind tag", layer_off);
        if (act > 2) format_error("unknown activation tag", layer_off + 1);
        LayerState<float> l;
        l.spec.kind = static_cast<LayerKind>(kind);
        l.spec.act = static_cast<Activation>(act);
        l.spec.filters = static_cast<int>(r.u32("filter count"));
        l.in_c = static_cast<int>(r.u32("input channels"));
        l.spec.kernel_h = static_cast<int>(r.u32("kernel height"));
        l.spec.kernel_w = static_cast<int>(r.u32("kernel width"));
        l.spec.stride = static_cast<int>(r.u32("stride"));
        if (l.spec.filters < 1 || l.in_c < 1 || l.spec.kernel_h < 1 || l.spec.kernel_w < 1 ||
            l.spec.stride < 1)
            format_error("invalid layer dimensions", layer_off);
        l.w.resize(l.weight_count());
        l.b.resize(l.spec.filters);
        r.read(l.w.data(), l.w.size() * sizeof(float), "weights");
        r.read(l.b.data(), l.b.size() * sizeof(float), "bias");
        l.gw.assign(l.w.size(), 0.f);
        l.gb.assign(l.b.size(), 0.f);
        l.mw.assign(l.w.size(), 0.f);
        l.vw.assign(l.w.size(), 0.f);
        l.mb.assign(l.b.size(), 0.f);
        l.vb.assign(l.b.size(), 0.f);
        m.layers.push_back(std::move(l));
    }
    return m;
}

Model<double> to_double(const Model<float>& m) {
    Model<double> d;
    d.layers.reserve(m.layers.size());
    for (const auto& l : m.layers) {
        LayerState<double> dl;
        dl.spec = l.spec;
        dl.in_c = l.in_c;
        dl.w.assign(l.w.begin(), l.w.end());
        dl.b.assign(l.b.begin(), l.b.end());
        dl.gw.assign(l.w.size(), 0.0);
        dl.gb.assign(l.b.size(), 0.0);
        dl.mw.assign(l.w.size(), 0.0);
        dl.vw.assign(l.w.size(), 0.0);
        dl.mb.assign(l.b.size(), 0.0);
        dl.vb.assign(l.b.size(), 0.0);
        dl.step_count = l.step_count;
        d.layers.push_back(std::move(dl));
    }
    return d;
}

}  // namespace semturbo::nn
