#include "tben/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace tben {

namespace {

constexpr char kMagic[4] = {'T', 'B', 'N', 'F'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kElemF32 = 1;

void check_finite(std::span<const double> data) {
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw DataError("tensor contains a non-finite value");
        }
    }
}

void put_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

std::uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

char axis_name(Axis a) {
    switch (a) {
        case Axis::T: return 'T';
        case Axis::H: return 'H';
        case Axis::W: return 'W';
        case Axis::C: return 'C';
    }
    return '?';
}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<Axis> axes, std::vector<double> data)
    : dims_(std::move(dims)), axes_(std::move(axes)), data_(std::move(data)) {
    if (dims_.empty() || dims_.size() > 4) {
        throw DimensionError("tensor rank must be in [1,4], got " + std::to_string(dims_.size()));
    }
    if (axes_.size() != dims_.size()) {
        throw AxisError("axis list length does not match rank");
    }
    std::size_t n = 1;
    for (std::size_t d : dims_) {
        if (d == 0) throw DimensionError("tensor extents must be positive");
        n *= d;
    }
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        for (std::size_t j = i + 1; j < axes_.size(); ++j) {
            if (axes_[i] == axes_[j]) throw AxisError("duplicate axis label");
        }
    }
    if (data_.size() != n) {
        throw DimensionError("data length " + std::to_string(data_.size()) +
                             " does not match product of dims " + std::to_string(n));
    }
    check_finite(data_);
}

Tensor Tensor::zeros(std::vector<std::size_t> dims, std::vector<Axis> axes) {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return Tensor(std::move(dims), std::move(axes), std::vector<double>(n, 0.0));
}

bool Tensor::has_axis(Axis a) const {
    return std::find(axes_.begin(), axes_.end(), a) != axes_.end();
}

std::size_t Tensor::axis_index(Axis a) const {
    auto it = std::find(axes_.begin(), axes_.end(), a);
    if (it == axes_.end()) {
        throw AxisError(std::string("tensor has no axis ") + axis_name(a));
    }
    return static_cast<std::size_t>(it - axes_.begin());
}

std::size_t Tensor::extent(Axis a) const { return dims_[axis_index(a)]; }

Tensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on " + path.string());

    if (bytes.size() < 8) throw FormatError("file too short for TBNF header: " + path.string());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (std::memcmp(p, kMagic, 4) != 0) throw FormatError("bad magic in " + path.string());
    if (p[4] != kVersion) {
        throw FormatError("unsupported TBNF version " + std::to_string(p[4]));
    }
    if (p[5] != kElemF32) {
        throw FormatError("unsupported element type " + std::to_string(p[5]));
    }
    std::size_t rank = p[6];
    if (rank < 1 || rank > 4) throw FormatError("rank out of range: " + std::to_string(rank));
    if (p[7] != 0) throw FormatError("reserved header byte is nonzero");

    std::size_t offset = 8;
    if (bytes.size() < offset + rank + 4 * rank) {
        throw FormatError("file too short for axis/extent block: " + path.string());
    }
    std::vector<Axis> axes(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        std::uint8_t code = p[offset + i];
        if (code > 3) throw FormatError("bad axis code " + std::to_string(code));
        axes[i] = static_cast<Axis>(code);
    }
    offset += rank;
    std::vector<std::size_t> dims(rank);
    std::size_t n = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        std::uint32_t e = get_u32_le(p + offset + 4 * i);
        if (e == 0) throw FormatError("zero extent in " + path.string());
        dims[i] = e;
        n *= e;
    }
    offset += 4 * rank;

    if (bytes.size() != offset + 4 * n) {
        throw TruncationError("payload size mismatch in " + path.string() + ": declared " +
                              std::to_string(n) + " floats, file holds " +
                              std::to_string((bytes.size() - offset) / 4));
    }
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t u = get_u32_le(p + offset + 4 * i);
        float f;
        std::memcpy(&f, &u, 4);
        if (!std::isfinite(f)) {
            throw DataError("non-finite payload value in " + path.string());
        }
        data[i] = static_cast<double>(f);
    }
    return Tensor(std::move(dims), std::move(axes), std::move(data));
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
    check_finite(t.data());

    std::string bytes;
    bytes.reserve(8 + 5 * t.rank() + 4 * t.size());
    bytes.append(kMagic, 4);
    bytes.push_back(static_cast<char>(kVersion));
    bytes.push_back(static_cast<char>(kElemF32));
    bytes.push_back(static_cast<char>(t.rank()));
    bytes.push_back(0);
    for (Axis a : t.axes()) bytes.push_back(static_cast<char>(a));
    for (std::size_t d : t.dims()) {
        if (d > std::numeric_limits<std::uint32_t>::max()) {
            throw DimensionError("extent exceeds u32 range");
        }
        put_u32_le(bytes, static_cast<std::uint32_t>(d));
    }
    for (double v : t.data()) {
        float f = static_cast<float>(v);
        if (!std::isfinite(f)) {
            // magnitude overflowed 32-bit storage; refuse rather than write inf
            throw DataError("value not representable as 32-bit float: " + std::to_string(v));
        }
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        put_u32_le(bytes, u);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

Tensor reduce_mean(const Tensor& t, const std::vector<Axis>& axes_to_reduce) {
    for (Axis a : axes_to_reduce) {
        t.axis_index(a);  // AxisError when absent
    }
    if (axes_to_reduce.empty()) return t;

    std::vector<bool> reduced(t.rank(), false);
    for (Axis a : axes_to_reduce) reduced[t.axis_index(a)] = true;

    std::vector<std::size_t> out_dims;
    std::vector<Axis> out_axes;
    std::size_t reduce_count = 1;
    for (std::size_t i = 0; i < t.rank(); ++i) {
        if (reduced[i]) {
            reduce_count *= t.dims()[i];
        } else {
            out_dims.push_back(t.dims()[i]);
            out_axes.push_back(t.axes()[i]);
        }
    }
    // Reducing every axis still yields a tensor; use a single-element C axis.
    bool full_reduction = out_dims.empty();
    if (full_reduction) {
        out_dims.push_back(1);
        out_axes.push_back(t.has_axis(Axis::C) ? Axis::C : t.axes()[0]);
    }

    std::size_t out_n = 1;
    for (std::size_t d : out_dims) out_n *= d;
    std::vector<double> acc(out_n, 0.0);

    // Row-major strides of the output as seen from the kept input axes.
    std::vector<std::size_t> kept_stride(t.rank(), 0);
    {
        std::size_t stride = 1;
        for (std::size_t i = t.rank(); i-- > 0;) {
            if (!reduced[i]) {
                kept_stride[i] = stride;
                stride *= t.dims()[i];
            }
        }
    }

    std::vector<std::size_t> coord(t.rank(), 0);
    const auto data = t.data();
    for (std::size_t lin = 0; lin < data.size(); ++lin) {
        std::size_t out_idx = 0;
        for (std::size_t i = 0; i < t.rank(); ++i) {
            if (!reduced[i]) out_idx += coord[i] * kept_stride[i];
        }
        acc[full_reduction ? 0 : out_idx] += data[lin];
        for (std::size_t i = t.rank(); i-- > 0;) {
            if (++coord[i] < t.dims()[i]) break;
            coord[i] = 0;
        }
    }
    for (double& v : acc) v /= static_cast<double>(reduce_count);
    return Tensor(std::move(out_dims), std::move(out_axes), std::move(acc));
}

FeatureSequence::FeatureSequence(Tensor tensor, double frame_rate)
    : tensor_(std::move(tensor)), frame_rate_(frame_rate) {
    const auto& axes = tensor_.axes();
    bool tc = axes.size() == 2 && axes[0] == Axis::T && axes[1] == Axis::C;
    bool thwc = axes.size() == 4 && axes[0] == Axis::T && axes[1] == Axis::H &&
                axes[2] == Axis::W && axes[3] == Axis::C;
    if (!tc && !thwc) {
        throw AxisError("feature sequence must have axes (T,C) or (T,H,W,C)");
    }
    if (!(frame_rate_ > 0.0) || !std::isfinite(frame_rate_)) {
        throw ConfigError("frame rate must be positive and finite");
    }
}

std::size_t FeatureSequence::descriptors_per_frame() const {
    return has_spatial() ? tensor_.dims()[1] * tensor_.dims()[2] : 1;
}

std::span<const double> FeatureSequence::frame_data(std::size_t t) const {
    std::size_t frame_size = descriptors_per_frame() * channels();
    return tensor_.data().subspan(t * frame_size, frame_size);
}

}  // namespace tben
