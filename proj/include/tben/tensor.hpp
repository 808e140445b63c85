#ifndef TBEN_TENSOR_HPP
#define TBEN_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tben/error.hpp"

namespace tben {

// Semantic axis labels. The numeric values are the on-disk codes of the
// TBNF format and must not change.
enum class Axis : std::uint8_t { T = 0, H = 1, W = 2, C = 3 };

char axis_name(Axis a);

// Dense rank-1..4 tensor with labelled axes. Row-major 64-bit data in
// memory, 32-bit on disk. Immutable after construction: every operation
// returns a new tensor, so tensors can be shared freely between threads.
class Tensor {
  public:
    Tensor(std::vector<std::size_t> dims, std::vector<Axis> axes, std::vector<double> data);

    static Tensor zeros(std::vector<std::size_t> dims, std::vector<Axis> axes);

    std::size_t rank() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    const std::vector<Axis>& axes() const { return axes_; }
    std::span<const double> data() const { return data_; }
    std::size_t size() const { return data_.size(); }

    bool has_axis(Axis a) const;
    std::size_t axis_index(Axis a) const;  // AxisError if absent
    std::size_t extent(Axis a) const;      // AxisError if absent

  private:
    std::vector<std::size_t> dims_;
    std::vector<Axis> axes_;
    std::vector<double> data_;
};

// TBNF on-disk format, little-endian:
//   bytes 0-3  magic "TBNF"
//   byte  4    version (1)
//   byte  5    element type (1 = 32-bit IEEE float)
//   byte  6    rank r in [1,4]
//   byte  7    reserved (0)
//   r bytes    axis labels (T=0, H=1, W=2, C=3)
//   r x u32    extents
//   prod(dims) x f32 payload, row-major
// Any deviation is a hard error on read.
Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const Tensor& t, const std::filesystem::path& path);

// Arithmetic mean over the given axes; reduced axes are removed from the
// output. Reducing the empty set returns a copy.
Tensor reduce_mean(const Tensor& t, const std::vector<Axis>& axes_to_reduce);

// A tensor whose leading axis is time: (T,C) or (T,H,W,C).
class FeatureSequence {
  public:
    explicit FeatureSequence(Tensor tensor, double frame_rate = 1.0);

    const Tensor& tensor() const { return tensor_; }
    double frame_rate() const { return frame_rate_; }

    std::size_t frames() const { return tensor_.dims()[0]; }
    std::size_t channels() const { return tensor_.dims().back(); }
    bool has_spatial() const { return tensor_.rank() == 4; }
    // Descriptors per frame: h*w for (T,H,W,C), 1 for (T,C).
    std::size_t descriptors_per_frame() const;

    // Contiguous row-major block of one frame.
    std::span<const double> frame_data(std::size_t t) const;

  private:
    Tensor tensor_;
    double frame_rate_;
};

}  // namespace tben

#endif  // TBEN_TENSOR_HPP
