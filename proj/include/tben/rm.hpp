#ifndef TBEN_RM_HPP
#define TBEN_RM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tben/error.hpp"

namespace tben {

// Elementwise normalization applied inside the projection. Scale divides
// (it rescales the expanding sum back down).
class Normalization {
  public:
    enum class Kind { Identity, SignedSqrt, Sigmoid, Scale };

    Normalization() = default;

    static Normalization identity() { return Normalization(Kind::Identity, 1.0); }
    static Normalization signed_sqrt() { return Normalization(Kind::SignedSqrt, 1.0); }
    static Normalization sigmoid() { return Normalization(Kind::Sigmoid, 1.0); }
    static Normalization scaled(double k);

    // "identity" | "ssqrt" | "sigmoid" | "scale:<k>"
    static Normalization parse(std::string_view spec);
    std::string to_string() const;

    Kind kind() const { return kind_; }
    double scale() const { return scale_; }

    double operator()(double v) const;

  private:
    Normalization(Kind kind, double scale) : kind_(kind), scale_(scale) {}

    Kind kind_ = Kind::Identity;
    double scale_ = 1.0;
};

std::vector<double> apply_normalization(std::vector<double> v, const Normalization& norm);

// Random Maclaurin compact bilinear projector: x in R^c maps to
// sigma((W1 x) o (W2 x)) in R^d, with W1, W2 fixed Rademacher sign matrices
// generated from a SplitMix64 stream (W1 first, then W2, row-major; an
// entry is +1 when the top bit of the next 64-bit word is 0). Immutable
// after construction and safe to share across threads.
class RmProjector {
  public:
    RmProjector(std::uint64_t seed, std::size_t input_dim, std::size_t output_dim,
                Normalization norm = Normalization::identity());

    // Explicit-matrix constructor for tests and hand-checked cases; entries
    // must all be exactly +1 or -1, row-major d x c.
    static RmProjector from_matrices(std::size_t input_dim, std::size_t output_dim,
                                     std::vector<double> w1, std::vector<double> w2,
                                     Normalization norm = Normalization::identity());

    std::uint64_t seed() const { return seed_; }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return output_dim_; }
    const Normalization& norm() const { return norm_; }

    double w1(std::size_t row, std::size_t col) const { return w1_[row * input_dim_ + col]; }
    double w2(std::size_t row, std::size_t col) const { return w2_[row * input_dim_ + col]; }

    std::vector<double> project(std::span<const double> x) const;

    // Sum of project() over n contiguous row-major descriptors, added into
    // out (length output_dim). This is the kernel behind every CBP pooling
    // stage; internally it runs blocked matrix products.
    void accumulate_projections(const double* descriptors, std::size_t n, double* out) const;

  private:
    RmProjector() = default;

    std::uint64_t seed_ = 0;
    std::size_t input_dim_ = 0;
    std::size_t output_dim_ = 0;
    Normalization norm_;
    std::vector<double> w1_, w2_;  // d x c row-major, entries +-1
};

// Exact second-order pooling: sum of outer products x x^T over the set,
// returned as a c x c row-major matrix. The oracle the projector is tested
// against; an empty set gives the zero matrix.
std::vector<double> full_bilinear(std::span<const std::vector<double>> xs, std::size_t c);

}  // namespace tben

#endif  // TBEN_RM_HPP
