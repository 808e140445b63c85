#include "tben/rm.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <iostream>

#include "tben/splitmix64.hpp"

namespace tben {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;

void check_finite_vec(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) throw DataError("non-finite input value");
    }
}

}  // namespace

Normalization Normalization::scaled(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw ConfigError("scale factor must be positive and finite");
    }
    return Normalization(Kind::Scale, k);
}

Normalization Normalization::parse(std::string_view spec) {
    if (spec == "identity") return identity();
    if (spec == "ssqrt") return signed_sqrt();
    if (spec == "sigmoid") return sigmoid();
    if (spec.rfind("scale:", 0) == 0) {
        std::string num(spec.substr(6));
        std::size_t used = 0;
        double k = 0.0;
        try {
            k = std::stod(num, &used);
        } catch (const std::exception&) {
            throw ConfigError("bad scale factor in normalization spec: " + std::string(spec));
        }
        if (used != num.size()) {
            throw ConfigError("bad scale factor in normalization spec: " + std::string(spec));
        }
        return scaled(k);
    }
    throw ConfigError("unknown normalization: " + std::string(spec) +
                      " (expect identity|ssqrt|sigmoid|scale:<k>)");
}

std::string Normalization::to_string() const {
    switch (kind_) {
        case Kind::Identity: return "identity";
        case Kind::SignedSqrt: return "ssqrt";
        case Kind::Sigmoid: return "sigmoid";
        case Kind::Scale: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "scale:%.17g", scale_);
            return buf;
        }
    }
    return "identity";
}

double Normalization::operator()(double v) const {
    switch (kind_) {
        case Kind::Identity: return v;
        case Kind::SignedSqrt: return v < 0.0 ? -std::sqrt(-v) : std::sqrt(v);
        case Kind::Sigmoid: return 1.0 / (1.0 + std::exp(-v));
        case Kind::Scale: return v / scale_;
    }
    return v;
}

std::vector<double> apply_normalization(std::vector<double> v, const Normalization& norm) {
    check_finite_vec(v);
    for (double& x : v) x = norm(x);
    return v;
}

RmProjector::RmProjector(std::uint64_t seed, std::size_t input_dim, std::size_t output_dim,
                         Normalization norm)
    : seed_(seed), input_dim_(input_dim), output_dim_(output_dim), norm_(norm) {
    if (input_dim == 0 || output_dim == 0) {
        throw DimensionError("projector dimensions must be positive");
    }
    if (output_dim <= input_dim) {
        std::cerr << "warning: projector output dim " << output_dim
                  << " <= input dim " << input_dim
                  << "; the bilinear approximation degrades below d > c\n";
    }
    SplitMix64 rng(seed);
    auto fill = [&](std::vector<double>& w) {
        w.resize(input_dim * output_dim);
        for (double& e : w) e = (rng.next() >> 63) == 0 ? 1.0 : -1.0;
    };
    fill(w1_);
    fill(w2_);
}

RmProjector RmProjector::from_matrices(std::size_t input_dim, std::size_t output_dim,
                                       std::vector<double> w1, std::vector<double> w2,
                                       Normalization norm) {
    if (input_dim == 0 || output_dim == 0) {
        throw DimensionError("projector dimensions must be positive");
    }
    if (w1.size() != input_dim * output_dim || w2.size() != input_dim * output_dim) {
        throw DimensionError("matrix size does not match d x c");
    }
    for (const auto* w : {&w1, &w2}) {
        for (double e : *w) {
            if (e != 1.0 && e != -1.0) throw DataError("Rademacher entries must be +1 or -1");
        }
    }
    RmProjector p;
    p.input_dim_ = input_dim;
    p.output_dim_ = output_dim;
    p.norm_ = norm;
    p.w1_ = std::move(w1);
    p.w2_ = std::move(w2);
    return p;
}

std::vector<double> RmProjector::project(std::span<const double> x) const {
    if (x.size() != input_dim_) {
        throw DimensionError("projector expects input of length " + std::to_string(input_dim_) +
                             ", got " + std::to_string(x.size()));
    }
    check_finite_vec(x);
    std::vector<double> out(output_dim_, 0.0);
    accumulate_projections(x.data(), 1, out.data());
    return out;
}

void RmProjector::accumulate_projections(const double* descriptors, std::size_t n,
                                         double* out) const {
    const auto c = static_cast<Eigen::Index>(input_dim_);
    const auto d = static_cast<Eigen::Index>(output_dim_);
    ConstMap w1(w1_.data(), d, c);
    ConstMap w2(w2_.data(), d, c);
    Eigen::Map<Eigen::VectorXd> acc(out, d);

    // Block over descriptors to bound the intermediate (block x d) products.
    constexpr std::size_t kBlock = 256;
    RowMat p1, p2;
    for (std::size_t start = 0; start < n; start += kBlock) {
        const auto rows = static_cast<Eigen::Index>(std::min(kBlock, n - start));
        ConstMap x(descriptors + start * input_dim_, rows, c);
        p1.noalias() = x * w1.transpose();
        p2.noalias() = x * w2.transpose();
        p1.array() *= p2.array();
        if (norm_.kind() == Normalization::Kind::Identity) {
            acc.noalias() += p1.colwise().sum().transpose();
        } else {
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index j = 0; j < d; ++j) {
                    acc[j] += norm_(p1(r, j));
                }
            }
        }
    }
}

std::vector<double> full_bilinear(std::span<const std::vector<double>> xs, std::size_t c) {
    std::vector<double> b(c * c, 0.0);
    for (const auto& x : xs) {
        if (x.size() != c) {
            throw DimensionError("descriptor length does not match c");
        }
        for (std::size_t i = 0; i < c; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                b[i * c + j] += x[i] * x[j];
            }
        }
    }
    return b;
}

}  // namespace tben
