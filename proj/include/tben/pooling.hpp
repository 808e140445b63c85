#ifndef TBEN_POOLING_HPP
#define TBEN_POOLING_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tben/rm.hpp"
#include "tben/tensor.hpp"

namespace tben {

// The five spatial/temporal aggregation pipelines. Spatial pooling always
// runs before temporal pooling.
enum class PipelineKind { Stap, SapTcbp, ScbpTap, ScbpTcbp, Stcbp };

// CLI/config spellings: "stap", "sap+tcbp", "scbp+tap", "scbp+tcbp", "stcbp".
PipelineKind parse_pipeline_kind(std::string_view spec);
std::string pipeline_name(PipelineKind kind);

bool pipeline_has_spatial_cbp(PipelineKind kind);
bool pipeline_has_temporal_cbp(PipelineKind kind);

class PoolingPipeline {
  public:
    static PoolingPipeline stap();
    static PoolingPipeline sap_tcbp(RmProjector temporal);
    static PoolingPipeline scbp_tap(RmProjector spatial);
    static PoolingPipeline scbp_tcbp(RmProjector spatial, RmProjector temporal);
    static PoolingPipeline stcbp(RmProjector joint);

    PipelineKind kind() const { return kind_; }
    const RmProjector* spatial_projector() const;
    const RmProjector* temporal_projector() const;
    // STCBP's single projector over all t*h*w descriptors.
    const RmProjector* joint_projector() const;

    // Output length for a given channel count.
    std::size_t output_dim(std::size_t channels) const;

  private:
    explicit PoolingPipeline(PipelineKind kind) : kind_(kind) {}

    PipelineKind kind_;
    std::optional<RmProjector> spatial_;
    std::optional<RmProjector> temporal_;
};

// Average pooling over time: (T,C) -> c-vector.
std::vector<double> tap(const FeatureSequence& seq);

// Per-frame average pooling over space: (T,H,W,C) -> (T,C).
FeatureSequence sap(const FeatureSequence& seq);

// Per-frame compact bilinear pooling over the h*w local descriptors:
// (T,H,W,C) -> (T,d).
FeatureSequence scbp(const FeatureSequence& seq, const RmProjector& p);

// Compact bilinear pooling over frames: (T,C) -> d-vector.
std::vector<double> tcbp(const FeatureSequence& seq, const RmProjector& p);

// Joint compact bilinear pooling over all t*h*w descriptors:
// (T,H,W,C) -> d-vector.
std::vector<double> stcbp(const FeatureSequence& seq, const RmProjector& p);

// Runs the configured pipeline. Rank-4 (T,H,W,C) input is accepted by every
// variant; rank-2 (T,C) input is accepted by the average-pooling spatial
// stages (stap, sap+tcbp), whose spatial step is then the identity.
std::vector<double> run_pipeline(const PoolingPipeline& pp, const FeatureSequence& seq);

// Builds a pipeline for `channels`-channel input with the standard seeding:
// the first (or only) projector uses `seed`; scbp+tcbp's temporal projector
// uses seed+1. spatial_dim is the SCBP output width where one exists.
PoolingPipeline make_pipeline(PipelineKind kind, std::size_t channels, std::size_t proj_dim,
                              std::size_t spatial_dim, std::uint64_t seed,
                              const Normalization& norm);

// The frame at index floor(t/2), as a t=1 sequence.
FeatureSequence mid_frame(const FeatureSequence& seq);

// Maximal windows of window_s*frame_rate frames at stride stride_s*frame_rate.
// A final shorter window is kept when it covers frames no full window reached
// (in particular a sequence shorter than the window yields itself).
std::vector<FeatureSequence> sliding_windows(const FeatureSequence& seq, double window_s,
                                             double stride_s);

}  // namespace tben

#endif  // TBEN_POOLING_HPP
