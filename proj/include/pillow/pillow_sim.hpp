#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pillow/grid.hpp"
#include "pillow/rng.hpp"

namespace pillow {

/// K₁(s,t) = min(s,t) − st, the Brownian bridge covariance.
double bridge_cov(double s, double t);

/// K((s,t),(s2,t2)) = K₁(s,s2)·K₁(t,t2). Arguments must lie in [0,1].
double pillow_cov(double s, double t, double s2, double t2);

/// Grid restriction of Brownian sheet / pillow paths. Path k only depends on
/// (n, key, k); cell (a,b) draws the variate at cell index a·n + b.
class PillowSampler {
public:
    PillowSampler(int n, RngKey key);

    int n() const noexcept { return n_; }
    const RngKey& key() const noexcept { return field_.key(); }

    /// W(s_i,t_j) = Σ_{a<i,b<j} Z_ab / n with Z_ab iid N(0,1).
    void sheet(std::uint64_t path, GridFn2D& out) const;

    /// B₀ = W(s,t) − s W(1,t) − t W(s,1) + st W(1,1), zero on the boundary.
    void pillow(std::uint64_t path, GridFn2D& out) const;

private:
    int n_;
    GaussianField field_;
    mutable std::vector<double> z_;
};

GridFn2D sample_sheet(int n, RngKey key, std::uint64_t path_index);
GridFn2D sample_pillow(int n, RngKey key, std::uint64_t path_index);

struct PathBatch {
    int n = 0;
    std::vector<GridFn2D> paths;
    std::uint64_t seed = 0;
    std::uint32_t stream_id = 0;
};

PathBatch sample_pillow_batch(int n, int count, std::uint64_t seed, std::uint32_t stream_id);

/// Writes path_<k>.csv for every path plus manifest.json (seed, stream_id, n, count).
void write_batch(const std::filesystem::path& dir, const PathBatch& batch);

}  // namespace pillow
