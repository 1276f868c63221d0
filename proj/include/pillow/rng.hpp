#pragma once

// Counter-based random numbers. Every Gaussian variate is a pure function of
// (seed, stream_id, path_index, cell_index), so paths can be generated in any
// order or on any thread and come out bit-identical.

#include <array>
#include <cstdint>

namespace pillow {

/// Philox4x32-10 block cipher (Salmon et al., Random123).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter encrypt(Counter ctr, Key key) noexcept;
};

struct RngKey {
    std::uint64_t seed = 0;
    std::uint32_t stream_id = 0;
};

/// Gaussian variates addressed by (path, cell). Cells 2c and 2c+1 share one
/// Philox block and are produced as a Box–Muller pair.
class GaussianField {
public:
    explicit GaussianField(RngKey key) noexcept : key_(key) {}

    /// Standard normal for (path, cell).
    double normal(std::uint64_t path, std::uint32_t cell) const noexcept;

    /// Fills out[0..count) with the standard normals for cells 0..count−1 of a path.
    void fill(std::uint64_t path, double* out, std::uint32_t count) const noexcept;

    const RngKey& key() const noexcept { return key_; }

private:
    RngKey key_;
};

/// Uniform double in (0, 1] built from 53 bits of two 32-bit words.
double to_unit_open_closed(std::uint32_t hi, std::uint32_t lo) noexcept;

}  // namespace pillow
