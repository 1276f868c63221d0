#include "pillow/rng.hpp"

#include <cmath>
#include <numbers>

namespace pillow {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::encrypt(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

double to_unit_open_closed(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    // bits ∈ [0, 2^53); shift by one so 0 is excluded and 1 is included.
    return (static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) + 1.0) * 0x1.0p-53;
}

namespace {

inline void box_muller_pair(const RngKey& key, std::uint64_t path, std::uint32_t block,
                            double& z0, double& z1) {
    const Philox4x32::Counter ctr{block, static_cast<std::uint32_t>(path),
                                  static_cast<std::uint32_t>(path >> 32), key.stream_id};
    const Philox4x32::Key k{static_cast<std::uint32_t>(key.seed),
                            static_cast<std::uint32_t>(key.seed >> 32)};
    const auto r = Philox4x32::encrypt(ctr, k);
    const double u1 = to_unit_open_closed(r[0], r[1]);
    const double u2 = to_unit_open_closed(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    z0 = radius * std::cos(angle);
    z1 = radius * std::sin(angle);
}

}  // namespace

double GaussianField::normal(std::uint64_t path, std::uint32_t cell) const noexcept {
    double z0, z1;
    box_muller_pair(key_, path, cell / 2, z0, z1);
    return (cell % 2 == 0) ? z0 : z1;
}

void GaussianField::fill(std::uint64_t path, double* out, std::uint32_t count) const noexcept {
    std::uint32_t c = 0;
    for (; c + 1 < count; c += 2) box_muller_pair(key_, path, c / 2, out[c], out[c + 1]);
    if (c < count) {
        double z1;
        box_muller_pair(key_, path, c / 2, out[c], z1);
    }
}

}  // namespace pillow
