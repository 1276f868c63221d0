#include "pillow/pillow_sim.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pillow/csv_io.hpp"

namespace pillow {

double bridge_cov(double s, double t) { return std::min(s, t) - s * t; }

double pillow_cov(double s, double t, double s2, double t2) {
    for (double x : {s, t, s2, t2}) {
        if (!(x >= 0.0 && x <= 1.0)) {
            std::ostringstream os;
            os << "pillow_cov: argument " << x << " outside [0,1]";
            throw DomainError(os.str());
        }
    }
    return bridge_cov(s, s2) * bridge_cov(t, t2);
}

PillowSampler::PillowSampler(int n, RngKey key) : n_(n), field_(key) {
    if (n < 2) throw DomainError("PillowSampler: n must be at least 2");
    z_.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
}

void PillowSampler::sheet(std::uint64_t path, GridFn2D& out) const {
    require_same_grid(n_, out.n(), "PillowSampler::sheet");
    field_.fill(path, z_.data(), static_cast<std::uint32_t>(z_.size()));
    const double inv = 1.0 / n_;
    for (int k = 0; k <= n_; ++k) {
        out(0, k) = 0.0;
        out(k, 0) = 0.0;
    }
    for (int i = 1; i <= n_; ++i) {
        double row = 0.0;  // Σ_{b<j} Z_{i−1,b}
        const double* z = z_.data() + static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n_);
        for (int j = 1; j <= n_; ++j) {
            row += z[j - 1] * inv;
            out(i, j) = out(i - 1, j) + row;
        }
    }
}

void PillowSampler::pillow(std::uint64_t path, GridFn2D& out) const {
    sheet(path, out);
    const double w11 = out(n_, n_);
    // Right and top edges of the sheet are needed by every interior node.
    std::vector<double> w1t(static_cast<std::size_t>(n_ + 1)), ws1(static_cast<std::size_t>(n_ + 1));
    for (int k = 0; k <= n_; ++k) {
        w1t[static_cast<std::size_t>(k)] = out(n_, k);
        ws1[static_cast<std::size_t>(k)] = out(k, n_);
    }
    for (int i = 0; i <= n_; ++i) {
        const double s = static_cast<double>(i) / n_;
        for (int j = 0; j <= n_; ++j) {
            if (i == 0 || j == 0 || i == n_ || j == n_) {
                out(i, j) = 0.0;
                continue;
            }
            const double t = static_cast<double>(j) / n_;
            out(i, j) = out(i, j) - s * w1t[static_cast<std::size_t>(j)] -
                        t * ws1[static_cast<std::size_t>(i)] + s * t * w11;
        }
    }
}

GridFn2D sample_sheet(int n, RngKey key, std::uint64_t path_index) {
    GridFn2D g(n);
    PillowSampler(n, key).sheet(path_index, g);
    return g;
}

GridFn2D sample_pillow(int n, RngKey key, std::uint64_t path_index) {
    GridFn2D g(n);
    PillowSampler(n, key).pillow(path_index, g);
    return g;
}

PathBatch sample_pillow_batch(int n, int count, std::uint64_t seed, std::uint32_t stream_id) {
    if (count < 0) throw DomainError("sample_pillow_batch: negative count");
    PathBatch b;
    b.n = n;
    b.seed = seed;
    b.stream_id = stream_id;
    PillowSampler sampler(n, RngKey{seed, stream_id});
    b.paths.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        GridFn2D g(n);
        sampler.pillow(static_cast<std::uint64_t>(k), g);
        b.paths.push_back(std::move(g));
    }
    return b;
}

void write_batch(const std::filesystem::path& dir, const PathBatch& batch) {
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < batch.paths.size(); ++k) {
        std::ofstream out(dir / ("path_" + std::to_string(k) + ".csv"));
        write_csv(out, batch.paths[k]);
    }
    nlohmann::json manifest{{"seed", batch.seed},
                            {"stream_id", batch.stream_id},
                            {"n", batch.n},
                            {"count", batch.paths.size()}};
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
}

}  // namespace pillow
