#pragma once

#include <cstdint>
#include <random>

namespace sthygarch {

/**
 * Portable seeded standard-normal stream.
 *
 * Uniforms come from std::mt19937_64 (whose output sequence is fixed by the
 * standard), converted to doubles in (0, 1) from the top 53 bits. Normals use
 * the Marsaglia polar method, caching the second variate of each pair. Neither
 * step depends on library-specific distribution code, so a seed produces the
 * same stream on every conforming platform.
 */
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() noexcept;
    double normal() noexcept;

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/**
 * Seed of the `stream`-th independent substream of `master`: two rounds of the
 * splitmix64 finalizer applied to master + (stream + 1) * golden-ratio constant.
 */
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

} // namespace sthygarch
