#include "hom/rng.hpp"

#include <boost/random/poisson_distribution.hpp>
#include <cmath>
#include <stdexcept>

namespace hom {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
    return Engine(substream_seed(seed, stream));
}

std::uint64_t sample_poisson(Engine& engine, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::domain_error("sample_poisson: mean must be finite and non-negative");
    }
    if (mean == 0.0) return 0;
    boost::random::poisson_distribution<std::int64_t, double> dist(mean);
    return static_cast<std::uint64_t>(dist(engine));
}

}  // namespace hom
