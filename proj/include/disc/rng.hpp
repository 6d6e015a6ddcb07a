#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace disc {

// Counter-based deterministic generator. A stream is identified by
// (seed, stream_id); the i-th output is a pure function of the stream key
// and the counter, so sequences do not depend on call order elsewhere in
// the program and replay identically across runs.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();
    double next_uniform();                     // [0, 1)
    double next_gaussian();                    // standard normal
    std::uint64_t next_below(std::uint64_t n); // [0, n), unbiased

    // Child stream k; derived stream ids are distinct for distinct k and
    // independent of how many draws the parent has made.
    Rng split(std::uint64_t k) const;

    static std::uint64_t mix64(std::uint64_t z);

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::vector<double> gaussian_sample(Rng& rng, std::size_t n);

// Fisher-Yates, deterministic for a given rng state.
void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng);

} // namespace disc
