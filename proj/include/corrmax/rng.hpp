#pragma once

#include <cstdint>
#include <initializer_list>

namespace corrmax::rng {

// splitmix64 finalizer; used to mix stream tags into Philox keys.
std::uint64_t mix64(std::uint64_t x);

// Counter-based generator (Philox2x64-10). A stream is identified by its
// key; draws walk a 128-bit counter, so any number of streams derived from
// one master seed can run concurrently and the sequence a stream produces
// depends only on (key, counter), never on scheduling.
class Stream {
public:
    Stream() = default;
    explicit Stream(std::uint64_t key) : key_(key) {}

    // Derive a stream from a master seed and a tag path such as
    // {n, rep} or {n, rep, lane}. Distinct paths give distinct keys.
    static Stream derive(std::uint64_t master_seed,
                         std::initializer_list<std::uint64_t> path);

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1); safe as a log() argument.
    double next_unit();

    std::uint64_t key() const { return key_; }

private:
    void refill();

    std::uint64_t key_ = 0;
    std::uint64_t ctr_lo_ = 0;
    std::uint64_t ctr_hi_ = 0;
    std::uint64_t block_[2] = {0, 0};
    int avail_ = 0;
};

} // namespace corrmax::rng
