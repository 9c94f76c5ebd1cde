#include "corrmax/rng.hpp"

namespace corrmax::rng {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

constexpr std::uint64_t kPhiloxM = 0xd2b74407b1ce6e93ULL;
constexpr std::uint64_t kPhiloxW = 0x9e3779b97f4a7c15ULL;

inline void philox_round(std::uint64_t& c0, std::uint64_t& c1, std::uint64_t k) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(kPhiloxM) * c0;
    const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(prod);
    c0 = hi ^ k ^ c1;
    c1 = lo;
}

} // namespace

Stream Stream::derive(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t key = mix64(master_seed);
    for (std::uint64_t tag : path) {
        key = mix64(key ^ mix64(tag + 0x100000001b3ULL));
    }
    return Stream(key);
}

void Stream::refill() {
    std::uint64_t c0 = ctr_lo_;
    std::uint64_t c1 = ctr_hi_;
    std::uint64_t k = key_;
    for (int r = 0; r < 10; ++r) {
        philox_round(c0, c1, k);
        k += kPhiloxW;
    }
    block_[0] = c0;
    block_[1] = c1;
    avail_ = 2;
    if (++ctr_lo_ == 0) ++ctr_hi_;
}

std::uint64_t Stream::next_u64() {
    if (avail_ == 0) refill();
    return block_[--avail_];
}

double Stream::next_unit() {
    // 53 uniform bits, centered in the bin: never exactly 0 or 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace corrmax::rng
