#pragma once

#include <cstdint>
#include <random>

namespace adngcl {

// splitmix64 finalizer, used to derive independent engine seeds from
// (seed, tag, epoch, anchor)-style tuples.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic substream: every distinct key tuple yields an independent
// engine regardless of call order.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a = 0,
                                   std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix64(seed);
    s = mix64(s ^ mix64(a + 0x100ULL));
    s = mix64(s ^ mix64(b + 0x10000ULL));
    s = mix64(s ^ mix64(c + 0x1000000ULL));
    return std::mt19937_64(s);
}

// Stream tags so different consumers of the same run seed never collide.
namespace stream_tag {
inline constexpr std::uint64_t sbm = 1;
inline constexpr std::uint64_t split = 2;
inline constexpr std::uint64_t augment = 3;
inline constexpr std::uint64_t init = 4;
inline constexpr std::uint64_t draw = 5;
inline constexpr std::uint64_t swap = 6;
}  // namespace stream_tag

}  // namespace adngcl
