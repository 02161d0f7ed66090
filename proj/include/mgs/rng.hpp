#pragma once

// Seeded random streams and deterministic parallel chunking.
//
// Generator: std::mt19937_64. Stream i of master seed m is seeded with
// splitmix64(m ^ splitmix64(i)), so any stream can be regenerated alone.
// Work is cut into a fixed number of chunks, each with its own stream, and
// results are combined in chunk order; the thread count never affects output.

#include <cstdint>
#include <functional>
#include <random>

namespace mgs::rng {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream);
Engine make_stream(std::uint64_t master, std::uint64_t stream);

/// Worker count: MGS_THREADS if set (>= 1), else hardware concurrency.
int thread_count();

/// Calls fn(chunk) for chunk in [0, chunks) on up to `threads` threads.
/// threads <= 0 means thread_count(). The first exception is rethrown.
void parallel_chunks(std::size_t chunks, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace mgs::rng
