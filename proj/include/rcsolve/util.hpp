#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "rcsolve/types.hpp"

namespace rcsolve {

// Shortest decimal string that round-trips the double (17 significant digits).
std::string format_full(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Runs fn(0..n-1), chunked over `threads` std::threads when threads > 1.
// Callers own determinism: write results by index, reduce serially afterwards.
void parallel_for(Index n, int threads, const std::function<void(Index)>& fn);

}  // namespace rcsolve
