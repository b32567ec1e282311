#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <vector>

namespace sgi {

// Sum of f(i) over [0, n) with a chunking that depends only on n.  Chunks are
// summed in parallel and combined serially in chunk order, so the result is
// bit-identical for every worker count.
template <int K, class F>
Eigen::Matrix<double, K, 1> ordered_sum(std::size_t n, F&& f) {
  using Vec = Eigen::Matrix<double, K, 1>;
  constexpr std::size_t kChunks = 256;
  const std::size_t chunks = std::max<std::size_t>(1, std::min(n, kChunks));
  std::vector<Vec> partial(chunks, Vec::Zero());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(chunks); ++c) {
    const std::size_t lo = n * c / chunks;
    const std::size_t hi = n * (c + 1) / chunks;
    Vec acc = Vec::Zero();
    for (std::size_t i = lo; i < hi; ++i) acc += f(i);
    partial[c] = acc;
  }
  Vec total = Vec::Zero();
  for (const Vec& p : partial) total += p;
  return total;
}

}  // namespace sgi
