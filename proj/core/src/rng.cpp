#include "lagraph/rng.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace lagraph {

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) {
    throw std::invalid_argument("cannot sample " + std::to_string(k) + " of " +
                                std::to_string(n) + " items without replacement");
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace lagraph
