#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pmpc {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

/// Thrown when terminal-ingredient synthesis cannot satisfy the scaling
/// conditions (e.g. the disturbance equilibrium set does not fit inside the
/// state or input constraints for the chosen gain).
struct SynthesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline int max_threads() {
  if (const char* env = std::getenv("PREVIEW_MPC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Index-parallel map. work(i) must touch only slot i of any shared output.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& work) {
  const int nthreads = std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = static_cast<std::size_t>(t); i < n; i += nthreads) work(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Radical-inverse in the given base (van der Corput / Halton component).
inline double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

/// Point i of the Halton sequence in [0,1)^dim, dim <= 6.
inline Eigen::VectorXd halton_point(std::uint64_t index, int dim) {
  static constexpr std::uint32_t bases[6] = {2, 3, 5, 7, 11, 13};
  require(dim >= 1 && dim <= 6, "halton_point: dim must be in [1,6]");
  Eigen::VectorXd p(dim);
  for (int d = 0; d < dim; ++d) p[d] = radical_inverse(index + 1, bases[d]);
  return p;
}

/// SplitMix64 generator. Used instead of <random> distributions so that
/// seeded runs produce identical streams on every platform.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace pmpc
