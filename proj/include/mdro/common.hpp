#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace mdro {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct ZeroRowMarginal : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateBox : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoFeasiblePoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LPFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One independent generator per logical task. Streams derived from the same
// seed but different counters never share state, so adding trials does not
// perturb earlier draws.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{splitmix64(seed), splitmix64(stream ^ 0xda3e39cb94b95bdbULL),
                    splitmix64(seed ^ stream)};
  return std::mt19937_64(seq);
}

}  // namespace mdro
