#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <random>

namespace irsee {

// splitmix64; used only to derive well-separated seeds for substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Named substreams keep trial randomness order-independent: every block of a
// realization draws from its own stream, so e.g. direct-link draws do not
// depend on n_irs and trials can run in any order or in parallel.
enum class Stream : std::uint64_t {
  kPlaceUsers = 1,
  kPlaceDevices,
  kApIrsUnet,
  kApIrsInet,
  kIrsUserFading,
  kIrsDeviceFading,
  kDirectUsers,
  kDirectDevices,
  kRandomization,
  kRandomPhases,
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, Stream tag) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s ^= 0x5851f42d4c957f2dULL * (trial + 1);
  std::uint64_t b = splitmix64(s);
  s ^= static_cast<std::uint64_t>(tag) * 0xda942042e4dd58b5ULL;
  std::uint64_t c = splitmix64(s);
  return a ^ (b + 0x9e3779b97f4a7c15ULL) ^ (c << 1);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  Rng(std::uint64_t master, std::uint64_t trial, Stream tag)
      : gen_(derive_seed(master, trial, tag)) {}

  double uniform() { return uni_(gen_); }

  double normal() { return norm_(gen_); }

  std::complex<double> cnormal() {
    const double re = norm_(gen_);
    const double im = norm_(gen_);
    return {re * kInvSqrt2, im * kInvSqrt2};
  }

  Eigen::VectorXcd cnormal_vector(Eigen::Index n) {
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cnormal();
    return v;
  }

  // Column-major fill so that a prefix of columns is reproducible regardless
  // of the total column count.
  Eigen::MatrixXcd cnormal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = cnormal();
    return m;
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  static constexpr double kInvSqrt2 = 0.7071067811865475244;
  std::mt19937_64 gen_;
  std::normal_distribution<double> norm_{0.0, 1.0};
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
};

}  // namespace irsee
