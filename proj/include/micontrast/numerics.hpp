#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <new>
#include <span>
#include <utility>
#include <vector>

namespace micontrast {

/// Cache-line aligned storage. Vectorised reductions peel an unaligned head,
/// so a fixed alignment keeps results bitwise reproducible across runs.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t count) {
    return static_cast<T*>(::operator new(count * sizeof(T), kAlign));
  }
  void deallocate(T* ptr, std::size_t) noexcept { ::operator delete(ptr, kAlign); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using AlignedVector = std::vector<double, AlignedAllocator<double>>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void fill(double v);
  /// Reshapes in place, keeping the allocation when it is large enough.
  /// Entry values are unspecified afterwards.
  void resize(std::size_t rows, std::size_t cols);
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  AlignedVector data_;
};

/// xoshiro256** generator. The 256-bit state is filled from the 64-bit seed
/// by four successive splitmix64 outputs, so a seed fully determines the
/// stream on every platform.
///
/// Normal variates use the basic Box–Muller transform; each transform yields
/// a pair and the second value is cached for the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint64_t uniform_index(std::uint64_t bound);
  double normal();

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

/// Stable log(sum(exp(v))). Throws std::domain_error on empty input.
/// Entries equal to -inf contribute zero mass.
double logsumexp(std::span<const double> values);

/// Paired batches (X, Y), each batch x d. Per dimension the pair is standard
/// bivariate normal with correlation rho: Y = rho X + sqrt(1 - rho^2) Z.
/// Draw order is row-major, with X[r][k] drawn before Z[r][k].
std::pair<Matrix, Matrix> sample_correlated_gaussian(Rng& rng, std::size_t d, double rho,
                                                     std::size_t batch);

/// copies * rows(y) rows, each an independently and uniformly chosen row of y.
Matrix marginal_shuffle(Rng& rng, const Matrix& y, std::size_t copies);

/// Fills m with independent standard normal draws in row-major order.
void fill_standard_normal(Rng& rng, Matrix& m);

}  // namespace micontrast
