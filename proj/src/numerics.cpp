#include "micontrast/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace micontrast {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(data.begin(), data.end()) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Matrix: data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
}

void Matrix::resize(std::size_t rows, std::size_t cols) {
  data_.resize(rows * cols);
  rows_ = rows;
  cols_ = cols;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::uniform_index: bound must be positive");
  unsigned __int128 product = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

double logsumexp(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("logsumexp: empty input");
  const double peak = *std::max_element(values.begin(), values.end());
  if (peak == -std::numeric_limits<double>::infinity()) return peak;
  if (values.size() == 1) return peak;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

std::pair<Matrix, Matrix> sample_correlated_gaussian(Rng& rng, std::size_t d, double rho,
                                                     std::size_t batch) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::domain_error("sample_correlated_gaussian: rho must lie in [0, 1)");
  }
  if (d == 0 || batch == 0) {
    throw std::invalid_argument("sample_correlated_gaussian: d and batch must be positive");
  }
  const double noise_scale = std::sqrt(1.0 - rho * rho);
  Matrix x(batch, d);
  Matrix y(batch, d);
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t k = 0; k < d; ++k) {
      const double xv = rng.normal();
      const double z = rng.normal();
      x(r, k) = xv;
      y(r, k) = rho * xv + noise_scale * z;
    }
  }
  return {std::move(x), std::move(y)};
}

Matrix marginal_shuffle(Rng& rng, const Matrix& y, std::size_t copies) {
  if (copies == 0) throw std::invalid_argument("marginal_shuffle: copies must be >= 1");
  if (y.rows() == 0) throw std::invalid_argument("marginal_shuffle: y has no rows");
  Matrix out(copies * y.rows(), y.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const auto src = rng.uniform_index(y.rows());
    std::copy_n(y.row(src).begin(), y.cols(), out.row(r).begin());
  }
  return out;
}

void fill_standard_normal(Rng& rng, Matrix& m) {
  for (double& v : m.values()) v = rng.normal();
}

}  // namespace micontrast
