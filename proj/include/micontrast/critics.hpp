#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "micontrast/logits.hpp"
#include "micontrast/numerics.hpp"

namespace micontrast {

/// Affine layer y = W x + b, with W stored out x in.
struct DenseLayer {
  Matrix weight;
  AlignedVector bias;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Rectifier between layers, identity on the last one.
struct MlpParams {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const;
  std::size_t output_dim() const;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// widths = {input, hidden..., output}. Weights are He-uniform,
/// U(-sqrt(6 / fan_in), sqrt(6 / fan_in)); biases start at zero.
MlpParams make_mlp(std::span<const std::size_t> widths, Rng& rng);

/// Throws std::invalid_argument when layer shapes do not compose or a
/// parameter is non-finite.
void validate_mlp(const MlpParams& mlp);

enum class CriticKind { Joint, Separable };

std::string_view to_string(CriticKind kind);
CriticKind parse_critic_kind(std::string_view text);

struct CriticConfig {
  CriticKind kind = CriticKind::Joint;
  std::size_t input_dim = 20;
  std::vector<std::size_t> hidden{256, 256};
  std::size_t embed_dim = 32;
};

/// Joint: nets = {f}, logit = f(x || y).
/// Separable: nets = {g, h}, logit = <g(x), h(y)>.
/// Gradients use the same type.
struct CriticParams {
  CriticKind kind = CriticKind::Joint;
  std::vector<MlpParams> nets;

  friend bool operator==(const CriticParams&, const CriticParams&) = default;
};

CriticParams zeros_like(const CriticParams& params);

/// Flat views over every weight and bias, net by net, layer by layer,
/// weight before bias.
std::vector<std::span<double>> parameter_blocks(CriticParams& params);
std::vector<std::span<const double>> parameter_blocks(const CriticParams& params);
std::size_t parameter_count(const CriticParams& params);

/// Activations retained by a forward pass for the matching backward pass.
struct ForwardCache {
  const void* owner = nullptr;
  std::uint64_t version = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  Matrix x;
  Matrix pairs;  // n*m rows; row i*m + j is the y scored against x_i in column j
  std::vector<Matrix> first_net;
  std::vector<Matrix> second_net;
  mutable std::vector<Matrix> scratch;  // backward buffers, reused across calls

  bool valid() const { return owner != nullptr; }
};

/// The critic g(x, y) = exp(logit(x, y)); only logits are ever materialised.
class CriticModel {
 public:
  CriticModel(const CriticConfig& config, Rng& init_rng);
  explicit CriticModel(CriticParams params);

  CriticKind kind() const { return params_.kind; }
  std::size_t input_dim() const;
  const CriticParams& params() const { return params_; }
  /// Any mutable access invalidates forward caches taken earlier.
  CriticParams& mutable_params();
  std::uint64_t version() const { return version_; }

  /// x: n x d, y_pos: n x d, y_neg: n*(m-1) x d where row i*(m-1) + (j-1)
  /// is the negative for column j of row i. Throws std::invalid_argument on
  /// shape mismatch.
  LogitMatrix logits(const Matrix& x, const Matrix& y_pos, const Matrix& y_neg,
                     ForwardCache* cache = nullptr) const;

  /// Gradient of sum_ij dlogits(i, j) * logit(i, j). Throws std::logic_error
  /// when the cache is missing or was produced by another model or version.
  CriticParams backward(const ForwardCache& cache, const Matrix& dlogits) const;

 private:
  CriticParams params_;
  std::uint64_t version_ = 0;
};

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  std::vector<AlignedVector> first;
  std::vector<AlignedVector> second;
};

/// Bias-corrected Adam descent step. Moment buffers are shaped on the first
/// call and must match thereafter (std::invalid_argument otherwise).
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state);

void adam_step(CriticModel& model, const CriticParams& grads, AdamState& state);

}  // namespace micontrast
