#include "micontrast/critics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "eigen_view.hpp"

namespace micontrast {

using detail::view;

std::size_t MlpParams::input_dim() const {
  return layers.empty() ? 0 : layers.front().weight.cols();
}

std::size_t MlpParams::output_dim() const {
  return layers.empty() ? 0 : layers.back().weight.rows();
}

MlpParams make_mlp(std::span<const std::size_t> widths, Rng& rng) {
  if (widths.size() < 2) throw std::invalid_argument("make_mlp: need input and output widths");
  MlpParams mlp;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    const std::size_t fan_in = widths[k];
    const std::size_t fan_out = widths[k + 1];
    if (fan_in == 0 || fan_out == 0) throw std::invalid_argument("make_mlp: zero width");
    DenseLayer layer{Matrix(fan_out, fan_in), AlignedVector(fan_out, 0.0)};
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (double& w : layer.weight.values()) w = (2.0 * rng.uniform() - 1.0) * limit;
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

void validate_mlp(const MlpParams& mlp) {
  if (mlp.layers.empty()) throw std::invalid_argument("MLP has no layers");
  for (std::size_t k = 0; k < mlp.layers.size(); ++k) {
    const auto& layer = mlp.layers[k];
    if (layer.weight.rows() == 0 || layer.weight.cols() == 0) {
      throw std::invalid_argument("MLP layer " + std::to_string(k) + " is empty");
    }
    if (layer.bias.size() != layer.weight.rows()) {
      throw std::invalid_argument("MLP layer " + std::to_string(k) + ": bias size mismatch");
    }
    if (k > 0 && mlp.layers[k - 1].weight.rows() != layer.weight.cols()) {
      throw std::invalid_argument("MLP layer " + std::to_string(k) +
                                  ": input width does not match previous output");
    }
    if (!layer.weight.all_finite()) {
      throw std::invalid_argument("MLP layer " + std::to_string(k) + ": non-finite weight");
    }
    for (double b : layer.bias) {
      if (!std::isfinite(b)) {
        throw std::invalid_argument("MLP layer " + std::to_string(k) + ": non-finite bias");
      }
    }
  }
}

std::string_view to_string(CriticKind kind) {
  return kind == CriticKind::Joint ? "joint" : "separable";
}

CriticKind parse_critic_kind(std::string_view text) {
  if (text == "joint") return CriticKind::Joint;
  if (text == "separable") return CriticKind::Separable;
  throw std::invalid_argument("unknown critic '" + std::string(text) + "'");
}

CriticParams zeros_like(const CriticParams& params) {
  CriticParams out = params;
  for (auto& net : out.nets) {
    for (auto& layer : net.layers) {
      layer.weight.fill(0.0);
      std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
  }
  return out;
}

std::vector<std::span<double>> parameter_blocks(CriticParams& params) {
  std::vector<std::span<double>> blocks;
  for (auto& net : params.nets) {
    for (auto& layer : net.layers) {
      blocks.emplace_back(layer.weight.values());
      blocks.emplace_back(layer.bias);
    }
  }
  return blocks;
}

std::vector<std::span<const double>> parameter_blocks(const CriticParams& params) {
  std::vector<std::span<const double>> blocks;
  for (const auto& net : params.nets) {
    for (const auto& layer : net.layers) {
      blocks.emplace_back(layer.weight.values());
      blocks.emplace_back(layer.bias);
    }
  }
  return blocks;
}

std::size_t parameter_count(const CriticParams& params) {
  std::size_t total = 0;
  for (auto block : parameter_blocks(params)) total += block.size();
  return total;
}

namespace {

void validate_critic(const CriticParams& params) {
  const std::size_t expected = params.kind == CriticKind::Joint ? 1 : 2;
  if (params.nets.size() != expected) {
    throw std::invalid_argument("critic: " + std::string(to_string(params.kind)) +
                                " critic needs " + std::to_string(expected) + " networks");
  }
  for (const auto& net : params.nets) validate_mlp(net);
  if (params.kind == CriticKind::Joint) {
    const auto& f = params.nets[0];
    if (f.output_dim() != 1) throw std::invalid_argument("joint critic must output a scalar");
    if (f.input_dim() % 2 != 0) {
      throw std::invalid_argument("joint critic input must be an even concatenation");
    }
  } else {
    const auto& g = params.nets[0];
    const auto& h = params.nets[1];
    if (g.output_dim() != h.output_dim()) {
      throw std::invalid_argument("separable critic: embedding widths differ");
    }
    if (g.input_dim() != h.input_dim()) {
      throw std::invalid_argument("separable critic: input widths differ");
    }
  }
}

std::vector<std::size_t> widths_for(const CriticConfig& config, std::size_t input,
                                    std::size_t output) {
  std::vector<std::size_t> widths{input};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(output);
  return widths;
}

CriticParams init_params(const CriticConfig& config, Rng& rng) {
  if (config.input_dim == 0) throw std::invalid_argument("critic: input_dim must be positive");
  CriticParams params{config.kind, {}};
  if (config.kind == CriticKind::Joint) {
    params.nets.push_back(make_mlp(widths_for(config, 2 * config.input_dim, 1), rng));
  } else {
    if (config.embed_dim == 0) throw std::invalid_argument("critic: embed_dim must be positive");
    const auto widths = widths_for(config, config.input_dim, config.embed_dim);
    params.nets.push_back(make_mlp(widths, rng));
    params.nets.push_back(make_mlp(widths, rng));
  }
  return params;
}

// Runs the MLP from the first layer's pre-activation (bias included), which
// the caller leaves in activations[0]. activations[k] ends up holding the
// output of layer k after its nonlinearity. Buffers are reused when possible.
void forward_layers(const MlpParams& mlp, std::vector<Matrix>& activations) {
  const std::size_t depth = mlp.layers.size();
  activations.resize(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    Matrix& out = activations[k];
    if (k > 0) {
      const auto& layer = mlp.layers[k];
      out.resize(activations[k - 1].rows(), layer.weight.rows());
      view(out).noalias() = view(activations[k - 1]) * view(layer.weight).transpose();
      view(out).rowwise() += view(layer.bias).transpose();
    }
    if (k + 1 < depth) view(out) = view(out).cwiseMax(0.0);
  }
}

void input_pre_activation(const DenseLayer& layer, const Matrix& input, Matrix& pre) {
  pre.resize(input.rows(), layer.weight.rows());
  view(pre).noalias() = view(input) * view(layer.weight).transpose();
  view(pre).rowwise() += view(layer.bias).transpose();
}

// Sum over rows, as a product with a ones vector.
void add_row_sum(const Matrix& m, AlignedVector& acc) {
  view(acc).noalias() += view(m).transpose() * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m.rows()));
}

// Back-propagates d(output), held in `delta`, through layers depth-1..1,
// accumulating their gradients and the first layer's bias gradient. On
// return `delta` holds d(pre-activation) of the first layer; its weight
// gradient is left to the caller. `spare` is a work buffer.
void backward_to_pre(const MlpParams& mlp, const std::vector<Matrix>& activations, Matrix& delta,
                     Matrix& spare, MlpParams& grad) {
  for (std::size_t k = mlp.layers.size() - 1; k > 0; --k) {
    auto& g = grad.layers[k];
    view(g.weight).noalias() += view(delta).transpose() * view(activations[k - 1]);
    add_row_sum(delta, g.bias);
    spare.resize(delta.rows(), mlp.layers[k].weight.cols());
    view(spare).noalias() = view(delta) * view(mlp.layers[k].weight);
    view(spare) = (view(activations[k - 1]).array() > 0.0).select(view(spare), 0.0);
    std::swap(delta, spare);
  }
  add_row_sum(delta, grad.layers[0].bias);
}

}  // namespace

CriticModel::CriticModel(const CriticConfig& config, Rng& init_rng)
    : params_(init_params(config, init_rng)) {}

CriticModel::CriticModel(CriticParams params) : params_(std::move(params)) {
  validate_critic(params_);
}

std::size_t CriticModel::input_dim() const {
  const std::size_t in = params_.nets.front().input_dim();
  return params_.kind == CriticKind::Joint ? in / 2 : in;
}

CriticParams& CriticModel::mutable_params() {
  ++version_;
  return params_;
}

LogitMatrix CriticModel::logits(const Matrix& x, const Matrix& y_pos, const Matrix& y_neg,
                                ForwardCache* cache) const {
  const std::size_t d = input_dim();
  const std::size_t n = x.rows();
  if (n == 0) throw std::invalid_argument("critic_logits: empty batch");
  if (x.cols() != d || y_pos.cols() != d || y_neg.cols() != d) {
    throw std::invalid_argument("critic_logits: input width does not match critic (" +
                                std::to_string(d) + ")");
  }
  if (y_pos.rows() != n) throw std::invalid_argument("critic_logits: y_pos rows != x rows");
  if (y_neg.rows() == 0 || y_neg.rows() % n != 0) {
    throw std::invalid_argument("critic_logits: y_neg rows must be a positive multiple of n");
  }
  const std::size_t m = y_neg.rows() / n + 1;

  ForwardCache local;
  ForwardCache& c = cache != nullptr ? *cache : local;
  c.owner = this;
  c.version = version_;
  c.n = n;
  c.m = m;
  c.x = x;
  c.pairs.resize(n * m, d);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(y_pos.row(i).begin(), d, c.pairs.row(i * m).begin());
    for (std::size_t j = 1; j < m; ++j) {
      std::copy_n(y_neg.row(i * (m - 1) + j - 1).begin(), d, c.pairs.row(i * m + j).begin());
    }
  }

  Matrix out(n, m);
  if (params_.kind == CriticKind::Joint) {
    const auto& f = params_.nets[0];
    const auto& first = f.layers[0];
    const auto w = view(first.weight);
    const Eigen::Index di = static_cast<Eigen::Index>(d);
    // W (x || y) = W_x x + W_y y; the x half is shared by all m columns of a row.
    detail::RowMajor x_part = view(x) * w.leftCols(di).transpose();
    x_part.rowwise() += view(first.bias).transpose();
    c.first_net.resize(f.layers.size());
    Matrix& pre0 = c.first_net[0];
    pre0.resize(n * m, first.weight.rows());
    auto pre = view(pre0);
    pre.noalias() = view(c.pairs) * w.rightCols(di).transpose();
    const Eigen::Index mi = static_cast<Eigen::Index>(m);
    for (std::size_t i = 0; i < n; ++i) {
      pre.middleRows(static_cast<Eigen::Index>(i) * mi, mi).rowwise() +=
          x_part.row(static_cast<Eigen::Index>(i));
    }
    forward_layers(f, c.first_net);
    c.second_net.clear();
    const Matrix& scores = c.first_net.back();
    for (std::size_t r = 0; r < n * m; ++r) out.values()[r] = scores(r, 0);
  } else {
    const auto& g = params_.nets[0];
    const auto& h = params_.nets[1];
    c.first_net.resize(g.layers.size());
    c.second_net.resize(h.layers.size());
    input_pre_activation(g.layers[0], x, c.first_net[0]);
    input_pre_activation(h.layers[0], c.pairs, c.second_net[0]);
    forward_layers(g, c.first_net);
    forward_layers(h, c.second_net);
    const Matrix& gx = c.first_net.back();
    const Matrix& hy = c.second_net.back();
    const std::size_t e = gx.cols();
    for (std::size_t i = 0; i < n; ++i) {
      const auto gi = gx.row(i);
      for (std::size_t j = 0; j < m; ++j) {
        const auto hj = hy.row(i * m + j);
        double dot = 0.0;
        for (std::size_t k = 0; k < e; ++k) dot += gi[k] * hj[k];
        out(i, j) = dot;
      }
    }
  }
  if (cache == nullptr) local = ForwardCache{};
  return LogitMatrix(std::move(out));
}

CriticParams CriticModel::backward(const ForwardCache& cache, const Matrix& dlogits) const {
  if (!cache.valid()) throw std::logic_error("critic_backward: no forward cache");
  if (cache.owner != this || cache.version != version_) {
    throw std::logic_error("critic_backward: forward cache is stale");
  }
  if (dlogits.rows() != cache.n || dlogits.cols() != cache.m) {
    throw std::invalid_argument("critic_backward: upstream gradient shape mismatch");
  }
  const std::size_t n = cache.n;
  const std::size_t m = cache.m;
  const std::size_t d = input_dim();
  CriticParams grad = zeros_like(params_);

  if (params_.kind == CriticKind::Joint) {
    const auto& f = params_.nets[0];
    auto& scratch = cache.scratch;
    scratch.resize(2);
    Matrix& delta = scratch[0];
    delta.resize(n * m, 1);
    std::copy(dlogits.values().begin(), dlogits.values().end(), delta.values().begin());
    backward_to_pre(f, cache.first_net, delta, scratch[1], grad.nets[0]);
    // Sum the shared x half over each row's m columns.
    const Eigen::Index mi = static_cast<Eigen::Index>(m);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mi);
    detail::RowMajor row_sums(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(delta.cols()));
    const auto dp = view(delta);
    for (std::size_t i = 0; i < n; ++i) {
      row_sums.row(static_cast<Eigen::Index>(i)).noalias() =
          ones.transpose() * dp.middleRows(static_cast<Eigen::Index>(i) * mi, mi);
    }
    auto gw = view(grad.nets[0].layers[0].weight);
    const Eigen::Index di = static_cast<Eigen::Index>(d);
    gw.leftCols(di).noalias() = row_sums.transpose() * view(cache.x);
    gw.rightCols(di).noalias() = dp.transpose() * view(cache.pairs);
  } else {
    const auto& g = params_.nets[0];
    const auto& h = params_.nets[1];
    const Matrix& gx = cache.first_net.back();
    const Matrix& hy = cache.second_net.back();
    const std::size_t e = gx.cols();
    Matrix dgx(n, e);
    Matrix dhy(n * m, e);
    for (std::size_t i = 0; i < n; ++i) {
      const auto gi = gx.row(i);
      auto dgi = dgx.row(i);
      for (std::size_t j = 0; j < m; ++j) {
        const double upstream = dlogits(i, j);
        const auto hj = hy.row(i * m + j);
        auto dhj = dhy.row(i * m + j);
        for (std::size_t k = 0; k < e; ++k) {
          dgi[k] += upstream * hj[k];
          dhj[k] = upstream * gi[k];
        }
      }
    }
    auto& scratch = cache.scratch;
    scratch.resize(2);
    backward_to_pre(g, cache.first_net, dgx, scratch[0], grad.nets[0]);
    view(grad.nets[0].layers[0].weight).noalias() = view(dgx).transpose() * view(cache.x);
    backward_to_pre(h, cache.second_net, dhy, scratch[1], grad.nets[1]);
    view(grad.nets[1].layers[0].weight).noalias() = view(dhy).transpose() * view(cache.pairs);
  }
  return grad;
}

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_step: block count mismatch");
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size()) {
      throw std::invalid_argument("adam_step: block " + std::to_string(b) + " size mismatch");
    }
  }
  if (state.first.empty() && state.step == 0) {
    for (auto block : params) {
      state.first.emplace_back(block.size(), 0.0);
      state.second.emplace_back(block.size(), 0.0);
    }
  }
  if (state.first.size() != params.size() || state.second.size() != params.size()) {
    throw std::invalid_argument("adam_step: optimizer state shaped for different parameters");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (state.first[b].size() != params[b].size() || state.second[b].size() != params[b].size()) {
      throw std::invalid_argument("adam_step: moment block " + std::to_string(b) +
                                  " size mismatch");
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    auto g = grads[b];
    auto& m1 = state.first[b];
    auto& m2 = state.second[b];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m1[k] = state.beta1 * m1[k] + (1.0 - state.beta1) * g[k];
      m2[k] = state.beta2 * m2[k] + (1.0 - state.beta2) * g[k] * g[k];
      const double m_hat = m1[k] / correction1;
      const double v_hat = m2[k] / correction2;
      p[k] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

void adam_step(CriticModel& model, const CriticParams& grads, AdamState& state) {
  auto p = parameter_blocks(model.mutable_params());
  auto g = parameter_blocks(grads);
  adam_step(std::span<const std::span<double>>(p), std::span<const std::span<const double>>(g),
            state);
}

}  // namespace micontrast
