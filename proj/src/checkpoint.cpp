#include "micontrast/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "micontrast/report.hpp"

namespace micontrast {

namespace {

constexpr const char* kMagic = "micontrast-critic";
constexpr int kVersion = 1;

void write_values(std::ostream& out, std::span<const double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out << ' ';
    out << format_real(values[k]);
  }
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw std::runtime_error("checkpoint: unexpected end of input");
    return w;
  }

  void expect(const std::string& keyword) {
    const std::string w = word();
    if (w != keyword) {
      throw std::runtime_error("checkpoint: expected '" + keyword + "', found '" + w + "'");
    }
  }

  std::size_t count() {
    const std::string w = word();
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc{} || ptr != w.data() + w.size()) {
      throw std::runtime_error("checkpoint: bad integer '" + w + "'");
    }
    return v;
  }

  double real() {
    const std::string w = word();
    try {
      return parse_real(w);
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("checkpoint: bad real '" + w + "'");
    }
  }

  void reals(std::span<double> out) {
    for (double& v : out) v = real();
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_checkpoint(std::ostream& out, const CriticModel& model, const AdamState* adam) {
  const CriticParams& params = model.params();
  out << kMagic << ' ' << kVersion << '\n';
  out << "kind " << to_string(params.kind) << '\n';
  out << "nets " << params.nets.size() << '\n';
  for (std::size_t k = 0; k < params.nets.size(); ++k) {
    const auto& net = params.nets[k];
    out << "net " << k << " layers " << net.layers.size() << '\n';
    for (const auto& layer : net.layers) {
      out << "layer " << layer.weight.rows() << ' ' << layer.weight.cols() << '\n';
      for (std::size_t r = 0; r < layer.weight.rows(); ++r) write_values(out, layer.weight.row(r));
      write_values(out, layer.bias);
    }
  }
  out << "adam " << (adam != nullptr ? 1 : 0) << '\n';
  if (adam != nullptr) {
    out << "lr " << format_real(adam->lr) << " beta1 " << format_real(adam->beta1) << " beta2 "
        << format_real(adam->beta2) << " eps " << format_real(adam->eps) << " step "
        << adam->step << '\n';
    const auto blocks = parameter_blocks(params);
    const bool shaped = adam->first.size() == blocks.size();
    for (const auto* moments : {&adam->first, &adam->second}) {
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (shaped) {
          write_values(out, (*moments)[b]);
        } else {
          write_values(out, std::vector<double>(blocks[b].size(), 0.0));
        }
      }
    }
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

void save_checkpoint(const std::filesystem::path& path, const CriticModel& model,
                     const AdamState* adam) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string());
  save_checkpoint(out, model, adam);
}

Checkpoint load_checkpoint(std::istream& in) {
  Reader reader(in);
  reader.expect(kMagic);
  const std::size_t version = reader.count();
  if (version != kVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  reader.expect("kind");
  CriticParams params;
  try {
    params.kind = parse_critic_kind(reader.word());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("checkpoint: ") + e.what());
  }
  reader.expect("nets");
  const std::size_t net_count = reader.count();
  for (std::size_t k = 0; k < net_count; ++k) {
    reader.expect("net");
    if (reader.count() != k) throw std::runtime_error("checkpoint: nets out of order");
    reader.expect("layers");
    const std::size_t layer_count = reader.count();
    MlpParams net;
    for (std::size_t l = 0; l < layer_count; ++l) {
      reader.expect("layer");
      const std::size_t rows = reader.count();
      const std::size_t cols = reader.count();
      DenseLayer layer{Matrix(rows, cols), AlignedVector(rows)};
      reader.reals(layer.weight.values());
      reader.reals(layer.bias);
      net.layers.push_back(std::move(layer));
    }
    params.nets.push_back(std::move(net));
  }
  reader.expect("adam");
  const std::size_t has_adam = reader.count();

  std::optional<AdamState> adam;
  if (has_adam == 1) {
    AdamState state;
    reader.expect("lr");
    state.lr = reader.real();
    reader.expect("beta1");
    state.beta1 = reader.real();
    reader.expect("beta2");
    state.beta2 = reader.real();
    reader.expect("eps");
    state.eps = reader.real();
    reader.expect("step");
    state.step = reader.count();
    for (auto block : parameter_blocks(std::as_const(params))) {
      state.first.emplace_back(block.size());
      reader.reals(state.first.back());
    }
    for (auto block : parameter_blocks(std::as_const(params))) {
      state.second.emplace_back(block.size());
      reader.reals(state.second.back());
    }
    adam = std::move(state);
  } else if (has_adam != 0) {
    throw std::runtime_error("checkpoint: adam flag must be 0 or 1");
  }

  try {
    return Checkpoint{CriticModel(std::move(params)), std::move(adam)};
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("checkpoint: ") + e.what());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  return load_checkpoint(in);
}

}  // namespace micontrast
