#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "catgan/conv_shape.hpp"
#include "catgan/graph.hpp"
#include "catgan/ops.hpp"

namespace catgan {

enum class LayerKind { affine, conv, deconv, batchnorm, dropout, activation, global_avg_pool, flatten };

/// One row of a declarative architecture table.
///
/// `filter_shape` is [kH, kW, inC, outC] for both conv and deconv rows, and
/// `stride` follows the NHWC [1, sH, sW, 1] convention.
struct LayerSpec {
  LayerKind kind = LayerKind::activation;
  std::string name;
  std::array<std::size_t, 4> filter_shape{};
  std::array<std::size_t, 4> stride{1, 1, 1, 1};
  Padding padding = Padding::same;
  ops::ActivationKind activation = ops::ActivationKind::none;
  double keep_prob = 1.0;
  std::size_t units = 0;

  /// Throws std::invalid_argument on non-positive extents or keep_prob outside (0, 1].
  void validate() const;

  static LayerSpec affine(std::string name, std::size_t units);
  static LayerSpec conv(std::string name, std::array<std::size_t, 4> filter,
                        std::array<std::size_t, 4> stride, Padding padding);
  static LayerSpec deconv(std::string name, std::array<std::size_t, 4> filter,
                          std::array<std::size_t, 4> stride, Padding padding);
  static LayerSpec batchnorm(std::string name);
  static LayerSpec dropout(double keep_prob);
  static LayerSpec act(ops::ActivationKind kind);
  static LayerSpec global_avg_pool();
  static LayerSpec flatten();
};

struct NetworkSpec {
  std::string name;
  Shape input_shape;  // per sample, without the batch axis
  std::vector<LayerSpec> layers;
  ops::LeakyRelu leaky{};
};

/// Per-sample output shape after every layer of `spec`, checked against the
/// conv/transposed-conv arithmetic. A rank-1 input to a (de)conv layer is read
/// as a 1x1 image.
std::vector<Shape> infer_shapes(const NetworkSpec& spec);

template <typename T>
struct NamedStats {
  std::string name;
  ops::BatchNormStats<T> stats;
};

struct ForwardOptions {
  Mode mode = Mode::train;
  bool trainable = true;       // record parameters as gradient leaves
  bool update_running = true;  // let train-mode batch norm move running statistics
};

/// Parameters and running statistics instantiated from a NetworkSpec.
template <typename T>
class Network {
 public:
  Network() = default;
  /// Xavier-initialized weights, zero biases, unit BN scale.
  Network(NetworkSpec spec, Rng& rng);

  const NetworkSpec& spec() const noexcept { return spec_; }
  Shape output_shape() const { return shapes_.back(); }

  std::vector<Parameter<T>>& parameters() noexcept { return params_; }
  const std::vector<Parameter<T>>& parameters() const noexcept { return params_; }
  std::vector<NamedStats<T>>& running_stats() noexcept { return stats_; }
  const std::vector<NamedStats<T>>& running_stats() const noexcept { return stats_; }
  std::size_t parameter_count() const;

  /// Runs every layer on `input` ([B, ...input_shape]); `rng` drives dropout.
  Var forward(Graph<T>& g, Var input, const ForwardOptions& opt, Rng& rng);

 private:
  struct Slots {
    int weight = -1;
    int bias = -1;
    int stats = -1;
  };

  NetworkSpec spec_;
  std::vector<Shape> shapes_;
  std::vector<Parameter<T>> params_;
  std::vector<NamedStats<T>> stats_;
  std::vector<Slots> slots_;
};

extern template class Network<float>;
extern template class Network<double>;

}  // namespace catgan
