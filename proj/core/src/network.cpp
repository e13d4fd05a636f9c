#include "catgan/network.hpp"

#include <stdexcept>

#include "catgan/parameters.hpp"

namespace catgan {

void LayerSpec::validate() const {
  const bool has_filter = kind == LayerKind::conv || kind == LayerKind::deconv;
  if (has_filter) {
    for (std::size_t e : filter_shape) {
      if (e == 0) throw std::invalid_argument("layer '" + name + "': filter extents must be positive");
    }
    if (stride[0] != 1 || stride[3] != 1 || stride[1] == 0 || stride[2] == 0) {
      throw std::invalid_argument("layer '" + name + "': stride must be [1,sH,sW,1] with sH,sW > 0");
    }
  }
  if (kind == LayerKind::affine && units == 0) {
    throw std::invalid_argument("layer '" + name + "': affine needs a positive unit count");
  }
  if (kind == LayerKind::dropout && !(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw std::invalid_argument("dropout keep_prob must lie in (0, 1]");
  }
}

LayerSpec LayerSpec::affine(std::string name, std::size_t units) {
  LayerSpec s;
  s.kind = LayerKind::affine;
  s.name = std::move(name);
  s.units = units;
  return s;
}

LayerSpec LayerSpec::conv(std::string name, std::array<std::size_t, 4> filter,
                          std::array<std::size_t, 4> stride, Padding padding) {
  LayerSpec s;
  s.kind = LayerKind::conv;
  s.name = std::move(name);
  s.filter_shape = filter;
  s.stride = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::deconv(std::string name, std::array<std::size_t, 4> filter,
                            std::array<std::size_t, 4> stride, Padding padding) {
  LayerSpec s = conv(std::move(name), filter, stride, padding);
  s.kind = LayerKind::deconv;
  return s;
}

LayerSpec LayerSpec::batchnorm(std::string name) {
  LayerSpec s;
  s.kind = LayerKind::batchnorm;
  s.name = std::move(name);
  return s;
}

LayerSpec LayerSpec::dropout(double keep_prob) {
  LayerSpec s;
  s.kind = LayerKind::dropout;
  s.name = "dropout";
  s.keep_prob = keep_prob;
  return s;
}

LayerSpec LayerSpec::act(ops::ActivationKind kind) {
  LayerSpec s;
  s.kind = LayerKind::activation;
  s.name = "activation";
  s.activation = kind;
  return s;
}

LayerSpec LayerSpec::global_avg_pool() {
  LayerSpec s;
  s.kind = LayerKind::global_avg_pool;
  s.name = "global_avg_pool";
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::flatten;
  s.name = "flatten";
  return s;
}

namespace {

Shape as_image(const Shape& s, const std::string& layer) {
  if (s.size() == 1) return {1, 1, s[0]};
  if (s.size() != 3) throw ShapeError("layer '" + layer + "' needs an HWC input, got " + to_string(s));
  return s;
}

}  // namespace

std::vector<Shape> infer_shapes(const NetworkSpec& spec) {
  std::vector<Shape> shapes{spec.input_shape};
  for (const auto& layer : spec.layers) {
    layer.validate();
    const Shape& in = shapes.back();
    switch (layer.kind) {
      case LayerKind::affine:
        if (in.size() != 1) throw ShapeError("affine '" + layer.name + "' needs a flat input, got " + to_string(in));
        shapes.push_back({layer.units});
        break;
      case LayerKind::conv: {
        const Shape img = as_image(in, layer.name);
        const auto& f = layer.filter_shape;
        if (img[2] != f[2]) {
          throw ShapeError("conv '" + layer.name + "': input " + to_string(img) +
                           " does not match filter channels " + std::to_string(f[2]));
        }
        shapes.push_back({conv_output_extent(img[0], f[0], layer.stride[1], layer.padding),
                          conv_output_extent(img[1], f[1], layer.stride[2], layer.padding), f[3]});
        break;
      }
      case LayerKind::deconv: {
        const Shape img = as_image(in, layer.name);
        const auto& f = layer.filter_shape;
        if (img[2] != f[2]) {
          throw ShapeError("deconv '" + layer.name + "': input " + to_string(img) +
                           " does not match filter channels " + std::to_string(f[2]));
        }
        shapes.push_back({conv_transpose_output_extent(img[0], f[0], layer.stride[1], layer.padding),
                          conv_transpose_output_extent(img[1], f[1], layer.stride[2], layer.padding),
                          f[3]});
        break;
      }
      case LayerKind::global_avg_pool: {
        const Shape img = as_image(in, layer.name);
        shapes.push_back({img[2]});
        break;
      }
      case LayerKind::flatten:
        shapes.push_back({element_count(in)});
        break;
      case LayerKind::batchnorm:
      case LayerKind::dropout:
      case LayerKind::activation:
        shapes.push_back(in);
        break;
    }
  }
  return shapes;
}

template <typename T>
Network<T>::Network(NetworkSpec spec, Rng& rng) : spec_(std::move(spec)) {
  shapes_ = infer_shapes(spec_);
  slots_.resize(spec_.layers.size());
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const LayerSpec& layer = spec_.layers[i];
    const Shape& in = shapes_[i];
    const std::string prefix = spec_.name + "." + layer.name;
    Slots& slot = slots_[i];
    switch (layer.kind) {
      case LayerKind::affine: {
        const std::size_t fan_in = in[0];
        slot.weight = static_cast<int>(params_.size());
        params_.push_back({prefix + ".w", xavier_init<T>({fan_in, layer.units}, fan_in, rng), {}});
        slot.bias = static_cast<int>(params_.size());
        params_.push_back({prefix + ".b", Tensor<T>({layer.units}), {}});
        break;
      }
      case LayerKind::conv:
      case LayerKind::deconv: {
        const auto& f = layer.filter_shape;
        const std::size_t fan_in = f[0] * f[1] * f[2];
        // Transposed convolutions store the adjoint convolution's filter.
        const Shape stored = layer.kind == LayerKind::conv ? Shape{f[0], f[1], f[2], f[3]}
                                                           : Shape{f[0], f[1], f[3], f[2]};
        slot.weight = static_cast<int>(params_.size());
        params_.push_back({prefix + ".w", xavier_init<T>(stored, fan_in, rng), {}});
        slot.bias = static_cast<int>(params_.size());
        params_.push_back({prefix + ".b", Tensor<T>({f[3]}), {}});
        break;
      }
      case LayerKind::batchnorm: {
        const std::size_t channels = in.back();
        slot.weight = static_cast<int>(params_.size());
        params_.push_back({prefix + ".gamma", Tensor<T>({channels}, T{1}), {}});
        slot.bias = static_cast<int>(params_.size());
        params_.push_back({prefix + ".beta", Tensor<T>({channels}), {}});
        slot.stats = static_cast<int>(stats_.size());
        stats_.push_back({prefix, {Tensor<T>({channels}), Tensor<T>({channels}, T{1})}});
        break;
      }
      default:
        break;
    }
  }
}

template <typename T>
std::size_t Network<T>::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += p.value.size();
  return total;
}

template <typename T>
Var Network<T>::forward(Graph<T>& g, Var input, const ForwardOptions& opt, Rng& rng) {
  const Shape given = g.value(input).shape();
  if (given.empty() || Shape(given.begin() + 1, given.end()) != spec_.input_shape) {
    throw ShapeError("network '" + spec_.name + "' expects [B]+" + to_string(spec_.input_shape) +
                     ", got " + to_string(given));
  }
  const std::size_t batch = given[0];
  auto leaf = [&](int index) {
    Parameter<T>& p = params_[static_cast<std::size_t>(index)];
    return opt.trainable ? g.parameter(p) : g.frozen(p);
  };
  auto to_image = [&](Var x) {
    const Shape s = g.value(x).shape();
    return s.size() == 2 ? ops::reshape(g, x, Shape{batch, 1, 1, s[1]}) : x;
  };

  Var x = input;
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const LayerSpec& layer = spec_.layers[i];
    const Slots& slot = slots_[i];
    switch (layer.kind) {
      case LayerKind::affine:
        x = ops::affine(g, x, leaf(slot.weight), leaf(slot.bias));
        break;
      case LayerKind::conv:
      case LayerKind::deconv: {
        const ops::ConvOptions conv{layer.stride[1], layer.stride[2], layer.padding};
        const Var w = leaf(slot.weight);
        x = layer.kind == LayerKind::conv ? ops::conv2d(g, to_image(x), w, conv)
                                          : ops::conv2d_transpose(g, to_image(x), w, conv);
        x = ops::bias_add(g, x, leaf(slot.bias));
        break;
      }
      case LayerKind::batchnorm: {
        ops::BatchNormOptions bn;
        bn.mode = opt.mode;
        bn.update_running = opt.update_running;
        x = ops::batch_norm(g, x, leaf(slot.weight), leaf(slot.bias),
                            stats_[static_cast<std::size_t>(slot.stats)].stats, bn);
        break;
      }
      case LayerKind::dropout:
        x = ops::dropout(g, x, layer.keep_prob, opt.mode, rng);
        break;
      case LayerKind::activation:
        x = ops::activation(g, x, ops::Activation{layer.activation, spec_.leaky});
        break;
      case LayerKind::global_avg_pool:
        x = ops::global_avg_pool(g, to_image(x));
        break;
      case LayerKind::flatten:
        x = ops::flatten(g, x);
        break;
    }
  }
  return x;
}

template class Network<float>;
template class Network<double>;

}  // namespace catgan
