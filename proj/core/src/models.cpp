#include "catgan/models.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "catgan/losses.hpp"

namespace catgan {

std::size_t HeadVariant::output_width() const {
  switch (kind) {
    case HeadKind::vanilla: return 1;
    case HeadKind::softmax: return classes + 1;
    case HeadKind::au: return metrics::kActionUnits + 1;
    case HeadKind::va: return 3;
    case HeadKind::joint: return 2 + metrics::kActionUnits + 1;
  }
  return 0;
}

std::string HeadVariant::tag() const {
  const std::string va = va_loss == VaLoss::mse ? "mse" : "ccc";
  switch (kind) {
    case HeadKind::vanilla: return "vanilla";
    case HeadKind::softmax: return "softmax" + std::to_string(classes);
    case HeadKind::au: return "au";
    case HeadKind::va: return "va-" + va;
    case HeadKind::joint:
      return "joint-" + va + (weighting == JointWeighting::ponderated ? "-ponderated" : "");
  }
  return "unknown";
}

HeadVariant HeadVariant::from_tag(std::string_view tag) {
  if (tag == "vanilla") return vanilla();
  if (tag == "au") return au_sigmoid();
  if (tag == "va-mse") return va(VaLoss::mse);
  if (tag == "va-ccc") return va(VaLoss::one_minus_ccc);
  if (tag == "joint-mse") return joint(VaLoss::mse, JointWeighting::equal);
  if (tag == "joint-ccc") return joint(VaLoss::one_minus_ccc, JointWeighting::equal);
  if (tag == "joint-mse-ponderated") return joint(VaLoss::mse, JointWeighting::ponderated);
  if (tag == "joint-ccc-ponderated") return joint(VaLoss::one_minus_ccc, JointWeighting::ponderated);
  if (tag.starts_with("softmax")) {
    const std::string digits(tag.substr(7));
    if (digits.empty()) return softmax_k1(10);
    if (digits.find_first_not_of("0123456789") == std::string::npos) {
      const std::size_t k = std::stoul(digits);
      if (k >= 1) return softmax_k1(k);
    }
  }
  throw std::invalid_argument("unknown head '" + std::string(tag) + "'");
}

NetworkSpec generator_spec(const ModelConfig& config) {
  NetworkSpec spec;
  spec.name = "generator";
  spec.input_shape = {config.noise_dim};
  spec.leaky = config.leaky;
  using K = ops::ActivationKind;
  if (config.head.kind == HeadKind::vanilla) {
    const std::size_t pixels = config.image_size * config.image_size * config.channels;
    spec.layers = {LayerSpec::affine("fc1", 128), LayerSpec::act(K::relu),
                   LayerSpec::affine("fc2", pixels), LayerSpec::act(K::sigmoid)};
    return spec;
  }
  const std::size_t last_kernel = config.image_size == 32 ? 6 : 2;
  const std::array<std::size_t, 4> s1{1, 1, 1, 1}, s2{1, 2, 2, 1};
  spec.layers = {
      LayerSpec::deconv("deconv1", {2, 2, config.noise_dim, 384}, s1, Padding::valid),
      LayerSpec::act(K::lrelu),
      LayerSpec::batchnorm("bn1"),
      LayerSpec::deconv("deconv2", {4, 4, 384, 128}, s2, Padding::valid),
      LayerSpec::act(K::lrelu),
      LayerSpec::batchnorm("bn2"),
      LayerSpec::deconv("deconv3", {4, 4, 128, 64}, s2, Padding::valid),
      LayerSpec::act(K::lrelu),
      LayerSpec::batchnorm("bn3"),
      LayerSpec::deconv("deconv4", {last_kernel, last_kernel, 64, config.channels}, s2, Padding::valid),
      LayerSpec::act(K::tanh),
  };
  return spec;
}

NetworkSpec discriminator_spec(const ModelConfig& config) {
  NetworkSpec spec;
  spec.name = "discriminator";
  spec.leaky = config.leaky;
  using K = ops::ActivationKind;
  const std::size_t width = config.head.output_width();
  if (config.head.kind == HeadKind::vanilla) {
    spec.input_shape = {config.image_size * config.image_size * config.channels};
    spec.layers = {LayerSpec::affine("fc1", 128), LayerSpec::act(K::relu), LayerSpec::affine("fc2", width)};
    return spec;
  }
  spec.input_shape = {config.image_size, config.image_size, config.channels};
  const std::array<std::size_t, 4> s2{1, 2, 2, 1};
  const std::size_t channels[] = {config.channels, 64, 128, 256};
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string n = std::to_string(i + 1);
    spec.layers.push_back(
        LayerSpec::conv("conv" + n, {5, 5, channels[i], channels[i + 1]}, s2, Padding::same));
    spec.layers.push_back(LayerSpec::act(K::lrelu));
    spec.layers.push_back(LayerSpec::batchnorm("bn" + n));
    spec.layers.push_back(LayerSpec::dropout(0.5));
  }
  spec.layers.push_back(config.flatten_features ? LayerSpec::flatten() : LayerSpec::global_avg_pool());
  spec.layers.push_back(LayerSpec::affine("fc", width));
  return spec;
}

template <typename T>
GanModel<T> build_vanilla(Rng& rng) {
  ModelConfig config;
  config.head = HeadVariant::vanilla();
  config.image_size = 28;
  config.channels = 1;
  return build_model<T>(config, rng);
}

template <typename T>
GanModel<T> build_categorical(const ModelConfig& config, Rng& rng) {
  if (config.head.kind == HeadKind::vanilla) {
    throw std::invalid_argument("build_categorical: the vanilla head has its own architecture");
  }
  if (config.image_size != 28 && config.image_size != 32) {
    throw std::invalid_argument("build_categorical: image size must be 28 or 32, got " +
                                std::to_string(config.image_size));
  }
  return build_model<T>(config, rng);
}

template <typename T>
GanModel<T> build_model(const ModelConfig& config, Rng& rng) {
  if (config.head.kind != HeadKind::vanilla && config.image_size != 28 && config.image_size != 32) {
    throw std::invalid_argument("image size must be 28 or 32, got " + std::to_string(config.image_size));
  }
  if (config.channels == 0 || config.noise_dim == 0) {
    throw std::invalid_argument("channels and noise_dim must be positive");
  }
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (config.head.kind == HeadKind::softmax && config.head.classes == 0) {
    throw std::invalid_argument("softmax head needs at least one class");
  }
  GanModel<T> model;
  model.config = config;
  model.generator = Network<T>(generator_spec(config), rng);
  model.discriminator = Network<T>(discriminator_spec(config), rng);
  const Shape image = model.generator.output_shape();
  if (image != model.discriminator.spec().input_shape) {
    throw ShapeError("generator emits " + to_string(image) + " but discriminator expects " +
                     to_string(model.discriminator.spec().input_shape));
  }
  return model;
}

template <typename T>
Tensor<T> sample_noise(std::size_t batch, std::size_t dim, Rng& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor<T> z({batch, dim});
  for (auto& v : z.values()) v = static_cast<T>(dist(rng));
  return z;
}

JointWeights joint_weights(const HeadVariant& head) {
  return head.weighting == JointWeighting::ponderated ? kPonderatedWeights : JointWeights{};
}

double huber_coefficient(std::uint64_t step) {
  if (step >= 1500) return 0.0;
  return (1500.0 - static_cast<double>(step)) / 1500.0 * 10.0;
}

namespace {

template <typename T>
Var half_sum(Graph<T>& g, Var a, Var b) {
  return ops::scale(g, ops::add(g, a, b), T{0.5});
}

template <typename T>
Var regression_loss(Graph<T>& g, VaLoss kind, Var pred, Var target) {
  return kind == VaLoss::mse ? ops::mse(g, pred, target) : ops::one_minus_ccc(g, pred, target);
}

template <typename T>
Var mean_sigmoid_ce(Graph<T>& g, Var logits, Var targets) {
  return ops::mean(g, ops::sigmoid_cross_entropy(g, logits, targets));
}

template <typename T>
Tensor<T> real_targets(const HeadVariant& head, const metrics::LabelBatch& labels, std::size_t batch) {
  const std::size_t width = head.output_width();
  Tensor<T> t({batch, width});
  auto need = [&](std::size_t have, const char* what) {
    if (have != batch) {
      throw std::invalid_argument(std::string("labels: ") + what + " has " + std::to_string(have) +
                                  " entries for a batch of " + std::to_string(batch));
    }
  };
  switch (head.kind) {
    case HeadKind::softmax:
      need(labels.classes.size(), "classes");
      for (std::size_t i = 0; i < batch; ++i) {
        if (labels.classes[i] >= head.classes) {
          throw std::invalid_argument("labels: class " + std::to_string(labels.classes[i]) + " out of range");
        }
        t[i * width + labels.classes[i]] = T{1};
      }
      break;
    case HeadKind::au:
    case HeadKind::joint: {
      need(labels.au.size(), "au");
      const std::size_t offset = head.kind == HeadKind::joint ? 2 : 0;
      for (std::size_t i = 0; i < batch; ++i) {
        for (std::size_t j = 0; j < metrics::kActionUnits; ++j) {
          t[i * width + offset + j] = static_cast<T>(labels.au[i][j]);
        }
      }
      if (head.kind == HeadKind::au) break;
      [[fallthrough]];
    }
    case HeadKind::va:
      need(labels.valence.size(), "valence");
      need(labels.arousal.size(), "arousal");
      for (std::size_t i = 0; i < batch; ++i) {
        t[i * width] = static_cast<T>(labels.valence[i]);
        t[i * width + 1] = static_cast<T>(labels.arousal[i]);
      }
      break;
    case HeadKind::vanilla:
      break;
  }
  return t;
}

template <typename T>
Tensor<T> fake_targets(const HeadVariant& head, double alpha, std::size_t batch) {
  const std::vector<double> row = losses::fake_label(head.category_count(), alpha);
  Tensor<T> t({batch, row.size()});
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) t[i * row.size() + j] = static_cast<T>(row[j]);
  }
  return t;
}

// One side (real or generated) of the discriminator objective; `prefix` names the terms.
template <typename T>
Var side_loss(Graph<T>& g, const HeadVariant& head, const std::optional<JointWeights>& override_weights,
              Var logits, const Tensor<T>& targets, const std::string& prefix, LossParts& parts) {
  const Var target = g.constant(targets);
  auto record = [&](const std::string& name, Var v) {
    parts.terms.emplace_back(prefix + name, v);
    return v;
  };
  switch (head.kind) {
    case HeadKind::softmax:
      return record("", ops::mean(g, ops::softmax_cross_entropy(g, logits, target)));
    case HeadKind::au:
      return record("", mean_sigmoid_ce(g, logits, target));
    case HeadKind::va:
    case HeadKind::joint: {
      const std::size_t rf_col = head.output_width() - 1;
      auto col = [&](Var x, std::size_t first, std::size_t count) { return ops::columns(g, x, first, count); };
      const Var lv = record("_v", regression_loss(g, head.va_loss, col(logits, 0, 1), col(target, 0, 1)));
      const Var la = record("_a", regression_loss(g, head.va_loss, col(logits, 1, 1), col(target, 1, 1)));
      const Var lrf = record("_rf", mean_sigmoid_ce(g, col(logits, rf_col, 1), col(target, rf_col, 1)));
      const Var va = half_sum(g, lv, la);
      if (head.kind == HeadKind::va) return record("", half_sum(g, va, lrf));
      const Var lau = record("_au", mean_sigmoid_ce(g, col(logits, 2, metrics::kActionUnits),
                                                     col(target, 2, metrics::kActionUnits)));
      if (!override_weights && head.weighting == JointWeighting::equal) {
        return record("", ops::scale(g, ops::add(g, ops::add(g, va, lau), lrf), static_cast<T>(1.0 / 3.0)));
      }
      const JointWeights w = override_weights.value_or(joint_weights(head));
      const std::vector<Var> parts_v{va, lau, lrf};
      const std::vector<T> weights{static_cast<T>(w.va), static_cast<T>(w.au), static_cast<T>(w.rf)};
      return record("", ops::weighted_sum<T>(g, parts_v, weights));
    }
    case HeadKind::vanilla:
      break;
  }
  throw std::invalid_argument("discriminator_loss: use vanilla_discriminator_loss for the vanilla head");
}

}  // namespace

template <typename T>
LossParts discriminator_loss(Graph<T>& g, const HeadVariant& head, double alpha, Var real_logits,
                             Var fake_logits, const metrics::LabelBatch& labels,
                             const std::optional<JointWeights>& weights) {
  const std::size_t width = head.output_width();
  for (Var v : {real_logits, fake_logits}) {
    const Shape s = g.value(v).shape();
    if (s.size() != 2 || s[1] != width) {
      throw ShapeError("discriminator_loss: head " + head.tag() + " expects [B," + std::to_string(width) +
                       "] logits, got " + to_string(s));
    }
  }
  const std::size_t real_batch = g.value(real_logits).extent(0);
  const std::size_t fake_batch = g.value(fake_logits).extent(0);
  LossParts parts;
  const Var real = side_loss(g, head, weights, real_logits, real_targets<T>(head, labels, real_batch),
                             "d_loss_real", parts);
  const Var fake = side_loss(g, head, weights, fake_logits, fake_targets<T>(head, alpha, fake_batch),
                             "d_loss_fake", parts);
  parts.total = half_sum(g, real, fake);
  parts.terms.emplace_back("d_loss", parts.total);
  return parts;
}

template <typename T>
Var fake_probability(Graph<T>& g, const HeadVariant& head, Var logits) {
  const Shape s = g.value(logits).shape();
  const std::size_t width = head.output_width();
  if (s.size() != 2 || s[1] != width) {
    throw ShapeError("fake_probability: expected [B," + std::to_string(width) + "], got " + to_string(s));
  }
  const Var p = head.kind == HeadKind::softmax ? ops::columns(g, ops::softmax(g, logits), width - 1, 1)
                                                : ops::sigmoid(g, ops::columns(g, logits, width - 1, 1));
  return ops::reshape(g, p, Shape{s[0]});
}

template <typename T>
LossParts generator_loss(Graph<T>& g, const HeadVariant& head, Var fake_logits, Var real_images,
                         Var fake_images, std::uint64_t step, const GeneratorLossOptions& opt) {
  if (g.value(real_images).shape() != g.value(fake_images).shape()) {
    throw ShapeError("generator_loss: real " + to_string(g.value(real_images).shape()) + " vs fake " +
                     to_string(g.value(fake_images).shape()));
  }
  LossParts parts;
  const T lo = static_cast<T>(opt.clamp), hi = static_cast<T>(1.0 - opt.clamp);
  Var p = fake_probability(g, head, fake_logits);
  Var adversarial;
  if (opt.non_saturating) {
    const Var ones = g.constant(Tensor<T>(g.value(p).shape(), T{1}));
    const Var q = ops::sub(g, ones, p);
    adversarial = ops::scale(g, ops::mean(g, ops::log(g, ops::clamp(g, q, lo, hi))), T{-1});
  } else {
    adversarial = ops::mean(g, ops::log(g, ops::clamp(g, p, lo, hi)));
  }
  parts.terms.emplace_back("g_loss_adv", adversarial);
  const double c = huber_coefficient(step);
  if (c > 0.0) {
    const Var residual = ops::sub(g, real_images, fake_images);
    const Var h = ops::mean(g, ops::huber(g, residual, static_cast<T>(opt.huber_delta)));
    parts.terms.emplace_back("g_loss_huber", h);
    const std::vector<Var> v{adversarial, h};
    const std::vector<T> w{T{1}, static_cast<T>(c)};
    parts.total = ops::weighted_sum<T>(g, v, w);
  } else {
    parts.total = adversarial;
  }
  parts.terms.emplace_back("g_loss", parts.total);
  return parts;
}

template <typename T>
LossParts vanilla_discriminator_loss(Graph<T>& g, Var real_logits, Var fake_logits) {
  LossParts parts;
  const Shape rs = g.value(real_logits).shape();
  const Shape fs = g.value(fake_logits).shape();
  const Var real = mean_sigmoid_ce(g, real_logits, g.constant(Tensor<T>(rs, T{1})));
  const Var fake = mean_sigmoid_ce(g, fake_logits, g.constant(Tensor<T>(fs, T{0})));
  parts.terms.emplace_back("d_loss_real", real);
  parts.terms.emplace_back("d_loss_fake", fake);
  parts.total = ops::add(g, real, fake);
  parts.terms.emplace_back("d_loss", parts.total);
  return parts;
}

template <typename T>
LossParts vanilla_generator_loss(Graph<T>& g, Var fake_logits) {
  LossParts parts;
  const Shape fs = g.value(fake_logits).shape();
  parts.total = mean_sigmoid_ce(g, fake_logits, g.constant(Tensor<T>(fs, T{1})));
  parts.terms.emplace_back("g_loss", parts.total);
  return parts;
}

metrics::MetricsReport head_metrics(const HeadVariant& head, const Tensor<double>& logits,
                                    const metrics::LabelBatch& labels) {
  const std::size_t width = head.output_width();
  if (logits.rank() != 2 || logits.extent(1) != width) {
    throw ShapeError("head_metrics: expected [B," + std::to_string(width) + "], got " + to_string(logits.shape()));
  }
  const std::size_t batch = logits.extent(0);
  auto at = [&](std::size_t i, std::size_t j) { return logits[i * width + j]; };
  metrics::MetricsReport report;

  std::vector<double> p_fake(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    if (head.kind == HeadKind::softmax) {
      double peak = at(i, 0);
      for (std::size_t j = 1; j < width; ++j) peak = std::max(peak, at(i, j));
      double total = 0.0;
      for (std::size_t j = 0; j < width; ++j) total += std::exp(at(i, j) - peak);
      p_fake[i] = std::exp(at(i, width - 1) - peak) / total;
    } else {
      p_fake[i] = 1.0 / (1.0 + std::exp(-at(i, width - 1)));
    }
  }
  const std::vector<std::uint8_t> real(batch, 0);
  report.pct_real_as_real = metrics::pct_real_as_real(p_fake, real);

  if (head.kind == HeadKind::softmax) {
    if (labels.classes.size() != batch) throw std::invalid_argument("head_metrics: class labels missing");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < batch; ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < head.classes; ++j) {
        if (at(i, j) > at(i, best)) best = j;
      }
      if (best == labels.classes[i]) ++correct;
    }
    report.class_accuracy = static_cast<double>(correct) / static_cast<double>(batch);
  }
  if (head.has_au()) {
    if (labels.au.size() != batch) throw std::invalid_argument("head_metrics: AU labels missing");
    const std::size_t offset = head.kind == HeadKind::joint ? 2 : 0;
    std::vector<metrics::AuFlags> predicted(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < metrics::kActionUnits; ++j) predicted[i][j] = at(i, offset + j) >= 0.0;
    }
    report.au = metrics::classification_metrics(predicted, labels.au);
  }
  if (head.has_va()) {
    if (labels.valence.size() != batch || labels.arousal.size() != batch) {
      throw std::invalid_argument("head_metrics: valence/arousal labels missing");
    }
    std::vector<double> v(batch), a(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      v[i] = at(i, 0);
      a[i] = at(i, 1);
    }
    report.mse_valence = losses::mse(v, labels.valence);
    report.mse_arousal = losses::mse(a, labels.arousal);
    if (batch >= 2) {
      report.ccc_valence = losses::ccc(v, labels.valence);
      report.ccc_arousal = losses::ccc(a, labels.arousal);
    }
  }
  return report;
}

#define CATGAN_INSTANTIATE_MODELS(T)                                                                   \
  template GanModel<T> build_vanilla<T>(Rng&);                                                         \
  template GanModel<T> build_categorical<T>(const ModelConfig&, Rng&);                                 \
  template GanModel<T> build_model<T>(const ModelConfig&, Rng&);                                       \
  template Tensor<T> sample_noise<T>(std::size_t, std::size_t, Rng&);                                  \
  template LossParts discriminator_loss<T>(Graph<T>&, const HeadVariant&, double, Var, Var,            \
                                           const metrics::LabelBatch&,                  \
                                           const std::optional<JointWeights>&);           \
  template LossParts generator_loss<T>(Graph<T>&, const HeadVariant&, Var, Var, Var, std::uint64_t,    \
                                       const GeneratorLossOptions&);                                   \
  template Var fake_probability<T>(Graph<T>&, const HeadVariant&, Var);                                \
  template LossParts vanilla_discriminator_loss<T>(Graph<T>&, Var, Var);                               \
  template LossParts vanilla_generator_loss<T>(Graph<T>&, Var);

CATGAN_INSTANTIATE_MODELS(float)
CATGAN_INSTANTIATE_MODELS(double)

}  // namespace catgan
