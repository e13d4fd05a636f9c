#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "catgan/graph.hpp"
#include "catgan/metrics.hpp"
#include "catgan/network.hpp"

namespace catgan {

enum class HeadKind { vanilla, softmax, au, va, joint };
enum class VaLoss { mse, one_minus_ccc };
enum class JointWeighting { equal, ponderated };

/// Discriminator output layout:
///   vanilla  [rf]                         1 logit
///   softmax  [class_0 .. class_{k-1}, rf] k+1 logits, softmax over all
///   au       [au_0 .. au_7, rf]           9 independent sigmoid logits
///   va       [v, a, rf]                   linear v/a, sigmoid rf
///   joint    [v, a, au_0 .. au_7, rf]     11 nodes
struct HeadVariant {
  HeadKind kind = HeadKind::au;
  std::size_t classes = 10;  // softmax only
  VaLoss va_loss = VaLoss::mse;
  JointWeighting weighting = JointWeighting::equal;

  static HeadVariant vanilla() { return {HeadKind::vanilla}; }
  static HeadVariant softmax_k1(std::size_t k) { return {HeadKind::softmax, k}; }
  static HeadVariant au_sigmoid() { return {HeadKind::au}; }
  static HeadVariant va(VaLoss loss) { return {HeadKind::va, 10, loss}; }
  static HeadVariant joint(VaLoss loss, JointWeighting w) { return {HeadKind::joint, 10, loss, w}; }

  std::size_t output_width() const;
  /// Nodes that precede the real/fake node; the n of fake_label(n, alpha).
  std::size_t category_count() const { return output_width() - 1; }
  bool has_va() const { return kind == HeadKind::va || kind == HeadKind::joint; }
  bool has_au() const { return kind == HeadKind::au || kind == HeadKind::joint; }

  /// Stable textual tag, e.g. "softmax10", "au", "va-ccc", "joint-mse-ponderated".
  std::string tag() const;
  /// Inverse of tag(); throws std::invalid_argument on unknown tags.
  static HeadVariant from_tag(std::string_view tag);

  friend bool operator==(const HeadVariant&, const HeadVariant&) = default;
};

struct JointWeights {
  double va = 1.0 / 3.0;
  double au = 1.0 / 3.0;
  double rf = 1.0 / 3.0;
};
inline constexpr JointWeights kPonderatedWeights{0.27, 0.40, 0.33};

struct ModelConfig {
  HeadVariant head;
  std::size_t image_size = 28;  // 28 or 32 for the categorical model
  std::size_t channels = 3;
  std::size_t noise_dim = 100;
  double alpha = 0.9;
  bool flatten_features = false;  // FC over 4x4x256 instead of pooled 256 features
  ops::LeakyRelu leaky{};

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

NetworkSpec generator_spec(const ModelConfig& config);
NetworkSpec discriminator_spec(const ModelConfig& config);

template <typename T>
struct GanModel {
  ModelConfig config;
  Network<T> generator;
  Network<T> discriminator;
};

/// 100 -> 128 (ReLU) -> 784 (sigmoid) generator against a 784 -> 128 (ReLU) -> 1
/// discriminator. Images are flat [B, 784] in [0, 1].
template <typename T>
GanModel<T> build_vanilla(Rng& rng);

/// Deconvolutional generator and three-conv discriminator; images are
/// [B, S, S, C] in [-1, 1]. Throws for image sizes other than 28 and 32.
template <typename T>
GanModel<T> build_categorical(const ModelConfig& config, Rng& rng);

/// build_vanilla or build_categorical depending on config.head.
template <typename T>
GanModel<T> build_model(const ModelConfig& config, Rng& rng);

/// Uniform noise in [-1, 1]^dim per sample.
template <typename T>
Tensor<T> sample_noise(std::size_t batch, std::size_t dim, Rng& rng);

/// A scalar objective together with its named components.
struct LossParts {
  Var total;
  std::vector<std::pair<std::string, Var>> terms;
};

/// Weights used for a joint head under its configured weighting.
JointWeights joint_weights(const HeadVariant& head);

/// Discriminator objective from head logits of a real and a generated batch.
/// `labels` describes the real batch. Joint heads combine their VA, AU and
/// real/fake parts with `weights` when given, else with joint_weights(head).
template <typename T>
LossParts discriminator_loss(Graph<T>& g, const HeadVariant& head, double alpha, Var real_logits,
                             Var fake_logits, const metrics::LabelBatch& labels,
                             const std::optional<JointWeights>& weights = std::nullopt);

/// Weight of the image-matching term: (1500 - step) / 1500 * 10 before step 1500, else 0.
double huber_coefficient(std::uint64_t step);

struct GeneratorLossOptions {
  bool non_saturating = false;  // -mean log(1 - p_fake) instead of mean log p_fake
  double clamp = 1e-12;
  double huber_delta = 1.0;
};

/// mean log p_fake + huber_coefficient(step) * mean Huber(real - fake).
template <typename T>
LossParts generator_loss(Graph<T>& g, const HeadVariant& head, Var fake_logits, Var real_images,
                         Var fake_images, std::uint64_t step, const GeneratorLossOptions& opt = {});

/// Probability assigned to the real/fake node (the "generated" verdict) per sample.
template <typename T>
Var fake_probability(Graph<T>& g, const HeadVariant& head, Var logits);

/// Vanilla objectives: d = mean CE(real, 1) + mean CE(fake, 0), g = mean CE(fake, 1).
template <typename T>
LossParts vanilla_discriminator_loss(Graph<T>& g, Var real_logits, Var fake_logits);
template <typename T>
LossParts vanilla_generator_loss(Graph<T>& g, Var fake_logits);

/// Scores real-image head logits [B, width] against their labels. Sigmoid
/// nodes are thresholded at probability 0.5; softmax classes use the arg-max
/// over category nodes.
metrics::MetricsReport head_metrics(const HeadVariant& head, const Tensor<double>& real_logits,
                                    const metrics::LabelBatch& labels);

}  // namespace catgan
