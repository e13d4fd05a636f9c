#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catgan/data.hpp"
#include "catgan/metrics.hpp"
#include "catgan/models.hpp"

namespace catgan {

enum class UpdateTarget { discriminator, generator };

/// Discriminator iff iteration is a multiple of update_rate + 1.
UpdateTarget update_target(std::uint64_t iteration, std::size_t update_rate);

struct TrainConfig {
  ModelConfig model;
  double learning_rate = 1e-4;  // generator; the discriminator uses half (categorical heads)
  std::size_t update_rate = 5;
  std::size_t batch_size = 64;
  std::uint64_t iterations = 20000;
  std::uint64_t checkpoint_every = 1000;
  std::uint64_t eval_every = 1;  // train/test batch metrics cadence
  std::uint64_t seed = 0;
  double clip_norm = 20.0;       // 0 disables clipping
  bool adam_bias_correction = true;
  bool non_saturating = false;
  std::filesystem::path out_dir;  // empty: keep everything in memory
  std::string config_echo;        // first line of run.log; generated when empty
  bool verbose = false;           // mirror progress lines to stderr

  /// Categorical defaults for `head`: lr 1e-4, update rate 5, batch 64, alpha 0.9.
  static TrainConfig categorical(HeadVariant head);
  /// Vanilla GAN: Adam lr 1e-3 with beta1 0.9 for both networks, batch 128,
  /// both networks stepped every iteration, no clipping.
  static TrainConfig vanilla();

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  /// One-line JSON rendering of every field.
  std::string to_json() const;
};

struct TrainData {
  ImageSet train;
  ImageSet test;
};

struct LossRow {
  std::uint64_t iteration = 0;  // completed iterations
  std::optional<UpdateTarget> target;  // empty when both networks stepped
  std::optional<double> d_loss;
  std::optional<double> g_loss;
  double grad_norm = 0.0;       // before clipping, of the stepped network(s)
  double clipped_norm = 0.0;    // after clipping
};

struct CheckpointLog {
  std::filesystem::path path;
  std::uint64_t iteration = 0;
  metrics::MetricsReport train;
  metrics::MetricsReport test;
};

template <typename T>
struct TrainResult {
  GanModel<T> model;
  std::vector<CheckpointLog> checkpoints;
  std::vector<LossRow> losses;
  std::uint64_t d_updates = 0;
  std::uint64_t g_updates = 0;
};

/// Raised when a loss or activation turns non-finite.
class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(std::uint64_t iteration, std::filesystem::path last_checkpoint, const std::string& cause);
  std::uint64_t iteration() const noexcept { return iteration_; }
  const std::filesystem::path& last_checkpoint() const noexcept { return last_checkpoint_; }

 private:
  std::uint64_t iteration_;
  std::filesystem::path last_checkpoint_;
};

/// Pixel mapping and layout expected by a model configuration.
PixelRange pixel_range(const ModelConfig& config);
bool flat_images(const ModelConfig& config);

/// Called after every completed iteration with its loss row and the updated model.
template <typename T>
using TrainObserver = std::function<void(const LossRow&, const GanModel<T>&)>;

/// Runs the alternating GAN schedule. With an output directory it writes
/// metrics.tsv, losses.tsv, run.log and checkpoints/.
template <typename T>
TrainResult<T> train(const TrainConfig& config, const TrainData& data, const TrainObserver<T>& observer = {});

/// Discriminator logits for every image of `set` in inference mode, as [N, width].
template <typename T>
Tensor<double> discriminator_logits(GanModel<T>& model, const ImageSet& set, std::size_t chunk = 256);

/// Generator output for `noise` in inference mode.
template <typename T>
Tensor<T> generate(GanModel<T>& model, const Tensor<T>& noise);

}  // namespace catgan
