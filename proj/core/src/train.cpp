#include "catgan/train.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "catgan/checkpoint.hpp"
#include "catgan/optim.hpp"
#include "catgan/parameters.hpp"

namespace catgan {

UpdateTarget update_target(std::uint64_t iteration, std::size_t update_rate) {
  return iteration % (update_rate + 1) == 0 ? UpdateTarget::discriminator : UpdateTarget::generator;
}

TrainingAborted::TrainingAborted(std::uint64_t iteration, std::filesystem::path last_checkpoint,
                                 const std::string& cause)
    : std::runtime_error("training aborted at iteration " + std::to_string(iteration) + ": " + cause +
                         (last_checkpoint.empty() ? std::string("; no checkpoint written yet")
                                                  : "; last good checkpoint " + last_checkpoint.string())),
      iteration_(iteration),
      last_checkpoint_(std::move(last_checkpoint)) {}

TrainConfig TrainConfig::categorical(HeadVariant head) {
  TrainConfig c;
  c.model.head = head;
  return c;
}

TrainConfig TrainConfig::vanilla() {
  TrainConfig c;
  c.model.head = HeadVariant::vanilla();
  c.model.image_size = 28;
  c.model.channels = 1;
  c.learning_rate = 1e-3;
  c.batch_size = 128;
  c.clip_norm = 0.0;
  return c;
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("train config: " + m); };
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning rate must be positive");
  if (batch_size == 0) fail("batch size must be positive");
  if (iterations == 0) fail("iterations must be positive");
  if (checkpoint_every == 0) fail("checkpoint interval must be positive");
  if (eval_every == 0) fail("evaluation interval must be positive");
  if (clip_norm < 0.0 || !std::isfinite(clip_norm)) fail("clip norm must be finite and non-negative");
  if (!(model.alpha > 0.0 && model.alpha <= 1.0)) fail("alpha must lie in (0, 1]");
}

std::string TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["head"] = model.head.tag();
  j["image_size"] = model.image_size;
  j["channels"] = model.channels;
  j["noise_dim"] = model.noise_dim;
  j["alpha"] = model.alpha;
  j["flatten_features"] = model.flatten_features;
  j["lr"] = learning_rate;
  j["update_rate"] = update_rate;
  j["batch_size"] = batch_size;
  j["iterations"] = iterations;
  j["checkpoint_every"] = checkpoint_every;
  j["eval_every"] = eval_every;
  j["seed"] = seed;
  j["clip_norm"] = clip_norm;
  j["adam_bias_correction"] = adam_bias_correction;
  j["non_saturating"] = non_saturating;
  return j.dump();
}

PixelRange pixel_range(const ModelConfig& config) {
  return config.head.kind == HeadKind::vanilla ? PixelRange::unit : PixelRange::signed_;
}

bool flat_images(const ModelConfig& config) { return config.head.kind == HeadKind::vanilla; }

namespace {

// Independent streams so evaluation never perturbs the training sequence.
constexpr std::uint64_t kTrainStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kTestStream = 0xbf58476d1ce4e5b9ULL;

template <typename T>
Tensor<double> to_double(const Tensor<T>& t) {
  return Tensor<double>(t.shape(), std::vector<double>(t.values().begin(), t.values().end()));
}

void require_labels(const HeadVariant& head, const ImageSet& set, const char* which) {
  const auto& l = set.labels;
  const std::size_t n = set.size();
  auto need = [&](bool ok, const char* field) {
    if (!ok) {
      throw std::invalid_argument(std::string(which) + " set lacks " + field + " labels required by head " +
                                  head.tag());
    }
  };
  if (head.kind == HeadKind::softmax) need(l.classes.size() == n, "class");
  if (head.has_au()) need(l.au.size() == n, "action-unit");
  if (head.has_va()) need(l.valence.size() == n && l.arousal.size() == n, "valence/arousal");
}

void require_geometry(const ModelConfig& m, const ImageSet& set, const char* which) {
  if (set.height != m.image_size || set.width != m.image_size || set.channels != m.channels) {
    throw std::invalid_argument(std::string(which) + " images are " + std::to_string(set.height) + "x" +
                                std::to_string(set.width) + "x" + std::to_string(set.channels) +
                                ", model expects " + std::to_string(m.image_size) + "x" +
                                std::to_string(m.image_size) + "x" + std::to_string(m.channels));
  }
}

std::string format_optional(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", *v);
  return buf;
}

const char* target_name(const std::optional<UpdateTarget>& t) {
  if (!t) return "both";
  return *t == UpdateTarget::discriminator ? "D" : "G";
}

/// Output files of a run; every stream is a no-op without an output directory.
class RunFiles {
 public:
  RunFiles(const TrainConfig& config) : verbose_(config.verbose) {
    if (config.out_dir.empty()) return;
    dir_ = config.out_dir;
    std::filesystem::create_directories(dir_ / "checkpoints");
    std::filesystem::create_directories(dir_ / "samples");
    open(log_, "run.log");
    open(metrics_, "metrics.tsv");
    open(losses_, "losses.tsv");
    log_ << (config.config_echo.empty() ? "config " + config.to_json() : config.config_echo) << '\n';
    metrics_ << metrics::tsv_header() << '\n';
    losses_ << "iteration\ttarget\td_loss\tg_loss\tgrad_norm\n";
  }

  bool enabled() const { return !dir_.empty(); }
  std::filesystem::path checkpoint_path(std::uint64_t iteration) const {
    return dir_ / "checkpoints" / checkpoint_filename(iteration);
  }

  void metrics(const metrics::MetricsReport& report, std::string_view side) {
    if (enabled()) metrics_ << metrics::tsv_row(report, side) << '\n';
  }

  void loss(const LossRow& row) {
    if (!enabled()) return;
    losses_ << row.iteration << '\t' << target_name(row.target) << '\t' << format_optional(row.d_loss) << '\t'
            << format_optional(row.g_loss) << '\t' << format_optional(row.grad_norm) << '\n';
  }

  void log(const std::string& line) {
    if (enabled()) log_ << line << '\n';
    if (verbose_) std::clog << line << '\n';
  }

  void flush() {
    if (!enabled()) return;
    log_.flush();
    metrics_.flush();
    losses_.flush();
  }

 private:
  void open(std::ofstream& f, const char* name) {
    f.open(dir_ / name, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot create " + (dir_ / name).string());
  }

  bool verbose_;
  std::filesystem::path dir_;
  std::ofstream log_, metrics_, losses_;
};

template <typename T>
class Trainer {
 public:
  Trainer(const TrainConfig& config, const TrainData& data, const TrainObserver<T>& observer)
      : config_(config),
        observer_(observer),
        data_(data),
        rng_(config.seed),
        model_(build_model<T>(config.model, rng_)),
        train_sampler_(data.train.size(), config.seed ^ kTrainStream),
        eval_train_sampler_(data.train.size(), config.seed ^ kTrainStream ^ kTestStream),
        test_sampler_(data.test.size(), config.seed ^ kTestStream),
        range_(pixel_range(config.model)),
        flat_(flat_images(config.model)),
        vanilla_(config.model.head.kind == HeadKind::vanilla),
        files_(config) {
    if (vanilla_) {
      d_opt_ = optim::make_state<T>(optim::OptimizerKind::adam);
      g_opt_ = d_opt_;
      d_opt_.hyper.eta = g_opt_.hyper.eta = config.learning_rate;
    } else {
      g_opt_ = optim::make_state<T>(optim::OptimizerKind::adam, optim::gan_adam(config.learning_rate));
      d_opt_ = optim::make_state<T>(optim::OptimizerKind::adam, optim::gan_adam(config.learning_rate / 2.0));
    }
    d_opt_.hyper.bias_correction = g_opt_.hyper.bias_correction = config.adam_bias_correction;
  }

  TrainResult<T> run() {
    files_.log("start: " + std::to_string(model_.generator.parameter_count()) + " generator and " +
               std::to_string(model_.discriminator.parameter_count()) + " discriminator parameters, " +
               std::to_string(data_.train.size()) + " train / " + std::to_string(data_.test.size()) +
               " test images");
    for (std::uint64_t it = 0; it < config_.iterations; ++it) {
      LossRow row;
      const std::uint64_t done = it + 1;
      try {
        row = vanilla_ ? vanilla_step(it) : categorical_step(it);
        files_.loss(row);
        if (observer_) observer_(row, model_);
        result_.losses.push_back(row);
        // Evaluation forwards the freshly updated weights, so it can be the first to see a blow-up.
        if (done % config_.eval_every == 0 || done == config_.iterations) evaluate(done);
      } catch (const NumericError& e) {
        files_.flush();
        throw TrainingAborted(it, last_checkpoint_, e.what());
      }
      if (done % config_.checkpoint_every == 0 || done == config_.iterations) save(done);
      if (done % 100 == 0 || done == config_.iterations) {
        files_.log("iteration " + std::to_string(done) + " d_loss " + format_optional(row.d_loss) + " g_loss " +
                   format_optional(row.g_loss));
      }
    }
    files_.flush();
    result_.model = std::move(model_);
    return std::move(result_);
  }

 private:
  Batch<T> real_batch(BatchSampler& sampler, const ImageSet& set) {
    const auto idx = sampler.next(config_.batch_size);
    return gather<T>(set, idx, range_, flat_);
  }

  static double finite_value(const Graph<T>& g, Var v, const char* what) {
    const double x = static_cast<double>(g.value(v).item());
    if (!std::isfinite(x)) throw NumericError(std::string(what) + " is not finite");
    return x;
  }

  double clip(std::span<Parameter<T>> params, LossRow& row) {
    const double norm = global_grad_norm<T>(params);
    if (!std::isfinite(norm)) throw NumericError("gradient norm is not finite");
    if (config_.clip_norm > 0.0) clip_gradients<T>(params, config_.clip_norm);
    row.clipped_norm = global_grad_norm<T>(params);
    return norm;
  }

  LossRow categorical_step(std::uint64_t it) {
    const auto& head = config_.model.head;
    LossRow row;
    row.iteration = it + 1;
    row.target = update_target(it, config_.update_rate);
    const bool d_turn = *row.target == UpdateTarget::discriminator;

    const auto real = real_batch(train_sampler_, data_.train);
    Graph<T> g;
    const Var z = g.constant(sample_noise<T>(config_.batch_size, config_.model.noise_dim, rng_));
    const Var fake = model_.generator.forward(g, z, {Mode::train, !d_turn, true}, rng_);
    const Var fake_logits = model_.discriminator.forward(g, fake, {Mode::train, d_turn, false}, rng_);
    const Var real_images = g.constant(real.images);

    const auto gl = generator_loss(g, head, fake_logits, real_images, fake, it,
                                   GeneratorLossOptions{config_.non_saturating});
    row.g_loss = finite_value(g, gl.total, "generator loss");

    if (d_turn) {
      // Running statistics move only on real batches.
      const Var real_logits = model_.discriminator.forward(g, real_images, {Mode::train, true, true}, rng_);
      const auto dl = discriminator_loss(g, head, config_.model.alpha, real_logits, fake_logits, real.labels);
      row.d_loss = finite_value(g, dl.total, "discriminator loss");
      auto params = std::span<Parameter<T>>(model_.discriminator.parameters());
      zero_grad(params);
      g.backward(dl.total);
      row.grad_norm = clip(params, row);
      optim::step(d_opt_, params);
      ++result_.d_updates;
    } else {
      auto params = std::span<Parameter<T>>(model_.generator.parameters());
      zero_grad(params);
      g.backward(gl.total);
      row.grad_norm = clip(params, row);
      optim::step(g_opt_, params);
      ++result_.g_updates;
    }
    return row;
  }

  LossRow vanilla_step(std::uint64_t it) {
    LossRow row;
    row.iteration = it + 1;
    const auto real = real_batch(train_sampler_, data_.train);
    Graph<T> g;
    const Var z = g.constant(sample_noise<T>(config_.batch_size, config_.model.noise_dim, rng_));
    const Var fake = model_.generator.forward(g, z, {Mode::train, true, true}, rng_);
    const Var fake_logits = model_.discriminator.forward(g, fake, {Mode::train, true, false}, rng_);
    const Var real_logits = model_.discriminator.forward(g, g.constant(real.images), {Mode::train, true, true}, rng_);
    const auto dl = vanilla_discriminator_loss(g, real_logits, fake_logits);
    const auto gl = vanilla_generator_loss(g, fake_logits);
    row.d_loss = finite_value(g, dl.total, "discriminator loss");
    row.g_loss = finite_value(g, gl.total, "generator loss");

    // Both gradients come from the same forward pass; D's are set aside while
    // the generator objective is swept.
    auto d_params = std::span<Parameter<T>>(model_.discriminator.parameters());
    auto g_params = std::span<Parameter<T>>(model_.generator.parameters());
    zero_grad(d_params);
    zero_grad(g_params);
    g.backward(dl.total);
    std::vector<Tensor<T>> d_grads;
    d_grads.reserve(d_params.size());
    for (auto& p : d_params) d_grads.push_back(std::move(p.grad));
    zero_grad(d_params);
    zero_grad(g_params);
    g.backward(gl.total);
    for (std::size_t i = 0; i < d_params.size(); ++i) d_params[i].grad = std::move(d_grads[i]);

    LossRow d_row, g_row;
    const double dn = clip(d_params, d_row);
    const double gn = clip(g_params, g_row);
    row.grad_norm = std::hypot(dn, gn);
    row.clipped_norm = std::hypot(d_row.clipped_norm, g_row.clipped_norm);
    optim::step(d_opt_, d_params);
    optim::step(g_opt_, g_params);
    ++result_.d_updates;
    ++result_.g_updates;
    return row;
  }

  metrics::MetricsReport score(const Batch<T>& batch, std::uint64_t done) {
    Graph<T> g;
    const Var logits =
        model_.discriminator.forward(g, g.constant(batch.images), {Mode::inference, false, false}, rng_);
    auto report = head_metrics(config_.model.head, to_double(g.value(logits)), batch.labels);
    report.iteration = done;
    return report;
  }

  void evaluate(std::uint64_t done) {
    last_train_ = score(real_batch(eval_train_sampler_, data_.train), done);
    last_test_ = score(real_batch(test_sampler_, data_.test), done);
    files_.metrics(last_train_, "train");
    files_.metrics(last_test_, "test");
  }

  void save(std::uint64_t done) {
    CheckpointLog log{{}, done, last_train_, last_test_};
    if (files_.enabled()) {
      log.path = files_.checkpoint_path(done);
      write_checkpoint(log.path, snapshot(model_, done, rng_));
      last_checkpoint_ = log.path;
      files_.flush();
    }
    result_.checkpoints.push_back(std::move(log));
  }

  const TrainConfig& config_;
  const TrainObserver<T>& observer_;
  const TrainData& data_;
  Rng rng_;
  GanModel<T> model_;
  BatchSampler train_sampler_;
  BatchSampler eval_train_sampler_;
  BatchSampler test_sampler_;
  PixelRange range_;
  bool flat_;
  bool vanilla_;
  RunFiles files_;
  optim::OptimizerState<T> d_opt_, g_opt_;
  metrics::MetricsReport last_train_, last_test_;
  std::filesystem::path last_checkpoint_;
  TrainResult<T> result_;
};

}  // namespace

template <typename T>
TrainResult<T> train(const TrainConfig& config, const TrainData& data, const TrainObserver<T>& observer) {
  config.validate();
  data.train.validate();
  data.test.validate();
  for (const auto& [set, which] : {std::pair{&data.train, "training"}, std::pair{&data.test, "test"}}) {
    require_geometry(config.model, *set, which);
    require_labels(config.model.head, *set, which);
    if (set->size() < config.batch_size) {
      throw std::invalid_argument(std::string(which) + " set has " + std::to_string(set->size()) +
                                  " images, fewer than one batch of " + std::to_string(config.batch_size));
    }
  }
  Trainer<T> trainer(config, data, observer);
  return trainer.run();
}

template <typename T>
Tensor<double> discriminator_logits(GanModel<T>& model, const ImageSet& set, std::size_t chunk) {
  require_geometry(model.config, set, "evaluation");
  if (chunk == 0) throw std::invalid_argument("discriminator_logits: chunk must be positive");
  const std::size_t n = set.size();
  const std::size_t width = model.config.head.output_width();
  std::vector<double> out;
  out.reserve(n * width);
  Rng unused(0);
  std::vector<std::size_t> idx;
  for (std::size_t first = 0; first < n; first += chunk) {
    idx.clear();
    for (std::size_t i = first; i < std::min(n, first + chunk); ++i) idx.push_back(i);
    const auto batch = gather<T>(set, idx, pixel_range(model.config), flat_images(model.config));
    Graph<T> g;
    const Var logits =
        model.discriminator.forward(g, g.constant(batch.images), {Mode::inference, false, false}, unused);
    const auto& v = g.value(logits).values();
    out.insert(out.end(), v.begin(), v.end());
  }
  return Tensor<double>({n, width}, std::move(out));
}

template <typename T>
Tensor<T> generate(GanModel<T>& model, const Tensor<T>& noise) {
  Graph<T> g;
  Rng unused(0);
  const Var out = model.generator.forward(g, g.constant(noise), {Mode::inference, false, false}, unused);
  return g.value(out);
}

#define CATGAN_INSTANTIATE_TRAIN(T)                                                            \
  template TrainResult<T> train<T>(const TrainConfig&, const TrainData&, const TrainObserver<T>&); \
  template Tensor<double> discriminator_logits<T>(GanModel<T>&, const ImageSet&, std::size_t); \
  template Tensor<T> generate<T>(GanModel<T>&, const Tensor<T>&);

CATGAN_INSTANTIATE_TRAIN(float)
CATGAN_INSTANTIATE_TRAIN(double)

}  // namespace catgan
