#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "catgan/checkpoint.hpp"
#include "catgan/data.hpp"
#include "catgan/dataset/build.hpp"
#include "catgan/dataset/container.hpp"
#include "catgan/dataset/split.hpp"
#include "catgan/dataset/stats.hpp"
#include "catgan/evaluate.hpp"
#include "catgan/image.hpp"
#include "catgan/train.hpp"

namespace catgan::cli {

namespace {

namespace fs = std::filesystem;

/// Raised for invalid combinations that CLI11 cannot express; maps to exit 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Precision { f32, f64 };

Precision precision_from_env() {
  const char* raw = std::getenv("CATGAN_PRECISION");
  if (raw == nullptr || std::string(raw).empty() || std::string(raw) == "f64") return Precision::f64;
  if (std::string(raw) == "f32") return Precision::f32;
  throw UsageError(std::string("CATGAN_PRECISION must be f32 or f64, got '") + raw + "'");
}

// Shortest %g rendering that parses back to the same double.
std::string number(double v) {
  char buf[40];
  for (int digits = 6; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// ---------------------------------------------------------------- data sources

struct DataSource {
  std::string packed;       // train container
  std::string packed_test;  // test container
  std::string mnist;        // directory with IDX files
  std::size_t mnist_holdout = 2000;
};

void add_data_options(CLI::App& cmd, DataSource& src, bool with_test) {
  cmd.add_option("--data", src.packed, with_test ? "Packed training set (.afds)" : "Packed evaluation set (.afds)")
      ->check(CLI::ExistingFile);
  if (with_test) cmd.add_option("--test-data", src.packed_test, "Packed test set (.afds)")->check(CLI::ExistingFile);
  cmd.add_option("--mnist", src.mnist,
                 "Directory of MNIST IDX files: train-*/t10k-* pairs, or a single digits-* pair split by --mnist-holdout")
      ->check(CLI::ExistingDirectory);
  cmd.add_option("--mnist-holdout", src.mnist_holdout, "Trailing digits-* images used as the test split")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

std::optional<fs::path> find_idx(const fs::path& dir, const std::string& stem) {
  for (const char* suffix : {".gz", ""}) {
    const fs::path p = dir / (stem + suffix);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

TrainData load_mnist_dir(const fs::path& dir, std::size_t channels, std::size_t holdout) {
  const auto tr_i = find_idx(dir, "train-images-idx3-ubyte"), tr_l = find_idx(dir, "train-labels-idx1-ubyte");
  const auto te_i = find_idx(dir, "t10k-images-idx3-ubyte"), te_l = find_idx(dir, "t10k-labels-idx1-ubyte");
  if (tr_i && tr_l && te_i && te_l) return {load_mnist(*tr_i, *tr_l, channels), load_mnist(*te_i, *te_l, channels)};
  const auto d_i = find_idx(dir, "digits-images-idx3-ubyte"), d_l = find_idx(dir, "digits-labels-idx1-ubyte");
  if (!d_i || !d_l) throw std::runtime_error(dir.string() + " holds neither train/t10k nor digits IDX files");
  const ImageSet all = load_mnist(*d_i, *d_l, channels);
  if (holdout >= all.size()) {
    throw std::runtime_error("holdout of " + std::to_string(holdout) + " leaves no training images out of " +
                             std::to_string(all.size()));
  }
  return {slice(all, 0, all.size() - holdout), slice(all, all.size() - holdout, holdout)};
}

ImageSet load_packed(const fs::path& path) { return dataset::to_image_set(dataset::read_dataset(path)); }

// ------------------------------------------------------------------------ train

struct TrainArgs {
  std::string head = "softmax";
  bool ponderated = false;
  double lr = 1e-4;
  std::size_t update_rate = 5;
  double alpha = 0.9;
  std::size_t batch_size = 64;
  std::uint64_t iterations = 20000;
  std::uint64_t checkpoint_every = 1000;
  std::uint64_t eval_every = 1;
  std::uint64_t seed = 0;
  std::string out;
  bool non_saturating = false;
  bool flatten_features = false;
  bool verbose = false;
  DataSource data;
  CLI::Option* lr_opt = nullptr;
  CLI::Option* batch_opt = nullptr;
};

std::string train_echo(const TrainArgs& a, const TrainConfig& c) {
  std::string s = "catgan train --head " + a.head;
  if (a.ponderated) s += " --ponderated";
  s += " --lr " + number(c.learning_rate) + " --update-rate " + std::to_string(c.update_rate) + " --alpha " +
       number(c.model.alpha) + " --batch-size " + std::to_string(c.batch_size) + " --iterations " +
       std::to_string(c.iterations) + " --checkpoint-every " + std::to_string(c.checkpoint_every) + " --eval-every " +
       std::to_string(c.eval_every) + " --seed " + std::to_string(c.seed);
  if (!a.data.packed.empty()) s += " --data " + a.data.packed + " --test-data " + a.data.packed_test;
  if (!a.data.mnist.empty()) s += " --mnist " + a.data.mnist + " --mnist-holdout " + std::to_string(a.data.mnist_holdout);
  if (c.non_saturating) s += " --non-saturating";
  if (c.model.flatten_features) s += " --flatten-features";
  s += " --out " + a.out;
  const char* precision = std::getenv("CATGAN_PRECISION");
  s += std::string(" # CATGAN_PRECISION=") + (precision && *precision ? precision : "f64");
  return s;
}

TrainConfig resolve_train(const TrainArgs& a) {
  auto head = HeadVariant::from_tag(a.head);
  if (a.ponderated) {
    if (head.kind != HeadKind::joint) throw UsageError("--ponderated applies to joint heads only");
    head.weighting = JointWeighting::ponderated;
  }
  const bool mnist_head = head.kind == HeadKind::vanilla || head.kind == HeadKind::softmax;
  if (mnist_head && a.data.mnist.empty()) throw UsageError("head " + a.head + " needs class labels: pass --mnist <dir>");
  if (!mnist_head && a.data.packed.empty()) throw UsageError("head " + a.head + " needs --data and --test-data");
  if (!a.data.packed.empty() && a.data.packed_test.empty()) throw UsageError("--data requires --test-data");
  if (!a.data.packed.empty() && !a.data.mnist.empty()) throw UsageError("pass either --data or --mnist, not both");

  TrainConfig c = head.kind == HeadKind::vanilla ? TrainConfig::vanilla() : TrainConfig::categorical(head);
  if (head.kind != HeadKind::vanilla || a.lr_opt->count() > 0) c.learning_rate = a.lr;
  if (head.kind != HeadKind::vanilla || a.batch_opt->count() > 0) c.batch_size = a.batch_size;
  c.update_rate = a.update_rate;
  c.model.alpha = a.alpha;
  c.iterations = a.iterations;
  c.checkpoint_every = a.checkpoint_every;
  c.eval_every = a.eval_every;
  c.seed = a.seed;
  c.non_saturating = a.non_saturating;
  c.model.flatten_features = a.flatten_features;
  c.out_dir = a.out;
  c.verbose = a.verbose;
  c.validate();
  return c;
}

template <typename T>
void write_sample_grid(GanModel<T>& model, std::size_t count, std::uint64_t seed, const fs::path& path) {
  Rng rng(seed);
  const auto noise = sample_noise<T>(count, model.config.noise_dim, rng);
  const auto samples = generate(model, noise);
  const bool vanilla = model.config.head.kind == HeadKind::vanilla;
  const double lo = vanilla ? 0.0 : -1.0;
  const auto images =
      tensor_to_images(samples, model.config.image_size, model.config.image_size, model.config.channels, lo, 1.0);
  write_png(path, tile(images, 4));
}

template <typename T>
int run_train(const TrainArgs& a, TrainConfig config, std::ostream& out, std::ostream& err) {
  TrainData data;
  if (!a.data.mnist.empty()) {
    data = load_mnist_dir(a.data.mnist, config.model.channels, a.data.mnist_holdout);
  } else {
    data = {load_packed(a.data.packed), load_packed(a.data.packed_test)};
    config.model.image_size = data.train.height;
    config.model.channels = data.train.channels;
    if (data.train.height != data.train.width) throw std::runtime_error("packed images must be square");
  }
  config.config_echo = train_echo(a, config);
  out << config.config_echo << '\n';
  try {
    auto result = train<T>(config, data);
    write_sample_grid(result.model, 16, config.seed, config.out_dir / "samples" / "final.png");
    out << "trained " << config.iterations << " iterations (" << result.d_updates << " discriminator and "
        << result.g_updates << " generator updates); " << result.checkpoints.size() << " checkpoints in "
        << (config.out_dir / "checkpoints").string() << '\n';
  } catch (const TrainingAborted& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

// --------------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string checkpoints;
  std::string csv;
  DataSource data;
};

template <typename T>
int run_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.data.packed.empty() == a.data.mnist.empty()) throw UsageError("pass exactly one of --data or --mnist");
  fs::path first;
  if (fs::is_directory(a.checkpoints)) {
    for (const auto& e : fs::directory_iterator(a.checkpoints)) {
      if (e.path().extension() == ".cgan" && (first.empty() || e.path() < first)) first = e.path();
    }
  }
  if (first.empty()) {
    err << "error: no checkpoints in " << a.checkpoints << '\n';
    return kExitFailure;
  }
  ImageSet test;
  if (!a.data.packed.empty()) {
    test = load_packed(a.data.packed);
  } else {
    // The model decides the channel count; probe it from the first checkpoint.
    std::size_t channels = 3;
    try {
      channels = read_checkpoint(first).config.channels;
    } catch (const CheckpointError&) {
    }
    test = load_mnist_dir(a.data.mnist, channels, a.data.mnist_holdout).test;
  }
  const auto result = evaluate_checkpoints<T>(a.checkpoints, test);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';
  out << format_table(result);
  const fs::path csv = a.csv.empty() ? fs::path(a.checkpoints) / "best.csv" : fs::path(a.csv);
  write_text(csv, to_csv(result));
  out << "wrote " << csv.string() << '\n';
  return kExitOk;
}

// --------------------------------------------------------------------- generate

struct GenerateArgs {
  std::string checkpoint;
  std::size_t count = 16;
  std::uint64_t seed = 0;
  std::string out = "samples.png";
};

template <typename T>
int run_generate(const GenerateArgs& a, std::ostream& out) {
  auto model = restore<T>(read_checkpoint(a.checkpoint));
  write_sample_grid(model, a.count, a.seed, a.out);
  out << "wrote " << a.count << " samples to " << a.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------- dataset

struct SplitArgs {
  std::string manifest;
  std::string out;
  dataset::SplitOptions options;
};

void add_split_options(CLI::App& cmd, SplitArgs& a) {
  cmd.add_option("--manifest", a.manifest, "Dataset manifest (JSON)")->required()->check(CLI::ExistingFile);
  cmd.add_option("--seed", a.options.seed, "Seed of the split search")->capture_default_str();
  cmd.add_option("--target-fraction", a.options.target_fraction, "Training share of frames to reach")
      ->capture_default_str()
      ->check(CLI::Range(0.78, 0.86));
  cmd.add_option("--trials", a.options.trials, "Random identity-closed fills to compare")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void write_stats(const fs::path& dir, const dataset::StatsReport& stats) {
  write_text(dir / "au_stats.csv", dataset::au_csv(stats));
  const auto& total = stats.splits.back();
  write_text(dir / "valence_hist.csv", dataset::histogram_csv(total.valence));
  write_text(dir / "arousal_hist.csv", dataset::histogram_csv(total.arousal));
  write_text(dir / "au_va_points.csv", dataset::scatter_csv(total));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-supervised categorical GAN toolkit", "catgan"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a GAN; writes metrics.tsv, losses.tsv, run.log, checkpoints/ and samples/ under --out");
  train_cmd->add_option("--head", ta.head, "softmax[K] | au | va-mse | va-ccc | joint-mse | joint-ccc | vanilla")
      ->capture_default_str();
  train_cmd->add_flag("--ponderated", ta.ponderated, "Joint heads: weight VA/AU/real-fake 0.27/0.40/0.33");
  ta.lr_opt = train_cmd->add_option("--lr", ta.lr, "Generator learning rate; the discriminator uses half (vanilla: 1e-3 for both)")
                  ->capture_default_str()
                  ->check(CLI::PositiveNumber);
  train_cmd->add_option("--update-rate", ta.update_rate, "Generator steps per discriminator step")->capture_default_str();
  train_cmd->add_option("--alpha", ta.alpha, "Label smoothing for generated samples")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  ta.batch_opt = train_cmd->add_option("--batch-size", ta.batch_size, "Mini-batch size (vanilla: 128)")
                     ->capture_default_str()
                     ->check(CLI::PositiveNumber);
  train_cmd->add_option("--iterations", ta.iterations, "Training iterations")->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--checkpoint-every", ta.checkpoint_every, "Checkpoint interval in iterations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--eval-every", ta.eval_every, "Interval of train/test batch metrics")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", ta.seed, "Seed for initialization, noise, dropout and batches")->capture_default_str();
  train_cmd->add_option("--out", ta.out, "Run directory")->required();
  train_cmd->add_flag("--non-saturating", ta.non_saturating, "Generator adversarial term -mean log(1 - p_fake)");
  train_cmd->add_flag("--flatten-features", ta.flatten_features, "Fully connected layer over all final conv features");
  train_cmd->add_flag("--verbose", ta.verbose, "Mirror progress to stderr");
  add_data_options(*train_cmd, ta.data, true);

  EvaluateArgs ea;
  auto* eval_cmd = app.add_subcommand("evaluate", "Best score per metric over every checkpoint, on the full test set");
  eval_cmd->add_option("--checkpoints", ea.checkpoints, "Checkpoint directory")->required();
  eval_cmd->add_option("--csv", ea.csv, "CSV output (default <checkpoints>/best.csv)");
  add_data_options(*eval_cmd, ea.data, false);

  GenerateArgs ga;
  auto* gen_cmd = app.add_subcommand("generate", "Write a 4-wide PNG grid of generator samples");
  gen_cmd->add_option("--checkpoint", ga.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--count", ga.count, "Number of samples")->capture_default_str()->check(CLI::Range(1, 1024));
  gen_cmd->add_option("--seed", ga.seed, "Noise seed")->capture_default_str();
  gen_cmd->add_option("--out", ga.out, "PNG path")->capture_default_str();

  SplitArgs build_args;
  std::size_t build_bins = 40;
  auto* build_cmd = app.add_subcommand("dataset-build", "Crop faces, label, split and pack a manifest into train.afds/test.afds");
  add_split_options(*build_cmd, build_args);
  build_cmd->add_option("--out", build_args.out, "Output directory")->required();
  build_cmd->add_option("--bins", build_bins, "Valence/arousal histogram bins")->capture_default_str()->check(CLI::PositiveNumber);

  std::vector<std::string> stats_inputs;
  std::string stats_out;
  std::size_t stats_bins = 40;
  auto* stats_cmd = app.add_subcommand("dataset-stats", "AU distribution and VA histograms of packed sets");
  stats_cmd->add_option("--data", stats_inputs, "Packed sets; each is reported under its file stem")
      ->required()
      ->check(CLI::ExistingFile);
  stats_cmd->add_option("--out", stats_out, "Output directory")->required();
  stats_cmd->add_option("--bins", stats_bins, "Valence/arousal histogram bins")->capture_default_str()->check(CLI::PositiveNumber);

  SplitArgs split_args;
  auto* split_cmd = app.add_subcommand("split", "Identity-closed train/test split of a manifest's videos");
  add_split_options(*split_cmd, split_args);
  split_cmd->add_option("--out", split_args.out, "JSON output (default: standard output)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Precision precision = precision_from_env();
    if (*train_cmd) {
      TrainConfig config;
      try {
        config = resolve_train(ta);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      return precision == Precision::f32 ? run_train<float>(ta, config, out, err) : run_train<double>(ta, config, out, err);
    }
    if (*eval_cmd) {
      return precision == Precision::f32 ? run_evaluate<float>(ea, out, err) : run_evaluate<double>(ea, out, err);
    }
    if (*gen_cmd) return precision == Precision::f32 ? run_generate<float>(ga, out) : run_generate<double>(ga, out);
    if (*build_cmd) {
      const auto manifest = dataset::read_manifest(build_args.manifest);
      const auto built = dataset::build_dataset(manifest, build_args.options, build_bins);
      for (const auto& w : built.warnings) err << "warning: " << w << '\n';
      const fs::path dir = build_args.out;
      fs::create_directories(dir);
      dataset::pack_dataset(built.train, dir / "train.afds");
      dataset::pack_dataset(built.test, dir / "test.afds");
      write_text(dir / "split.json", dataset::split_json(built.split) + "\n");
      write_stats(dir, built.stats);
      out << "packed " << built.train.labels.size() << " training and " << built.test.labels.size()
          << " test images into " << dir.string() << '\n';
      return kExitOk;
    }
    if (*stats_cmd) {
      std::vector<dataset::NamedRecords> splits;
      for (const auto& path : stats_inputs) {
        splits.push_back({fs::path(path).stem().string(), dataset::records_of(dataset::read_dataset(path))});
      }
      const auto stats = dataset::compute_stats(splits, stats_bins);
      fs::create_directories(stats_out);
      write_stats(stats_out, stats);
      out << dataset::au_csv(stats);
      return kExitOk;
    }
    if (*split_cmd) {
      const auto result = dataset::split_dataset(dataset::video_meta(dataset::read_manifest(split_args.manifest)),
                                                 split_args.options);
      const std::string text = dataset::split_json(result) + "\n";
      if (split_args.out.empty()) {
        out << text;
      } else {
        write_text(split_args.out, text);
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace catgan::cli
