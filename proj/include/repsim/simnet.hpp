#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "repsim/data_matrix.hpp"

namespace repsim::simnet {

enum class Nonlinearity { relu };

/// Widths of every activation layer: input, hidden..., output. A net with
/// widths {16, 32, 32, 3} has three weight layers.
struct NetSpec {
    std::vector<std::size_t> layer_widths;
    Nonlinearity nonlinearity = Nonlinearity::relu;

    std::size_t n_layers() const noexcept {
        return layer_widths.empty() ? 0 : layer_widths.size() - 1;
    }
    std::size_t input_dim() const noexcept { return layer_widths.front(); }
    std::size_t output_dim() const noexcept { return layer_widths.back(); }
    /// Throws ConfigError unless there are at least 3 weight layers and all
    /// widths are positive.
    void validate() const;
};

/// One dense layer: out = in * weights + bias, weights fan_in x fan_out row-major.
struct DenseLayer {
    std::size_t fan_in = 0;
    std::size_t fan_out = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct Params {
    std::vector<DenseLayer> layers;
    std::uint64_t seed = 0;

    friend bool operator==(const Params&, const Params&) = default;
};

/// Depth-ordered names of the measured layers: l1 ... lL.
std::string layer_name(std::size_t index);

// Training recipes.
struct Standard {};
struct Untrained {};
/// Layer i (1-based) freezes at the start of epoch floor(i * epochs / L);
/// the final layer never freezes.
struct Freeze {};
/// Layers 1..n keep their initialization; only deeper layers train.
struct RandomAbove {
    std::size_t n = 1;
};
/// Starts from `source` and applies the Freeze schedule.
struct TransferFreeze {
    Params source;
};
using Recipe = std::variant<Standard, Untrained, Freeze, RandomAbove, TransferFreeze>;

std::string recipe_name(const Recipe& r);

struct Batch {
    DataMatrix inputs;
    std::vector<std::size_t> labels;
};

/// Synthetic classification source: every class is a mixture of Gaussian
/// modes around seeded centers. Sampling is a pure function of the seed.
class GaussianTask {
public:
    struct Options {
        std::size_t input_dim = 16;
        std::size_t n_classes = 3;
        std::size_t modes_per_class = 1;
        double separation = 4.0;  ///< std of the mode centers
        double noise = 1.0;       ///< within-mode std
    };

    GaussianTask(const Options& options, std::uint64_t seed);

    /// A task sharing shape and noise with this one whose centers are
    /// mix * these + sqrt(1 - mix^2) * fresh seeded centers.
    GaussianTask related(double mix, std::uint64_t seed) const;

    /// Labels cycle through the classes before shuffling, so class counts
    /// differ by at most one.
    Batch sample(std::size_t count, std::uint64_t seed) const;

    std::size_t input_dim() const noexcept { return options_.input_dim; }
    std::size_t n_classes() const noexcept { return options_.n_classes; }
    const Options& options() const noexcept { return options_; }

private:
    GaussianTask(const Options& options, std::vector<double> centers);

    Options options_;
    std::vector<double> centers_;  ///< (class * modes + mode) x input_dim
};

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    double learning_rate = 0.05;
    std::uint64_t seed = 1;
    std::size_t train_samples = 2000;
};

/// He-normal weights (std sqrt(2 / fan_in)), zero biases.
Params init_params(const NetSpec& spec, std::uint64_t seed);

/// Post-ReLU activations of every hidden layer followed by the output
/// logits, one row per input. Labels are layer_name(i).
std::vector<DataMatrix> forward_collect(const Params& params, const DataMatrix& inputs);

struct Gradients {
    std::vector<DenseLayer> layers;  ///< same shapes as Params::layers
    double loss = 0.0;               ///< mean cross-entropy of the batch
};

/// Exact gradients of the mean softmax cross-entropy over the batch.
Gradients gradients(const Params& params, const Batch& batch);

double mean_cross_entropy(const Params& params, const Batch& batch);

/// Called at the start of every epoch with the parameters before any update
/// of that epoch, and once more after training with epoch == config.epochs.
using EpochObserver = std::function<void(std::size_t epoch, const Params&)>;

/// Minibatch SGD on softmax cross-entropy under `recipe`. Throws ConfigError
/// for invalid recipe bounds or configuration.
Params train(const NetSpec& spec, const GaussianTask& task, const Recipe& recipe,
             const TrainConfig& config, const EpochObserver& observer = {});

/// First epoch at which layer `index` (0-based) is frozen under the Freeze
/// schedule, or `epochs` if it never freezes.
std::size_t freeze_epoch(std::size_t index, std::size_t n_layers, std::size_t epochs);

/// Top-1 accuracy on a freshly sampled evaluation set.
double evaluate_accuracy(const Params& params, const GaussianTask& task, std::size_t n_samples,
                         std::uint64_t seed);

std::vector<std::size_t> predict(const Params& params, const DataMatrix& inputs);

}  // namespace repsim::simnet
