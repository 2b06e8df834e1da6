#include "repsim/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "repsim/error.hpp"

namespace repsim::simnet {

namespace {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (std::uint64_t(out[0]) << 32) | out[1];
}

// Per-layer forward state for one batch. Row-major, rows = batch.
struct ForwardTrace {
    std::vector<std::vector<double>> pre;   ///< Z_l, l = 1..L
    std::vector<std::vector<double>> post;  ///< A_l; post[L-1] aliases the logits
};

ForwardTrace run_forward(const Params& params, std::span<const double> inputs, std::size_t rows) {
    ForwardTrace trace;
    const std::size_t n_layers = params.layers.size();
    std::span<const double> prev = inputs;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const DenseLayer& layer = params.layers[l];
        std::vector<double> z(rows * layer.fan_out);
        for (std::size_t i = 0; i < rows; ++i) {
            double* zi = z.data() + i * layer.fan_out;
            std::copy(layer.bias.begin(), layer.bias.end(), zi);
            for (std::size_t k = 0; k < layer.fan_in; ++k) {
                const double a = prev[i * layer.fan_in + k];
                if (a == 0.0) continue;
                const double* w = layer.weights.data() + k * layer.fan_out;
                for (std::size_t j = 0; j < layer.fan_out; ++j) zi[j] += a * w[j];
            }
        }
        std::vector<double> a = z;
        if (l + 1 < n_layers)
            for (double& v : a) v = std::max(v, 0.0);
        trace.pre.push_back(std::move(z));
        trace.post.push_back(std::move(a));
        prev = trace.post.back();
    }
    return trace;
}

// Row-wise softmax of the logits, numerically stabilized.
std::vector<double> softmax(const std::vector<double>& logits, std::size_t rows, std::size_t k) {
    std::vector<double> p(logits.size());
    for (std::size_t i = 0; i < rows; ++i) {
        const double* z = logits.data() + i * k;
        const double top = *std::max_element(z, z + k);
        double total = 0.0;
        for (std::size_t j = 0; j < k; ++j) total += (p[i * k + j] = std::exp(z[j] - top));
        for (std::size_t j = 0; j < k; ++j) p[i * k + j] /= total;
    }
    return p;
}

double batch_loss(const std::vector<double>& probs, const std::vector<std::size_t>& labels,
                  std::size_t k) {
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) total -= std::log(probs[i * k + labels[i]]);
    return total / static_cast<double>(labels.size());
}

void check_batch(const Params& params, const Batch& batch) {
    if (params.layers.empty()) throw InvalidInput("network has no layers");
    if (batch.inputs.n_feat() != params.layers.front().fan_in)
        throw ShapeMismatch("input width " + std::to_string(batch.inputs.n_feat()) +
                            " does not match network input " +
                            std::to_string(params.layers.front().fan_in));
    if (batch.labels.size() != batch.inputs.n_obs())
        throw ShapeMismatch("label count does not match input rows");
    for (std::size_t y : batch.labels)
        if (y >= params.layers.back().fan_out) throw InvalidInput("label out of range");
}

// Gradients for layers [first_layer, L); shallower entries stay empty.
Gradients backprop(const Params& params, const Batch& batch, std::size_t first_layer) {
    check_batch(params, batch);
    const std::size_t rows = batch.inputs.n_obs();
    const std::size_t n_layers = params.layers.size();
    const std::size_t k = params.layers.back().fan_out;
    const ForwardTrace trace = run_forward(params, batch.inputs.values(), rows);

    Gradients g;
    g.layers.resize(n_layers);
    std::vector<double> delta = softmax(trace.post.back(), rows, k);
    g.loss = batch_loss(delta, batch.labels, k);
    const double inv = 1.0 / static_cast<double>(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        delta[i * k + batch.labels[i]] -= 1.0;
        for (std::size_t j = 0; j < k; ++j) delta[i * k + j] *= inv;
    }

    for (std::size_t l = n_layers; l-- > first_layer;) {
        const DenseLayer& layer = params.layers[l];
        DenseLayer& out = g.layers[l];
        out.fan_in = layer.fan_in;
        out.fan_out = layer.fan_out;
        out.weights.assign(layer.weights.size(), 0.0);
        out.bias.assign(layer.bias.size(), 0.0);
        std::span<const double> input =
            l == 0 ? batch.inputs.values() : std::span<const double>(trace.post[l - 1]);
        for (std::size_t i = 0; i < rows; ++i) {
            const double* d = delta.data() + i * layer.fan_out;
            for (std::size_t j = 0; j < layer.fan_out; ++j) out.bias[j] += d[j];
            for (std::size_t a = 0; a < layer.fan_in; ++a) {
                const double x = input[i * layer.fan_in + a];
                if (x == 0.0) continue;
                double* w = out.weights.data() + a * layer.fan_out;
                for (std::size_t j = 0; j < layer.fan_out; ++j) w[j] += x * d[j];
            }
        }
        if (l == first_layer) break;

        const std::vector<double>& z_prev = trace.pre[l - 1];
        std::vector<double> next(rows * layer.fan_in, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            const double* d = delta.data() + i * layer.fan_out;
            for (std::size_t a = 0; a < layer.fan_in; ++a) {
                if (z_prev[i * layer.fan_in + a] <= 0.0) continue;
                const double* w = layer.weights.data() + a * layer.fan_out;
                double acc = 0.0;
                for (std::size_t j = 0; j < layer.fan_out; ++j) acc += w[j] * d[j];
                next[i * layer.fan_in + a] = acc;
            }
        }
        delta = std::move(next);
    }
    return g;
}

Batch gather(const Batch& source, std::span<const std::size_t> order) {
    const std::size_t width = source.inputs.n_feat();
    std::vector<double> x;
    x.reserve(order.size() * width);
    std::vector<std::size_t> y;
    y.reserve(order.size());
    for (std::size_t idx : order) {
        const auto row = source.inputs.row(idx);
        x.insert(x.end(), row.begin(), row.end());
        y.push_back(source.labels[idx]);
    }
    return {DataMatrix(order.size(), width, std::move(x)), std::move(y)};
}

bool same_shapes(const Params& a, const NetSpec& spec) {
    if (a.layers.size() != spec.n_layers()) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        if (a.layers[l].fan_in != spec.layer_widths[l] || a.layers[l].fan_out != spec.layer_widths[l + 1])
            return false;
    }
    return true;
}

}  // namespace

void NetSpec::validate() const {
    if (n_layers() < 3)
        throw ConfigError("a network needs at least 3 weight layers, got " + std::to_string(n_layers()));
    for (std::size_t w : layer_widths)
        if (w == 0) throw ConfigError("layer widths must be positive");
}

std::string layer_name(std::size_t index) { return "l" + std::to_string(index + 1); }

std::string recipe_name(const Recipe& r) {
    struct Visitor {
        std::string operator()(const Standard&) const { return "standard"; }
        std::string operator()(const Untrained&) const { return "untrained"; }
        std::string operator()(const Freeze&) const { return "freeze"; }
        std::string operator()(const RandomAbove&) const { return "random_above"; }
        std::string operator()(const TransferFreeze&) const { return "transfer_freeze"; }
    };
    return std::visit(Visitor{}, r);
}

GaussianTask::GaussianTask(const Options& options, std::vector<double> centers)
    : options_(options), centers_(std::move(centers)) {}

GaussianTask::GaussianTask(const Options& options, std::uint64_t seed) : options_(options) {
    if (options.input_dim == 0 || options.n_classes == 0 || options.modes_per_class == 0)
        throw ConfigError("task dimensions must be positive");
    if (!(options.noise >= 0.0) || !(options.separation >= 0.0))
        throw ConfigError("task noise and separation must be non-negative");
    std::mt19937_64 rng(derive_seed(seed, 0x7461736b));
    std::normal_distribution<double> normal(0.0, options.separation);
    centers_.resize(options.n_classes * options.modes_per_class * options.input_dim);
    for (double& c : centers_) c = normal(rng);
}

GaussianTask GaussianTask::related(double mix, std::uint64_t seed) const {
    if (!(mix >= 0.0 && mix <= 1.0)) throw ConfigError("task mixing coefficient must lie in [0, 1]");
    const GaussianTask fresh(options_, seed);
    const double keep = std::sqrt(1.0 - mix * mix);
    std::vector<double> centers(centers_.size());
    for (std::size_t i = 0; i < centers.size(); ++i)
        centers[i] = mix * centers_[i] + keep * fresh.centers_[i];
    return GaussianTask(options_, std::move(centers));
}

Batch GaussianTask::sample(std::size_t count, std::uint64_t seed) const {
    if (count == 0) throw ConfigError("sample count must be positive");
    std::mt19937_64 rng(derive_seed(seed, 0x73616d70));
    std::vector<std::size_t> labels(count);
    for (std::size_t i = 0; i < count; ++i) labels[i] = i % options_.n_classes;
    std::shuffle(labels.begin(), labels.end(), rng);

    std::uniform_int_distribution<std::size_t> pick_mode(0, options_.modes_per_class - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t d = options_.input_dim;
    std::vector<double> x(count * d);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t mode = pick_mode(rng);
        const double* center = centers_.data() + (labels[i] * options_.modes_per_class + mode) * d;
        for (std::size_t k = 0; k < d; ++k) x[i * d + k] = center[k] + options_.noise * normal(rng);
    }
    return {DataMatrix(count, d, std::move(x)), std::move(labels)};
}

Params init_params(const NetSpec& spec, std::uint64_t seed) {
    spec.validate();
    Params p;
    p.seed = seed;
    std::mt19937_64 rng(derive_seed(seed, 0x696e6974));
    for (std::size_t l = 0; l < spec.n_layers(); ++l) {
        DenseLayer layer;
        layer.fan_in = spec.layer_widths[l];
        layer.fan_out = spec.layer_widths[l + 1];
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(layer.fan_in)));
        layer.weights.resize(layer.fan_in * layer.fan_out);
        for (double& w : layer.weights) w = normal(rng);
        layer.bias.assign(layer.fan_out, 0.0);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

std::vector<DataMatrix> forward_collect(const Params& params, const DataMatrix& inputs) {
    if (params.layers.empty()) throw InvalidInput("network has no layers");
    if (inputs.n_feat() != params.layers.front().fan_in)
        throw ShapeMismatch("input width " + std::to_string(inputs.n_feat()) +
                            " does not match network input " +
                            std::to_string(params.layers.front().fan_in));
    ForwardTrace trace = run_forward(params, inputs.values(), inputs.n_obs());
    std::vector<DataMatrix> out;
    out.reserve(trace.post.size());
    for (std::size_t l = 0; l < trace.post.size(); ++l)
        out.emplace_back(inputs.n_obs(), params.layers[l].fan_out, std::move(trace.post[l]),
                         layer_name(l));
    return out;
}

Gradients gradients(const Params& params, const Batch& batch) { return backprop(params, batch, 0); }

double mean_cross_entropy(const Params& params, const Batch& batch) {
    check_batch(params, batch);
    const auto trace = run_forward(params, batch.inputs.values(), batch.inputs.n_obs());
    const std::size_t k = params.layers.back().fan_out;
    return batch_loss(softmax(trace.post.back(), batch.inputs.n_obs(), k), batch.labels, k);
}

std::size_t freeze_epoch(std::size_t index, std::size_t n_layers, std::size_t epochs) {
    if (index + 1 >= n_layers) return epochs;
    return (index + 1) * epochs / n_layers;
}

Params train(const NetSpec& spec, const GaussianTask& task, const Recipe& recipe,
             const TrainConfig& config, const EpochObserver& observer) {
    spec.validate();
    if (config.batch_size == 0) throw ConfigError("batch_size must be at least 1");
    if (!(config.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (config.train_samples == 0) throw ConfigError("train_samples must be positive");
    if (spec.input_dim() != task.input_dim() || spec.output_dim() != task.n_classes())
        throw ConfigError("network input/output widths do not match the task");

    const std::size_t n_layers = spec.n_layers();
    const bool freezes = std::holds_alternative<Freeze>(recipe) ||
                         std::holds_alternative<TransferFreeze>(recipe);
    std::size_t fixed_below = 0;  // layers [0, fixed_below) never train
    Params params;
    if (const auto* r = std::get_if<RandomAbove>(&recipe)) {
        if (r->n < 1 || r->n > n_layers - 1)
            throw ConfigError("random_above n must lie in [1, " + std::to_string(n_layers - 1) +
                              "], got " + std::to_string(r->n));
        fixed_below = r->n;
    }
    if (const auto* t = std::get_if<TransferFreeze>(&recipe)) {
        if (!same_shapes(t->source, spec))
            throw ConfigError("transfer source parameters do not match the network spec");
        params = t->source;
    } else {
        params = init_params(spec, config.seed);
    }

    const std::size_t epochs = std::holds_alternative<Untrained>(recipe) ? 0 : config.epochs;
    const Batch train_set = task.sample(config.train_samples, derive_seed(config.seed, 1));
    std::vector<std::size_t> order(config.train_samples);

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        if (observer) observer(epoch, params);
        std::size_t first_trainable = fixed_below;
        if (freezes)
            while (first_trainable + 1 < n_layers && freeze_epoch(first_trainable, n_layers, epochs) <= epoch)
                ++first_trainable;

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(derive_seed(config.seed, 1000 + epoch));
        std::shuffle(order.begin(), order.end(), rng);

        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            const Batch batch = gather(train_set, std::span(order).subspan(start, stop - start));
            const Gradients g = backprop(params, batch, first_trainable);
            for (std::size_t l = first_trainable; l < n_layers; ++l) {
                DenseLayer& layer = params.layers[l];
                for (std::size_t i = 0; i < layer.weights.size(); ++i)
                    layer.weights[i] -= config.learning_rate * g.layers[l].weights[i];
                for (std::size_t i = 0; i < layer.bias.size(); ++i)
                    layer.bias[i] -= config.learning_rate * g.layers[l].bias[i];
            }
        }
    }
    if (observer) observer(epochs, params);
    return params;
}

std::vector<std::size_t> predict(const Params& params, const DataMatrix& inputs) {
    const auto acts = forward_collect(params, inputs);
    const DataMatrix& logits = acts.back();
    std::vector<std::size_t> out(inputs.n_obs());
    for (std::size_t i = 0; i < inputs.n_obs(); ++i) {
        const auto row = logits.row(i);
        out[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
}

double evaluate_accuracy(const Params& params, const GaussianTask& task, std::size_t n_samples,
                         std::uint64_t seed) {
    if (n_samples == 0) throw ConfigError("n_samples must be at least 1");
    const Batch eval = task.sample(n_samples, seed);
    const auto guess = predict(params, eval.inputs);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < guess.size(); ++i) hits += guess[i] == eval.labels[i];
    return static_cast<double>(hits) / static_cast<double>(n_samples);
}

}  // namespace repsim::simnet
