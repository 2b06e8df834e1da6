#include "repsim/experiment.hpp"

#include <exception>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "omp_util.hpp"
#include "repsim/activation_io.hpp"
#include "repsim/error.hpp"
#include "repsim/similarity_matrix.hpp"

namespace repsim::experiment {

namespace {

struct Job {
    Network* slot;
    std::function<void(Network&)> run;
};

// Runs jobs in parallel and rethrows the first failure in job order.
void run_jobs(std::vector<Job>& jobs, int threads) {
    std::vector<std::exception_ptr> errors(jobs.size());
    const auto count = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            jobs[static_cast<std::size_t>(i)].run(*jobs[static_cast<std::size_t>(i)].slot);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

simnet::TrainConfig with_seed(simnet::TrainConfig train, std::uint64_t seed) {
    train.seed = seed;
    return train;
}

}  // namespace

std::string_view suite_id(Suite s) noexcept {
    switch (s) {
        case Suite::untrained_vs_trained: return "untrained_vs_trained";
        case Suite::transfer_freeze: return "transfer_freeze";
        case Suite::random_features: return "random_features";
    }
    return "";
}

std::optional<Suite> parse_suite(std::string_view id) noexcept {
    for (Suite s : {Suite::untrained_vs_trained, Suite::transfer_freeze, Suite::random_features})
        if (suite_id(s) == id) return s;
    return std::nullopt;
}

Config default_config(std::uint64_t seed) {
    Config c;
    c.spec.layer_widths = {16, 64, 64, 64, 64, 64, 8};
    c.task.input_dim = 16;
    c.task.n_classes = 8;
    c.task.modes_per_class = 4;
    c.task.separation = 0.6;
    c.task.noise = 0.5;
    c.train.epochs = 30;
    c.train.batch_size = 32;
    c.train.learning_rate = 0.05;
    c.train.train_samples = 3000;
    c.seed = seed;
    return c;
}

std::string probe_id_for(const Config& config) {
    return "taskA-seed" + std::to_string(config.task_seed) + "-probe" +
           std::to_string(config.probe_seed) + "-n" + std::to_string(config.probe_samples);
}

Tasks make_tasks(const Config& config) {
    simnet::GaussianTask a(config.task, config.task_seed);
    simnet::GaussianTask b = a.related(config.task_mix, config.task_seed + 1);
    return {std::move(a), std::move(b)};
}

const Network& Result::network(std::string_view name) const {
    for (const auto& n : networks)
        if (n.name == name) return n;
    throw std::out_of_range("no network named '" + std::string(name) + "'");
}

std::vector<const Network*> Result::probed() const {
    std::vector<const Network*> out;
    for (const auto& n : networks)
        if (n.activations) out.push_back(&n);
    return out;
}

Result run_experiment(Suite suite, const Config& config,
                      const std::optional<std::filesystem::path>& out_dir) {
    config.spec.validate();
    const std::size_t n_layers = config.spec.n_layers();
    const Tasks tasks = make_tasks(config);
    const simnet::GaussianTask& task_a = tasks.a;
    const simnet::GaussianTask& task_b = tasks.b;
    const simnet::Batch probe = task_a.sample(config.probe_samples, config.probe_seed);
    const int threads = detail::resolve_jobs(config.jobs);

    Result result{suite, probe_id_for(config), {}};
    auto& nets = result.networks;

    // Slot layout is fixed before any job runs so pointers stay valid.
    auto add = [&](std::string name, std::string recipe, std::size_t n_random, std::size_t repeat,
                   bool probed) {
        Network n;
        n.name = std::move(name);
        n.recipe = std::move(recipe);
        n.n_random_layers = n_random;
        n.repeat = repeat;
        nets.push_back(std::move(n));
        return probed;
    };
    std::vector<bool> measure;
    const std::uint64_t s = config.seed;

    auto train_job = [&](const simnet::GaussianTask& task, simnet::Recipe recipe, std::uint64_t seed) {
        return [&task, recipe = std::move(recipe), seed, &config](Network& n) {
            n.params = simnet::train(config.spec, task, recipe, with_seed(config.train, seed));
            n.top1 = simnet::evaluate_accuracy(n.params, task, config.eval_samples, config.eval_seed);
        };
    };

    std::vector<Job> first, second;
    switch (suite) {
        case Suite::untrained_vs_trained:
        case Suite::transfer_freeze: {
            const bool untrained_suite = suite == Suite::untrained_vs_trained;
            if (untrained_suite) measure.push_back(add("untrained", "untrained", n_layers, 0, true));
            measure.push_back(add("standard_a", "standard", 0, 0, true));
            measure.push_back(add("standard_b", "standard", 0, 0, !untrained_suite));
            measure.push_back(add("transfer_b_to_a", "transfer_freeze", 0, 0, true));
            std::size_t idx = 0;
            if (untrained_suite)
                first.push_back({&nets[idx++], train_job(task_a, simnet::Untrained{}, s + 3)});
            Network* standard_b = &nets[idx + 1];
            first.push_back({&nets[idx], train_job(task_a, simnet::Standard{}, s + 1)});
            first.push_back({standard_b, train_job(task_b, simnet::Standard{}, s + 2)});
            second.push_back({&nets[idx + 2], [&, standard_b](Network& n) {
                                  train_job(task_a, simnet::TransferFreeze{standard_b->params}, s + 4)(n);
                              }});
            break;
        }
        case Suite::random_features: {
            measure.push_back(add("standard_a", "standard", 0, 0, true));
            for (std::size_t rep = 0; rep < std::max<std::size_t>(1, config.accuracy_repeats); ++rep)
                for (std::size_t n = 1; n < n_layers; ++n) {
                    std::string name = "random_" + std::to_string(n);
                    if (rep > 0) name += "_r" + std::to_string(rep);
                    measure.push_back(add(name, "random_above", n, rep, rep == 0));
                }
            first.push_back({&nets[0], train_job(task_a, simnet::Standard{}, s + 1)});
            for (std::size_t i = 1; i < nets.size(); ++i) {
                const auto& n = nets[i];
                first.push_back({&nets[i], train_job(task_a, simnet::RandomAbove{n.n_random_layers},
                                                     s + 100 * (n.repeat + 1) + n.n_random_layers)});
            }
            break;
        }
    }

    run_jobs(first, threads);
    run_jobs(second, threads);

    for (std::size_t i = 0; i < nets.size(); ++i) {
        if (!measure[i]) continue;
        nets[i].activations.emplace(simnet::forward_collect(nets[i].params, probe.inputs),
                                    result.probe_id);
    }

    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        for (const auto* n : result.probed()) save_activation_set(*n->activations, *out_dir, n->name);
        const auto path = *out_dir / "accuracy.csv";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
        out << accuracy_csv(result);
        if (!out) throw IoError("failed writing '" + path.string() + "'");
    }
    return result;
}

std::string accuracy_csv(const Result& result) {
    std::string out = "network,recipe,n_random_layers,top1\n";
    for (const auto& n : result.networks)
        out += n.name + ',' + n.recipe + ',' + std::to_string(n.n_random_layers) + ',' +
               format_score(n.top1) + '\n';
    return out;
}

std::vector<double> random_accuracy_curve(const Result& result) {
    std::vector<double> sum, count;
    for (const auto& n : result.networks) {
        if (n.recipe != "random_above") continue;
        if (sum.size() < n.n_random_layers) {
            sum.resize(n.n_random_layers, 0.0);
            count.resize(n.n_random_layers, 0.0);
        }
        sum[n.n_random_layers - 1] += n.top1;
        count[n.n_random_layers - 1] += 1.0;
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] /= count[i];
    return sum;
}

}  // namespace repsim::experiment
