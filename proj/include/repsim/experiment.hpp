#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repsim/activation_set.hpp"
#include "repsim/simnet.hpp"

namespace repsim::experiment {

/// untrained_vs_trained: untrained, standard and transfer-freeze nets.
/// transfer_freeze: standard on task A, standard on task B, and the B-to-A
///   transfer-freeze net.
/// random_features: standard on task A plus random_above(n), n = 1..L-1.
enum class Suite { untrained_vs_trained, transfer_freeze, random_features };

std::string_view suite_id(Suite s) noexcept;
std::optional<Suite> parse_suite(std::string_view id) noexcept;

/// Task A plays the role of the probe/target language, task B the related
/// source language. Every network is probed with the same task-A sample.
struct Config {
    simnet::NetSpec spec;
    simnet::GaussianTask::Options task;
    std::uint64_t task_seed = 11;
    double task_mix = 0.6;  ///< relatedness of task B's centers to task A's
    simnet::TrainConfig train;
    std::uint64_t seed = 1;  ///< base for all network seeds
    std::size_t probe_samples = 600;
    std::uint64_t probe_seed = 4242;
    std::size_t eval_samples = 2000;
    std::uint64_t eval_seed = 9001;
    std::size_t accuracy_repeats = 3;  ///< seeds averaged in the random-net accuracy curve
    int jobs = 0;                      ///< parallel trainings; 0 = OpenMP default
};

/// Desk-scale defaults: 6 weight layers of width 64 and an 8-class task with
/// 4 overlapping modes per class (about 0.9 top-1 after 30 epochs).
Config default_config(std::uint64_t seed = 1);

struct Network {
    std::string name;
    std::string recipe;
    std::size_t n_random_layers = 0;  ///< layers left at initialization
    std::size_t repeat = 0;           ///< seed replicate; only replicate 0 is probed
    double top1 = 0.0;                ///< accuracy on the network's training task
    simnet::Params params;
    std::optional<ActivationSet> activations;
};

struct Result {
    Suite suite;
    std::string probe_id;
    std::vector<Network> networks;

    /// Throws std::out_of_range for an unknown name.
    const Network& network(std::string_view name) const;
    /// Networks whose activations were measured, in suite order.
    std::vector<const Network*> probed() const;
};

/// Trains every network the suite needs and probes the measured ones.
/// Independent trainings run in parallel; results do not depend on `jobs`.
/// With `out_dir`, writes `<name>.json` manifests, per-layer RSAM files and
/// `accuracy.csv` there.
Result run_experiment(Suite suite, const Config& config,
                      const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Columns network,recipe,n_random_layers,top1; one row per network.
std::string accuracy_csv(const Result& result);

/// Mean top-1 of random_above(n) over replicates, n = 1..L-1.
std::vector<double> random_accuracy_curve(const Result& result);

std::string probe_id_for(const Config& config);

struct Tasks {
    simnet::GaussianTask a;  ///< probe / target task
    simnet::GaussianTask b;  ///< related source task
};
Tasks make_tasks(const Config& config);

}  // namespace repsim::experiment
