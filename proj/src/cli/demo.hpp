#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>

#include "repsim/experiment.hpp"
#include "repsim/heatmap.hpp"
#include "repsim/metrics.hpp"

namespace repsim::cli {

struct DemoOptions {
    experiment::Config config;
    Metric metric = Metric::rv2;
    bool center = false;
    HeatmapStyle style;
    std::filesystem::path out_dir;
};

/// Runs one suite end to end: trains, probes, writes every pairwise matrix
/// as CSV + SVG and a markdown summary. On failure leaves a STAGE_FAILED
/// file naming the stage and rethrows.
void run_demo(experiment::Suite suite, const DemoOptions& options, std::ostream& log);

}  // namespace repsim::cli
