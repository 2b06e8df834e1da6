#include "repsim/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "demo.hpp"
#include "repsim/activation_io.hpp"
#include "repsim/error.hpp"
#include "repsim/experiment.hpp"
#include "repsim/heatmap.hpp"
#include "repsim/metrics.hpp"
#include "repsim/simnet.hpp"

namespace repsim::cli {

namespace {

struct Globals {
    std::uint64_t seed = 1;
    bool center = false;
    std::string metric = "rv2";
    int jobs = 0;
    std::vector<double> range{0.0, 1.0};
};

// Usage problems detected after CLI11 parsing succeeded.
struct UsageError : Error {
    using Error::Error;
};

Metric resolve_metric(const Globals& g) {
    if (auto m = parse_metric(g.metric)) return *m;
    throw UsageError("unknown metric '" + g.metric + "' (expected rv, rv2 or cka)");
}

HeatmapStyle resolve_style(const Globals& g) {
    HeatmapStyle style;
    style.lo = g.range.at(0);
    style.hi = g.range.at(1);
    if (!(style.lo < style.hi)) throw UsageError("--range needs LO < HI");
    return style;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

struct MetricArgs {
    std::string file_x, file_y;
};

int cmd_metric(const Globals& g, const MetricArgs& a, std::ostream& out) {
    const Metric metric = resolve_metric(g);
    const DataMatrix x = read_matrix(a.file_x);
    const DataMatrix y = read_matrix(a.file_y);
    out << format_score(compute_metric(metric, x, y, g.center)) << '\n';
    return kExitOk;
}

struct CompareArgs {
    std::string manifest_a, manifest_b, csv, svg, title;
    std::size_t decimate = 1;
};

ActivationSet decimated(const ActivationSet& set, std::size_t factor) {
    if (factor == 1) return set;
    std::vector<DataMatrix> layers;
    for (const auto& l : set.layers()) layers.push_back(decimate(l, factor));
    return ActivationSet(std::move(layers), set.probe_id() + "-every" + std::to_string(factor));
}

int cmd_compare(const Globals& g, const CompareArgs& a, std::ostream& err) {
    const Metric metric = resolve_metric(g);
    const HeatmapStyle style = resolve_style(g);
    const ActivationSet set_a = decimated(load_activation_set(a.manifest_a), a.decimate);
    const ActivationSet set_b = decimated(load_activation_set(a.manifest_b), a.decimate);
    if (set_a.probe_id() != set_b.probe_id())
        err << "warning: probe ids differ ('" << set_a.probe_id() << "' vs '" << set_b.probe_id() << "')\n";
    const auto result = pairwise_similarity(set_a, set_b, metric, {g.center, g.jobs});
    if (result.degenerate_cells > 0)
        err << "warning: " << result.degenerate_cells << " cell(s) undefined, written as nan\n";
    write_csv(a.csv, result.matrix);
    if (!a.svg.empty()) {
        HeatmapStyle s = style;
        s.title = a.title;
        write_file(a.svg, render_heatmap_svg(result.matrix, s));
    }
    return kExitOk;
}

struct RenderArgs {
    std::string csv, svg, title;
};

int cmd_render(const Globals& g, const RenderArgs& a) {
    HeatmapStyle style = resolve_style(g);
    style.title = a.title;
    write_file(a.svg, render_heatmap_svg(read_csv(a.csv), style));
    return kExitOk;
}

struct SimulateArgs {
    std::string recipe = "standard";
    std::size_t n = 1;
    std::string task = "a";
    std::string out;
    std::optional<std::size_t> epochs;
    std::optional<double> lr;
};

int cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out) {
    experiment::Config cfg = experiment::default_config(g.seed);
    if (a.epochs) cfg.train.epochs = *a.epochs;
    if (a.lr) cfg.train.learning_rate = *a.lr;
    const auto tasks = experiment::make_tasks(cfg);
    if (a.task != "a" && a.task != "b") throw UsageError("--task must be 'a' or 'b'");
    const auto& task = a.task == "a" ? tasks.a : tasks.b;
    const auto& other = a.task == "a" ? tasks.b : tasks.a;

    simnet::TrainConfig train = cfg.train;
    train.seed = g.seed;
    simnet::Recipe recipe;
    std::string name = a.recipe;
    std::size_t n_random = 0;
    if (a.recipe == "standard") {
        recipe = simnet::Standard{};
    } else if (a.recipe == "untrained") {
        recipe = simnet::Untrained{};
        n_random = cfg.spec.n_layers();
    } else if (a.recipe == "freeze") {
        recipe = simnet::Freeze{};
    } else if (a.recipe == "random_above") {
        recipe = simnet::RandomAbove{a.n};
        n_random = a.n;
        name += "_" + std::to_string(a.n);
    } else if (a.recipe == "transfer_freeze") {
        simnet::TrainConfig source_cfg = train;
        source_cfg.seed = g.seed + 1;
        recipe = simnet::TransferFreeze{simnet::train(cfg.spec, other, simnet::Standard{}, source_cfg)};
    } else {
        throw UsageError("unknown recipe '" + a.recipe + "'");
    }

    const simnet::Params params = simnet::train(cfg.spec, task, recipe, train);
    const double top1 = simnet::evaluate_accuracy(params, task, cfg.eval_samples, cfg.eval_seed);
    const auto probe = tasks.a.sample(cfg.probe_samples, cfg.probe_seed);
    const ActivationSet set(simnet::forward_collect(params, probe.inputs), experiment::probe_id_for(cfg));
    const auto manifest = save_activation_set(set, a.out, name);
    write_file(std::filesystem::path(a.out) / "accuracy.csv",
               "network,recipe,n_random_layers,top1\n" + name + ',' + a.recipe + ',' +
                   std::to_string(n_random) + ',' + format_score(top1) + '\n');
    out << manifest.string() << '\n' << "top1 " << format_score(top1) << '\n';
    return kExitOk;
}

struct DemoArgs {
    std::string suite, out;
    std::optional<std::size_t> epochs;
};

int cmd_demo(const Globals& g, const DemoArgs& a, std::ostream& log) {
    const auto suite = experiment::parse_suite(a.suite);
    if (!suite) throw UsageError("unknown suite '" + a.suite + "'");
    DemoOptions opt;
    opt.config = experiment::default_config(g.seed);
    opt.config.jobs = g.jobs;
    if (a.epochs) opt.config.train.epochs = *a.epochs;
    opt.metric = resolve_metric(g);
    opt.center = g.center;
    opt.style = resolve_style(g);
    opt.out_dir = a.out;
    run_demo(*suite, opt, log);
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Representation similarity toolkit: RV, RV2 and linear CKA between layer activations", "repsim"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Base seed for simulation")->capture_default_str();
    app.add_flag("--center", g.center, "Column-center inputs before rv / rv2");
    app.add_option("--metric", g.metric, "Similarity metric: rv, rv2 or cka")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads (0 = all available)")->check(CLI::NonNegativeNumber);
    app.add_option("--range", g.range, "Heatmap color range LO HI")->expected(2)->capture_default_str();

    MetricArgs metric_args;
    auto* metric = app.add_subcommand("metric", "Similarity between two RSAM matrices");
    metric->add_option("x", metric_args.file_x, "First RSAM matrix")->required();
    metric->add_option("y", metric_args.file_y, "Second RSAM matrix")->required();

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "Pairwise layer similarity between two activation sets");
    compare->add_option("a", compare_args.manifest_a, "Manifest of the row network")->required();
    compare->add_option("b", compare_args.manifest_b, "Manifest of the column network")->required();
    compare->add_option("--csv", compare_args.csv, "Output CSV")->required();
    compare->add_option("--svg", compare_args.svg, "Output SVG heatmap");
    compare->add_option("--title", compare_args.title, "Heatmap title");
    compare->add_option("--decimate", compare_args.decimate, "Keep every k-th observation")
        ->check(CLI::PositiveNumber);

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Train one desk-scale network and record its activations");
    simulate->add_option("--recipe", sim_args.recipe,
                         "standard | untrained | freeze | random_above | transfer_freeze")
        ->capture_default_str();
    simulate->add_option("--n", sim_args.n, "Random layers for random_above")->capture_default_str();
    simulate->add_option("--task", sim_args.task, "Training task: a or b")->capture_default_str();
    simulate->add_option("--out", sim_args.out, "Output directory")->required();
    simulate->add_option("--epochs", sim_args.epochs, "Override training epochs");
    simulate->add_option("--lr", sim_args.lr, "Override learning rate");

    DemoArgs demo_args;
    auto* demo = app.add_subcommand("demo", "Run an experiment suite end to end");
    demo->add_option("suite", demo_args.suite, "untrained_vs_trained | transfer_freeze | random_features")
        ->required();
    demo->add_option("--out", demo_args.out, "Output directory")->required();
    demo->add_option("--epochs", demo_args.epochs, "Override training epochs");

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "Render a similarity CSV as an SVG heatmap");
    render->add_option("csv", render_args.csv, "Similarity CSV")->required();
    render->add_option("--svg", render_args.svg, "Output SVG")->required();
    render->add_option("--title", render_args.title, "Heatmap title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (metric->parsed()) return cmd_metric(g, metric_args, out);
        if (compare->parsed()) return cmd_compare(g, compare_args, err);
        if (simulate->parsed()) return cmd_simulate(g, sim_args, out);
        if (demo->parsed()) return cmd_demo(g, demo_args, err);
        if (render->parsed()) return cmd_render(g, render_args);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DegenerateInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace repsim::cli
