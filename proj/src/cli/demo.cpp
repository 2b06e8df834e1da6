#include "demo.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "repsim/error.hpp"
#include "repsim/report.hpp"

namespace repsim::cli {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

class Demo {
public:
    Demo(experiment::Suite suite, const DemoOptions& options, std::ostream& log)
        : suite_(suite), opt_(options), log_(log) {}

    void run() {
        std::filesystem::create_directories(opt_.out_dir);
        std::filesystem::remove(opt_.out_dir / "STAGE_FAILED");
        try {
            stage_ = "simulate";
            log_ << "[demo] training networks for suite " << experiment::suite_id(suite_) << '\n';
            result_ = experiment::run_experiment(suite_, opt_.config, opt_.out_dir / "networks");
            switch (suite_) {
                case experiment::Suite::untrained_vs_trained: untrained_vs_trained(); break;
                case experiment::Suite::transfer_freeze: transfer_freeze(); break;
                case experiment::Suite::random_features: random_features(); break;
            }
            stage_ = "report";
            write_text(opt_.out_dir / "report.md", report_.str());
            log_ << "[demo] wrote " << (opt_.out_dir / "report.md").string() << '\n';
        } catch (const std::exception& e) {
            write_text(opt_.out_dir / "STAGE_FAILED", "stage: " + stage_ + "\nerror: " + e.what() + "\n");
            throw;
        }
    }

private:
    const ActivationSet& acts(const std::string& name) const {
        return *result_->network(name).activations;
    }

    const SimilarityMatrix& compare(const std::string& id, const std::string& rows,
                                    const std::string& cols, const std::string& title) {
        stage_ = "compare " + id;
        PairwiseOptions po;
        po.center = opt_.center;
        po.jobs = opt_.config.jobs;
        auto pr = pairwise_similarity(acts(rows), acts(cols), opt_.metric, po);
        if (pr.degenerate_cells > 0)
            log_ << "[demo] warning: " << id << " has " << pr.degenerate_cells
                 << " undefined cell(s) recorded as nan\n";
        return emit(id, std::move(pr.matrix), title + " (rows " + rows + ", cols " + cols + ")");
    }

    const SimilarityMatrix& emit(const std::string& id, SimilarityMatrix m, const std::string& title) {
        write_csv(opt_.out_dir / (id + ".csv"), m);
        HeatmapStyle style = opt_.style;
        style.title = title;
        write_text(opt_.out_dir / (id + ".svg"), render_heatmap_svg(m, style));
        auto [it, inserted] = matrices_.insert_or_assign(id, std::move(m));
        return it->second;
    }

    void header() {
        report_ << "# Similarity demo: " << experiment::suite_id(suite_) << "\n\n";
        report_ << "- metric: " << metric_id(opt_.metric) << (opt_.center ? " (column-centered)" : "")
                << "\n- probe set: " << result_->probe_id << "\n- weight layers: "
                << opt_.config.spec.n_layers() << "\n\n## Accuracy (top-1)\n\n"
                << "| network | recipe | random layers | top1 |\n|---|---|---|---|\n";
        for (const auto& n : result_->networks)
            report_ << "| " << n.name << " | " << n.recipe << " | " << n.n_random_layers << " | "
                    << format_score(n.top1) << " |\n";
        report_ << '\n';
    }

    void diagonal_section(const std::vector<std::string>& ids) {
        report_ << "## Row-argmax distance to the diagonal\n\n"
                << "| comparison | mean distance | fraction within 1 | argmax per row |\n|---|---|---|---|\n";
        for (const auto& id : ids) {
            const auto& m = matrices_.at(id);
            const auto s = diagonal_stats(m);
            std::string cols;
            for (std::size_t r = 0; r < s.argmax_col.size(); ++r) {
                if (r) cols += ' ';
                cols += m.row_labels()[r] + "->" +
                        (s.argmax_col[r] < m.cols() ? m.col_labels()[s.argmax_col[r]] : "nan");
            }
            report_ << "| " << id << " | " << format_score(s.mean_distance) << " | "
                    << format_score(s.fraction_within_one) << " | " << cols << " |\n";
        }
        report_ << '\n';
    }

    void dissimilarity_section(const std::vector<std::string>& ids) {
        report_ << "## Layer with the largest cross-network difference\n\n"
                << "| comparison | weakest diagonal layer | score |\n|---|---|---|\n";
        std::vector<double> sum;
        for (const auto& id : ids) {
            const auto& m = matrices_.at(id);
            const std::size_t w = weakest_diagonal(m);
            report_ << "| " << id << " | " << m.row_labels()[w] << " | " << format_score(m(w, w)) << " |\n";
            sum.resize(m.rows(), 0.0);
            for (std::size_t i = 0; i < m.rows(); ++i) sum[i] += std::isnan(m(i, i)) ? 0.0 : m(i, i);
        }
        std::size_t worst = 0;
        for (std::size_t i = 1; i < sum.size(); ++i)
            if (sum[i] < sum[worst]) worst = i;
        report_ << "\nLowest mean diagonal similarity across these comparisons: "
                << matrices_.at(ids.front()).row_labels()[worst] << "\n\n";
    }

    void untrained_vs_trained() {
        compare("untrained_self", "untrained", "untrained", "Untrained self-similarity");
        compare("untrained_vs_standard", "untrained", "standard_a", "Untrained vs standard");
        compare("untrained_vs_transfer", "untrained", "transfer_b_to_a", "Untrained vs transfer-freeze");
        header();
        diagonal_section({"untrained_self", "untrained_vs_standard", "untrained_vs_transfer"});
    }

    void transfer_freeze() {
        compare("standard_a_vs_standard_b", "standard_a", "standard_b", "Standard A vs standard B");
        const auto& src = compare("transfer_vs_source", "transfer_b_to_a", "standard_b",
                                  "Transfer-freeze vs source net (task B)");
        const auto& tgt = compare("transfer_vs_target", "transfer_b_to_a", "standard_a",
                                  "Transfer-freeze vs target net (task A)");
        header();
        diagonal_section({"standard_a_vs_standard_b", "transfer_vs_source", "transfer_vs_target"});
        const std::size_t early = (opt_.config.spec.n_layers() + 1) / 2;
        report_ << "## Early layers of the transfer-freeze net\n\n"
                << "| layer | vs source (task B) | vs target (task A) | closer to |\n|---|---|---|---|\n";
        for (std::size_t i = 0; i < early; ++i)
            report_ << "| " << src.row_labels()[i] << " | " << format_score(src(i, i)) << " | "
                    << format_score(tgt(i, i)) << " | " << (src(i, i) > tgt(i, i) ? "source" : "target")
                    << " |\n";
        report_ << '\n';
        dissimilarity_section({"standard_a_vs_standard_b", "transfer_vs_source", "transfer_vs_target"});
    }

    void random_features() {
        const std::size_t n_layers = opt_.config.spec.n_layers();
        compare("standard_self", "standard_a", "standard_a", "Standard net self-similarity");
        std::vector<std::string> ids;
        for (std::size_t n = 1; n < n_layers; ++n) {
            const std::string id = "random_" + std::to_string(n) + "_vs_standard";
            compare(id, "random_" + std::to_string(n), "standard_a",
                    "Random net " + std::to_string(n) + " vs standard");
            ids.push_back(id);
            stage_ = "hypothesis " + std::to_string(n);
            emit("hypothesis_random_" + std::to_string(n),
                 hypothesis_matrix(acts("standard_a").names(), n),
                 "Even-redistribution hypothesis, random net " + std::to_string(n));
        }

        stage_ = "accuracy curve";
        const auto curve = experiment::random_accuracy_curve(*result_);
        std::string csv = "n_random_layers,mean_top1,repeats\n";
        for (std::size_t i = 0; i < curve.size(); ++i)
            csv += std::to_string(i + 1) + ',' + format_score(curve[i]) + ',' +
                   std::to_string(opt_.config.accuracy_repeats) + '\n';
        write_text(opt_.out_dir / "accuracy_vs_n.csv", csv);

        header();
        report_ << "## Accuracy vs number of random layers\n\n| n | mean top1 |\n|---|---|\n"
                << "| 0 (standard) | " << format_score(result_->network("standard_a").top1) << " |\n";
        for (std::size_t i = 0; i < curve.size(); ++i)
            report_ << "| " << i + 1 << " | " << format_score(curve[i]) << " |\n";
        report_ << '\n';
        diagonal_section(ids);
    }

    experiment::Suite suite_;
    const DemoOptions& opt_;
    std::ostream& log_;
    std::string stage_ = "setup";
    std::optional<experiment::Result> result_;
    std::map<std::string, SimilarityMatrix> matrices_;
    std::ostringstream report_;
};

}  // namespace

void run_demo(experiment::Suite suite, const DemoOptions& options, std::ostream& log) {
    Demo(suite, options, log).run();
}

}  // namespace repsim::cli
