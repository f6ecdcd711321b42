#ifndef PR_BENCHMARK_HPP
#define PR_BENCHMARK_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "pr/config.hpp"
#include "pr/dataset.hpp"
#include "pr/metrics.hpp"
#include "pr/solvers.hpp"

namespace pr {

/// Per-image seed; a pure hash of (base seed, image index) so results do not
/// depend on batch partitioning or worker count.
Seed image_seed(Seed base, Index image_index);

/// Everything a solve needs, built once per run: dataset slice, measurement
/// operator, generator weights (when the method uses them).
struct RunContext {
    Dataset dataset;
    MeasurementOperator op;
    GeneratorNet net;
    bool has_net = false;

    static RunContext prepare(const ExperimentConfig& cfg);
};

struct SolveOutcome {
    ReconstructionResult result;
    MetricReport metrics;
    Vec reference;
};

/// Measures image `index` with the configured operator, reconstructs it with
/// the configured method and restarts, and scores the result.
SolveOutcome solve_image(const ExperimentConfig& cfg, const RunContext& ctx, Index index,
                         bool with_trace = false);

struct BenchmarkRow {
    Index image_id = 0;
    std::uint64_t seed = 0;
    double magnitude_mse = 0.0;
    double psnr_db = 0.0;
    double psnr_db_registered = 0.0;
    double ssim = 0.0;
    double ssim_registered = 0.0;
    double wall_ms = 0.0;
    long feas_checked = 0;
    long feas_violations = 0;
    std::string error;  // empty = success
};

struct SummaryStat {
    double mean = 0.0;
    double ci95 = 0.0;  // 1.96 * stderr half-width
};

struct BenchmarkOutput {
    std::vector<BenchmarkRow> rows;
    Index count_ok = 0;
    Index count_failed = 0;
    SummaryStat psnr_db, psnr_db_registered, ssim, ssim_registered;
    double magnitude_mse_mean = 0.0;
    FeasibilityAudit audit;
    std::string csv_path, summary_path, manifest_path;
};

/// Runs the whole image set on a bounded worker pool and writes
/// results.csv, summary.txt and manifest.txt into cfg.output_dir.
BenchmarkOutput run_benchmark(const ExperimentConfig& cfg, std::ostream* log = nullptr);

std::string csv_header();
std::string csv_row(const BenchmarkRow& row, const ExperimentConfig& cfg);

}  // namespace pr

#endif
