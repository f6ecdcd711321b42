#include "pr/benchmark.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "pr/mii.hpp"

namespace pr {

namespace {

// Fixed salts keep the seed streams of unrelated components disjoint.
constexpr std::uint64_t kImageSalt = 0x696D616765ULL;    // "image"
constexpr std::uint64_t kMatrixSalt = 0x6D6174726978ULL; // measurement matrix
constexpr std::uint64_t kInitSalt = 1;
constexpr std::uint64_t kSolverSalt = 2;

}  // namespace

Seed image_seed(Seed base, Index image_index) {
    return derive_seed(derive_seed(base, kImageSalt), static_cast<std::uint64_t>(image_index));
}

RunContext RunContext::prepare(const ExperimentConfig& cfg) {
    cfg.check_paths(/*need_dataset=*/true, /*need_weights=*/true);

    RunContext ctx;
    if (cfg.dataset_format == "idx")
        ctx.dataset = load_mnist_idx(cfg.dataset_images, cfg.dataset_labels);
    else
        ctx.dataset = load_image_dir(cfg.dataset_images, cfg.pgm_shape);
    if (ctx.dataset.images.empty()) throw DataError("dataset is empty");

    const Index n = ctx.dataset.shape.size();
    switch (cfg.measurement) {
        case MeasurementKind::Fourier:
            ctx.op = MeasurementOperator::fourier(ctx.dataset.shape);
            break;
        case MeasurementKind::GaussianReal:
            ctx.op = MeasurementOperator::gaussian_real(
                gaussian_matrix_real(cfg.measurement_m, n, derive_seed(cfg.seed, kMatrixSalt)));
            break;
        case MeasurementKind::GaussianComplex:
            ctx.op = MeasurementOperator::gaussian_complex(
                gaussian_matrix_complex(cfg.measurement_m, n, derive_seed(cfg.seed, kMatrixSalt)));
            break;
    }

    if (cfg.method == MethodKind::Dpr || cfg.method == MethodKind::Prilo) {
        ctx.net = load_weights(cfg.generator_weights);
        ctx.has_net = true;
        if (ctx.net.output_dim() != n)
            throw ConfigError("generator output dim " + std::to_string(ctx.net.output_dim()) +
                              " does not match image size " + std::to_string(n));
    }
    return ctx;
}

namespace {

Vec initial_latent(const ExperimentConfig& cfg, const RunContext& ctx, const Vec& y,
                   Seed restart_seed) {
    if (cfg.init == InitKind::Mii) {
        MiiSettings mii;
        mii.candidates = cfg.mii_candidates;
        mii.seed = derive_seed(restart_seed, kInitSalt);
        return mii_init(ctx.op, y, ctx.net, mii);
    }
    Rng rng(derive_seed(restart_seed, kInitSalt));
    return rng.normal_vec(ctx.net.latent_dim());
}

Vec initial_image(const RunContext& ctx, Seed restart_seed) {
    Rng rng(derive_seed(restart_seed, kInitSalt));
    Vec x0(ctx.dataset.shape.size());
    for (Index i = 0; i < x0.size(); ++i) x0[i] = rng.uniform01();
    return x0;
}

}  // namespace

SolveOutcome solve_image(const ExperimentConfig& cfg, const RunContext& ctx, Index index,
                         bool with_trace) {
    if (index < 0 || index >= static_cast<Index>(ctx.dataset.size()))
        throw DataError("image index " + std::to_string(index) + " out of range");

    SolveOutcome out;
    out.reference = ctx.dataset.images[static_cast<std::size_t>(index)];
    const Vec y = apply_magnitude(ctx.op, out.reference);
    const Seed base = image_seed(cfg.seed, index);

    TraceOptions trace;
    trace.record = with_trace;
    trace.reference = with_trace ? &out.reference : nullptr;

    SolverCall call = [&](Seed restart_seed, int) -> ReconstructionResult {
        switch (cfg.method) {
            case MethodKind::Er:
                return er(y, ctx.dataset.shape, cfg.er_iters, initial_image(ctx, restart_seed),
                          trace);
            case MethodKind::Hio:
                return hio(y, ctx.dataset.shape, cfg.hio_iters, cfg.hio_beta,
                           initial_image(ctx, restart_seed), trace);
            case MethodKind::Dpr: {
                PgdSettings s;
                s.steps = cfg.dpr_steps;
                s.step_size = cfg.dpr_step_size;
                s.noise = cfg.prilo.noise;
                s.seed = derive_seed(restart_seed, kSolverSalt);
                s.record_trace = with_trace;
                return dpr_solve(ctx.op, y, ctx.net, initial_latent(cfg, ctx, y, restart_seed), s,
                                 cfg.dpr_radius, trace);
            }
            case MethodKind::Prilo:
                return prilo_solve(ctx.op, y, ctx.net, initial_latent(cfg, ctx, y, restart_seed),
                                   cfg.prilo, derive_seed(restart_seed, kSolverSalt), trace);
        }
        throw Error("unreachable");
    };

    out.result = run_with_restarts(call, cfg.restarts, base);

    MetricReport& m = out.metrics;
    m.magnitude_mse = out.result.magnitude_loss / static_cast<double>(ctx.op.output_len());
    m.psnr_db = psnr(out.result.image, out.reference);
    m.ssim_value = ssim(out.result.image, out.reference, ctx.dataset.shape);
    m.registered = cfg.registration_enabled();
    if (m.registered) {
        const Registration reg =
            register_trivial(out.result.image, out.reference, ctx.dataset.shape);
        m.shift_row = reg.shift_row;
        m.shift_col = reg.shift_col;
        m.flipped = reg.flipped;
        out.result.registered_image = reg.aligned;
    }
    return out;
}

std::string csv_header() {
    return "image_id,method,init,restarts,seed,magnitude_mse,psnr_db,psnr_db_registered,ssim,"
           "ssim_registered,wall_ms,error";
}

std::string csv_row(const BenchmarkRow& row, const ExperimentConfig& cfg) {
    std::string s = std::to_string(row.image_id) + "," + method_kind_name(cfg.method) + "," +
                    init_kind_name(cfg.init) + "," + std::to_string(cfg.restarts) + "," +
                    std::to_string(row.seed) + ",";
    if (row.error.empty()) {
        s += format_double(row.magnitude_mse) + "," + format_double(row.psnr_db) + "," +
             format_double(row.psnr_db_registered) + "," + format_double(row.ssim) + "," +
             format_double(row.ssim_registered) + "," + format_double(row.wall_ms) + ",";
    } else {
        std::string msg = row.error;
        for (char& c : msg)
            if (c == ',' || c == '\n') c = ';';
        s += ",,,,," + format_double(row.wall_ms) + "," + msg;
    }
    return s;
}

namespace {

SummaryStat summarize(const std::vector<double>& values) {
    SummaryStat s;
    if (values.empty()) return s;
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        const double stddev = std::sqrt(ss / (n - 1.0));
        s.ci95 = 1.96 * stddev / std::sqrt(n);
    }
    return s;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

}  // namespace

BenchmarkOutput run_benchmark(const ExperimentConfig& cfg, std::ostream* log) {
    const RunContext ctx = RunContext::prepare(cfg);
    const Index total = static_cast<Index>(ctx.dataset.size());
    const Index count = (cfg.limit > 0 && cfg.limit < total) ? cfg.limit : total;

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);

    BenchmarkOutput out;
    out.rows.resize(static_cast<std::size_t>(count));

    int workers = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, static_cast<int>(count));

    std::atomic<Index> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const Index i = cursor.fetch_add(1);
            if (i >= count) return;
            BenchmarkRow& row = out.rows[static_cast<std::size_t>(i)];
            row.image_id = i;
            row.seed = image_seed(cfg.seed, i).value;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const SolveOutcome res = solve_image(cfg, ctx, i, cfg.trace);
                row.magnitude_mse = res.metrics.magnitude_mse;
                row.psnr_db = res.metrics.psnr_db;
                row.ssim = res.metrics.ssim_value;
                if (res.metrics.registered) {
                    row.psnr_db_registered = psnr(res.result.registered_image, res.reference);
                    row.ssim_registered =
                        ssim(res.result.registered_image, res.reference, ctx.dataset.shape);
                } else {
                    row.psnr_db_registered = row.psnr_db;
                    row.ssim_registered = row.ssim;
                }
                row.feas_checked = res.result.audit.checked;
                row.feas_violations = res.result.audit.violations;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            row.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        }
    };

    {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // Audit counters are re-derived sequentially deterministic: accumulate sums.
    std::vector<double> psnr_v, psnr_reg_v, ssim_v, ssim_reg_v, mse_v;
    for (const BenchmarkRow& row : out.rows) {
        if (!row.error.empty()) {
            out.count_failed++;
            continue;
        }
        out.count_ok++;
        out.audit.checked += row.feas_checked;
        out.audit.violations += row.feas_violations;
        psnr_v.push_back(row.psnr_db);
        psnr_reg_v.push_back(row.psnr_db_registered);
        ssim_v.push_back(row.ssim);
        ssim_reg_v.push_back(row.ssim_registered);
        mse_v.push_back(row.magnitude_mse);
    }
    out.psnr_db = summarize(psnr_v);
    out.psnr_db_registered = summarize(psnr_reg_v);
    out.ssim = summarize(ssim_v);
    out.ssim_registered = summarize(ssim_reg_v);
    if (!mse_v.empty()) {
        double sum = 0.0;
        for (double v : mse_v) sum += v;
        out.magnitude_mse_mean = sum / static_cast<double>(mse_v.size());
    }

    // results.csv, ordered by image index.
    out.csv_path = (fs::path(cfg.output_dir) / "results.csv").string();
    {
        std::ofstream csv(out.csv_path, std::ios::trunc);
        if (!csv) throw DataError("cannot write " + out.csv_path);
        csv << csv_header() << "\n";
        for (const BenchmarkRow& row : out.rows) csv << csv_row(row, cfg) << "\n";
    }

    // summary.txt
    out.summary_path = (fs::path(cfg.output_dir) / "summary.txt").string();
    {
        KvFile s;
        s.set("summary.count", std::to_string(count));
        s.set("summary.failed", std::to_string(out.count_failed));
        s.set("summary.magnitude_mse.mean", format_double(out.magnitude_mse_mean));
        s.set("summary.psnr_db.mean", format_double(out.psnr_db.mean));
        s.set("summary.psnr_db.ci95", format_double(out.psnr_db.ci95));
        s.set("summary.psnr_db_registered.mean", format_double(out.psnr_db_registered.mean));
        s.set("summary.psnr_db_registered.ci95", format_double(out.psnr_db_registered.ci95));
        s.set("summary.ssim.mean", format_double(out.ssim.mean));
        s.set("summary.ssim.ci95", format_double(out.ssim.ci95));
        s.set("summary.ssim_registered.mean", format_double(out.ssim_registered.mean));
        s.set("summary.ssim_registered.ci95", format_double(out.ssim_registered.ci95));
        s.set("summary.feasibility.checked", std::to_string(out.audit.checked));
        s.set("summary.feasibility.violations", std::to_string(out.audit.violations));
        s.save(out.summary_path);
    }

    // manifest.txt: resolved config plus replay metadata.
    out.manifest_path = (fs::path(cfg.output_dir) / "manifest.txt").string();
    {
        KvFile m;
        m.set("manifest.tool", kToolVersion);
        m.set("manifest.created_utc", utc_timestamp());
        m.set("manifest.image_count", std::to_string(count));
        const KvFile resolved = cfg.to_kv();
        for (const auto& [k, v] : resolved.entries()) m.set(k, v);
        for (Index i = 0; i < count; ++i)
            m.set("manifest.image_seed." + std::to_string(i),
                  std::to_string(image_seed(cfg.seed, i).value));
        m.save(out.manifest_path);
    }

    if (log) {
        *log << "benchmark: " << count << " images, " << out.count_failed << " failed\n"
             << "  psnr_db mean " << out.psnr_db.mean << " +- " << out.psnr_db.ci95
             << " | registered " << out.psnr_db_registered.mean << " +- "
             << out.psnr_db_registered.ci95 << "\n"
             << "  ssim mean " << out.ssim.mean << " | registered " << out.ssim_registered.mean
             << "\n"
             << "  wrote " << out.csv_path << "\n";
    }
    return out;
}

}  // namespace pr
