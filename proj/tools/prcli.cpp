// Command-line front end: train a generator, solve single images, run
// benchmarks, inspect weight files.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "pr/benchmark.hpp"
#include "pr/config.hpp"
#include "pr/dataset.hpp"
#include "pr/generator.hpp"
#include "pr/vae.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    long limit = -1;
    bool trace = false;
    bool no_register = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required = true) {
    auto* opt = cmd->add_option("--config", f.config_path, "config file (key = value)");
    if (config_required) opt->required();
    cmd->add_option("--set", f.overrides, "override a config key, e.g. --set restarts=2");
    cmd->add_option("--seed", f.seed, "base seed (overrides config)");
    cmd->add_option("--out", f.out_dir, "output directory (overrides config)");
    cmd->add_option("--limit", f.limit, "use only the first N dataset images");
    cmd->add_flag("--trace", f.trace, "record per-iteration loss/PSNR traces");
    cmd->add_flag("--no-register", f.no_register, "disable trivial-ambiguity registration");
}

pr::ExperimentConfig load_config(const CommonFlags& f) {
    pr::KvFile kv = f.config_path.empty() ? pr::KvFile() : pr::KvFile::parse_file(f.config_path);
    for (const std::string& ov : f.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw pr::ConfigError("--set expects key=value, got: " + ov);
        kv.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    if (f.seed) kv.set("seed", std::to_string(*f.seed));
    if (f.out_dir.size()) kv.set("output.dir", f.out_dir);
    if (f.limit >= 0) kv.set("limit", std::to_string(f.limit));
    if (f.trace) kv.set("trace.enabled", "true");
    if (f.no_register) kv.set("register.enabled", "false");
    return pr::ExperimentConfig::from_kv(kv);
}

int cmd_train(const CommonFlags& flags) {
    const pr::ExperimentConfig cfg = load_config(flags);
    cfg.check_paths(/*need_dataset=*/true, /*need_weights=*/false);

    pr::Dataset ds = cfg.dataset_format == "idx"
                         ? pr::load_mnist_idx(cfg.dataset_images, cfg.dataset_labels)
                         : pr::load_image_dir(cfg.dataset_images, cfg.pgm_shape);
    std::cout << "training VAE on " << ds.size() << " images ("
              << ds.shape.height << "x" << ds.shape.width << ")\n";

    pr::VaeTrainReport report;
    const pr::GeneratorNet decoder = pr::train_vae(ds.images, cfg.vae, &report);

    fs::create_directories(cfg.output_dir);
    const std::string weights_path = (fs::path(cfg.output_dir) / "decoder.prgw").string();
    pr::save_weights(decoder, weights_path);

    pr::KvFile manifest;
    manifest.set("manifest.tool", pr::kToolVersion);
    manifest.set("manifest.kind", "train");
    manifest.set("manifest.weights", weights_path);
    manifest.set("manifest.final_train_loss", pr::format_double(report.final_train_loss));
    const pr::KvFile resolved = cfg.to_kv();
    for (const auto& [k, v] : resolved.entries()) manifest.set(k, v);
    manifest.save((fs::path(cfg.output_dir) / "train_manifest.txt").string());

    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e)
        std::cout << "epoch " << e << " loss " << report.epoch_loss[e] << "\n";
    std::cout << "wrote " << weights_path << "\n";
    return 0;
}

int cmd_solve(const CommonFlags& flags, long index) {
    const pr::ExperimentConfig cfg = load_config(flags);
    const pr::RunContext ctx = pr::RunContext::prepare(cfg);
    const pr::SolveOutcome out = pr::solve_image(cfg, ctx, index, cfg.trace);

    fs::create_directories(cfg.output_dir);
    const std::string recon_path =
        (fs::path(cfg.output_dir) / ("recon_" + std::to_string(index) + ".pgm")).string();
    pr::write_pgm(recon_path, out.result.image, ctx.dataset.shape);

    for (std::size_t r = 0; r < out.result.restart_losses.size(); ++r)
        std::cout << "restart " << r << " loss " << out.result.restart_losses[r] << "\n";
    std::cout << "selected restart " << out.result.restart_index << "\n";

    const pr::MetricReport& m = out.metrics;
    std::cout << "image " << index << ": magnitude_mse " << pr::format_double(m.magnitude_mse)
              << " psnr_db " << pr::format_double(m.psnr_db);
    if (m.registered) {
        std::cout << " psnr_db_registered "
                  << pr::format_double(pr::psnr(out.result.registered_image, out.reference))
                  << " (shift " << m.shift_row << "," << m.shift_col
                  << (m.flipped ? " flipped" : "") << ")";
    }
    std::cout << " ssim " << pr::format_double(m.ssim_value) << "\n";

    if (cfg.trace) {
        const std::string trace_path =
            (fs::path(cfg.output_dir) / ("trace_" + std::to_string(index) + ".csv")).string();
        std::ofstream tf(trace_path, std::ios::trunc);
        tf << "iteration,loss" << (out.result.psnr_trace.empty() ? "" : ",psnr_db") << "\n";
        for (std::size_t i = 0; i < out.result.loss_trace.size(); ++i) {
            tf << i << "," << pr::format_double(out.result.loss_trace[i]);
            if (!out.result.psnr_trace.empty())
                tf << "," << pr::format_double(out.result.psnr_trace[i]);
            tf << "\n";
        }
        std::cout << "trace (" << out.result.loss_trace.size() << " iterations) -> "
                  << trace_path << "\n";
    }
    std::cout << "wrote " << recon_path << "\n";
    return 0;
}

int cmd_benchmark(const CommonFlags& flags) {
    const pr::ExperimentConfig cfg = load_config(flags);
    pr::run_benchmark(cfg, &std::cout);
    return 0;
}

int cmd_inspect(const std::string& path) {
    const pr::GeneratorNet net = pr::load_weights(path);
    std::cout << path << ": " << net.depth() << " layers, latent " << net.latent_dim()
              << ", output " << net.output_dim() << "\n";
    long params = 0;
    for (pr::Index l = 1; l <= net.depth(); ++l) {
        const pr::DenseLayer& layer = net.layer(l);
        const char* act = "?";
        switch (layer.activation.kind) {
            case pr::Activation::Kind::Identity: act = "identity"; break;
            case pr::Activation::Kind::Relu: act = "relu"; break;
            case pr::Activation::Kind::LeakyRelu: act = "leaky_relu"; break;
            case pr::Activation::Kind::Sigmoid: act = "sigmoid"; break;
            case pr::Activation::Kind::Tanh: act = "tanh"; break;
        }
        std::cout << "  layer " << l << ": " << layer.in_dim() << " -> " << layer.out_dim()
                  << " " << act;
        if (layer.activation.kind == pr::Activation::Kind::LeakyRelu)
            std::cout << "(alpha=" << layer.activation.alpha << ")";
        std::cout << "\n";
        params += layer.weight.size() + layer.bias.size();
    }
    std::cout << "  parameters: " << params << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phaseprior: phase retrieval with generative priors"};
    app.require_subcommand(1);

    CommonFlags train_flags, solve_flags, bench_flags;
    long solve_index = 0;
    std::string inspect_path;

    CLI::App* train = app.add_subcommand("train", "train a VAE generator, write PRGW weights");
    add_common(train, train_flags);

    CLI::App* solve = app.add_subcommand("solve", "reconstruct a single image");
    add_common(solve, solve_flags);
    solve->add_option("--index", solve_index, "dataset image index")->capture_default_str();

    CLI::App* bench = app.add_subcommand("benchmark", "run a method over an image set");
    add_common(bench, bench_flags);

    CLI::App* inspect = app.add_subcommand("inspect-weights", "print a PRGW file's structure");
    inspect->add_option("path", inspect_path, "PRGW file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(train_flags);
        if (solve->parsed()) return cmd_solve(solve_flags, solve_index);
        if (bench->parsed()) return cmd_benchmark(bench_flags);
        if (inspect->parsed()) return cmd_inspect(inspect_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
