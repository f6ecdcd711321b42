#ifndef PR_SOLVERS_HPP
#define PR_SOLVERS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "pr/generator.hpp"
#include "pr/measurement.hpp"
#include "pr/pgd.hpp"

namespace pr {

struct ReconstructionResult {
    Vec image;
    Vec registered_image;  // filled by the harness when registration is enabled
    Vec z0_final;
    double magnitude_loss = 0.0;
    int restart_index = 0;
    std::vector<double> loss_trace;  // per-iteration magnitude losses (opt-in)
    std::vector<double> psnr_trace;  // per-iteration PSNR vs a reference (opt-in)
    std::vector<double> restart_losses;  // per-restart final losses (NaN = failed restart)
    double wall_ms = 0.0;
    FeasibilityAudit audit;
    long total_iterations = 0;
};

/// Per-iterate tracing: loss is always recorded when `record` is set; with a
/// reference image each traced iterate additionally records PSNR.
struct TraceOptions {
    bool record = false;
    const Vec* reference = nullptr;
};

// --- Classical Fienup solvers (Fourier measurements only) -------------------

/// Magnitude substitution: Re(idft2(y .* phase(dft2(x)))); a vanishing
/// input spectrum entry keeps phase factor 1.
Vec fourier_magnitude_substitute(const Vec& x, const Vec& y, const Shape2D& shape);

/// Error reduction: x <- clamp_[0,1](substitute(x)). Returns the final iterate.
ReconstructionResult er(const Vec& y, const Shape2D& shape, long iters, const Vec& x0,
                        const TraceOptions& trace = {});

/// Hybrid input-output with feedback beta; image-constraint violators update
/// as x - beta*x'. Returns the iterate with the lowest magnitude loss.
ReconstructionResult hio(const Vec& y, const Shape2D& shape, long iters, double beta,
                         const Vec& x0, const TraceOptions& trace = {});

// --- Generative solvers ------------------------------------------------------

/// Latent-only baseline: minimize || |A G(z)| - y ||^2 over z via pgd,
/// optionally inside an l1-ball of the given radius around z0_init
/// (unbounded by default). Reconstruction is G(z_best).
ReconstructionResult dpr_solve(const MeasurementOperator& op, const Vec& y,
                               const GeneratorNet& net, const Vec& z0_init,
                               const PgdSettings& settings,
                               double radius = std::numeric_limits<double>::infinity(),
                               const TraceOptions& trace = {});

/// One intermediate-layer pass: forward optimization of z_i, back-projection
/// to a latent, refinement of the latent.
struct PriloPhase {
    Index target_layer = 1;  // i; requires i < network depth
    int repetitions = 1;
    long stepA_steps = 150;
    double stepA_radius = 50.0;   // r_i
    long stepB_steps = 100;
    double stepB_radius = 100.0;  // s_i
    long stepC_steps = 100;
    double stepC_radius = 100.0;  // r_0
    bool back_projection = true;  // step B toggle (ablations)
    bool refinement = true;       // step C toggle (ablations)
};

struct PriloConfig {
    long init_steps = 150;
    double init_radius = 100.0;
    std::vector<PriloPhase> phases;
    double step_size_latent = 0.1;   // z0 phases: init, B, C
    double step_size_hidden = 0.01;  // intermediate-representation phase: A
    NoiseSchedule noise;
    bool noise_step_a = true;
    bool noise_step_b = true;
    bool noise_step_c = true;

    void validate(Index net_depth) const;
};

/// Phase log entry for schedule auditing: which variable was optimized.
struct PriloEvent {
    char step = 0;        // 'I' init, 'A', 'B', 'C'
    Index layer = 0;      // 0 for latent-space steps
    long iterations = 0;
};

ReconstructionResult prilo_solve(const MeasurementOperator& op, const Vec& y,
                                 const GeneratorNet& net, const Vec& z0_init,
                                 const PriloConfig& config, Seed seed,
                                 const TraceOptions& trace = {},
                                 std::vector<PriloEvent>* events = nullptr);

// --- Restarts ----------------------------------------------------------------

using SolverCall = std::function<ReconstructionResult(Seed restart_seed, int restart_index)>;

/// Runs `restarts` independent initializations with seeds derived from the
/// base seed; returns the result with the lowest magnitude loss (lowest index
/// wins ties). Throws AggregateError only if every restart failed.
ReconstructionResult run_with_restarts(const SolverCall& solver_call, int restarts, Seed seed);

}  // namespace pr

#endif
