#include "pr/solvers.hpp"

#include <chrono>
#include <cmath>

#include "pr/metrics.hpp"

namespace pr {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Vec clamp01(const Vec& x) { return x.cwiseMax(0.0).cwiseMin(1.0); }

void require_fourier_inputs(const Vec& y, const Shape2D& shape, const Vec& x0) {
    if (y.size() != shape.size())
        throw ShapeError("fourier solver: y length " + std::to_string(y.size()) +
                         " does not match shape product " + std::to_string(shape.size()));
    require_length(x0, shape.size(), "fourier solver: x0");
}

}  // namespace

Vec fourier_magnitude_substitute(const Vec& x, const Vec& y, const Shape2D& shape) {
    const CVec c = dft2(x, shape);
    CVec replaced(c.size());
    for (Index j = 0; j < c.size(); ++j) {
        const double mag = std::abs(c[j]);
        replaced[j] = (mag > 0.0) ? y[j] * (c[j] / mag) : std::complex<double>(y[j], 0.0);
    }
    return idft2(replaced, shape).real();
}

ReconstructionResult er(const Vec& y, const Shape2D& shape, long iters, const Vec& x0,
                        const TraceOptions& trace) {
    require_fourier_inputs(y, shape, x0);
    const auto t0 = Clock::now();

    ReconstructionResult res;
    Vec x = clamp01(x0);
    for (long t = 0; t <= iters; ++t) {
        const double loss = (dft2(x, shape).cwiseAbs() - y).squaredNorm();
        res.total_iterations++;
        if (trace.record) {
            res.loss_trace.push_back(loss);
            if (trace.reference) res.psnr_trace.push_back(psnr(x, *trace.reference));
        }
        res.magnitude_loss = loss;
        if (t == iters) break;
        x = clamp01(fourier_magnitude_substitute(x, y, shape));
    }
    res.image = std::move(x);
    res.wall_ms = elapsed_ms(t0);
    return res;
}

ReconstructionResult hio(const Vec& y, const Shape2D& shape, long iters, double beta,
                         const Vec& x0, const TraceOptions& trace) {
    require_fourier_inputs(y, shape, x0);
    const auto t0 = Clock::now();

    ReconstructionResult res;
    res.magnitude_loss = std::numeric_limits<double>::infinity();
    Vec x = x0;
    for (long t = 0; t <= iters; ++t) {
        const double loss = (dft2(x, shape).cwiseAbs() - y).squaredNorm();
        res.total_iterations++;
        if (trace.record) {
            res.loss_trace.push_back(loss);
            if (trace.reference) res.psnr_trace.push_back(psnr(x, *trace.reference));
        }
        if (loss < res.magnitude_loss) {
            res.magnitude_loss = loss;
            res.image = x;
        }
        if (t == iters) break;

        const Vec sub = fourier_magnitude_substitute(x, y, shape);
        Vec next(x.size());
        for (Index i = 0; i < x.size(); ++i) {
            const bool feasible = sub[i] >= 0.0 && sub[i] <= 1.0;
            next[i] = feasible ? sub[i] : x[i] - beta * sub[i];
        }
        x = std::move(next);
    }
    res.wall_ms = elapsed_ms(t0);
    return res;
}

// ---------------------------------------------------------------------------
// Generative solvers

namespace {

// || |A G_first^k(z)| - y ||^2 with its gradient via the subnetwork VJP.
LossGradFn measurement_objective(const MeasurementOperator& op, const Vec& y,
                                 const GeneratorNet& net, Index first_layer) {
    const Index k = net.depth();
    return [&op, &y, &net, first_layer, k](const Vec& z) -> std::pair<double, Vec> {
        auto [out, tr] = forward_sub(net, first_layer, k, z);
        auto [loss, image_grad] = magnitude_loss_and_grad(op, out, y);
        return {loss, vjp_sub(net, first_layer, k, tr, image_grad)};
    };
}

// PSNR tracing needs the image behind each iterate; first_layer identifies
// which subnetwork maps the iterate to an image.
PgdObserver make_observer(ReconstructionResult& res, const TraceOptions& trace,
                          const GeneratorNet& net, Index first_layer) {
    if (!trace.record) return nullptr;
    const Vec* ref = trace.reference;
    return [&res, ref, &net, first_layer](long, const Vec& z, double loss) {
        res.loss_trace.push_back(loss);
        if (ref) {
            const Vec img = forward_sub(net, first_layer, net.depth(), z).first;
            res.psnr_trace.push_back(psnr(img, *ref));
        }
    };
}

void absorb(ReconstructionResult& res, const PgdResult& r) {
    res.audit.merge(r.audit);
    res.total_iterations += r.evaluations;
}

}  // namespace

ReconstructionResult dpr_solve(const MeasurementOperator& op, const Vec& y,
                               const GeneratorNet& net, const Vec& z0_init,
                               const PgdSettings& settings, double radius,
                               const TraceOptions& trace) {
    require_length(z0_init, net.latent_dim(), "dpr_solve: z0_init");
    const auto t0 = Clock::now();

    ReconstructionResult res;
    const L1Ball ball(z0_init, radius);
    const PgdResult r =
        pgd(measurement_objective(op, y, net, 1), z0_init, ball, settings,
            make_observer(res, trace, net, 1));
    absorb(res, r);
    res.z0_final = r.best;
    res.image = forward(net, r.best).first;
    res.magnitude_loss = r.best_loss;
    res.wall_ms = elapsed_ms(t0);
    return res;
}

void PriloConfig::validate(Index net_depth) const {
    if (init_steps < 0) throw ConfigError("prilo: init_steps must be nonnegative");
    if (!(init_radius > 0.0)) throw ConfigError("prilo: init_radius must be positive");
    Index prev_layer = 1;
    for (std::size_t p = 0; p < phases.size(); ++p) {
        const PriloPhase& ph = phases[p];
        if (ph.target_layer < 1 || ph.target_layer >= net_depth)
            throw ConfigError("prilo: phase " + std::to_string(p) + " targets layer " +
                              std::to_string(ph.target_layer) + ", needs 1 <= i < depth " +
                              std::to_string(net_depth));
        if (ph.target_layer < prev_layer)
            throw ConfigError("prilo: phases must target layers left to right");
        if (ph.repetitions < 1) throw ConfigError("prilo: repetitions must be >= 1");
        if (!(ph.stepA_radius > 0.0) || !(ph.stepB_radius > 0.0) || !(ph.stepC_radius > 0.0))
            throw ConfigError("prilo: phase radii must be positive");
        if (ph.stepA_steps < 0 || ph.stepB_steps < 0 || ph.stepC_steps < 0)
            throw ConfigError("prilo: phase step counts must be nonnegative");
        prev_layer = ph.target_layer;
    }
}

ReconstructionResult prilo_solve(const MeasurementOperator& op, const Vec& y,
                                 const GeneratorNet& net, const Vec& z0_init,
                                 const PriloConfig& config, Seed seed,
                                 const TraceOptions& trace, std::vector<PriloEvent>* events) {
    config.validate(net.depth());
    require_length(z0_init, net.latent_dim(), "prilo_solve: z0_init");
    const auto t0 = Clock::now();
    const Index k = net.depth();

    ReconstructionResult res;
    long pgd_calls = 0;
    auto next_seed = [&]() { return derive_seed(seed, static_cast<std::uint64_t>(pgd_calls++)); };
    auto noise_for = [&](bool step_flag) {
        NoiseSchedule n = config.noise;
        n.enabled = n.enabled && step_flag;
        return n;
    };
    auto log_event = [&](char step, Index layer, long iterations) {
        if (events) events->push_back({step, layer, iterations});
    };

    // Pipeline state: representation `cur` feeding layer cur_layer + 1.
    // Back-projection returns the state to the latent; without it the state
    // stays at the optimized intermediate layer.
    Vec z0 = z0_init;
    Index cur_layer = 0;
    Vec cur = z0_init;

    // Best full-pipeline reconstruction seen at any stage boundary.
    Vec best_image;
    double best_loss = std::numeric_limits<double>::infinity();
    Vec best_z0 = z0_init;
    auto offer = [&](const Vec& image, double loss, const Vec& z0_at) {
        if (loss < best_loss) {
            best_loss = loss;
            best_image = image;
            best_z0 = z0_at;
        }
    };

    // Initial latent optimization.
    if (config.init_steps > 0) {
        PgdSettings s{config.init_steps, config.step_size_latent, config.noise, next_seed(),
                      trace.record};
        const PgdResult r = pgd(measurement_objective(op, y, net, 1), z0, L1Ball(z0, config.init_radius),
                                s, make_observer(res, trace, net, 1));
        absorb(res, r);
        log_event('I', 0, r.evaluations);
        z0 = r.best;
        cur = z0;
        offer(forward(net, z0).first, r.best_loss, z0);
    } else {
        const Vec img = forward(net, z0).first;
        offer(img, magnitude_loss(op, img, y), z0);
    }

    for (const PriloPhase& phase : config.phases) {
        const Index i = phase.target_layer;
        for (int rep = 0; rep < phase.repetitions; ++rep) {
            if (cur_layer > i)
                throw ConfigError("prilo: phase targets layer " + std::to_string(i) +
                                  " behind the current state at layer " +
                                  std::to_string(cur_layer));

            // Representation z_i re-centered on the current state.
            const Vec z_i = (cur_layer == i) ? cur
                                             : forward_sub(net, cur_layer + 1, i, cur).first;

            // Step A: forward optimization of z_i through the tail subnetwork.
            Vec z_i_star = z_i;
            double a_loss;
            {
                PgdSettings s{phase.stepA_steps, config.step_size_hidden,
                              noise_for(config.noise_step_a), next_seed(), trace.record};
                const PgdResult r = pgd(measurement_objective(op, y, net, i + 1), z_i,
                                        L1Ball(z_i, phase.stepA_radius), s,
                                        make_observer(res, trace, net, i + 1));
                absorb(res, r);
                log_event('A', i, r.evaluations);
                z_i_star = r.best;
                a_loss = r.best_loss;
            }

            if (!phase.back_projection) {
                cur_layer = i;
                cur = z_i_star;
                offer(forward_sub(net, i + 1, k, z_i_star).first, a_loss, z0);
                continue;
            }

            // Step B: find a latent whose i-th representation approximates z_i*.
            Vec z0_bar;
            {
                const L1Ball ball(Vec::Zero(net.latent_dim()), phase.stepB_radius);
                const Vec start = project_l1(z0, ball);
                auto objective = [&net, i, &z_i_star](const Vec& z) -> std::pair<double, Vec> {
                    auto [out, tr] = forward_sub(net, 1, i, z);
                    const Vec residual = out - z_i_star;
                    return {residual.squaredNorm(), vjp_sub(net, 1, i, tr, 2.0 * residual)};
                };
                PgdSettings s{phase.stepB_steps, config.step_size_latent,
                              noise_for(config.noise_step_b), next_seed(), trace.record};
                const PgdResult r = pgd(objective, start, ball, s,
                                        make_observer(res, trace, net, 1));
                absorb(res, r);
                log_event('B', 0, r.evaluations);
                z0_bar = r.best;
            }

            if (phase.refinement) {
                // Step C: refine the latent inside a ball around the back-projection.
                PgdSettings s{phase.stepC_steps, config.step_size_latent,
                              noise_for(config.noise_step_c), next_seed(), trace.record};
                const PgdResult r = pgd(measurement_objective(op, y, net, 1), z0_bar,
                                        L1Ball(z0_bar, phase.stepC_radius), s,
                                        make_observer(res, trace, net, 1));
                absorb(res, r);
                log_event('C', 0, r.evaluations);
                z0 = r.best;
                offer(forward(net, z0).first, r.best_loss, z0);
            } else {
                z0 = z0_bar;
                const Vec img = forward(net, z0).first;
                offer(img, magnitude_loss(op, img, y), z0);
            }
            cur_layer = 0;
            cur = z0;
        }
    }

    res.image = std::move(best_image);
    res.z0_final = std::move(best_z0);
    res.magnitude_loss = best_loss;
    res.wall_ms = elapsed_ms(t0);
    return res;
}

ReconstructionResult run_with_restarts(const SolverCall& solver_call, int restarts, Seed seed) {
    if (restarts < 1) throw DimensionError("run_with_restarts: restarts must be >= 1");

    ReconstructionResult best;
    bool have_result = false;
    FeasibilityAudit audit;
    long iterations = 0;
    double wall_ms = 0.0;
    std::vector<double> losses;
    std::string failures;

    for (int idx = 0; idx < restarts; ++idx) {
        const Seed restart_seed = derive_seed(seed, static_cast<std::uint64_t>(idx));
        try {
            ReconstructionResult r = solver_call(restart_seed, idx);
            audit.merge(r.audit);
            iterations += r.total_iterations;
            wall_ms += r.wall_ms;
            losses.push_back(r.magnitude_loss);
            if (!have_result || r.magnitude_loss < best.magnitude_loss) {
                best = std::move(r);
                best.restart_index = idx;
            }
            have_result = true;
        } catch (const Error& e) {
            losses.push_back(std::numeric_limits<double>::quiet_NaN());
            failures += (failures.empty() ? "" : "; ") + std::string(e.what());
        }
    }
    if (!have_result) throw AggregateError("run_with_restarts: all restarts failed: " + failures);

    best.audit = audit;
    best.total_iterations = iterations;
    best.wall_ms = wall_ms;
    best.restart_losses = std::move(losses);
    return best;
}

}  // namespace pr
