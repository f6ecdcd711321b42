#include "pr/pgd.hpp"

#include <cmath>

namespace pr {

PgdResult pgd(const LossGradFn& f, const Vec& x0, const L1Ball& ball, const PgdSettings& settings,
              const PgdObserver& observer) {
    if (x0.size() != ball.center.size())
        throw ShapeError("pgd: x0 length " + std::to_string(x0.size()) + " vs ball dimension " +
                         std::to_string(ball.center.size()));

    Rng noise_rng(settings.seed);
    PgdResult res;
    res.best = x0;
    res.best_loss = std::numeric_limits<double>::infinity();
    if (settings.record_trace) res.trace.reserve(static_cast<std::size_t>(settings.steps) + 1);

    Vec x = x0;
    for (long k = 0; k <= settings.steps; ++k) {
        res.audit.checked++;
        if (!ball.contains(x)) res.audit.violations++;

        auto [loss, grad] = f(x);
        res.evaluations++;
        if (std::isnan(loss) || !grad.allFinite())
            throw DivergenceError("pgd: objective returned NaN", k);
        if (settings.record_trace) res.trace.push_back(loss);
        if (observer) observer(k, x, loss);
        if (loss < res.best_loss) {
            res.best_loss = loss;
            res.best = x;
        }
        if (k == settings.steps) break;

        if (settings.noise.enabled) {
            const double sigma = std::sqrt(noise_variance(settings.noise, k));
            for (Index i = 0; i < grad.size(); ++i) grad[i] += sigma * noise_rng.normal();
        }
        x = project_l1(x - settings.step_size * grad, ball);
    }
    res.final = std::move(x);
    return res;
}

}  // namespace pr
