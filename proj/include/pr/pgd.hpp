#ifndef PR_PGD_HPP
#define PR_PGD_HPP

#include <functional>
#include <vector>

#include "pr/projection.hpp"
#include "pr/rng.hpp"
#include "pr/types.hpp"

namespace pr {

/// Decaying Gaussian gradient noise u^(k) ~ N(0, sigma_k^2 I) with
/// sigma_k^2 = eta / (1 + k)^gamma; k restarts at 0 for every pgd call.
struct NoiseSchedule {
    double eta = 0.02;
    double gamma = 0.55;
    bool enabled = false;

    static NoiseSchedule off() { return {0.0, 0.0, false}; }
    static NoiseSchedule on(double eta = 0.02, double gamma = 0.55) { return {eta, gamma, true}; }
};

inline double noise_variance(const NoiseSchedule& s, long k) {
    return s.eta / std::pow(1.0 + static_cast<double>(k), s.gamma);
}

struct PgdSettings {
    long steps = 0;
    double step_size = 0.1;
    NoiseSchedule noise;
    Seed seed;
    bool record_trace = false;
};

/// Running count of ball-constraint checks over every visited iterate.
struct FeasibilityAudit {
    long checked = 0;
    long violations = 0;

    void merge(const FeasibilityAudit& o) {
        checked += o.checked;
        violations += o.violations;
    }
};

struct PgdResult {
    Vec best;          // iterate with the lowest observed loss (x0 included)
    double best_loss = 0.0;
    Vec final;         // last iterate, for callers that chain runs
    std::vector<double> trace;  // per-iterate losses when record_trace is set
    long evaluations = 0;
    FeasibilityAudit audit;
};

using LossGradFn = std::function<std::pair<double, Vec>(const Vec&)>;

/// Observer invoked once per iterate with (iteration, point, loss).
using PgdObserver = std::function<void(long, const Vec&, double)>;

/// Projected gradient descent on f within an l1-ball:
///   x^{k+1} = P(x^k - alpha * (grad f(x^k) + u^k)).
/// x0 must already be feasible. Returns the best iterate seen.
PgdResult pgd(const LossGradFn& f, const Vec& x0, const L1Ball& ball, const PgdSettings& settings,
              const PgdObserver& observer = nullptr);

}  // namespace pr

#endif
