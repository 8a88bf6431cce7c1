#include "pcrd/optimizer.hpp"

#include "pcrd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <tuple>

namespace pcrd {

namespace {

void validate(const SolverConfig& c) {
    if (!(c.alpha > 1)) throw SolveError("solver config: alpha must exceed 1");
    if (!(c.rho0 > 0)) throw SolveError("solver config: rho0 must be positive");
    if (!(c.gamma > 0)) throw SolveError("solver config: gamma must be positive");
    if (!(c.qp_min < c.qp_max)) throw SolveError("solver config: qp_min must be below qp_max");
    if (c.max_outer < 1 || c.max_inner < 1)
        throw SolveError("solver config: iteration limits must be at least 1");
    if (!(c.feasibility_slack >= 0))
        throw SolveError("solver config: feasibility_slack must be non-negative");
}

std::string at_q(double q_g, double q_c) {
    return " at q_g=" + std::to_string(q_g) + ", q_c=" + std::to_string(q_c);
}

// lexicographic candidate ranking: distortion, then rate, then q_g, then q_c
struct Candidate {
    double D = std::numeric_limits<double>::infinity();
    double R = std::numeric_limits<double>::infinity();
    int q_g = 0, q_c = 0;
    bool valid = false;

    bool better_than(const Candidate& other) const {
        if (!other.valid) return true;
        return std::tie(D, R, q_g, q_c) < std::tie(other.D, other.R, other.q_g, other.q_c);
    }
};

}  // namespace

double augmented_lagrangian(const RdModels& models, double q_g, double q_c, double target_rate,
                            double lambda, double rho) {
    const double residual = eval_rate(models, q_g, q_c) - target_rate;
    return eval_distortion(models, q_g, q_c) + lambda * residual +
           0.5 * rho * residual * residual;
}

std::pair<double, double> inner_minimize(const RdModels& models, double q_g, double q_c,
                                         double target_rate, double lambda, double rho,
                                         const SolverConfig& config) {
    validate(config);
    double j_prev = augmented_lagrangian(models, q_g, q_c, target_rate, lambda, rho);
    if (!std::isfinite(j_prev)) throw SolveError("objective is non-finite" + at_q(q_g, q_c));

    for (long it = 0; it < config.max_inner; ++it) {
        const double residual = eval_rate(models, q_g, q_c) - target_rate;
        const auto [dD_g, dD_c] = grad_distortion(models, q_g, q_c);
        const auto [dR_g, dR_c] = grad_rate(models, q_g, q_c);
        const double scale = lambda + rho * residual;
        const double g_g = dD_g + scale * dR_g;
        const double g_c = dD_c + scale * dR_c;
        if (!std::isfinite(g_g) || !std::isfinite(g_c))
            throw SolveError("objective gradient is non-finite" + at_q(q_g, q_c));

        q_g = std::clamp(q_g - config.gamma * g_g, config.qp_min, config.qp_max);
        q_c = std::clamp(q_c - config.gamma * g_c, config.qp_min, config.qp_max);

        const double j = augmented_lagrangian(models, q_g, q_c, target_rate, lambda, rho);
        if (!std::isfinite(j)) throw SolveError("objective is non-finite" + at_q(q_g, q_c));
        if (j_prev - j < config.inner_tol) break;
        j_prev = j;
    }
    return {q_g, q_c};
}

SolveResult solve(const RdModels& models, double target_rate, const SolverConfig& config) {
    validate(config);
    if (!(target_rate > 0))
        throw InfeasibleError("infeasible budget: target rate must be positive, got " +
                              std::to_string(target_rate));
    const double coarsest = eval_rate(models, config.qp_max, config.qp_max);
    if (target_rate < coarsest)
        throw InfeasibleError("infeasible budget: target rate " + std::to_string(target_rate) +
                              " Mbps is below the model rate " + std::to_string(coarsest) +
                              " at the coarsest quantization");

    const double rate_cap = target_rate * (1 + config.feasibility_slack);

    SolveResult result;
    double lambda = config.lambda0;
    double rho = config.rho0;
    double q_g = std::clamp(config.q_init, config.qp_min, config.qp_max);
    double q_c = q_g;
    double j_prev = 0;

    for (int k = 0; k < config.max_outer; ++k) {
        std::tie(q_g, q_c) = inner_minimize(models, q_g, q_c, target_rate, lambda, rho, config);
        const double j = augmented_lagrangian(models, q_g, q_c, target_rate, lambda, rho);
        const double residual = eval_rate(models, q_g, q_c) - target_rate;
        result.trace.push_back({k, q_g, q_c, j, residual, lambda, rho});

        lambda += rho * residual;  // multiplier steps with the penalty it ran under
        rho *= config.alpha;

        if (k >= 1 && std::abs(j - j_prev) < config.outer_tol) {
            result.converged = true;
            break;
        }
        j_prev = j;
    }
    result.lambda_final = lambda;
    result.rho_final = rho;

    if (!result.converged) {
        // fall back to the best feasible iterate the trace saw
        double best_d = std::numeric_limits<double>::infinity();
        q_g = config.qp_max;
        q_c = config.qp_max;
        for (const auto& entry : result.trace) {
            if (eval_rate(models, entry.q_g, entry.q_c) > rate_cap) continue;
            const double d = eval_distortion(models, entry.q_g, entry.q_c);
            if (d < best_d) {
                best_d = d;
                q_g = entry.q_g;
                q_c = entry.q_c;
            }
        }
    }
    result.q_g_real = q_g;
    result.q_c_real = q_c;
    result.model_rate_real = eval_rate(models, q_g, q_c);
    result.model_distortion_real = eval_distortion(models, q_g, q_c);

    // round to the best feasible surrounding integer pair
    const int box_lo = int(std::ceil(config.qp_min));
    const int box_hi = int(std::floor(config.qp_max));
    auto clamp_qp = [&](double v) {
        return std::clamp(int(v), box_lo, box_hi);
    };
    std::set<std::pair<int, int>> corners;
    for (double g : {std::floor(q_g), std::ceil(q_g)})
        for (double c : {std::floor(q_c), std::ceil(q_c)})
            corners.insert({clamp_qp(g), clamp_qp(c)});

    Candidate best;
    auto consider = [&](int g, int c) {
        const double r = eval_rate(models, g, c);
        if (r > rate_cap) return;
        const Candidate cand{eval_distortion(models, g, c), r, g, c, true};
        if (cand.better_than(best)) best = cand;
    };
    for (const auto& [g, c] : corners) consider(g, c);
    if (!best.valid) {
        // no surrounding corner fits the budget; fall back to the full grid,
        // which always holds (qp_max, qp_max) thanks to the precheck
        for (int g = box_lo; g <= box_hi; ++g)
            for (int c = box_lo; c <= box_hi; ++c) consider(g, c);
    }
    if (!best.valid) throw SolveError("no feasible integer QP pair under the budget");

    result.q_g_star = best.q_g;
    result.q_c_star = best.q_c;
    result.model_rate_star = best.R;
    result.model_distortion_star = best.D;
    return result;
}

}  // namespace pcrd
