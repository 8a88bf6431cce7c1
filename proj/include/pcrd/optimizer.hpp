#pragma once

#include "pcrd/rdmodel.hpp"

#include <utility>
#include <vector>

namespace pcrd {

struct SolverConfig {
    double alpha = 1.5;       // penalty growth per outer iteration
    double rho0 = 50.0;       // initial penalty
    double lambda0 = 0.0;     // initial multiplier
    double gamma = 0.001;     // inner gradient step size
    double outer_tol = 0.3;   // outer stop: |change in J|
    double inner_tol = 0.3;   // inner stop: per-step J decrement
    double qp_min = 2.0;
    double qp_max = 51.0;
    double q_init = 51.0;     // both QPs start here
    int max_outer = 100;
    long max_inner = 100000;
    // integer results may exceed the budget by this relative slack
    double feasibility_slack = 0.01;
};

// One outer iteration: the iterate the inner solver returned, the augmented
// objective there, and the multiplier/penalty values it was solved under.
struct TraceEntry {
    int outer = 0;
    double q_g = 0, q_c = 0;
    double J = 0;
    double residual = 0;  // model rate minus target at (q_g, q_c)
    double lambda = 0;
    double rho = 0;
};

struct SolveResult {
    int q_g_star = 0, q_c_star = 0;      // rounded selection
    double q_g_real = 0, q_c_real = 0;   // continuous iterate before rounding
    double model_rate_star = 0, model_distortion_star = 0;
    double model_rate_real = 0, model_distortion_real = 0;
    double lambda_final = 0, rho_final = 0;
    bool converged = false;
    std::vector<TraceEntry> trace;
};

// J = D(q) + lambda (R(q) - target) + (rho/2) (R(q) - target)^2. The rate
// residual enters without a hinge, so slack budgets drive lambda negative.
double augmented_lagrangian(const RdModels& models, double q_g, double q_c, double target_rate,
                            double lambda, double rho);

// Gradient descent on J from (q_g, q_c), each coordinate clamped to the QP
// box after every step; stops once the per-step decrement of J falls below
// inner_tol. Throws SolveError when J or its gradient goes non-finite.
std::pair<double, double> inner_minimize(const RdModels& models, double q_g, double q_c,
                                         double target_rate, double lambda, double rho,
                                         const SolverConfig& config = {});

// Multiplier-update outer loop around inner_minimize, then rounding to the
// best feasible surrounding integer pair. Throws InfeasibleError when the
// budget is non-positive or below the model rate at (qp_max, qp_max).
SolveResult solve(const RdModels& models, double target_rate, const SolverConfig& config = {});

}  // namespace pcrd
