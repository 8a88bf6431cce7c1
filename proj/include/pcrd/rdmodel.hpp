#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace pcrd {

struct Measurement {
    int q_g = 0, q_c = 0;  // integer QPs in [2, 51]
    double D = 0;          // unified distortion, dimensionless
    double R = 0;          // bit-rate in Mbps
    std::optional<double> R_g, R_c;  // optional geometry/color split
};

// Additively separable models over real-valued QPs, coefficients stored in
// descending degree:
//   D(q_g, q_c) = A(q_g) + B(q_c)   quartic + quartic
//   R(q_g, q_c) = C(q_g) + E(q_c)   quadratic + cubic
// Both constant terms are kept, so the distortion model carries the anchor
// measurement twice by construction.
struct RdModels {
    std::array<double, 5> a{};  // a4..a0
    std::array<double, 5> b{};  // b4..b0
    std::array<double, 3> c{};  // c2..c0
    std::array<double, 4> d{};  // d3..d0
    int anchor_q_g = 0, anchor_q_c = 0;
};

// The nine pre-encoding pairs: a geometry sweep at q_c = 35, then the color
// sweep's remaining points at q_g = 30. The shared (30,35) anchor appears
// exactly once.
std::array<std::pair<int, int>, 9> preencode_schedule();

// Distortion quartics interpolate their five sweep points exactly; rate
// polynomials are least-squares fits over the same sweeps. Requires a
// geometry sweep (five distinct q_g at one q_c) and a color sweep (five
// distinct q_c at one q_g) sharing an anchor measurement.
RdModels fit(const std::vector<Measurement>& measurements);

double eval_distortion(const RdModels& m, double q_g, double q_c);
double eval_rate(const RdModels& m, double q_g, double q_c);

// Analytic partial derivatives (d/dq_g, d/dq_c).
std::pair<double, double> grad_distortion(const RdModels& m, double q_g, double q_c);
std::pair<double, double> grad_rate(const RdModels& m, double q_g, double q_c);

}  // namespace pcrd
