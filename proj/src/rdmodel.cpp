#include "pcrd/rdmodel.hpp"

#include "pcrd/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace pcrd {

namespace {

// Solves for polynomial coefficients on the QP range after centering and
// scaling the abscissas to [-1, 1]; a raw Vandermonde up to q^4 at q = 51
// would be conditioned too badly for the exact-interpolation contract. The
// solution is mapped back to raw-basis coefficients afterwards.
std::vector<double> fit_poly(const std::vector<double>& qs, const std::vector<double>& ys,
                             int degree, const char* what) {
    const auto [lo_it, hi_it] = std::minmax_element(qs.begin(), qs.end());
    const double mid = (*lo_it + *hi_it) / 2.0;
    const double half = (*hi_it - *lo_it) / 2.0;
    if (half == 0) throw FitError(std::string(what) + ": sweep points are collinear");

    const int m = degree + 1;
    Eigen::MatrixXd V(qs.size(), m);
    Eigen::VectorXd y(qs.size());
    for (std::size_t r = 0; r < qs.size(); ++r) {
        const double t = (qs[r] - mid) / half;
        double pw = 1;
        for (int j = 0; j < m; ++j) {
            V(r, j) = pw;  // ascending in t
            pw *= t;
        }
        y(r) = ys[r];
    }
    const Eigen::VectorXd scaled = V.colPivHouseholderQr().solve(y);
    if (!scaled.allFinite()) throw FitError(std::string(what) + ": singular fit system");

    // expand sum_k scaled[k] ((q - mid)/half)^k into raw ascending powers
    std::vector<double> raw(m, 0.0), pw{1.0};
    for (int k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < pw.size(); ++i) raw[i] += scaled(k) * pw[i];
        if (k + 1 < m) {
            std::vector<double> next(pw.size() + 1, 0.0);
            for (std::size_t i = 0; i < pw.size(); ++i) {
                next[i] += pw[i] * (-mid / half);
                next[i + 1] += pw[i] / half;
            }
            pw = std::move(next);
        }
    }
    std::vector<double> descending(m);
    for (int i = 0; i < m; ++i) descending[i] = raw[m - 1 - i];
    return descending;
}

template <std::size_t N>
double horner(const std::array<double, N>& coeffs, double x) {
    double acc = 0;
    for (double c : coeffs) acc = acc * x + c;
    return acc;
}

template <std::size_t N>
double horner_derivative(const std::array<double, N>& coeffs, double x) {
    double acc = 0;
    for (std::size_t i = 0; i + 1 < N; ++i) acc = acc * x + coeffs[i] * double(N - 1 - i);
    return acc;
}

struct Sweep {
    std::vector<double> qs, Ds, Rs;
    int fixed_qp = 0;  // the QP held constant across the sweep
};

// Collects the sweep that varies `varying` while `fixed` stays at one value
// appearing with at least five distinct varying QPs.
Sweep extract_sweep(const std::vector<Measurement>& ms, int Measurement::*varying,
                    int Measurement::*fixed, const char* name) {
    std::map<int, std::map<int, const Measurement*>> by_fixed;
    for (const auto& m : ms) {
        auto& slot = by_fixed[m.*fixed][m.*varying];
        if (slot && (slot->D != m.D || slot->R != m.R))
            throw FitError(std::string(name) + " sweep: contradictory duplicate at q=" +
                           std::to_string(m.*varying));
        slot = &m;
    }
    const std::map<int, const Measurement*>* best = nullptr;
    int best_fixed = 0;
    for (const auto& [fx, rows] : by_fixed) {
        if (rows.size() >= 5 && (!best || rows.size() > best->size())) {
            best = &rows;
            best_fixed = fx;
        }
    }
    if (!best)
        throw FitError(std::string("missing ") + name +
                       " sweep: need five distinct QPs at a shared operating point");
    Sweep s;
    s.fixed_qp = best_fixed;
    for (const auto& [q, m] : *best) {
        s.qs.push_back(q);
        s.Ds.push_back(m->D);
        s.Rs.push_back(m->R);
    }
    return s;
}

}  // namespace

std::array<std::pair<int, int>, 9> preencode_schedule() {
    return {{{33, 35}, {30, 35}, {26, 35}, {20, 35}, {15, 35},
             {30, 38}, {30, 31}, {30, 26}, {30, 20}}};
}

RdModels fit(const std::vector<Measurement>& measurements) {
    for (const auto& m : measurements) {
        if (m.q_g < 2 || m.q_g > 51 || m.q_c < 2 || m.q_c > 51)
            throw FitError("measurement QP outside [2, 51]");
        if (!(m.D >= 0) || !(m.R > 0)) throw FitError("measurement with D < 0 or R <= 0");
    }

    const Sweep geom = extract_sweep(measurements, &Measurement::q_g, &Measurement::q_c,
                                     "geometry");
    const Sweep color = extract_sweep(measurements, &Measurement::q_c, &Measurement::q_g,
                                      "color");

    // the sweeps must cross at a shared anchor measurement
    const bool geom_covers_anchor =
        std::find(geom.qs.begin(), geom.qs.end(), double(color.fixed_qp)) != geom.qs.end();
    const bool color_covers_anchor =
        std::find(color.qs.begin(), color.qs.end(), double(geom.fixed_qp)) != color.qs.end();
    if (!geom_covers_anchor || !color_covers_anchor)
        throw FitError("sweeps do not share an anchor measurement");

    RdModels m;
    m.anchor_q_g = color.fixed_qp;
    m.anchor_q_c = geom.fixed_qp;

    const auto a = fit_poly(geom.qs, geom.Ds, 4, "geometry distortion");
    const auto b = fit_poly(color.qs, color.Ds, 4, "color distortion");
    const auto c = fit_poly(geom.qs, geom.Rs, 2, "geometry rate");
    const auto d = fit_poly(color.qs, color.Rs, 3, "color rate");
    std::copy(a.begin(), a.end(), m.a.begin());
    std::copy(b.begin(), b.end(), m.b.begin());
    std::copy(c.begin(), c.end(), m.c.begin());
    std::copy(d.begin(), d.end(), m.d.begin());
    return m;
}

double eval_distortion(const RdModels& m, double q_g, double q_c) {
    return horner(m.a, q_g) + horner(m.b, q_c);
}

double eval_rate(const RdModels& m, double q_g, double q_c) {
    return horner(m.c, q_g) + horner(m.d, q_c);
}

std::pair<double, double> grad_distortion(const RdModels& m, double q_g, double q_c) {
    return {horner_derivative(m.a, q_g), horner_derivative(m.b, q_c)};
}

std::pair<double, double> grad_rate(const RdModels& m, double q_g, double q_c) {
    return {horner_derivative(m.c, q_g), horner_derivative(m.d, q_c)};
}

}  // namespace pcrd
