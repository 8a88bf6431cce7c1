#include "pcrd/pipeline.hpp"

#include "pcrd/errors.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>

namespace pcrd {

namespace {

// rethrows stage failures with the stage named, preserving the error type
template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    auto prefixed = [&](const Error& e) { return std::string(name) + ": " + e.what(); };
    try {
        return fn();
    } catch (const ParseError& e) {
        throw ParseError(prefixed(e));
    } catch (const FitError& e) {
        throw FitError(prefixed(e));
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(prefixed(e));
    } catch (const SolveError& e) {
        throw SolveError(prefixed(e));
    } catch (const InternalError& e) {
        throw InternalError(prefixed(e));
    }
}

}  // namespace

PipelineResult run_pipeline(const PointCloud& cloud, const std::vector<double>& target_rates,
                            const ProxyCodecConfig& proxy, const SolverConfig& solver,
                            const MetricsConfig& metrics) {
    PipelineResult out;
    out.sweep = stage("sweep", [&] { return preencode_sweep(cloud, proxy, metrics); });
    out.models = stage("fit", [&] { return fit(out.sweep); });

    for (const double target : target_rates) {
        SolveResult res = stage("optimize", [&] { return solve(out.models, target, solver); });
        const auto [q_g, q_c] = std::pair{res.q_g_star, res.q_c_star};
        const EncodeResult enc =
            stage("encode", [&] { return encode_decode(cloud, q_g, q_c, proxy); });
        const DistortionReport rep =
            stage("measure", [&] { return full_report(cloud, enc.decoded, metrics); });

        PipelineRow row;
        row.target_rate = target;
        row.achieved_rate = res.model_rate_star;
        row.q_g = q_g;
        row.q_c = q_c;
        row.D = rep.D;
        row.pc_psnr = rep.pc_psnr;
        out.rows.push_back(row);
        out.solves.push_back(std::move(res));
    }
    return out;
}

std::string pipeline_to_csv(const std::vector<PipelineRow>& rows) {
    std::string text = "target_rate,achieved_rate,q_g,q_c,D,pc_psnr\n";
    char buf[512];
    for (const auto& r : rows) {
        // %.17g renders an infinite pc_psnr as "inf", matching the JSON sentinel
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%d,%.17g,%.17g\n", r.target_rate,
                      r.achieved_rate, r.q_g, r.q_c, r.D, r.pc_psnr);
        text += buf;
    }
    return text;
}

void write_pipeline_csv(const std::string& path, const std::vector<PipelineRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << pipeline_to_csv(rows);
    if (!out) throw ParseError("write failed: " + path);
}

}  // namespace pcrd
