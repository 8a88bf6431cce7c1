#pragma once

#include "pcrd/codec_proxy.hpp"
#include "pcrd/metrics.hpp"
#include "pcrd/optimizer.hpp"
#include "pcrd/pointcloud.hpp"
#include "pcrd/rdmodel.hpp"

#include <string>
#include <vector>

namespace pcrd {

// One rate-distortion operating point: the budget, the model rate of the
// selected QPs (the solver's feasibility contract), and the distortion
// measured on the actual re-encode.
struct PipelineRow {
    double target_rate = 0;
    double achieved_rate = 0;
    int q_g = 0, q_c = 0;
    double D = 0;
    double pc_psnr = 0;
};

struct PipelineResult {
    std::vector<Measurement> sweep;
    RdModels models;
    std::vector<SolveResult> solves;  // one per target, same order
    std::vector<PipelineRow> rows;
};

// sweep -> fit -> solve per budget -> re-encode at the selected QPs ->
// measure. Errors from a stage are rethrown with the stage name prefixed,
// keeping their type (and so the CLI exit code).
PipelineResult run_pipeline(const PointCloud& cloud, const std::vector<double>& target_rates,
                            const ProxyCodecConfig& proxy = {}, const SolverConfig& solver = {},
                            const MetricsConfig& metrics = {});

// CSV: target_rate,achieved_rate,q_g,q_c,D,pc_psnr (pc_psnr may be "inf"),
// doubles printed with 17 significant digits
std::string pipeline_to_csv(const std::vector<PipelineRow>& rows);
void write_pipeline_csv(const std::string& path, const std::vector<PipelineRow>& rows);

}  // namespace pcrd
