#include "pcrd/serialize.hpp"

#include "pcrd/errors.hpp"

#include <cmath>
#include <limits>

namespace pcrd {

namespace {

nlohmann::json encode_maybe_infinite(double v) {
    if (std::isinf(v) && v > 0) return "inf";
    return v;
}

double decode_maybe_infinite(const nlohmann::json& j, const char* field) {
    const auto& v = j.at(field);
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw ParseError(std::string("field ") + field + ": expected a number or \"inf\"");
    }
    return v.get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const DistortionReport& r) {
    j = nlohmann::json{{"d_g", r.d_g},
                       {"d_p", r.d_p},
                       {"d_cY", r.d_cY},
                       {"d_cU", r.d_cU},
                       {"d_cV", r.d_cV},
                       {"d_c", r.d_c},
                       {"D", r.D},
                       {"pc_psnr", encode_maybe_infinite(r.pc_psnr)},
                       {"d_g_a_to_b", r.d_g_a_to_b},
                       {"d_g_b_to_a", r.d_g_b_to_a},
                       {"d_c_a_to_b", r.d_c_a_to_b},
                       {"d_c_b_to_a", r.d_c_b_to_a}};
}

void from_json(const nlohmann::json& j, DistortionReport& r) {
    j.at("d_g").get_to(r.d_g);
    j.at("d_p").get_to(r.d_p);
    j.at("d_cY").get_to(r.d_cY);
    j.at("d_cU").get_to(r.d_cU);
    j.at("d_cV").get_to(r.d_cV);
    j.at("d_c").get_to(r.d_c);
    j.at("D").get_to(r.D);
    r.pc_psnr = decode_maybe_infinite(j, "pc_psnr");
    j.at("d_g_a_to_b").get_to(r.d_g_a_to_b);
    j.at("d_g_b_to_a").get_to(r.d_g_b_to_a);
    j.at("d_c_a_to_b").get_to(r.d_c_a_to_b);
    j.at("d_c_b_to_a").get_to(r.d_c_b_to_a);
}

void to_json(nlohmann::json& j, const RdModels& m) {
    j = nlohmann::json{{"a", m.a},
                       {"b", m.b},
                       {"c", m.c},
                       {"d", m.d},
                       {"anchor", {{"q_g", m.anchor_q_g}, {"q_c", m.anchor_q_c}}}};
}

void from_json(const nlohmann::json& j, RdModels& m) {
    j.at("a").get_to(m.a);
    j.at("b").get_to(m.b);
    j.at("c").get_to(m.c);
    j.at("d").get_to(m.d);
    j.at("anchor").at("q_g").get_to(m.anchor_q_g);
    j.at("anchor").at("q_c").get_to(m.anchor_q_c);
}

void to_json(nlohmann::json& j, const TraceEntry& t) {
    j = nlohmann::json{{"outer", t.outer},       {"q_g", t.q_g},
                       {"q_c", t.q_c},           {"J", t.J},
                       {"residual", t.residual}, {"lambda", t.lambda},
                       {"rho", t.rho}};
}

void from_json(const nlohmann::json& j, TraceEntry& t) {
    j.at("outer").get_to(t.outer);
    j.at("q_g").get_to(t.q_g);
    j.at("q_c").get_to(t.q_c);
    j.at("J").get_to(t.J);
    j.at("residual").get_to(t.residual);
    j.at("lambda").get_to(t.lambda);
    j.at("rho").get_to(t.rho);
}

void to_json(nlohmann::json& j, const SolveResult& r) {
    j = nlohmann::json{{"q_g_star", r.q_g_star},
                       {"q_c_star", r.q_c_star},
                       {"q_g_real", r.q_g_real},
                       {"q_c_real", r.q_c_real},
                       {"model_rate_star", r.model_rate_star},
                       {"model_distortion_star", r.model_distortion_star},
                       {"model_rate_real", r.model_rate_real},
                       {"model_distortion_real", r.model_distortion_real},
                       {"lambda_final", r.lambda_final},
                       {"rho_final", r.rho_final},
                       {"converged", r.converged},
                       {"trace", r.trace}};
}

void from_json(const nlohmann::json& j, SolveResult& r) {
    j.at("q_g_star").get_to(r.q_g_star);
    j.at("q_c_star").get_to(r.q_c_star);
    j.at("q_g_real").get_to(r.q_g_real);
    j.at("q_c_real").get_to(r.q_c_real);
    j.at("model_rate_star").get_to(r.model_rate_star);
    j.at("model_distortion_star").get_to(r.model_distortion_star);
    j.at("model_rate_real").get_to(r.model_rate_real);
    j.at("model_distortion_real").get_to(r.model_distortion_real);
    j.at("lambda_final").get_to(r.lambda_final);
    j.at("rho_final").get_to(r.rho_final);
    j.at("converged").get_to(r.converged);
    j.at("trace").get_to(r.trace);
}

}  // namespace pcrd
