#include "elliptic/report.hpp"

#include <cmath>
#include <cstdio>

#include <openssl/evp.h>

#include "elliptic/errors.hpp"

namespace elliptic {

Json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

std::string config_hash(const Json& config) {
    const std::string text = config.dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

Json to_json(const StructuralConstants& c) {
    Json j;
    j["b"] = number(c.b);
    j["b_tilde"] = number(c.b_tilde);
    j["zeta"] = c.zeta ? number(*c.zeta) : Json(nullptr);
    j["s_star"] = number(c.s_star);
    j["K_infty"] = number(c.K_infty);
    j["search_bound"] = number(c.search_bound);
    return j;
}

Json to_json(const Classification& c) {
    return Json{{"kind", to_string(c.kind)},
                {"d", number(c.d)},
                {"radius", number(c.radius)},
                {"r_max", number(c.r_max)},
                {"evidence", c.evidence}};
}

Json to_json(const DecayFit& d) {
    return Json{{"rate", number(d.rate)},           {"expected", number(d.expected)},
                {"deviation", number(d.deviation)}, {"r_lo", number(d.r_lo)},
                {"r_hi", number(d.r_hi)},           {"samples", d.samples}};
}

Json to_json(const AdmissibilityVerdict& v) {
    Json zeros = Json::array();
    for (double z : v.zero_locations) zeros.push_back(number(z));
    return Json{{"zero_count", v.zero_count},
                {"zero_locations", zeros},
                {"strict", to_string(v.strict)},
                {"tail", to_string(v.tail)},
                {"pre_zero_peak", number(v.pre_zero_peak)},
                {"log_end_magnitude", number(v.log_end_magnitude)},
                {"end_sign", v.end_sign},
                {"end_radius", number(v.end_radius)},
                {"alarm", v.alarm},
                {"evidence", v.evidence}};
}

Json to_json(const GroundState& g) {
    Json j;
    j["dimension"] = g.dimension;
    j["model"] = g.model ? g.model->name() : "";
    j["d0"] = number(g.d0);
    j["d_P"] = number(g.d_P);
    j["d_N"] = number(g.d_N);
    j["converged"] = g.converged;
    j["iterations"] = g.iterations;
    j["certificate_P"] = to_json(g.certificate_P);
    j["certificate_N"] = to_json(g.certificate_N);
    j["trust_radius"] = number(g.trust_radius);
    j["variation_radius"] = number(g.variation_radius);
    j["r_max"] = number(g.r_max);
    j["decay"] = g.decay ? to_json(*g.decay) : Json(nullptr);
    j["decay_rate"] = g.decay ? number(g.decay->rate) : Json(nullptr);
    j["r_delta"] = g.r_delta ? number(*g.r_delta) : Json(nullptr);
    j["monotone"] = g.monotone;
    j["constants"] = to_json(g.consts);
    const auto nd = nondegeneracy_check(g);
    j["nondegenerate"] = nd.nondegenerate;
    j["strict_admissibility"] = to_string(nd.strict);
    j["admissibility"] = to_json(nd.verdict);
    return j;
}

std::string quasilinear_alias(const std::string& label) {
    if (label == "G1") return "H1";
    if (label == "G2") return "H2";
    if (label == "G3") return "H3";
    if (label == "G4" || label == "G5") return "H4";
    if (label == "G6") return "H5";
    return label;
}

Json to_json(const HypothesisReport& r) {
    Json conds = Json::array();
    for (const auto& c : r.conditions) {
        Json j{{"label", c.label}, {"verdict", to_string(c.verdict)}, {"margin", number(c.margin)}};
        if (c.label[0] == 'G') j["alias"] = quasilinear_alias(c.label);
        j["witness"] = c.witness ? Json{{"abscissa", number(c.witness->abscissa)}, {"value", number(c.witness->value)}}
                                 : Json(nullptr);
        j["detail"] = c.detail;
        conds.push_back(std::move(j));
    }
    return Json{{"dimension", r.dimension},
                {"grid", {{"lo", number(r.grid.lo)}, {"hi", number(r.grid.hi)}, {"per_decade", r.grid.per_decade}}},
                {"all_pass", r.all_pass()},
                {"conditions", conds}};
}

Json to_json(const KeyLemmaReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back(Json{{"name", c.name},
                              {"pass", c.pass},
                              {"witness_r", number(c.witness_r)},
                              {"value", number(c.value)},
                              {"detail", c.detail}});
    return Json{{"r_delta", number(r.r_delta)},
                {"u_at_r_delta", number(r.u_at_r_delta)},
                {"lambda_under", number(r.lambda_under)},
                {"lambda0", number(r.lambda0)},
                {"lambda_bar", number(r.lambda_bar)},
                {"lambda_bar_doublings", r.lambda_bar_doublings},
                {"r_under", r.r_under ? number(*r.r_under) : Json(nullptr)},
                {"r_bar", r.r_bar ? number(*r.r_bar) : Json(nullptr)},
                {"end_radius", number(r.end_radius)},
                {"all_pass", r.all_pass()},
                {"checks", checks}};
}

Json to_json(const QuasilinearSolution& q) {
    Json j;
    j["diffusion"] = q.transform ? q.transform->diffusion().name() : "";
    j["h"] = q.h_model ? q.h_model->name() : "";
    j["u0"] = number(q.u0);
    j["h_constants"] = to_json(q.h_consts);
    j["dual_constants"] = to_json(q.dual_consts);
    j["dual_K_infty"] = number(q.dual_consts.K_infty);
    j["max_residual"] = number(q.max_residual);
    j["residual_radius"] = number(q.residual_radius);
    j["midpoint_residual"] = number(q.midpoint_residual);
    j["dual_ground"] = to_json(q.ground);
    return j;
}

Json to_json(const SpectralReport& r) {
    Json sectors = Json::array();
    for (const auto& s : r.sectors) {
        Json ev = Json::array(), rr = Json::array(), vec = Json::array();
        for (double x : s.eigenvalues) ev.push_back(number(x));
        for (double x : s.r) rr.push_back(number(x));
        for (double x : s.eigenvector) vec.push_back(number(x));
        sectors.push_back(Json{{"operator", s.operator_name},
                               {"l", s.l},
                               {"mesh_n", s.mesh_n},
                               {"eigenvalues", ev},
                               {"r", rr},
                               {"eigenvector", vec}});
    }
    Json verdicts = Json::array();
    for (const auto& v : r.verdicts)
        verdicts.push_back(Json{{"name", v.name}, {"pass", v.pass}, {"margin", number(v.margin)}, {"detail", v.detail}});
    return Json{{"kind", r.kind},
                {"dimension", r.dimension},
                {"mesh_n", r.mesh_n},
                {"R_max", number(r.R_max)},
                {"zero_tolerance", number(r.zero_tolerance)},
                {"all_pass", r.all_pass()},
                {"verdicts", verdicts},
                {"sectors", sectors}};
}

}  // namespace elliptic
