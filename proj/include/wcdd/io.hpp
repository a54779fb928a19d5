#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "wcdd/behavior.hpp"
#include "wcdd/dde.hpp"
#include "wcdd/model.hpp"
#include "wcdd/stability.hpp"

namespace wcdd::io {

// Shortest exact decimal round-trip; used for every CSV number so repeated
// runs are byte-identical.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_boundary_csv(std::ostream& os, const BoundaryCurve& b) {
    os << "segment,omega,alpha,beta\n";
    os << "l0," << "," << fmt(b.l0_alpha_min) << "," << fmt(b.l0_alpha_min - 1.0) << "\n";
    os << "l0," << "," << fmt(2.0) << "," << fmt(1.0) << "\n";
    if (b.bounded) {
        os << "ltau," << "," << fmt((*b.double_hopf)[0]) << "," << fmt((*b.double_hopf)[1]) << "\n";
        os << "ltau," << "," << fmt((*b.zero_hopf)[0]) << "," << fmt((*b.zero_hopf)[1]) << "\n";
    }
    for (const auto& s : b.curve)
        os << "gamma," << fmt(s.omega) << "," << fmt(s.alpha) << "," << fmt(s.beta) << "\n";
}

inline nlohmann::json codim2_json(const BoundaryCurve& b) {
    nlohmann::json j;
    j["kernel"] = to_string(b.kernel);
    j["tau"] = b.tau;
    j["bounded"] = b.bounded;
    j["bt"] = {b.bt[0], b.bt[1]};
    if (b.bounded) {
        j["omega_tau"] = b.crossing->omega;
        j["mu_tau"] = b.crossing->mu;
        j["double_hopf"] = {(*b.double_hopf)[0], (*b.double_hopf)[1]};
        j["zero_hopf"] = {(*b.zero_hopf)[0], (*b.zero_hopf)[1]};
    } else {
        j["omega_tau"] = nullptr;
        j["mu_tau"] = nullptr;
        j["double_hopf"] = nullptr;
        j["zero_hopf"] = nullptr;
    }
    return j;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,u,v";
    for (const auto& name : tr.aux_names) os << "," << name;
    os << "\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        os << fmt(tr.t[i]) << "," << fmt(tr.u[i]) << "," << fmt(tr.v[i]);
        for (const auto& a : tr.aux) os << "," << fmt(a[i]);
        os << "\n";
    }
}

inline void write_raster_csv(std::ostream& os, const RegionScan& rs) {
    os << "alpha,beta,verdict\n";
    for (std::size_t i = 0; i < rs.alphas.size(); ++i)
        for (std::size_t j = 0; j < rs.betas.size(); ++j)
            os << fmt(rs.alphas[i]) << "," << fmt(rs.betas[j]) << ","
               << to_string(rs.verdicts[i * rs.betas.size() + j]) << "\n";
}

inline void write_equilibria_csv(std::ostream& os, const EquilibriumSearch& es) {
    os << "u,v,phi1,phi2,alpha,beta\n";
    for (const auto& e : es.equilibria)
        os << fmt(e.u) << "," << fmt(e.v) << "," << fmt(e.phi1) << "," << fmt(e.phi2) << ","
           << fmt(e.alpha) << "," << fmt(e.beta) << "\n";
}

inline nlohmann::json equilibria_json(const EquilibriumSearch& es) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : es.equilibria)
        arr.push_back({{"u", e.u},
                       {"v", e.v},
                       {"phi1", e.phi1},
                       {"phi2", e.phi2},
                       {"alpha", e.alpha},
                       {"beta", e.beta}});
    return nlohmann::json{{"count", es.equilibria.size()},
                          {"failed_candidates", es.failed_candidates},
                          {"equilibria", arr}};
}

inline nlohmann::json critical_delay_json(const KernelSpec& k, double alpha, double beta,
                                          double tau_max,
                                          const std::optional<CriticalDelay>& result,
                                          const std::vector<DelayCandidate>& candidates) {
    nlohmann::json j;
    j["kernel"] = to_string(k);
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["tau_max"] = tau_max;
    nlohmann::json cand = nlohmann::json::array();
    for (const auto& c : candidates)
        cand.push_back({{"tau", c.tau}, {"omega", c.omega}, {"type", to_string(c.type)}});
    j["candidates"] = cand;
    if (result) {
        j["tau_star"] = result->tau_star;
        j["omega"] = result->omega;
        j["crossing_type"] = to_string(result->type);
    } else {
        j["tau_star"] = nullptr;
        j["omega"] = nullptr;
        j["crossing_type"] = nullptr;
    }
    return j;
}

inline nlohmann::json behavior_json(const BehaviorReport& rep, double u_eq, double v_eq) {
    nlohmann::json j;
    j["kind"] = to_string(rep.kind);
    j["amplitude"] = rep.amplitude;
    j["final_distance"] = rep.final_distance;
    j["peak_count"] = rep.peak_count;
    j["equilibrium"] = {u_eq, v_eq};
    if (rep.period)
        j["period"] = *rep.period;
    else
        j["period"] = nullptr;
    return j;
}

} // namespace wcdd::io
