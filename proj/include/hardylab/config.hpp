#pragma once

#include <json.hpp>
#include <set>
#include <string>

#include "hardylab/correcting.hpp"
#include "hardylab/polynomial.hpp"

namespace hardylab {

/// Configuration problems map to their own CLI exit code, separate from
/// numerical failures.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace cfg {

using nlohmann::json;

/// Unknown keys are rejected rather than ignored: a typo in a config file
/// must not silently fall back to a default.
inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
    if (!j.is_object()) throw config_error(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.contains(key))
            throw config_error(where + ": unknown key \"" + key + "\"");
    }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error("key \"" + key + "\": wrong type");
    }
}

inline cplx parse_coeff(const json& j, const std::string& where) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    throw config_error(where + ": coefficient must be a number or [re, im]");
}

inline Poly parse_poly(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw config_error(where + ": expected a coefficient array");
    std::vector<cplx> c;
    c.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        c.push_back(parse_coeff(j[i], where + "[" + std::to_string(i) + "]"));
    return Poly(std::move(c));
}

inline PolyVecField parse_field(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw config_error(where + ": expected an array of component coefficient arrays");
    std::vector<Poly> comps;
    comps.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k)
        comps.push_back(parse_poly(j[k], where + "[" + std::to_string(k) + "]"));
    return PolyVecField(std::move(comps));
}

struct PsiConfig {
    PsiFunction psi;
    double r_max = 60.0;
    int grid_nodes = 0;
    double tail_tol = 1e-8;
};

inline PsiConfig parse_psi(const json& j) {
    check_keys(j, {"kind", "cutoff", "levels", "alpha", "xs", "ys", "rmax", "grid_nodes",
                   "tail_tol"},
               "psi");
    const std::string kind = get_or<std::string>(j, "kind", "");
    PsiConfig out;
    if (kind == "exp") {
        out.psi = psi_exponential();
    } else if (kind == "power") {
        out.psi = psi_power_tail();
        out.r_max = 2.0e4;
    } else if (kind == "step") {
        out.psi = psi_step(get_or<double>(j, "cutoff", 5.0));
        out.r_max = 4.0 * get_or<double>(j, "cutoff", 5.0);
    } else if (kind == "iterated_log") {
        out.psi = psi_iterated_log(get_or<int>(j, "levels", 1), get_or<double>(j, "alpha", 1.0));
        out.r_max = 5.0e8;
    } else if (kind == "table") {
        if (!j.contains("xs") || !j.contains("ys"))
            throw config_error("psi: table kind needs xs and ys");
        try {
            out.psi = psi_table(j.at("xs").get<std::vector<double>>(),
                                j.at("ys").get<std::vector<double>>());
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("psi: ") + e.what());
        }
    } else {
        throw config_error("psi.kind must be one of exp|power|step|iterated_log|table");
    }
    out.r_max = get_or<double>(j, "rmax", out.r_max);
    out.grid_nodes = get_or<int>(j, "grid_nodes", 0);
    out.tail_tol = get_or<double>(j, "tail_tol", 1e-8);
    return out;
}

struct QuadConfig {
    int nr = 64;
    int ntheta = 256;
    int nb = 2048;
};

inline QuadConfig parse_quadrature(const json& j) {
    check_keys(j, {"nr", "ntheta", "nb"}, "quadrature");
    QuadConfig q;
    q.nr = get_or<int>(j, "nr", 64);
    q.ntheta = get_or<int>(j, "ntheta", 256);
    q.nb = get_or<int>(j, "nb", 2048);
    return q;
}

} // namespace cfg

} // namespace hardylab
