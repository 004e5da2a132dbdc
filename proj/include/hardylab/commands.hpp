#pragma once

#include <json.hpp>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hardylab/bezout.hpp"
#include "hardylab/config.hpp"
#include "hardylab/embedding.hpp"
#include "hardylab/hankel.hpp"
#include "hardylab/version.hpp"

namespace hardylab {

// Exit-code contract: 0 pass, 1 check failure, 2 config error, 3 numeric
// error (excluded-node budget exceeded, singular Gram, infeasible system).

struct CliOptions {
    std::optional<cfg::QuadConfig> quad;  // --quadrature override
    std::optional<std::uint64_t> seed;    // --seed override
    bool refine = false;
};

struct CommandResult {
    nlohmann::json report;
    std::vector<std::pair<std::string, std::string>> csv_files;
    int exit_code = 0;
};

namespace cmd {

using nlohmann::json;

inline json check_entry(const std::string& name, bool pass, json numbers = json::object()) {
    numbers["name"] = name;
    numbers["pass"] = pass;
    return numbers;
}

inline void finalize(CommandResult& res, const std::string& command, const json& effective_config,
                     json checks) {
    bool all = true;
    for (const auto& c : checks)
        if (!c.at("pass").get<bool>()) all = false;
    res.report = json{{"artifact", {{"name", kArtifactName}, {"version", kArtifactVersion}}},
                      {"command", command},
                      {"config", effective_config},
                      {"checks", std::move(checks)},
                      {"pass", all}};
    res.exit_code = all ? 0 : 1;
}

struct Resolved {
    cfg::QuadConfig quad;
    std::uint64_t seed = 1;
    bool refine = false;
    DiskQuadrature dq;
    BoundaryQuadrature bq;
    BoundaryQuadrature gate;

    json echo(const json& extra) const {
        json e = extra;
        e["quadrature"] = {{"nr", quad.nr}, {"ntheta", quad.ntheta}, {"nb", quad.nb}};
        e["seed"] = seed;
        e["refine"] = refine;
        return e;
    }
};

inline Resolved resolve(const json& config, const CliOptions& opts) {
    Resolved r;
    r.quad = opts.quad ? *opts.quad
                       : cfg::parse_quadrature(config.value("quadrature", json::object()));
    r.seed = opts.seed ? *opts.seed : cfg::get_or<std::uint64_t>(config, "seed", 1);
    r.refine = opts.refine;
    try {
        r.dq = build_disk_quadrature(r.quad.nr, r.quad.ntheta);
        r.bq = build_boundary_quadrature(r.quad.nb);
        r.gate = build_boundary_quadrature(std::max(4096, r.quad.nb));
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
    return r;
}

inline PolyVecField random_nonvanishing_field(Rng& rng, int n, int deg) {
    std::vector<Poly> comps;
    for (int k = 0; k < n; ++k) {
        std::vector<cplx> c(deg + 1);
        for (int j = 0; j <= deg; ++j) c[j] = 0.25 * rng.cnormal() / (deg + 1.0);
        if (k == 0) c[0] += 2.0;
        comps.emplace_back(std::move(c));
    }
    return PolyVecField(std::move(comps));
}

inline PolyVecField random_section_poly(Rng& rng, int n, int deg) {
    std::vector<Poly> comps;
    for (int k = 0; k < n; ++k) {
        std::vector<cplx> c(deg + 1);
        for (int j = 0; j <= deg; ++j) c[j] = rng.cnormal() / std::sqrt(2.0 * (deg + 1));
        comps.emplace_back(std::move(c));
    }
    return PolyVecField(std::move(comps));
}

inline cplx random_interior(Rng& rng, double rmax = 0.85) {
    const double r = rmax * std::sqrt(rng.uniform());
    const double th = 2.0 * kPi * rng.uniform();
    return {r * std::cos(th), r * std::sin(th)};
}

// ---------------------------------------------------------------- identities

inline CommandResult run_identities(const json& config, const CliOptions& opts) {
    cfg::check_keys(config, {"quadrature", "seed", "samples", "max_dim", "max_degree", "fd_step",
                             "inject_derivative_fault"},
                    "identities");
    const auto r = resolve(config, opts);
    const int samples = cfg::get_or<int>(config, "samples", 2000);
    if (samples < 1) throw config_error("identities: no samples");
    const int max_dim = cfg::get_or<int>(config, "max_dim", 4);
    const int max_degree = cfg::get_or<int>(config, "max_degree", 5);
    const double h = cfg::get_or<double>(config, "fd_step", 1e-4);
    const bool inject = cfg::get_or<bool>(config, "inject_derivative_fault", false);
    if (max_dim < 2 || max_degree < 1) throw config_error("identities: bad dims/degree");

    json checks = json::array();

    const double norm_err = std::abs(disk_integral([](DiskPoint) { return 1.0; }, r.dq) - 1.0);
    checks.push_back(check_entry("quadrature_normalization", norm_err <= 1e-10,
                                 {{"error", norm_err}, {"tolerance", 1e-10}}));

    double worst_green = 0.0;
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; a + b <= 6; ++b) {
            auto v = [=](cplx z) { return std::pow(z, a) * std::pow(std::conj(z), b); };
            auto lap = [=](cplx z) -> cplx {
                if (a < 1 || b < 1) return 0.0;
                return double(a) * double(b) * std::pow(z, a - 1) * std::pow(std::conj(z), b - 1);
            };
            worst_green = std::max(worst_green, green_residual(v, lap, r.dq, r.bq));
        }
    checks.push_back(check_entry("green_closure_degree6", worst_green <= 1e-8,
                                 {{"worst_residual", worst_green}, {"tolerance", 1e-8}}));

    Rng rng(r.seed);
    double worst_alg = 0.0, worst_lap = 0.0, worst_curv = 0.0;
    double order_num = 0.0, order_den = 0.0;
    for (int s = 0; s < samples; ++s) {
        const int n = 2 + static_cast<int>(rng.bits() % (max_dim - 1));
        const auto f = random_nonvanishing_field(rng, n, 1 + static_cast<int>(rng.bits() % max_degree));
        const cplx z = random_interior(rng);
        auto ps = projection(f, z);
        if (inject) ps.dPi(0, 0) += 1e-3;  // fault injection for the failure path
        for (const auto& [name, val] : projection_identity_residuals(ps))
            worst_alg = std::max(worst_alg, val);
        worst_curv = std::max(worst_curv, curvature_vs_laplacian(f, z, h));
        if (s % 64 == 0) {
            auto pi_of = [&](cplx w) { return projection(f, w).Pi; };
            const auto res1 = projection_identity_residuals(ps, laplacian_fd(pi_of, z, h));
            worst_lap = std::max(worst_lap, res1.at("laplacian_commutator"));
            const auto big = projection_identity_residuals(ps, laplacian_fd(pi_of, z, 1e-3));
            const auto half = projection_identity_residuals(ps, laplacian_fd(pi_of, z, 5e-4));
            const double hi = big.at("laplacian_commutator");
            const double lo = half.at("laplacian_commutator");
            if (lo > 1e-13) {
                order_num += std::log2(hi / lo);
                order_den += 1.0;
            }
        }
    }
    const double order = order_den > 0 ? order_num / order_den : 2.0;
    checks.push_back(check_entry("projection_algebraic_identities", worst_alg <= 1e-10,
                                 {{"worst_residual", worst_alg}, {"tolerance", 1e-10}}));
    checks.push_back(check_entry("projection_laplacian_identity", worst_lap <= 1e-5,
                                 {{"worst_residual", worst_lap},
                                  {"tolerance", 1e-5},
                                  {"fd_step", h}}));
    checks.push_back(check_entry("laplacian_convergence_order", order >= 1.8,
                                 {{"measured_order", order}, {"threshold", 1.8}}));
    checks.push_back(check_entry("curvature_identity", worst_curv <= 1e-5,
                                 {{"worst_residual", worst_curv}, {"tolerance", 1e-5}}));

    CommandResult res;
    finalize(res, "identities",
             r.echo({{"samples", samples},
                     {"max_dim", max_dim},
                     {"max_degree", max_degree},
                     {"fd_step", h},
                     {"inject_derivative_fault", inject}}),
             checks);
    return res;
}

// --------------------------------------------------------- correcting-factor

inline CommandResult run_correcting_factor(const json& config, const CliOptions& opts) {
    cfg::check_keys(config, {"quadrature", "seed", "psi", "grid_xmin", "grid_points",
                             "domination_xmax", "domination_points"},
                    "correcting-factor");
    const auto r = resolve(config, opts);
    if (!config.contains("psi")) throw config_error("correcting-factor: psi block required");
    const auto pc = cfg::parse_psi(config.at("psi"));
    const double xmin = cfg::get_or<double>(config, "grid_xmin", -200.0);
    const int points = cfg::get_or<int>(config, "grid_points", 2001);
    const double dom_xmax = cfg::get_or<double>(config, "domination_xmax", 100.0);
    const int dom_points = cfg::get_or<int>(config, "domination_points", 10001);
    if (points < 2 || dom_points < 2) throw config_error("correcting-factor: need >= 2 grid points");
    if (xmin >= 0) throw config_error("correcting-factor: grid_xmin must be negative");

    CorrectingFactor m;
    try {
        m = build_correcting_factor(pc.psi, pc.r_max, pc.grid_nodes, pc.tail_tol);
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }

    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = xmin * (1.0 - double(i) / (points - 1));

    json checks = json::array();
    checks.push_back(check_entry("normalization_at_zero", m.eval(0.0, 0) == 1.0,
                                 {{"value", m.eval(0.0, 0)}}));
    const double mass_err = std::abs(m.atom_mass() - pc.psi(1.0));
    checks.push_back(check_entry("mass_telescoping", mass_err <= 1e-12,
                                 {{"error", mass_err}, {"tolerance", 1e-12}}));
    const auto pos = check_positivity_condition(m, grid);
    checks.push_back(check_entry("positivity_condition", pos.pass(),
                                 {{"min_determinant", pos.min_determinant},
                                  {"min_second_derivative", pos.min_second_derivative},
                                  {"tolerance", -1e-12}}));
    const auto dom = measure_domination_constant(pc.psi, m, dom_xmax, dom_points);
    const int base_nodes = static_cast<int>(std::ceil(std::log(m.r_max) / std::log(1.05)));
    const auto fine_m = build_correcting_factor(pc.psi, pc.r_max,
                                                pc.grid_nodes > 0 ? 2 * pc.grid_nodes
                                                                  : 2 * base_nodes,
                                                pc.tail_tol);
    const auto dom_fine = measure_domination_constant(pc.psi, fine_m, dom_xmax, dom_points);
    const bool dom_ok = std::isfinite(dom.constant) && dom.constant > 0.0 &&
                        std::abs(dom_fine.constant - dom.constant) <= 0.10 * dom.constant;
    checks.push_back(check_entry("domination_constant", dom_ok,
                                 {{"value", dom.constant},
                                  {"refined_value", dom_fine.constant},
                                  {"skipped_nodes", dom.skipped},
                                  {"normalizer", m.normalizer},
                                  {"atoms", m.atom_r.size()}}));

    std::ostringstream csv;
    csv << "x,m,m_prime,m_second\n";
    csv.precision(17);
    for (double x : grid)
        csv << x << "," << m.eval(x, 0) << "," << m.eval(x, 1) << "," << m.eval(x, 2) << "\n";

    CommandResult res;
    res.csv_files.emplace_back("correcting_factor.csv", csv.str());
    finalize(res, "correcting-factor",
             r.echo({{"psi_kind", pc.psi.name},
                     {"rmax", pc.r_max},
                     {"grid_xmin", xmin},
                     {"grid_points", points},
                     {"domination_xmax", dom_xmax},
                     {"domination_points", dom_points}}),
             checks);
    return res;
}

// ----------------------------------------------------------------- embeddings

inline json report_to_json(const EmbeddingReport& rep) {
    json j{{"inequality_id", rep.id},
           {"lhs", rep.lhs},
           {"rhs", rep.rhs},
           {"margin", rep.margin()},
           {"excluded_nodes", rep.excluded},
           {"quadrature",
            {{"nr", rep.n_radial}, {"ntheta", rep.n_angular}, {"nb", rep.n_boundary}}}};
    if (rep.has_mid) j["mid"] = rep.mid;
    for (const auto& [k, v] : rep.aux) j[k] = v;
    return j;
}

inline CommandResult run_embeddings(const json& config, const CliOptions& opts) {
    cfg::check_keys(config, {"quadrature", "seed", "psi", "f", "tau", "sections"}, "embeddings");
    const auto r = resolve(config, opts);
    if (!config.contains("psi") || !config.contains("f") || !config.contains("tau"))
        throw config_error("embeddings: psi, f and tau are required");
    const auto pc = cfg::parse_psi(config.at("psi"));
    const auto f = cfg::parse_field(config.at("f"), "f");
    const auto tau = cfg::parse_poly(config.at("tau"), "tau");
    const json sec_cfg = config.value("sections", json::object());
    cfg::check_keys(sec_cfg, {"count", "degree"}, "sections");
    const int count = cfg::get_or<int>(sec_cfg, "count", 8);
    const int degree = cfg::get_or<int>(sec_cfg, "degree", 4);
    if (count < 1 || degree < 0) throw config_error("embeddings: bad sections block");

    json checks = json::array();
    std::vector<EmbeddingReport> all_reports;

    // size gate first; a violation is a reported check failure (not an
    // exception) so the offending node reaches the output
    const auto gate = check_size_condition(f, tau, pc.psi, r.dq, r.gate);
    checks.push_back(check_entry(
        "size_condition", gate.pass(),
        {{"margin", gate.margin},
         {"worst_node", {gate.worst_node.real(), gate.worst_node.imag()}},
         {"sup_f", gate.sup_f}}));

    CorrectingFactor m;
    try {
        m = build_correcting_factor(pc.psi, pc.r_max, pc.grid_nodes, pc.tail_tol);
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }

    auto run_suite = [&](const DiskQuadrature& dq, const BoundaryQuadrature& bq) {
        std::vector<EmbeddingReport> reports;
        reports.push_back(curvature_measure_check(f, pc.psi, dq, bq, pc.r_max));
        const DiskFrame df = build_disk_frame(f, dq);
        const BoundaryFrame bf = build_boundary_frame(f, bq);
        Rng rng(r.seed);
        for (int i = 0; i < count; ++i) {
            const auto p = random_section_poly(rng, f.dim(), degree);
            const SectionField xi(SectionKind::Xi, p);
            auto rep = section_embedding_check(xi, m, df, bf);
            rep.id += "[" + std::to_string(i) + "]";
            reports.push_back(std::move(rep));
            if (gate.pass()) {
                const auto q = random_section_poly(rng, f.dim(), degree);
                auto quartet = tau_embedding_checks(f, tau, pc.psi, SectionField(SectionKind::Xi, p),
                                                    SectionField(SectionKind::Zeta, q), dq, bq,
                                                    r.gate);
                for (auto& qq : quartet) {
                    qq.id += "[" + std::to_string(i) + "]";
                    reports.push_back(std::move(qq));
                }
            }
        }
        return reports;
    };

    all_reports = run_suite(r.dq, r.bq);
    double worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& rep : all_reports)
        worst_margin = std::min(worst_margin, rep.margin() / std::max(1.0, rep.rhs));
    checks.push_back(check_entry("embedding_margins", worst_margin >= -1e-8,
                                 {{"worst_relative_margin", worst_margin},
                                  {"tolerance", -1e-8},
                                  {"reports", all_reports.size()}}));

    if (r.refine) {
        const auto dq2 = build_disk_quadrature(2 * r.quad.nr, 2 * r.quad.ntheta);
        const auto bq2 = build_boundary_quadrature(2 * r.quad.nb);
        const auto refined = run_suite(dq2, bq2);
        double worst_change = 0.0;
        for (std::size_t i = 0; i < all_reports.size(); ++i) {
            const double m1 = all_reports[i].margin();
            const double m2 = refined[i].margin();
            worst_change = std::max(worst_change, std::abs(m2 - m1) /
                                                      std::max(std::abs(m1), 1e-9));
        }
        checks.push_back(check_entry("refinement_stability", worst_change < 0.10,
                                     {{"worst_relative_change", worst_change},
                                      {"threshold", 0.10}}));
    }

    std::ostringstream csv;
    csv << "inequality_id,lhs,mid,rhs,margin,excluded_nodes\n";
    csv.precision(17);
    for (const auto& rep : all_reports) {
        csv << rep.id << "," << rep.lhs << ",";
        if (rep.has_mid) csv << rep.mid;
        csv << "," << rep.rhs << "," << rep.margin() << "," << rep.excluded << "\n";
    }

    json reports_json = json::array();
    for (const auto& rep : all_reports) reports_json.push_back(report_to_json(rep));

    CommandResult res;
    res.csv_files.emplace_back("embedding_margins.csv", csv.str());
    finalize(res, "embeddings",
             r.echo({{"psi_kind", pc.psi.name},
                     {"sections", {{"count", count}, {"degree", degree}}}}),
             checks);
    res.report["reports"] = std::move(reports_json);
    return res;
}

// ----------------------------------------------------------------------- form

inline CommandResult run_form(const json& config, const CliOptions& opts) {
    cfg::check_keys(config, {"quadrature", "seed", "f", "tau", "h1", "p2", "degree_max", "psi"},
                    "form");
    const auto r = resolve(config, opts);
    for (const char* key : {"f", "tau", "h1", "p2"})
        if (!config.contains(key)) throw config_error(std::string("form: ") + key + " required");
    const auto f = cfg::parse_field(config.at("f"), "f");
    const auto tau = cfg::parse_poly(config.at("tau"), "tau");
    const auto h1 = cfg::parse_field(config.at("h1"), "h1");
    const auto p2 = cfg::parse_field(config.at("p2"), "p2");
    const int degree_max = cfg::get_or<int>(config, "degree_max", 6);
    if (degree_max < 1 || degree_max > 12) throw config_error("form: degree_max in [1, 12]");

    json checks = json::array();
    bool gated = false;
    if (config.contains("psi")) {
        const auto pc = cfg::parse_psi(config.at("psi"));
        const auto gate = check_size_condition(f, tau, pc.psi, r.dq, r.gate);
        gated = gate.pass();
        checks.push_back(check_entry(
            "size_condition", gate.pass(),
            {{"margin", gate.margin},
             {"worst_node", {gate.worst_node.real(), gate.worst_node.imag()}}}));
    }

    const auto ev = eval_form(f, tau, h1, p2, r.dq, r.bq);
    const double two_sqrt2 = 2.0 * std::sqrt(2.0);
    checks.push_back(check_entry("commutator_part_vanishes",
                                 std::abs(ev.part_commutator) <= 1e-6,
                                 {{"value", std::abs(ev.part_commutator)}, {"tolerance", 1e-6}}));
    const double sym = hankel_symmetry_check(f, tau, h1, p2, r.dq, r.bq);
    checks.push_back(
        check_entry("hankel_symmetry", sym <= 1e-7, {{"residual", sym}, {"tolerance", 1e-7}}));

    std::vector<FormNormEstimate> estimates;
    for (int d = 1; d <= degree_max; ++d)
        estimates.push_back(estimate_form_norm(f, tau, d, r.dq, r.bq));
    bool monotone = true;
    for (std::size_t i = 1; i < estimates.size(); ++i)
        if (estimates[i].value < estimates[i - 1].value - 1e-8) monotone = false;
    checks.push_back(check_entry("estimate_monotone_in_degree", monotone,
                                 {{"values", [&] {
                                       json v = json::array();
                                       for (const auto& e : estimates) v.push_back(e.value);
                                       return v;
                                   }()}}));
    if (gated) {
        const bool bounded = ev.bound_ratio <= two_sqrt2 + 1e-6 &&
                             estimates.back().value <= two_sqrt2 + 1e-6;
        checks.push_back(check_entry("derived_bound", bounded,
                                     {{"bound", two_sqrt2},
                                      {"bound_ratio", ev.bound_ratio},
                                      {"largest_estimate", estimates.back().value}}));
    }

    std::ostringstream csv;
    csv << "degree,estimate,rank1,rank2\n";
    csv.precision(17);
    for (const auto& e : estimates)
        csv << e.degree << "," << e.value << "," << e.rank1 << "," << e.rank2 << "\n";

    CommandResult res;
    res.csv_files.emplace_back("form_norm_growth.csv", csv.str());
    finalize(res, "form", r.echo({{"degree_max", degree_max}}), checks);
    res.report["form"] = {
        {"value", {ev.value.real(), ev.value.imag()}},
        {"parts",
         {{"commutator", {ev.part_commutator.real(), ev.part_commutator.imag()}},
          {"left", {ev.part_left.real(), ev.part_left.imag()}},
          {"right", {ev.part_right.real(), ev.part_right.imag()}}}},
        {"energies", {ev.energy1, ev.energy2}},
        {"bound_ratio", ev.bound_ratio},
        {"excluded_nodes", ev.excluded}};
    return res;
}

// --------------------------------------------------------------------- bezout

inline CommandResult run_bezout(const json& config, const CliOptions& opts) {
    cfg::check_keys(config, {"quadrature", "seed", "f", "tau", "psi", "degree_cap", "minimize",
                             "sweep"},
                    "bezout");
    const auto r = resolve(config, opts);
    if (!config.contains("f") || !config.contains("tau"))
        throw config_error("bezout: f and tau are required");
    const auto f = cfg::parse_field(config.at("f"), "f");
    const auto tau = cfg::parse_poly(config.at("tau"), "tau");
    const int cap = cfg::get_or<int>(config, "degree_cap", -1);
    const bool minimize = cfg::get_or<bool>(config, "minimize", true);

    json checks = json::array();
    if (config.contains("psi")) {
        const auto pc = cfg::parse_psi(config.at("psi"));
        const auto gate = check_size_condition(f, tau, pc.psi, r.dq, r.gate);
        checks.push_back(check_entry(
            "size_condition", gate.pass(),
            {{"margin", gate.margin},
             {"worst_node", {gate.worst_node.real(), gate.worst_node.imag()}}}));
    }

    const BezoutProblem prob{f, tau, cap};
    CommandResult res;
    BezoutCertificate cert;
    try {
        cert = solve_exact(prob, r.bq);
    } catch (const numeric_error& e) {
        // diagnose before giving up: a common zero of f missed by tau is a
        // legitimate (reportable) infeasibility, not a numeric accident
        const auto zeros = common_disk_zeros(f, tau);
        json blockers = json::array();
        for (const auto& z : zeros)
            if (z.tau_order < z.multiplicity)
                blockers.push_back({{"location", {z.location.real(), z.location.imag()}},
                                    {"multiplicity", z.multiplicity},
                                    {"tau_order", z.tau_order}});
        if (blockers.empty()) throw;  // genuinely numeric: exit 3
        checks.push_back(check_entry("solvable", false,
                                     {{"reason", e.what()}, {"common_zeros", blockers}}));
        finalize(res, "bezout", r.echo({{"degree_cap", prob.effective_cap()}}), checks);
        return res;
    }

    if (minimize) cert = minimize_sup(prob, cert, r.bq);
    const auto identities = verify_product_identities(f, tau, cert.g, r.bq.nodes);

    const double scale = 1.0 + std::abs(tau.coeff(tau.degree()));
    checks.push_back(check_entry("solvable", true, {{"null_dimension", cert.null_dimension}}));
    checks.push_back(check_entry("coefficient_residual", cert.coeff_residual <= 1e-12 * scale,
                                 {{"value", cert.coeff_residual}, {"tolerance", 1e-12 * scale}}));
    checks.push_back(check_entry("boundary_residual", cert.boundary_residual <= 1e-10 * scale,
                                 {{"value", cert.boundary_residual}, {"tolerance", 1e-10 * scale}}));
    checks.push_back(check_entry("product_identities",
                                 identities.idempotency_residual <= 1e-10 &&
                                     identities.range_residual <= 1e-10,
                                 {{"idempotency_residual", identities.idempotency_residual},
                                  {"range_residual", identities.range_residual},
                                  {"skipped_nodes", identities.skipped}}));

    json gj = json::array();
    for (const auto& gk : cert.g) {
        json ck = json::array();
        for (const auto& c : gk.coeffs()) ck.push_back({c.real(), c.imag()});
        gj.push_back(ck);
    }

    if (config.contains("sweep")) {
        const json& sw = config.at("sweep");
        cfg::check_keys(sw, {"deltas", "degree_cap"}, "sweep");
        if (!sw.contains("deltas")) throw config_error("sweep: deltas required");
        const auto deltas = sw.at("deltas").get<std::vector<double>>();
        std::vector<PolyVecField> family;
        for (double d : deltas) {
            if (d <= 0.0) throw config_error("sweep: deltas must be positive");
            const double s = 1.0 / std::sqrt(1.0 + d * d);
            family.push_back(PolyVecField({Poly({0.0, s}), Poly({d * s})}));
        }
        const auto rows =
            corona_sweep(family, Poly({1.0}), cfg::get_or<int>(sw, "degree_cap", 8), r.dq, r.bq);
        std::ostringstream csv;
        csv << "delta,g_sup\n";
        csv.precision(17);
        for (const auto& row : rows) csv << row.delta << "," << row.g_sup << "\n";
        res.csv_files.emplace_back("corona_sweep.csv", csv.str());
    }

    finalize(res, "bezout",
             r.echo({{"degree_cap", prob.effective_cap()}, {"minimize", minimize}}), checks);
    res.report["certificate"] = {{"g", gj},
                                 {"coefficient_residual", cert.coeff_residual},
                                 {"boundary_residual", cert.boundary_residual},
                                 {"g_sup", cert.g_sup},
                                 {"null_dimension", cert.null_dimension},
                                 {"sup_minimized", cert.sup_minimized}};
    return res;
}

} // namespace cmd

/// Runs one CLI command; exceptions become the documented exit codes with
/// an error report.
inline CommandResult execute_command(const std::string& command, const nlohmann::json& config,
                                     const CliOptions& opts) {
    try {
        if (command == "identities") return cmd::run_identities(config, opts);
        if (command == "correcting-factor") return cmd::run_correcting_factor(config, opts);
        if (command == "embeddings") return cmd::run_embeddings(config, opts);
        if (command == "form") return cmd::run_form(config, opts);
        if (command == "bezout") return cmd::run_bezout(config, opts);
        throw config_error("unknown command: " + command);
    } catch (const config_error& e) {
        return {nlohmann::json{{"command", command}, {"error", e.what()}, {"kind", "config"}},
                {},
                2};
    } catch (const std::invalid_argument& e) {
        return {nlohmann::json{{"command", command}, {"error", e.what()}, {"kind", "config"}},
                {},
                2};
    } catch (const numeric_error& e) {
        return {nlohmann::json{{"command", command}, {"error", e.what()}, {"kind", "numeric"}},
                {},
                3};
    }
}

} // namespace hardylab
