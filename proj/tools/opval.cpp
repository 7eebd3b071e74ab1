// opval: command line front end for the operator-valued free probability
// library. Exit codes: 0 success or certificate passed, 1 violation or
// mismatch found, 2 usage error, malformed input or exhausted budget.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "opval/json_io.hpp"
#include "opval/ncpart.hpp"
#include "opval/series.hpp"
#include "opval/spectral.hpp"

namespace {

using namespace opval;

constexpr int exit_ok = 0;
constexpr int exit_violation = 1;
constexpr int exit_usage = 2;

struct global_opts {
    bool json = false;
    std::string out;
    int threads = 1;
};

void emit(const global_opts& g, const njson& report, const std::string& plain) {
    std::string text = g.json ? report.dump(2) + "\n" : plain;
    if (!g.out.empty()) {
        std::ofstream f(g.out);
        if (!f) throw json_error("cannot open output file '" + g.out + "'");
        f << text;
    } else {
        std::cout << text;
    }
}

std::vector<rational> parse_rational_list(const std::string& s) {
    std::vector<rational> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

map_family model_moment_family(const any_model& m, int order) {
    if (std::holds_alternative<circular_model>(m))
        return moment_family_from_cumulants(
            induced_cumulant_family(std::get<circular_model>(m), order), order);
    if (std::holds_alternative<rdiag_model>(m))
        return moment_family_from_cumulants(
            induced_cumulant_family(std::get<rdiag_model>(m), std::max(order, 2 * std::get<rdiag_model>(m).max_k())),
            order);
    const auto& fam = std::get<map_family>(m);
    if (fam.kind() == family_kind::moments) return fam;
    return moment_family_from_cumulants(fam, std::min(order, fam.max_order()));
}

map_family model_cumulant_family(const any_model& m, int order) {
    if (std::holds_alternative<circular_model>(m))
        return induced_cumulant_family(std::get<circular_model>(m), order);
    if (std::holds_alternative<rdiag_model>(m))
        return induced_cumulant_family(std::get<rdiag_model>(m),
                                       std::max(order, 2 * std::get<rdiag_model>(m).max_k()));
    const auto& fam = std::get<map_family>(m);
    if (fam.kind() == family_kind::cumulants) return fam;
    return cumulants_from_moments(fam, std::min(order, fam.max_order()));
}

rdiag_model model_rdiag(const any_model& m, int K) {
    if (std::holds_alternative<circular_model>(m))
        return rdiag_model::from_circular(std::get<circular_model>(m), K);
    if (std::holds_alternative<rdiag_model>(m)) return std::get<rdiag_model>(m);
    const auto& fam = std::get<map_family>(m);
    map_family cum = fam.kind() == family_kind::cumulants
                         ? fam
                         : cumulants_from_moments(fam, fam.max_order());
    std::vector<std::pair<ctensor, ctensor>> betas;
    for (int k = 1; k <= K; ++k)
        betas.emplace_back(cum.map_tensor(alternating_word(0, 2 * k)),
                           cum.map_tensor(alternating_word(1, 2 * k)));
    return rdiag_model(cum.alg(), std::move(betas));
}

njson violation_json(const map_family& fam, const family_violation& v) {
    njson j;
    j["word"] = fam.word_str(v.j);
    j["basis_tuple"] = v.tuple;
    j["lhs"] = to_string(v.lhs);
    j["rhs"] = to_string(v.rhs);
    return j;
}

std::string fmt_elem(const alg_elem& e) {
    std::string s = "(";
    for (int i = 0; i < e.dim(); ++i) s += (i ? ", " : "") + to_string(e[i]);
    return s + ")";
}

// ---------------------------------------------------------------- nc

int run_nc_enumerate(const global_opts& g, int n, bool as_json) {
    if (n < 1 || n > nc_max_n) {
        std::cerr << "error: --n must be in [1, " << nc_max_n << "]\n";
        return exit_usage;
    }
    auto parts = enumerate_nc(n);
    std::ostringstream plain;
    njson arr = njson::array();
    for (const auto& p : parts) {
        if (as_json || g.json) {
            arr.push_back(p.blocks());
        } else {
            for (const auto& b : p.blocks()) {
                plain << "{";
                for (size_t i = 0; i < b.size(); ++i) plain << (i ? "," : "") << b[i];
                plain << "}";
            }
            plain << "\n";
        }
    }
    plain << "count " << parts.size() << "\n";
    if (as_json && !g.json) {
        emit(g, arr, arr.dump() + "\n");
        return exit_ok;
    }
    njson rep = make_report("nc enumerate", {{"n", n}},
                            {{"count", parts.size()}, {"partitions", arr}});
    emit(g, rep, plain.str());
    return exit_ok;
}

int run_nc_sigma(const global_opts& g, const std::string& word_s) {
    star_word e = star_word::parse(word_s);
    partition p = max_alt_interval_partition(e);
    njson rep = make_report("nc sigma", {{"word", e.str()}}, {{"blocks", p.blocks()}});
    std::ostringstream plain;
    plain << njson(p.blocks()).dump() << "\n";
    emit(g, rep, plain.str());
    return exit_ok;
}

int run_nc_map(const global_opts& g, const std::string& blocks_s, bool reflect) {
    njson b = njson::parse(blocks_s);
    std::vector<std::vector<int>> blocks = b.get<std::vector<std::vector<int>>>();
    int n = 0;
    for (const auto& blk : blocks)
        for (int e : blk) n = std::max(n, e);
    partition p(n, blocks);
    partition q = reflect ? reflect_partition(p) : rotate_partition(p);
    njson rep = make_report(reflect ? "nc reflect" : "nc rotate", {{"blocks", blocks}},
                            {{"blocks", q.blocks()}});
    emit(g, rep, njson(q.blocks()).dump() + "\n");
    return exit_ok;
}

// ---------------------------------------------------------------- cumulants

int run_cumulants_convert(const global_opts& g, const std::string& in, const std::string& to,
                          int max_order) {
    any_model m = resolve_model(in);
    map_family out = (to == "moments") ? model_moment_family(m, max_order)
                                       : model_cumulant_family(m, max_order);
    njson j = family_to_json(out);
    emit(g, j, j.dump(2) + "\n");
    return exit_ok;
}

int run_cumulants_check_trace(const global_opts& g, const std::string& in, const std::string& tau_s,
                              int L) {
    any_model m = resolve_model(in);
    map_family cum = model_cumulant_family(m, L);
    trace_functional tau(parse_rational_list(tau_s));
    auto res = check_trace_condition(cum, tau, L);
    njson rep = make_report("cumulants check-trace", {{"tau", tau_s}, {"max_len", L}},
                            {{"tracial", res.ok}});
    if (!res.ok) rep["counterexamples"].push_back(violation_json(cum, *res.violation));
    std::ostringstream plain;
    plain << (res.ok ? "tracial: yes" : "tracial: NO") << "\n";
    if (!res.ok)
        plain << "  first violation at word " << cum.word_str(res.violation->j) << "\n";
    emit(g, rep, plain.str());
    return res.ok ? exit_ok : exit_violation;
}

int run_cumulants_check_selfadjoint(const global_opts& g, const std::string& in,
                                    const std::string& inv_s, int L) {
    any_model m = resolve_model(in);
    map_family cum = model_cumulant_family(m, L);
    std::vector<int> s = inv_s.empty() ? std::vector<int>{1, 0} : parse_int_list(inv_s);
    auto res = check_selfadjoint(cum, s, L);
    njson rep = make_report("cumulants check-selfadjoint", {{"involution", s}, {"max_len", L}},
                            {{"selfadjoint", res.ok}});
    if (!res.ok) rep["counterexamples"].push_back(violation_json(cum, *res.violation));
    emit(g, rep, std::string(res.ok ? "self-adjoint: yes" : "self-adjoint: NO") + "\n");
    return res.ok ? exit_ok : exit_violation;
}

// ---------------------------------------------------------------- rdiag

int run_rdiag_check(const global_opts& g, const std::string& model_s, int L, const std::string& mode,
                    int K, int D, long budget) {
    any_model m = resolve_model(model_s);
    njson verdicts;
    njson cx = njson::array();
    bool pass = true;
    bool budget_hit = false;
    std::ostringstream plain;
    if (mode == "cumulant" || mode == "all") {
        map_family cum = model_cumulant_family(m, 2 * K);
        auto r = check_rdiag_cumulants(cum, K);
        verdicts["cumulant"] = r.ok;
        plain << "cumulant certificate (K=" << K << "): " << (r.ok ? "pass" : "FAIL") << "\n";
        if (!r.ok) {
            pass = false;
            cx.push_back({{"mode", "cumulant"}, {"detail", r.violation->description}});
            plain << "  " << r.violation->description << "\n";
        }
    }
    if (mode == "word" || mode == "all") {
        map_family mom = model_moment_family(m, L);
        auto r = check_rdiag_words(mom, L);
        verdicts["word"] = r.ok;
        plain << "word certificate (L=" << L << "): " << (r.ok ? "pass" : "FAIL") << "\n";
        if (!r.ok) {
            pass = false;
            cx.push_back({{"mode", "word"},
                          {"detail", r.violation->description},
                          {"value", fmt_elem(r.violation->value)}});
            plain << "  " << r.violation->description << " -> " << fmt_elem(r.violation->value)
                  << "\n";
        }
    }
    if (mode == "m2" || mode == "all") {
        map_family mom = model_moment_family(m, std::max(L, 1) * std::max(D, 1));
        auto r = m2_freeness_check(mom, L, D, budget);
        verdicts["m2"] = r.status == m2_status::pass;
        verdicts["m2_products"] = r.products_checked;
        plain << "matrix freeness certificate (L=" << L << ", D=" << D
              << "): " << (r.status == m2_status::pass
                               ? "pass"
                               : r.status == m2_status::violation ? "FAIL" : "BUDGET EXCEEDED")
              << " (" << r.products_checked << " products)\n";
        if (r.status == m2_status::violation) {
            pass = false;
            cx.push_back({{"mode", "m2"}, {"detail", r.witness}});
            plain << "  " << r.witness << "\n";
        }
        if (r.status == m2_status::budget_exceeded) budget_hit = true;
    }
    njson rep = make_report("rdiag check",
                            {{"model", model_s}, {"max_len", L}, {"mode", mode}, {"K", K},
                             {"D", D}},
                            verdicts, cx);
    emit(g, rep, plain.str());
    if (budget_hit) return exit_usage;
    return pass ? exit_ok : exit_violation;
}

int run_rdiag_obstruction(const global_opts& g, const std::string& model_s) {
    any_model m = resolve_model(model_s);
    map_family mom = model_moment_family(m, 2);
    auto r = check_polar_obstruction(mom);
    const char* verdict = r.verdict == polar_verdict::obstructed
                              ? "obstructed"
                              : r.verdict == polar_verdict::unobstructed ? "unobstructed"
                                                                         : "inconclusive";
    njson rep = make_report("rdiag obstruction", {{"model", model_s}},
                            {{"verdict", verdict},
                             {"E_astar_a", fmt_elem(r.e_astar_a)},
                             {"E_a_astar", fmt_elem(r.e_a_astar)}});
    std::ostringstream plain;
    plain << "E(a*a) = " << fmt_elem(r.e_astar_a) << "\nE(aa*) = " << fmt_elem(r.e_a_astar)
          << "\nverdict: " << verdict << "\n";
    emit(g, rep, plain.str());
    return exit_ok;
}

int run_rdiag_beta_symmetry(const global_opts& g, const std::string& model_s, int K) {
    rdiag_model m = model_rdiag(resolve_model(model_s), K);
    bool ok = check_beta_symmetry(m);
    njson rep = make_report("rdiag beta-symmetry", {{"model", model_s}}, {{"symmetric", ok}});
    emit(g, rep, std::string(ok ? "beta symmetry: yes" : "beta symmetry: NO") + "\n");
    return ok ? exit_ok : exit_violation;
}

int run_rdiag_theta_twist(const global_opts& g, const std::string& model_s,
                          const std::string& theta_s, int K) {
    rdiag_model m = model_rdiag(resolve_model(model_s), K);
    algebra_automorphism theta =
        theta_s == "flip" ? algebra_automorphism::flip(m.alg.dimension)
                          : theta_s == "id" ? algebra_automorphism::identity(m.alg.dimension)
                                            : algebra_automorphism(parse_int_list(theta_s));
    auto r = check_theta_twist(m, theta);
    njson rep = make_report("rdiag theta-twist", {{"model", model_s}, {"theta", theta_s}},
                            {{"twisted", r.ok}});
    if (!r.ok) rep["counterexamples"].push_back({{"k", r.k}, {"basis_tuple", r.tuple}});
    emit(g, rep, std::string(r.ok ? "twist identity: yes" : "twist identity: NO") + "\n");
    return r.ok ? exit_ok : exit_violation;
}

// ---------------------------------------------------------------- circular

int run_circular_moments(const global_opts& g, const std::string& model_s, int order,
                         const std::string& pattern) {
    any_model any = resolve_model(model_s);
    if (!std::holds_alternative<circular_model>(any))
        throw json_error("'circular moments' needs a circular model");
    const auto& m = std::get<circular_model>(any);
    const alg_elem one = alg_elem::unit(m.alg);
    njson values = njson::array();
    std::ostringstream plain;
    for (int n = 0; n <= order; ++n) {
        std::vector<alg_elem> args(static_cast<size_t>(2 * n), one);
        alg_elem v = alternating_moment(
            m, pattern == "astar" ? alt_pattern::start_astar : alt_pattern::start_a, args);
        values.push_back(fmt_elem(v));
        plain << "n=" << n << ": " << fmt_elem(v) << "\n";
    }
    njson rep = make_report("circular moments",
                            {{"model", model_s}, {"order", order}, {"pattern", pattern}},
                            {{"moments", values}});
    emit(g, rep, plain.str());
    return exit_ok;
}

int run_circular_covariance(const global_opts& g, const std::string& model_s) {
    any_model any = resolve_model(model_s);
    if (!std::holds_alternative<circular_model>(any))
        throw json_error("'circular covariance' needs a circular model");
    const auto& m = std::get<circular_model>(any);
    auto dec = semicircular_covariance(m);
    njson rep = make_report("circular covariance", {{"model", model_s}},
                            {{"g11", io::linear_map_to_json(dec.g11)},
                             {"g12", io::linear_map_to_json(dec.g12)},
                             {"g21", io::linear_map_to_json(dec.g21)},
                             {"g22", io::linear_map_to_json(dec.g22)},
                             {"block_covariance_cp", dec.block_covariance_cp},
                             {"eta1_cp", check_positive_map(m.eta1)},
                             {"eta2_cp", check_positive_map(m.eta2)}});
    std::ostringstream plain;
    plain << "block covariance completely positive: " << (dec.block_covariance_cp ? "yes" : "no")
          << "\n";
    emit(g, rep, plain.str());
    return dec.block_covariance_cp ? exit_ok : exit_violation;
}

int run_circular_trace(const global_opts& g, const std::string& model_s, const std::string& tau_s) {
    any_model any = resolve_model(model_s);
    if (!std::holds_alternative<circular_model>(any))
        throw json_error("'circular trace-check' needs a circular model");
    const auto& m = std::get<circular_model>(any);
    trace_functional tau(parse_rational_list(tau_s));
    bool ok = check_circular_trace(m, tau);
    njson rep = make_report("circular trace-check", {{"model", model_s}, {"tau", tau_s}},
                            {{"tracial", ok}});
    emit(g, rep, std::string(ok ? "tracial: yes" : "tracial: NO") + "\n");
    return ok ? exit_ok : exit_violation;
}

// ---------------------------------------------------------------- series

int run_series_fg(const global_opts& g, const std::string& model_s, int order, bool traced,
                  const std::string& tau_s) {
    any_model any = resolve_model(model_s);
    std::ostringstream plain;
    njson fj = njson::array(), gj = njson::array();
    auto dump_series = [&](const bseries& F, const bseries& G, const algebra& alg) {
        std::optional<trace_functional> tau;
        if (traced)
            tau = tau_s.empty() ? trace_functional::uniform(alg)
                                : trace_functional(parse_rational_list(tau_s));
        for (int n = 0; n <= order; ++n) {
            if (tau) {
                fj.push_back(to_string(apply_trace(*tau, F.coeff(n))));
                gj.push_back(to_string(apply_trace(*tau, G.coeff(n))));
                plain << "z^" << n << ": tau(F) = " << to_string(apply_trace(*tau, F.coeff(n)))
                      << "  tau(G) = " << to_string(apply_trace(*tau, G.coeff(n))) << "\n";
            } else {
                fj.push_back(fmt_elem(F.coeff(n)));
                gj.push_back(fmt_elem(G.coeff(n)));
                plain << "z^" << n << ": F = " << fmt_elem(F.coeff(n))
                      << "  G = " << fmt_elem(G.coeff(n)) << "\n";
            }
        }
    };
    if (std::holds_alternative<circular_model>(any)) {
        const auto& m = std::get<circular_model>(any);
        const alg_elem one = alg_elem::unit(m.alg);
        auto fg = solve_fg(m, one, one, order);
        dump_series(fg.F, fg.G, m.alg);
    } else {
        rdiag_model m = model_rdiag(any, 4);
        const alg_elem one = alg_elem::unit(m.alg);
        auto fg = solve_alternating_series(m, one, one, order);
        dump_series(fg.F, fg.G, m.alg);
    }
    njson rep = make_report("series fg", {{"model", model_s}, {"order", order}, {"trace", traced}},
                            {{"F", fj}, {"G", gj}});
    emit(g, rep, plain.str());
    return exit_ok;
}

// ---------------------------------------------------------------- spectral

int run_spectral_verify(const global_opts& g, int order) {
    std::ostringstream plain;
    auto s = appendix_component_series(std::max(order, 6));
    njson hj = njson::array();
    plain << "h coefficients:";
    for (int n = 0; n <= std::min(6, order); ++n) {
        hj.push_back(to_string(s.h[static_cast<size_t>(n)]));
        plain << " " << to_string(s.h[static_cast<size_t>(n)]);
    }
    plain << "\n";
    const bool quartic_ok = verify_h_quartic(order);
    plain << "quartic identity holds to order " << order << ": " << (quartic_ok ? "yes" : "NO")
          << "\n";
    auto disc = discriminant_roots();
    plain << "discriminant quartic factor matches: " << (disc.matches_reference ? "yes" : "NO")
          << "\n";
    plain << "discriminant real roots:";
    njson roots = njson::array();
    for (double r : disc.real_roots) {
        plain << " " << std::setprecision(9) << r;
        roots.push_back(r);
    }
    plain << "\n";
    const double norm = operator_norm();
    const double res8 = std::abs(norm_octic().eval(norm));
    plain << "operator norm: " << std::setprecision(9) << norm << " (degree-8 residual " << res8
          << ")\n";
    const bool ok = quartic_ok && disc.matches_reference;
    njson rep = make_report("spectral verify-appendix", {{"order", order}},
                            {{"h_coefficients", hj},
                             {"quartic_identity", quartic_ok},
                             {"discriminant_matches", disc.matches_reference},
                             {"discriminant_real_roots", roots},
                             {"operator_norm", norm},
                             {"norm_octic_residual", res8}});
    emit(g, rep, plain.str());
    return ok ? exit_ok : exit_violation;
}

void write_density_csv(const std::string& path, const density_samples& s) {
    std::ofstream f(path);
    if (!f) throw json_error("cannot open output file '" + path + "'");
    f << "t,density\n" << std::setprecision(12);
    for (size_t i = 0; i < s.t.size(); ++i) f << s.t[i] << "," << s.rho[i] << "\n";
}

void write_svg(const std::string& path, const std::vector<double>& x,
               const std::vector<double>& y, const std::vector<double>& ox,
               const std::vector<double>& oy, const std::string& xlabel) {
    const double W = 800, H = 500, ml = 60, mr = 20, mt = 20, mb = 45;
    double xmax = *std::max_element(x.begin(), x.end());
    double ymax = *std::max_element(y.begin(), y.end());
    for (double v : oy) ymax = std::max(ymax, v);
    if (ymax <= 0) ymax = 1;
    ymax = std::min(ymax, 3.0);  // the density blows up at 0; cap the viewport
    auto X = [&](double v) { return ml + v / xmax * (W - ml - mr); };
    auto Y = [&](double v) { return H - mb - std::min(v, ymax) / ymax * (H - mt - mb); };
    std::ofstream f(path);
    if (!f) throw json_error("cannot open output file '" + path + "'");
    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    f << "<rect width='100%' height='100%' fill='white'/>\n";
    f << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
      << "' stroke='black'/>\n";
    f << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
      << "' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double tv = xmax * i / 4, xv = X(tv);
        f << "<line x1='" << xv << "' y1='" << H - mb << "' x2='" << xv << "' y2='" << H - mb + 5
          << "' stroke='black'/><text x='" << xv << "' y='" << H - mb + 20
          << "' font-size='12' text-anchor='middle'>" << std::setprecision(3) << tv << "</text>\n";
        const double rv = ymax * i / 4, yv = Y(rv);
        f << "<line x1='" << ml - 5 << "' y1='" << yv << "' x2='" << ml << "' y2='" << yv
          << "' stroke='black'/><text x='" << ml - 8 << "' y='" << yv + 4
          << "' font-size='12' text-anchor='end'>" << std::setprecision(3) << rv << "</text>\n";
    }
    f << "<text x='" << (ml + W - mr) / 2 << "' y='" << H - 8
      << "' font-size='13' text-anchor='middle'>" << xlabel << "</text>\n";
    auto polyline = [&](const std::vector<double>& px, const std::vector<double>& py,
                        const char* style) {
        f << "<polyline fill='none' " << style << " points='";
        for (size_t i = 0; i < px.size(); ++i) f << X(px[i]) << "," << Y(py[i]) << " ";
        f << "'/>\n";
    };
    polyline(x, y, "stroke='steelblue' stroke-width='1.5'");
    if (!ox.empty()) polyline(ox, oy, "stroke='gray' stroke-width='1.2' stroke-dasharray='6,4'");
    f << "</svg>\n";
}

int run_spectral_density(const global_opts& g, int points, double eps, const std::string& out_csv,
                         const std::string& svg, bool abs_variable, bool overlay_quarter,
                         bool richardson) {
    auto grid = default_density_grid(points);
    auto s = density(grid, eps, richardson, g.threads);
    if (!out_csv.empty()) write_density_csv(out_csv, s);
    if (!svg.empty()) {
        std::vector<double> x = s.t, y = s.rho, ox, oy;
        std::string xlabel = "t";
        if (abs_variable) {
            // density of the square-root variable: 2 s rho(s^2) on s = sqrt(t)
            for (size_t i = 0; i < x.size(); ++i) {
                const double sv = std::sqrt(s.t[i]);
                x[i] = sv;
                y[i] = 2.0 * sv * s.rho[i];
            }
            xlabel = "s";
        }
        if (overlay_quarter) {
            for (int i = 0; i <= 400; ++i) {
                const double sv = 2.0 * i / 400;
                ox.push_back(sv);
                oy.push_back(std::sqrt(4.0 - sv * sv) / M_PI);
            }
        }
        write_svg(svg, x, y, ox, oy, xlabel);
    }
    auto stats = estimate_measure_stats(s);
    njson rep = make_report("spectral density",
                            {{"points", points},
                             {"eps", eps},
                             {"richardson", richardson}},
                            {{"mass", stats.mass},
                             {"moment1", stats.m1},
                             {"moment2", stats.m2},
                             {"min_before_clamp", s.min_before_clamp}});
    std::ostringstream plain;
    plain << std::setprecision(8) << "points " << points << ", eps " << eps << "\nmass    "
          << stats.mass << "\nmoment1 " << stats.m1 << "\nmoment2 " << stats.m2 << "\n";
    if (!out_csv.empty()) plain << "csv written to " << out_csv << "\n";
    if (!svg.empty()) plain << "svg written to " << svg << "\n";
    emit(g, rep, plain.str());
    return exit_ok;
}

int run_spectral_norm(const global_opts& g) {
    const double norm = operator_norm();
    const double res = std::abs(norm_octic().eval(norm));
    njson rep = make_report("spectral norm", njson::object(),
                            {{"norm", norm}, {"octic_residual", res}});
    std::ostringstream plain;
    plain << std::setprecision(9) << norm << "\n";
    emit(g, rep, plain.str());
    return exit_ok;
}

int run_spectral_discriminant(const global_opts& g) {
    auto d = discriminant_roots();
    njson rep = make_report("spectral discriminant", njson::object(),
                            {{"resultant", d.resultant_in_w.str("w")},
                             {"quartic_factor", d.quartic_factor.str("w")},
                             {"matches_reference", d.matches_reference},
                             {"real_roots", d.real_roots}});
    std::ostringstream plain;
    plain << "quartic factor: " << d.quartic_factor.str("w") << "\nreference match: "
          << (d.matches_reference ? "yes" : "NO") << "\nreal roots:";
    for (double r : d.real_roots) plain << " " << std::setprecision(9) << r;
    plain << "\n";
    emit(g, rep, plain.str());
    return d.matches_reference ? exit_ok : exit_violation;
}

int run_spectral_puiseux(const global_opts& g) {
    std::vector<double> grid;
    for (int e = 3; e <= 8; ++e) grid.push_back(-std::pow(10.0, -e));
    auto rep_data = check_puiseux(grid);
    njson pts = njson::array();
    std::ostringstream plain;
    plain << std::setprecision(6);
    for (const auto& p : rep_data.points) {
        pts.push_back({{"w", p.w},
                       {"G", p.g.real()},
                       {"err_ratio", p.err_ratio},
                       {"g1_rel_gap", p.g1_rel_gap}});
        plain << "w=" << p.w << "  G=" << p.g.real() << "  |err|/|w|^(1/3)=" << p.err_ratio
              << "  gap to rational branch=" << p.g1_rel_gap << "\n";
    }
    plain << "fit exponent of |err| vs |w|: " << rep_data.fit_exponent << " (expected ~1/3)\n";
    njson rep = make_report("spectral puiseux", njson::object(),
                            {{"points", pts}, {"fit_exponent", rep_data.fit_exponent}});
    emit(g, rep, plain.str());
    return exit_ok;
}

int run_spectral_atom(const global_opts& g, double t0, const std::string& eps_list) {
    std::vector<double> seq;
    if (eps_list.empty()) {
        seq = {1e-6, 1e-7, 1e-8};
    } else {
        std::stringstream ss(eps_list);
        std::string item;
        while (std::getline(ss, item, ',')) seq.push_back(std::stod(item));
    }
    auto a = atom_mass(t0, seq);
    njson rep = make_report("spectral atom", {{"t0", t0}, {"eps_seq", seq}},
                            {{"estimate", a.estimate}, {"raw", a.raw}});
    std::ostringstream plain;
    plain << std::setprecision(6) << "atom estimate at t0=" << t0 << ": " << a.estimate << "\n";
    for (size_t i = 0; i < seq.size(); ++i)
        plain << "  eps=" << seq[i] << "  eps*|G|=" << a.raw[i] << "\n";
    emit(g, rep, plain.str());
    return exit_ok;
}

int run_spectral_eliminate(const global_opts& g) {
    auto e = eliminate_h();
    const std::vector<std::string> hz{"h", "z"};
    njson rep = make_report("spectral eliminate", njson::object(),
                            {{"eliminant", e.eliminant.str(hz)},
                             {"identity_multiplicity", e.multiplicity},
                             {"extraneous", e.extraneous.str(hz)},
                             {"extraneous_annihilates_h", e.extraneous_annihilates_h}});
    std::ostringstream plain;
    plain << "identity factor multiplicity: " << e.multiplicity << "\nextraneous factor: "
          << e.extraneous.str(hz) << "\nextraneous annihilates the series: "
          << (e.extraneous_annihilates_h ? "yes (unexpected)" : "no") << "\n";
    emit(g, rep, plain.str());
    return (e.multiplicity >= 1 && !e.extraneous_annihilates_h) ? exit_ok : exit_violation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"operator-valued free probability toolkit"};
    app.require_subcommand(1);
    global_opts g;
    if (const char* env = std::getenv("OPVAL_THREADS")) g.threads = std::max(1, std::atoi(env));
    app.add_flag("--json", g.json, "emit a JSON report");
    app.add_option("--out", g.out, "write output to a file");
    app.add_option("--threads", g.threads, "worker threads for grid evaluation");

    int rc = exit_ok;

    // nc
    auto* nc = app.add_subcommand("nc", "noncrossing partitions");
    {
        auto* en = nc->add_subcommand("enumerate", "list noncrossing partitions");
        auto n = std::make_shared<int>(0);
        auto as_json = std::make_shared<bool>(false);
        en->add_option("--n", *n, "ground set size")->required();
        en->add_flag("--json-array", *as_json, "bare JSON array output");
        en->callback([&, n, as_json] { rc = run_nc_enumerate(g, *n, *as_json); });

        auto* sg = nc->add_subcommand("sigma", "maximal alternating interval partition");
        auto w = std::make_shared<std::string>();
        sg->add_option("--word", *w, "star word, e.g. aa*a*a")->required();
        sg->callback([&, w] { rc = run_nc_sigma(g, *w); });

        auto* ro = nc->add_subcommand("rotate", "cyclic shift of a partition");
        auto rb = std::make_shared<std::string>();
        ro->add_option("--blocks", *rb, "JSON blocks, e.g. [[1,2],[3,4,5]]")->required();
        ro->callback([&, rb] { rc = run_nc_map(g, *rb, false); });

        auto* rf = nc->add_subcommand("reflect", "reflection of a partition");
        auto fb = std::make_shared<std::string>();
        rf->add_option("--blocks", *fb, "JSON blocks")->required();
        rf->callback([&, fb] { rc = run_nc_map(g, *fb, true); });
    }

    // cumulants
    auto* cu = app.add_subcommand("cumulants", "moment/cumulant families");
    {
        auto* cv = cu->add_subcommand("convert", "convert between moments and cumulants");
        auto in = std::make_shared<std::string>();
        auto to = std::make_shared<std::string>("moments");
        auto mo = std::make_shared<int>(6);
        cv->add_option("--in", *in, "family JSON file or builtin model")->required();
        cv->add_option("--to", *to, "target kind: moments|cumulants")
            ->check(CLI::IsMember({"moments", "cumulants"}));
        cv->add_option("--max-order", *mo, "maximum word length");
        cv->callback([&, in, to, mo] { rc = run_cumulants_convert(g, *in, *to, *mo); });

        auto* tr = cu->add_subcommand("check-trace", "trace compatibility of cumulants");
        auto tin = std::make_shared<std::string>();
        auto tau = std::make_shared<std::string>("1/2,1/2");
        auto L = std::make_shared<int>(6);
        tr->add_option("--in", *tin, "family JSON file or builtin model")->required();
        tr->add_option("--tau", *tau, "trace weights, e.g. 1/2,1/2");
        tr->add_option("--max-len", *L, "maximum word length");
        tr->callback([&, tin, tau, L] { rc = run_cumulants_check_trace(g, *tin, *tau, *L); });

        auto* sa = cu->add_subcommand("check-selfadjoint", "self-adjointness of cumulants");
        auto sin = std::make_shared<std::string>();
        auto inv = std::make_shared<std::string>("1,0");
        auto sL = std::make_shared<int>(6);
        sa->add_option("--in", *sin, "family JSON file or builtin model")->required();
        sa->add_option("--involution", *inv, "label involution, e.g. 1,0");
        sa->add_option("--max-len", *sL, "maximum word length");
        sa->callback([&, sin, inv, sL] { rc = run_cumulants_check_selfadjoint(g, *sin, *inv, *sL); });
    }

    // rdiag
    auto* rd = app.add_subcommand("rdiag", "R-diagonality certificates");
    {
        auto* ck = rd->add_subcommand("check", "run a certificate");
        auto model = std::make_shared<std::string>();
        auto L = std::make_shared<int>(6);
        auto mode = std::make_shared<std::string>("all");
        auto K = std::make_shared<int>(3);
        auto D = std::make_shared<int>(2);
        auto budget = std::make_shared<long>(5'000'000);
        ck->add_option("--model", *model, "model file or builtin")->required();
        ck->add_option("--max-len", *L, "word-length budget");
        ck->add_option("--mode", *mode, "cumulant|word|m2|all")
            ->check(CLI::IsMember({"cumulant", "word", "m2", "all"}));
        ck->add_option("--max-k", *K, "half-order bound for the cumulant mode");
        ck->add_option("--depth", *D, "monomial degree bound for the matrix mode");
        ck->add_option("--budget", *budget, "product budget for the matrix mode");
        ck->callback(
            [&, model, L, mode, K, D, budget] { rc = run_rdiag_check(g, *model, *L, *mode, *K, *D, *budget); });

        auto* ob = rd->add_subcommand("obstruction", "polar-decomposition obstruction");
        auto om = std::make_shared<std::string>();
        ob->add_option("--model", *om, "model file or builtin")->required();
        ob->callback([&, om] { rc = run_rdiag_obstruction(g, *om); });

        auto* bs = rd->add_subcommand("beta-symmetry", "symmetry of the alternating cumulants");
        auto bm = std::make_shared<std::string>();
        auto bk = std::make_shared<int>(3);
        bs->add_option("--model", *bm, "model file or builtin")->required();
        bs->add_option("--max-k", *bk, "half-order bound");
        bs->callback([&, bm, bk] { rc = run_rdiag_beta_symmetry(g, *bm, *bk); });

        auto* tw = rd->add_subcommand("theta-twist", "twisted symmetry of the cumulants");
        auto tm = std::make_shared<std::string>();
        auto th = std::make_shared<std::string>("flip");
        auto tk = std::make_shared<int>(3);
        tw->add_option("--model", *tm, "model file or builtin")->required();
        tw->add_option("--theta", *th, "automorphism: flip, id, or a 0-indexed permutation");
        tw->add_option("--max-k", *tk, "half-order bound");
        tw->callback([&, tm, th, tk] { rc = run_rdiag_theta_twist(g, *tm, *th, *tk); });
    }

    // circular
    auto* ci = app.add_subcommand("circular", "circular-element models");
    {
        auto* mo = ci->add_subcommand("moments", "alternating moments");
        auto cm = std::make_shared<std::string>();
        auto order = std::make_shared<int>(4);
        auto pat = std::make_shared<std::string>("a");
        mo->add_option("--model", *cm, "model file or builtin")->required();
        mo->add_option("--order", *order, "maximum half-order n");
        mo->add_option("--pattern", *pat, "a|astar")->check(CLI::IsMember({"a", "astar"}));
        mo->callback([&, cm, order, pat] { rc = run_circular_moments(g, *cm, *order, *pat); });

        auto* cov = ci->add_subcommand("covariance", "semicircular decomposition");
        auto vm = std::make_shared<std::string>();
        cov->add_option("--model", *vm, "model file or builtin")->required();
        cov->callback([&, vm] { rc = run_circular_covariance(g, *vm); });

        auto* tc = ci->add_subcommand("trace-check", "trace compatibility");
        auto tcm = std::make_shared<std::string>();
        auto tau = std::make_shared<std::string>("1/2,1/2");
        tc->add_option("--model", *tcm, "model file or builtin")->required();
        tc->add_option("--tau", *tau, "trace weights");
        tc->callback([&, tcm, tau] { rc = run_circular_trace(g, *tcm, *tau); });
    }

    // series
    auto* se = app.add_subcommand("series", "generating series");
    {
        auto* fg = se->add_subcommand("fg", "alternating moment generating series");
        auto sm = std::make_shared<std::string>();
        auto order = std::make_shared<int>(12);
        auto traced = std::make_shared<bool>(false);
        auto tau = std::make_shared<std::string>();
        fg->add_option("--model", *sm, "model file or builtin")->required();
        fg->add_option("--order", *order, "truncation order");
        fg->add_flag("--trace", *traced, "apply the uniform trace to the coefficients");
        fg->add_option("--tau", *tau, "trace weights for --trace");
        fg->callback([&, sm, order, traced, tau] { rc = run_series_fg(g, *sm, *order, *traced, *tau); });
    }

    // spectral
    auto* sp = app.add_subcommand("spectral", "spectral density pipeline");
    {
        auto* va = sp->add_subcommand("verify-appendix", "exact series, quartic identity, curve");
        auto order = std::make_shared<int>(30);
        va->add_option("--order", *order, "verification order");
        va->callback([&, order] { rc = run_spectral_verify(g, *order); });

        auto* de = sp->add_subcommand("density", "density by Stieltjes inversion");
        auto points = std::make_shared<int>(2000);
        auto eps = std::make_shared<double>(1e-7);
        auto out_csv = std::make_shared<std::string>();
        auto svg = std::make_shared<std::string>();
        auto absv = std::make_shared<bool>(false);
        auto overlay = std::make_shared<bool>(false);
        auto no_rich = std::make_shared<bool>(false);
        de->add_option("--points", *points, "grid size");
        de->add_option("--eps", *eps, "imaginary offset");
        de->add_option("--out", *out_csv, "CSV output path");
        de->add_option("--svg", *svg, "SVG plot path");
        de->add_flag("--abs", *absv, "plot the square-root variable density");
        de->add_flag("--overlay-quarter", *overlay, "overlay the quarter-circular density");
        de->add_flag("--no-richardson", *no_rich, "disable extrapolation in eps");
        de->callback([&, points, eps, out_csv, svg, absv, overlay, no_rich] {
            rc = run_spectral_density(g, *points, *eps, *out_csv, *svg, *absv, *overlay, !*no_rich);
        });

        sp->add_subcommand("norm", "operator norm")->callback([&] { rc = run_spectral_norm(g); });
        sp->add_subcommand("discriminant", "exact discriminant and its real roots")
            ->callback([&] { rc = run_spectral_discriminant(g); });
        sp->add_subcommand("puiseux", "small-w branch asymptotics")
            ->callback([&] { rc = run_spectral_puiseux(g); });

        auto* at = sp->add_subcommand("atom", "atom estimate at a point");
        auto t0 = std::make_shared<double>(0.0);
        auto eseq = std::make_shared<std::string>();
        at->add_option("--t0", *t0, "test point")->required();
        at->add_option("--eps-seq", *eseq, "comma-separated decreasing eps sequence");
        at->callback([&, t0, eseq] { rc = run_spectral_atom(g, *t0, *eseq); });

        sp->add_subcommand("eliminate", "derive the quartic identity by elimination")
            ->callback([&] { rc = run_spectral_eliminate(g); });
    }

    // allow the global flags (--json, --out, --threads) after any subcommand
    std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* cmd) {
        cmd->fallthrough();
        for (auto* sub : cmd->get_subcommands({})) enable_fallthrough(sub);
    };
    for (auto* sub : app.get_subcommands({})) enable_fallthrough(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    } catch (const json_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const branch_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return rc;
}
