#include "billiard/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "billiard/domain_io.hpp"
#include "billiard/dynamics.hpp"
#include "billiard/fitting.hpp"
#include "billiard/invariants.hpp"
#include "billiard/orbits.hpp"
#include "billiard/parallel.hpp"
#include "billiard/spectrum.hpp"

namespace billiard::cli {

namespace {

using nlohmann::ordered_json;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_payload(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw BadSpec("cannot write output file " + out_path);
    out << payload;
}

struct QRange {
    int lo = 0;
    int hi = 0;
};

/// Parses "a..b" (or a single "q") into an inclusive range.
QRange parse_q_range(const std::string& text) {
    QRange r;
    const auto pos = text.find("..");
    try {
        if (pos == std::string::npos) {
            r.lo = r.hi = std::stoi(text);
        } else {
            r.lo = std::stoi(text.substr(0, pos));
            r.hi = std::stoi(text.substr(pos + 2));
        }
    } catch (const std::exception&) {
        throw BadSpec("bad q range \"" + text + "\", expected a..b");
    }
    if (r.lo < 2 || r.hi < r.lo) throw BadSpec("bad q range \"" + text + "\"");
    return r;
}

void load_cache_file(const std::string& path) {
    if (path.empty() || !std::filesystem::exists(path)) return;
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    std::vector<MlsCacheEntry> entries;
    for (const auto& row : j.value("entries", nlohmann::json::array())) {
        MlsCacheEntry e;
        e.domain_hash = row.at(0).get<uint64_t>();
        e.p = row.at(1).get<int>();
        e.q = row.at(2).get<int>();
        e.length = row.at(3).get<double>();
        entries.push_back(e);
    }
    mls_cache_merge(entries);
}

void save_cache_file(const std::string& path) {
    if (path.empty()) return;
    nlohmann::json j;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : mls_cache_snapshot())
        j["entries"].push_back({e.domain_hash, e.p, e.q, e.length});
    std::ofstream out(path);
    out << j.dump();
}

/// Solves every orbit a sweep will need, in parallel, so the serial sweep
/// below hits only the cache. Results merge in deterministic (p,q) order by
/// construction (the cache is keyed, not ordered).
void prefetch_orbits(const SupportDomain& domain, const std::set<std::pair<int, int>>& keys) {
    std::vector<std::pair<int, int>> list(keys.begin(), keys.end());
    parallel_for(list.size(), [&](size_t i) { mls(domain, list[i].first, list[i].second); });
}

ordered_json invariants_to_json(const SupportDomain& domain) {
    const InvariantVector inv = compute_invariants(domain);
    const IbpReport ibp = verify_ibp_identity(domain);
    const CompletedSquareReport csq = verify_completed_square(domain);
    const LogCurvatureReport chain = verify_log_curvature_bound(domain);
    ordered_json j;
    for (int k = 0; k < 5; ++k) j["I" + std::to_string(k)] = inv.values[static_cast<size_t>(k)];
    j["breakdown"]["I3_terms"] = inv.term_i3;
    j["breakdown"]["I4_terms"] = inv.term_i4;
    j["checks"]["ibp_gap"] = ibp.rel_gap;
    j["checks"]["csq_gap"] =
        std::max(csq.minus_branch.rel_gap, csq.plus_branch.rel_gap);
    j["checks"]["lemma41"] = {{"gauss_bonnet", chain.gauss_bonnet},
                              {"total_variation", chain.total_variation},
                              {"cauchy_schwarz_bound", chain.cauchy_schwarz_bound},
                              {"holder_bound", chain.holder_bound},
                              {"osc_log_kappa", chain.osc_log_kappa},
                              {"pointwise_C", chain.pointwise_c},
                              {"kappa_min", chain.kappa_min},
                              {"kappa_max", chain.kappa_max},
                              {"chain_holds", chain.chain_holds}};
    return j;
}

std::vector<CausticEstimate> read_caustics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadSpec("cannot open caustics file " + path);
    std::vector<CausticEstimate> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        CausticEstimate e;
        int q = 0;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf", &q, &e.omega_mid, &e.gamma_length,
                        &e.lazutkin_Q, &e.err_bar) != 5)
            throw BadSpec("bad caustics CSV row: " + line);
        e.fd_order = 0; // not recorded in the CSV
        out.push_back(e);
    }
    return out;
}

int cmd_domain(const std::string& domain_path, const std::string& out_path) {
    const DomainSpec spec = load_domain_spec(domain_path);
    const SupportDomain domain = build_domain(spec);
    ordered_json j;
    j["perimeter"] = domain.perimeter();
    j["mode_count"] = domain.mode_count();
    j["nodes"] = domain.node_count();
    j["rho_min"] = domain.min_radius_of_curvature();
    j["rho_max"] = domain.max_radius_of_curvature();
    j["hash"] = domain.hash();
    write_payload(out_path, j.dump(2) + "\n");
    std::cerr << "domain ok: perimeter " << fmt(domain.perimeter()) << ", modes "
              << domain.mode_count() << ", nodes " << domain.node_count() << "\n";
    return 0;
}

int cmd_map(const std::string& domain_path, double s0, double phi0, long n,
            const std::string& out_path) {
    const SupportDomain domain = load_domain(domain_path);
    const auto traj = iterate(domain, make_state(domain, s0, phi0), n);
    std::ostringstream csv;
    csv << "k,s,phi,x,y\n";
    for (size_t k = 0; k < traj.size(); ++k) {
        const BoundaryPoint bp =
            domain.boundary_point(domain.theta_from_arclength(traj[k].lift_s));
        csv << k << ',' << fmt(traj[k].s) << ',' << fmt(traj[k].phi) << ','
            << fmt(bp.position.x) << ',' << fmt(bp.position.y) << '\n';
    }
    write_payload(out_path, csv.str());
    std::cerr << "map: " << (traj.size() - 1) << " reflections\n";
    return 0;
}

int cmd_orbit(const std::string& domain_path, int p, int q, double tol, int restarts,
              const std::string& cache_path, const std::string& out_path) {
    const SupportDomain domain = load_domain(domain_path);
    load_cache_file(cache_path);
    OrbitOptions opts;
    if (tol > 0.0) opts.residual_tol = tol;
    if (restarts >= 0) opts.restarts = restarts;
    const PeriodicOrbit orbit = solve_orbit(domain, p, q, opts);
    ordered_json j;
    j["p"] = orbit.p;
    j["q"] = orbit.q;
    j["length"] = orbit.length;
    j["residual"] = orbit.residual;
    j["converged"] = orbit.converged;
    j["degenerate_family"] = orbit.degenerate_family;
    j["thetas"] = orbit.thetas;
    write_payload(out_path, j.dump(2) + "\n");
    save_cache_file(cache_path);
    std::cerr << "orbit (" << p << "," << q << "): length " << fmt(orbit.length)
              << ", residual " << fmt(orbit.residual) << "\n";
    return 0;
}

int cmd_beta(const std::string& domain_path, const std::string& q_range, int p,
             const std::string& cache_path, const std::string& out_path) {
    const SupportDomain domain = load_domain(domain_path);
    load_cache_file(cache_path);
    const QRange r = parse_q_range(q_range);
    std::vector<Rational> rotations;
    std::set<std::pair<int, int>> keys;
    for (int q = r.lo; q <= r.hi; ++q) {
        if (std::gcd(p, q) != 1 || 2 * p > q) continue;
        rotations.push_back({p, q});
        keys.insert({p, q});
    }
    prefetch_orbits(domain, keys);
    const auto samples = beta_table(domain, rotations);
    std::ostringstream csv;
    csv << "p,q,omega,mls,beta\n";
    for (const auto& s : samples)
        csv << s.p << ',' << s.q << ',' << fmt(s.omega) << ',' << fmt(s.mls_length) << ','
            << fmt(s.beta) << '\n';
    write_payload(out_path, csv.str());
    save_cache_file(cache_path);
    std::cerr << "beta: " << samples.size() << " samples, q in [" << r.lo << "," << r.hi
              << "]\n";
    return 0;
}

int cmd_caustics(const std::string& domain_path, const std::string& q_range, int p,
                 const std::string& cache_path, const std::string& out_path) {
    const SupportDomain domain = load_domain(domain_path);
    load_cache_file(cache_path);
    const QRange r = parse_q_range(q_range);
    std::set<std::pair<int, int>> keys;
    for (int q = r.lo; q <= r.hi; ++q) {
        if (std::gcd(p, q) != 1) continue;
        for (int j = -2; j <= 2; ++j) {
            if (q + j < 2 || 2 * p > q + j) continue;
            const Rational red = reduced(p, q + j);
            keys.insert({red.p, red.q});
        }
    }
    prefetch_orbits(domain, keys);
    const auto estimates = caustic_estimates(domain, r.lo, r.hi, p);
    std::ostringstream csv;
    csv << "q,omega,gamma_length,Q,err_bar\n";
    size_t idx = 0;
    for (int q = r.lo; q <= r.hi; ++q) {
        if (std::gcd(p, q) != 1) continue;
        const auto& e = estimates.at(idx++);
        csv << q << ',' << fmt(e.omega_mid) << ',' << fmt(e.gamma_length) << ','
            << fmt(e.lazutkin_Q) << ',' << fmt(e.err_bar) << '\n';
    }
    write_payload(out_path, csv.str());
    save_cache_file(cache_path);
    std::cerr << "caustics: " << estimates.size() << " estimates\n";
    return 0;
}

int cmd_invariants(const std::string& domain_path, const std::string& out_path) {
    const SupportDomain domain = load_domain(domain_path);
    const ordered_json j = invariants_to_json(domain);
    write_payload(out_path, j.dump(2) + "\n");
    std::cerr << "invariants: I1 " << fmt(j["I1"].get<double>()) << ", checks ibp_gap "
              << fmt(j["checks"]["ibp_gap"].get<double>()) << "\n";
    return 0;
}

int cmd_fit(const std::string& caustics_path, const std::string& domain_path, double ell_flag,
            int order, const std::string& out_path, const std::string& plot_path) {
    double ell = ell_flag;
    if (!domain_path.empty()) ell = load_domain(domain_path).perimeter();
    if (!(ell > 0.0)) throw BadSpec("fit needs --domain or a positive --ell");
    const auto estimates = read_caustics_csv(caustics_path);
    const ExpansionFit fit = fit_expansion(estimates, ell, order);
    ordered_json j;
    j["K"] = fit.order;
    j["c"] = fit.coefficients;
    j["stderr"] = fit.stderrs;
    j["residual_rms"] = fit.residual_rms;
    j["cond"] = fit.condition_number;
    j["u_window"] = {fit.u_min, fit.u_max};
    j["n_samples"] = fit.n_samples;
    write_payload(out_path, j.dump(2) + "\n");
    if (!plot_path.empty()) {
        std::ostringstream csv;
        csv << "u,y,y_fit\n";
        for (const auto& e : estimates) {
            const double u = std::pow(e.lazutkin_Q, 2.0 / 3.0);
            double model = 0.0, pw = u;
            for (int a = 0; a < fit.order; ++a, pw *= u)
                model += fit.coefficients[static_cast<size_t>(a)] * pw;
            csv << fmt(u) << ',' << fmt(e.gamma_length - ell) << ',' << fmt(model) << '\n';
        }
        std::ofstream plot(plot_path);
        if (!plot) throw BadSpec("cannot write plot file " + plot_path);
        plot << csv.str();
    }
    std::cerr << "fit: K " << fit.order << ", c1 " << fmt(fit.coefficients[0]) << ", rms "
              << fmt(fit.residual_rms) << "\n";
    return 0;
}

int cmd_ratios(const std::vector<std::string>& pairs, int k, const std::string& out_path) {
    std::vector<ExpansionFit> fits;
    std::vector<InvariantVector> invariants;
    std::vector<std::string> labels;
    for (const auto& pair : pairs) {
        const auto colon = pair.find(':');
        if (colon == std::string::npos)
            throw BadSpec("ratio pair must be fit.json:invariants.json");
        const std::string fit_path = pair.substr(0, colon);
        const std::string inv_path = pair.substr(colon + 1);
        std::ifstream fin(fit_path), iin(inv_path);
        if (!fin || !iin) throw BadSpec("cannot open ratio inputs " + pair);
        nlohmann::json fj, ij;
        fin >> fj;
        iin >> ij;
        ExpansionFit fit;
        fit.order = fj.at("K").get<int>();
        fit.coefficients = fj.at("c").get<std::vector<double>>();
        fit.stderrs = fj.value("stderr", std::vector<double>(fit.coefficients.size(), 0.0));
        fits.push_back(fit);
        InvariantVector inv;
        for (int i = 0; i < 5; ++i)
            inv.values[static_cast<size_t>(i)] = ij.at("I" + std::to_string(i)).get<double>();
        invariants.push_back(inv);
        labels.push_back(std::filesystem::path(fit_path).stem().string());
    }
    const auto entries = ratio_consistency(fits, invariants, k);
    std::ostringstream csv;
    csv << "label,k,c_k,I_k,ratio,indeterminate\n";
    for (size_t i = 0; i < entries.size(); ++i)
        csv << labels[i] << ',' << k << ',' << fmt(entries[i].coefficient) << ','
            << fmt(entries[i].invariant) << ',' << fmt(entries[i].ratio) << ','
            << (entries[i].indeterminate ? 1 : 0) << '\n';
    write_payload(out_path, csv.str());
    std::cerr << "ratios: " << entries.size() << " domains, k " << k << "\n";
    return 0;
}

int cmd_verify(const std::string& domain_path, int chords, int states, unsigned seed,
               const std::string& out_path) {
    const SupportDomain domain = load_domain(domain_path);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::ostringstream report;
    bool ok = true;
    auto line = [&](bool pass, const std::string& name, const std::string& detail) {
        ok = ok && pass;
        report << (pass ? "PASS" : "FAIL") << "  " << name << "  " << detail << "\n";
    };

    const LogCurvatureReport chain = verify_log_curvature_bound(domain);
    line(std::abs(chain.gauss_bonnet - two_pi) <= 1e-9 * two_pi, "gauss-bonnet",
         "integral " + fmt(chain.gauss_bonnet));

    const IbpReport ibp = verify_ibp_identity(domain);
    line(ibp.rel_gap < 1e-8, "ibp-identity", "rel gap " + fmt(ibp.rel_gap));

    const CompletedSquareReport csq = verify_completed_square(domain);
    const bool csq_ok = csq.minus_branch.rel_gap < 1e-7 && csq.plus_branch.rel_gap < 1e-7 &&
                        csq.minus_branch.terms_nonnegative && csq.plus_branch.terms_nonnegative;
    line(csq_ok, "completed-square",
         "gaps " + fmt(csq.minus_branch.rel_gap) + " / " + fmt(csq.plus_branch.rel_gap));

    line(chain.chain_holds, "log-curvature-chain",
         "tv " + fmt(chain.total_variation) + " <= " + fmt(chain.cauchy_schwarz_bound));

    const double twist = twist_check(domain, chords, seed);
    line(twist > 0.0, "twist-condition", "min " + fmt(twist) + " over " +
                                            std::to_string(chords) + " chords");

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> us(0.0, domain.perimeter());
    std::uniform_real_distribution<double> uphi(0.05, std::numbers::pi - 0.05);
    double worst = 0.0;
    for (int i = 0; i < states; ++i) {
        const double det = map_jacobian_det(domain, us(rng), uphi(rng));
        worst = std::max(worst, std::abs(det - 1.0));
    }
    line(worst <= 1e-6, "symplectic-jacobian",
         "max |det-1| " + fmt(worst) + " over " + std::to_string(states) + " states");

    write_payload(out_path, report.str());
    std::cerr << (ok ? "verify: all checks passed\n" : "verify: FAILURES\n");
    return ok ? 0 : 1;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Convex billiard laboratory: marked length spectrum, Mather beta function, "
                 "caustic asymptotics and curvature invariants"};
    app.require_subcommand(1);

    std::string domain_path, out_path, cache_path, q_range, caustics_path, plot_path;
    std::vector<std::string> ratio_pairs;
    double s0 = 0.0, phi0 = 1.0, tol = -1.0, ell_flag = -1.0;
    long n_steps = 100;
    int p = 1, q = 3, restarts = -1, order = 2, k_ratio = 1, chords = 10000, states = 64;
    unsigned seed = 20240915u;

    auto* d = app.add_subcommand("domain", "validate a domain spec and print its summary");
    d->add_option("--domain", domain_path)->required();
    d->add_option("--out", out_path);

    auto* m = app.add_subcommand("map", "iterate the billiard map; emits trajectory CSV");
    m->add_option("--domain", domain_path)->required();
    m->add_option("--s0", s0);
    m->add_option("--phi0", phi0)->required();
    m->add_option("--n", n_steps);
    m->add_option("--out", out_path);

    auto* o = app.add_subcommand("orbit", "solve one maximal (p,q) Birkhoff orbit");
    o->add_option("--domain", domain_path)->required();
    o->add_option("--p", p);
    o->add_option("--q", q)->required();
    o->add_option("--tol", tol);
    o->add_option("--restarts", restarts);
    o->add_option("--cache", cache_path);
    o->add_option("--out", out_path);

    auto* b = app.add_subcommand("beta", "mean minimal action table over a q range");
    b->add_option("--domain", domain_path)->required();
    b->add_option("--q", q_range)->required();
    b->add_option("--p", p);
    b->add_option("--cache", cache_path);
    b->add_option("--out", out_path);

    auto* c = app.add_subcommand("caustics", "caustic length and Lazutkin parameter sweep");
    c->add_option("--domain", domain_path)->required();
    c->add_option("--q", q_range)->required();
    c->add_option("--p", p);
    c->add_option("--cache", cache_path);
    c->add_option("--out", out_path);

    auto* i = app.add_subcommand("invariants", "boundary integral invariants I0..I4 + checks");
    i->add_option("--domain", domain_path)->required();
    i->add_option("--out", out_path);

    auto* f = app.add_subcommand("fit", "fit gamma - ell against powers of Q^{2/3}");
    f->add_option("--caustics", caustics_path)->required();
    f->add_option("--domain", domain_path);
    f->add_option("--ell", ell_flag);
    f->add_option("--K", order);
    f->add_option("--out", out_path);
    f->add_option("--plot-data", plot_path);

    auto* r = app.add_subcommand("ratios", "merge fits + invariants into a ratio table");
    r->add_option("--pair", ratio_pairs, "fit.json:invariants.json")->required();
    r->add_option("--k", k_ratio);
    r->add_option("--out", out_path);

    auto* v = app.add_subcommand("verify", "identity and inequality suite for one domain");
    v->add_option("--domain", domain_path)->required();
    v->add_option("--chords", chords);
    v->add_option("--states", states);
    v->add_option("--seed", seed);
    v->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (d->parsed()) return cmd_domain(domain_path, out_path);
        if (m->parsed()) return cmd_map(domain_path, s0, phi0, n_steps, out_path);
        if (o->parsed())
            return cmd_orbit(domain_path, p, q, tol, restarts, cache_path, out_path);
        if (b->parsed()) return cmd_beta(domain_path, q_range, p, cache_path, out_path);
        if (c->parsed()) return cmd_caustics(domain_path, q_range, p, cache_path, out_path);
        if (i->parsed()) return cmd_invariants(domain_path, out_path);
        if (f->parsed())
            return cmd_fit(caustics_path, domain_path, ell_flag, order, out_path, plot_path);
        if (r->parsed()) return cmd_ratios(ratio_pairs, k_ratio, out_path);
        if (v->parsed()) return cmd_verify(domain_path, chords, states, seed, out_path);
    } catch (const BadSpec& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConvexityViolation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const OrderTooHigh& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CoincidentPoints& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const TangencyGuard& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InsufficientSamples& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        // NoConvergence, OrderCollapse, NonMonotone, IllConditioned, ...
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("billiard");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace billiard::cli
