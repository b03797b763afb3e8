#include "billiard/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <tuple>

namespace billiard {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct VertexData {
    Vec2 pos;
    Vec2 tan;
    double rho = 0.0;
    double rho_prime = 0.0;
    double kappa = 0.0;
};

VertexData vertex_geometry(const SupportDomain& d, double theta) {
    double hj[2], rj[2];
    d.support_series().evaluate_jet(theta, 1, hj);
    d.curvature_radius_series().evaluate_jet(theta, 1, rj);
    const double c = std::cos(theta), s = std::sin(theta);
    VertexData v;
    v.pos = {hj[0] * c - hj[1] * s, hj[0] * s + hj[1] * c};
    v.tan = {-s, c};
    v.rho = rj[0];
    v.rho_prime = rj[1];
    v.kappa = 1.0 / rj[0];
    return v;
}

struct ChordGeom {
    double len = 0.0;
    double cos_dep = 0.0, sin_dep = 0.0; // angle with the tangent at departure
    double cos_arr = 0.0, sin_arr = 0.0; // angle with the tangent at arrival
};

ChordGeom chord_geometry(const VertexData& a, const VertexData& b) {
    const Vec2 diff = b.pos - a.pos;
    const double len = norm(diff);
    const Vec2 u = {diff.x / len, diff.y / len};
    ChordGeom c;
    c.len = len;
    c.cos_dep = dot(u, a.tan);
    c.sin_dep = cross(a.tan, u);
    c.cos_arr = dot(u, b.tan);
    c.sin_arr = cross(u, b.tan);
    return c;
}

struct ConfigEval {
    std::vector<VertexData> verts;
    std::vector<ChordGeom> chords; // chord i joins vertex i to vertex i+1 (mod q)
    std::vector<double> grad_s;    // cos phi_in - cos phi_out per vertex
    double length = 0.0;
    double residual = 0.0;
};

void eval_config(const SupportDomain& d, const std::vector<double>& th, ConfigEval& out) {
    const size_t q = th.size();
    out.verts.resize(q);
    out.chords.resize(q);
    out.grad_s.resize(q);
    for (size_t i = 0; i < q; ++i) out.verts[i] = vertex_geometry(d, th[i]);
    out.length = 0.0;
    for (size_t i = 0; i < q; ++i) {
        out.chords[i] = chord_geometry(out.verts[i], out.verts[(i + 1) % q]);
        out.length += out.chords[i].len;
    }
    out.residual = 0.0;
    for (size_t i = 0; i < q; ++i) {
        const ChordGeom& in = out.chords[(i + q - 1) % q];
        const ChordGeom& outc = out.chords[i];
        out.grad_s[i] = in.cos_arr - outc.cos_dep;
        out.residual = std::max(out.residual, std::abs(out.grad_s[i]));
    }
}

bool monotone_lift(const std::vector<double>& th, int p) {
    const size_t q = th.size();
    for (size_t i = 0; i + 1 < q; ++i) {
        const double gap = th[i + 1] - th[i];
        if (!(gap > 0.0) || !(gap < kTwoPi)) return false;
    }
    const double wrap = th[0] + kTwoPi * p - th[q - 1];
    return wrap > 0.0 && wrap < kTwoPi;
}

/// One Gauss-Seidel pass: each vertex is moved to the 1-D maximizer of its
/// two adjacent chords by safeguarded Newton inside the neighbor interval.
void coordinate_sweep(const SupportDomain& d, std::vector<double>& th, int p) {
    const int q = static_cast<int>(th.size());
    for (int i = 0; i < q; ++i) {
        const double left = (i == 0) ? th[static_cast<size_t>(q - 1)] - kTwoPi * p
                                     : th[static_cast<size_t>(i - 1)];
        const double right = (i == q - 1) ? th[0] + kTwoPi * p
                                          : th[static_cast<size_t>(i + 1)];
        const VertexData va = vertex_geometry(d, left);
        const VertexData vb = vertex_geometry(d, right);
        double lo = std::max(left, right - kTwoPi);
        double hi = std::min(right, left + kTwoPi);
        const double margin = 1e-9 * (hi - lo);
        lo += margin;
        hi -= margin;

        auto slope = [&](const VertexData& v) {
            const ChordGeom in = chord_geometry(va, v);
            const ChordGeom out = chord_geometry(v, vb);
            return v.rho * (in.cos_arr - out.cos_dep);
        };
        auto value = [&](const VertexData& v) {
            return norm(v.pos - va.pos) + norm(vb.pos - v.pos);
        };

        double t = th[static_cast<size_t>(i)];
        VertexData vt = vertex_geometry(d, t);
        const double f0 = value(vt);
        double g = slope(vt);
        if (std::abs(g) < 1e-17) continue;

        double blo = lo, bhi = hi; // slope is positive at lo+, negative at hi-
        for (int it = 0; it < 4; ++it) {
            if (g > 0.0)
                blo = t;
            else
                bhi = t;
            const ChordGeom in = chord_geometry(va, vt);
            const ChordGeom out = chord_geometry(vt, vb);
            const double h_in = in.sin_arr * in.sin_arr / in.len - vt.kappa * in.sin_arr;
            const double h_out = out.sin_dep * out.sin_dep / out.len - vt.kappa * out.sin_dep;
            const double curv = vt.rho_prime / vt.rho * g + vt.rho * vt.rho * (h_in + h_out);
            double next = (curv != 0.0) ? t - g / curv : 0.5 * (blo + bhi);
            if (!(next > blo) || !(next < bhi)) next = 0.5 * (blo + bhi);
            if (std::abs(next - t) < 1e-15) break;
            t = next;
            vt = vertex_geometry(d, t);
            g = slope(vt);
            if (std::abs(g) < 1e-17) break;
        }
        if (value(vt) >= f0 - 1e-14 * d.perimeter()) th[static_cast<size_t>(i)] = t;
    }
}

/// Dense LU with partial pivoting; returns false when a pivot underflows.
bool lu_solve(std::vector<double> a, std::vector<double>& b, int n) {
    double amax = 0.0;
    for (double v : a) amax = std::max(amax, std::abs(v));
    if (amax == 0.0) return false;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a[static_cast<size_t>(i) * n + k]) >
                std::abs(a[static_cast<size_t>(piv) * n + k]))
                piv = i;
        if (std::abs(a[static_cast<size_t>(piv) * n + k]) < 1e-14 * amax) return false;
        if (piv != k) {
            for (int j = 0; j < n; ++j)
                std::swap(a[static_cast<size_t>(k) * n + j], a[static_cast<size_t>(piv) * n + j]);
            std::swap(b[static_cast<size_t>(k)], b[static_cast<size_t>(piv)]);
        }
        const double inv = 1.0 / a[static_cast<size_t>(k) * n + k];
        for (int i = k + 1; i < n; ++i) {
            const double f = a[static_cast<size_t>(i) * n + k] * inv;
            if (f == 0.0) continue;
            a[static_cast<size_t>(i) * n + k] = 0.0;
            for (int j = k + 1; j < n; ++j)
                a[static_cast<size_t>(i) * n + j] -= f * a[static_cast<size_t>(k) * n + j];
            b[static_cast<size_t>(i)] -= f * b[static_cast<size_t>(k)];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[static_cast<size_t>(i)];
        for (int j = i + 1; j < n; ++j) acc -= a[static_cast<size_t>(i) * n + j] * b[static_cast<size_t>(j)];
        b[static_cast<size_t>(i)] = acc / a[static_cast<size_t>(i) * n + i];
    }
    return true;
}

/// Newton direction for dL/dtheta = 0 from an evaluated configuration.
bool newton_direction(const ConfigEval& eval, double levenberg, std::vector<double>& delta) {
    const int q = static_cast<int>(eval.grad_s.size());
    std::vector<double> m(static_cast<size_t>(q) * q, 0.0);
    delta.assign(static_cast<size_t>(q), 0.0);
    for (int i = 0; i < q; ++i) {
        const int j = (i + 1) % q;
        const ChordGeom& c = eval.chords[static_cast<size_t>(i)];
        const VertexData& vi = eval.verts[static_cast<size_t>(i)];
        const VertexData& vj = eval.verts[static_cast<size_t>(j)];
        const double h11 = c.sin_dep * c.sin_dep / c.len - vi.kappa * c.sin_dep;
        const double h22 = c.sin_arr * c.sin_arr / c.len - vj.kappa * c.sin_arr;
        const double h12 = c.sin_dep * c.sin_arr / c.len;
        m[static_cast<size_t>(i) * q + i] += vi.rho * vi.rho * h11;
        m[static_cast<size_t>(j) * q + j] += vj.rho * vj.rho * h22;
        m[static_cast<size_t>(i) * q + j] += vi.rho * vj.rho * h12;
        m[static_cast<size_t>(j) * q + i] += vi.rho * vj.rho * h12;
    }
    for (int i = 0; i < q; ++i) {
        const VertexData& vi = eval.verts[static_cast<size_t>(i)];
        m[static_cast<size_t>(i) * q + i] += vi.rho_prime * eval.grad_s[static_cast<size_t>(i)];
        delta[static_cast<size_t>(i)] = -vi.rho * eval.grad_s[static_cast<size_t>(i)];
    }
    if (levenberg > 0.0) {
        double dmax = 0.0;
        for (int i = 0; i < q; ++i)
            dmax = std::max(dmax, std::abs(m[static_cast<size_t>(i) * q + i]));
        for (int i = 0; i < q; ++i) m[static_cast<size_t>(i) * q + i] -= levenberg * dmax;
    }
    return lu_solve(std::move(m), delta, q);
}

/// Full Newton step with monotonicity-safe damping. Near-integrable tables
/// leave an almost-neutral direction along the orbit family; the family is a
/// curved manifold, so when plain damping stalls, a large predictor step is
/// followed by one corrector solve before judging the residual.
bool newton_step(const SupportDomain& d, std::vector<double>& th, int p, ConfigEval& eval,
                 double levenberg) {
    std::vector<double> delta;
    if (!newton_direction(eval, levenberg, delta)) return false;

    const double res0 = eval.residual;
    std::vector<double> trial(th.size());
    std::vector<double> best;
    ConfigEval best_eval;
    double best_res = res0;

    auto consider = [&](const std::vector<double>& cand) {
        if (!monotone_lift(cand, p)) return false;
        ConfigEval cand_eval;
        eval_config(d, cand, cand_eval);
        if (cand_eval.residual < best_res) {
            best = cand;
            best_eval = std::move(cand_eval);
            best_res = best_eval.residual;
        }
        // substantial reduction: stop searching
        return best_res < 0.5 * res0 || best_res < 5e-15;
    };

    bool done = false;
    double alpha = 1.0;
    for (int damp = 0; damp < 12 && !done; ++damp, alpha *= 0.5) {
        for (size_t i = 0; i < th.size(); ++i) trial[i] = th[i] + alpha * delta[i];
        done = consider(trial);
    }

    // Predictor-corrector pass for the curved near-neutral family direction.
    std::vector<double> correct, corrected(th.size());
    alpha = 1.0;
    for (int outer = 0; outer < 3 && !done; ++outer, alpha *= 0.5) {
        for (size_t i = 0; i < th.size(); ++i) trial[i] = th[i] + alpha * delta[i];
        if (!monotone_lift(trial, p)) continue;
        ConfigEval mid;
        eval_config(d, trial, mid);
        if (!newton_direction(mid, levenberg, correct)) continue;
        double beta = 1.0;
        for (int inner = 0; inner < 4 && !done; ++inner, beta *= 0.5) {
            for (size_t i = 0; i < th.size(); ++i) corrected[i] = trial[i] + beta * correct[i];
            done = consider(corrected);
        }
    }

    if (best_res < res0) {
        th = std::move(best);
        eval = std::move(best_eval);
        return true;
    }
    return false;
}

std::vector<double> lazutkin_init(const SupportDomain& d, int p, int q, double offset,
                                  double jitter, std::mt19937& rng) {
    std::vector<double> th(static_cast<size_t>(q));
    const double total = d.lazutkin_total();
    for (int i = 0; i < q; ++i) {
        const double target = total * (offset + static_cast<double>(p) * i / q);
        th[static_cast<size_t>(i)] = d.theta_from_lazutkin(target);
    }
    if (jitter > 0.0) {
        double min_gap = th[0] + kTwoPi * p - th[static_cast<size_t>(q - 1)];
        for (int i = 0; i + 1 < q; ++i)
            min_gap = std::min(min_gap, th[static_cast<size_t>(i + 1)] - th[static_cast<size_t>(i)]);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (auto& t : th) t += jitter * min_gap * uni(rng);
    }
    return th;
}

/// Cyclically aligned max vertex distance between two wrapped configurations.
double config_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    auto wrap = [](double t) { return t - kTwoPi * std::floor(t / kTwoPi); };
    double best = std::numeric_limits<double>::infinity();
    for (size_t shift = 0; shift < a.size(); ++shift) {
        double worst = 0.0;
        for (size_t i = 0; i < a.size(); ++i) {
            const double delta = wrap(a[i]) - wrap(b[(i + shift) % b.size()]);
            const double circ = std::abs(std::remainder(delta, kTwoPi));
            worst = std::max(worst, circ);
        }
        best = std::min(best, worst);
    }
    return best;
}

} // namespace

PeriodicOrbit solve_orbit(const SupportDomain& domain, int p, int q, const OrbitOptions& opts) {
    if (q < 2 || q > kMaxBounceCount)
        throw BadSpec("bounce count q must be in [2, " + std::to_string(kMaxBounceCount) + "]");
    if (p < 1 || p > q - 1) throw BadSpec("winding number p must be in [1, q-1]");
    if (std::gcd(p, q) != 1) throw BadSpec("rotation number p/q must be in lowest terms");

    const double tol =
        opts.residual_tol < 0.0 ? 1e-10 * domain.perimeter() : opts.residual_tol;
    std::mt19937 rng(opts.seed);

    PeriodicOrbit best;
    bool have_candidate = false;
    int collapses = 0;
    const int attempts = std::max(1, opts.restarts + 1);

    for (int attempt = 0; attempt < attempts; ++attempt) {
        // Shifting the seed phase by 1/q relabels the same configuration, so
        // restarts equidistribute inside that fundamental cell: near-circular
        // tables break each orbit family into a max/saddle pair, and a phase
        // near the saddle polishes onto it instead of the maximum.
        const double offset = static_cast<double>(attempt) / (attempts * q);
        const double jitter = (attempt == 0) ? 0.0 : 0.02;
        std::vector<double> th = lazutkin_init(domain, p, q, offset, jitter, rng);
        if (!monotone_lift(th, p)) {
            ++collapses;
            continue;
        }

        ConfigEval eval;
        eval_config(domain, th, eval);
        if (opts.length_trace) opts.length_trace->push_back(eval.length);

        // Phase 1: cyclic coordinate maximization.
        for (int sweep = 0; sweep < opts.max_sweeps && eval.residual > 1e-6; ++sweep) {
            coordinate_sweep(domain, th, p);
            if (!monotone_lift(th, p)) break;
            eval_config(domain, th, eval);
            if (opts.length_trace) opts.length_trace->push_back(eval.length);
        }
        if (!monotone_lift(th, p)) {
            ++collapses;
            continue;
        }

        // Phase 2: Newton polish of the reflection equations.
        for (int it = 0; it < opts.max_newton && eval.residual > 5e-15; ++it) {
            if (std::getenv("BILLIARD_ORBIT_TRACE"))
                std::fprintf(stderr, "attempt %d newton %d residual %.3e len %.15f\n", attempt,
                             it, eval.residual, eval.length);
            if (newton_step(domain, th, p, eval, 0.0)) continue;
            if (newton_step(domain, th, p, eval, 1e-8)) continue;
            // No productive Newton direction; try one more sweep.
            std::vector<double> trial = th;
            coordinate_sweep(domain, trial, p);
            if (!monotone_lift(trial, p)) break;
            ConfigEval next;
            eval_config(domain, trial, next);
            if (next.residual >= eval.residual) break; // stagnation
            th = std::move(trial);
            eval = std::move(next);
        }

        PeriodicOrbit orbit;
        orbit.p = p;
        orbit.q = q;
        orbit.thetas = th;
        orbit.length = eval.length;
        orbit.residual = eval.residual;
        orbit.converged = eval.residual <= tol;
        orbit.restarts_used = attempt;

        if (!have_candidate) {
            best = orbit;
            have_candidate = true;
        } else {
            if (std::abs(orbit.length - best.length) < 1e-10 * domain.perimeter() &&
                config_distance(orbit.thetas, best.thetas) > 1e-6)
                best.degenerate_family = true;
            if (orbit.length > best.length) {
                const bool deg = best.degenerate_family;
                best = orbit;
                best.degenerate_family = deg;
            }
        }
    }

    if (!have_candidate)
        throw OrderCollapse("orbit (" + std::to_string(p) + "," + std::to_string(q) +
                            "): monotone order lost in every restart");
    if (!best.converged) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e above tolerance %.3e", best.residual, tol);
        throw NoConvergence("orbit (" + std::to_string(p) + "," + std::to_string(q) +
                            ") residual " + buf + " after restarts");
    }

    // Normalize the lift so that theta_1 lands in [0, 2 pi).
    const double shift = kTwoPi * std::floor(best.thetas[0] / kTwoPi);
    for (auto& t : best.thetas) t -= shift;
    return best;
}

bool validate_rotation_number(const SupportDomain& domain, const PeriodicOrbit& orbit) {
    if (!orbit.converged || orbit.thetas.size() < 2) return false;
    const double ell = domain.perimeter();
    const VertexData v0 = vertex_geometry(domain, orbit.thetas[0]);
    const VertexData v1 = vertex_geometry(domain, orbit.thetas[1]);
    const ChordGeom chord = chord_geometry(v0, v1);
    const double phi = std::atan2(chord.sin_dep, chord.cos_dep);
    const double s0 = domain.arclength(orbit.thetas[0]);
    BilliardState state = make_state(domain, s0, phi);
    try {
        for (int k = 0; k < orbit.q; ++k) {
            state = billiard_map(domain, state);
            if (k + 1 < orbit.q) {
                // the map's footprints must track the claimed vertices
                const double expected = domain.arclength(orbit.thetas[static_cast<size_t>(k + 1)]);
                if (std::abs(state.lift_s - expected) > 1e-6 * ell) return false;
            }
        }
    } catch (const std::exception&) {
        return false;
    }
    const double advance_err = std::abs(state.lift_s - (s0 + ell * orbit.p));
    const double return_err = std::abs(std::remainder(state.lift_s - s0, ell));
    return advance_err <= 1e-6 * ell && return_err <= 1e-6 * ell;
}

namespace {
std::mutex g_mls_mutex;
std::map<std::tuple<uint64_t, int, int>, double> g_mls_cache;
} // namespace

double mls(const SupportDomain& domain, int p, int q) {
    const auto key = std::make_tuple(domain.hash(), p, q);
    {
        std::lock_guard<std::mutex> lock(g_mls_mutex);
        const auto it = g_mls_cache.find(key);
        if (it != g_mls_cache.end()) return it->second;
    }
    const double length = solve_orbit(domain, p, q).length;
    {
        std::lock_guard<std::mutex> lock(g_mls_mutex);
        g_mls_cache[key] = length;
    }
    return length;
}

std::vector<MlsCacheEntry> mls_cache_snapshot() {
    std::lock_guard<std::mutex> lock(g_mls_mutex);
    std::vector<MlsCacheEntry> out;
    out.reserve(g_mls_cache.size());
    for (const auto& [key, len] : g_mls_cache)
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), len});
    return out;
}

void mls_cache_merge(const std::vector<MlsCacheEntry>& entries) {
    std::lock_guard<std::mutex> lock(g_mls_mutex);
    for (const auto& e : entries)
        g_mls_cache[std::make_tuple(e.domain_hash, e.p, e.q)] = e.length;
}

void mls_cache_clear() {
    std::lock_guard<std::mutex> lock(g_mls_mutex);
    g_mls_cache.clear();
}

} // namespace billiard
