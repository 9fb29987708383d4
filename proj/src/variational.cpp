#include "gergm/variational.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "gergm/errors.hpp"
#include "gergm/numeric.hpp"

namespace gergm {

using numeric::kInf;

std::vector<double> ModelSpec::betas() const {
    std::vector<double> b;
    b.reserve(terms.size());
    for (const auto& t : terms) b.push_back(t.beta);
    return b;
}

ModelSpec ModelSpec::with_betas(const std::vector<double>& b) const {
    if (b.size() != terms.size())
        throw ConfigError("with_betas: expected " + std::to_string(terms.size()) +
                          " coefficients");
    ModelSpec out = *this;
    for (size_t i = 0; i < b.size(); ++i) out.terms[i].beta = b[i];
    return out;
}

SolverPath validate_path(const ModelSpec& spec) {
    if (spec.terms.empty()) throw AdmissibilityError("model has no statistics");
    for (const auto& t : spec.terms)
        if (!t.motif.unit_weights())
            throw AdmissibilityError(
                "scalar variational reduction requires unit motif weights (" +
                t.motif.describe() + ")");

    const bool all_stars = std::all_of(
        spec.terms.begin(), spec.terms.end(), [](const ModelTerm& t) {
            const auto f = t.motif.family();
            return f == MotifFamily::edge || f == MotifFamily::two_star ||
                   f == MotifFamily::j_star;
        });
    if (all_stars) return SolverPath::star_family;

    // Polynomial path: non-negative coefficients on every motif with >= 2
    // edges, and either a non-negative base support or even edge counts.
    const bool nonneg_support = spec.base.support().lo >= 0.0;
    for (const auto& t : spec.terms) {
        if (t.motif.edge_count() < 2) continue;
        if (t.beta < 0.0)
            throw AdmissibilityError("motif " + t.motif.describe() +
                                     " has beta < 0; no scalar reduction applies");
        if (!nonneg_support && t.motif.edge_count() % 2 != 0)
            throw AdmissibilityError(
                "motif " + t.motif.describe() +
                " has odd edge count over a signed base; no scalar reduction applies");
    }
    return SolverPath::polynomial;
}

std::function<double(double)> objective(const ModelSpec& spec,
                                        const RateFunction& h) {
    std::vector<std::pair<double, int>> poly;  // (beta, edge count)
    for (const auto& t : spec.terms) poly.emplace_back(t.beta, t.motif.edge_count());
    return [poly, &h](double u) {
        const double rate = h(u);
        if (rate == kInf) return -kInf;
        double p = 0.0;
        for (const auto& [b, e] : poly) p += b * std::pow(u, e);
        return p - 0.5 * rate;
    };
}

namespace {

// Expands around u0 until g decreases on both sides, then polishes with
// Brent; used for both maximizer refinement and branch continuation.
double refine_local_max(const std::function<double(double)>& g, double u0,
                        double lo, double hi, double tol) {
    double step = std::max(1e-4, 1e-4 * std::abs(u0));
    double a = std::max(lo, u0 - step), b = std::min(hi, u0 + step);
    double gu = g(u0);
    // walk uphill if u0 is not already bracketing a max
    for (int it = 0; it < 200; ++it) {
        const double ga = g(a), gb = g(b);
        if (ga <= gu && gb <= gu) break;
        if (gb > gu) {
            a = u0; u0 = b; gu = gb;
            step *= 2.0;
            b = std::min(hi, u0 + step);
            if (u0 == hi) break;
        } else {
            b = u0; u0 = a; gu = ga;
            step *= 2.0;
            a = std::max(lo, u0 - step);
            if (u0 == lo) break;
        }
    }
    const double x = numeric::brent_minimize([&](double u) { return -g(u); }, a, b, tol);
    return g(x) >= gu ? x : u0;
}

struct Candidate {
    double u;
    double value;
};

}  // namespace

VariationalSolution solve(const ModelSpec& spec, const RateFunction& h,
                          const SolveOptions& opts) {
    validate_path(spec);
    auto g = objective(spec, h);
    const SupportHull hull = h.hull();

    // Bracket: support hull where finite, else a coercivity-certified window.
    double lo = hull.lo, hi = hull.hi;
    double interior_best = -kInf;
    {
        const double probe_lo = std::isfinite(lo) ? lo : -opts.bracket_start;
        const double probe_hi = std::isfinite(hi) ? hi : opts.bracket_start;
        for (int i = 0; i <= 256; ++i) {
            const double u = probe_lo + (probe_hi - probe_lo) * i / 256.0;
            interior_best = std::max(interior_best, g(u));
        }
    }
    auto certify = [&](double& bound, double direction) {
        if (std::isfinite(bound)) return;
        double u = opts.bracket_start;
        while (true) {
            const double edge = direction * u;
            const double g_edge = g(edge);
            interior_best = std::max(interior_best, g_edge);
            const bool low_enough = g_edge < interior_best - opts.coercivity_margin;
            const bool increasing = g(edge) > g(direction * u * 0.999);
            if (low_enough && !increasing) {
                bound = edge;
                return;
            }
            if (u >= opts.bracket_cap) {
                if (g_edge > interior_best - 1.0 || increasing)
                    throw NonCoerciveError(
                        "objective not coercive: g(" + std::to_string(edge) +
                        ") = " + std::to_string(g_edge) + " vs interior max " +
                        std::to_string(interior_best));
                bound = edge;
                return;
            }
            u *= 2.0;
        }
    };
    certify(hi, +1.0);
    certify(lo, -1.0);

    // Coarse scan, then Brent refinement of every interior local max.
    const int N = opts.scan_points;
    std::vector<double> us(N), gs(N);
    for (int i = 0; i < N; ++i) {
        us[i] = lo + (hi - lo) * i / (N - 1.0);
        gs[i] = g(us[i]);
    }
    std::vector<Candidate> cands;
    // A few Newton steps on the derivative recover location accuracy that
    // Brent leaves on the table in flat objectives (value converges as the
    // square of the location error).
    auto polish = [&](double u) {
        for (int it = 0; it < 6; ++it) {
            const double h1 = 1e-5 * std::max(1.0, std::abs(u));
            const double g0 = g(u);
            const double gp = (g(u + h1) - g(u - h1)) / (2.0 * h1);
            const double gpp = (g(u + h1) - 2.0 * g0 + g(u - h1)) / (h1 * h1);
            if (!(gpp < 0.0) || !std::isfinite(gp)) break;
            const double next = u - gp / gpp;
            if (!(next > lo && next < hi)) break;
            const bool done = std::abs(next - u) < 1e-12 * std::max(1.0, std::abs(u));
            u = next;
            if (done) break;
        }
        return u;
    };
    auto add_candidate = [&](double u) {
        u = polish(u);
        const double v = g(u);
        if (v == -kInf) return;
        for (auto& c : cands)
            if (std::abs(c.u - u) < 1e-7) {
                if (v > c.value) c = {u, v};
                return;
            }
        cands.push_back({u, v});
    };
    for (int i = 1; i + 1 < N; ++i) {
        if (gs[i] >= gs[i - 1] && gs[i] >= gs[i + 1] && std::isfinite(gs[i])) {
            const double x = numeric::brent_minimize(
                [&](double u) { return -g(u); }, us[i - 1], us[i + 1], opts.brent_tol);
            add_candidate(x);
        }
    }
    if (std::isfinite(gs[0]) && gs[0] >= gs[1]) add_candidate(us[0]);
    if (std::isfinite(gs[N - 1]) && gs[N - 1] >= gs[N - 2]) add_candidate(us[N - 1]);
    if (cands.empty()) throw NumericError("variational solve: no finite maximizer found");

    double best = -kInf;
    for (const auto& c : cands) best = std::max(best, c.value);

    VariationalSolution sol;
    sol.psi = best;
    sol.coercive = true;
    for (const auto& c : cands)
        if (c.value >= best - opts.value_gap) {
            sol.maximizers.push_back(c.u);
            sol.g_values.push_back(c.value);
        }
    // ascending in u
    std::vector<size_t> order(sol.maximizers.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return sol.maximizers[a] < sol.maximizers[b];
    });
    std::vector<double> mu, mg;
    for (size_t i : order) {
        mu.push_back(sol.maximizers[i]);
        mg.push_back(sol.g_values[i]);
    }
    sol.maximizers = std::move(mu);
    sol.g_values = std::move(mg);
    sol.degenerate = sol.maximizers.size() >= 2;

    int max_degree = 0;
    for (const auto& t : spec.terms) max_degree = std::max(max_degree, t.motif.edge_count());
    if (static_cast<int>(sol.maximizers.size()) > max_degree + 1)
        throw NumericError("variational solve: maximizer count exceeds degree bound");
    return sol;
}

VariationalSolution solve(const ModelSpec& spec, const SolveOptions& opts) {
    RateFunction h(spec.base);
    return solve(spec, h, opts);
}

int PhaseScanResult::flag_count() const {
    int c = 0;
    for (const auto& p : points) c += (p.jump_flag || p.degenerate_flag) ? 1 : 0;
    return c;
}

namespace {

double linf_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::vector<double> lerp(const std::vector<double>& a, const std::vector<double>& b,
                         double t) {
    std::vector<double> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return out;
}

}  // namespace

PhaseScanResult phase_scan(const ModelSpec& spec_template,
                           const std::vector<std::vector<double>>& grid,
                           const std::vector<std::size_t>& segment_breaks,
                           const PhaseScanOptions& opts) {
    PhaseScanResult result;
    result.points.resize(grid.size());
    RateFunction h(spec_template.base);

    auto solve_at = [&](const std::vector<double>& beta) {
        return solve(spec_template.with_betas(beta), h, opts.solve);
    };

    // Solve every grid point; worker pool with order-stable result slots.
    {
        std::atomic<size_t> next{0};
        auto work = [&] {
            for (size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
                ScanPoint& p = result.points[i];
                p.beta = grid[i];
                try {
                    p.solution = solve_at(grid[i]);
                    p.degenerate_flag = p.solution->degenerate;
                } catch (const std::exception& e) {
                    p.error = e.what();
                }
            }
        };
        const int workers = std::max(1, std::min<int>(opts.jobs, static_cast<int>(grid.size())));
        if (workers == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }
    }

    auto is_break = [&](size_t i) {
        return std::find(segment_breaks.begin(), segment_breaks.end(), i) !=
               segment_breaks.end();
    };

    // Jump detection: continue the argmax branch from point i into the
    // objective at point i+1; flag when the global argmax leaves the
    // continued branch by more than jump_factor times the within-branch move.
    std::vector<size_t> flagged_pairs;
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
        if (is_break(i + 1)) continue;
        const auto& a = result.points[i];
        auto& b = result.points[i + 1];
        if (!a.solution || !b.solution) continue;
        const double u_prev = a.solution->maximizers.front();
        const double u_next = b.solution->maximizers.front();
        auto g_next = objective(spec_template.with_betas(grid[i + 1]), h);
        const SupportHull hull = h.hull();
        const double lo = std::isfinite(hull.lo) ? hull.lo : -opts.solve.bracket_cap;
        const double hi = std::isfinite(hull.hi) ? hull.hi : opts.solve.bracket_cap;
        const double u_cont =
            refine_local_max(g_next, u_prev, lo, hi, opts.solve.brent_tol);
        const double within_branch = std::abs(u_cont - u_prev);
        const double threshold =
            opts.jump_factor * std::max({linf_diff(grid[i], grid[i + 1]),
                                         within_branch, 1e-7});
        if (std::abs(u_next - u_cont) > threshold) {
            b.jump_flag = true;
            flagged_pairs.push_back(i);
        }
    }

    if (opts.refine_boundaries) {
        for (size_t i : flagged_pairs) {
            const auto& a = result.points[i];
            const auto& b = result.points[i + 1];
            const double u_lo_branch = a.solution->maximizers.front();
            const double u_hi_branch = b.solution->maximizers.front();
            double t_lo = 0.0, t_hi = 1.0;
            for (int it = 0; it < opts.bisection_steps; ++it) {
                const double t = 0.5 * (t_lo + t_hi);
                VariationalSolution s;
                try {
                    s = solve_at(lerp(grid[i], grid[i + 1], t));
                } catch (const std::exception&) {
                    break;
                }
                const double u = s.maximizers.front();
                if (std::abs(u - u_lo_branch) < std::abs(u - u_hi_branch))
                    t_lo = t;
                else
                    t_hi = t;
            }
            const double t_star = 0.5 * (t_lo + t_hi);
            const auto beta_star = lerp(grid[i], grid[i + 1], t_star);
            auto g_star = objective(spec_template.with_betas(beta_star), h);
            const SupportHull hull = h.hull();
            const double lo = std::isfinite(hull.lo) ? hull.lo : -opts.solve.bracket_cap;
            const double hi = std::isfinite(hull.hi) ? hull.hi : opts.solve.bracket_cap;
            BoundarySegment seg;
            seg.index_lo = i;
            seg.beta_lo = grid[i];
            seg.beta_hi = grid[i + 1];
            seg.beta_star = beta_star;
            seg.u_low = refine_local_max(g_star, u_lo_branch, lo, hi, opts.solve.brent_tol);
            seg.u_high = refine_local_max(g_star, u_hi_branch, lo, hi, opts.solve.brent_tol);
            seg.g_low = g_star(seg.u_low);
            seg.g_high = g_star(seg.u_high);
            result.boundaries.push_back(std::move(seg));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// (C2)' bound for the quartic base.

namespace {

// log of integral of exp(c1 x + c2 x^2 - x^4) over [a, b], window chosen so
// the integrand is negligible at the endpoints actually used.
double log_quartic_tilt_integral(double c1, double c2, double a, double b) {
    const int panels = std::max(24, static_cast<int>(std::ceil((b - a) * 2.0)));
    return numeric::log_integrate_exp(
        [c1, c2](double x) { return c1 * x + c2 * x * x - std::pow(x, 4.0); }, a, b,
        panels, 32);
}

double tilt_window(double c1, double c2) {
    // peak of c1 x + c2 x^2 - x^4 over a coarse scan, then expand
    double fmax = -kInf;
    for (int i = -400; i <= 400; ++i) {
        const double x = i * 0.05;
        fmax = std::max(fmax, c1 * x + c2 * x * x - std::pow(x, 4.0));
    }
    double L = 3.0;
    auto f = [&](double x) { return std::abs(c1) * x + std::max(c2, 0.0) * x * x - std::pow(x, 4.0); };
    while (f(L) > fmax - 60.0) L += 1.0;
    return L;
}

}  // namespace

C2PrimeBound c2prime_bound(double beta1, double beta2, double M, double l,
                           double eps) {
    if (M <= 0.0 || l <= 0.0 || eps < 0.0)
        throw ConfigError("c2prime_bound: need M > 0, l > 0, eps >= 0");
    const double log_c4 = std::log(quartic_c4());

    const double Lb = tilt_window(2.0 * beta1, 2.0 * beta2);
    const double log_base =
        log_c4 + log_quartic_tilt_integral(2.0 * beta1, 2.0 * beta2, -Lb, Lb);

    // C(M): the l = 0 tail integral of the proof, over x > 0.
    const double c1 = 2.0 * M * std::abs(beta2) + 2.0 * beta1;
    const double c2 = 2.0 * M * std::abs(beta2) + 2.0 * beta2;
    const double Lt = tilt_window(c1, c2);
    const double log_cm = log_quartic_tilt_integral(c1, c2, 0.0, Lt);
    if (!std::isfinite(log_cm) || !std::isfinite(log_base))
        throw NumericError("c2prime_bound: quadrature failed");

    C2PrimeBound out;
    out.log_tail_term = std::log(2.0) + log_c4 + log_cm -
                        2.0 * M * std::abs(beta2) * l * l -
                        2.0 * M * std::abs(beta1) * l;
    out.log_base_term = log_base;
    out.bound = -M * eps + 0.5 * numeric::log_add_exp(out.log_tail_term, out.log_base_term);
    out.eps_is_zero = (eps == 0.0);
    return out;
}

double c2prime_bound_l_difference(double beta1, double beta2, double M,
                                  double eps, double l_small, double l_large) {
    const auto a = c2prime_bound(beta1, beta2, M, l_small, eps);
    const auto b = c2prime_bound(beta1, beta2, M, l_large, eps);
    // 0.5 * ln( (B + T(l_large)) / (B + T(l_small)) ) via log1p; the -M eps
    // term cancels exactly.
    const double ts = std::exp(a.log_tail_term - a.log_base_term);
    const double tl = std::exp(b.log_tail_term - b.log_base_term);
    return 0.5 * std::log1p((tl - ts) / (1.0 + ts));
}

}  // namespace gergm
