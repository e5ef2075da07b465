#include "xyflow/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xyflow/errors.hpp"

namespace xyflow {
namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr double kTieTolerance = 1e-12;
constexpr double kKernelTol = 1e-15;

// Coefficients a_n = 2 (-1)^n exp(-n^2 t) of log p_t(theta, pi) as a
// Chebyshev series in c = cos(theta): p = 1 + sum a_n T_n(c).
std::vector<double> chebyshev_coeffs(double t) {
    const auto trunc = fourier_truncation(t, kKernelTol);
    std::vector<double> a(static_cast<std::size_t>(trunc.n_terms) + 1, 0.0);
    for (int n = 1; n <= trunc.n_terms; ++n) {
        a[n] = 2.0 * ((n % 2) ? -1.0 : 1.0) * std::exp(-static_cast<double>(n) * n * t);
    }
    return a;
}

// p(c) and p'(c) via the recurrences for T_n and U_{n-1}.
void chebyshev_eval(const std::vector<double>& a, double c, double& p, double& dp) {
    p = 1.0;
    dp = 0.0;
    double t_prev = 1.0, t_cur = c;      // T_0, T_1
    double u_prev = 0.0, u_cur = 1.0;    // U_{-1}, U_0
    for (std::size_t n = 1; n < a.size(); ++n) {
        p += a[n] * t_cur;
        dp += a[n] * static_cast<double>(n) * u_cur;  // T_n' = n U_{n-1}
        const double t_next = 2.0 * c * t_cur - t_prev;
        const double u_next = 2.0 * c * u_cur - u_prev;
        t_prev = t_cur;
        t_cur = t_next;
        u_prev = u_cur;
        u_cur = u_next;
    }
}

struct Refined {
    double c;
    double g;
    bool reached;
};

// Maximize g over c in [lo, hi]: golden-section to shrink the bracket, then
// bisection on dg/dc for the final digits.
Refined refine(const SitePotential& sp, double lo, double hi, double tol) {
    auto g = [&](double c) { return site_potential_c(c, sp); };
    double a = lo, b = hi;
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = g(x1), f2 = g(x2);
    while (b - a > std::max(1e-6, tol)) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = g(x1);
        }
    }
    // The maximum may sit on a clipped end of the original bracket.
    if (a <= lo && site_potential_dc(lo, sp) <= 0.0) return {lo, g(lo), true};
    if (b >= hi && site_potential_dc(hi, sp) >= 0.0) return {hi, g(hi), true};

    double da = site_potential_dc(a, sp), db = site_potential_dc(b, sp);
    if (!(da > 0.0 && db < 0.0)) {
        // Widen once to the full original bracket before giving up.
        a = lo;
        b = hi;
        da = site_potential_dc(a, sp);
        db = site_potential_dc(b, sp);
        if (!(da > 0.0 && db < 0.0)) {
            const double c = 0.5 * (a + b);
            return {c, g(c), false};
        }
    }
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double dm = site_potential_dc(m, sp);
        if (dm > 0.0) {
            a = m;
        } else if (dm < 0.0) {
            b = m;
        } else {
            a = b = m;
        }
    }
    const double c = 0.5 * (a + b);
    return {c, g(c), true};
}

bool degenerate_at(double beta_h, double t, bool full_log) {
    const auto sp = full_log ? SitePotential::full_log(beta_h, t)
                             : SitePotential::restricted(beta_h, t);
    return find_maximizers(sp, 1024, 1e-13).degenerate;
}

// Increasing root of f(h) = target on (0, 1] by bisection.
double solve_increasing(double (*f)(double), double target) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        (f(m) < target ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

double upper_branch(double h) { return 2.0 * h + 4.0 * h * h + 8.0 * h * h * h; }
double lower_branch(double h) { return 2.0 * h - 4.0 * h * h + 8.0 * h * h * h; }

// g(c) - g(-1) at the interior local maximum c+ of the cubic
// g(c) = delta c - 2 h^2 c^2 - (8/3) h^3 c^3, delta = beta h - 2 h.
double interior_advantage(double beta_h, double h) {
    const double delta = beta_h - 2.0 * h;
    const double disc = 16.0 * h * h * h * h + 32.0 * h * h * h * delta;
    if (disc < 0.0) return -1.0;
    const double c = (-4.0 * h * h + std::sqrt(disc)) / (16.0 * h * h * h);
    auto g = [&](double x) { return delta * x - 2.0 * h * h * x * x - 8.0 / 3.0 * h * h * h * x * x * x; };
    return g(c) - g(-1.0);
}

}  // namespace

SitePotential SitePotential::restricted(double beta_h, double t) {
    SitePotential sp;
    sp.beta_h = beta_h;
    sp.t = t;
    sp.coeffs = expansion(t);
    sp.h_t = sp.coeffs.h_t;
    sp.use_full_log = false;
    return sp;
}

SitePotential SitePotential::full_log(double beta_h, double t) {
    if (!(t >= kFourierCrossover)) {
        throw DomainError("full-log site potential requires t >= " +
                          std::to_string(kFourierCrossover));
    }
    SitePotential sp;
    sp.beta_h = beta_h;
    sp.t = t;
    sp.h_t = std::exp(-t);
    const double h = sp.h_t;
    sp.coeffs = {t, h, -2.0 * h, -2.0 * h * h, -8.0 / 3.0 * h * h * h,
                 t >= kExpansionTMin ? expansion(t).rest_bound : 0.0};
    sp.use_full_log = true;
    sp.kernel_series = chebyshev_coeffs(t);
    return sp;
}

double site_potential_c(double c, const SitePotential& sp) {
    if (sp.use_full_log) {
        double p = 0.0, dp = 0.0;
        chebyshev_eval(sp.kernel_series, c, p, dp);
        return sp.beta_h * c + std::log(p);
    }
    return sp.beta_h * c + sp.coeffs.evaluate(c);
}

double site_potential_dc(double c, const SitePotential& sp) {
    if (sp.use_full_log) {
        double p = 0.0, dp = 0.0;
        chebyshev_eval(sp.kernel_series, c, p, dp);
        return sp.beta_h + dp / p;
    }
    const auto& k = sp.coeffs;
    return sp.beta_h + k.c1 + c * (2.0 * k.c2 + 3.0 * k.c3 * c);
}

double site_potential(Angle theta, const SitePotential& sp) {
    const double c = std::cos(theta.radians());
    if (sp.use_full_log) {
        return sp.beta_h * c + log_kernel(theta, Angle(kPi), sp.t, kKernelTol).value;
    }
    return sp.beta_h * c + sp.coeffs.evaluate(c);
}

GroundStateReport find_maximizers(const SitePotential& sp, int grid_n, double refine_tol) {
    if (grid_n < 256) throw DomainError("find_maximizers needs grid_n >= 256");
    if (!(refine_tol > 0.0)) throw DomainError("refine_tol must be positive");

    std::vector<double> g(static_cast<std::size_t>(grid_n));
    for (int k = 0; k < grid_n; ++k) g[k] = site_potential(Angle(kTwoPi * k / grid_n), sp);
    const double best = *std::max_element(g.begin(), g.end());
    const double spread = best - *std::min_element(g.begin(), g.end());
    const double slack = std::max(1e-9, 1e-3 * spread);

    // Grid local maxima near the top, refined in c = cos(theta) on [0, pi].
    std::vector<Refined> found;
    const double step = kTwoPi / grid_n;
    bool all_reached = true;
    for (int k = 0; k < grid_n; ++k) {
        const double gk = g[k];
        if (gk < best - slack) continue;
        if (gk < g[(k + grid_n - 1) % grid_n] || gk < g[(k + 1) % grid_n]) continue;
        double theta = kTwoPi * k / grid_n;
        if (theta > kPi) theta = kTwoPi - theta;
        const double lo = std::cos(std::min(kPi, theta + step));
        const double hi = std::cos(std::max(0.0, theta - step));
        const auto r = refine(sp, lo, hi, refine_tol);
        all_reached = all_reached && r.reached;
        found.push_back(r);
    }

    GroundStateReport rep;
    rep.best_effort = !all_reached;
    rep.g_max = found.front().g;
    for (const auto& r : found) rep.g_max = std::max(rep.g_max, r.g);

    std::vector<double> cs;
    for (const auto& r : found) {
        if (r.g < rep.g_max - kTieTolerance) continue;
        const bool dup = std::any_of(cs.begin(), cs.end(), [&](double c) {
            return std::abs(c - r.c) <= 10.0 * refine_tol;
        });
        if (!dup) cs.push_back(r.c);
    }
    std::sort(cs.begin(), cs.end(), std::greater<>());

    for (double c : cs) {
        const double theta = std::acos(std::clamp(c, -1.0, 1.0));
        rep.maximizers.push_back(Angle(theta));
        if (c > -1.0 && c < 1.0) rep.maximizers.push_back(Angle(kTwoPi - theta));
    }
    if (cs.size() == 1 && cs[0] > -1.0 && cs[0] < 1.0) {
        rep.degenerate = true;
        rep.epsilon_t = std::asin(cs[0]);  // = pi/2 - arccos(c)
    }
    return rep;
}

std::optional<TimeWindow> transition_window(double beta, double h, double t_lo, double t_hi,
                                            bool use_full_log, double step, double tol) {
    if (!(beta > 0.0)) throw DomainError("transition_window requires beta > 0");
    if (!(h > 0.0)) throw DomainError("transition_window requires h > 0");
    if (!(t_hi > t_lo)) throw DomainError("transition_window needs a non-empty t range");
    const double beta_h = beta * h;

    const int n = static_cast<int>(std::floor((t_hi - t_lo) / step + 1e-9)) + 1;
    std::vector<double> ts(static_cast<std::size_t>(n));
    std::vector<char> deg(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ts[i] = std::min(t_hi, t_lo + i * step);
        deg[i] = degenerate_at(beta_h, ts[i], use_full_log);
    }

    int best_start = -1, best_len = 0;
    for (int i = 0; i < n;) {
        if (!deg[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j < n && deg[j]) ++j;
        if (j - i > best_len) {
            best_len = j - i;
            best_start = i;
        }
        i = j;
    }
    if (best_start < 0) return std::nullopt;

    auto bisect = [&](double inside, double outside) {
        while (std::abs(inside - outside) > tol) {
            const double m = 0.5 * (inside + outside);
            (degenerate_at(beta_h, m, use_full_log) ? inside : outside) = m;
        }
        return 0.5 * (inside + outside);
    };
    const int last = best_start + best_len - 1;
    const double t0 = best_start == 0 ? ts[0] : bisect(ts[best_start], ts[best_start - 1]);
    const double t1 = last == n - 1 ? ts[n - 1] : bisect(ts[last], ts[last + 1]);
    return TimeWindow{t0, t1};
}

std::optional<TimeWindow> closed_form_window(double beta_h) {
    if (!(beta_h > 0.0)) return std::nullopt;
    // Both branches increase in h; the window is h_t in (h_lo, h_hi).
    const double h_lo = solve_increasing(upper_branch, beta_h);
    double h_hi = solve_increasing(lower_branch, beta_h);
    // Past h = 1/4 the interior maximum never reaches c = -1; it loses to the
    // endpoint in a jump where both heights agree.
    if (h_hi > 0.25) {
        double lo = std::max(h_lo, 0.25), hi = 1.0;
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (lo + hi);
            (interior_advantage(beta_h, m) > 0.0 ? lo : hi) = m;
        }
        h_hi = 0.5 * (lo + hi);
    }
    if (!(h_hi > h_lo)) return std::nullopt;
    return TimeWindow{-std::log(h_hi), -std::log(h_lo)};
}

std::vector<SweepRow> ground_state_sweep(double beta, double h, const std::vector<double>& times,
                                         bool use_full_log) {
    std::vector<SweepRow> rows;
    rows.reserve(times.size());
    for (double t : times) {
        const auto sp = use_full_log ? SitePotential::full_log(beta * h, t)
                                     : SitePotential::restricted(beta * h, t);
        const auto rep = find_maximizers(sp);
        rows.push_back({beta, h, t, rep.degenerate, rep.maximizers.front().radians(),
                        rep.epsilon_t, rep.g_max});
    }
    return rows;
}

}  // namespace xyflow
