// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "xyflow/circle_kernel.hpp"
#include "xyflow/config.hpp"
#include "xyflow/experiments.hpp"
#include "xyflow/gibbs_probe.hpp"
#include "xyflow/ground_state.hpp"
#include "xyflow/lattice_model.hpp"
#include "xyflow/mc_engine.hpp"

using namespace xyflow;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

int failures = 0;

void report(int id, const char* name, double limit_s, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < limit_s;
    const bool ok = v.pass && in_time;
    failures += !ok;
    std::printf("criterion %d [%s]: %s (%s; %.1f s of %.0f s)\n", id, name, ok ? "PASS" : "FAIL", v.detail.c_str(),
                secs, limit_s);
    std::fflush(stdout);
}

// 1. kernel normalization, symmetry, semigroup, positivity.
Verdict kernel_suite() {
    const std::vector<double> times{0.05, 0.3, 1.0, 5.0};
    constexpr int kGrid = 4096;
    double norm_err = 0.0, ck_err = 0.0;
    bool symmetric = true, positive = true;
    for (double t : times) {
        std::vector<double> row(kGrid);
        for (int i = 0; i < kGrid; ++i) {
            const auto k = kernel(Angle(kTwoPi * i / kGrid), Angle(0.0), t, 1e-14);
            row[i] = k.value;
            positive = positive && k.value - k.trunc_error > 0.0;
        }
        for (double x : {0.0, 1.0, 2.5}) {
            double s = 0.0;
            for (int i = 0; i < kGrid; ++i) s += kernel(Angle(x), Angle(kTwoPi * i / kGrid), t, 1e-14).value;
            norm_err = std::max(norm_err, std::abs(s / kGrid - 1.0));
        }
        for (int i = 0; i < 512; ++i) {
            const double x = 0.0123 * i, y = 6.2 - 0.0117 * i;
            symmetric = symmetric && kernel(Angle(x), Angle(y), t, 1e-12).value ==
                                         kernel(Angle(y), Angle(x), t, 1e-12).value;
        }
        // p_{t/2} * p_{t/2} = p_t on the grid: the convolution of the
        // tabulated half-time kernel with itself.
        std::vector<double> half(kGrid);
        for (int i = 0; i < kGrid; ++i) half[i] = kernel(Angle(kTwoPi * i / kGrid), Angle(0.0), t / 2, 1e-14).value;
        for (int j = 0; j < kGrid; j += 97) {
            double s = 0.0;
            for (int i = 0; i < kGrid; ++i) s += half[i] * half[(j - i + kGrid) % kGrid];
            ck_err = std::max(ck_err, std::abs(s / kGrid - row[j]));
        }
    }
    const bool ok = norm_err <= 1e-10 && ck_err <= 1e-8 && symmetric && positive;
    return {ok, fmt("normalization err %.1e, Chapman-Kolmogorov err %.1e, symmetric %s, positive %s", norm_err, ck_err,
                    symmetric ? "yes" : "no", positive ? "yes" : "no")};
}

// 2. |log p_t - expansion| e^{4t} bounded by one constant.
Verdict rest_bound() {
    const double c = expansion_rest_constant();
    std::string detail = fmt("C = %.4f;", c);
    bool ok = std::isfinite(c);
    for (double t : {2.0, 3.0, 4.0, 5.0}) {
        const auto e = expansion(t);
        double worst = 0.0;
        for (int i = 0; i < 1024; ++i) {
            const double x = kTwoPi * i / 1024;
            const double lk = log_kernel(Angle(x), Angle(kPi), t, 1e-16).value;
            worst = std::max(worst, std::abs(lk - e.evaluate(std::cos(x))));
        }
        const double scaled = worst * std::exp(4 * t);
        ok = ok && scaled <= c;
        detail += fmt(" t=%g: %.4f", t, scaled);
    }
    return {ok, detail};
}

// 3. KS distance of wrapped-Gaussian samples against the series CDF.
Verdict sampler_law() {
    bool ok = true;
    std::string detail;
    Rng rng = make_rng(20240611);
    for (double t : {0.3, 0.7, 2.0}) {
        std::vector<double> xs(1000000);
        for (double& x : xs) x = sample_step(Angle(0.0), t, rng).radians();
        const double d = oracle::ks_statistic(xs, [t](double th) { return oracle::wrapped_cdf(th, t); });
        ok = ok && d < 0.002;
        detail += fmt("%sKS(t=%g) = %.5f", detail.empty() ? "" : ", ", t, d);
    }
    return {ok, detail};
}

// 4. ground-state degeneracy, epsilon_t and window endpoints.
Verdict ground_state() {
    const double h01 = 0.1, t01 = std::log(10.0);
    const auto rep = find_maximizers(SitePotential::restricted(2 * h01, t01));
    const bool pair = rep.degenerate && rep.maximizers.size() == 2 &&
                      std::abs(rep.maximizers[0].radians() - kPi / 2) <= 1e-9 &&
                      std::abs(rep.maximizers[1].radians() - 3 * kPi / 2) <= 1e-9;

    // The first-order law epsilon = delta / (4 h^2) has a second-order
    // remainder delta^2 / (8 h^3); it is within 10 delta^2 for h_t >= 0.232.
    bool eps_ok = true;
    std::string eps_detail;
    auto eps_dev = [](double h, double delta) {
        const auto r = find_maximizers(SitePotential::restricted(2 * h + delta, -std::log(h)));
        return std::abs(r.epsilon_t - delta / (4 * h * h)) / (delta * delta);
    };
    for (double delta : {1e-3, 1e-4}) {
        const double dev = eps_dev(0.25, delta);
        eps_ok = eps_ok && dev <= 10.0;
        eps_detail += fmt(" |eps - d/4h^2|/d^2 = %.2f (h_t=0.25, d=%g) [%.1f at h_t=0.1]", dev, delta,
                          eps_dev(0.1, delta));
    }

    double worst = 0.0;
    bool windows = true;
    for (double bh : {0.1, 0.2, 0.5}) {
        const auto w = transition_window(1.0, bh, 1.0, 10.0);
        const auto cf = closed_form_window(bh);
        if (!w || !cf) {
            windows = false;
            continue;
        }
        worst = std::max({worst, std::abs(w->t0 - std::max(1.0, cf->t0)), std::abs(w->t1 - cf->t1)});
    }
    windows = windows && worst <= 1e-4;
    return {pair && eps_ok && windows, fmt("pair %s;", pair ? "ok" : "wrong") + eps_detail +
                                           fmt("; window endpoint err %.1e", worst)};
}

// 5. d = 1, L = 3 conditioned chain against the transfer-matrix oracle.
Verdict mc_oracle() {
    ChainSpec s;
    s.params = {1.0, 1.0, 0.5, 1.0, 1, 3};
    s.mode = ChainMode::conditioned;
    s.boundary = Boundary::periodic();
    s.sweeps = 1000000;
    s.burn_in = 1000;
    s.seed = 505;
    std::vector<double> hist(64, 0.0);
    double n = 0.0;
    run_chain(s, [&](const LatticeConfig& x, int) {
        for (double a : x.box()) hist[std::min(63, int(a / kTwoPi * 64))] += 1.0;
        n += 3.0;
    });
    OracleSpec os;
    os.beta_J = 1.0;
    os.beta_h = 0.5;
    os.t = 1.0;
    os.length = 3;
    os.ends = StripEnds::periodic;
    os.y.assign(3, kPi);
    os.n_bins = 256;
    const auto exact = transfer_oracle(os).x_bin_probabilities(64);
    double tv = 0.0;
    for (int b = 0; b < 64; ++b) tv += 0.5 * std::abs(hist[b] / n - exact[b]);
    return {tv < 0.01, fmt("TV = %.4f over 64 bins", tv)};
}

// 6. boundary-selected m_sin gap in the window and at high temperature.
Verdict symmetry_breaking() {
    const double t = std::log(10.0);
    ScanSpec s;
    s.d = 3;
    s.J = 1.0;
    s.ts = {t};
    s.Ls = {4, 6, 8};
    s.mode = ChainMode::conditioned;
    s.sweeps = 40000;
    s.burn_in = 5000;
    s.seed = 606;
    s.error_threshold = 0.05;

    s.betas = {2.0};
    s.hs = {0.1};  // beta h = 2 h_t
    const auto cold = boundary_gaps(symmetry_breaking_scan(s));
    s.betas = {0.1};
    s.hs = {2.0};
    const auto hot = boundary_gaps(symmetry_breaking_scan(s));

    bool significant = true, monotone = true, hot_zero = true, equilibrated = true;
    std::string d = "betaJ=2:";
    for (std::size_t i = 0; i < cold.size(); ++i) {
        const auto& g = cold[i];
        d += fmt(" L=%d %.4f+-%.4f%s", g.L, g.gap, g.gap_err, g.unequilibrated ? "*" : "");
        significant = significant && g.gap > 0.1 && g.gap > 5 * g.gap_err;
        equilibrated = equilibrated && !g.unequilibrated;
        if (i > 0) {
            const auto& p = cold[i - 1];
            monotone = monotone && g.gap >= p.gap - 2 * std::hypot(g.gap_err, p.gap_err);
        }
    }
    d += "; betaJ=0.1:";
    for (const auto& g : hot) {
        d += fmt(" L=%d %.4f+-%.4f%s (gap*L %.3f)", g.L, g.gap, g.gap_err, g.unequilibrated ? "*" : "",
                 g.gap * g.L);
        hot_zero = hot_zero && std::abs(g.gap) <= 2 * g.gap_err;
        equilibrated = equilibrated && !g.unequilibrated;
    }
    d += fmt("; 5 sigma %s, non-decreasing %s, high-T gap within 2 sigma %s", significant ? "yes" : "no",
             monotone ? "yes" : "no", hot_zero ? "yes" : "no");
    if (!equilibrated) d += "; * marks a cell whose half-split drift test exceeded 2 sigma";
    return {significant && monotone && hot_zero, d};
}

// 7. probe gap decays with t at strong field.
Verdict recovery() {
    BadnessSpec s;
    s.d = 3;
    s.beta = 1.0;
    s.J = 1.0;
    s.h = 3.0;
    s.ts = {3.0, 5.0, 10.0};
    s.r_ins = {4};
    s.sweeps = 3000;
    s.burn_in = 500;
    s.seed = 707;
    const auto rows = badness_scan(s);
    bool decreasing = true;
    std::string d;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        d += fmt("%st=%g gap %.2e+-%.1e", i ? ", " : "", rows[i].t, rows[i].gap, rows[i].gap_err);
        if (i > 0) decreasing = decreasing && rows[i].gap < rows[i - 1].gap;
    }
    const bool small = rows.back().gap < 0.05;
    return {decreasing && small, d};
}

// 8. reflection symmetry of the dynamical energy and of the probe gap.
Verdict reflection() {
    const ModelParams p{2.0, 1.0, 0.1, 2.0, 3, 4};
    const auto y = make_config(3, 4, Boundary::periodic(), SpecialConfig::y_spec());
    Rng rng = make_rng(808);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        LatticeConfig x(3, 4, Boundary::periodic());
        x.randomize(rng);
        worst = std::max(worst, std::abs(dynamical_energy(x, y, p) - dynamical_energy(x.reflected(), y, p)));
    }

    const double t = 2.2, bh = 2 * std::exp(-t);
    const double eps = boundary_epsilon(bh, t, ChainMode::conditioned);
    ProbeSpec right;
    right.params = {2.0, 1.0, bh / 2, t, 3, 2};
    right.region = {1, 2};
    right.boundary_angle = kPi / 2 - eps;
    right.sweeps = 3000;
    right.burn_in = 500;
    right.seed = 1;
    ProbeSpec left = right;
    left.boundary_angle = 3 * kPi / 2 + eps;
    left.seed = 2;
    const auto fr = conditional_density(right), fl = conditional_density(left);
    // Swapped pair: each boundary replaced by its mirror image, driven by the
    // other side's seed with mirrored proposals.
    ProbeSpec right_sw = left, left_sw = right;
    right_sw.boundary_angle = right.boundary_angle;
    left_sw.boundary_angle = left.boundary_angle;
    right_sw.reflect_proposals = left_sw.reflect_proposals = true;
    const auto gr = conditional_density(right_sw), gl = conditional_density(left_sw);
    const double gap = tv_distance(fr.density, fl.density);
    const double gap_sw = tv_distance(gr.density, gl.density);
    const bool ok = worst <= 1e-10 && std::abs(gap - gap_sw) <= 1e-9;
    return {ok, fmt("energy max diff %.1e over 100 configs; gap %.6f vs swapped %.6f", worst, gap, gap_sw)};
}

// 9. identical config and seed give identical CSV bytes.
Verdict reproducibility() {
    const std::vector<std::string> configs{
        "[experiment]\nkind=kernel-table\nseed=9\n[model]\nt=0.05,0.3,1,5\n",
        "[experiment]\nkind=ground-state-sweep\nseed=9\n[model]\nbeta=1,2\nh=0.1\nt=1:4:0.5\n",
        "[experiment]\nkind=window\nseed=9\n[model]\nbeta=1\nh=0.1,0.2\nt=2.302585092994046\n",
        "[experiment]\nkind=mc-scan\nseed=9\n[model]\nd=2\nbeta=2\nh=0.1\nt=2.302585092994046\nL=4,6\n"
        "[chain]\nmode=conditioned\nsweeps=1000\nburn_in=200\nwrite_traces=true\n",
        "[experiment]\nkind=probe\nseed=9\n[model]\nd=2\nbeta=1\nh=0.2\nt=1,50\n[chain]\nsweeps=600\nburn_in=100\n"
        "[probe]\nr_in=1,2\n",
        "[experiment]\nkind=oracle-check\nseed=9\n[model]\nd=1\nbeta=1.5\nh=0.2\nt=0.8\n[chain]\nsweeps=20000\n"
        "burn_in=500\n[probe]\nr_in=1\n",
    };
    const auto root = fs::temp_directory_path() / "xyflow_acceptance";
    fs::remove_all(root);
    int files = 0;
    std::string mismatch;
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream s;
        s << f.rdbuf();
        return s.str();
    };
    for (std::size_t k = 0; k < configs.size(); ++k) {
        const auto cfg = parse_config(configs[k]);
        const auto a = root / (std::to_string(k) + "a"), b = root / (std::to_string(k) + "b");
        const auto ra = run(cfg, {a.string(), 1, false});
        const auto rb = run(cfg, {b.string(), 2, false});
        if (ra.exit_code == kExitRuntimeError || rb.exit_code == kExitRuntimeError) {
            mismatch += " " + to_string(cfg.kind) + " failed: " + ra.message;
            continue;
        }
        for (const auto& f : ra.artifacts) {
            ++files;
            if (slurp(a / f) != slurp(b / f)) mismatch += " " + f;
        }
    }
    fs::remove_all(root);
    return {mismatch.empty() && files > 0,
            fmt("%d CSV artifacts compared across reruns (threads 1 vs 2)", files) +
                (mismatch.empty() ? std::string() : "; differing:" + mismatch)};
}

}  // namespace

int main() {
    report(1, "kernel suite", 10, kernel_suite);
    report(2, "rest-term bound", 5, rest_bound);
    report(3, "sampler law", 30, sampler_law);
    report(4, "ground-state degeneracy", 5, ground_state);
    report(5, "MC vs transfer oracle", 300, mc_oracle);
    report(6, "symmetry-breaking surrogate", 7200, symmetry_breaking);
    report(7, "recovery surrogate", 3600, recovery);
    report(8, "reflection symmetry", 10, reflection);
    report(9, "reproducibility", 600, reproducibility);
    std::printf("%d of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
