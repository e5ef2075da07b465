#include "xyflow/gibbs_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "xyflow/circle_kernel.hpp"
#include "xyflow/errors.hpp"
#include "xyflow/parallel.hpp"

namespace xyflow {
namespace {

constexpr double kSeriesTol = 1e-13;

// Fourier weights 2 exp(-n^2 t) sinc(n w / 2) for bin averages of p_t over
// arcs of width w.
std::vector<double> bin_average_weights(double t, double arc) {
    const int n_terms = fourier_truncation(t, kSeriesTol).n_terms;
    std::vector<double> w(static_cast<std::size_t>(n_terms) + 1, 0.0);
    for (int n = 1; n <= n_terms; ++n) {
        const double half = 0.5 * n * arc;
        w[n] = 2.0 * std::exp(-static_cast<double>(n) * n * t) * std::sin(half) / half;
    }
    return w;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void Region::validate() const {
    if (r_in < 1) throw DomainError("region requires r_in >= 1");
    if (r_out <= r_in) throw DomainError("region requires r_out > r_in");
}

ChainSpec probe_chain_spec(const ProbeSpec& spec) {
    spec.region.validate();
    ChainSpec cs;
    cs.params = spec.params;
    cs.params.L = spec.region.side();
    cs.mode = ChainMode::conditioned;
    cs.sweeps = spec.sweeps;
    cs.burn_in = spec.burn_in;
    cs.proposal_width = spec.proposal_width;
    cs.seed = spec.seed;
    cs.start_angle = spec.start_angle;
    cs.reflect_proposals = spec.reflect_proposals;

    const Lattice lat(cs.params.d, cs.params.L, BoundaryKind::free);
    const auto n = static_cast<std::size_t>(lat.n_sites());
    const int center = lat.center_site();
    cs.kernel_mask.assign(n, 1);
    cs.kernel_mask[center] = 0;
    cs.y.assign(n, kPi);
    if (spec.annulus) {
        cs.boundary = Boundary::free();
        for (int s = 0; s < lat.n_sites(); ++s) {
            int radius = 0;
            for (int c : lat.coords(s)) radius = std::max(radius, std::abs(c - spec.region.r_out));
            if (radius > spec.region.r_in) cs.y[s] = spec.boundary_angle;
        }
    } else {
        cs.boundary = Boundary::fixed(Angle(spec.boundary_angle));
    }
    return cs;
}

DensityEstimate conditional_density(const ProbeSpec& spec) {
    const auto cs = probe_chain_spec(spec);
    const double t = spec.params.t;
    const auto weights = bin_average_weights(t, kTwoPi / kProbeBins);
    const int modes = static_cast<int>(weights.size()) - 1;
    const int records = spec.sweeps - spec.burn_in;
    const int blocks = std::max(2, spec.blocks);
    const int per_block = std::max(1, records / blocks);

    // Per-block sums of cos(n x0) and sin(n x0).
    std::vector<double> cos_sum(static_cast<std::size_t>(blocks) * (modes + 1), 0.0);
    std::vector<double> sin_sum(cos_sum.size(), 0.0);
    std::vector<double> first_cos, first_sin;
    first_cos.reserve(records);
    first_sin.reserve(records);
    int recorded = 0;
    const int center = Lattice(cs.params.d, cs.params.L, cs.boundary.kind).center_site();

    run_chain(cs, [&](const LatticeConfig& x, int) {
        const double x0 = x.raw()[center];
        first_cos.push_back(std::cos(x0));
        first_sin.push_back(std::sin(x0));
        const int b = recorded / per_block;
        ++recorded;
        if (b >= blocks) return;
        for (int n = 1; n <= modes; ++n) {
            cos_sum[b * (modes + 1) + n] += std::cos(n * x0);
            sin_sum[b * (modes + 1) + n] += std::sin(n * x0);
        }
    });

    DensityEstimate est;
    est.samples = recorded;
    est.density.assign(kProbeBins, 0.0);
    est.error.assign(kProbeBins, 0.0);
    std::vector<double> block_f(static_cast<std::size_t>(blocks) * kProbeBins);
    for (int b = 0; b < blocks; ++b) {
        for (int k = 0; k < kProbeBins; ++k) {
            const double y = (k + 0.5) * kTwoPi / kProbeBins;
            double f = 1.0;
            for (int n = 1; n <= modes; ++n) {
                const double c = cos_sum[b * (modes + 1) + n] / per_block;
                const double s = sin_sum[b * (modes + 1) + n] / per_block;
                f += weights[n] * (c * std::cos(n * y) + s * std::sin(n * y));
            }
            block_f[b * kProbeBins + k] = f;
        }
    }
    for (int k = 0; k < kProbeBins; ++k) {
        double m = 0.0;
        for (int b = 0; b < blocks; ++b) m += block_f[b * kProbeBins + k];
        m /= blocks;
        double v = 0.0;
        for (int b = 0; b < blocks; ++b) {
            const double d = block_f[b * kProbeBins + k] - m;
            v += d * d;
        }
        est.density[k] = m;
        est.error[k] = std::sqrt(v / (blocks - 1.0) / blocks);
    }
    if (modes > 0) {
        est.equilibrated = blocked_mean(first_cos, blocks).equilibrated &&
                           blocked_mean(first_sin, blocks).equilibrated;
    }
    return est;
}

double tv_distance(const std::vector<double>& f, const std::vector<double>& g) {
    if (f.size() != g.size() || f.empty()) throw ShapeError("densities must share a bin grid");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::abs(f[i] - g[i]);
    return 0.5 * s / static_cast<double>(f.size());
}

// ---------------------------------------------------------------------------

namespace {

struct Strip {
    int n;
    int width;
    std::size_t states;
    std::vector<double> nodes;
    std::vector<double> bond;  // n x n, exp(beta J cos(a - b))

    // psi'(b) = sum_a psi(a) prod_j K(a_j, b_j)
    std::vector<double> transfer(const std::vector<double>& psi) const {
        std::vector<double> cur = psi, next(states);
        std::size_t stride = 1;
        for (int j = 0; j < width; ++j) {
            std::fill(next.begin(), next.end(), 0.0);
            const std::size_t block = stride * n;
            for (std::size_t base = 0; base < states; base += block) {
                for (std::size_t lo = 0; lo < stride; ++lo) {
                    for (int a = 0; a < n; ++a) {
                        const double v = cur[base + a * stride + lo];
                        if (v == 0.0) continue;
                        const double* krow = &bond[static_cast<std::size_t>(a) * n];
                        for (int b = 0; b < n; ++b) next[base + b * stride + lo] += v * krow[b];
                    }
                }
            }
            std::swap(cur, next);
            stride *= n;
        }
        return cur;
    }

    int digit(std::size_t state, int row) const {
        for (int j = 0; j < row; ++j) state /= n;
        return static_cast<int>(state % n);
    }
};

void normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    for (double& x : v) x /= s;
}

double site_weight(double theta, double beta_h, double t, double y) {
    double w = std::exp(beta_h * std::cos(theta));
    if (!std::isnan(y)) w *= kernel(Angle(theta), Angle(y), t, kSeriesTol).value;
    return w;
}

}  // namespace

OracleResult transfer_oracle(const OracleSpec& spec) {
    const int n = spec.n_bins;
    const int w = spec.width;
    if (!is_power_of_two(n)) throw DomainError("oracle n_bins must be a power of two");
    if (w < 1 || w > 3) throw DomainError("oracle handles strips of width 1 to 3 only");
    if (spec.length < 1) throw DomainError("oracle needs at least one column");
    double states_d = std::pow(static_cast<double>(n), w);
    if (states_d > static_cast<double>(1 << 18)) {
        throw DomainError("oracle refused: n_bins^width exceeds 2^18 states");
    }
    if (spec.ends == StripEnds::periodic && w != 1) {
        throw DomainError("oracle supports periodic ends for chains (width 1) only");
    }
    const int n_sites = spec.length * w;
    if (spec.target < 0 || spec.target >= n_sites) throw DomainError("oracle target outside region");
    if (!spec.y.empty() && static_cast<int>(spec.y.size()) != n_sites) {
        throw ShapeError("oracle y layer size mismatch");
    }
    if (spec.ends == StripEnds::periodic && spec.length < 2) {
        throw DomainError("periodic chain needs at least two sites");
    }

    Strip st{n, w, static_cast<std::size_t>(states_d + 0.5), {}, {}};
    st.nodes.resize(n);
    for (int a = 0; a < n; ++a) st.nodes[a] = (a + 0.5) * kTwoPi / n;
    st.bond.resize(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            st.bond[a * n + b] = std::exp(spec.beta_J * std::cos(st.nodes[a] - st.nodes[b]));

    auto y_of = [&](int site) {
        return spec.y.empty() ? std::numeric_limits<double>::quiet_NaN() : spec.y[site];
    };
    // Site weights, n per site.
    std::vector<std::vector<double>> sw(n_sites, std::vector<double>(n));
    for (int s = 0; s < n_sites; ++s)
        for (int a = 0; a < n; ++a) sw[s][a] = site_weight(st.nodes[a], spec.beta_h, spec.t, y_of(s));

    auto column_weight = [&](int col) {
        std::vector<double> cw(st.states, 1.0);
        for (std::size_t s = 0; s < st.states; ++s) {
            double v = 1.0;
            for (int r = 0; r < w; ++r) v *= sw[col * w + r][st.digit(s, r)];
            for (int r = 0; r + 1 < w; ++r) {
                v *= st.bond[st.digit(s, r) * n + st.digit(s, r + 1)];
            }
            if (spec.transverse_periodic && w >= 3) {
                v *= st.bond[st.digit(s, w - 1) * n + st.digit(s, 0)];
            }
            cw[s] = v;
        }
        return cw;
    };
    auto end_factor = [&]() {
        std::vector<double> e(st.states, 1.0);
        if (spec.ends != StripEnds::fixed) return e;
        for (std::size_t s = 0; s < st.states; ++s) {
            double v = 1.0;
            for (int r = 0; r < w; ++r) {
                v *= std::exp(spec.beta_J * std::cos(spec.end_angle - st.nodes[st.digit(s, r)]));
            }
            e[s] = v;
        }
        return e;
    };

    OracleResult res;
    res.n_bins = n;
    res.beta_J = spec.beta_J;
    res.beta_h = spec.beta_h;
    res.t = spec.t;
    res.ends = spec.ends;
    res.target_y = y_of(spec.target);
    const int tcol = spec.target / w;
    const int trow = spec.target % w;
    std::vector<double> column_marginal;

    if (spec.ends == StripEnds::periodic) {
        // Q = D_{s+1} K D_{s+2} ... K D_{s-1}, marginal(a) = w_s(a) (K Q K)(a, a).
        const int L = spec.length;
        std::vector<double> q(static_cast<std::size_t>(n) * n, 0.0);
        const int first = (tcol + 1) % L;
        for (int a = 0; a < n; ++a) q[a * n + a] = sw[first][a];
        for (int k = 2; k < L; ++k) {
            const int s = (tcol + k) % L;
            std::vector<double> next(q.size(), 0.0);
            for (int a = 0; a < n; ++a)
                for (int m = 0; m < n; ++m) {
                    const double v = q[a * n + m];
                    if (v == 0.0) continue;
                    for (int b = 0; b < n; ++b) next[a * n + b] += v * st.bond[m * n + b] * sw[s][b];
                }
            double scale = 0.0;
            for (double v : next) scale = std::max(scale, v);
            for (double& v : next) v /= scale;
            q = std::move(next);
        }
        res.ring = q;
        column_marginal.assign(n, 0.0);
        for (int a = 0; a < n; ++a) {
            double acc = 0.0;
            for (int m = 0; m < n; ++m) {
                double inner = 0.0;
                for (int b = 0; b < n; ++b) inner += q[m * n + b] * st.bond[b * n + a];
                acc += st.bond[a * n + m] * inner;
            }
            column_marginal[a] = sw[spec.target][a] * acc;
        }
    } else {
        const auto ends = end_factor();
        std::vector<std::vector<double>> alpha(spec.length), beta(spec.length);
        for (int c = 0; c < spec.length; ++c) {
            const auto cw = column_weight(c);
            std::vector<double> a = c == 0 ? ends : st.transfer(alpha[c - 1]);
            for (std::size_t s = 0; s < st.states; ++s) a[s] *= cw[s];
            normalize(a);
            alpha[c] = std::move(a);
        }
        beta[spec.length - 1] = ends;
        for (int c = spec.length - 2; c >= 0; --c) {
            const auto cw = column_weight(c + 1);
            std::vector<double> b = beta[c + 1];
            for (std::size_t s = 0; s < st.states; ++s) b[s] *= cw[s];
            b = st.transfer(b);
            normalize(b);
            beta[c] = std::move(b);
        }
        std::vector<double> joint(st.states);
        for (std::size_t s = 0; s < st.states; ++s) joint[s] = alpha[tcol][s] * beta[tcol][s];
        column_marginal.assign(n, 0.0);
        for (std::size_t s = 0; s < st.states; ++s) column_marginal[st.digit(s, trow)] += joint[s];

        res.end_angle = spec.end_angle;
        if (w == 1) {
            // Messages for spectral interpolation at arbitrary angles.
            if (tcol > 0) res.x_kernel_left = alpha[tcol - 1];
            if (tcol + 1 < spec.length) {
                const auto cw = column_weight(tcol + 1);
                res.x_kernel_right = beta[tcol + 1];
                for (int a = 0; a < n; ++a) res.x_kernel_right[a] *= cw[a];
            }
        }
    }

    double total = 0.0;
    for (double v : column_marginal) total += v;
    res.x_density.resize(n);
    for (int a = 0; a < n; ++a) res.x_density[a] = column_marginal[a] / total * n;

    // Normalization of the interpolant so that it agrees with the nodes.
    res.interpolable = w == 1;
    if (w == 1) {
        res.norm = 1.0;
        double node_sum = 0.0;
        for (int a = 0; a < n; ++a) node_sum += res.x_density_at(st.nodes[a]);
        res.norm = node_sum / n;
    }

    res.y_density.resize(n);
    for (int b = 0; b < n; ++b) res.y_density[b] = res.y_density_at(st.nodes[b]);
    return res;
}

double OracleResult::x_density_at(double theta) const {
    if (!interpolable) throw DomainError("strip oracles are known at the nodes only");
    const int n = n_bins;
    auto k = [&](double a, double b) { return std::exp(beta_J * std::cos(a - b)); };
    auto node = [&](int a) { return (a + 0.5) * kTwoPi / n; };
    double v = site_weight(theta, beta_h, t, target_y);
    if (ends == StripEnds::periodic) {
        std::vector<double> kt(n);
        for (int a = 0; a < n; ++a) kt[a] = k(theta, node(a));
        double acc = 0.0;
        for (int a = 0; a < n; ++a) {
            double inner = 0.0;
            for (int b = 0; b < n; ++b) inner += ring[a * n + b] * kt[b];
            acc += kt[a] * inner;
        }
        v *= acc;
    } else {
        auto side = [&](const std::vector<double>& msg) {
            if (msg.empty()) return ends == StripEnds::fixed ? k(end_angle, theta) : 1.0;
            double s = 0.0;
            for (int a = 0; a < n; ++a) s += msg[a] * k(node(a), theta);
            return s;
        };
        v *= side(x_kernel_left) * side(x_kernel_right);
    }
    return v / norm;
}

double OracleResult::y_density_at(double y) const {
    double f = 0.0;
    for (int a = 0; a < n_bins; ++a) {
        f += x_density[a] * kernel(Angle((a + 0.5) * kTwoPi / n_bins), Angle(y), t, kSeriesTol).value;
    }
    return f / n_bins;
}

std::vector<double> OracleResult::x_bin_probabilities(int bins) const {
    std::vector<double> p(static_cast<std::size_t>(bins), 0.0);
    if (!interpolable) {
        // Node aggregation for strips.
        if (n_bins % bins != 0) throw DomainError("bins must divide n_bins");
        const int per = n_bins / bins;
        for (int a = 0; a < n_bins; ++a) p[a / per] += x_density[a] / n_bins;
        return p;
    }
    constexpr int kSub = 64;
    for (int b = 0; b < bins; ++b) {
        double s = 0.0;
        for (int j = 0; j < kSub; ++j) {
            s += x_density_at((b + (j + 0.5) / kSub) * kTwoPi / bins);
        }
        p[b] = s / kSub / bins;
    }
    return p;
}

std::vector<double> OracleResult::y_bin_density(int bins) const {
    const double arc = kTwoPi / bins;
    const auto weights = bin_average_weights(t, arc);
    std::vector<double> f(static_cast<std::size_t>(bins), 1.0);
    for (int n = 1; n < static_cast<int>(weights.size()); ++n) {
        double c = 0.0, s = 0.0;
        for (int a = 0; a < n_bins; ++a) {
            const double theta = (a + 0.5) * kTwoPi / n_bins;
            c += x_density[a] * std::cos(n * theta);
            s += x_density[a] * std::sin(n * theta);
        }
        c /= n_bins;
        s /= n_bins;
        for (int b = 0; b < bins; ++b) {
            const double y = (b + 0.5) * arc;
            f[b] += weights[n] * (c * std::cos(n * y) + s * std::sin(n * y));
        }
    }
    return f;
}

OracleResult oracle_marginal(const ModelParams& p, const Region& region, double boundary_angle,
                             int n_bins) {
    region.validate();
    if (p.d != 1) throw DomainError("oracle_marginal handles d = 1 regions; use transfer_oracle for strips");
    OracleSpec os;
    os.beta_J = p.beta * p.J;
    os.beta_h = p.beta * p.h;
    os.t = p.t;
    os.length = region.side();
    os.width = 1;
    os.ends = StripEnds::fixed;
    os.end_angle = boundary_angle;
    os.y.assign(static_cast<std::size_t>(os.length), kPi);
    os.target = region.r_out;
    os.y[os.target] = std::numeric_limits<double>::quiet_NaN();
    os.n_bins = n_bins;
    return transfer_oracle(os);
}

// ---------------------------------------------------------------------------

std::string witness_bins(const std::vector<double>& f, const std::vector<double>& g) {
    std::ostringstream out;
    const int n = static_cast<int>(f.size());
    bool first = true;
    for (int i = 0; i < n;) {
        if (!(f[i] > g[i])) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && f[j + 1] > g[j + 1]) ++j;
        if (!first) out << ';';
        first = false;
        out << i;
        if (j > i) out << '-' << j;
        i = j + 1;
    }
    return out.str();
}

std::vector<ProbeRow> badness_scan(const BadnessSpec& spec, int threads) {
    auto ts = spec.ts;
    auto rs = spec.r_ins;
    std::sort(ts.begin(), ts.end());
    std::sort(rs.begin(), rs.end());
    struct Cell {
        double t;
        int r_in;
    };
    std::vector<Cell> cells;
    for (double t : ts)
        for (int r : rs) cells.push_back({t, r});

    std::vector<DensityEstimate> est(2 * cells.size());
    parallel_for(est.size(), threads, [&](std::size_t job) {
        const auto& c = cells[job / 2];
        const bool right = job % 2 == 0;
        const double eps = boundary_epsilon(spec.beta * spec.h, c.t, ChainMode::conditioned);
        ProbeSpec ps;
        ps.params = {spec.beta, spec.J, spec.h, c.t, spec.d, 2};
        ps.region = {c.r_in, 2 * c.r_in};
        ps.boundary_angle = right ? kPi / 2 - eps : 3 * kPi / 2 + eps;
        ps.annulus = spec.annulus;
        ps.sweeps = spec.sweeps;
        ps.burn_in = spec.burn_in;
        ps.proposal_width = spec.proposal_width;
        ps.seed = derive_seed(spec.seed, job);
        est[job] = conditional_density(ps);
    });

    std::vector<ProbeRow> rows;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto& r = est[2 * k];
        const auto& l = est[2 * k + 1];
        double err = 0.0;
        for (int b = 0; b < kProbeBins; ++b) err += std::hypot(r.error[b], l.error[b]);
        rows.push_back({spec.beta, spec.h, cells[k].t, cells[k].r_in, 2 * cells[k].r_in,
                        tv_distance(r.density, l.density), 0.5 * err / kProbeBins,
                        witness_bins(r.density, l.density), !r.equilibrated || !l.equilibrated,
                        r.density, l.density});
    }
    return rows;
}

}  // namespace xyflow
