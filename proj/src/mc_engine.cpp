#include "xyflow/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "xyflow/errors.hpp"
#include "xyflow/ground_state.hpp"
#include "xyflow/parallel.hpp"

namespace xyflow {

std::string to_string(ChainMode mode) {
    switch (mode) {
        case ChainMode::initial: return "initial";
        case ChainMode::conditioned: return "conditioned";
        case ChainMode::restricted: return "restricted";
    }
    return "?";
}

ChainMode chain_mode_from_string(const std::string& s) {
    if (s == "initial") return ChainMode::initial;
    if (s == "conditioned") return ChainMode::conditioned;
    if (s == "restricted") return ChainMode::restricted;
    throw DomainError("unknown chain mode '" + s + "'");
}

std::string to_string(BoundarySide side) { return side == BoundarySide::right ? "right" : "left"; }

void ChainSpec::validate() const {
    params.validate();
    if (sweeps < 1) throw DomainError("sweeps must be positive");
    if (burn_in < 0 || burn_in >= sweeps) throw DomainError("burn_in must satisfy 0 <= burn_in < sweeps");
    if (!(proposal_width > 0.0 && proposal_width <= kPi)) {
        throw DomainError("proposal_width must lie in (0, pi]");
    }
    if (!(energy_scale > 0.0)) throw DomainError("energy_scale must be positive");
    if (histogram_bins < 1) throw DomainError("histogram_bins must be positive");
    const auto n = static_cast<std::size_t>(std::pow(params.L, params.d) + 0.5);
    if (!y.empty() && y.size() != n) throw ShapeError("y layer size does not match the box");
    if (!kernel_mask.empty() && kernel_mask.size() != n) {
        throw ShapeError("kernel mask size does not match the box");
    }
    if (mode == ChainMode::restricted) (void)expansion(params.t);
}

Chain::Chain(const ChainSpec& spec)
    : Chain(spec, LatticeConfig(spec.params.d, spec.params.L, spec.boundary,
                                spec.start_angle.value_or(0.0))) {
    if (!spec.start_angle) x_.randomize(rng_);
}

Chain::Chain(const ChainSpec& spec, LatticeConfig start)
    : spec_(spec), x_(std::move(start)), rng_(make_rng(spec.seed)), width_(spec.proposal_width) {
    spec_.validate();
    const auto& p = spec_.params;
    if (x_.lattice().dim() != p.d || x_.lattice().side() != p.L) {
        throw ShapeError("start configuration does not match the chain geometry");
    }
    scale_ = spec_.energy_scale;
    coupling_ = scale_ * p.beta * p.J;
    field_ = scale_ * p.beta * p.h;
    const auto n = static_cast<std::size_t>(x_.size());
    if (spec_.mode == ChainMode::restricted) coeffs_ = expansion(p.t);
    if (spec_.mode == ChainMode::conditioned) {
        table_ = LogKernelTable(p.t, spec_.kernel_table_nodes);
        y_ = spec_.y.empty() ? std::vector<double>(n, kPi) : spec_.y;
        for (double& a : y_) a = wrap_angle(a);
        mask_ = spec_.kernel_mask.empty() ? std::vector<char>(n, 1) : spec_.kernel_mask;
    }
}

double Chain::site_term(int site, double theta) const {
    double v = -field_ * std::cos(theta);
    switch (spec_.mode) {
        case ChainMode::initial: break;
        case ChainMode::conditioned:
            if (mask_[site]) v -= scale_ * table_(theta - y_[site]);
            break;
        case ChainMode::restricted: v -= scale_ * coeffs_.evaluate(std::cos(theta)); break;
    }
    return v;
}

double Chain::delta(int site, double theta) const {
    const auto a = x_.raw();
    const double old = a[site];
    double bond = 0.0;
    for (int nb : x_.lattice().neighbours(site)) {
        if (nb == Lattice::kNoNeighbour) continue;
        bond += std::cos(theta - a[nb]) - std::cos(old - a[nb]);
    }
    return -coupling_ * bond + site_term(site, theta) - site_term(site, old);
}

double Chain::energy() const {
    const auto a = x_.raw();
    double e = 0.0;
    for (const auto& b : x_.lattice().bonds()) e -= coupling_ * std::cos(a[b[0]] - a[b[1]]);
    for (int i = 0; i < x_.size(); ++i) e += site_term(i, a[i]);
    return e;
}

double Chain::m_sin() const {
    double s = 0.0;
    for (double a : x_.box()) s += std::sin(a);
    return s / x_.size();
}

double Chain::m_cos() const {
    double s = 0.0;
    for (double a : x_.box()) s += std::cos(a);
    return s / x_.size();
}

void Chain::metropolis(int site) {
    const double u = uniform01(rng_);
    const double accept_u = uniform01(rng_);
    const double step = width_ * (2.0 * u - 1.0);
    const double proposal =
        wrap_angle(x_.raw()[site] + (spec_.reflect_proposals ? -step : step));
    const double dE = delta(site, proposal);
    ++stats_.proposals;
    const bool up = dE > 0.0;
    if (up) ++stats_.uphill;
    if (!up || accept_u < std::exp(-dE)) {
        x_.raw_mut()[site] = proposal;
        ++stats_.accepted;
        if (up) ++stats_.uphill_accepted;
    }
}

void Chain::heat_bath(int site) {
    constexpr int kBins = 4096;
    hb_weights_.resize(kBins);
    const double width = kTwoPi / kBins;
    const auto a = x_.raw();
    double lowest = 0.0;
    for (int b = 0; b < kBins; ++b) {
        const double theta = (b + 0.5) * width;
        double e = site_term(site, theta);
        for (int nb : x_.lattice().neighbours(site)) {
            if (nb != Lattice::kNoNeighbour) e -= coupling_ * std::cos(theta - a[nb]);
        }
        hb_weights_[b] = e;
        lowest = b == 0 ? e : std::min(lowest, e);
    }
    double total = 0.0;
    for (double& w : hb_weights_) total += (w = std::exp(-(w - lowest)));
    const double target = uniform01(rng_) * total;
    double acc = 0.0;
    int bin = kBins - 1;
    for (int b = 0; b < kBins; ++b) {
        acc += hb_weights_[b];
        if (acc > target) {
            bin = b;
            break;
        }
    }
    x_.raw_mut()[site] = wrap_angle((bin + uniform01(rng_)) * width);
    ++stats_.proposals;
    ++stats_.accepted;
}

double Chain::sweep() {
    const auto before = stats_;
    auto update = [&](int s) {
        if (spec_.update == UpdateKind::heat_bath) {
            heat_bath(s);
        } else {
            metropolis(s);
        }
    };
    if (spec_.order == SweepOrder::checkerboard) {
        for (int c = 0; c < 2; ++c) {
            for (int s : x_.lattice().colour(c)) update(s);
        }
    } else {
        for (int s = 0; s < x_.size(); ++s) update(s);
    }
    const auto n = stats_.proposals - before.proposals;
    return n ? static_cast<double>(stats_.accepted - before.accepted) / static_cast<double>(n) : 0.0;
}

ObservableTrace run_chain(const ChainSpec& spec, const ChainObserver& observer) {
    Chain chain(spec);
    ObservableTrace trace;
    constexpr int kTuneEvery = 25;
    double window_acc = 0.0;
    int window_n = 0;
    for (int s = 0; s < spec.burn_in; ++s) {
        window_acc += chain.sweep();
        if (spec.auto_tune && spec.update == UpdateKind::metropolis && ++window_n == kTuneEvery) {
            const double rate = window_acc / window_n;
            double w = chain.proposal_width();
            if (rate > 0.6) w = std::min(kPi, w * 1.25);
            if (rate < 0.4) w *= 0.8;
            chain.set_proposal_width(w);
            window_acc = 0.0;
            window_n = 0;
        }
    }
    chain.reset_stats();

    const int records = spec.sweeps - spec.burn_in;
    trace.energy.reserve(records);
    trace.m_sin.reserve(records);
    trace.m_cos.reserve(records);
    trace.center_bin.reserve(records);
    trace.center_histogram.assign(static_cast<std::size_t>(spec.histogram_bins), 0);
    const int center = chain.state().lattice().center_site();
    for (int s = spec.burn_in; s < spec.sweeps; ++s) {
        chain.sweep();
        trace.energy.push_back(chain.energy());
        trace.m_sin.push_back(chain.m_sin());
        trace.m_cos.push_back(chain.m_cos());
        int bin = static_cast<int>(chain.state().raw()[center] / kTwoPi * spec.histogram_bins);
        bin = std::min(bin, spec.histogram_bins - 1);
        trace.center_bin.push_back(bin);
        ++trace.center_histogram[bin];
        if (observer) observer(chain.state(), s);
    }
    trace.acceptance = chain.stats().rate();
    trace.proposal_width = chain.proposal_width();
    return trace;
}

double boundary_epsilon(double beta_h, double t, ChainMode mode) {
    if (mode == ChainMode::restricted) {
        return find_maximizers(SitePotential::restricted(beta_h, t)).epsilon_t;
    }
    if (t < kFourierCrossover) return 0.0;
    return find_maximizers(SitePotential::full_log(beta_h, t)).epsilon_t;
}

std::vector<ScanRow> symmetry_breaking_scan(const ScanSpec& spec, int threads) {
    if (spec.mode == ChainMode::initial) {
        throw DomainError("symmetry_breaking_scan needs conditioned or restricted mode");
    }
    auto betas = spec.betas, hs = spec.hs, ts = spec.ts;
    auto Ls = spec.Ls;
    std::sort(betas.begin(), betas.end());
    std::sort(hs.begin(), hs.end());
    std::sort(ts.begin(), ts.end());
    std::sort(Ls.begin(), Ls.end());

    struct Cell {
        double beta, h, t;
        int L;
        BoundarySide side;
    };
    std::vector<Cell> cells;
    for (double b : betas)
        for (double h : hs)
            for (double t : ts)
                for (int L : Ls)
                    for (auto side : {BoundarySide::right, BoundarySide::left})
                        cells.push_back({b, h, t, L, side});

    std::vector<ScanRow> rows(cells.size());
    parallel_for(cells.size(), threads, [&](std::size_t k) {
        const auto& c = cells[k];
        const double eps = boundary_epsilon(c.beta * c.h, c.t, spec.mode);
        const double angle = c.side == BoundarySide::right ? kPi / 2 - eps : 3 * kPi / 2 + eps;
        ChainSpec cs;
        cs.params = {c.beta, spec.J, c.h, c.t, spec.d, c.L};
        cs.mode = spec.mode;
        cs.boundary = Boundary::fixed(Angle(angle));
        cs.sweeps = spec.sweeps;
        cs.burn_in = spec.burn_in;
        cs.proposal_width = spec.proposal_width;
        cs.seed = derive_seed(spec.seed, k);
        cs.start_angle = spec.start_angle;
        auto trace = run_chain(cs);
        const auto st = blocked_mean(trace.m_sin);
        auto& r = rows[k];
        r = {c.beta, c.h, c.t, c.L, c.side, wrap_angle(angle), st.mean, st.error,
             !st.equilibrated || !(st.error <= spec.error_threshold), {}};
        if (spec.keep_traces) r.trace = std::move(trace);
    });
    return rows;
}

std::vector<GapRow> boundary_gaps(const std::vector<ScanRow>& rows) {
    std::vector<GapRow> out;
    for (const auto& r : rows) {
        if (r.boundary != BoundarySide::right) continue;
        for (const auto& l : rows) {
            if (l.boundary != BoundarySide::left || l.beta != r.beta || l.h != r.h ||
                l.t != r.t || l.L != r.L) {
                continue;
            }
            out.push_back({r.beta, r.h, r.t, r.L, r.m_sin_mean - l.m_sin_mean,
                           std::hypot(r.m_sin_err, l.m_sin_err),
                           r.unequilibrated || l.unequilibrated});
        }
    }
    return out;
}

}  // namespace xyflow
