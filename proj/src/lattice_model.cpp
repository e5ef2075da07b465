#include "xyflow/lattice_model.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "xyflow/circle_kernel.hpp"
#include "xyflow/errors.hpp"

namespace xyflow {

void ModelParams::validate() const {
    if (!(beta > 0.0)) throw DomainError("beta must satisfy beta > 0");
    if (!(J >= 0.0)) throw DomainError("J must satisfy J >= 0");
    if (!(h >= 0.0)) throw DomainError("h must satisfy h >= 0");
    if (!(t > 0.0)) throw DomainError("t must satisfy t > 0");
    if (d < 1 || d > 3) throw DomainError("d must be 1, 2 or 3");
    if (L < 2) throw DomainError("L must satisfy L >= 2");
}

Lattice::Lattice(int d, int L, BoundaryKind kind) : d_(d), L_(L), kind_(kind) {
    if (d < 1 || d > 3) throw DomainError("lattice dimension must be 1, 2 or 3");
    if (L < 2) throw DomainError("lattice side must be at least 2");
    n_sites_ = 1;
    for (int k = 0; k < d; ++k) n_sites_ *= L;

    std::vector<int> stride(d);
    stride[d - 1] = 1;
    for (int k = d - 2; k >= 0; --k) stride[k] = stride[k + 1] * L;

    neighbours_.assign(static_cast<std::size_t>(n_sites_) * 2 * d, kNoNeighbour);
    int next_ghost = n_sites_;
    for (int s = 0; s < n_sites_; ++s) {
        const auto c = coords(s);
        for (int mu = 0; mu < d; ++mu) {
            for (int dir = 0; dir < 2; ++dir) {
                const int step = dir == 0 ? -1 : 1;
                const int cm = c[mu] + step;
                int nb = kNoNeighbour;
                if (cm >= 0 && cm < L) {
                    nb = s + step * stride[mu];
                } else if (kind == BoundaryKind::periodic) {
                    nb = s + step * stride[mu] - step * L * stride[mu];
                } else if (kind == BoundaryKind::fixed) {
                    nb = next_ghost++;
                }
                neighbours_[static_cast<std::size_t>(s) * 2 * d + 2 * mu + dir] = nb;
                // Forward bonds cover the interior once; ghost bonds are
                // recorded from whichever side leaves the box.
                const bool ghost = nb >= n_sites_;
                if (nb != kNoNeighbour && (dir == 1 || ghost)) bonds_.push_back({s, nb});
            }
        }
        int parity = 0;
        for (int v : c) parity += v;
        colours_[parity & 1].push_back(s);
    }
    n_ghosts_ = next_ghost - n_sites_;
}

std::vector<int> Lattice::coords(int site) const {
    std::vector<int> c(d_);
    for (int k = d_ - 1; k >= 0; --k) {
        c[k] = site % L_;
        site /= L_;
    }
    return c;
}

int Lattice::index(std::span<const int> coords) const {
    if (static_cast<int>(coords.size()) != d_) throw ShapeError("coordinate rank mismatch");
    int s = 0;
    for (int v : coords) {
        if (v < 0 || v >= L_) throw ShapeError("coordinate outside the box");
        s = s * L_ + v;
    }
    return s;
}

int Lattice::center_site() const {
    std::vector<int> c(d_, L_ / 2);
    return index(c);
}

LatticeConfig::LatticeConfig(int d, int L, const Boundary& boundary, double fill)
    : lattice_(std::make_shared<const Lattice>(d, L, boundary.kind)) {
    const auto n = static_cast<std::size_t>(lattice_->n_sites());
    const auto g = static_cast<std::size_t>(lattice_->n_ghosts());
    angles_.assign(n + g, wrap_angle(fill));
    if (boundary.kind == BoundaryKind::fixed) {
        if (boundary.layer.size() == 1) {
            std::fill(angles_.begin() + static_cast<std::ptrdiff_t>(n), angles_.end(),
                      wrap_angle(boundary.layer[0]));
        } else if (boundary.layer.size() == g) {
            for (std::size_t i = 0; i < g; ++i) angles_[n + i] = wrap_angle(boundary.layer[i]);
        } else {
            throw ShapeError("fixed boundary layer needs 1 or " + std::to_string(g) +
                             " angles, got " + std::to_string(boundary.layer.size()));
        }
    }
}

void LatticeConfig::set_boundary_angle(Angle theta) {
    for (std::size_t i = static_cast<std::size_t>(size()); i < angles_.size(); ++i) {
        angles_[i] = theta.radians();
    }
}

LatticeConfig LatticeConfig::reflected() const {
    LatticeConfig out = *this;
    for (double& a : out.angles_) a = Angle(kTwoPi - a).radians();
    return out;
}

LatticeConfig LatticeConfig::shifted(std::span<const int> offset) const {
    if (lattice_->boundary_kind() != BoundaryKind::periodic) {
        throw ShapeError("cyclic shifts require a periodic box");
    }
    const int L = lattice_->side();
    LatticeConfig out = *this;
    for (int s = 0; s < size(); ++s) {
        auto c = lattice_->coords(s);
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = ((c[k] + offset[k]) % L + L) % L;
        out.angles_[lattice_->index(c)] = angles_[s];
    }
    return out;
}

void LatticeConfig::randomize(Rng& rng) {
    for (int s = 0; s < size(); ++s) angles_[s] = wrap_angle(kTwoPi * uniform01(rng));
}

LatticeConfig make_config(int d, int L, const Boundary& boundary, SpecialConfig special) {
    return LatticeConfig(d, L, boundary, special.angle());
}

namespace {

void check_geometry(const LatticeConfig& x, const ModelParams& p) {
    if (x.lattice().dim() != p.d || x.lattice().side() != p.L) {
        throw ShapeError("configuration geometry (d=" + std::to_string(x.lattice().dim()) +
                         ", L=" + std::to_string(x.lattice().side()) +
                         ") does not match parameters (d=" + std::to_string(p.d) +
                         ", L=" + std::to_string(p.L) + ")");
    }
}

double bond_sum(const LatticeConfig& x) {
    const auto a = x.raw();
    double s = 0.0;
    for (const auto& b : x.lattice().bonds()) s += std::cos(a[b[0]] - a[b[1]]);
    return s;
}

double field_sum(const LatticeConfig& x) {
    double s = 0.0;
    for (double a : x.box()) s += std::cos(a);
    return s;
}

double neighbour_cos_change(const LatticeConfig& x, int site, double old_a, double new_a) {
    const auto a = x.raw();
    double s = 0.0;
    for (int nb : x.lattice().neighbours(site)) {
        if (nb == Lattice::kNoNeighbour) continue;
        s += std::cos(new_a - a[nb]) - std::cos(old_a - a[nb]);
    }
    return s;
}

}  // namespace

double initial_energy(const LatticeConfig& x, const ModelParams& p) {
    check_geometry(x, p);
    return -p.J * bond_sum(x) - p.h * field_sum(x);
}

double dynamical_energy(const LatticeConfig& x, const LatticeConfig& y, const ModelParams& p,
                        double tol) {
    check_geometry(x, p);
    check_geometry(y, p);
    double log_sum = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        log_sum += log_kernel(x.angle(i), y.angle(i), p.t, tol).value;
    }
    return p.beta * initial_energy(x, p) - log_sum;
}

double restricted_energy(const LatticeConfig& x, const ModelParams& p) {
    check_geometry(x, p);
    const auto coeffs = expansion(p.t);
    double site_sum = 0.0;
    for (double a : x.box()) site_sum += coeffs.evaluate(std::cos(a));
    return p.beta * initial_energy(x, p) - site_sum;
}

double energy(const LatticeConfig& x, const ModelParams& p, const EnergyMode& mode) {
    return std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, InitialMode>) {
                return initial_energy(x, p);
            } else if constexpr (std::is_same_v<M, DynamicalMode>) {
                return dynamical_energy(x, *m.y, p, m.tol);
            } else {
                return restricted_energy(x, p);
            }
        },
        mode);
}

double local_energy_delta(const LatticeConfig& x, int site, Angle new_angle,
                          const ModelParams& p, const EnergyMode& mode) {
    const double old_a = x.raw()[site];
    const double new_a = new_angle.radians();
    if (old_a == new_a) return 0.0;
    const double initial = -p.J * neighbour_cos_change(x, site, old_a, new_a) -
                           p.h * (std::cos(new_a) - std::cos(old_a));
    return std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, InitialMode>) {
                return initial;
            } else if constexpr (std::is_same_v<M, DynamicalMode>) {
                const Angle y = m.y->angle(site);
                return p.beta * initial - log_kernel(new_angle, y, p.t, m.tol).value +
                       log_kernel(Angle(old_a), y, p.t, m.tol).value;
            } else {
                const auto c = expansion(p.t);
                return p.beta * initial - c.evaluate(std::cos(new_a)) +
                       c.evaluate(std::cos(old_a));
            }
        },
        mode);
}

void write_snapshot(std::ostream& out, const LatticeConfig& x) {
    out << "site_index,angle\n";
    out.precision(17);
    for (int i = 0; i < x.size(); ++i) out << i << ',' << x.raw()[i] << '\n';
}

void read_snapshot(std::istream& in, LatticeConfig& x) {
    std::string line;
    if (!std::getline(in, line) || line != "site_index,angle") {
        throw ShapeError("snapshot must start with header 'site_index,angle'");
    }
    int count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        int site = 0;
        char comma = 0;
        double angle = 0.0;
        if (!(row >> site >> comma >> angle) || comma != ',') {
            throw ShapeError("malformed snapshot row: " + line);
        }
        if (site < 0 || site >= x.size()) throw ShapeError("snapshot site out of range");
        x.set(site, Angle(angle));
        ++count;
    }
    if (count != x.size()) throw ShapeError("snapshot does not cover every site");
}

}  // namespace xyflow
