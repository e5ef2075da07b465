#pragma once

// Finite boxes {0..L-1}^d of planar rotors and the three energies of the
// two-layer construction:
//
//   initial      H(x)          = -J sum_<ik> cos(x_i - x_k) - h sum_i cos x_i
//   dynamical    H_t(x, y)     = beta H(x) - sum_i log p_t(x_i, y_i)
//   restricted   H_res(x)      = beta H(x) - sum_i (c1 cos x_i + c2 cos^2 x_i + c3 cos^3 x_i)
//
// The restricted energy is the dynamical energy at y = (pi)_i with the log
// kernel replaced by its three-term expansion. All energies are to be
// minimized; the Boltzmann weight is exp(-E).

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "xyflow/angle.hpp"
#include "xyflow/rng.hpp"

namespace xyflow {

struct ModelParams {
    double beta = 1.0;
    double J = 1.0;
    double h = 0.0;
    double t = 1.0;
    int d = 2;
    int L = 4;

    /// Throws DomainError on beta <= 0, J < 0, h < 0, t <= 0, d outside
    /// {1,2,3} or L < 2.
    void validate() const;
};

enum class BoundaryKind { periodic, fixed, free };

/// Lattice boundary. A fixed boundary is a layer of frozen ghost spins, one
/// per bond leaving the box.
struct Boundary {
    BoundaryKind kind = BoundaryKind::periodic;
    std::vector<double> layer;  ///< fixed only; size 1 (broadcast) or ghost count

    static Boundary periodic() { return {BoundaryKind::periodic, {}}; }
    static Boundary free() { return {BoundaryKind::free, {}}; }
    static Boundary fixed(Angle theta) { return {BoundaryKind::fixed, {theta.radians()}}; }
    static Boundary fixed_layer(std::vector<double> angles) {
        return {BoundaryKind::fixed, std::move(angles)};
    }
};

/// Geometry and neighbour tables of a box. Sites are indexed row-major
/// (last coordinate fastest); ghost spins of a fixed boundary follow the box
/// sites at indices n_sites() .. n_sites() + n_ghosts() - 1.
class Lattice {
public:
    static constexpr int kNoNeighbour = -1;

    Lattice(int d, int L, BoundaryKind kind);

    int dim() const noexcept { return d_; }
    int side() const noexcept { return L_; }
    BoundaryKind boundary_kind() const noexcept { return kind_; }
    int n_sites() const noexcept { return n_sites_; }
    int n_ghosts() const noexcept { return n_ghosts_; }
    int coordination() const noexcept { return 2 * d_; }

    /// Neighbours of `site`: entries are box sites, ghost indices or
    /// kNoNeighbour (free boundary).
    std::span<const int> neighbours(int site) const noexcept {
        return {neighbours_.data() + static_cast<std::size_t>(site) * 2 * d_,
                static_cast<std::size_t>(2 * d_)};
    }

    /// Every bond once; the second entry may be a ghost.
    std::span<const std::array<int, 2>> bonds() const noexcept { return bonds_; }

    std::vector<int> coords(int site) const;
    int index(std::span<const int> coords) const;
    int center_site() const;

    /// Sites coloured by coordinate-sum parity (0 first, then 1).
    const std::vector<int>& colour(int c) const noexcept { return colours_[c]; }

    bool operator==(const Lattice& other) const noexcept {
        return d_ == other.d_ && L_ == other.L_ && kind_ == other.kind_;
    }

private:
    int d_;
    int L_;
    BoundaryKind kind_;
    int n_sites_ = 0;
    int n_ghosts_ = 0;
    std::vector<int> neighbours_;
    std::vector<std::array<int, 2>> bonds_;
    std::array<std::vector<int>, 2> colours_;
};

/// Spin configuration on a box. Stored angles (box and ghosts) are always in
/// [0, 2pi).
class LatticeConfig {
public:
    LatticeConfig(int d, int L, const Boundary& boundary, double fill = 0.0);

    const Lattice& lattice() const noexcept { return *lattice_; }
    std::shared_ptr<const Lattice> lattice_ptr() const noexcept { return lattice_; }
    BoundaryKind boundary_kind() const noexcept { return lattice_->boundary_kind(); }

    int size() const noexcept { return lattice_->n_sites(); }
    Angle angle(int site) const noexcept { return Angle(angles_[site]); }
    void set(int site, Angle theta) noexcept { angles_[site] = theta.radians(); }

    /// Box sites followed by ghost spins.
    std::span<const double> raw() const noexcept { return angles_; }
    std::span<double> raw_mut() noexcept { return angles_; }
    std::span<const double> box() const noexcept {
        return std::span<const double>(angles_).first(static_cast<std::size_t>(size()));
    }

    void set_boundary_angle(Angle theta);

    /// Site-wise x -> 2pi - x, including the boundary layer.
    LatticeConfig reflected() const;
    /// Cyclic shift by `offset` (periodic boxes only).
    LatticeConfig shifted(std::span<const int> offset) const;

    void randomize(Rng& rng);

    bool operator==(const LatticeConfig& other) const {
        return *lattice_ == *other.lattice_ && angles_ == other.angles_;
    }

private:
    std::shared_ptr<const Lattice> lattice_;
    std::vector<double> angles_;
};

/// all(theta) or the all-pi configuration.
struct SpecialConfig {
    enum class Kind { all, y_spec } kind = Kind::y_spec;
    double theta = kPi;

    static SpecialConfig all(Angle a) { return {Kind::all, a.radians()}; }
    static SpecialConfig y_spec() { return {Kind::y_spec, kPi}; }
    double angle() const noexcept { return kind == Kind::y_spec ? kPi : theta; }
};

LatticeConfig make_config(int d, int L, const Boundary& boundary, SpecialConfig special);

double initial_energy(const LatticeConfig& x, const ModelParams& p);
double dynamical_energy(const LatticeConfig& x, const LatticeConfig& y, const ModelParams& p,
                        double tol = 1e-13);
double restricted_energy(const LatticeConfig& x, const ModelParams& p);

struct InitialMode {};
struct DynamicalMode {
    const LatticeConfig* y = nullptr;
    double tol = 1e-13;
};
struct RestrictedMode {};
using EnergyMode = std::variant<InitialMode, DynamicalMode, RestrictedMode>;

/// E(x with `site` set to `new_angle`) - E(x) in the given mode, from the
/// site's neighbourhood only.
double local_energy_delta(const LatticeConfig& x, int site, Angle new_angle,
                          const ModelParams& p, const EnergyMode& mode);

/// Full energy in the given mode.
double energy(const LatticeConfig& x, const ModelParams& p, const EnergyMode& mode);

/// CSV snapshot with header "site_index,angle" (box sites only).
void write_snapshot(std::ostream& out, const LatticeConfig& x);
void read_snapshot(std::istream& in, LatticeConfig& x);

}  // namespace xyflow
