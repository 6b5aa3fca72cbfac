#pragma once

#include <optional>
#include <vector>

#include "dislo/elastic.hpp"
#include "dislo/forms.hpp"
#include "dislo/lattice.hpp"
#include "dislo/potential.hpp"

namespace dislo {

// Energy difference sum(psi(Dy_b) - psi(Dyt_b)) over canonical bonds touching
// the support of y - yt. Rejects supports that reach the domain boundary.
double energy_diff(const Potential& pot, const Displacement& y, const Displacement& yt);

struct EllipticityReport {
    double min_half_distance = 0.0;  // min over bonds of dist(strain, 1/2 + Z)
    int argmin_bond = -1;
    double ritz_min = 0.0;           // smallest-eigenvalue estimate of the Hessian form
    int ritz_iterations = 0;
    double ritz_residual = 0.0;
};

// The extended energy-difference functional about a reference strain field:
//   E(u) = sum_b [psi(rho_b + Du_b) - psi(rho_b) - psi'(rho_b) Du_b]
//        + sum_site f(site) u(site),
// where f is the reference residual force. Displacements are clamped to zero
// outside the active region; bond sums run in index order.
class EnergyState {
public:
    EnergyState(const LatticeDomain& dom, const Potential& pot, const ReferenceField& ref,
                double active_radius);

    const LatticeDomain& domain() const { return *dom_; }
    const Potential& potential() const { return *pot_; }
    const ReferenceField& reference() const { return *ref_; }
    double active_radius() const { return active_radius_; }
    bool site_active(int s) const { return active_[s] != 0; }
    const std::vector<std::uint8_t>& active_mask() const { return active_; }
    const std::vector<double>& reference_force() const { return *force_; }

    Displacement zero() const { return Displacement(*dom_); }
    // Clamp to zero outside the active region (in place).
    void clamp(Displacement& u) const;

    double extended_energy(const Displacement& u) const;
    // Site gradient of the extended energy; equals the reference force at u=0.
    Displacement gradient(const Displacement& u) const;
    double max_active_residual(const Displacement& g) const;

    // Hessian quadratic form sum psi''(rho + Du) Dv^2. For kinked potentials a
    // bond whose strain sits on a half-integer is rejected with its id.
    double hessian_apply(const Displacement& u, const Displacement& v) const;

    EllipticityReport ellipticity_check(const Displacement& u, int ritz_iters = 400) const;

    // Strain field rho + Du per canonical bond.
    void strains(const Displacement& u, std::vector<double>& out) const;

private:
    const LatticeDomain* dom_;
    const Potential* pot_;
    const ReferenceField* ref_;
    double active_radius_;
    std::vector<std::uint8_t> active_;
    const std::vector<double>* force_;
    std::vector<double> psi_ref_, dpsi_ref_;  // per-bond reference values
};

}  // namespace dislo
