#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dislo/forms.hpp"
#include "dislo/lattice.hpp"
#include "dislo/potential.hpp"

namespace dislo {

// Continuum screw-dislocation displacement: (1/2pi) arg(x), branch cut along
// the positive x1-axis, values in [0, 1). Rejects x = 0.
double yhat(Vec2 x);

// grad yhat = (-x2, x1) / (2 pi |x|^2), smooth away from the origin.
Vec2 grad_yhat(Vec2 x);

// Bond-length form of yhat about `center`: 1/(2 pi) times the signed angle the
// bond subtends at the center. Always in [-1/3, 1/3] for nearest-neighbour
// bonds when the center is a cell barycentre.
double alpha_hat_bond(Vec2 tail, Vec2 head, Vec2 center);

// Linear-elasticity reference strain on a domain: the unique wrap of D(yhat)
// about a cell barycentre, optionally superposed with a uniform shear strain
// (shear . a_i per direction-i bond). A default-constructed flat reference has
// zero strain everywhere.
class ReferenceField {
public:
    static ReferenceField dislocation(const LatticeDomain& dom, Vec2 center = {0, 0},
                                      Vec2 shear = {0, 0});
    static ReferenceField flat(const LatticeDomain& dom);

    const LatticeDomain& domain() const { return *dom_; }
    Vec2 center() const { return center_; }
    Vec2 shear() const { return shear_; }
    bool is_flat() const { return flat_; }

    // Pure angular part (no shear).
    const OneForm& alpha_hat() const { return alpha_hat_; }
    // Reference strain entering the energy: alpha_hat + shear part.
    const OneForm& strain() const { return strain_; }

    // Residual force of the reference state: f(xi) = -sum over outward bonds
    // of psi'(strain). Cached per potential; boundary sites with incomplete
    // stars are flagged via LatticeDomain::full_star.
    const std::vector<double>& force(const Potential& pot) const;

    double dist_center_site(int s) const { return (dom_->site_pos(s) - center_).norm(); }
    double dist_center_bond(int b) const { return dom_->bond_distance_to(b, center_); }
    double dist_center_cell(int c) const { return dom_->cell_distance_to(c, center_); }

private:
    const LatticeDomain* dom_ = nullptr;
    Vec2 center_{0, 0};
    Vec2 shear_{0, 0};
    bool flat_ = true;
    OneForm alpha_hat_;
    OneForm strain_;

    struct ForceCache {
        std::mutex mutex;
        std::map<std::string, std::vector<double>> fields;
    };
    std::unique_ptr<ForceCache> force_cache_ = std::make_unique<ForceCache>();
};

}  // namespace dislo
