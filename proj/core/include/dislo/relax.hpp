#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dislo/energy.hpp"
#include "dislo/forms.hpp"
#include "dislo/topology.hpp"

namespace dislo {

struct RelaxConfig {
    double tolerance = 1e-8;   // max residual over active sites
    int max_iterations = 200000;
    bool use_cg = false;       // Polak-Ribiere acceleration
    double step0 = 0.15;       // initial trial step
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
};

struct RelaxResult {
    Displacement u;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
    double energy = 0.0;
    int kink_retries = 0;
};

// Local minimization of the extended energy by descent with a backtracking
// (sufficient-decrease) line search; optional nonlinear conjugate-gradient
// acceleration. Energy is non-increasing across accepted steps up to
// floating-point noise. A converged state sitting exactly on a half-integer
// bond strain is perturbed and re-relaxed once, then rejected.
RelaxResult relax(const EnergyState& state, const Displacement& u0, const RelaxConfig& cfg);

// Superposition initial condition: translated copies of the continuum field
// with prescribed signs. Sign sum 1 builds a corrector against the
// dislocation reference; sign sum 0 builds a flat-reference state.
Displacement initial_superpose(const EnergyState& state,
                               const std::vector<std::pair<int, int>>& cores);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    int annuli = 0;
};

// Least-squares slope of log(annulus max |w_b|) against log r over
// r in [r_min, r_max], unit-width annuli by bond distance to `center`.
// Bonds with incomplete endpoint stars are excluded.
DecayFit decay_fit(const OneForm& w, Vec2 center, double r_min, double r_max);

struct ExperimentRecord {
    std::string name;
    double separation = 0.0;
    bool persisted = false;
    bool annihilated = false;
    int cores_before = 0;
    int cores_after = 0;
    int net_burgers_before = 0;
    int net_burgers_after = 0;
    double energy = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Dislocation dipole superposed on the necessary core: relax and classify
// whether the dipole survives (lattice trapping) or collapses.
ExperimentRecord dipole_experiment(const LatticeDomain& dom, const Potential& pot, int separation,
                                   const RelaxConfig& cfg);

// Core at depth L under a free surface: relax over the half-space bond set
// and report whether the core stays trapped or escapes through the surface.
ExperimentRecord halfspace_experiment(double radius, const Potential& pot, int depth,
                                      const RelaxConfig& cfg);

}  // namespace dislo
