#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dislo/energy.hpp"
#include "dislo/topology.hpp"

namespace dislo {

// Quadratic remainder g(s,t) = [psi(t+s) - psi(t) - psi'(t) s] / s^2, with the
// continuous value psi''(t)/2 at s = 0.
double g_function(double s, double t, const Potential& p);

struct AuditEntry {
    std::string check;       // stable identifier of the inequality
    std::string sample;      // what was swept
    double claimed = 0.0;    // bound that must hold
    double measured = 0.0;   // worst observed value
    double margin = 0.0;     // measured - claimed (>= 0 passes for lower bounds)
    bool hard = true;        // asserted (vs fitted-constant report)
    bool pass = true;
};

struct AuditReport {
    std::vector<AuditEntry> entries;
    // fitted, non-asserted constants, one value per sweep half
    double r0_sweep[2] = {0.0, 0.0};     // radius beyond which the per-bond bound holds
    double c_eps_sweep[2] = {0.0, 0.0};  // additive constant of the elementary lower bound
    double c0_sweep[2] = {0.0, 0.0};     // cut force-sum correction constant
    double c3_sweep[2] = {0.0, 0.0};     // additive constant of the coercivity bound
    int configs = 0;
    int violations = 0;
    bool all_hard_pass() const {
        for (const AuditEntry& e : entries) {
            if (e.hard && !e.pass) return false;
        }
        return true;
    }
};

// Per-core boundary energy: sum of beta^2 over the three boundary bonds of
// every core of beta is at least 1/3 (Jensen).
AuditEntry core_energy_check(const OneForm& beta, const CoreSet& cores);

// Core count is at most 3 ||beta||_2^2.
AuditEntry core_count_check(const OneForm& beta);

// Two-leg path crossings: |int_Gamma z| <= 2 #positive cores for DOCP states;
// a single straight cut is crossed at most once.
AuditEntry crossing_check(const IntegerForm& z, const CoreSet& cores,
                          const std::vector<int>& sample_sites);

struct CutForceSum {
    double sum = 0.0;         // sum of z_b psi'(alpha_hat_b), unit circulation at the + core
    double alpha_sum = 0.0;   // sum of z_b alpha_hat_b, same orientation
    int hop_origin_neg = 0;   // hop distance of the negative end from the origin cell
    bool outward_radial = false;  // positive core closer to the origin
};

// Force sum along one straight-leg cut against the reference strain, in the
// orientation carrying unit circulation at the positive core. An outward
// radial cut has a nonnegative alpha-sum; a general cut obeys
//   sum >= -mu * arcsinh(2/sqrt3)/pi - c0 / hop(origin, negative core).
CutForceSum cut_force_sum(const EnergyState& state, const CutPath& path);

struct CoercivityTerms {
    double energy = 0.0;
    double beta_norm2_sq = 0.0;
    double quad_term = 0.0;       // (mu/2 - eps) ||beta||^2
    double cut_term = 0.0;        // sum z_b psi'(alpha_hat_b)
    double linear_term = 0.0;     // sum f(site) u(site)
    double c_eps_needed = 0.0;    // additive slack making the elementary bound hold
    double ratio_energy = 0.0;    // E / ||beta||^2
    double ratio_linear = 0.0;    // linear term / ||beta||
    double ratio_linear_du = 0.0; // linear term / ||Du|| (far-field force constant)
    int core_count = 0;
};

CoercivityTerms coercivity_audit(const EnergyState& state, const Displacement& u, double eps = 0.05);

// The strict constant gap used by the coercivity assembly.
double arcsinh_two_over_sqrt3_over_pi();

struct AuditConfig {
    double radius = 24.0;
    int configs = 100;
    std::uint64_t seed = 20240817;
    double support_radius = 8.0;
    double amplitude = 1.5;
    double eps = 0.05;
    int crossing_samples = 200;
};

// Seeded sweep of random compact displacements plus synthetic straight cuts;
// asserts every constant-free inequality and fits the named constants on the
// two disjoint halves of the sweep.
AuditReport run_audit(const AuditConfig& cfg, const Potential& pot);

}  // namespace dislo
