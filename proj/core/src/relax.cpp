#include "dislo/relax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dislo/elastic.hpp"

namespace dislo {

namespace {

// Energy of the strain field s plus the linear site term, matching
// EnergyState::extended_energy but reusing precomputed strains.
double energy_of_strains(const EnergyState& st, const std::vector<double>& s,
                         const std::vector<double>& u) {
    const LatticeDomain& dom = st.domain();
    const Potential& pot = st.potential();
    const OneForm& rho = st.reference().strain();
    double e = 0.0;
    for (int b = 0; b < dom.bond_count(); ++b) {
        e += pot.psi(s[b]) - pot.psi(rho[b]) - pot.dpsi(rho[b]) * (s[b] - rho[b]);
    }
    const std::vector<double>& f = st.reference_force();
    double lin = 0.0;
    for (int i = 0; i < dom.site_count(); ++i) lin += f[i] * u[i];
    return e + lin;
}

}  // namespace

namespace {
RelaxResult relax_impl(const EnergyState& state, const Displacement& u0, const RelaxConfig& cfg,
                       int retries);
}

RelaxResult relax(const EnergyState& state, const Displacement& u0, const RelaxConfig& cfg) {
    if (cfg.tolerance <= 0.0) throw std::invalid_argument("relax: tolerance must be positive");
    return relax_impl(state, u0, cfg, 0);
}

namespace {

RelaxResult relax_impl(const EnergyState& state, const Displacement& u0, const RelaxConfig& cfg,
                       int retries) {
    const LatticeDomain& dom = state.domain();
    const int nb = dom.bond_count();
    const int ns = dom.site_count();

    RelaxResult res;
    res.u = u0;
    state.clamp(res.u);

    std::vector<double> s(nb), s_trial(nb), dirs(ns, 0.0), grad(ns), grad_prev(ns), dd(nb);
    auto compute_strains = [&](const std::vector<double>& u) {
        const OneForm& rho = state.reference().strain();
        for (int b = 0; b < nb; ++b) {
            s[b] = rho[b] + u[dom.bond_head(b)] - u[dom.bond_tail(b)];
        }
    };
    auto compute_gradient = [&]() {
        std::fill(grad.begin(), grad.end(), 0.0);
        const Potential& pot = state.potential();
        for (int b = 0; b < nb; ++b) {
            const double v = pot.dpsi(s[b]);
            grad[dom.bond_tail(b)] -= v;
            grad[dom.bond_head(b)] += v;
        }
        for (int i = 0; i < ns; ++i) {
            if (!state.site_active(i)) grad[i] = 0.0;
        }
    };

    compute_strains(res.u.values());
    double energy = energy_of_strains(state, s, res.u.values());
    compute_gradient();

    double step = cfg.step0;
    double gg_prev = 0.0;
    const double eps_floor = 64.0 * std::numeric_limits<double>::epsilon();
    int restarts_since_progress = 0;

    for (int it = 0; it < cfg.max_iterations; ++it) {
        double gmax = 0.0, gg = 0.0;
        for (int i = 0; i < ns; ++i) {
            gmax = std::max(gmax, std::abs(grad[i]));
            gg += grad[i] * grad[i];
        }
        res.residual = gmax;
        res.iterations = it;
        if (gmax <= cfg.tolerance) {
            res.converged = true;
            break;
        }

        // descent direction
        bool cg_dir = false;
        if (cfg.use_cg && it > 0 && gg_prev > 0.0) {
            double num = 0.0;
            for (int i = 0; i < ns; ++i) num += grad[i] * (grad[i] - grad_prev[i]);
            const double beta = std::max(0.0, num / gg_prev);
            double gd = 0.0;
            for (int i = 0; i < ns; ++i) {
                dirs[i] = -grad[i] + beta * dirs[i];
                gd += grad[i] * dirs[i];
            }
            if (gd < 0.0) {
                cg_dir = true;
            }
        }
        if (!cg_dir) {
            for (int i = 0; i < ns; ++i) dirs[i] = -grad[i];
        }
        double slope = 0.0;
        for (int i = 0; i < ns; ++i) slope += grad[i] * dirs[i];

        for (int b = 0; b < nb; ++b) {
            dd[b] = dirs[dom.bond_head(b)] - dirs[dom.bond_tail(b)];
        }
        double fd = 0.0;
        {
            const std::vector<double>& f = state.reference_force();
            for (int i = 0; i < ns; ++i) fd += f[i] * dirs[i];
        }

        // Trial step from the one-dimensional quadratic model (exact for the
        // piecewise-quadratic well away from kinks), then backtracking with a
        // floating-point noise floor.
        const Potential& pot = state.potential();
        const OneForm& rho = state.reference().strain();
        double qdd = 0.0;
        for (int b = 0; b < nb; ++b) {
            dd[b] = dirs[dom.bond_head(b)] - dirs[dom.bond_tail(b)];
            qdd += pot.d2psi(s[b]) * dd[b] * dd[b];
        }
        double t = qdd > 0.0 ? -slope / qdd : std::min(step * 2.0, 4.0);
        if (!(t > 0.0) || t > 1e3) t = std::min(step * 2.0, 4.0);
        bool accepted = false;
        const double noise = eps_floor * (std::abs(energy) + 1.0);
        double e_lin = 0.0;
        {
            const std::vector<double>& f = state.reference_force();
            for (int i = 0; i < ns; ++i) e_lin += f[i] * res.u[i];
        }
        for (int ls = 0; ls < 60; ++ls) {
            double e_curv = 0.0;
            for (int b = 0; b < nb; ++b) {
                s_trial[b] = s[b] + t * dd[b];
                e_curv += pot.psi(s_trial[b]) - pot.psi(rho[b]) - pot.dpsi(rho[b]) * (s_trial[b] - rho[b]);
            }
            const double e_trial = e_curv + e_lin + t * fd;
            if (e_trial <= energy + cfg.armijo_c1 * t * slope + noise) {
                for (int i = 0; i < ns; ++i) res.u[i] += t * dirs[i];
                std::swap(s, s_trial);
                energy = e_trial;
                accepted = true;
                break;
            }
            t *= cfg.backtrack;
        }
        if (!accepted) {
            if (++restarts_since_progress > 4) {
                res.iterations = it + 1;
                break;
            }
            gg_prev = 0.0;  // force a steepest-descent restart
        } else {
            restarts_since_progress = 0;
            step = std::max(t, 1e-6);
            std::swap(grad_prev, grad);
            gg_prev = gg;
            compute_gradient();
        }
    }

    if (!res.converged) {
        double gmax = 0.0;
        for (int i = 0; i < ns; ++i) gmax = std::max(gmax, std::abs(grad[i]));
        res.residual = gmax;
        res.converged = gmax <= cfg.tolerance;
    }
    res.energy = energy;

    // A kinked potential must not come to rest on a half-integer strain.
    if (res.converged && state.potential().kinked()) {
        int offender = -1;
        for (int b = 0; b < nb; ++b) {
            if (std::abs(0.5 - std::abs(wrap_value(s[b]))) < 1e-12) {
                offender = b;
                break;
            }
        }
        if (offender >= 0) {
            if (retries >= 1) {
                throw std::runtime_error("relax: converged onto a half-integer strain on bond " +
                                         std::to_string(offender));
            }
            Displacement nudged = res.u;
            const int site = dom.bond_tail(offender);
            if (state.site_active(site)) nudged[site] += 1e-7;
            RelaxResult second = relax_impl(state, nudged, cfg, retries + 1);
            second.kink_retries = retries + 1;
            second.iterations += res.iterations;
            return second;
        }
    }
    return res;
}

}  // namespace

Displacement initial_superpose(const EnergyState& state,
                               const std::vector<std::pair<int, int>>& cores) {
    const LatticeDomain& dom = state.domain();
    int sign_sum = 0;
    for (std::size_t i = 0; i < cores.size(); ++i) {
        if (cores[i].second != 1 && cores[i].second != -1) {
            throw std::invalid_argument("initial_superpose: signs must be +1 or -1");
        }
        sign_sum += cores[i].second;
        for (std::size_t j = i + 1; j < cores.size(); ++j) {
            if (cores[i].first == cores[j].first) {
                throw std::invalid_argument("initial_superpose: core cells must be distinct");
            }
        }
    }
    const bool flat = state.reference().is_flat();
    if (!flat && sign_sum != 1) {
        throw std::invalid_argument("initial_superpose: dislocation reference requires sign sum 1");
    }
    if (flat && sign_sum != 0) {
        throw std::invalid_argument("initial_superpose: flat reference requires sign sum 0");
    }
    Displacement u(dom);
    for (int s = 0; s < dom.site_count(); ++s) {
        if (!state.site_active(s)) continue;
        const Vec2 x = dom.site_pos(s);
        double v = 0.0;
        for (const auto& [cell, sign] : cores) {
            v += sign * yhat(x - dom.cell_barycentre(cell));
        }
        if (!flat) v -= yhat(x);
        u[s] = v;
    }
    return u;
}

DecayFit decay_fit(const OneForm& w, Vec2 center, double r_min, double r_max) {
    const LatticeDomain& dom = w.domain();
    const int k_lo = static_cast<int>(std::floor(r_min));
    const int k_hi = static_cast<int>(std::ceil(r_max));
    if (k_hi <= k_lo) throw std::invalid_argument("decay_fit: empty radius range");
    std::vector<double> ring_max(k_hi - k_lo, 0.0);
    for (int b = 0; b < dom.bond_count(); ++b) {
        if (!dom.bond_interior(b)) continue;
        const double d = dom.bond_distance_to(b, center);
        const int k = static_cast<int>(std::floor(d));
        if (k < k_lo || k >= k_hi) continue;
        ring_max[k - k_lo] = std::max(ring_max[k - k_lo], std::abs(w[b]));
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < ring_max.size(); ++i) {
        if (ring_max[i] <= 0.0) continue;
        const double x = std::log(k_lo + i + 0.5);
        const double y = std::log(ring_max[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3) throw std::invalid_argument("decay_fit: not enough populated annuli");
    DecayFit fit;
    fit.annuli = n;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

namespace {

// Hop-ball membership for core bookkeeping in the experiments.
bool near_cell(const LatticeDomain& dom, int cell, int target, int hops) {
    if (cell == target) return true;
    const auto& dist = dom.hop_distances(target);
    return dist[cell] >= 0 && dist[cell] <= hops;
}

}  // namespace

ExperimentRecord dipole_experiment(const LatticeDomain& dom, const Potential& pot, int separation,
                                   const RelaxConfig& cfg) {
    // `separation` is the dual-graph hop distance between the dipole cells
    // (the metric the cut machinery works in; hop L corresponds to a
    // barycentre distance of L/2 along a lattice direction).
    const double r_act = dom.radius() - 2.0;
    if (separation < 2 || separation > dom.radius()) {
        throw std::invalid_argument("dipole_experiment: separation out of range");
    }
    const ReferenceField ref = ReferenceField::dislocation(dom);
    const EnergyState state(dom, pot, ref, r_act);

    // Dipole row well above the necessary core, centred horizontally.
    const int q0 = 8;
    const int p_left = static_cast<int>(std::lround(-0.5 * q0 - 0.25 * separation));
    const int cell_a = dom.find_cell(p_left, q0, CellOrient::Ref);
    if (cell_a < 0) throw std::invalid_argument("dipole_experiment: dipole leaves the domain");
    int cell_b = cell_a;
    for (int s = 0; s < separation; ++s) cell_b = dom.hop_op(cell_b, 1);
    if (dom.hop2(cell_a, cell_b) != separation) {
        throw std::logic_error("dipole_experiment: dipole placement is not hop-minimal");
    }

    ExperimentRecord rec;
    rec.name = "dipole";
    rec.separation = separation;
    const Displacement u0 =
        initial_superpose(state, {{dom.origin_cell(), +1}, {cell_a, +1}, {cell_b, -1}});

    auto census = [&](const Displacement& u) {
        OneForm alpha(dom);
        const OneForm du = difference(u);
        const OneForm& rho = ref.strain();
        for (int b = 0; b < dom.bond_count(); ++b) alpha[b] = wrap_value(rho[b] + du[b]);
        return std::pair<CoreSet, int>(detect_cores(alpha), net_burgers(alpha));
    };
    const auto [cores0, burgers0] = census(u0);
    rec.cores_before = cores0.count();
    rec.net_burgers_before = burgers0;

    const RelaxResult rr = relax(state, u0, cfg);
    rec.energy = rr.energy;
    rec.iterations = rr.iterations;
    rec.converged = rr.converged;

    const auto [cores1, burgers1] = census(rr.u);
    rec.cores_after = cores1.count();
    rec.net_burgers_after = burgers1;

    bool plus_alive = false, minus_alive = false;
    const int near = std::max(2, std::min(4, separation / 2));
    for (int c : cores1.positive) {
        if (near_cell(dom, c, cell_a, near)) plus_alive = true;
    }
    for (int c : cores1.negative) {
        if (near_cell(dom, c, cell_b, near)) minus_alive = true;
    }
    rec.persisted = plus_alive && minus_alive;
    rec.annihilated = cores1.negative.empty() && cores1.positive.size() == 1;
    return rec;
}

ExperimentRecord halfspace_experiment(double radius, const Potential& pot, int depth,
                                      const RelaxConfig& cfg) {
    // `depth` counts cell layers below the free surface (layer 1 is the
    // surface cell row); even layers are reference-orientation rows.
    if (depth < 1) throw std::invalid_argument("halfspace_experiment: depth must be at least 1");
    const LatticeDomain dom = LatticeDomain::half_space(radius);
    int core_cell;
    if (depth % 2 == 0) {
        const int q = -depth / 2;
        core_cell = dom.find_cell(static_cast<int>(std::lround(-0.5 * q)), q, CellOrient::Ref);
    } else {
        const int q = -(depth - 1) / 2;
        core_cell = dom.find_cell(static_cast<int>(std::lround(-0.5 * q - 0.5)), q, CellOrient::Anti);
    }
    if (core_cell < 0) throw std::invalid_argument("halfspace_experiment: depth outside the domain");
    const ReferenceField ref =
        ReferenceField::dislocation(dom, dom.cell_barycentre(core_cell));
    const EnergyState state(dom, pot, ref, radius - 2.0);

    ExperimentRecord rec;
    rec.name = "halfspace";
    rec.separation = depth;

    Displacement u0(dom);
    const RelaxResult rr = relax(state, u0, cfg);
    rec.energy = rr.energy;
    rec.iterations = rr.iterations;
    rec.converged = rr.converged;

    OneForm alpha(dom);
    const OneForm du = difference(rr.u);
    const OneForm& rho = ref.strain();
    for (int b = 0; b < dom.bond_count(); ++b) alpha[b] = wrap_value(rho[b] + du[b]);
    const CoreSet cores = detect_cores(alpha);
    rec.cores_before = 1;
    rec.cores_after = cores.count();
    rec.persisted = false;
    for (int c : cores.positive) {
        if (near_cell(dom, c, core_cell, 4)) rec.persisted = true;
    }
    rec.annihilated = cores.count() == 0;
    return rec;
}

}  // namespace dislo
