#include "dislo/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dislo {

double energy_diff(const Potential& pot, const Displacement& y, const Displacement& yt) {
    const LatticeDomain& dom = y.domain();
    if (&dom != &yt.domain()) throw std::invalid_argument("energy_diff: domain mismatch");
    std::vector<std::uint8_t> in_supp(dom.site_count(), 0);
    for (int s = 0; s < dom.site_count(); ++s) {
        if (y[s] != yt[s]) {
            if (!dom.full_star(s)) {
                throw std::invalid_argument("energy_diff: support reaches the domain boundary");
            }
            in_supp[s] = 1;
        }
    }
    double e = 0.0;
    for (int b = 0; b < dom.bond_count(); ++b) {
        const int t = dom.bond_tail(b), h = dom.bond_head(b);
        if (!in_supp[t] && !in_supp[h]) continue;
        e += pot.psi(y[h] - y[t]) - pot.psi(yt[h] - yt[t]);
    }
    return e;
}

EnergyState::EnergyState(const LatticeDomain& dom, const Potential& pot,
                         const ReferenceField& ref, double active_radius)
    : dom_(&dom), pot_(&pot), ref_(&ref), active_radius_(active_radius) {
    if (&ref.domain() != &dom) throw std::invalid_argument("EnergyState: reference/domain mismatch");
    if (!dom.is_half_space() && active_radius > dom.radius() - 2.0 + 1e-12) {
        throw std::invalid_argument("EnergyState: active radius must leave a 2-site margin");
    }
    active_.assign(dom.site_count(), 0);
    for (int s = 0; s < dom.site_count(); ++s) {
        if ((dom.site_pos(s) - ref.center()).norm() <= active_radius) active_[s] = 1;
    }
    force_ = &ref.force(pot);
    psi_ref_.resize(dom.bond_count());
    dpsi_ref_.resize(dom.bond_count());
    const OneForm& rho = ref.strain();
    for (int b = 0; b < dom.bond_count(); ++b) {
        psi_ref_[b] = pot.psi(rho[b]);
        dpsi_ref_[b] = pot.dpsi(rho[b]);
    }
}

void EnergyState::clamp(Displacement& u) const {
    for (int s = 0; s < dom_->site_count(); ++s) {
        if (!active_[s]) u[s] = 0.0;
    }
}

void EnergyState::strains(const Displacement& u, std::vector<double>& out) const {
    const OneForm& rho = ref_->strain();
    out.resize(dom_->bond_count());
    for (int b = 0; b < dom_->bond_count(); ++b) {
        out[b] = rho[b] + u[dom_->bond_head(b)] - u[dom_->bond_tail(b)];
    }
}

double EnergyState::extended_energy(const Displacement& u) const {
    const OneForm& rho = ref_->strain();
    double e = 0.0;
    for (int b = 0; b < dom_->bond_count(); ++b) {
        const double du = u[dom_->bond_head(b)] - u[dom_->bond_tail(b)];
        e += pot_->psi(rho[b] + du) - psi_ref_[b] - dpsi_ref_[b] * du;
    }
    const std::vector<double>& f = *force_;
    double lin = 0.0;
    for (int s = 0; s < dom_->site_count(); ++s) lin += f[s] * u[s];
    return e + lin;
}

Displacement EnergyState::gradient(const Displacement& u) const {
    const OneForm& rho = ref_->strain();
    Displacement g(*dom_);
    for (int b = 0; b < dom_->bond_count(); ++b) {
        const int t = dom_->bond_tail(b), h = dom_->bond_head(b);
        const double v = pot_->dpsi(rho[b] + u[h] - u[t]);
        g[t] -= v;
        g[h] += v;
    }
    return g;
}

double EnergyState::max_active_residual(const Displacement& g) const {
    double r = 0.0;
    for (int s = 0; s < dom_->site_count(); ++s) {
        if (active_[s]) r = std::max(r, std::abs(g[s]));
    }
    return r;
}

double EnergyState::hessian_apply(const Displacement& u, const Displacement& v) const {
    const OneForm& rho = ref_->strain();
    double q = 0.0;
    for (int b = 0; b < dom_->bond_count(); ++b) {
        const double s = rho[b] + u[dom_->bond_head(b)] - u[dom_->bond_tail(b)];
        if (pot_->kinked() && std::abs(0.5 - std::abs(wrap_value(s))) < 1e-9) {
            throw std::domain_error("hessian_apply: half-integer strain on bond " + std::to_string(b));
        }
        const double dv = v[dom_->bond_head(b)] - v[dom_->bond_tail(b)];
        q += pot_->d2psi(s) * dv * dv;
    }
    return q;
}

EllipticityReport EnergyState::ellipticity_check(const Displacement& u, int ritz_iters) const {
    EllipticityReport rep;
    std::vector<double> s;
    strains(u, s);
    rep.min_half_distance = 1.0;
    std::vector<double> coeff(dom_->bond_count());
    for (int b = 0; b < dom_->bond_count(); ++b) {
        const double d = 0.5 - std::abs(wrap_value(s[b]));
        if (d < rep.min_half_distance) {
            rep.min_half_distance = d;
            rep.argmin_bond = b;
        }
        coeff[b] = pot_->d2psi(s[b]);
    }

    // Smallest Ritz value of the Hessian form on the active region via power
    // iteration on sigma*I - A, A the bond-weighted graph Laplacian.
    double cmax = 0.0;
    for (double c : coeff) cmax = std::max(cmax, std::abs(c));
    const double sigma = 12.0 * cmax + 1.0;
    std::vector<double> v(dom_->site_count(), 0.0), av(dom_->site_count(), 0.0);
    std::uint64_t rng = 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < dom_->site_count(); ++i) {
        rng = rng * 6364136223846793005ull + 1442695040888963407ull;
        if (active_[i]) v[i] = static_cast<double>(rng >> 11) * 0x1.0p-53 - 0.5;
    }
    auto apply_a = [&](const std::vector<double>& x, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (int b = 0; b < dom_->bond_count(); ++b) {
            const int t = dom_->bond_tail(b), h = dom_->bond_head(b);
            const double xt = active_[t] ? x[t] : 0.0;
            const double xh = active_[h] ? x[h] : 0.0;
            const double w = coeff[b] * (xh - xt);
            if (active_[t]) out[t] -= w;
            if (active_[h]) out[h] += w;
        }
    };
    for (int it = 0; it < ritz_iters; ++it) {
        apply_a(v, av);
        double nrm2 = 0.0;
        for (int i = 0; i < dom_->site_count(); ++i) {
            av[i] = sigma * v[i] - av[i];
            if (active_[i]) nrm2 += av[i] * av[i];
        }
        const double nrm = std::sqrt(nrm2);
        if (nrm == 0.0) break;
        for (int i = 0; i < dom_->site_count(); ++i) v[i] = active_[i] ? av[i] / nrm : 0.0;
        rep.ritz_iterations = it + 1;
    }
    apply_a(v, av);
    double ray = 0.0, vv = 0.0, res = 0.0;
    for (int i = 0; i < dom_->site_count(); ++i) {
        if (!active_[i]) continue;
        ray += v[i] * av[i];
        vv += v[i] * v[i];
    }
    ray = vv > 0 ? ray / vv : 0.0;
    for (int i = 0; i < dom_->site_count(); ++i) {
        if (!active_[i]) continue;
        const double r = av[i] - ray * v[i];
        res += r * r;
    }
    rep.ritz_min = ray;
    rep.ritz_residual = std::sqrt(res);
    return rep;
}

}  // namespace dislo
