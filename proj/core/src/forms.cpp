#include "dislo/forms.hpp"

#include <cmath>
#include <stdexcept>

namespace dislo {

OneForm difference(const Displacement& u) {
    const LatticeDomain& dom = u.domain();
    OneForm du(dom);
    for (int b = 0; b < dom.bond_count(); ++b) {
        du[b] = u[dom.bond_head(b)] - u[dom.bond_tail(b)];
    }
    return du;
}

double wrap_value(double w) {
    return w - std::ceil(w - 0.5);
}

OneForm wrap(const OneForm& w) {
    OneForm alpha(w.domain());
    for (int b = 0; b < w.size(); ++b) alpha[b] = wrap_value(w[b]);
    return alpha;
}

OneForm cleanup_adjacent_cores(const OneForm& alpha) {
    const LatticeDomain& dom = alpha.domain();
    OneForm out = alpha;
    std::vector<int> circ(dom.cell_count(), 0);
    for (int c = 0; c < dom.cell_count(); ++c) {
        circ[c] = static_cast<int>(std::lround(cell_circulation(out, c)));
    }
    for (int c = 0; c < dom.cell_count(); ++c) {
        if (circ[c] == 0) continue;
        const auto& nbrs = dom.cell_neighbors(c);
        const auto& bnd = dom.cell_boundary(c);
        for (int k = 0; k < 3; ++k) {
            const int nb = nbrs[k];
            if (nb < 0 || nb < c) continue;  // visit each pair once
            if (circ[nb] != -circ[c]) continue;
            const int b = bnd[k].bond;
            if (std::abs(std::abs(out[b]) - 0.5) > 1e-12) continue;
            out[b] = -out[b];
            circ[c] = static_cast<int>(std::lround(cell_circulation(out, c)));
            circ[nb] = static_cast<int>(std::lround(cell_circulation(out, nb)));
            break;
        }
    }
    return out;
}

double integrate(const OneForm& w, std::span<const Step> path) {
    double s = 0.0;
    for (const Step& st : path) {
        const BondRef br = w.domain().bond(st);
        if (br.bond < 0) throw std::invalid_argument("integrate: path bond outside domain");
        s += w.on(br);
    }
    return s;
}

int integrate(const IntegerForm& w, std::span<const Step> path) {
    int s = 0;
    for (const Step& st : path) {
        const BondRef br = w.domain().bond(st);
        if (br.bond < 0) throw std::invalid_argument("integrate: path bond outside domain");
        s += w.on(br);
    }
    return s;
}

double cell_circulation(const OneForm& w, int cell) {
    double s = 0.0;
    for (const BondRef& br : w.domain().cell_boundary(cell)) s += w.on(br);
    return s;
}

int cell_circulation(const IntegerForm& w, int cell) {
    int s = 0;
    for (const BondRef& br : w.domain().cell_boundary(cell)) s += w.on(br);
    return s;
}

}  // namespace dislo
