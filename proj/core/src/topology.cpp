#include "dislo/topology.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dislo {

namespace {

int rounded_circulation(const OneForm& w, int cell) {
    const double c = cell_circulation(w, cell);
    const int ci = static_cast<int>(std::lround(c));
    if (std::abs(c - ci) > 1e-6) {
        throw std::runtime_error("detect_cores: non-integer circulation on cell " + std::to_string(cell));
    }
    return ci;
}

// Classic successive-shortest-path assignment solver; costs must be >= 0.
std::pair<int, std::vector<int>> assignment(const std::vector<std::vector<int>>& a) {
    const int n = static_cast<int>(a.size());
    std::vector<int> u(n + 1, 0), v(n + 1, 0), p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<int> minv(n + 1, INT_MAX);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int delta = INT_MAX, j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const int cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    int total = 0;
    for (int j = 1; j <= n; ++j) {
        if (p[j]) {
            row_to_col[p[j] - 1] = j - 1;
            total += a[p[j] - 1][j - 1];
        }
    }
    return {total, row_to_col};
}

// Canonical two-leg geodesic from `from` to `to` of length n: k steps along
// a_i then n-k along a_{i+1}, smallest i first, then smallest k.
CutPath canonical_path(const LatticeDomain& dom, int from, int to, int n) {
    for (int i = 1; i <= 6; ++i) {
        const int j = i == 6 ? 1 : i + 1;
        for (int k = 0; k <= n; ++k) {
            int c = from;
            bool ok = true;
            std::vector<int> cells;
            cells.reserve(n + 1);
            cells.push_back(c);
            for (int s = 0; s < n && ok; ++s) {
                c = dom.try_hop_op(c, s < k ? i : j);
                if (c < 0) ok = false;
                else cells.push_back(c);
            }
            if (ok && c == to) {
                CutPath path;
                path.core_neg = from;
                path.core_pos = to;
                path.cells = std::move(cells);
                path.legs[0] = {i, k};
                path.legs[1] = {j, n - k};
                return path;
            }
        }
    }
    throw std::runtime_error("canonical_path: no two-leg geodesic found");
}

}  // namespace

CoreSet detect_cores(const OneForm& w) {
    const LatticeDomain& dom = w.domain();
    CoreSet cores;
    for (int c = 0; c < dom.cell_count(); ++c) {
        const int ci = rounded_circulation(w, c);
        if (ci == 0) continue;
        if (ci > 1 || ci < -1) {
            throw std::runtime_error("detect_cores: cell circulation out of range on cell " +
                                     std::to_string(c));
        }
        (ci > 0 ? cores.positive : cores.negative).push_back(c);
    }
    return cores;
}

std::vector<Step> hexagon_loop(const LatticeDomain& dom, int k) {
    const auto [n0, m0] = dom.site_nm(dom.reference_site());
    std::vector<Step> loop;
    loop.reserve(6 * k);
    int n = n0 + k * kDirDn[1];
    int m = m0 + k * kDirDm[1];
    for (int leg = 1; leg <= 6; ++leg) {
        const int dir = leg + 2 > 6 ? leg - 4 : leg + 2;
        for (int s = 0; s < k; ++s) {
            const int site = dom.find_site(n, m);
            if (site < 0) throw std::invalid_argument("hexagon_loop: loop leaves the domain");
            loop.push_back({site, dir});
            n += kDirDn[dir];
            m += kDirDm[dir];
        }
    }
    return loop;
}

int net_burgers(const OneForm& w) {
    const LatticeDomain& dom = w.domain();
    const double rim = dom.radius() - 3.0;
    double far_max = 0.0;
    for (int b = 0; b < dom.bond_count(); ++b) {
        if (dom.dist_origin_bond(b) >= rim) far_max = std::max(far_max, std::abs(w[b]));
    }
    if (far_max >= 0.4) {
        throw std::invalid_argument("net_burgers: far field does not vanish (max " +
                                    std::to_string(far_max) + ")");
    }
    const CoreSet cores = detect_cores(w);
    const int by_cores = static_cast<int>(cores.positive.size()) -
                         static_cast<int>(cores.negative.size());
    const int k = static_cast<int>(std::floor(dom.radius())) - 2;
    const double loop_val = integrate(w, hexagon_loop(dom, k));
    const int by_loop = static_cast<int>(std::lround(loop_val));
    if (std::abs(loop_val - by_loop) > 1e-9 * (6 * k) || by_loop != by_cores) {
        throw std::runtime_error("net_burgers: loop integral and core sum disagree");
    }
    return by_cores;
}

MinimalConnection minimal_connection(const LatticeDomain& dom, const CoreSet& cores) {
    if (!cores.balanced()) {
        throw std::invalid_argument("minimal_connection: unbalanced cores (" +
                                    std::to_string(cores.positive.size()) + " positive, " +
                                    std::to_string(cores.negative.size()) + " negative)");
    }
    MinimalConnection mc;
    const int n = static_cast<int>(cores.positive.size());
    if (n == 0) return mc;
    std::vector<std::vector<int>> cost(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) cost[i][j] = dom.hop2(cores.positive[i], cores.negative[j]);
    }
    const auto [total, row_to_col] = assignment(cost);
    mc.total_length = total;
    for (int i = 0; i < n; ++i) {
        const int jneg = row_to_col[i];
        mc.paths.push_back(canonical_path(dom, cores.negative[jneg], cores.positive[i],
                                          cost[i][jneg]));
    }
    return mc;
}

int matching_cost_exhaustive(const LatticeDomain& dom, const CoreSet& cores) {
    if (!cores.balanced()) throw std::invalid_argument("matching_cost_exhaustive: unbalanced cores");
    const int n = static_cast<int>(cores.positive.size());
    if (n == 0) return 0;
    if (n > 8) throw std::invalid_argument("matching_cost_exhaustive: instance too large");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    int best = INT_MAX;
    do {
        int c = 0;
        for (int i = 0; i < n; ++i) c += dom.hop2(cores.positive[i], cores.negative[perm[i]]);
        best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

void add_path_to_form(const LatticeDomain& dom, const std::vector<int>& cells, IntegerForm& z) {
    for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
        const int slot = dom.neighbor_slot(cells[j], cells[j + 1]);
        if (slot < 0) throw std::invalid_argument("add_path_to_form: cells not adjacent");
        const BondRef br = dom.cell_boundary(cells[j])[slot];
        z[br.bond] += br.sign;
    }
}

std::vector<int> walk_legs(const LatticeDomain& dom, int start,
                           const std::array<StraightLeg, 2>& legs) {
    std::vector<int> cells{start};
    int c = start;
    for (const StraightLeg& leg : legs) {
        for (int s = 0; s < leg.length; ++s) {
            c = dom.hop_op(c, leg.dir);
            cells.push_back(c);
        }
    }
    return cells;
}

CutPath straighten(const LatticeDomain& dom, const std::vector<int>& cells) {
    if (cells.size() < 2) {
        CutPath path;
        path.core_neg = path.core_pos = cells.empty() ? -1 : cells.front();
        path.cells = cells;
        path.legs[0] = {1, 0};
        path.legs[1] = {2, 0};
        return path;
    }
    for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
        if (dom.neighbor_slot(cells[j], cells[j + 1]) < 0) {
            throw std::invalid_argument("straighten: input is not a dual path");
        }
    }
    const int n = static_cast<int>(cells.size()) - 1;
    if (dom.hop2(cells.front(), cells.back()) != n) {
        throw std::invalid_argument("straighten: input path is not a geodesic");
    }
    return canonical_path(dom, cells.front(), cells.back(), n);
}

CutDecomposition dmcp(const Displacement& u, const OneForm& beta) {
    const LatticeDomain& dom = u.domain();
    if (&beta.domain() != &dom) throw std::invalid_argument("dmcp: domain mismatch");
    const CoreSet cores = detect_cores(beta);
    if (!cores.balanced()) {
        throw std::invalid_argument("dmcp: unbalanced cores (" +
                                    std::to_string(cores.positive.size()) + " positive, " +
                                    std::to_string(cores.negative.size()) + " negative)");
    }
    CutDecomposition cut;
    cut.z = IntegerForm(dom);
    const MinimalConnection mc = minimal_connection(dom, cores);
    cut.paths = mc.paths;
    cut.total_length = mc.total_length;
    for (const CutPath& path : cut.paths) add_path_to_form(dom, path.cells, cut.z);

    // z0 = Du - beta is integer-valued; U integrates z - z0 over a site tree.
    const OneForm du = difference(u);
    IntegerForm delta(dom);
    for (int b = 0; b < dom.bond_count(); ++b) {
        const double r = du[b] - beta[b];
        const int ri = static_cast<int>(std::lround(r));
        if (std::abs(r - ri) > 1e-6) throw std::invalid_argument("dmcp: Du - beta is not integer-valued");
        delta[b] = cut.z[b] - ri;
    }
    for (int c = 0; c < dom.cell_count(); ++c) {
        if (cell_circulation(delta, c) != 0) {
            throw std::runtime_error("dmcp: cut field is not shift-equivalent to the input");
        }
    }
    cut.shift = Displacement(dom);
    std::vector<char> seen(dom.site_count(), 0);
    std::deque<int> queue;
    const int root = dom.reference_site();
    seen[root] = 1;
    queue.push_back(root);
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        for (int dir = 1; dir <= 6; ++dir) {
            const int nb = dom.neighbor(s, dir);
            if (nb < 0 || seen[nb]) continue;
            seen[nb] = 1;
            cut.shift[nb] = cut.shift[s] + delta.on(dom.bond(s, dir));
            queue.push_back(nb);
        }
    }
    cut.u_prime = u;
    for (int s = 0; s < dom.site_count(); ++s) cut.u_prime[s] += cut.shift[s];
    return cut;
}

DocpResult docp_shift(const EnergyState& state, const Displacement& u_in) {
    const LatticeDomain& dom = state.domain();
    const ReferenceField& ref = state.reference();
    if (ref.is_flat() || ref.shear().norm2() != 0.0 || ref.center().norm2() != 0.0) {
        throw std::invalid_argument("docp_shift: requires the origin-centred dislocation reference");
    }
    const Displacement& u = u_in;
    const OneForm rho = ref.strain();
    OneForm alpha(dom), beta(dom);
    {
        const OneForm du = difference(u);
        for (int b = 0; b < dom.bond_count(); ++b) {
            alpha[b] = wrap_value(rho[b] + du[b]);
            beta[b] = alpha[b] - rho[b];
        }
    }
    const CoreSet cores_alpha = detect_cores(alpha);
    if (cores_alpha.positive.empty()) {
        throw std::invalid_argument("docp_shift: no positive core present");
    }

    // Matching cost after pulling candidate C onto the origin cell equals the
    // minimal matching of (positives minus C) against the negatives; hop
    // distances are invariant under the lattice map.
    int best_cell = -1, best_cost = INT_MAX;
    double best_dist = 0.0;
    for (int cand : cores_alpha.positive) {
        CoreSet rest;
        for (int c : cores_alpha.positive) {
            if (c != cand) rest.positive.push_back(c);
        }
        rest.negative = cores_alpha.negative;
        if (!rest.balanced()) {
            throw std::invalid_argument("docp_shift: state does not carry net circulation one");
        }
        const int cost = minimal_connection(dom, rest).total_length;
        const double dist = dom.dist_origin_cell(cand);
        if (cost < best_cost ||
            (cost == best_cost && (dist < best_dist - 1e-12 ||
                                   (std::abs(dist - best_dist) <= 1e-12 && cand < best_cell)))) {
            best_cell = cand;
            best_cost = cost;
            best_dist = dist;
        }
    }

    DocpResult res;
    res.chosen_cell = best_cell;
    res.cut_length_before = dmcp(u, beta).total_length;
    res.energy_before = state.extended_energy(u);

    const CellAffineMap map = dom.cell_shift_map(best_cell);
    res.translation = !map.rotate;
    Displacement u_shift(dom);
    for (int s = 0; s < dom.site_count(); ++s) {
        const auto [n, m] = dom.site_nm(s);
        const auto [nn, mm] = map.apply_site(n, m);
        const int target = dom.find_site(nn, mm);
        const double uval = target >= 0 ? u[target] : 0.0;
        const Vec2 pos = dom.site_pos(s);
        u_shift[s] = uval + yhat(map.apply(pos)) - yhat(pos);
    }

    OneForm beta_shift(dom);
    {
        const OneForm du = difference(u_shift);
        for (int b = 0; b < dom.bond_count(); ++b) {
            beta_shift[b] = wrap_value(rho[b] + du[b]) - rho[b];
        }
    }
    CutDecomposition cut = dmcp(u_shift, beta_shift);
    res.cut_length_after = cut.total_length;
    res.u = cut.u_prime;
    res.cuts = std::move(cut);
    res.energy_after = state.extended_energy(res.u);

    // The shift preserves the energy exactly on the infinite lattice; on the
    // clamped disk a non-identity map leaves a truncation tail of order
    // (1+|x^C|)^2 / R^2. The identity case must agree to rounding.
    const double rim = state.active_radius();
    const double xc = dom.cell_barycentre(best_cell).norm();
    const bool identity = best_cell == dom.origin_cell();
    const double tol = identity ? 1e-8 : 1e-8 + 2.0 * (1.0 + xc) * (1.0 + xc) / (rim * rim);
    if (std::abs(res.energy_after - res.energy_before) > tol) {
        throw std::runtime_error("docp_shift: energy drifted by " +
                                 std::to_string(res.energy_after - res.energy_before));
    }
    return res;
}

}  // namespace dislo
