#include "dislo/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace dislo {

namespace {

constexpr std::uint64_t pack_pair(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a + (1 << 20))) << 32) |
           static_cast<std::uint32_t>(b + (1 << 20));
}

constexpr std::uint64_t pack_cell(int p, int q, CellOrient o) {
    return (pack_pair(p, q) << 1) | static_cast<std::uint64_t>(o);
}

}  // namespace

Vec2 direction_vector(int dir) {
    static const Vec2 a[7] = {
        {0, 0},
        {1.0, 0.0},
        {0.5, 0.5 * kSqrt3},
        {-0.5, 0.5 * kSqrt3},
        {-1.0, 0.0},
        {-0.5, -0.5 * kSqrt3},
        {0.5, -0.5 * kSqrt3},
    };
    return a[dir];
}

Vec2 site_position(int n, int m) {
    return {0.5 + n + 0.5 * m, kSqrt3 / 6.0 + m * (0.5 * kSqrt3)};
}

Vec2 CellAffineMap::apply(Vec2 x) const {
    // Barycentre of the anchor cell: (p + q/2, q*sqrt3/2) for the reference
    // orientation, shifted by (1/2, -sqrt3/6) for the opposite one.
    if (!rotate) {
        return x + Vec2{p + 0.5 * q, q * 0.5 * kSqrt3};
    }
    return rotate60(x) + Vec2{p + 0.5 * q + 0.5, (q * 0.5 - 1.0 / 6.0) * kSqrt3};
}

std::pair<int, int> CellAffineMap::apply_site(int n, int m) const {
    if (!rotate) return {n + p, m + q};
    return {p - m, n + m + q};
}

std::tuple<int, int, CellOrient> CellAffineMap::apply_cell(int cp, int cq, CellOrient o) const {
    if (!rotate) return {cp + p, cq + q, o};
    if (o == CellOrient::Ref) return {p - cq, cp + cq + q, CellOrient::Anti};
    return {p - cq + 1, cp + cq + q, CellOrient::Ref};
}

LatticeDomain LatticeDomain::disk(double radius) {
    if (radius < 3.0) throw std::invalid_argument("LatticeDomain: radius must be at least 3");
    LatticeDomain dom;
    dom.build(radius, false);
    return dom;
}

LatticeDomain LatticeDomain::half_space(double radius) {
    if (radius < 3.0) throw std::invalid_argument("LatticeDomain: radius must be at least 3");
    LatticeDomain dom;
    dom.build(radius, true);
    return dom;
}

void LatticeDomain::build(double radius, bool half_space) {
    radius_ = radius;
    half_space_ = half_space;
    const double r2 = radius * radius * (1.0 + 1e-14) + 1e-9;

    const int mmax = static_cast<int>(std::ceil(radius / (0.5 * kSqrt3))) + 2;
    for (int m = -mmax; m <= mmax; ++m) {
        const int nmax = static_cast<int>(std::ceil(radius)) + std::abs(m) + 3;
        for (int n = -nmax; n <= nmax; ++n) {
            const Vec2 pos = site_position(n, m);
            if (pos.norm2() > r2) continue;
            if (half_space && pos.y > 1e-9) continue;
            site_nm_.emplace_back(n, m);
            site_pos_.push_back(pos);
        }
    }
    for (int s = 0; s < site_count(); ++s) {
        site_index_.emplace(pack_pair(site_nm_[s].first, site_nm_[s].second), s);
    }

    site_nbrs_.assign(site_count(), {-1, -1, -1, -1, -1, -1});
    site_bonds_.assign(site_count(), {-1, -1, -1});
    full_star_.assign(site_count(), 1);
    for (int s = 0; s < site_count(); ++s) {
        const auto [n, m] = site_nm_[s];
        for (int dir = 1; dir <= 6; ++dir) {
            const int nb = find_site(n + kDirDn[dir], m + kDirDm[dir]);
            site_nbrs_[s][dir - 1] = nb;
            if (nb < 0) full_star_[s] = 0;
        }
        for (int dir = 1; dir <= 3; ++dir) {
            const int nb = site_nbrs_[s][dir - 1];
            if (nb < 0) continue;
            site_bonds_[s][dir - 1] = static_cast<int>(bond_tail_.size());
            bond_tail_.push_back(s);
            bond_head_.push_back(nb);
            bond_dir_.push_back(static_cast<std::uint8_t>(dir));
        }
    }

    ref_site_ = find_site(0, -1);
    if (ref_site_ < 0) throw std::invalid_argument("LatticeDomain: reference site missing");

    // Cells. A reference-orientation cell R(p,q) has vertices (p,q), (p-1,q),
    // (p,q-1) and barycentre (p + q/2, q*sqrt3/2); the opposite orientation
    // A(p,q) has vertices (p,q), (p,q-1), (p+1,q-1).
    auto try_add_cell = [&](int p, int q, CellOrient o) {
        int v0, v1, v2;
        if (o == CellOrient::Ref) {
            v0 = find_site(p, q);
            v1 = find_site(p - 1, q);
            v2 = find_site(p, q - 1);
        } else {
            v0 = find_site(p, q);
            v1 = find_site(p, q - 1);
            v2 = find_site(p + 1, q - 1);
        }
        if (v0 < 0 || v1 < 0 || v2 < 0) return;
        const std::uint64_t key = pack_cell(p, q, o);
        if (cell_index_.count(key)) return;
        cell_index_.emplace(key, static_cast<int>(cell_p_.size()));
        cell_p_.push_back(p);
        cell_q_.push_back(q);
        cell_orient_.push_back(static_cast<std::uint8_t>(o));
        cell_verts_.push_back({v0, v1, v2});
        if (o == CellOrient::Ref) {
            cell_bary_.push_back({p + 0.5 * q, q * 0.5 * kSqrt3});
        } else {
            cell_bary_.push_back({p + 0.5 * q + 0.5, (0.5 * q - 1.0 / 6.0) * kSqrt3});
        }
    };
    for (int s = 0; s < site_count(); ++s) {
        const auto [n, m] = site_nm_[s];
        // every cell has a vertex at its (p,q) index site
        try_add_cell(n, m, CellOrient::Ref);
        try_add_cell(n, m, CellOrient::Anti);
        try_add_cell(n + 1, m, CellOrient::Ref);       // s as (p-1, q)
        try_add_cell(n, m + 1, CellOrient::Ref);       // s as (p, q-1)
        try_add_cell(n, m + 1, CellOrient::Anti);      // s as (p, q-1)
        try_add_cell(n - 1, m + 1, CellOrient::Anti);  // s as (p+1, q-1)
    }

    // Counterclockwise boundaries and dual adjacency.
    cell_bnd_.resize(cell_count());
    cell_nbrs_.resize(cell_count());
    for (int c = 0; c < cell_count(); ++c) {
        const int p = cell_p_[c], q = cell_q_[c];
        if (cell_orient(c) == CellOrient::Ref) {
            // (p,q-1) -a2-> (p,q) -a4-> (p-1,q) -a6-> (p,q-1)
            cell_bnd_[c][0] = bond(find_site(p, q - 1), 2);
            cell_bnd_[c][1] = bond(find_site(p - 1, q), 1);
            cell_bnd_[c][1].sign = -cell_bnd_[c][1].sign;
            cell_bnd_[c][2] = bond(find_site(p, q - 1), 3);
            cell_bnd_[c][2].sign = -cell_bnd_[c][2].sign;
            cell_nbrs_[c][0] = find_cell(p, q, CellOrient::Anti);
            cell_nbrs_[c][1] = find_cell(p - 1, q + 1, CellOrient::Anti);
            cell_nbrs_[c][2] = find_cell(p - 1, q, CellOrient::Anti);
        } else {
            // (p,q-1) -a1-> (p+1,q-1) -a3-> (p,q) -a5-> (p,q-1)
            cell_bnd_[c][0] = bond(find_site(p, q - 1), 1);
            cell_bnd_[c][1] = bond(find_site(p + 1, q - 1), 3);
            cell_bnd_[c][2] = bond(find_site(p, q - 1), 2);
            cell_bnd_[c][2].sign = -cell_bnd_[c][2].sign;
            cell_nbrs_[c][0] = find_cell(p + 1, q - 1, CellOrient::Ref);
            cell_nbrs_[c][1] = find_cell(p + 1, q, CellOrient::Ref);
            cell_nbrs_[c][2] = find_cell(p, q, CellOrient::Ref);
        }
    }

    origin_cell_ = find_cell(0, 0, CellOrient::Ref);
    if (!half_space_ && origin_cell_ < 0) {
        throw std::invalid_argument("LatticeDomain: origin cell missing");
    }
    check_invariants();
}

void LatticeDomain::check_invariants() const {
    for (int c = 0; c < cell_count(); ++c) {
        for (const BondRef& br : cell_bnd_[c]) {
            if (br.bond < 0) throw std::logic_error("LatticeDomain: cell with missing boundary bond");
        }
        if (cell_interior(c)) {
            for (int nb : cell_nbrs_[c]) {
                if (nb < 0) throw std::logic_error("LatticeDomain: interior cell with missing neighbor");
            }
        }
    }
}

int LatticeDomain::find_site(int n, int m) const {
    const auto it = site_index_.find(pack_pair(n, m));
    return it == site_index_.end() ? -1 : it->second;
}

int LatticeDomain::neighbor(int s, int dir) const { return site_nbrs_[s][dir - 1]; }

BondRef LatticeDomain::bond(int site, int dir) const {
    if (site < 0) return {};
    if (dir <= 3) {
        const int b = site_bonds_[site][dir - 1];
        return b < 0 ? BondRef{} : BondRef{b, +1};
    }
    const int head = site_nbrs_[site][dir - 1];
    if (head < 0) return {};
    const int b = site_bonds_[head][dir - 4];
    return b < 0 ? BondRef{} : BondRef{b, -1};
}

double LatticeDomain::bond_distance_to(int b, Vec2 p) const {
    return segment_distance(p, site_pos_[bond_tail_[b]], site_pos_[bond_head_[b]]);
}

int LatticeDomain::find_cell(int p, int q, CellOrient o) const {
    const auto it = cell_index_.find(pack_cell(p, q, o));
    return it == cell_index_.end() ? -1 : it->second;
}

int LatticeDomain::nearest_cell(Vec2 x, CellOrient o) const {
    int best = -1;
    double best_d = 0.0;
    // cell barycentres near x: invert the barycentre formulas around round()
    const int q0 = static_cast<int>(std::lround(x.y / (0.5 * kSqrt3)));
    for (int dq = -2; dq <= 2; ++dq) {
        const int q = q0 + dq;
        const int p0 = static_cast<int>(std::lround(x.x - 0.5 * q));
        for (int dp = -2; dp <= 2; ++dp) {
            const int c = find_cell(p0 + dp, q, o);
            if (c < 0) continue;
            const double d = (cell_bary_[c] - x).norm();
            if (best < 0 || d < best_d) {
                best = c;
                best_d = d;
            }
        }
    }
    if (best < 0) throw std::invalid_argument("nearest_cell: no cell near requested point");
    return best;
}

double LatticeDomain::cell_distance_to(int c, Vec2 p) const {
    const auto& v = cell_verts_[c];
    const Vec2 x0 = site_pos_[v[0]], x1 = site_pos_[v[1]], x2 = site_pos_[v[2]];
    // inside test via signs of cross products
    const double c0 = cross(x1 - x0, p - x0);
    const double c1 = cross(x2 - x1, p - x1);
    const double c2 = cross(x0 - x2, p - x2);
    if ((c0 >= 0 && c1 >= 0 && c2 >= 0) || (c0 <= 0 && c1 <= 0 && c2 <= 0)) return 0.0;
    return std::min({segment_distance(p, x0, x1), segment_distance(p, x1, x2),
                     segment_distance(p, x2, x0)});
}

bool LatticeDomain::cell_interior(int c) const {
    const auto& v = cell_verts_[c];
    return full_star_[v[0]] && full_star_[v[1]] && full_star_[v[2]];
}

const std::vector<int>& LatticeDomain::hop_distances(int source) const {
    std::lock_guard<std::mutex> lock(hop_cache_->mutex);
    auto it = hop_cache_->fields.find(source);
    if (it != hop_cache_->fields.end()) return *it->second;
    auto dist = std::make_unique<std::vector<int>>(cell_count(), -1);
    std::deque<int> queue;
    (*dist)[source] = 0;
    queue.push_back(source);
    while (!queue.empty()) {
        const int c = queue.front();
        queue.pop_front();
        for (int nb : cell_nbrs_[c]) {
            if (nb >= 0 && (*dist)[nb] < 0) {
                (*dist)[nb] = (*dist)[c] + 1;
                queue.push_back(nb);
            }
        }
    }
    auto [pos, ok] = hop_cache_->fields.emplace(source, std::move(dist));
    (void)ok;
    return *pos->second;
}

int LatticeDomain::hop2(int ca, int cb) const {
    if (ca < 0 || cb < 0 || ca >= cell_count() || cb >= cell_count()) {
        throw std::invalid_argument("hop2: cell outside domain");
    }
    const int d = hop_distances(ca)[cb];
    if (d < 0) throw std::invalid_argument("hop2: cells not connected inside domain");
    // Geodesics stay inside the hull of the two extreme two-leg paths; their
    // corners are xa + lambda a_i and xa + mu a_{i+1} for the sector
    // decomposition xb - xa = lambda a_i + mu a_{i+1}. Reject queries whose
    // hull comes within a cell of the patch boundary.
    const Vec2 xa = cell_bary_[ca], xb = cell_bary_[cb];
    const Vec2 v = xb - xa;
    double reach = std::max(xa.norm(), xb.norm());
    for (int i = 1; i <= 6; ++i) {
        const Vec2 ai = direction_vector(i);
        const Vec2 aj = direction_vector(i == 6 ? 1 : i + 1);
        const double det = cross(ai, aj);
        const double lam = cross(v, aj) / det;
        const double mu = cross(ai, v) / det;
        if (lam < -1e-9 || mu < -1e-9) continue;
        reach = std::max({reach, (xa + ai * lam).norm(), (xa + aj * mu).norm()});
        break;
    }
    if (reach + 1.5 > radius_) {
        throw std::invalid_argument(
            "hop2: cells too close to the domain boundary for a reliable geodesic");
    }
    return d;
}

int LatticeDomain::try_hop_op(int c, int dir) const {
    const int p = cell_p_[c], q = cell_q_[c];
    if (cell_orient(c) == CellOrient::Ref) {
        if (dir == 1 || dir == 6) return find_cell(p, q, CellOrient::Anti);
        if (dir == 2 || dir == 3) return find_cell(p - 1, q + 1, CellOrient::Anti);
        return find_cell(p - 1, q, CellOrient::Anti);
    }
    if (dir == 1 || dir == 2) return find_cell(p + 1, q, CellOrient::Ref);
    if (dir == 3 || dir == 4) return find_cell(p, q, CellOrient::Ref);
    return find_cell(p + 1, q - 1, CellOrient::Ref);
}

int LatticeDomain::hop_op(int c, int dir) const {
    const int target = try_hop_op(c, dir);
    if (target < 0) throw std::invalid_argument("hop_op: step leaves the domain");
    return target;
}

int LatticeDomain::neighbor_slot(int c, int target) const {
    for (int k = 0; k < 3; ++k) {
        if (cell_nbrs_[c][k] == target) return k;
    }
    return -1;
}

std::vector<Step> LatticeDomain::gamma_path(int site) const {
    const auto [n0, m0] = site_nm_[ref_site_];
    const auto [n1, m1] = site_nm_[site];
    const int dn = n1 - n0, dm = m1 - m0;
    // Solve dn*a-basis = n*d_i + m*d_{i+1} with n, m >= 0 for the smallest i.
    int leg_i = -1, n = 0, m = 0;
    for (int i = 1; i <= 6 && leg_i < 0; ++i) {
        const int j = i == 6 ? 1 : i + 1;
        const int det = kDirDn[i] * kDirDm[j] - kDirDm[i] * kDirDn[j];
        const int num_n = dn * kDirDm[j] - dm * kDirDn[j];
        const int num_m = kDirDn[i] * dm - kDirDm[i] * dn;
        if (num_n % det != 0 || num_m % det != 0) continue;
        const int cn = num_n / det, cm = num_m / det;
        if (cn >= 0 && cm >= 0) {
            leg_i = i;
            n = cn;
            m = cm;
        }
    }
    if (leg_i < 0) throw std::logic_error("gamma_path: no two-leg decomposition found");
    std::vector<Step> path;
    path.reserve(n + m);
    int cn = n0, cm = m0;
    for (int k = 0; k < n; ++k) {
        path.push_back({find_site(cn, cm), leg_i});
        cn += kDirDn[leg_i];
        cm += kDirDm[leg_i];
    }
    const int leg_j = leg_i == 6 ? 1 : leg_i + 1;
    for (int k = 0; k < m; ++k) {
        path.push_back({find_site(cn, cm), leg_j});
        cn += kDirDn[leg_j];
        cm += kDirDm[leg_j];
    }
    for (const Step& st : path) {
        if (st.site < 0 || neighbor(st.site, st.dir) < 0) {
            throw std::invalid_argument("gamma_path: path leaves the domain");
        }
    }
    return path;
}

CellAffineMap LatticeDomain::cell_shift_map(int c) const {
    CellAffineMap map;
    map.rotate = cell_orient(c) == CellOrient::Anti;
    map.p = cell_p_[c];
    map.q = cell_q_[c];
    return map;
}

int LatticeDomain::apply_map_to_cell(const CellAffineMap& map, int c) const {
    const auto [p, q, o] = map.apply_cell(cell_p_[c], cell_q_[c], cell_orient(c));
    return find_cell(p, q, o);
}

}  // namespace dislo
