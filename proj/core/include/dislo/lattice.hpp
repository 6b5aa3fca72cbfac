#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "dislo/vec2.hpp"

namespace dislo {

// Sites of the triangular lattice are indexed by integer pairs (n, m) with
//   position(n, m) = (1/2 + n + m/2,  sqrt(3)/6 + m * sqrt(3)/2).
// Nearest-neighbour directions are a_i = R6^{i-1} a_1, i = 1..6, with a_1 = (1, 0).
// Directions 1..3 are canonical bond orientations; reversing maps i -> i + 3 (mod 6).

// Index-space displacement of direction i (1-based).
inline constexpr int kDirDn[7] = {0, 1, 0, -1, -1, 0, 1};
inline constexpr int kDirDm[7] = {0, 0, 1, 1, 0, -1, -1};

inline int reverse_dir(int dir) { return dir <= 3 ? dir + 3 : dir - 3; }

Vec2 direction_vector(int dir);          // a_i
Vec2 site_position(int n, int m);

// Oriented bond expressed as (tail site, direction 1..6).
struct Step {
    int site = -1;
    int dir = 0;
};

// Canonical bond with orientation sign (+1: as stored, -1: reversed).
struct BondRef {
    int bond = -1;
    int sign = 0;
};

enum class CellOrient : std::uint8_t { Ref = 0, Anti = 1 };

// Affine lattice map F^C: a translation when C has the reference orientation,
// otherwise a pi/3 rotation followed by a translation. Maps sites onto sites
// and the origin cell onto C.
struct CellAffineMap {
    bool rotate = false;
    int p = 0;  // anchor cell indices
    int q = 0;

    Vec2 apply(Vec2 x) const;
    std::pair<int, int> apply_site(int n, int m) const;
    // (p', q', orient') image of a cell under the map.
    std::tuple<int, int, CellOrient> apply_cell(int p, int q, CellOrient o) const;
};

// A finite patch of the lattice complex: sites, canonical bonds, triangular
// cells, and the dual-graph adjacency between cells. Immutable after
// construction; all queries are const and safe for concurrent readers.
class LatticeDomain {
public:
    // Disk patch: all sites with |position| <= radius, plus every bond/cell
    // whose convex hull stays inside the disk. Requires radius >= 3.
    static LatticeDomain disk(double radius);

    // Half-space patch: the disk intersected with { y <= 0 }. The origin cell
    // is absent; surface sites have coordination below 6.
    static LatticeDomain half_space(double radius);

    double radius() const { return radius_; }
    bool is_half_space() const { return half_space_; }

    // --- sites ---
    int site_count() const { return static_cast<int>(site_nm_.size()); }
    std::pair<int, int> site_nm(int s) const { return site_nm_[s]; }
    Vec2 site_pos(int s) const { return site_pos_[s]; }
    int find_site(int n, int m) const;
    int reference_site() const { return ref_site_; }  // site (0, -1)
    int neighbor(int s, int dir) const;               // -1 when absent
    bool full_star(int s) const { return full_star_[s] != 0; }

    // --- bonds (canonical: directions 1..3) ---
    int bond_count() const { return static_cast<int>(bond_tail_.size()); }
    int bond_tail(int b) const { return bond_tail_[b]; }
    int bond_head(int b) const { return bond_head_[b]; }
    int bond_dir(int b) const { return bond_dir_[b]; }
    BondRef bond(int site, int dir) const;             // oriented lookup
    BondRef bond(Step st) const { return bond(st.site, st.dir); }
    double bond_distance_to(int b, Vec2 p) const;
    bool bond_interior(int b) const { return full_star_[bond_tail_[b]] && full_star_[bond_head_[b]]; }

    // --- cells ---
    int cell_count() const { return static_cast<int>(cell_p_.size()); }
    std::tuple<int, int, CellOrient> cell_pqo(int c) const {
        return {cell_p_[c], cell_q_[c], static_cast<CellOrient>(cell_orient_[c])};
    }
    CellOrient cell_orient(int c) const { return static_cast<CellOrient>(cell_orient_[c]); }
    Vec2 cell_barycentre(int c) const { return cell_bary_[c]; }
    const std::array<int, 3>& cell_vertices(int c) const { return cell_verts_[c]; }
    // Positively oriented (counterclockwise) boundary, three oriented bonds.
    const std::array<BondRef, 3>& cell_boundary(int c) const { return cell_bnd_[c]; }
    // Dual-graph neighbours, slot k across cell_boundary(c)[k]; -1 when absent.
    const std::array<int, 3>& cell_neighbors(int c) const { return cell_nbrs_[c]; }
    int find_cell(int p, int q, CellOrient o) const;
    int origin_cell() const { return origin_cell_; }   // C0 (disk domains)
    int nearest_cell(Vec2 x, CellOrient o) const;
    double cell_distance_to(int c, Vec2 p) const;
    bool cell_interior(int c) const;                   // all three stars complete

    // --- metrics and paths ---
    // Graph distance in the dual lattice (BFS, memoized per source). Throws
    // when either cell sits too close to the patch boundary for the geodesic
    // to be trusted.
    int hop2(int ca, int cb) const;
    // Full BFS distance field from a source cell (memoized).
    const std::vector<int>& hop_distances(int source) const;

    // 2-cell hop operator H_i: the first cell crossed when moving from the
    // barycentre of c in direction a_i. Throws when the step leaves the patch.
    int hop_op(int c, int dir) const;
    // Same step, returning -1 instead of throwing.
    int try_hop_op(int c, int dir) const;
    // Slot index (0..2) of neighbor `target` of `c`; -1 when not adjacent.
    int neighbor_slot(int c, int target) const;

    // Two-leg path from the reference site to `site`: n bonds along a_i, then
    // m bonds along a_{i+1}, with n, m >= 0.
    std::vector<Step> gamma_path(int site) const;

    CellAffineMap cell_shift_map(int c) const;
    int apply_map_to_cell(const CellAffineMap& map, int c) const;

    // Distance-to-origin trio (point, segment, triangle hulls).
    double dist_origin(int site) const { return site_pos_[site].norm(); }
    double dist_origin_bond(int b) const { return bond_distance_to(b, Vec2{0, 0}); }
    double dist_origin_cell(int c) const { return cell_distance_to(c, Vec2{0, 0}); }

private:
    LatticeDomain() = default;
    void build(double radius, bool half_space);
    void check_invariants() const;

    double radius_ = 0.0;
    bool half_space_ = false;
    int ref_site_ = -1;
    int origin_cell_ = -1;

    std::vector<std::pair<int, int>> site_nm_;
    std::vector<Vec2> site_pos_;
    std::vector<std::array<int, 6>> site_nbrs_;
    std::vector<std::array<int, 3>> site_bonds_;  // canonical bonds by dir 1..3
    std::vector<std::uint8_t> full_star_;
    std::unordered_map<std::uint64_t, int> site_index_;

    std::vector<int> bond_tail_, bond_head_;
    std::vector<std::uint8_t> bond_dir_;

    std::vector<int> cell_p_, cell_q_;
    std::vector<std::uint8_t> cell_orient_;
    std::vector<Vec2> cell_bary_;
    std::vector<std::array<int, 3>> cell_verts_;
    std::vector<std::array<BondRef, 3>> cell_bnd_;
    std::vector<std::array<int, 3>> cell_nbrs_;
    std::unordered_map<std::uint64_t, int> cell_index_;

    struct HopCache {
        std::mutex mutex;
        std::unordered_map<int, std::unique_ptr<std::vector<int>>> fields;
    };
    std::unique_ptr<HopCache> hop_cache_ = std::make_unique<HopCache>();
};

}  // namespace dislo
