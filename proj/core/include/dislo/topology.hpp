#pragma once

#include <optional>
#include <vector>

#include "dislo/energy.hpp"
#include "dislo/forms.hpp"
#include "dislo/lattice.hpp"

namespace dislo {

// Signed dislocation cores: cells with circulation +1 / -1, sorted by cell id.
struct CoreSet {
    std::vector<int> positive;
    std::vector<int> negative;
    int count() const { return static_cast<int>(positive.size() + negative.size()); }
    bool balanced() const { return positive.size() == negative.size(); }
};

// Cells with nonzero circulation of a wrapped (or integer-circulation) bond
// field. Throws when a circulation of modulus >= 2 shows up.
CoreSet detect_cores(const OneForm& w);

// Sum of core signs; cross-checked against the circulation around a large
// loop enclosing every core. Requires the far field of w to vanish (max
// |w| < 0.4 on the outer annulus).
int net_burgers(const OneForm& w);

// One dual-lattice cut: the realized geodesic between a matched core pair,
// stored from the negative core to the positive core, in at most two straight
// legs (direction + length).
struct StraightLeg {
    int dir = 0;  // 1..6
    int length = 0;
};

struct CutPath {
    int core_neg = -1;
    int core_pos = -1;
    std::vector<int> cells;       // dual path, cells.front() == core_neg
    std::array<StraightLeg, 2> legs{};
    int length() const { return legs[0].length + legs[1].length; }
};

// Minimal matching of a balanced core set under the hop metric, with each
// pair realized by a canonical two-leg geodesic.
struct MinimalConnection {
    std::vector<CutPath> paths;
    int total_length = 0;
};

// Min-cost perfect matching (successive shortest augmenting paths) between
// positive and negative cores with hop2 costs; paths realized canonically
// (smallest direction index, then smallest first-leg length).
MinimalConnection minimal_connection(const LatticeDomain& dom, const CoreSet& cores);

// Exhaustive-pairing oracle for small instances (<= 8 pairs).
int matching_cost_exhaustive(const LatticeDomain& dom, const CoreSet& cores);

// Branch-cut decomposition z = sum z^m with Du' = beta + z for u' = u + U.
struct CutDecomposition {
    IntegerForm z;
    std::vector<CutPath> paths;
    Displacement shift;   // integer-valued U
    Displacement u_prime; // u + U
    int total_length = 0;
};

// Minimal-connection normalization of a displacement: rewires the integer
// part of Du - beta into shortest dual connections between the cores of beta.
// The geometrically necessary core (net circulation of beta is zero for
// admissible states) never enters the matching.
CutDecomposition dmcp(const Displacement& u, const OneForm& beta);

// Rewrite a dual geodesic into the canonical two-leg form with identical
// endpoints and length. Rejects non-geodesic input.
CutPath straighten(const LatticeDomain& dom, const std::vector<int>& cells);

// Build the integer 1-form of a dual path (+1 circulation at cells.front(),
// -1 at cells.back()).
void add_path_to_form(const LatticeDomain& dom, const std::vector<int>& cells, IntegerForm& z);

// Cells of the canonical two-leg word starting at `start`.
std::vector<int> walk_legs(const LatticeDomain& dom, int start, const std::array<StraightLeg, 2>& legs);

// Result of the origin-shift optimization.
struct DocpResult {
    Displacement u;            // shifted and re-minimized displacement
    CutDecomposition cuts;     // minimal connection of the shifted state
    int chosen_cell = -1;      // positive core moved onto the origin cell
    bool translation = false;  // the applied map was a pure translation
    int cut_length_before = 0;
    int cut_length_after = 0;
    double energy_before = 0.0;
    double energy_after = 0.0;
};

// Optimal-connection origin shift: among all positive cores of the wrapped
// state, move the one minimizing the total cut length onto the origin cell
// (ties: smaller distance to the origin, then smaller cell id). Energy is
// preserved exactly for pure translations; for rotation composites the
// comparison allows a truncation envelope that shrinks with the domain.
DocpResult docp_shift(const EnergyState& state, const Displacement& u);

// Hexagonal loop of lattice bonds with corner offset k around the reference
// site; encloses every cell within distance ~k of the origin.
std::vector<Step> hexagon_loop(const LatticeDomain& dom, int k);

}  // namespace dislo
