#include <doctest.h>

#include <cmath>
#include <deque>
#include <set>

#include "dislo/lattice.hpp"

using namespace dislo;

namespace {

// Independent BFS over the dual graph, no memoization.
int bfs_oracle(const LatticeDomain& dom, int from, int to) {
    std::vector<int> dist(dom.cell_count(), -1);
    std::deque<int> q{from};
    dist[from] = 0;
    while (!q.empty()) {
        const int c = q.front();
        q.pop_front();
        if (c == to) return dist[c];
        for (int nb : dom.cell_neighbors(c)) {
            if (nb >= 0 && dist[nb] < 0) {
                dist[nb] = dist[c] + 1;
                q.push_back(nb);
            }
        }
    }
    return -1;
}

std::uint64_t rng_state = 12345;
double u01() {
    rng_state ^= rng_state >> 12;
    rng_state ^= rng_state << 25;
    rng_state ^= rng_state >> 27;
    return static_cast<double>((rng_state * 0x2545F4914F6CDD1Dull) >> 11) * 0x1.0p-53;
}

}  // namespace

TEST_CASE("site positions match the affine formula") {
    CHECK(site_position(0, 0).x == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(site_position(0, 0).y == doctest::Approx(kSqrt3 / 6.0).epsilon(1e-15));
    CHECK(site_position(0, -1).x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(site_position(0, -1).y == doctest::Approx(-kSqrt3 / 3.0).epsilon(1e-15));
    // (0,0) numeric anchor
    CHECK(site_position(0, 0).y == doctest::Approx(0.28867513459481287).epsilon(1e-15));
}

TEST_CASE("disk site count equals brute-force enumeration") {
    const double R = 10.0;
    const LatticeDomain dom = LatticeDomain::disk(R);
    int count = 0;
    for (int n = -30; n <= 30; ++n) {
        for (int m = -30; m <= 30; ++m) {
            if (site_position(n, m).norm2() <= R * R + 1e-9) ++count;
        }
    }
    CHECK(dom.site_count() == count);
    CHECK(dom.find_site(0, -1) == dom.reference_site());
    CHECK(dom.origin_cell() >= 0);
}

TEST_CASE("radius below minimum is rejected") {
    CHECK_THROWS_AS(LatticeDomain::disk(2.5), std::invalid_argument);
    CHECK_THROWS_AS(LatticeDomain::half_space(1.0), std::invalid_argument);
}

TEST_CASE("interior sites have six neighbours at distance one") {
    const LatticeDomain dom = LatticeDomain::disk(12.0);
    int checked = 0;
    for (int s = 0; s < dom.site_count(); ++s) {
        if (!dom.full_star(s)) continue;
        ++checked;
        for (int dir = 1; dir <= 6; ++dir) {
            const int nb = dom.neighbor(s, dir);
            REQUIRE(nb >= 0);
            CHECK((dom.site_pos(nb) - dom.site_pos(s)).norm() == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("direction vectors satisfy a_{i+3} = -a_i") {
    for (int i = 1; i <= 3; ++i) {
        const Vec2 a = direction_vector(i);
        const Vec2 b = direction_vector(i + 3);
        CHECK(a.x == doctest::Approx(-b.x).epsilon(1e-15));
        CHECK(a.y == doctest::Approx(-b.y).epsilon(1e-15));
    }
}

TEST_CASE("distance to origin for sites, bonds and cells") {
    const LatticeDomain dom = LatticeDomain::disk(8.0);
    const int s00 = dom.find_site(0, 0);
    CHECK(dom.dist_origin(s00) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));
    CHECK(dom.dist_origin_cell(dom.origin_cell()) == 0.0);

    // boundary bonds of the origin cell against a point-segment oracle
    for (const BondRef& br : dom.cell_boundary(dom.origin_cell())) {
        const Vec2 a = dom.site_pos(dom.bond_tail(br.bond));
        const Vec2 b = dom.site_pos(dom.bond_head(br.bond));
        double best = 1e300;
        for (int k = 0; k <= 4096; ++k) {
            const double t = k / 4096.0;
            best = std::min(best, (a + (b - a) * t).norm());
        }
        CHECK(dom.dist_origin_bond(br.bond) == doctest::Approx(best).epsilon(1e-6));
    }
}

TEST_CASE("hop metric: identity, adjacency, BFS oracle, metric axioms") {
    const LatticeDomain dom = LatticeDomain::disk(16.0);
    const int c0 = dom.origin_cell();
    CHECK(dom.hop2(c0, c0) == 0);
    for (int nb : dom.cell_neighbors(c0)) {
        REQUIRE(nb >= 0);
        CHECK(dom.hop2(c0, nb) == 1);
    }

    std::vector<int> ball;
    const auto& dist = dom.hop_distances(c0);
    for (int c = 0; c < dom.cell_count(); ++c) {
        if (dist[c] >= 0 && dist[c] <= 10) ball.push_back(c);
    }
    CHECK(ball.size() > 100);
    // symmetry + oracle agreement on sampled pairs
    for (int k = 0; k < 300; ++k) {
        const int a = ball[static_cast<int>(u01() * ball.size())];
        const int b = ball[static_cast<int>(u01() * ball.size())];
        const int d = dom.hop2(a, b);
        CHECK(d == bfs_oracle(dom, a, b));
        CHECK(d == dom.hop2(b, a));
        CHECK((d == 0) == (a == b));
    }
    // triangle inequality on sampled triples
    for (int k = 0; k < 2000; ++k) {
        const int a = ball[static_cast<int>(u01() * ball.size())];
        const int b = ball[static_cast<int>(u01() * ball.size())];
        const int c = ball[static_cast<int>(u01() * ball.size())];
        CHECK(dom.hop2(a, c) <= dom.hop2(a, b) + dom.hop2(b, c));
    }
}

TEST_CASE("hop2 rejects cells whose geodesics may leave the patch") {
    const LatticeDomain dom = LatticeDomain::disk(10.0);
    int far_a = -1, far_b = -1;
    for (int c = 0; c < dom.cell_count(); ++c) {
        const Vec2 x = dom.cell_barycentre(c);
        if (x.norm() > 8.5 && x.x > 0 && far_a < 0) far_a = c;
        if (x.norm() > 8.5 && x.x < 0 && std::abs(x.y) > 4 && far_b < 0) far_b = c;
    }
    REQUIRE(far_a >= 0);
    REQUIRE(far_b >= 0);
    CHECK_THROWS_AS(dom.hop2(far_a, far_b), std::invalid_argument);
}

TEST_CASE("gamma path: trivial, straight, and random endpoints") {
    const LatticeDomain dom = LatticeDomain::disk(18.0);
    CHECK(dom.gamma_path(dom.reference_site()).empty());

    // three steps along a_1
    const auto [n0, m0] = dom.site_nm(dom.reference_site());
    const int target = dom.find_site(n0 + 3, m0);
    const auto path3 = dom.gamma_path(target);
    REQUIRE(path3.size() == 3);
    for (const Step& st : path3) CHECK(st.dir == 1);

    // vector-sum oracle over every site of a radius-15 patch (exhaustive
    // two-leg decomposability)
    for (int s = 0; s < dom.site_count(); ++s) {
        if (dom.dist_origin(s) > 15.0) continue;
        const auto path = dom.gamma_path(s);
        Vec2 sum{0, 0};
        for (const Step& st : path) sum += direction_vector(st.dir);
        const Vec2 expect = dom.site_pos(s) - dom.site_pos(dom.reference_site());
        CHECK((sum - expect).norm() < 1e-12);
        CHECK(static_cast<double>(path.size()) <= 2.0 * expect.norm() + 1e-9);
    }
}

TEST_CASE("cell shift maps act on the lattice and send the origin cell to their anchor") {
    const LatticeDomain dom = LatticeDomain::disk(14.0);
    const int c0 = dom.origin_cell();

    // identity at the origin cell
    const CellAffineMap id = dom.cell_shift_map(c0);
    CHECK(!id.rotate);
    CHECK(dom.apply_map_to_cell(id, c0) == c0);

    int tested = 0;
    for (int c = 0; c < dom.cell_count(); ++c) {
        if (dom.dist_origin_cell(c) > 5.0) continue;
        ++tested;
        const CellAffineMap map = dom.cell_shift_map(c);
        CHECK(map.rotate == (dom.cell_orient(c) == CellOrient::Anti));
        // F^C(C0) = C via the vertex sets
        std::set<int> image;
        for (int v : dom.cell_vertices(c0)) {
            const auto [n, m] = dom.site_nm(v);
            const auto [nn, mm] = map.apply_site(n, m);
            const int target = dom.find_site(nn, mm);
            REQUIRE(target >= 0);
            image.insert(target);
        }
        const auto& verts = dom.cell_vertices(c);
        CHECK(image == std::set<int>(verts.begin(), verts.end()));
        CHECK(dom.apply_map_to_cell(map, c0) == c);
        // barycentre agreement between the analytic map and the cell
        const Vec2 xb = map.apply(Vec2{0, 0});
        CHECK((xb - dom.cell_barycentre(c)).norm() < 1e-12);
    }
    CHECK(tested > 50);
}

TEST_CASE("cell shift maps are isometries mapping sites onto sites") {
    const LatticeDomain dom = LatticeDomain::disk(16.0);
    for (int c = 0; c < dom.cell_count(); ++c) {
        if (dom.dist_origin_cell(c) > 4.0) continue;
        const CellAffineMap map = dom.cell_shift_map(c);
        Vec2 prev_img{0, 0}, prev_src{0, 0};
        bool have_prev = false;
        for (int s = 0; s < dom.site_count(); ++s) {
            if (dom.dist_origin(s) > 8.0) continue;
            const auto [n, m] = dom.site_nm(s);
            const auto [nn, mm] = map.apply_site(n, m);
            const int img = dom.find_site(nn, mm);
            REQUIRE(img >= 0);
            CHECK((map.apply(dom.site_pos(s)) - dom.site_pos(img)).norm() < 1e-12);
            if (have_prev) {
                const double d_src = (dom.site_pos(s) - prev_src).norm();
                const double d_img = (dom.site_pos(img) - prev_img).norm();
                CHECK(d_img == doctest::Approx(d_src).epsilon(1e-12));
            }
            prev_src = dom.site_pos(s);
            prev_img = dom.site_pos(img);
            have_prev = true;
        }
    }
}

TEST_CASE("hop operators: adjacency, inverses, translation squares") {
    const LatticeDomain dom = LatticeDomain::disk(16.0);
    const auto& dist = dom.hop_distances(dom.origin_cell());
    for (int c = 0; c < dom.cell_count(); ++c) {
        if (dist[c] < 0 || dist[c] > 6) continue;
        for (int i = 1; i <= 6; ++i) {
            const int hi = dom.hop_op(c, i);
            CHECK(dom.neighbor_slot(c, hi) >= 0);             // one dual hop
            CHECK(dom.hop_op(hi, reverse_dir(i)) == c);       // H_{i+3} H_i = id
            // H_i^2 translates by a_i
            const int hii = dom.hop_op(hi, i);
            const Vec2 shift = dom.cell_barycentre(hii) - dom.cell_barycentre(c);
            CHECK((shift - direction_vector(i)).norm() < 1e-12);
        }
    }
    CHECK_THROWS_AS(
        [&] {
            int c = dom.origin_cell();
            for (int k = 0; k < 100; ++k) c = dom.hop_op(c, 1);
            return c;
        }(),
        std::invalid_argument);
}

TEST_CASE("orbit of the squared hop operators is the translation lattice") {
    const LatticeDomain dom = LatticeDomain::disk(12.0);
    const int c0 = dom.origin_cell();
    std::set<int> orbit{c0};
    std::deque<int> frontier{c0};
    for (int depth = 0; depth < 3; ++depth) {
        std::deque<int> next;
        for (int c : frontier) {
            for (int i = 1; i <= 6; ++i) {
                const int t = dom.try_hop_op(c, i);
                if (t < 0) continue;
                const int tt = dom.try_hop_op(t, i);
                if (tt >= 0 && orbit.insert(tt).second) next.push_back(tt);
            }
        }
        frontier = std::move(next);
    }
    for (int c : orbit) {
        // integer combination fit: barycentre = p a1 + q a2
        const Vec2 x = dom.cell_barycentre(c);
        const double q = x.y / (0.5 * kSqrt3);
        const double p = x.x - 0.5 * q;
        CHECK(std::abs(p - std::lround(p)) < 1e-12);
        CHECK(std::abs(q - std::lround(q)) < 1e-12);
        CHECK(dom.cell_orient(c) == CellOrient::Ref);
    }
    CHECK(orbit.size() > 30);
}

TEST_CASE("half-space domains expose a free surface") {
    const LatticeDomain dom = LatticeDomain::half_space(12.0);
    CHECK(dom.is_half_space());
    int reduced = 0;
    for (int s = 0; s < dom.site_count(); ++s) {
        CHECK(dom.site_pos(s).y <= 1e-9);
        int coord = 0;
        for (int dir = 1; dir <= 6; ++dir) coord += dom.neighbor(s, dir) >= 0 ? 1 : 0;
        const auto [n, m] = dom.site_nm(s);
        if (m == -1 && dom.dist_origin(s) < 8.0) {
            CHECK(coord < 6);
            ++reduced;
        }
    }
    CHECK(reduced > 5);
}
