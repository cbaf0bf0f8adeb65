#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "lantern/mesh.hpp"

using namespace lantern;
using mesh::LanternParams;
using mesh::TriangleMesh;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent area oracle: per-triangle cross products accumulated in
// extended precision.
double cross_product_area(const TriangleMesh& m) {
    long double total = 0.0L;
    for (const auto& tri : m.triangles) {
        const auto& a = m.vertices[static_cast<std::size_t>(tri[0])];
        const auto& b = m.vertices[static_cast<std::size_t>(tri[1])];
        const auto& c = m.vertices[static_cast<std::size_t>(tri[2])];
        const long double e1x = b.x - a.x, e1y = b.y - a.y, e1z = b.z - a.z;
        const long double e2x = c.x - a.x, e2y = c.y - a.y, e2z = c.z - a.z;
        const long double cx = e1y * e2z - e1z * e2y;
        const long double cy = e1z * e2x - e1x * e2z;
        const long double cz = e1x * e2y - e1y * e2x;
        total += 0.5L * std::sqrt(cx * cx + cy * cy + cz * cz);
    }
    return static_cast<double>(total);
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(mesh::validate({1.0, 1.0, 2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(mesh::validate({1.0, 1.0, 4, 0}), std::invalid_argument);
    CHECK_THROWS_AS(mesh::validate({0.0, 1.0, 4, 1}), std::invalid_argument);
    CHECK_THROWS_AS(mesh::validate({1.0, -1.0, 4, 1}), std::invalid_argument);
    CHECK_NOTHROW(mesh::validate({1.0, 1.0, 3, 1}));
}

TEST_CASE("triangle cap refuses huge meshes, closed forms accept them") {
    const LanternParams big{1.0, 1.0, 4096, 68719476736};  // m = n^3
    CHECK_THROWS_AS((void)mesh::generate_lantern(big), mesh::MeshCapExceeded);
    CHECK(std::isfinite(mesh::closed_form_area(big)));
    CHECK(mesh::closed_form_area(big) > 0.0);
}

TEST_CASE("vertex and triangle counts") {
    const auto small = mesh::generate_lantern({1.0, 1.0, 3, 1});
    CHECK(small.vertices.size() == 6);
    CHECK(small.triangles.size() == 6);

    const auto m44 = mesh::generate_lantern({1.0, 1.0, 4, 4});
    CHECK(m44.vertices.size() == 20);
    CHECK(m44.triangles.size() == 32);
    for (const auto& v : m44.vertices) {
        CHECK(std::abs(v.x * v.x + v.y * v.y - 1.0) <= 1e-12);
    }
}

TEST_CASE("vertex placement matches the staggered-circle formula") {
    const LanternParams p{1.0, 1.0, 4, 4};
    const auto v00 = mesh::lantern_vertex(p, 0, 0);
    CHECK(v00.x == 1.0);
    CHECK(v00.y == 0.0);
    CHECK(v00.z == 0.0);

    // with n divisible by 4 the bottom circle carries the apex (0, 1, 0)
    const auto apex = mesh::lantern_vertex(p, 1, 0);
    CHECK(std::abs(apex.x) <= 1e-12);
    CHECK(apex.y == doctest::Approx(1.0).epsilon(1e-15));

    // odd circles sit midway between the even ones
    const auto staggered = mesh::lantern_vertex(p, 0, 1);
    CHECK(staggered.x == doctest::Approx(std::cos(kPi / 4)).epsilon(1e-15));
    CHECK(staggered.y == doctest::Approx(std::sin(kPi / 4)).epsilon(1e-15));
    CHECK(staggered.z == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("apex triangle") {
    const auto t = mesh::apex_triangle({1.0, 1.0, 4, 4});
    CHECK(t.v0.x == 0.0);
    CHECK(t.v0.y == 1.0);
    CHECK(t.v0.z == 0.0);
    CHECK(t.v1.x == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(t.v1.y == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(t.v1.z == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(t.v2.x == doctest::Approx(-std::sqrt(2.0) / 2).epsilon(1e-15));

    const auto [r, s] = mesh::apex_edges({1.0, 1.0, 4, 4});
    CHECK(r.x == doctest::Approx(std::sin(kPi / 4)).epsilon(1e-15));
    CHECK(r.y == doctest::Approx(std::cos(kPi / 4) - 1.0).epsilon(1e-14));
    CHECK(r.z == 0.25);
    CHECK(s.x == -r.x);
    CHECK(s.y == r.y);

    SUBCASE("vertices collapse toward the apex as n, m grow") {
        const auto fine = mesh::apex_triangle({1.0, 1.0, 1 << 12, 1 << 12});
        CHECK(ga3::norm(fine.v1 - fine.v0) < 1e-2);
        CHECK(ga3::norm(fine.v2 - fine.v0) < 1e-2);
    }
}

TEST_CASE("triangle bivector") {
    const mesh::Triangle unit{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    const auto b = mesh::triangle_bivector(unit);
    CHECK(b.xy == 0.5);
    CHECK(b.xz == 0.0);
    CHECK(b.yz == 0.0);
    CHECK(ga3::norm(b) == 0.5);

    const auto apex =
        mesh::triangle_bivector(mesh::apex_triangle({1.0, 1.0, 4, 4}));
    CHECK(apex.xy == doctest::Approx(-0.20710678118654752).epsilon(1e-14));
    CHECK(apex.xz == doctest::Approx(0.17677669529663688).epsilon(1e-14));
    CHECK(apex.yz == 0.0);

    const mesh::Triangle degenerate{{1, 2, 3}, {1, 2, 3}, {0, 1, 0}};
    const auto zero = mesh::triangle_bivector(degenerate);
    CHECK(ga3::norm(zero) == 0.0);
}

TEST_CASE("apex bivector matches the analytic half-wedge form") {
    for (const std::int64_t n : {4, 16, 256, 4096}) {
        for (const double a : {0.5, 1.0, 2.0}) {
            const std::int64_t m = n * n;
            const LanternParams p{1.0, a, n, m};
            const auto b = mesh::triangle_bivector(mesh::apex_triangle(p));
            const double sn = std::sin(kPi / static_cast<double>(n));
            const double cn1 = std::cos(kPi / static_cast<double>(n)) - 1.0;
            const double expected_xy = 0.5 * 2.0 * sn * cn1;
            const double expected_xz =
                0.5 * (2.0 * a / static_cast<double>(m)) * sn;
            CHECK(std::abs(b.xy - expected_xy) <= 1e-13);
            CHECK(std::abs(b.xz - expected_xz) <= 1e-13);
            CHECK(std::abs(b.yz) <= 1e-13);
        }
    }
}

TEST_CASE("upright triangles are wound outward, mesh is consistent") {
    const auto m = mesh::generate_lantern({1.0, 1.0, 8, 4});

    for (std::size_t t = 0; t < m.triangles.size(); t += 2) {  // upright
        const auto& tri = m.triangles[t];
        const auto& a = m.vertices[static_cast<std::size_t>(tri[0])];
        const auto& b = m.vertices[static_cast<std::size_t>(tri[1])];
        const auto& c = m.vertices[static_cast<std::size_t>(tri[2])];
        const auto biv = mesh::triangle_bivector({a, b, c});
        // dual vector of (xy, xz, yz) is (yz, -xz, xy)
        const ga3::Vector3 normal{biv.yz, -biv.xz, biv.xy};
        const ga3::Vector3 centroid = (1.0 / 3.0) * (a + b + c);
        CHECK(normal.x * centroid.x + normal.y * centroid.y > 0.0);
    }

    // Every directed edge appears at most once; interior edges appear once
    // in each direction, boundary edges (on the rim circles) once total.
    std::map<std::pair<std::int32_t, std::int32_t>, int> directed;
    for (const auto& tri : m.triangles) {
        for (int e = 0; e < 3; ++e) {
            const auto key =
                std::make_pair(tri[static_cast<std::size_t>(e)],
                               tri[static_cast<std::size_t>((e + 1) % 3)]);
            directed[key] += 1;
            CHECK(directed[key] == 1);
        }
    }
    for (const auto& [edge, count] : directed) {
        const auto& va = m.vertices[static_cast<std::size_t>(edge.first)];
        const auto& vb = m.vertices[static_cast<std::size_t>(edge.second)];
        const bool boundary = (va.z == 0.0 && vb.z == 0.0) ||
                              (va.z == 1.0 && vb.z == 1.0);
        const bool has_reverse =
            directed.count({edge.second, edge.first}) > 0;
        CHECK(has_reverse == !boundary);
    }
}

TEST_CASE("mesh area against the cross-product oracle") {
    const auto m = mesh::generate_lantern({1.0, 1.0, 4, 4});
    const double oracle = cross_product_area(m);
    CHECK(oracle == doctest::Approx(8.713360778997696).epsilon(1e-12));
    CHECK(mesh::mesh_area(m) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(mesh::mesh_area_serial(m) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("all lantern triangles are congruent") {
    for (const auto& p : {LanternParams{1.0, 1.0, 5, 3},
                          LanternParams{2.5, 0.7, 12, 9}}) {
        const auto m = mesh::generate_lantern(p);
        double first = -1.0;
        for (const auto& tri : m.triangles) {
            const auto area = ga3::norm(mesh::triangle_bivector(
                {m.vertices[static_cast<std::size_t>(tri[0])],
                 m.vertices[static_cast<std::size_t>(tri[1])],
                 m.vertices[static_cast<std::size_t>(tri[2])]}));
            if (first < 0.0) {
                first = area;
            } else {
                CHECK(std::abs(area - first) / first <= 1e-12);
            }
        }
    }
}

TEST_CASE("structural grid: counts, cylinder residual, closed form") {
    for (std::int64_t n : {3, 4, 5, 8, 16, 33, 64}) {
        for (std::int64_t m : {1, 2, 3, 7, 16}) {
            for (double radius : {1.0, 2.5}) {
                const LanternParams p{radius, 1.3, n, m};
                const auto mesh_out = mesh::generate_lantern(p);
                CHECK(std::ssize(mesh_out.vertices) == mesh::vertex_count(p));
                CHECK(std::ssize(mesh_out.triangles) ==
                      mesh::triangle_count(p));
                for (const auto& v : mesh_out.vertices) {
                    CHECK(std::abs(v.x * v.x + v.y * v.y - radius * radius) <=
                          1e-12 * radius * radius);
                }
                const double summed = mesh::mesh_area(mesh_out);
                const double closed = mesh::closed_form_area(p);
                CHECK(std::abs(summed - closed) / closed <= 1e-9);
            }
        }
    }
}

TEST_CASE("mesh area matches the closed form at n = 2^10") {
    const LanternParams p{1.0, 1.0, 1024, 4};
    const auto m = mesh::generate_lantern(p);
    const double closed = mesh::closed_form_area(p);
    CHECK(std::abs(mesh::mesh_area(m) - closed) / closed <= 1e-9);
}

TEST_CASE("closed-form area at vanishing height") {
    // m = 1 with a -> 0 degenerates to a flat band
    const std::int64_t n = 64;
    const double flat = 2.0 * static_cast<double>(n) * std::sin(kPi / 64) *
                        (1.0 - std::cos(kPi / 64));
    const double computed = mesh::closed_form_area({1.0, 1e-12, n, 1});
    CHECK(computed == doctest::Approx(flat).epsilon(1e-9));
}

TEST_CASE("classical convergent schedule approaches the cylinder area") {
    const std::int64_t n = 1 << 12;
    const double area = mesh::closed_form_area({1.0, 1.0, n, n});
    CHECK(std::abs(area - 2.0 * kPi) / (2.0 * kPi) <= 1e-5);
}

TEST_CASE("nesting: doubling schedules nest, mismatched grids do not") {
    const double tol = 1e-9;
    const auto yes = [&](std::int64_t nc, std::int64_t mc, std::int64_t nf,
                         std::int64_t mf) {
        return mesh::check_nesting({1.0, 1.0, nc, mc}, {1.0, 1.0, nf, mf},
                                   tol);
    };
    CHECK(yes(4, 4, 8, 8));
    CHECK(yes(4, 4, 8, 64));
    CHECK_FALSE(yes(4, 4, 5, 5));
    CHECK_FALSE(yes(4, 4, 8, 12));  // tripled bands break the stagger
    CHECK(yes(4, 4, 4, 4));
    CHECK(yes(6, 2, 12, 4));
}

TEST_CASE("nesting implementations agree") {
    const double tol = 1e-9;
    const std::vector<std::array<std::int64_t, 4>> cases = {
        {4, 4, 8, 8},   {4, 4, 8, 64}, {4, 4, 5, 5},  {4, 4, 8, 12},
        {3, 1, 6, 2},   {6, 2, 12, 4}, {8, 8, 16, 64}, {4, 2, 8, 6},
        {5, 3, 10, 6},  {4, 4, 12, 8}, {16, 16, 32, 32},
    };
    for (const auto& c : cases) {
        const LanternParams coarse{1.0, 1.0, c[0], c[1]};
        const LanternParams fine{1.0, 1.0, c[2], c[3]};
        const bool brute = mesh::check_nesting_serial(coarse, fine, tol);
        const bool sorted = mesh::check_nesting_sorted(coarse, fine, tol);
        const bool structured =
            mesh::check_nesting_structured(coarse, fine, tol);
        CAPTURE(c[0]);
        CAPTURE(c[2]);
        CHECK(sorted == brute);
        CHECK(structured == brute);
    }
}

TEST_CASE("property: nesting implementations agree on random pairs") {
    std::mt19937_64 rng(0x4a11);
    std::uniform_int_distribution<std::int64_t> nc_dist(3, 12);
    std::uniform_int_distribution<std::int64_t> mc_dist(1, 8);
    std::uniform_int_distribution<std::int64_t> scale(1, 3);
    const double tol = 1e-9;
    for (int k = 0; k < 60; ++k) {
        const std::int64_t nc = nc_dist(rng);
        const std::int64_t mc = mc_dist(rng);
        const std::int64_t nf = nc * scale(rng);
        const std::int64_t mf = mc * scale(rng);
        const LanternParams coarse{1.0, 1.0, nc, mc};
        const LanternParams fine{1.0, 1.0, nf, mf};
        const bool brute = mesh::check_nesting_serial(coarse, fine, tol);
        CAPTURE(nc);
        CAPTURE(mc);
        CAPTURE(nf);
        CAPTURE(mf);
        CHECK(mesh::check_nesting_sorted(coarse, fine, tol) == brute);
        CHECK(mesh::check_nesting_structured(coarse, fine, tol) == brute);
    }
}

TEST_CASE("nesting holds for the built-in schedules over i = 2..8") {
    const auto bands = [](int which, std::int64_t n) {
        switch (which) {
            case 0:
                return n;
            case 1:
                return n * n * n;
            default:
                return n * n;
        }
    };
    for (int which = 0; which < 3; ++which) {
        for (int i = 2; i < 8; ++i) {
            const std::int64_t nc = std::int64_t{1} << i;
            const std::int64_t nf = nc * 2;
            const LanternParams coarse{1.0, 1.0, nc, bands(which, nc)};
            const LanternParams fine{1.0, 1.0, nf, bands(which, nf)};
            CAPTURE(which);
            CAPTURE(i);
            CHECK(mesh::check_nesting(coarse, fine,
                                      mesh::default_nesting_tol(fine)));
        }
    }
}

TEST_CASE("nesting rejects mismatched cylinders") {
    CHECK_THROWS_AS((void)mesh::check_nesting({1.0, 1.0, 4, 4},
                                              {2.0, 1.0, 8, 8}, 1e-9),
                    std::invalid_argument);
}
