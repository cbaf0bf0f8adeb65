#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lantern/ga3.hpp"

// Schwarz lantern construction: triangle meshes inscribed in a right
// circular cylinder of radius R and height a, built from n angular
// subdivisions per circle and m stacked bands. Consecutive circles are
// staggered by half an arc, so each band consists of 2n congruent
// isosceles triangles.

namespace lantern::mesh {

using ga3::Bivector3;
using ga3::Vector3;

struct LanternParams {
    double radius = 1.0;
    double height = 1.0;
    std::int64_t n = 4;  // angular subdivisions per circle, >= 3
    std::int64_t m = 1;  // bands, >= 1
};

/// Generation refuses meshes beyond this many triangles; the closed-form
/// operations accept the full parameter range instead.
inline constexpr std::int64_t kTriangleCap = 100'000'000;

struct MeshCapExceeded : std::length_error {
    using std::length_error::length_error;
};

/// Throws std::invalid_argument unless R > 0, a > 0, n >= 3, m >= 1.
void validate(const LanternParams& p);

[[nodiscard]] constexpr std::int64_t triangle_count(const LanternParams& p) {
    return 2 * p.n * p.m;
}

[[nodiscard]] constexpr std::int64_t vertex_count(const LanternParams& p) {
    return p.n * (p.m + 1);
}

struct Triangle {
    Vector3 v0, v1, v2;
};

struct TriangleMesh {
    std::vector<Vector3> vertices;
    std::vector<std::array<std::int32_t, 3>> triangles;
};

/// Vertex (i, j) of the lantern, i = 0..n-1 on circle j = 0..m:
/// (R cos t, R sin t, j a / m) with t = 2 pi i / n + (j mod 2) pi / n.
[[nodiscard]] Vector3 lantern_vertex(const LanternParams& p, std::int64_t i,
                                     std::int64_t j);

/// Builds the full lantern mesh. Triangles are wound counterclockwise as
/// seen from outside the cylinder. Band j contributes triangles
/// [2nj, 2n(j+1)), upright and inverted interleaved.
/// Throws MeshCapExceeded above kTriangleCap.
[[nodiscard]] TriangleMesh generate_lantern(const LanternParams& p);

/// Single-threaded reference for generate_lantern; identical output.
[[nodiscard]] TriangleMesh generate_lantern_serial(const LanternParams& p);

/// The analysis triangle: apex on the bottom circle at (0, R, 0), base on
/// the first circle above it, vertices (+-R sin pi/n, R cos pi/n, a/m).
[[nodiscard]] Triangle apex_triangle(const LanternParams& p);

/// Edge vectors r = v1 - v0 and s = v2 - v0 of the apex triangle with the
/// y components evaluated as -2 R sin^2(pi/(2n)) instead of by
/// subtraction, which keeps them accurate for large n.
[[nodiscard]] std::pair<Vector3, Vector3> apex_edges(const LanternParams& p);

/// (1/2) (v1 - v0) ^ (v2 - v0); the norm is the triangle's area. A
/// degenerate triangle yields the zero bivector.
[[nodiscard]] Bivector3 triangle_bivector(const Triangle& t);

/// Sum of triangle areas. Parallel with a fixed-block reduction, so the
/// result does not depend on the thread count.
[[nodiscard]] double mesh_area(const TriangleMesh& mesh);

/// Single-threaded reference for mesh_area.
[[nodiscard]] double mesh_area_serial(const TriangleMesh& mesh);

/// 2 n m R sin(pi/n) sqrt(R^2 (1 - cos pi/n)^2 + (a/m)^2), with
/// 1 - cos(pi/n) evaluated as 2 sin^2(pi/(2n)). Accepts any m >= 1; no
/// mesh is materialized.
[[nodiscard]] double closed_form_area(const LanternParams& p);

[[nodiscard]] double default_nesting_tol(const LanternParams& p);

/// True iff every vertex of the coarse lantern lies within tol of some
/// vertex of the fine lantern. Both params must share radius and height.
/// Dispatches to the sorted search below or, when the fine vertex set is
/// too large to materialize, to the structured search.
[[nodiscard]] bool check_nesting(const LanternParams& coarse,
                                 const LanternParams& fine, double tol);

/// Set containment via a (z, theta) table of fine vertices sorted per
/// circle; each coarse vertex is located by binary search. O((N+M) log M).
[[nodiscard]] bool check_nesting_sorted(const LanternParams& coarse,
                                        const LanternParams& fine,
                                        double tol);

/// Set containment using the grid structure: for each coarse vertex the
/// nearest fine vertex is found by exact integer arithmetic on circle
/// indices, so nothing is materialized. Handles m up to 2^62.
[[nodiscard]] bool check_nesting_structured(const LanternParams& coarse,
                                            const LanternParams& fine,
                                            double tol);

/// Brute-force O(N*M) pairwise reference; small inputs only.
[[nodiscard]] bool check_nesting_serial(const LanternParams& coarse,
                                        const LanternParams& fine,
                                        double tol);

}  // namespace lantern::mesh
