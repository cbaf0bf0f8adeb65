#include "lantern/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace lantern::mesh {

namespace {

constexpr double kPi = std::numbers::pi;

// Partial sums are accumulated per fixed-size block and combined in block
// order, so parallel reductions do not depend on the thread count.
constexpr std::int64_t kReductionBlock = 16384;

double band_height(const LanternParams& p, std::int64_t j) {
    return static_cast<double>(j) * p.height / static_cast<double>(p.m);
}

double circle_offset(const LanternParams& p, std::int64_t j) {
    return (j % 2 == 0) ? 0.0 : kPi / static_cast<double>(p.n);
}

void check_cap(const LanternParams& p) {
    if (p.n > kTriangleCap || p.m > kTriangleCap / (2 * p.n)) {
        throw MeshCapExceeded("lantern exceeds the triangle cap of " +
                              std::to_string(kTriangleCap));
    }
}

void fill_vertices(const LanternParams& p, TriangleMesh& out, bool parallel) {
    const std::int64_t n = p.n;
    const std::int64_t m = p.m;
    out.vertices.resize(static_cast<std::size_t>(vertex_count(p)));
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t j = 0; j <= m; ++j) {
        const double z = band_height(p, j);
        const double off = circle_offset(p, j);
        for (std::int64_t i = 0; i < n; ++i) {
            const double t = 2.0 * kPi * static_cast<double>(i) /
                                 static_cast<double>(n) +
                             off;
            out.vertices[static_cast<std::size_t>(j * n + i)] = {
                p.radius * std::cos(t), p.radius * std::sin(t), z};
        }
    }
}

void fill_triangles(const LanternParams& p, TriangleMesh& out, bool parallel) {
    const std::int64_t n = p.n;
    const std::int64_t m = p.m;
    out.triangles.resize(static_cast<std::size_t>(triangle_count(p)));
    const auto vid = [n](std::int64_t i, std::int64_t j) {
        return static_cast<std::int32_t>(j * n + (i % n));
    };
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t j = 0; j < m; ++j) {
        const std::int64_t off = j % 2;
        const std::size_t base = static_cast<std::size_t>(2 * n * j);
        for (std::int64_t i = 0; i < n; ++i) {
            // Upright: base edge on circle j, apex midway above on j+1.
            out.triangles[base + 2 * static_cast<std::size_t>(i)] = {
                vid(i, j), vid(i + 1, j), vid(i + off, j + 1)};
            // Inverted: apex on circle j between two vertices of j+1.
            out.triangles[base + 2 * static_cast<std::size_t>(i) + 1] = {
                vid(i + 1 - off, j), vid(i + 1, j + 1), vid(i, j + 1)};
        }
    }
}

double triangle_area(const TriangleMesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const Vector3& a = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Vector3& b = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Vector3& c = mesh.vertices[static_cast<std::size_t>(tri[2])];
    return 0.5 * ga3::norm(ga3::wedge(b - a, c - a));
}

}  // namespace

void validate(const LanternParams& p) {
    if (!(p.radius > 0.0) || !std::isfinite(p.radius)) {
        throw std::invalid_argument("radius must be positive and finite");
    }
    if (!(p.height > 0.0) || !std::isfinite(p.height)) {
        throw std::invalid_argument("height must be positive and finite");
    }
    if (p.n < 3) {
        throw std::invalid_argument("n must be at least 3");
    }
    if (p.m < 1) {
        throw std::invalid_argument("m must be at least 1");
    }
}

Vector3 lantern_vertex(const LanternParams& p, std::int64_t i, std::int64_t j) {
    const double t =
        2.0 * kPi * static_cast<double>(i) / static_cast<double>(p.n) +
        circle_offset(p, j);
    return {p.radius * std::cos(t), p.radius * std::sin(t), band_height(p, j)};
}

TriangleMesh generate_lantern(const LanternParams& p) {
    validate(p);
    check_cap(p);
    TriangleMesh out;
    fill_vertices(p, out, true);
    fill_triangles(p, out, true);
    return out;
}

TriangleMesh generate_lantern_serial(const LanternParams& p) {
    validate(p);
    check_cap(p);
    TriangleMesh out;
    fill_vertices(p, out, false);
    fill_triangles(p, out, false);
    return out;
}

Triangle apex_triangle(const LanternParams& p) {
    validate(p);
    const double s = p.radius * std::sin(kPi / static_cast<double>(p.n));
    const double c = p.radius * std::cos(kPi / static_cast<double>(p.n));
    const double h = p.height / static_cast<double>(p.m);
    return {{0.0, p.radius, 0.0}, {s, c, h}, {-s, c, h}};
}

std::pair<Vector3, Vector3> apex_edges(const LanternParams& p) {
    validate(p);
    const double s = p.radius * std::sin(kPi / static_cast<double>(p.n));
    const double half = std::sin(kPi / (2.0 * static_cast<double>(p.n)));
    const double dy = -2.0 * p.radius * half * half;  // R (cos(pi/n) - 1)
    const double h = p.height / static_cast<double>(p.m);
    return {Vector3{s, dy, h}, Vector3{-s, dy, h}};
}

Bivector3 triangle_bivector(const Triangle& t) {
    return 0.5 * ga3::wedge(t.v1 - t.v0, t.v2 - t.v0);
}

double mesh_area(const TriangleMesh& mesh) {
    const auto count = static_cast<std::int64_t>(mesh.triangles.size());
    const std::int64_t nblocks =
        (count + kReductionBlock - 1) / kReductionBlock;
    std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nblocks; ++b) {
        const std::int64_t hi = std::min(count, (b + 1) * kReductionBlock);
        double acc = 0.0;
        for (std::int64_t t = b * kReductionBlock; t < hi; ++t) {
            acc += triangle_area(mesh, static_cast<std::size_t>(t));
        }
        partial[static_cast<std::size_t>(b)] = acc;
    }
    double total = 0.0;
    for (double v : partial) {
        total += v;
    }
    return total;
}

double mesh_area_serial(const TriangleMesh& mesh) {
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        total += triangle_area(mesh, t);
    }
    return total;
}

double closed_form_area(const LanternParams& p) {
    validate(p);
    const double n = static_cast<double>(p.n);
    const double m = static_cast<double>(p.m);
    const double half = std::sin(kPi / (2.0 * n));
    const double one_minus_cos = 2.0 * half * half;
    const double sag = p.radius * one_minus_cos;
    const double rise = p.height / m;
    return 2.0 * n * m * p.radius * std::sin(kPi / n) *
           std::sqrt(sag * sag + rise * rise);
}

double default_nesting_tol(const LanternParams& p) {
    return 1e-9 * std::max(p.radius, p.height);
}

namespace {

// Chord between two points on the same circle of radius R.
double chord(double radius, double dtheta) {
    return 2.0 * radius * std::abs(std::sin(0.5 * dtheta));
}

double wrap_to_circle(double theta) {
    // atan2 image (-pi, pi] -> [0, 2 pi)
    return theta < 0.0 ? theta + 2.0 * kPi : theta;
}

struct FineTable {
    std::vector<double> circle_z;             // ascending, one per circle
    std::vector<std::vector<double>> thetas;  // ascending within a circle
};

FineTable build_fine_table(const LanternParams& p) {
    FineTable table;
    table.circle_z.resize(static_cast<std::size_t>(p.m + 1));
    table.thetas.resize(static_cast<std::size_t>(p.m + 1));
    for (std::int64_t j = 0; j <= p.m; ++j) {
        table.circle_z[static_cast<std::size_t>(j)] = band_height(p, j);
        auto& row = table.thetas[static_cast<std::size_t>(j)];
        row.resize(static_cast<std::size_t>(p.n));
        for (std::int64_t i = 0; i < p.n; ++i) {
            const Vector3 v = lantern_vertex(p, i, j);
            row[static_cast<std::size_t>(i)] =
                wrap_to_circle(std::atan2(v.y, v.x));
        }
        std::sort(row.begin(), row.end());
    }
    return table;
}

bool circle_contains(const std::vector<double>& row, double radius,
                     double theta, double dz, double tol) {
    const double budget_sq = tol * tol - dz * dz;
    if (budget_sq < 0.0 || row.empty()) {
        return false;
    }
    // Angular half-window whose chord equals the remaining budget.
    const double budget = std::sqrt(budget_sq);
    const double half_arg = std::min(1.0, budget / (2.0 * radius));
    const double window = 2.0 * std::asin(half_arg) + 1e-15;
    const auto check = [&](double cand) {
        double dt = std::abs(theta - cand);
        dt = std::min(dt, 2.0 * kPi - dt);
        const double c = chord(radius, dt);
        return dz * dz + c * c <= tol * tol;
    };
    auto lo = std::lower_bound(row.begin(), row.end(), theta - window);
    auto hi = std::upper_bound(row.begin(), row.end(), theta + window);
    for (auto it = lo; it != hi; ++it) {
        if (check(*it)) {
            return true;
        }
    }
    // Window may wrap past 0 or 2 pi; the extreme entries cover that.
    return check(row.front()) || check(row.back());
}

#if defined(__SIZEOF_INT128__)
using WideInt = __int128;
#else
using WideInt = long long;  // limits exact z matching to smaller m products
#endif

}  // namespace

bool check_nesting_sorted(const LanternParams& coarse,
                          const LanternParams& fine, double tol) {
    validate(coarse);
    validate(fine);
    const FineTable table = build_fine_table(fine);
    const std::int64_t queries = vertex_count(coarse);
    bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
    for (std::int64_t q = 0; q < queries; ++q) {
        if (!ok) {
            continue;
        }
        const std::int64_t j = q / coarse.n;
        const std::int64_t i = q % coarse.n;
        const Vector3 v = lantern_vertex(coarse, i, j);
        const double theta = wrap_to_circle(std::atan2(v.y, v.x));
        bool found = false;
        auto lo = std::lower_bound(table.circle_z.begin(),
                                   table.circle_z.end(), v.z - tol);
        for (auto it = lo;
             it != table.circle_z.end() && *it <= v.z + tol && !found; ++it) {
            const auto jf =
                static_cast<std::size_t>(it - table.circle_z.begin());
            found = circle_contains(table.thetas[jf], fine.radius, theta,
                                    *it - v.z, tol);
        }
        ok = ok && found;
    }
    return ok;
}

bool check_nesting_structured(const LanternParams& coarse,
                              const LanternParams& fine, double tol) {
    validate(coarse);
    validate(fine);
    const double radius = fine.radius;
    const double a = fine.height;
    const std::int64_t nc = coarse.n;
    const std::int64_t nf = fine.n;
    const std::int64_t mc = coarse.m;
    const std::int64_t mf = fine.m;
    const double fine_step = 2.0 * kPi / static_cast<double>(nf);

    // Angle grids are uniform, so when nc divides nf one representative
    // vertex stands in for the whole coarse circle.
    const std::int64_t reps = (nf % nc == 0) ? 1 : nc;

    const auto circle_nests = [&](std::int64_t j) {
        const double off_c = circle_offset(coarse, j);
        // Fine circles near z = j a / mc satisfy j mf ~ jf mc; scan the
        // integer neighborhood of the exact ratio.
        const std::int64_t q_center = static_cast<std::int64_t>(
            static_cast<WideInt>(j) * mf / mc);
        for (std::int64_t i = 0; i < reps; ++i) {
            const double theta =
                2.0 * kPi * static_cast<double>(i) / static_cast<double>(nc) +
                off_c;
            bool found = false;
            for (std::int64_t jf = std::max<std::int64_t>(0, q_center - 2);
                 jf <= std::min(mf, q_center + 2) && !found; ++jf) {
                const WideInt num = static_cast<WideInt>(j) * mf -
                                    static_cast<WideInt>(jf) * mc;
                const double dz = static_cast<double>(num) * a /
                                  (static_cast<double>(mc) *
                                   static_cast<double>(mf));
                if (std::abs(dz) > tol) {
                    continue;
                }
                const double x = theta - circle_offset(fine, jf);
                const double dt = x - fine_step * std::round(x / fine_step);
                const double c = chord(radius, dt);
                found = dz * dz + c * c <= tol * tol;
            }
            if (!found) {
                return false;
            }
        }
        return true;
    };

    // The circle verdict is periodic in j: shifting j by
    // 2 mc / gcd(mc, mf) shifts jf by an even integer and preserves both
    // stagger parities. Away from the clamped ends it suffices to test one
    // period (plus one period at each end).
    const std::int64_t g = std::gcd(mc, mf);
    std::int64_t period = mc / g;
    if (period <= (std::int64_t{1} << 61)) {
        period *= 2;
    }
    if (period + 2 >= mc) {
        for (std::int64_t j = 0; j <= mc; ++j) {
            if (!circle_nests(j)) {
                return false;
            }
        }
        return true;
    }
    for (std::int64_t j = 0; j <= std::min(mc, period + 2); ++j) {
        if (!circle_nests(j)) {
            return false;
        }
    }
    for (std::int64_t j = std::max<std::int64_t>(0, mc - period - 2); j <= mc;
         ++j) {
        if (!circle_nests(j)) {
            return false;
        }
    }
    return true;
}

bool check_nesting_serial(const LanternParams& coarse,
                          const LanternParams& fine, double tol) {
    validate(coarse);
    validate(fine);
    std::vector<Vector3> fine_vertices;
    fine_vertices.reserve(static_cast<std::size_t>(vertex_count(fine)));
    for (std::int64_t j = 0; j <= fine.m; ++j) {
        for (std::int64_t i = 0; i < fine.n; ++i) {
            fine_vertices.push_back(lantern_vertex(fine, i, j));
        }
    }
    for (std::int64_t j = 0; j <= coarse.m; ++j) {
        for (std::int64_t i = 0; i < coarse.n; ++i) {
            const Vector3 v = lantern_vertex(coarse, i, j);
            bool found = false;
            for (const Vector3& w : fine_vertices) {
                const Vector3 d = v - w;
                if (ga3::dot(d, d) <= tol * tol) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                return false;
            }
        }
    }
    return true;
}

bool check_nesting(const LanternParams& coarse, const LanternParams& fine,
                   double tol) {
    validate(coarse);
    validate(fine);
    if (coarse.radius != fine.radius || coarse.height != fine.height) {
        throw std::invalid_argument(
            "nesting requires identical radius and height");
    }
    constexpr std::int64_t kMaterializeLimit = 4'000'000;
    if (vertex_count(fine) <= kMaterializeLimit) {
        return check_nesting_sorted(coarse, fine, tol);
    }
    return check_nesting_structured(coarse, fine, tol);
}

}  // namespace lantern::mesh
