#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lantern/analysis.hpp"
#include "lantern/mesh.hpp"

// Times the serial reference implementations against the OpenMP kernels
// and reports the relative difference of their results.

namespace {

using Clock = std::chrono::steady_clock;

double best_ms(const std::function<void()>& fn, int repeats = 3) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = Clock::now();
        fn();
        const auto t1 = Clock::now();
        best = std::min(
            best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void print_row(const char* name, double serial_ms, double parallel_ms,
               double rel_diff) {
    std::printf("%-18s %12.2f %12.2f %9.2fx %12.2e\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, rel_diff);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif

    const lantern::mesh::LanternParams params{1.0, 1.0, 1024, 512};
    std::printf("mesh: n=%lld m=%lld (%lld triangles)\n\n",
                static_cast<long long>(params.n),
                static_cast<long long>(params.m),
                static_cast<long long>(lantern::mesh::triangle_count(params)));
    std::printf("%-18s %12s %12s %9s %12s\n", "kernel", "serial ms",
                "parallel ms", "speedup", "rel diff");

    lantern::mesh::TriangleMesh mesh_serial;
    lantern::mesh::TriangleMesh mesh_parallel;
    const double gen_serial = best_ms(
        [&] { mesh_serial = lantern::mesh::generate_lantern_serial(params); });
    const double gen_parallel = best_ms(
        [&] { mesh_parallel = lantern::mesh::generate_lantern(params); });
    double vertex_diff = 0.0;
    for (std::size_t v = 0; v < mesh_serial.vertices.size(); ++v) {
        const auto d = mesh_serial.vertices[v] - mesh_parallel.vertices[v];
        vertex_diff = std::max(vertex_diff, lantern::ga3::norm(d));
    }
    print_row("generate", gen_serial, gen_parallel, vertex_diff);

    double area_serial = 0.0;
    double area_parallel = 0.0;
    const double area_serial_ms =
        best_ms([&] { area_serial = lantern::mesh::mesh_area_serial(mesh_serial); });
    const double area_parallel_ms =
        best_ms([&] { area_parallel = lantern::mesh::mesh_area(mesh_parallel); });
    print_row("mesh_area", area_serial_ms, area_parallel_ms,
              std::abs(area_serial - area_parallel) / area_serial);

    double proj_serial = 0.0;
    double proj_parallel = 0.0;
    const double proj_serial_ms = best_ms([&] {
        proj_serial = lantern::analysis::projected_area_serial(mesh_serial, 1.0);
    });
    const double proj_parallel_ms = best_ms([&] {
        proj_parallel = lantern::analysis::projected_area(mesh_parallel, 1.0);
    });
    print_row("projected_area", proj_serial_ms, proj_parallel_ms,
              std::abs(proj_serial - proj_parallel) / proj_serial);

    // Nesting uses a smaller pair: the reference is the O(N*M) pairwise scan.
    const lantern::mesh::LanternParams coarse{1.0, 1.0, 64, 64};
    const lantern::mesh::LanternParams fine{1.0, 1.0, 128, 128};
    const double tol = lantern::mesh::default_nesting_tol(fine);
    bool nest_serial = false;
    bool nest_parallel = false;
    const double nest_serial_ms = best_ms([&] {
        nest_serial = lantern::mesh::check_nesting_serial(coarse, fine, tol);
    });
    const double nest_parallel_ms = best_ms([&] {
        nest_parallel = lantern::mesh::check_nesting_sorted(coarse, fine, tol);
    });
    std::printf("%-18s %12.2f %12.2f %9.2fx %12s\n", "check_nesting",
                nest_serial_ms, nest_parallel_ms,
                nest_serial_ms / nest_parallel_ms,
                nest_serial == nest_parallel ? "match" : "MISMATCH");
    return 0;
}
