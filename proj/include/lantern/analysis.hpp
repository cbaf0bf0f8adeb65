#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lantern/ga3.hpp"
#include "lantern/mesh.hpp"

// Refinement analysis on the unit cylinder (R = 1): schedules coupling the
// band count m to the angular count n, the per-step unit bivector of the
// apex triangle, its small-angle approximation, area sequences, the
// tangent-plane projection estimator, and a probe that compares the limits
// reached under two schedules.

namespace lantern::analysis {

using ga3::Bivector3;
using ga3::Vector3;
using mesh::LanternParams;
using mesh::TriangleMesh;

enum class ScheduleKind { m_eq_n, m_eq_n_cubed, m_eq_c_n_squared, custom };

/// Rule n -> m followed while refining. Built-ins keep m a power of two
/// whenever n is one, which preserves vertex nesting along n = 2^i.
struct Schedule {
    ScheduleKind kind = ScheduleKind::m_eq_n;
    int c_exp = 0;  // m = 2^c_exp * n^2; only for m_eq_c_n_squared
    std::function<std::int64_t(std::int64_t)> custom_map;  // only for custom

    static Schedule m_eq_n() { return {ScheduleKind::m_eq_n, 0, {}}; }
    static Schedule m_eq_n_cubed() { return {ScheduleKind::m_eq_n_cubed, 0, {}}; }
    static Schedule m_eq_c_n_squared(int c_exp);
    static Schedule custom(std::function<std::int64_t(std::int64_t)> map);

    /// m for a given n. Throws std::overflow_error beyond 2^62 and
    /// std::invalid_argument when the rule yields m < 1.
    [[nodiscard]] std::int64_t bands_for(std::int64_t n) const;

    [[nodiscard]] std::string label() const;
};

struct RefinementStep {
    int i = 0;  // n = 2^i
    std::int64_t n = 0;
    std::int64_t m = 0;
    Bivector3 pseudoscalar_exact;       // unit
    Bivector3 pseudoscalar_asymptotic;  // unit
    double area = 0.0;
    double projected_area = 0.0;
    double angle_to_prev = 0.0;    // NaN on the first step
    double angle_to_target = 0.0;  // NaN without a target
};

struct ConvergenceReport {
    Schedule schedule;
    double a = 1.0;
    int i_min = 2;
    int i_max = 12;
    std::vector<RefinementStep> steps;
    Bivector3 limit_estimate;  // last step's exact pseudoscalar
    bool cauchy_ok = false;
    std::optional<Bivector3> target;
    double target_angle = 0.0;  // NaN without a target
};

struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Verdict { agree, disagree };

struct ProbeResult {
    Verdict verdict = Verdict::agree;
    double separation_angle = 0.0;
    ConvergenceReport report_a;
    ConvergenceReport report_b;
};

/// Empirical convergence test: the last four consecutive plane-angle gaps
/// strictly decrease and the final gap is below kCauchyFinalGap.
/// The m=n schedule's final gap is pi^2 / 2^(i_max+1), about 1.2e-3 at
/// i_max = 12, so the threshold sits above that with margin.
inline constexpr double kCauchyFinalGap = 2.5e-3;

/// Angle gate used by the CLI to decide exit code 0 vs 2 when a target
/// blade is requested.
inline constexpr double kTargetAngleGate = 1e-3;

inline constexpr Bivector3 kIxK{0.0, 1.0, 0.0};   // i^k
inline constexpr Bivector3 kJxI{-1.0, 0.0, 0.0};  // j^i

/// The m = c n^2 limit blade: normalize(-pi^2 e_xy + (2a/c) e_xz).
[[nodiscard]] Bivector3 mixture_limit(double a, int c_exp);

/// Unit bivector of the apex triangle at refinement (n, m): the normalized
/// wedge of the apex edge vectors, evaluated cancellation-safely.
[[nodiscard]] Bivector3 pseudoscalar_estimate(std::int64_t n, std::int64_t m,
                                              double a);

/// Normalized leading-order form: b_xy = -(pi/n)^3, b_xz = (pi/n)(2a/m).
[[nodiscard]] Bivector3 pseudoscalar_asymptotic(std::int64_t n,
                                                std::int64_t m, double a);

/// Runs one schedule over i = i_min..i_max (n = 2^i) and assembles the
/// per-step record plus Cauchy status and, if a target blade is given, the
/// final plane angle to it (up to sign).
[[nodiscard]] ConvergenceReport run_schedule(
    const Schedule& s, double a, int i_min, int i_max,
    std::optional<Bivector3> target = std::nullopt);

struct AreaRow {
    int i = 0;
    std::int64_t n = 0;
    std::int64_t m = 0;
    double area = 0.0;
};

/// Closed-form lantern areas along a schedule; no mesh is materialized.
[[nodiscard]] std::vector<AreaRow> area_sequence(const Schedule& s, double a,
                                                 double radius, int i_min,
                                                 int i_max);

/// Unit tangent-plane bivector of the cylinder at a surface point:
/// normalize(t ^ k) with t the unit circle tangent and k = e_z. At
/// (0, R, 0) this is (0, -1, 0), the same plane as i^k with opposite
/// orientation; compare up to sign. Throws std::domain_error when the
/// point is off the cylinder.
[[nodiscard]] Bivector3 tangent_pseudoscalar(Vector3 point, double radius);

/// Corrected area estimator: every triangle's bivector is projected onto
/// the tangent plane at its radially projected centroid and the projected
/// areas are summed. Parallel, fixed-block reduction.
[[nodiscard]] double projected_area(const TriangleMesh& mesh, double radius);

/// Single-threaded reference for projected_area.
[[nodiscard]] double projected_area_serial(const TriangleMesh& mesh,
                                           double radius);

/// Projected area without a mesh: rotations about the axis and vertical
/// shifts map every lantern triangle onto the apex triangle and leave the
/// projection invariant, so the sum is 2 n m |<B_apex, T_apex>|
/// = 2 n a R sin(pi/n). Valid for the full m range.
[[nodiscard]] double projected_area_closed_form(const LanternParams& p);

/// Runs both schedules to i_max; DISAGREE when both converged but their
/// limit planes differ by more than tol_angle (up to sign). Throws
/// NotConverged when either sequence fails the Cauchy test.
[[nodiscard]] ProbeResult well_definedness_probe(const Schedule& s1,
                                                 const Schedule& s2, double a,
                                                 int i_max, double tol_angle);

}  // namespace lantern::analysis
