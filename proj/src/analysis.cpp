#include "lantern/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lantern::analysis {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::int64_t kBandLimit = std::int64_t{1} << 62;
constexpr std::int64_t kReductionBlock = 16384;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

#if defined(__SIZEOF_INT128__)
using WideInt = __int128;
#else
using WideInt = long long;
#endif

std::int64_t checked_bands(WideInt m) {
    if (m < 1) {
        throw std::invalid_argument("schedule yields band count below 1");
    }
    if (m > static_cast<WideInt>(kBandLimit)) {
        throw std::overflow_error("band count exceeds 2^62");
    }
    return static_cast<std::int64_t>(m);
}

void require_analysis_params(std::int64_t n, std::int64_t m, double a) {
    if (n < 3) {
        throw std::invalid_argument("n must be at least 3");
    }
    if (m < 1) {
        throw std::invalid_argument("m must be at least 1");
    }
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("height must be positive and finite");
    }
}

}  // namespace

Schedule Schedule::m_eq_c_n_squared(int c_exp) {
    if (c_exp < -8 || c_exp > 8) {
        throw std::invalid_argument("c_exp must lie in [-8, 8]");
    }
    Schedule s;
    s.kind = ScheduleKind::m_eq_c_n_squared;
    s.c_exp = c_exp;
    return s;
}

Schedule Schedule::custom(std::function<std::int64_t(std::int64_t)> map) {
    if (!map) {
        throw std::invalid_argument("custom schedule requires a map");
    }
    Schedule s;
    s.kind = ScheduleKind::custom;
    s.custom_map = std::move(map);
    return s;
}

std::int64_t Schedule::bands_for(std::int64_t n) const {
    if (n < 3) {
        throw std::invalid_argument("n must be at least 3");
    }
    switch (kind) {
        case ScheduleKind::m_eq_n:
            return n;
        case ScheduleKind::m_eq_n_cubed:
            return checked_bands(static_cast<WideInt>(n) * n * n);
        case ScheduleKind::m_eq_c_n_squared: {
            const WideInt n_sq = static_cast<WideInt>(n) * n;
            if (c_exp >= 0) {
                return checked_bands(n_sq << c_exp);
            }
            const WideInt divisor = WideInt(1) << -c_exp;
            if (n_sq % divisor != 0) {
                throw std::invalid_argument(
                    "c n^2 is not an integer for this n");
            }
            return checked_bands(n_sq / divisor);
        }
        case ScheduleKind::custom:
            return checked_bands(custom_map(n));
    }
    throw std::logic_error("unreachable schedule kind");
}

std::string Schedule::label() const {
    switch (kind) {
        case ScheduleKind::m_eq_n:
            return "m=n";
        case ScheduleKind::m_eq_n_cubed:
            return "m=n^3";
        case ScheduleKind::m_eq_c_n_squared:
            return "m=c*n^2 (c=2^" + std::to_string(c_exp) + ")";
        case ScheduleKind::custom:
            return "custom";
    }
    return "unknown";
}

Bivector3 mixture_limit(double a, int c_exp) {
    const double c = std::ldexp(1.0, c_exp);
    return ga3::normalize({-kPi * kPi, 2.0 * a / c, 0.0});
}

Bivector3 pseudoscalar_estimate(std::int64_t n, std::int64_t m, double a) {
    require_analysis_params(n, m, a);
    const auto [r, s] = mesh::apex_edges({1.0, a, n, m});
    return ga3::normalize(ga3::wedge(r, s));
}

Bivector3 pseudoscalar_asymptotic(std::int64_t n, std::int64_t m, double a) {
    require_analysis_params(n, m, a);
    const double u = kPi / static_cast<double>(n);
    return ga3::normalize(
        {-u * u * u, u * 2.0 * a / static_cast<double>(m), 0.0});
}

ConvergenceReport run_schedule(const Schedule& s, double a, int i_min,
                               int i_max, std::optional<Bivector3> target) {
    if (i_min < 2 || i_min >= i_max || i_max > 40) {
        throw std::invalid_argument("i range invalid: need 2 <= i_min < i_max <= 40");
    }
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("height must be positive and finite");
    }
    ConvergenceReport report;
    report.schedule = s;
    report.a = a;
    report.i_min = i_min;
    report.i_max = i_max;
    report.target = target;
    report.target_angle = kNaN;

    for (int i = i_min; i <= i_max; ++i) {
        const std::int64_t n = std::int64_t{1} << i;
        const std::int64_t m = s.bands_for(n);
        RefinementStep step;
        step.i = i;
        step.n = n;
        step.m = m;
        step.pseudoscalar_exact = pseudoscalar_estimate(n, m, a);
        step.pseudoscalar_asymptotic = pseudoscalar_asymptotic(n, m, a);
        const LanternParams p{1.0, a, n, m};
        step.area = mesh::closed_form_area(p);
        step.projected_area = projected_area_closed_form(p);
        step.angle_to_prev =
            report.steps.empty()
                ? kNaN
                : ga3::plane_angle(step.pseudoscalar_exact,
                                   report.steps.back().pseudoscalar_exact,
                                   true);
        step.angle_to_target =
            target ? ga3::plane_angle(step.pseudoscalar_exact, *target, true)
                   : kNaN;
        report.steps.push_back(step);
    }

    report.limit_estimate = report.steps.back().pseudoscalar_exact;
    if (target) {
        report.target_angle = report.steps.back().angle_to_target;
    }

    // Cauchy status: the last (up to) four gaps strictly decrease and the
    // final gap falls below the threshold.
    const std::size_t gap_count = report.steps.size() - 1;
    bool ok = gap_count >= 1;
    const std::size_t window = std::min<std::size_t>(4, gap_count);
    for (std::size_t k = 0; ok && k + 1 < window; ++k) {
        const double older =
            report.steps[report.steps.size() - 1 - (window - k - 1)]
                .angle_to_prev;
        const double newer =
            report.steps[report.steps.size() - (window - k - 1)]
                .angle_to_prev;
        ok = newer < older;
    }
    report.cauchy_ok =
        ok && report.steps.back().angle_to_prev < kCauchyFinalGap;
    return report;
}

std::vector<AreaRow> area_sequence(const Schedule& s, double a, double radius,
                                   int i_min, int i_max) {
    if (i_min < 2 || i_min >= i_max || i_max > 40) {
        throw std::invalid_argument("i range invalid: need 2 <= i_min < i_max <= 40");
    }
    std::vector<AreaRow> rows;
    rows.reserve(static_cast<std::size_t>(i_max - i_min + 1));
    for (int i = i_min; i <= i_max; ++i) {
        const std::int64_t n = std::int64_t{1} << i;
        const std::int64_t m = s.bands_for(n);
        rows.push_back(
            {i, n, m, mesh::closed_form_area({radius, a, n, m})});
    }
    return rows;
}

Bivector3 tangent_pseudoscalar(Vector3 point, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("radius must be positive and finite");
    }
    const double rho = std::hypot(point.x, point.y);
    if (std::abs(rho - radius) > 1e-9 * radius) {
        throw std::domain_error("point off cylinder");
    }
    const Vector3 t{-point.y / radius, point.x / radius, 0.0};
    return ga3::normalize(ga3::wedge(t, Vector3{0.0, 0.0, 1.0}));
}

namespace {

// Projection of one triangle onto the tangent plane at its radially
// projected centroid. The tangent bivector depends only on the centroid's
// angular position, so the cylinder radius drops out.
double projected_triangle_area(const TriangleMesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const Vector3& a = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Vector3& b = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Vector3& c = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const Bivector3 biv = 0.5 * ga3::wedge(b - a, c - a);
    const Vector3 centroid = (1.0 / 3.0) * (a + b + c);
    const double rho = std::hypot(centroid.x, centroid.y);
    if (rho == 0.0) {
        return 0.0;  // centroid on the axis has no tangent plane
    }
    const Bivector3 tangent{0.0, -centroid.y / rho, centroid.x / rho};
    return std::abs(ga3::dot(biv, tangent));
}

}  // namespace

double projected_area(const TriangleMesh& mesh, double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("radius must be positive");
    }
    const auto count = static_cast<std::int64_t>(mesh.triangles.size());
    const std::int64_t nblocks =
        (count + kReductionBlock - 1) / kReductionBlock;
    std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nblocks; ++b) {
        const std::int64_t hi = std::min(count, (b + 1) * kReductionBlock);
        double acc = 0.0;
        for (std::int64_t t = b * kReductionBlock; t < hi; ++t) {
            acc += projected_triangle_area(mesh, static_cast<std::size_t>(t));
        }
        partial[static_cast<std::size_t>(b)] = acc;
    }
    double total = 0.0;
    for (double v : partial) {
        total += v;
    }
    return total;
}

double projected_area_serial(const TriangleMesh& mesh, double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("radius must be positive");
    }
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        total += projected_triangle_area(mesh, t);
    }
    return total;
}

double projected_area_closed_form(const LanternParams& p) {
    mesh::validate(p);
    return 2.0 * static_cast<double>(p.n) * p.height * p.radius *
           std::sin(kPi / static_cast<double>(p.n));
}

ProbeResult well_definedness_probe(const Schedule& s1, const Schedule& s2,
                                   double a, int i_max, double tol_angle) {
    if (!(tol_angle > 0.0)) {
        throw std::invalid_argument("tol_angle must be positive");
    }
    ProbeResult result;
    result.report_a = run_schedule(s1, a, 2, i_max);
    result.report_b = run_schedule(s2, a, 2, i_max);
    if (!result.report_a.cauchy_ok || !result.report_b.cauchy_ok) {
        throw NotConverged("sequence not converged");
    }
    result.separation_angle = ga3::plane_angle(
        result.report_a.limit_estimate, result.report_b.limit_estimate, true);
    result.verdict = result.separation_angle > tol_angle ? Verdict::disagree
                                                         : Verdict::agree;
    return result;
}

}  // namespace lantern::analysis
