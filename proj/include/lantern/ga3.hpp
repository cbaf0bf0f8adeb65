#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

// Minimal 3D Euclidean exterior-algebra kernel: vectors, bivectors, the
// wedge product, norms and plane angles.
//
// Bivector components are stored as (xy, xz, yz) on the basis blades
// e_x^e_y, e_x^e_z, e_y^e_z, with e_x^e_y mapping to +xy. Every module and
// file format in this project uses that order and sign convention.

namespace lantern::ga3 {

struct Vector3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct Bivector3 {
    double xy = 0.0;
    double xz = 0.0;
    double yz = 0.0;
};

[[nodiscard]] constexpr Vector3 operator+(Vector3 u, Vector3 v) {
    return {u.x + v.x, u.y + v.y, u.z + v.z};
}

[[nodiscard]] constexpr Vector3 operator-(Vector3 u, Vector3 v) {
    return {u.x - v.x, u.y - v.y, u.z - v.z};
}

[[nodiscard]] constexpr Vector3 operator*(double s, Vector3 v) {
    return {s * v.x, s * v.y, s * v.z};
}

[[nodiscard]] constexpr Bivector3 operator+(Bivector3 a, Bivector3 b) {
    return {a.xy + b.xy, a.xz + b.xz, a.yz + b.yz};
}

[[nodiscard]] constexpr Bivector3 operator-(Bivector3 a, Bivector3 b) {
    return {a.xy - b.xy, a.xz - b.xz, a.yz - b.yz};
}

[[nodiscard]] constexpr Bivector3 operator*(double s, Bivector3 b) {
    return {s * b.xy, s * b.xz, s * b.yz};
}

[[nodiscard]] constexpr Bivector3 operator-(Bivector3 b) {
    return {-b.xy, -b.xz, -b.yz};
}

[[nodiscard]] constexpr double dot(Vector3 u, Vector3 v) {
    return u.x * v.x + u.y * v.y + u.z * v.z;
}

[[nodiscard]] inline double norm(Vector3 v) {
    return std::sqrt(dot(v, v));
}

/// Wedge (outer) product of two vectors. Antisymmetric; the magnitude of
/// the result is the area of the parallelogram spanned by u and v.
[[nodiscard]] constexpr Bivector3 wedge(Vector3 u, Vector3 v) {
    return {u.x * v.y - u.y * v.x,
            u.x * v.z - u.z * v.x,
            u.y * v.z - u.z * v.y};
}

/// Euclidean inner product on bivector components.
[[nodiscard]] constexpr double dot(Bivector3 a, Bivector3 b) {
    return a.xy * b.xy + a.xz * b.xz + a.yz * b.yz;
}

[[nodiscard]] inline double norm(Bivector3 b) {
    return std::sqrt(dot(b, b));
}

/// Unit bivector in the same plane and orientation as b.
/// Throws std::domain_error on a zero bivector (degenerate blade).
[[nodiscard]] inline Bivector3 normalize(Bivector3 b) {
    const double n = norm(b);
    if (n == 0.0) {
        throw std::domain_error("degenerate blade");
    }
    return (1.0 / n) * b;
}

/// Angle between the planes represented by two bivectors, in radians.
/// Signed comparison gives [0, pi]; with up_to_sign the orientation is
/// ignored and the result lies in [0, pi/2]. Component triples are an
/// isometric image of the planes, so the angle is taken through atan2 of
/// their cross and dot: unlike arccos of a near-1 cosine, this resolves
/// angles down to rounding level and cannot produce NaN.
[[nodiscard]] inline double plane_angle(Bivector3 a, Bivector3 b,
                                        bool up_to_sign = false) {
    if (norm(a) == 0.0 || norm(b) == 0.0) {
        throw std::domain_error("degenerate blade");
    }
    const double cx = a.xz * b.yz - a.yz * b.xz;
    const double cy = a.yz * b.xy - a.xy * b.yz;
    const double cz = a.xy * b.xz - a.xz * b.xy;
    const double s = std::sqrt(cx * cx + cy * cy + cz * cz);
    double c = dot(a, b);
    if (up_to_sign) {
        c = std::abs(c);
    }
    return std::atan2(s, c);
}

}  // namespace lantern::ga3
