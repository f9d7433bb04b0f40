#pragma once

#include <array>
#include <cmath>

namespace relbgk {

struct Vec3 {
    double x{};
    double y{};
    double z{};

    constexpr Vec3 &operator+=(const Vec3 &o) noexcept { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3 &operator-=(const Vec3 &o) noexcept { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3 &operator*=(double s) noexcept { x *= s; y *= s; z *= s; return *this; }

    [[nodiscard]] constexpr double dot(const Vec3 &o) const noexcept { return x * o.x + y * o.y + z * o.z; }
    [[nodiscard]] constexpr double norm2() const noexcept { return dot(*this); }
    [[nodiscard]] double norm() const noexcept { return std::sqrt(norm2()); }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3 &b) noexcept { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3 &b) noexcept { return a -= b; }
    friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return a *= s; }
    friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return a *= s; }
    friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
};

/// Contravariant four-vector v^mu; index 0 is the time component.
using FourVector = std::array<double, 4>;
using FourTensor = std::array<std::array<double, 4>, 4>;

/// Minkowski metric diag(+1, -1, -1, -1).
inline constexpr std::array<double, 4> kMetric{1.0, -1.0, -1.0, -1.0};

/// Mass-shell energy q^0 = sqrt(1 + |q|^2).
[[nodiscard]] inline double shell_energy(const Vec3 &q) noexcept { return std::sqrt(1.0 + q.norm2()); }

/// Parameters of a Juttner equilibrium J(n, beta, u).
struct JuttnerParams {
    double n{};
    double beta{1.0};
    Vec3 u{};

    [[nodiscard]] double u0() const noexcept { return std::sqrt(1.0 + u.norm2()); }
};

/// u_mu q^mu for a four-velocity with spatial part u and an on-shell q.
[[nodiscard]] inline double contract_velocity(const Vec3 &u, const Vec3 &q, double q0) noexcept
{
    return std::sqrt(1.0 + u.norm2()) * q0 - u.dot(q);
}

} // namespace relbgk
