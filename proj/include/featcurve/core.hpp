#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace featcurve {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CollinearPoints : Error { using Error::Error; };
struct DuplicatePoints : Error { using Error::Error; };
struct EmptySet : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct CloudTooSmall : Error { using Error::Error; };
struct TooFewCorners : Error { using Error::Error; };
struct EmptyMembers : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };
struct NoMatchingGtCurve : Error { using Error::Error; };
struct CollinearCluster : Error { using Error::Error; };
struct TooFewMembers : Error { using Error::Error; };
struct EmptyCurveSet : Error { using Error::Error; };
struct InfeasibleSpec : Error { using Error::Error; };
struct PTooLarge : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Vec3 / Point3
// ---------------------------------------------------------------------------

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
    Vec3 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{0, 0, 0};
    }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

using Point3 = Vec3;

inline double dist2(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

inline double dist(const Point3& a, const Point3& b) { return std::sqrt(dist2(a, b)); }

// Any unit vector orthogonal to v (deterministic choice).
inline Vec3 any_orthogonal(const Vec3& v) {
    const Vec3 axis = std::abs(v.x) <= std::abs(v.y) && std::abs(v.x) <= std::abs(v.z)
                          ? Vec3{1, 0, 0}
                          : (std::abs(v.y) <= std::abs(v.z) ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    return v.cross(axis).normalized();
}

// ---------------------------------------------------------------------------
// PointCloud
// ---------------------------------------------------------------------------

struct Aabb {
    Point3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
              std::numeric_limits<double>::max()};
    Point3 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
              std::numeric_limits<double>::lowest()};

    void expand(const Point3& p) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
    }
    double diagonal() const { return (hi - lo).norm(); }
};

inline Aabb bounding_box(const std::vector<Point3>& pts) {
    Aabb b;
    for (const auto& p : pts) b.expand(p);
    return b;
}

// Positions plus the cached bounding-box diagonal used as the scene scale.
class PointCloud {
  public:
    PointCloud() = default;
    explicit PointCloud(std::vector<Point3> pts) : points_(std::move(pts)) {
        if (points_.empty()) throw EmptySet("PointCloud requires at least one point");
        for (const auto& p : points_)
            if (!p.finite()) throw Error("PointCloud: non-finite coordinate");
        bbox_ = bounding_box(points_);
        diag_ = bbox_.diagonal();
    }

    const std::vector<Point3>& points() const { return points_; }
    const Point3& operator[](std::size_t i) const { return points_[i]; }
    std::size_t size() const { return points_.size(); }
    double bbox_diagonal() const { return diag_; }
    const Aabb& bbox() const { return bbox_; }

  private:
    std::vector<Point3> points_;
    Aabb bbox_;
    double diag_ = 0.0;
};

// ---------------------------------------------------------------------------
// Deterministic RNG (splitmix64 core; identical streams on every platform)
// ---------------------------------------------------------------------------

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

    // standard normal via Box-Muller (pairs cached)
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    Vec3 unit_vector() {
        // rejection-free: z uniform in [-1,1], angle uniform
        const double z = uniform(-1.0, 1.0);
        const double a = uniform(0.0, 2.0 * M_PI);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(a), r * std::sin(a), z};
    }

    // independent child stream (for per-stage determinism)
    Rng fork(std::uint64_t salt) { return Rng(next_u64() ^ (salt * 0x9e3779b97f4a7c15ull)); }

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace featcurve
