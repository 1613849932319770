#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <vector>

#include "featcurve/core.hpp"

namespace featcurve {

// ---------------------------------------------------------------------------
// Nelder-Mead simplex minimizer (deterministic, derivative-free)
// ---------------------------------------------------------------------------

struct NelderMeadOptions {
    int max_evals = 400;
    double xtol = 1e-10;  // simplex spread stop
    double ftol = 1e-14;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int evals = 0;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& x0, double step,
                                    const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    int evals = 0;
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
    for (std::size_t i = 0; i <= n; ++i) {
        fv[i] = f(simplex[i]);
        ++evals;
    }

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s2[i] = simplex[order[i]];
            f2[i] = fv[order[i]];
        }
        simplex.swap(s2);
        fv.swap(f2);
    };
    sort_simplex();

    while (evals < opt.max_evals) {
        // convergence: simplex size and function spread
        double spread = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                spread = std::max(spread, std::abs(simplex[i][j] - simplex[0][j]));
        if (spread < opt.xtol && std::abs(fv[n] - fv[0]) < opt.ftol) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / double(n);

        auto blend = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
            return x;
        };

        auto xr = blend(-1.0);
        double fr = f(xr);
        ++evals;
        if (fr < fv[0]) {
            auto xe = blend(-2.0);
            double fe = f(xe);
            ++evals;
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            const bool outside = fr < fv[n];
            auto xc = blend(outside ? -0.5 : 0.5);
            double fc = f(xc);
            ++evals;
            if (fc < std::min(fr, fv[n])) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                // shrink toward best
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fv[i] = f(simplex[i]);
                    ++evals;
                }
            }
        }
        sort_simplex();
    }
    return {simplex[0], fv[0], evals};
}

// ---------------------------------------------------------------------------
// Symmetric 3x3 eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

struct Eigen3 {
    std::array<double, 3> values{};           // descending
    std::array<Vec3, 3> vectors{};            // unit, matching values
};

// a is row-major symmetric 3x3 (only upper triangle read).
inline Eigen3 eigen_symmetric3(const std::array<double, 9>& a_in) {
    std::array<double, 9> a = a_in;
    std::array<std::array<double, 3>, 3> v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    auto at = [&](int r, int c) -> double& { return a[r * 3 + c]; };

    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = std::abs(at(0, 1)) + std::abs(at(0, 2)) + std::abs(at(1, 2));
        if (off == 0.0) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = at(std::min(k, p), std::max(k, p));
                    const double akq = at(std::min(k, q), std::max(k, q));
                    if (k != p && k != q) {
                        at(std::min(k, p), std::max(k, p)) = c * akp - s * akq;
                        at(std::min(k, q), std::max(k, q)) = s * akp + c * akq;
                    }
                }
                const double app = at(p, p), aqq = at(q, q);
                at(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                at(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                at(p, q) = 0.0;
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::array<int, 3> idx{0, 1, 2};
    std::array<double, 3> d{at(0, 0), at(1, 1), at(2, 2)};
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d[i] > d[j]; });
    Eigen3 out;
    for (int i = 0; i < 3; ++i) {
        out.values[i] = d[idx[i]];
        out.vectors[i] = Vec3{v[0][idx[i]], v[1][idx[i]], v[2][idx[i]]}.normalized();
    }
    return out;
}

// Covariance of a point set (row-major upper-symmetric 3x3) about its mean.
inline std::array<double, 9> covariance3(const std::vector<Point3>& pts) {
    Vec3 mean{0, 0, 0};
    for (const auto& p : pts) mean += p;
    mean = mean / double(pts.size());
    std::array<double, 9> c{};
    for (const auto& p : pts) {
        const Vec3 d = p - mean;
        c[0] += d.x * d.x; c[1] += d.x * d.y; c[2] += d.x * d.z;
        c[4] += d.y * d.y; c[5] += d.y * d.z; c[8] += d.z * d.z;
    }
    for (auto& x : c) x /= double(pts.size());
    c[3] = c[1]; c[6] = c[2]; c[7] = c[5];
    return c;
}

// ---------------------------------------------------------------------------
// Farthest point sampling
// ---------------------------------------------------------------------------

// Greedy max-min subsampling, seeded at `seed_local` (index into pts).
// Returns k local indices in pick order; deterministic (ties -> lowest index).
inline std::vector<int> farthest_point_sample(const std::vector<Point3>& pts, int k,
                                              int seed_local) {
    const int n = static_cast<int>(pts.size());
    k = std::min(k, n);
    std::vector<int> picked;
    if (k <= 0 || n == 0) return picked;
    picked.reserve(k);
    std::vector<double> best_d2(n, std::numeric_limits<double>::max());
    int cur = seed_local;
    picked.push_back(cur);
    for (int round = 1; round < k; ++round) {
        int next = -1;
        double next_d2 = -1.0;
        for (int i = 0; i < n; ++i) {
            const double d2 = dist2(pts[i], pts[cur]);
            if (d2 < best_d2[i]) best_d2[i] = d2;
            if (best_d2[i] > next_d2 && best_d2[i] > 0.0) {
                next_d2 = best_d2[i];
                next = i;
            }
        }
        if (next < 0) break;  // all remaining coincide with picks
        picked.push_back(next);
        cur = next;
    }
    return picked;
}

}  // namespace featcurve
