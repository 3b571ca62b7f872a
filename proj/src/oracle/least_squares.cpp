#include "rssiloc/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace rssiloc::oracle {
namespace {

double cost_at(std::span<const RangeMeasurement> ms, const Vec3& s) {
    double c = 0.0;
    for (const auto& m : ms) {
        const double r = distance(s, m.anchor) - m.range;
        c += r * r;
    }
    return c;
}

// Solves the 3x3 system a * x = b by Gaussian elimination with partial pivoting.
bool solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b, std::array<double, 3>& x) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        }
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = a[row][col] / a[col][col];
            for (int k = col; k < 3; ++k) a[row][k] -= f * a[col][k];
            b[row] -= f * b[col];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double v = b[row];
        for (int k = row + 1; k < 3; ++k) v -= a[row][k] * x[k];
        x[row] = v / a[row][row];
    }
    return true;
}

FitResult refine(std::span<const RangeMeasurement> ms, const Vec3& start) {
    FitResult fit{start, cost_at(ms, start), 0};
    double lambda = 1e-3;
    for (int iter = 0; iter < 5000; ++iter) {
        fit.iterations = iter + 1;
        std::array<std::array<double, 3>, 3> jtj{};
        std::array<double, 3> jtr{};
        for (const auto& m : ms) {
            const Vec3 diff = fit.position - m.anchor;
            const double dist = norm(diff);
            if (dist < 1e-15) continue;
            const std::array<double, 3> g{diff.x / dist, diff.y / dist, diff.z / dist};
            const double r = dist - m.range;
            for (int a = 0; a < 3; ++a) {
                jtr[a] += g[a] * r;
                for (int b = 0; b < 3; ++b) jtj[a][b] += g[a] * g[b];
            }
        }
        auto damped = jtj;
        for (int a = 0; a < 3; ++a) damped[a][a] += lambda * (1.0 + jtj[a][a]);
        std::array<double, 3> step{};
        if (!solve3(damped, {-jtr[0], -jtr[1], -jtr[2]}, step)) {
            lambda *= 10.0;
            continue;
        }
        Vec3 candidate = fit.position + Vec3{step[0], step[1], step[2]};
        candidate.z = std::abs(candidate.z);
        const double c = cost_at(ms, candidate);
        if (c <= fit.cost) {
            const double moved = distance(candidate, fit.position);
            fit.position = candidate;
            fit.cost = c;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (moved < 1e-15 || c < 1e-30) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return fit;
}

}  // namespace

FitResult least_squares_source(std::span<const RangeMeasurement> ms) {
    double reach = 0.0;
    for (const auto& m : ms) {
        reach = std::max(reach, m.range + norm(m.anchor));
    }
    reach = std::max(reach, 1e-3);

    // Coarse grid over the upper half-box, z > 0 so the mirror plane cannot trap the descent.
    constexpr int kSteps = 24;
    constexpr std::size_t kStarts = 8;
    std::vector<std::pair<double, Vec3>> grid;
    for (int i = 0; i <= kSteps; ++i) {
        for (int j = 0; j <= kSteps; ++j) {
            for (int k = 1; k <= kSteps / 2; ++k) {
                const Vec3 s{-reach + 2.0 * reach * i / kSteps, -reach + 2.0 * reach * j / kSteps,
                             reach * k / (kSteps / 2)};
                grid.emplace_back(cost_at(ms, s), s);
            }
        }
    }
    std::partial_sort(grid.begin(), grid.begin() + kStarts, grid.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

    // Levenberg-Marquardt on the range residuals from the best few grid points.
    FitResult best{grid.front().second, std::numeric_limits<double>::infinity(), 0};
    for (std::size_t s = 0; s < kStarts; ++s) {
        const FitResult fit = refine(ms, grid[s].second);
        if (fit.cost < best.cost) best = fit;
    }
    return best;
}

}  // namespace rssiloc::oracle
