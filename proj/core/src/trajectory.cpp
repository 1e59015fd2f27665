#include "salmon/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "salmon/keyvalue.hpp"

namespace salmon::traj {

SplineTrajectory::Coeffs SplineTrajectory::solve_dimension(const std::vector<double>& h,
                                                           const std::vector<double>& y) {
    const std::size_t n = y.size();
    Coeffs co;
    co.a = y;
    co.b.assign(n - 1, 0.0);
    co.c.assign(n, 0.0);
    co.d.assign(n - 1, 0.0);
    if (n == 2) {
        co.b[0] = (y[1] - y[0]) / h[0];
        return co;
    }

    // Tridiagonal system for the c coefficients (Thomas algorithm),
    // natural ends: c[0] = c[n-1] = 0.
    std::vector<double> diag(n, 1.0);
    std::vector<double> upper(n - 1, 0.0);
    std::vector<double> lower(n - 1, 0.0);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        lower[i - 1] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        upper[i] = h[i];
        rhs[i] = 3.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    // Natural end rows are identity with zero rhs, so the first elimination
    // step keeps row 1 intact; sweep forward then back-substitute.
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i - 1] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    co.c[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        co.c[i] = (rhs[i] - (i < n - 1 ? upper[i] * co.c[i + 1] : 0.0)) / diag[i];
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        co.d[i] = (co.c[i + 1] - co.c[i]) / (3.0 * h[i]);
        co.b[i] = (y[i + 1] - y[i]) / h[i] - h[i] * (2.0 * co.c[i] + co.c[i + 1]) / 3.0;
    }
    return co;
}

SplineTrajectory SplineTrajectory::fit(const std::vector<Vec3>& waypoints) {
    if (waypoints.size() < 2) {
        throw std::invalid_argument("spline needs at least 2 waypoints");
    }
    SplineTrajectory t;
    t.knots_.resize(waypoints.size());
    t.knots_[0] = 0.0;
    std::vector<double> h(waypoints.size() - 1);
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double chord = (waypoints[i] - waypoints[i - 1]).norm();
        if (chord <= 0.0) {
            throw std::invalid_argument("coincident consecutive waypoints at index " +
                                        std::to_string(i));
        }
        h[i - 1] = chord;
        t.knots_[i] = t.knots_[i - 1] + chord;
    }

    std::vector<double> y(waypoints.size());
    for (int dim = 0; dim < 3; ++dim) {
        for (std::size_t i = 0; i < waypoints.size(); ++i) {
            y[i] = dim == 0 ? waypoints[i].x : dim == 1 ? waypoints[i].y : waypoints[i].z;
        }
        t.dims_[dim] = solve_dimension(h, y);
    }
    return t;
}

std::size_t SplineTrajectory::segment_index(double s) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
    const auto idx = static_cast<std::size_t>(it - knots_.begin());
    if (idx == 0) return 0;
    return std::min(idx - 1, knots_.size() - 2);
}

Vec3 SplineTrajectory::eval(double s) const {
    if (s < -1e-9 || s > total_length() + 1e-9) {
        throw std::out_of_range("spline parameter out of [0, total_length]");
    }
    const std::size_t i = segment_index(s);
    const double t = s - knots_[i];
    Vec3 out;
    double* comps[3] = {&out.x, &out.y, &out.z};
    for (int dim = 0; dim < 3; ++dim) {
        const Coeffs& co = dims_[dim];
        *comps[dim] = co.a[i] + t * (co.b[i] + t * (co.c[i] + t * co.d[i]));
    }
    return out;
}

Vec3 SplineTrajectory::derivative(double s) const {
    const std::size_t i = segment_index(std::clamp(s, 0.0, total_length()));
    const double t = std::clamp(s, 0.0, total_length()) - knots_[i];
    Vec3 out;
    double* comps[3] = {&out.x, &out.y, &out.z};
    for (int dim = 0; dim < 3; ++dim) {
        const Coeffs& co = dims_[dim];
        *comps[dim] = co.b[i] + t * (2.0 * co.c[i] + t * 3.0 * co.d[i]);
    }
    return out;
}

Vec3 SplineTrajectory::second_derivative(double s) const {
    const std::size_t i = segment_index(std::clamp(s, 0.0, total_length()));
    const double t = std::clamp(s, 0.0, total_length()) - knots_[i];
    Vec3 out;
    double* comps[3] = {&out.x, &out.y, &out.z};
    for (int dim = 0; dim < 3; ++dim) {
        const Coeffs& co = dims_[dim];
        *comps[dim] = 2.0 * co.c[i] + 6.0 * co.d[i] * t;
    }
    return out;
}

Vec3 SplineTrajectory::tangent(double s) const {
    const Vec3 d = derivative(s);
    const double n = d.norm();
    if (n < 1e-12) throw std::domain_error("degenerate trajectory tangent");
    return d * (1.0 / n);
}

double SplineTrajectory::project(const Vec3& p, double s_hint, double forward_window,
                                 double back_window) const {
    const double lo = std::clamp(s_hint - back_window, 0.0, total_length());
    const double hi = std::clamp(s_hint + forward_window, 0.0, total_length());
    const auto dist2 = [&](double s) {
        const Vec3 d = eval(s) - p;
        return d.x * d.x + d.y * d.y + d.z * d.z;
    };

    // Coarse scan, then golden-section refinement around the best cell.
    constexpr int kScan = 64;
    double best_s = lo;
    double best = dist2(lo);
    for (int i = 1; i <= kScan; ++i) {
        const double s = lo + (hi - lo) * i / kScan;
        const double v = dist2(s);
        if (v < best) {
            best = v;
            best_s = s;
        }
    }
    const double cell = (hi - lo) / kScan;
    double a = std::max(lo, best_s - cell);
    double b = std::min(hi, best_s + cell);
    constexpr double kGolden = 0.6180339887498949;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = dist2(x1);
    double f2 = dist2(x2);
    while (b - a > 1e-7) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = dist2(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = dist2(x2);
        }
    }
    return 0.5 * (a + b);
}

std::string SplineTrajectory::sample_csv(double ds) const {
    if (ds <= 0.0) throw std::invalid_argument("sample spacing must be > 0");
    std::string out = "s,x,y,z\n";
    const double length = total_length();
    for (double s = 0.0;; s += ds) {
        const double sc = std::min(s, length);
        const Vec3 p = eval(sc);
        out += kv::format_double(sc) + ',' + kv::format_double(p.x) + ',' +
               kv::format_double(p.y) + ',' + kv::format_double(p.z) + '\n';
        if (sc >= length) break;
    }
    return out;
}

}  // namespace salmon::traj
