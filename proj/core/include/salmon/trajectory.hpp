#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "salmon/geometry.hpp"

namespace salmon::traj {

/// Natural cubic spline through 3D waypoints, parameterized by cumulative
/// chord length. Interpolates every waypoint; position, first and second
/// derivative are continuous at interior knots; second derivative vanishes
/// at both ends. Two waypoints degenerate to a straight segment.
class SplineTrajectory {
public:
    /// Throws std::invalid_argument on fewer than 2 points or coincident
    /// consecutive points (vertical thruster pairs are excluded upstream).
    static SplineTrajectory fit(const std::vector<Vec3>& waypoints);

    Vec3 eval(double s) const;
    Vec3 derivative(double s) const;         // d position / d s
    Vec3 second_derivative(double s) const;  // one-sided at knots

    /// Normalized first derivative. Throws std::domain_error when the
    /// derivative is numerically zero.
    Vec3 tangent(double s) const;

    /// Arc-length parameter of the local closest point to p, searched in
    /// [s_hint - back_window, s_hint + forward_window] and refined to 1e-6 m.
    /// Clamps to [0, total_length].
    double project(const Vec3& p, double s_hint, double forward_window = 30.0,
                   double back_window = 5.0) const;

    double total_length() const { return knots_.back(); }
    const std::vector<double>& knots() const { return knots_; }
    std::size_t size() const { return knots_.size(); }

    /// Sampled polyline "s,x,y,z" CSV at spacing ds (plotting/regression aid).
    std::string sample_csv(double ds) const;

private:
    // Piecewise cubic per dimension: value = a + b*t + c*t^2 + d*t^3 with
    // t = s - knots_[i] on segment i.
    struct Coeffs {
        std::vector<double> a, b, c, d;
    };

    std::size_t segment_index(double s) const;
    static Coeffs solve_dimension(const std::vector<double>& h, const std::vector<double>& y);

    std::vector<double> knots_;
    Coeffs dims_[3];
};

}  // namespace salmon::traj
