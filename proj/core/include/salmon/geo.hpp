#pragma once

#include <cmath>

#include "salmon/geometry.hpp"

namespace salmon::geo {

// Equirectangular projection about a fixed origin. Good to well under
// 1 cm/km at fjord scale, which is all the missions here need.
inline constexpr double kEarthRadius = 6371000.0;  // [m]

struct Origin {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

struct LatLon {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

inline LatLon to_latlon(const Origin& origin, const Vec2& ned) {
    const double lat = origin.lat_deg + rad2deg(ned.x / kEarthRadius);
    const double lon =
        origin.lon_deg +
        rad2deg(ned.y / (kEarthRadius * std::cos(deg2rad(origin.lat_deg))));
    return {lat, lon};
}

inline Vec2 to_local(const Origin& origin, const LatLon& pos) {
    const double x = deg2rad(pos.lat_deg - origin.lat_deg) * kEarthRadius;
    const double y = deg2rad(pos.lon_deg - origin.lon_deg) * kEarthRadius *
                     std::cos(deg2rad(origin.lat_deg));
    return {x, y};
}

}  // namespace salmon::geo
