#pragma once

#include <cmath>

namespace dispatchsim {

// Planar national-grid-style coordinate in metres.
struct GridPoint {
    double easting = 0.0;
    double northing = 0.0;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

inline double distance(const GridPoint& a, const GridPoint& b) {
    return std::hypot(a.easting - b.easting, a.northing - b.northing);
}

inline GridPoint lerp(const GridPoint& a, const GridPoint& b, double f) {
    return {a.easting + (b.easting - a.easting) * f, a.northing + (b.northing - a.northing) * f};
}

}  // namespace dispatchsim
