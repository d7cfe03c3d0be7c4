#pragma once

#include <cmath>

namespace plumesearch {

struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
};

inline WorldPoint operator+(const WorldPoint& a, const WorldPoint& b) { return {a.x + b.x, a.y + b.y}; }
inline WorldPoint operator-(const WorldPoint& a, const WorldPoint& b) { return {a.x - b.x, a.y - b.y}; }
inline WorldPoint operator*(double s, const WorldPoint& p) { return {s * p.x, s * p.y}; }
inline bool operator==(const WorldPoint& a, const WorldPoint& b) { return a.x == b.x && a.y == b.y; }

inline double dot(const WorldPoint& a, const WorldPoint& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const WorldPoint& p) { return std::hypot(p.x, p.y); }
inline double distance(const WorldPoint& a, const WorldPoint& b) { return norm(a - b); }

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Unit vector of the wind *flow* for a meteorological direction phi
// ("wind from" bearing, degrees clockwise from north). phi = 270 (wind
// from the west) gives (1, 0): flow towards +x.
inline WorldPoint wind_flow_unit(double phi_deg) {
  const double r = phi_deg * kDegToRad;
  return {-std::sin(r), -std::cos(r)};
}

inline double wrap_degrees_360(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0.0) d += 360.0;
  return d;
}

// Smallest signed angular difference a-b in degrees, in (-180, 180].
inline double angle_diff_deg(double a, double b) {
  double d = std::fmod(a - b, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

}  // namespace plumesearch
