// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace refmv {

struct vec3 {
  double x = 0, y = 0, z = 0;
};

inline vec3 operator+(const vec3& a, const vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline vec3 operator-(const vec3& a, const vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline vec3 operator*(const vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline vec3 operator*(double s, const vec3& a) { return a * s; }
inline vec3 operator/(const vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline vec3& operator+=(vec3& a, const vec3& b) { a = a + b; return a; }

inline double dot(const vec3& a, const vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline vec3 cross(const vec3& a, const vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const vec3& a) { return std::sqrt(dot(a, a)); }
inline vec3 normalize(const vec3& a) { return a / length(a); }

inline double radians(double deg) { return deg * (3.14159265358979323846 / 180.0); }

}  // namespace refmv
