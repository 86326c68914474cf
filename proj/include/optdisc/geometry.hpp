#pragma once

// Point sets, separations, normalization and instance IO.
//
// Raw instances carry exact rational coordinates. normalize() maps the i-th
// smallest distinct coordinate of each axis to 3i; everything downstream works
// on those machine integers.

#include <boost/multiprecision/cpp_int.hpp>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace optdisc {

using Rational = boost::multiprecision::cpp_rational;

struct Point {
    long long x = 0, y = 0;
    int label = 1;
    bool operator==(const Point&) const = default;
};

struct Instance {
    std::vector<Point> w1, w2;
    int n() const { return static_cast<int>(w1.size() + w2.size()); }
    std::vector<Point> all() const;
};

struct Separation {
    std::vector<long long> xs, ys;  // sorted, distinct
    int size() const { return static_cast<int>(xs.size() + ys.size()); }
    void normalize_order();
    bool operator==(const Separation&) const = default;
};

struct RawPoint {
    Rational x, y;
    int label = 1;
};

struct RawInstance {
    std::vector<RawPoint> w1, w2;
    int n() const { return static_cast<int>(w1.size() + w2.size()); }
};

struct RawSeparation {
    std::vector<Rational> xs, ys;
    int size() const { return static_cast<int>(xs.size() + ys.size()); }
};

struct CoordMaps {
    std::vector<Rational> xs, ys;  // sorted distinct originals; rank i maps to 3(i+1)
    long long normalized_x(const Rational& v) const;
    long long normalized_y(const Rational& v) const;
    Rational original_x(long long v) const { return xs.at(static_cast<std::size_t>(v / 3 - 1)); }
    Rational original_y(long long v) const { return ys.at(static_cast<std::size_t>(v / 3 - 1)); }
};

struct Normalized {
    Instance inst;
    CoordMaps maps;
};

// Throws OverlapError if one coordinate pair carries both labels.
Normalized normalize(const RawInstance& raw);
// Integer instance treated as raw input.
Normalized normalize(const Instance& inst);

RawSeparation denormalize_separation(const Separation& sep, const CoordMaps& maps);

struct SeparationVerdict {
    bool ok = true;
    std::optional<std::pair<Point, Point>> violation;  // (w1 point, w2 point)
};

SeparationVerdict verify_separation(const Instance& inst, const Separation& sep);

struct RawVerdict {
    bool ok = true;
    std::optional<std::pair<RawPoint, RawPoint>> violation;
};

RawVerdict verify_separation(const RawInstance& inst, const RawSeparation& sep);

// (x,y) <=_x (x',y') iff x < x' or (x = x' and y <= y'); <=_y symmetric.
bool less_x(const Point& a, const Point& b);
bool less_y(const Point& a, const Point& b);

struct Extremes {
    Point top, bottom, left, right;
    std::vector<Point> distinct() const;
};

// Throws EmptySet.
Extremes extremal_points(const std::vector<Point>& pts);

// Points labelled by a random class per cell of a planted (kx+1) x (ky+1)
// grid. The planted lines separate the instance.
Instance generate_planted(std::uint64_t seed, int kx, int ky, int points_per_cell);

// Uniform random instance on a side x side integer grid, coordinates 1..side.
Instance generate_random(std::uint64_t seed, int n, int side);

// ---- IO. Parse errors throw ParseError.
RawInstance parse_instance_json(const std::string& text);
RawInstance parse_instance_lines(const std::string& text);
// Chooses the format from the first non-blank character.
RawInstance parse_instance(const std::string& text);
RawInstance read_instance_file(const std::string& path);
std::string instance_to_json(const RawInstance& inst);
std::string instance_to_json(const Instance& inst);
RawInstance to_raw(const Instance& inst);

RawSeparation parse_separation_json(const std::string& text);
std::string separation_to_json(const RawSeparation& sep);
std::string separation_to_json(const Separation& sep);

Rational parse_rational(const std::string& s);
// Exact decimal when the denominator has only factors 2 and 5; else "p/q".
std::string format_rational(const Rational& r);

}  // namespace optdisc
