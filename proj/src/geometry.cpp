#include "optdisc/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "optdisc/errors.hpp"

namespace optdisc {

using nlohmann::json;

std::vector<Point> Instance::all() const {
    std::vector<Point> out = w1;
    out.insert(out.end(), w2.begin(), w2.end());
    return out;
}

void Separation::normalize_order() {
    for (auto* v : {&xs, &ys}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
}

namespace {

long long rank_of(const std::vector<Rational>& sorted, const Rational& v) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    if (it == sorted.end() || *it != v) throw std::out_of_range("coordinate not in map");
    return 3 * (static_cast<long long>(it - sorted.begin()) + 1);
}

template <class P>
void dedup(std::vector<P>& pts) {
    std::sort(pts.begin(), pts.end(), [](const P& a, const P& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const P& a, const P& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
}

}  // namespace

long long CoordMaps::normalized_x(const Rational& v) const { return rank_of(xs, v); }
long long CoordMaps::normalized_y(const Rational& v) const { return rank_of(ys, v); }

Normalized normalize(const RawInstance& raw0) {
    RawInstance raw = raw0;
    dedup(raw.w1);
    dedup(raw.w2);
    {
        std::set<std::pair<Rational, Rational>> s1;
        for (const auto& p : raw.w1) s1.insert({p.x, p.y});
        for (const auto& p : raw.w2)
            if (s1.count({p.x, p.y}))
                throw OverlapError("point (" + format_rational(p.x) + ", " + format_rational(p.y) +
                                   ") appears in both classes");
    }
    Normalized out;
    for (const auto* w : {&raw.w1, &raw.w2})
        for (const auto& p : *w) {
            out.maps.xs.push_back(p.x);
            out.maps.ys.push_back(p.y);
        }
    for (auto* v : {&out.maps.xs, &out.maps.ys}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    for (const auto& p : raw.w1) out.inst.w1.push_back({out.maps.normalized_x(p.x), out.maps.normalized_y(p.y), 1});
    for (const auto& p : raw.w2) out.inst.w2.push_back({out.maps.normalized_x(p.x), out.maps.normalized_y(p.y), 2});
    return out;
}

Normalized normalize(const Instance& inst) { return normalize(to_raw(inst)); }

RawInstance to_raw(const Instance& inst) {
    RawInstance r;
    for (const auto& p : inst.w1) r.w1.push_back({Rational(p.x), Rational(p.y), 1});
    for (const auto& p : inst.w2) r.w2.push_back({Rational(p.x), Rational(p.y), 2});
    return r;
}

namespace {

Rational denorm_line(long long v, const std::vector<Rational>& orig) {
    // v lies strictly between 3i and 3(i+1).
    long long i = v / 3;
    if (v <= 0) i = 0;
    if (orig.empty()) return Rational(0);
    if (i <= 0) return orig.front() - 1;
    if (i >= static_cast<long long>(orig.size())) return orig.back() + 1;
    return (orig[static_cast<std::size_t>(i - 1)] + orig[static_cast<std::size_t>(i)]) / 2;
}

}  // namespace

RawSeparation denormalize_separation(const Separation& sep, const CoordMaps& maps) {
    RawSeparation out;
    for (long long v : sep.xs) out.xs.push_back(denorm_line(v, maps.xs));
    for (long long v : sep.ys) out.ys.push_back(denorm_line(v, maps.ys));
    return out;
}

namespace {

template <class C>
bool line_between(const std::vector<C>& lines, const C& a, const C& b) {
    const C& lo = a < b ? a : b;
    const C& hi = a < b ? b : a;
    auto it = std::upper_bound(lines.begin(), lines.end(), lo);
    return it != lines.end() && *it < hi;
}

}  // namespace

SeparationVerdict verify_separation(const Instance& inst, const Separation& sep0) {
    Separation sep = sep0;
    sep.normalize_order();
    for (const auto& p : inst.w1)
        for (const auto& q : inst.w2)
            if (!line_between(sep.xs, p.x, q.x) && !line_between(sep.ys, p.y, q.y))
                return {false, std::make_pair(p, q)};
    return {};
}

RawVerdict verify_separation(const RawInstance& inst, const RawSeparation& sep0) {
    RawSeparation sep = sep0;
    std::sort(sep.xs.begin(), sep.xs.end());
    std::sort(sep.ys.begin(), sep.ys.end());
    for (const auto& p : inst.w1)
        for (const auto& q : inst.w2)
            if (!line_between(sep.xs, p.x, q.x) && !line_between(sep.ys, p.y, q.y))
                return {false, std::make_pair(p, q)};
    return {};
}

bool less_x(const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }
bool less_y(const Point& a, const Point& b) { return a.y < b.y || (a.y == b.y && a.x < b.x); }

std::vector<Point> Extremes::distinct() const {
    std::vector<Point> out;
    for (const auto& p : {top, bottom, left, right})
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    return out;
}

Extremes extremal_points(const std::vector<Point>& pts) {
    if (pts.empty()) throw EmptySet("extremal points of an empty set");
    Extremes e;
    e.left = *std::min_element(pts.begin(), pts.end(), less_x);
    e.right = *std::max_element(pts.begin(), pts.end(), less_x);
    e.bottom = *std::min_element(pts.begin(), pts.end(), less_y);
    e.top = *std::max_element(pts.begin(), pts.end(), less_y);
    return e;
}

Instance generate_planted(std::uint64_t seed, int kx, int ky, int points_per_cell) {
    constexpr int W = 8;  // cell width; planted lines sit at multiples of W
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> off(1, W - 1), cls(1, 2);
    Instance inst;
    for (int i = 0; i <= kx; ++i)
        for (int j = 0; j <= ky; ++j) {
            int c = cls(rng);
            std::set<std::pair<int, int>> used;
            for (int t = 0; t < points_per_cell; ++t) {
                int x = i * W + off(rng), y = j * W + off(rng);
                if (!used.insert({x, y}).second) continue;
                (c == 1 ? inst.w1 : inst.w2).push_back({x, y, c});
            }
        }
    return inst;
}

Instance generate_random(std::uint64_t seed, int n, int side) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> co(1, side), cls(1, 2);
    std::set<std::pair<int, int>> used;
    Instance inst;
    for (int t = 0; t < n && static_cast<int>(used.size()) < side * side; ++t) {
        int x = co(rng), y = co(rng);
        if (!used.insert({x, y}).second) {
            --t;
            continue;
        }
        int c = cls(rng);
        (c == 1 ? inst.w1 : inst.w2).push_back({x, y, c});
    }
    return inst;
}

// ---------------------------------------------------------------- IO

Rational parse_rational(const std::string& s0) {
    std::string s;
    for (char c : s0)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ParseError("empty coordinate");
    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rational num = parse_rational(s.substr(0, slash)), den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + s0 + "'");
        return num / den;
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    boost::multiprecision::cpp_int num = 0, den = 1;
    bool digits = false, dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.' && !dot) {
            dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            num = num * 10 + (c - '0');
            if (dot) den *= 10;
            digits = true;
        } else {
            throw ParseError("malformed coordinate '" + s0 + "'");
        }
    }
    if (!digits) throw ParseError("malformed coordinate '" + s0 + "'");
    Rational r(num, den);
    return neg ? Rational(-r) : r;
}

std::string format_rational(const Rational& r) {
    using boost::multiprecision::cpp_int;
    cpp_int num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    cpp_int d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) d /= 2, ++twos;
    while (d % 5 == 0) d /= 5, ++fives;
    if (d != 1) return num.str() + "/" + den.str();
    int digits = std::max(twos, fives);
    cpp_int scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    cpp_int scaled = num * (scale / den);
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string s = scaled.str();
    if (static_cast<int>(s.size()) <= digits) s = std::string(digits + 1 - s.size(), '0') + s;
    s.insert(s.size() - digits, ".");
    return (neg ? "-" : "") + s;
}

namespace {

Rational coord_from_json(const json& v) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_float()) {
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return parse_rational(os.str());
    }
    throw ParseError("coordinate must be an integer or a decimal string");
}

json coord_to_json(const Rational& r) {
    if (boost::multiprecision::denominator(r) == 1) {
        auto num = boost::multiprecision::numerator(r);
        if (num >= std::numeric_limits<long long>::min() && num <= std::numeric_limits<long long>::max())
            return static_cast<long long>(num);
    }
    return format_rational(r);
}

std::vector<RawPoint> points_from_json(const json& arr, int label) {
    if (!arr.is_array()) throw ParseError("point list must be an array");
    std::vector<RawPoint> out;
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2) throw ParseError("point must be [x, y]");
        out.push_back({coord_from_json(p[0]), coord_from_json(p[1]), label});
    }
    return out;
}

}  // namespace

RawInstance parse_instance_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("instance must be a JSON object");
    RawInstance r;
    if (j.contains("w1")) r.w1 = points_from_json(j["w1"], 1);
    if (j.contains("w2")) r.w2 = points_from_json(j["w2"], 2);
    return r;
}

RawInstance parse_instance_lines(const std::string& text) {
    RawInstance r;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string label, x, y, extra;
        if (!(ls >> label)) continue;
        if (!(ls >> x >> y) || (ls >> extra))
            throw ParseError("line " + std::to_string(lineno) + ": expected '<label> <x> <y>'");
        if (label != "1" && label != "2") throw ParseError("line " + std::to_string(lineno) + ": label must be 1 or 2");
        RawPoint p{parse_rational(x), parse_rational(y), label == "1" ? 1 : 2};
        (p.label == 1 ? r.w1 : r.w2).push_back(p);
    }
    return r;
}

RawInstance parse_instance(const std::string& text) {
    auto pos = text.find_first_not_of(" \t\r\n");
    if (pos != std::string::npos && text[pos] == '{') return parse_instance_json(text);
    return parse_instance_lines(text);
}

RawInstance read_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

std::string instance_to_json(const RawInstance& inst) {
    json j;
    j["w1"] = json::array();
    j["w2"] = json::array();
    for (const auto& p : inst.w1) j["w1"].push_back({coord_to_json(p.x), coord_to_json(p.y)});
    for (const auto& p : inst.w2) j["w2"].push_back({coord_to_json(p.x), coord_to_json(p.y)});
    return j.dump();
}

std::string instance_to_json(const Instance& inst) { return instance_to_json(to_raw(inst)); }

RawSeparation parse_separation_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("separation must be a JSON object");
    RawSeparation s;
    for (auto [key, out] : {std::pair{"xs", &s.xs}, std::pair{"ys", &s.ys}}) {
        if (!j.contains(key)) continue;
        if (!j[key].is_array()) throw ParseError(std::string(key) + " must be an array");
        for (const auto& v : j[key]) out->push_back(coord_from_json(v));
    }
    return s;
}

std::string separation_to_json(const RawSeparation& sep) {
    json j;
    j["xs"] = json::array();
    j["ys"] = json::array();
    auto xs = sep.xs, ys = sep.ys;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    for (const auto& v : xs) j["xs"].push_back(coord_to_json(v));
    for (const auto& v : ys) j["ys"].push_back(coord_to_json(v));
    return j.dump();
}

std::string separation_to_json(const Separation& sep) {
    json j;
    j["xs"] = sep.xs;
    j["ys"] = sep.ys;
    return j.dump();
}

}  // namespace optdisc
