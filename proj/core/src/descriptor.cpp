#include "placerec/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace placerec {

namespace {

double quant(double v, double step) { return std::round(v / step) * step; }

CornerEntry quantized(const CornerEntry& e) {
    CornerEntry q = e;
    q.angle = quant(e.angle, 0.01);
    q.length = quant(e.length, 0.001);
    for (auto& ap : q.apertures) {
        ap.length = quant(ap.length, 0.001);
        ap.distance = quant(ap.distance, 0.001);
    }
    for (auto& st : q.stairs) {
        st.length = quant(st.length, 0.001);
        st.width = quant(st.width, 0.001);
        st.distance = quant(st.distance, 0.001);
    }
    return q;
}

// lexicographic entry comparison over (angle, length, aperture count,
// aperture tuples, stair count, stair tuples)
int compare_entries(const CornerEntry& a, const CornerEntry& b) {
    auto cmp = [](double x, double y) { return (x < y) ? -1 : (x > y ? 1 : 0); };
    if (int c = cmp(a.angle, b.angle)) return c;
    if (int c = cmp(a.length, b.length)) return c;
    if (int c = cmp(double(a.apertures.size()), double(b.apertures.size()))) return c;
    for (size_t i = 0; i < a.apertures.size(); ++i) {
        if (int c = cmp(a.apertures[i].type, b.apertures[i].type)) return c;
        if (int c = cmp(a.apertures[i].length, b.apertures[i].length)) return c;
        if (int c = cmp(a.apertures[i].distance, b.apertures[i].distance)) return c;
    }
    if (int c = cmp(double(a.stairs.size()), double(b.stairs.size()))) return c;
    for (size_t i = 0; i < a.stairs.size(); ++i) {
        if (int c = cmp(a.stairs[i].type, b.stairs[i].type)) return c;
        if (int c = cmp(a.stairs[i].length, b.stairs[i].length)) return c;
        if (int c = cmp(a.stairs[i].width, b.stairs[i].width)) return c;
        if (int c = cmp(a.stairs[i].distance, b.stairs[i].distance)) return c;
    }
    return 0;
}

// rotation of the entry cycle that compares lexicographically minimal
size_t minimal_rotation(const std::vector<CornerEntry>& entries) {
    const size_t n = entries.size();
    size_t best = 0;
    for (size_t s = 1; s < n; ++s) {
        for (size_t k = 0; k < n; ++k) {
            const int c = compare_entries(entries[(s + k) % n], entries[(best + k) % n]);
            if (c < 0) {
                best = s;
                break;
            }
            if (c > 0) break;
        }
    }
    return best;
}

}  // namespace

SceneDescriptor describe(const Map2D& map, const std::string& label) {
    if (map.corners.size() < 3 && !map.open_map)
        throw PipelineError("describe: closed map with fewer than 3 corners");
    const size_t n = map.corners.size();

    SceneDescriptor d;
    d.open_map = map.open_map;
    d.label = label;
    d.entries.resize(n);
    for (size_t k = 0; k < n; ++k) {
        CornerEntry& e = d.entries[k];
        e.angle = map.angles[k];
        e.length = map.walls[k].length;
        e.apertures = map.walls[k].apertures;
    }
    for (const auto& st : map.stairs) {
        const size_t k = (st.nearest_wall >= 0) ? size_t(st.nearest_wall) : 0;
        if (k < n) d.entries[k].stairs.push_back({st.type, st.length, st.width, st.distance});
    }
    for (auto& e : d.entries) {
        std::sort(e.stairs.begin(), e.stairs.end(),
                  [](const StairTuple& a, const StairTuple& b) { return a.distance < b.distance; });
        e = quantized(e);
    }

    // canonical start stabilizes serialization; matching is start-agnostic
    const size_t start = minimal_rotation(d.entries);
    std::rotate(d.entries.begin(), d.entries.begin() + start, d.entries.end());
    return d;
}

namespace {

void append_tok(std::string& s, const char* key, const std::string& value) {
    s += key;
    s += '=';
    s += value.empty() ? "-" : value;
}

bool valid_token(const std::string& t) {
    if (t.empty()) return false;
    for (char c : t)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == ':' ||
              c == '~' || c == '-' || c == '+'))
            return false;
    return true;
}

}  // namespace

std::string serialize(const SceneDescriptor& d) {
    for (const std::string* t : {&d.label, &d.source_id, &d.timestamp})
        if (!t->empty() && !valid_token(*t))
            throw ParseError("descriptor token contains unsupported characters: '" + *t + "'");

    std::string s = "D1 ";
    append_tok(s, "label", d.label);
    s += ' ';
    append_tok(s, "src", d.source_id);
    s += ' ';
    append_tok(s, "ts", d.timestamp);
    char buf[160];
    std::snprintf(buf, sizeof(buf), " open=%d n=%zu", d.open_map ? 1 : 0, d.entries.size());
    s += buf;
    for (const auto& e : d.entries) {
        std::snprintf(buf, sizeof(buf), " |a=%.2f d=%.3f ap=[", e.angle, e.length);
        s += buf;
        for (size_t i = 0; i < e.apertures.size(); ++i) {
            const auto& ap = e.apertures[i];
            std::snprintf(buf, sizeof(buf), "%s%d:%.3f:%.3f", i ? "," : "", ap.type, ap.length,
                          ap.distance);
            s += buf;
        }
        s += "] st=[";
        for (size_t i = 0; i < e.stairs.size(); ++i) {
            const auto& st = e.stairs[i];
            std::snprintf(buf, sizeof(buf), "%s%d:%.3f:%.3f:%.3f", i ? "," : "", st.type,
                          st.length, st.width, st.distance);
            s += buf;
        }
        s += ']';
    }
    return s;
}

namespace {

struct Cursor {
    const std::string& s;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("descriptor parse error at offset " + std::to_string(pos) + ": " + what);
    }
    void expect(const std::string& lit) {
        if (s.compare(pos, lit.size(), lit) != 0) fail("expected '" + lit + "'");
        pos += lit.size();
    }
    bool peek(char c) const { return pos < s.size() && s[pos] == c; }
    std::string token() {
        const size_t start = pos;
        while (pos < s.size() && s[pos] != ' ' && s[pos] != '|' && s[pos] != ',' && s[pos] != ']' &&
               s[pos] != ':')
            ++pos;
        if (pos == start) fail("expected a token");
        return s.substr(start, pos - start);
    }
    double number(const char* field) {
        const size_t start = pos;
        while (pos < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
                s[pos] == '-' || s[pos] == '+' || s[pos] == 'e' || s[pos] == 'E'))
            ++pos;
        if (pos == start) fail(std::string("expected a number for field '") + field + "'");
        try {
            size_t used = 0;
            const double v = std::stod(s.substr(start, pos - start), &used);
            if (used != pos - start) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            pos = start;
            fail(std::string("malformed number in field '") + field + "'");
        }
    }
    int integer(const char* field) {
        const double v = number(field);
        if (v != std::floor(v)) fail(std::string("expected an integer in field '") + field + "'");
        return int(v);
    }
};

std::string untok(const std::string& t) { return t == "-" ? std::string() : t; }

void check_invariants(const SceneDescriptor& d) {
    if (!d.open_map && d.entries.size() < 3)
        throw ParseError("descriptor invariant: closed map needs at least 3 entries");
    for (size_t k = 0; k < d.entries.size(); ++k) {
        const auto& e = d.entries[k];
        const std::string at = " (entry " + std::to_string(k) + ")";
        if (e.angle < 0.0 || e.angle >= 360.0)
            throw ParseError("descriptor invariant: angle out of [0, 360)" + at);
        if (e.length < 0.0) throw ParseError("descriptor invariant: negative wall length" + at);
        double prev_end = -1e-9;
        for (const auto& ap : e.apertures) {
            if (ap.type != 0 && ap.type != 1)
                throw ParseError("descriptor invariant: aperture type not 0/1" + at);
            if (ap.length <= 0 || ap.distance < 0)
                throw ParseError("descriptor invariant: bad aperture geometry" + at);
            if (ap.distance < prev_end - 1e-9)
                throw ParseError("descriptor invariant: apertures overlap or unsorted" + at);
            if (ap.distance + ap.length > e.length + 1e-6)
                throw ParseError("descriptor invariant: aperture exceeds wall length" + at);
            prev_end = ap.distance + ap.length;
        }
        for (const auto& st : e.stairs) {
            if (st.type != 0 && st.type != 1)
                throw ParseError("descriptor invariant: stair type not 0/1" + at);
            if (st.length < 0 || st.width < 0 || st.distance < 0)
                throw ParseError("descriptor invariant: negative stair dimension" + at);
        }
    }
}

}  // namespace

SceneDescriptor deserialize(const std::string& line) {
    Cursor c{line};
    SceneDescriptor d;
    c.expect("D1 ");
    c.expect("label=");
    d.label = untok(c.token());
    c.expect(" src=");
    d.source_id = untok(c.token());
    c.expect(" ts=");
    d.timestamp = untok(c.token());
    c.expect(" open=");
    const int open = c.integer("open");
    if (open != 0 && open != 1) c.fail("field 'open' must be 0 or 1");
    d.open_map = open == 1;
    c.expect(" n=");
    const int n = c.integer("n");
    if (n < 0 || n > 10000) c.fail("implausible entry count");

    for (int k = 0; k < n; ++k) {
        CornerEntry e;
        c.expect(" |");
        c.expect("a=");
        e.angle = c.number("a");
        c.expect(" d=");
        e.length = c.number("d");
        c.expect(" ap=[");
        while (!c.peek(']')) {
            Aperture ap;
            ap.type = c.integer("aperture type");
            c.expect(":");
            ap.length = c.number("aperture length");
            c.expect(":");
            ap.distance = c.number("aperture distance");
            e.apertures.push_back(ap);
            if (c.peek(',')) c.expect(",");
        }
        c.expect("]");
        c.expect(" st=[");
        while (!c.peek(']')) {
            StairTuple st;
            st.type = c.integer("stair type");
            c.expect(":");
            st.length = c.number("stair length");
            c.expect(":");
            st.width = c.number("stair width");
            c.expect(":");
            st.distance = c.number("stair distance");
            e.stairs.push_back(st);
            if (c.peek(',')) c.expect(",");
        }
        c.expect("]");
        d.entries.push_back(std::move(e));
    }
    if (c.pos != line.size()) c.fail("trailing characters after the last entry");
    check_invariants(d);
    return d;
}

SceneDescriptor rotated(const SceneDescriptor& d, size_t offset) {
    SceneDescriptor out = d;
    if (d.entries.empty()) return out;
    const size_t n = d.entries.size();
    for (size_t k = 0; k < n; ++k) out.entries[k] = d.entries[(k + offset) % n];
    return out;
}

SceneDescriptor reversed(const SceneDescriptor& d) {
    SceneDescriptor out = d;
    const size_t n = d.entries.size();
    if (n == 0) return out;
    for (size_t j = 0; j < n; ++j) {
        const size_t corner = (n - j) % n;       // corner visited j-th in reverse
        const size_t wall = (n - 1 - j + n) % n; // wall traversed after it
        CornerEntry e;
        e.angle = d.entries[corner].angle;
        e.length = d.entries[wall].length;
        e.apertures = d.entries[wall].apertures;
        for (auto& ap : e.apertures)
            ap.distance = std::max(0.0, e.length - ap.distance - ap.length);
        std::sort(e.apertures.begin(), e.apertures.end(),
                  [](const Aperture& a, const Aperture& b) { return a.distance < b.distance; });
        e.stairs = d.entries[wall].stairs;
        out.entries[j] = std::move(e);
    }
    return out;
}

bool entries_equal(const CornerEntry& a, const CornerEntry& b, double tol) {
    if (std::abs(a.angle - b.angle) > tol || std::abs(a.length - b.length) > tol) return false;
    if (a.apertures.size() != b.apertures.size() || a.stairs.size() != b.stairs.size())
        return false;
    for (size_t i = 0; i < a.apertures.size(); ++i) {
        if (a.apertures[i].type != b.apertures[i].type) return false;
        if (std::abs(a.apertures[i].length - b.apertures[i].length) > tol) return false;
        if (std::abs(a.apertures[i].distance - b.apertures[i].distance) > tol) return false;
    }
    for (size_t i = 0; i < a.stairs.size(); ++i) {
        if (a.stairs[i].type != b.stairs[i].type) return false;
        if (std::abs(a.stairs[i].length - b.stairs[i].length) > tol) return false;
        if (std::abs(a.stairs[i].width - b.stairs[i].width) > tol) return false;
        if (std::abs(a.stairs[i].distance - b.stairs[i].distance) > tol) return false;
    }
    return true;
}

}  // namespace placerec
