// Sign-pattern libraries on the 3x3 square stencil: parsing, symmetry
// closure, the 512-stencil survivor count, and stencil matching.
#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nodal/cubical.hpp"

namespace nodal {

/// Stencil positions are indexed p = j * 3 + i (i: x1 offset, j: x2 offset,
/// both in units of half the square side). A stencil sign assignment is a
/// 9-bit code with bit p set when position p is positive.
using StencilCode = std::uint16_t;
inline constexpr std::size_t kStencilSize = 9;
inline constexpr std::size_t kStencilCodes = 512;

struct SignPattern {
    std::array<std::int8_t, kStencilSize> cell{};  // +1 / -1 required, 0 unconstrained

    std::size_t constrained() const {
        return static_cast<std::size_t>(std::count_if(cell.begin(), cell.end(), [](std::int8_t v) { return v != 0; }));
    }

    bool matches(StencilCode code) const {
        for (std::size_t p = 0; p < kStencilSize; ++p) {
            if (cell[p] == 0) continue;
            const bool plus = (code >> p) & 1u;
            if (plus != (cell[p] > 0)) return false;
        }
        return true;
    }

    SignPattern flipped() const {
        SignPattern out = *this;
        for (auto& v : out.cell) v = static_cast<std::int8_t>(-v);
        return out;
    }

    /// Image under element g (0..7) of the symmetry group of the square:
    /// g % 4 quarter turns, followed by a mirror in x1 when g >= 4.
    SignPattern transformed(int g) const {
        SignPattern out;
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) {
                int x = i, y = j;
                for (int r = 0; r < g % 4; ++r) {
                    const int nx = 2 - y;
                    y = x;
                    x = nx;
                }
                if (g >= 4) x = 2 - x;
                out.cell[y * 3 + x] = cell[j * 3 + i];
            }
        return out;
    }

    /// Lexicographic minimum over symmetries and polarity.
    SignPattern canonical() const {
        SignPattern best = *this;
        for (int g = 0; g < 8; ++g)
            for (const SignPattern& img : {transformed(g), transformed(g).flipped()})
                if (img.cell < best.cell) best = img;
        return best;
    }

    auto operator<=>(const SignPattern&) const = default;
};

inline StencilCode transform_code(StencilCode code, int g) {
    SignPattern p;
    for (std::size_t k = 0; k < kStencilSize; ++k) p.cell[k] = ((code >> k) & 1u) ? 1 : -1;
    const SignPattern t = p.transformed(g);
    StencilCode out = 0;
    for (std::size_t k = 0; k < kStencilSize; ++k)
        if (t.cell[k] > 0) out |= StencilCode(1u << k);
    return out;
}

inline StencilCode flip_code(StencilCode code) { return static_cast<StencilCode>(~code & 0x1FFu); }

struct PatternEntry {
    std::string id;
    SignPattern pattern;
};

struct PatternLibrary {
    std::string name;
    std::vector<PatternEntry> base;
    std::vector<PatternEntry> closure;  // ids "<base id>.<image>"
    std::bitset<kStencilCodes> forbidden;

    bool forbids(StencilCode code) const { return forbidden.test(code); }
};

inline void rebuild_mask(PatternLibrary& lib) {
    lib.forbidden.reset();
    for (StencilCode code = 0; code < kStencilCodes; ++code)
        for (const auto& e : lib.closure)
            if (e.pattern.matches(code)) {
                lib.forbidden.set(code);
                break;
            }
}

/// Adds all distinct images of the base patterns under symmetry and polarity.
inline void close_library(PatternLibrary& lib) {
    lib.closure.clear();
    std::set<SignPattern> seen;
    for (const auto& b : lib.base) {
        int image = 0;
        for (int g = 0; g < 8; ++g)
            for (const SignPattern& img : {b.pattern.transformed(g), b.pattern.transformed(g).flipped()})
                if (seen.insert(img).second) lib.closure.push_back({b.id + "." + std::to_string(++image), img});
    }
    rebuild_mask(lib);
}

inline PatternLibrary merge_libraries(std::string name, const std::vector<const PatternLibrary*>& parts) {
    PatternLibrary out;
    out.name = std::move(name);
    for (const auto* p : parts) {
        out.base.insert(out.base.end(), p->base.begin(), p->base.end());
        out.closure.insert(out.closure.end(), p->closure.begin(), p->closure.end());
        out.forbidden |= p->forbidden;
    }
    return out;
}

/// Stencils (out of 512) that contain no pattern of the closed library.
inline std::size_t count_surviving(const PatternLibrary& lib) { return kStencilCodes - lib.forbidden.count(); }

class PatternError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses blocks of "#<lib>:<id>" followed by three rows of {+,-,.}. Blank
/// lines and lines starting with "//" are ignored. Libraries are closed.
inline std::map<std::string, PatternLibrary> parse_patterns(std::string_view text) {
    std::map<std::string, PatternLibrary> libs;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    auto next_content = [&](std::string& out) {
        while (std::getline(in, out)) {
            ++lineno;
            while (!out.empty() && (out.back() == '\r' || out.back() == ' ' || out.back() == '\t')) out.pop_back();
            if (out.empty() || out.rfind("//", 0) == 0) continue;
            return true;
        }
        return false;
    };
    auto fail = [&](const std::string& msg) { throw PatternError("pattern file line " + std::to_string(lineno) + ": " + msg); };
    while (next_content(line)) {
        if (line[0] != '#') fail("expected a '#<lib>:<id>' header");
        const auto colon = line.find(':');
        if (colon == std::string::npos || colon == 1 || colon + 1 == line.size()) fail("malformed header '" + line + "'");
        const std::string lib = line.substr(1, colon - 1);
        if (lib != "B" && lib != "I4" && lib != "I5") fail("unknown library '" + lib + "'");
        PatternEntry entry{lib + ":" + line.substr(colon + 1), {}};
        for (int j = 0; j < 3; ++j) {
            std::string row;
            if (!next_content(row)) fail("pattern '" + entry.id + "' is truncated");
            if (row.size() != 3) fail("pattern rows must have exactly 3 characters");
            for (int i = 0; i < 3; ++i) {
                const char ch = row[static_cast<std::size_t>(i)];
                std::int8_t v = 0;
                if (ch == '+') v = 1;
                else if (ch == '-') v = -1;
                else if (ch != '.') fail(std::string("invalid pattern character '") + ch + "'");
                entry.pattern.cell[static_cast<std::size_t>(j * 3 + i)] = v;
            }
        }
        if (entry.pattern.constrained() < 3) fail("pattern '" + entry.id + "' constrains fewer than 3 positions");
        auto& l = libs[lib];
        l.name = lib;
        for (const auto& e : l.base)
            if (e.id == entry.id) fail("duplicate pattern id '" + entry.id + "'");
        l.base.push_back(std::move(entry));
    }
    for (auto& [name, lib] : libs) close_library(lib);
    return libs;
}

struct PatternSet {
    PatternLibrary B, I4, I5, I;  // I = I4 together with I5
};

inline constexpr std::size_t kSurvivorsB = 66;
inline constexpr std::size_t kSurvivorsI4 = 92;
inline constexpr std::size_t kSurvivorsI = 90;

/// Parses and validates the survivor checksums; a failing checksum means the
/// transcription is wrong and the library is rejected.
inline PatternSet load_patterns(std::string_view text) {
    auto libs = parse_patterns(text);
    for (const char* name : {"B", "I4", "I5"})
        if (!libs.count(name)) throw PatternError(std::string("pattern file has no '") + name + "' library");
    PatternSet set{libs["B"], libs["I4"], libs["I5"], {}};
    set.I = merge_libraries("I", {&set.I4, &set.I5});
    auto check = [](const PatternLibrary& lib, std::size_t expected) {
        const std::size_t got = count_surviving(lib);
        if (got != expected)
            throw PatternError("library " + lib.name + " leaves " + std::to_string(got) + " of 512 stencils, expected " +
                               std::to_string(expected));
    };
    check(set.B, kSurvivorsB);
    check(set.I4, kSurvivorsI4);
    check(set.I, kSurvivorsI);
    return set;
}

inline constexpr std::string_view kDefaultPatternText = R"PATTERNS(// Forbidden sign configurations on the 3x3 stencil of a square J.
//
// Stencil layout: line j is the x2 offset j*delta/2 (first line = lowest x2),
// column i is the x1 offset i*delta/2. '+' / '-' are required signs, '.' is
// unconstrained. Every block stands for the pattern together with its
// polarity flip and all images under the symmetry group of the square; the
// closure is generated on load.
//
// Load-time checksums over all 512 stencils: B leaves 66 survivors, I4 leaves
// 92, I4 together with I5 leaves 90.
//
// B: double crossovers along the three vertical and three horizontal stencil
// lines (B:1-6) and alternating signs at the four corners of J (B:7).
//
// I4: alternating signs on the corners of a parallelogram spanned by unit
// stencil steps. I4:1-4 are the four half-size subsquares, I4:5-12 have edge
// vectors (1,0),(+-1,1) and their transposes, I4:13-16 have (1,0),(+-1,2) and
// their transposes.
//
// I5: equal signs at the four corners of J, opposite sign at the center.
//
// The two conditional survivors of the I4+I5 enumeration (a double crossover
// created on an edge of J after refinement) are not excluded here. They only
// arise when the neighbouring square carries a matching configuration, which
// the shifted-square checks of I-admissibility observe; they do not change
// the library content or its checksum.

#B:1
+..
-..
+..

#B:2
.+.
.-.
.+.

#B:3
..+
..-
..+

#B:4
+-+
...
...

#B:5
...
+-+
...

#B:6
...
...
+-+

#B:7
+.-
...
-.+

#I4:1
+-.
-+.
...

#I4:2
...
+-.
-+.

#I4:3
.+-
.-+
...

#I4:4
...
.+-
.-+

#I4:5
+-.
.-+
...

#I4:6
.+-
-+.
...

#I4:7
+..
--.
.+.

#I4:8
.-.
++.
-..

#I4:9
...
+-.
.-+

#I4:10
...
.+-
-+.

#I4:11
.+.
.--
..+

#I4:12
..-
.++
.-.

#I4:13
+-.
...
.-+

#I4:14
.+-
...
-+.

#I4:15
+..
-.-
..+

#I4:16
..-
+.+
-..

#I5:1
+.+
.-.
+.+
)PATTERNS";

inline const PatternSet& default_patterns() {
    static const PatternSet set = load_patterns(kDefaultPatternText);
    return set;
}

inline StencilCode encode_stencil(const std::array<Sign, kStencilSize>& values) {
    StencilCode code = 0;
    for (std::size_t p = 0; p < kStencilSize; ++p)
        if (values[p] == Sign::Plus) code |= StencilCode(1u << p);
    return code;
}

struct StencilMatch {
    bool degenerate = false;
    std::vector<std::string> pattern_ids;
};

inline StencilMatch forbidden_in_stencil(const std::array<Sign, kStencilSize>& values, const PatternLibrary& lib) {
    StencilMatch m;
    for (Sign s : values)
        if (s == Sign::Zero) {
            m.degenerate = true;
            return m;
        }
    const StencilCode code = encode_stencil(values);
    for (const auto& e : lib.closure)
        if (e.pattern.matches(code)) m.pattern_ids.push_back(e.id);
    return m;
}

}  // namespace nodal
