#include "homebot/motion/glyphs.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string_view>

#include "homebot/error.hpp"

namespace homebot::motion {

namespace {

// Stroke endpoints on a 3x3 lattice of the unit cell. Seven-segment names:
// a top, b upper right, c lower right, d bottom, e lower left, f upper left,
// g middle.
enum P : unsigned char { TL, TC, TR, ML, C, MR, BL, BC, BR };

constexpr std::array<std::array<double, 2>, 9> kPoints{{{-0.5, 0.5},
                                                         {0.0, 0.5},
                                                         {0.5, 0.5},
                                                         {-0.5, 0.0},
                                                         {0.0, 0.0},
                                                         {0.5, 0.0},
                                                         {-0.5, -0.5},
                                                         {0.0, -0.5},
                                                         {0.5, -0.5}}};

struct Stroke {
  P from;
  P to;
};

constexpr Stroke a{TL, TR}, b{TR, MR}, c{MR, BR}, d{BL, BR}, e{ML, BL}, f{TL, ML}, g{ML, MR};

struct Entry {
  char ch;
  std::array<Stroke, kMaxGlyphSegments> strokes;
  std::size_t count;
};

template <typename... S>
constexpr Entry glyph(char ch, S... s) {
  static_assert(sizeof...(S) <= kMaxGlyphSegments, "a glyph has at most six strokes");
  return Entry{ch, {s...}, sizeof...(S)};
}

// Digits and most letters follow the seven-segment encoding; glyphs that
// would need all seven segments or collide with another character use
// diagonals or the center column instead.
constexpr std::array<Entry, 36> kTable{{
    glyph('0', a, b, c, d, e, f),
    glyph('1', b, c),
    glyph('2', a, b, g, e, d),
    glyph('3', a, b, g, c, d),
    glyph('4', f, g, b, c),
    glyph('5', a, f, g, c, d),
    glyph('6', a, f, e, d, c, g),
    glyph('7', a, b, c),
    glyph('8', a, d, Stroke{TL, MR}, Stroke{TR, ML}, Stroke{ML, BR}, Stroke{MR, BL}),
    glyph('9', a, b, c, d, f, g),
    glyph('A', a, b, c, e, f, g),
    glyph('B', c, d, e, f, g),
    glyph('C', a, d, e, f),
    glyph('D', b, c, d, e, g),
    glyph('E', a, d, e, f, g),
    glyph('F', a, e, f, g),
    glyph('G', a, c, d, e, f),
    glyph('H', b, c, e, f, g),
    glyph('I', a, d, Stroke{TC, C}, Stroke{C, BC}),
    glyph('J', b, c, d, e),
    glyph('K', f, e, Stroke{ML, TR}, Stroke{ML, BR}),
    glyph('L', d, e, f),
    glyph('M', f, e, b, c, Stroke{TL, C}, Stroke{C, TR}),
    glyph('N', f, e, b, c, Stroke{TL, C}, Stroke{C, BR}),
    glyph('O', c, d, e, g),
    glyph('P', a, b, e, f, g),
    glyph('Q', a, b, c, f, g),
    glyph('R', e, g),
    glyph('S', a, f, Stroke{ML, BR}, d),
    glyph('T', a, Stroke{TC, C}, Stroke{C, BC}),
    glyph('U', b, c, d, e, f),
    glyph('V', Stroke{TL, BC}, Stroke{BC, TR}),
    glyph('W', f, e, b, c, Stroke{BL, C}, Stroke{C, BR}),
    glyph('X', Stroke{TL, BR}, Stroke{TR, BL}),
    glyph('Y', Stroke{TL, C}, Stroke{TR, C}, Stroke{C, BC}),
    glyph('Z', a, Stroke{TR, BL}, d),
}};

const Entry* find(char ch) {
  const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (const auto& e : kTable)
    if (e.ch == up) return &e;
  return nullptr;
}

Eigen::Vector2d point(P p) { return {kPoints[p][0], kPoints[p][1]}; }

}  // namespace

bool glyph_supported(char ch) { return find(ch) != nullptr; }

GlyphStrokes glyph_strokes(char ch, const CellAnchors& anchors) {
  const Entry* entry = find(ch);
  if (!entry) throw InvalidArgument(std::string("glyph_strokes: unsupported character '") + ch + "'");
  const Eigen::Vector2d corner = anchors.upper_right - anchors.center;
  if (corner.norm() < 1e-12) throw InvalidArgument("glyph_strokes: anchors must be distinct");

  // Similarity transform sending the local corner (0.5, 0.5) to `corner`.
  const double scale = corner.norm() / std::sqrt(0.5);
  const double angle = std::atan2(corner.y(), corner.x()) - std::numbers::pi / 4.0;
  Eigen::Matrix2d rot;
  rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  auto to_world = [&](const Eigen::Vector2d& p) -> Eigen::Vector2d { return anchors.center + scale * (rot * p); };

  GlyphStrokes out;
  out.character = entry->ch;
  for (std::size_t i = 0; i < entry->count; ++i) {
    const Segment local{point(entry->strokes[i].from), point(entry->strokes[i].to)};
    out.segments.push_back(local);
    out.world_segments.push_back({to_world(local.a), to_world(local.b)});
  }
  return out;
}

std::string glyph_csv(const GlyphStrokes& glyph) {
  std::ostringstream out;
  out << "index,x0,y0,x1,y1\n" << std::setprecision(10);
  for (std::size_t i = 0; i < glyph.world_segments.size(); ++i) {
    const auto& s = glyph.world_segments[i];
    out << i << ',' << s.a.x() << ',' << s.a.y() << ',' << s.b.x() << ',' << s.b.y() << '\n';
  }
  return out.str();
}

}  // namespace homebot::motion
