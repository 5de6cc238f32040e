#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace homebot::motion {

struct Segment {
  Eigen::Vector2d a;
  Eigen::Vector2d b;
};

/// A character drawn with at most six straight strokes. `segments` are in
/// cell-local coordinates (the cell is [-0.5, 0.5]^2 around its center);
/// `world_segments` are mapped through the two anchor points.
struct GlyphStrokes {
  char character = '0';
  std::vector<Segment> segments;
  std::vector<Segment> world_segments;
};

struct CellAnchors {
  Eigen::Vector2d center;
  Eigen::Vector2d upper_right;
};

inline constexpr std::size_t kMaxGlyphSegments = 6;

/// True for 0-9 and A-Z (lower case is accepted and upper-cased).
bool glyph_supported(char ch);

/// Strokes from the built-in table. The anchors fix the cell frame: the
/// center is the origin and the center->upper-right vector sets scale and
/// rotation. Throws InvalidArgument for unsupported characters or
/// coincident anchors.
GlyphStrokes glyph_strokes(char ch, const CellAnchors& anchors);

/// Rows `index,x0,y0,x1,y1` of the world-frame segments.
std::string glyph_csv(const GlyphStrokes& glyph);

}  // namespace homebot::motion
