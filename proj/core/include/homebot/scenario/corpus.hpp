#pragma once

#include <vector>

#include "homebot/detection/anomaly.hpp"
#include "homebot/planning/navgrid.hpp"
#include "homebot/scenario/config.hpp"

namespace homebot::scenario {

/// A* route for a walking person, as metric waypoints (cell centers where
/// the direction changes). Throws InvalidArgument if no route exists.
std::vector<Vec2> walking_route(const planning::NavGrid& grid, const world::HomeMap& map, Vec2 from, Vec2 to);

/// Free cell of a room closest to the room's rectangle center, as a point.
/// Throws InvalidArgument for an unknown room or one without free cells.
Vec2 room_anchor(const world::HomeMap& map, const std::string& room);

/// Uniformly chosen free cell of a room whose 8 neighbours are free too.
Vec2 random_room_point(const world::HomeMap& map, const std::string& room, Rng& rng);

enum class EpisodeKind { Normal, Sleep, Away, Fall, NightExit, RedundantCooking };

/// Simulates single-person episodes of every kind and samples labeled
/// feature vectors from them. Samples in the ambiguous interval right after
/// a fall are skipped.
std::vector<detection::LabeledSample> generate_corpus(const world::HomeMap& map, const CorpusConfig& cfg,
                                                      const detection::FeatureConfig& features);

/// Random but plausible daily-activity script: walks between rooms, short
/// rests, occasional fridge use. Every rest lasts at most 45 s.
std::vector<world::ScriptedAction> daily_activity_script(const world::HomeMap& map, const planning::NavGrid& grid,
                                                         Vec2 start, double duration, Rng& rng);

}  // namespace homebot::scenario
