#include "homebot/world/map.hpp"

#include "default_map_json.hpp"

namespace homebot::world {

HomeMap default_apartment() {
  static const HomeMap map = load_map_text(detail::kDefaultApartmentJson);
  return map;
}

}  // namespace homebot::world
