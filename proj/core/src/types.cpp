#include "fbi/types.hpp"

#include "fbi/errors.hpp"

namespace fbi {

int flavor_dim(Flavor f) {
  switch (f) {
    case Flavor::spinless: return 2;
    case Flavor::valley: return 4;
    case Flavor::valley_spin: return 8;
  }
  return 0;
}

const char* flavor_name(Flavor f) {
  switch (f) {
    case Flavor::spinless: return "spinless";
    case Flavor::valley: return "valley";
    case Flavor::valley_spin: return "valley-spin";
  }
  return "?";
}

Flavor parse_flavor(const std::string& s) {
  if (s == "spinless") return Flavor::spinless;
  if (s == "valley") return Flavor::valley;
  if (s == "valley-spin" || s == "valley+spin") return Flavor::valley_spin;
  throw ConfigError("unknown flavor '" + s + "' (expected spinless|valley|valley-spin)");
}

}  // namespace fbi
