#include "commons/types.hpp"

namespace commons {

std::string_view actor_kind_name(ActorKind k) {
  switch (k) {
    case ActorKind::Human: return "human";
    case ActorKind::Machine: return "machine";
    case ActorKind::Firm: return "firm";
  }
  return "unknown";
}

}  // namespace commons
