#pragma once

#include <map>
#include <string>
#include <vector>

#include "commons/support/result.hpp"

namespace commons {

/// One Ostrom principle, optionally split into lettered sub-principles
/// (1a/1b, 2a/2b, 4a/4b). `practice` carries the IPD practice the
/// principle maps onto.
struct Principle {
  std::string id;    // "1".."8"
  std::string name;
  std::vector<std::string> subs;  // e.g. {"1a", "1b"}; empty when unsplit
  std::string practice;
};

struct Mechanism {
  std::string id;         // "M1".."M14"
  std::string name;
  std::string principle;  // sub-principle id when the principle is split
};

struct Application {
  std::string id;         // "M1-1".."M14-1"
  std::string name;
  std::string mechanism;  // owning mechanism id
  std::string principle;
};

/// Application-level dependency: `from` builds on `to`.
struct ConceptEdge {
  std::string from;
  std::string to;
};

/// The governance concept map: eight principles, fourteen mechanisms,
/// twenty-two applications, and the dependencies between applications.
struct ConceptMap {
  std::vector<Principle> principles;
  std::vector<Mechanism> mechanisms;
  std::vector<Application> applications;
  std::vector<ConceptEdge> edges;
};

namespace concept_map {

/// The built-in map the engine is written against.
const ConceptMap& builtin();

/// Structural validation: counts, unique ids, every mechanism tied to
/// exactly one principle and at least one application, edge endpoints
/// resolving to applications. Returns every violation found.
std::vector<std::string> validate(const ConceptMap& map);

/// Lookup helpers over the built-in map.
bool is_mechanism(const std::string& id);
bool is_application(const std::string& id);
const Application* find_application(const std::string& id);

}  // namespace concept_map
}  // namespace commons
