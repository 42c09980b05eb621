#pragma once

#include <span>
#include <string>
#include <vector>

#include "ingest/observation.hpp"
#include "store/term.hpp"

namespace sfwi::store {

struct NamedGraph {
  std::string context;
  std::vector<Triple> triples;  // duplicate-free, in emission order
};

// Six triples per observation (ObservedProperty, ObservationSamplingTime,
// unitOfMeasure, ObservedBy, hasValue on the observation, and the sensor's
// deployedOnPlatform). All observations must share one property.
NamedGraph observations_to_graph(std::span<const ingest::Observation> batch);

}  // namespace sfwi::store
