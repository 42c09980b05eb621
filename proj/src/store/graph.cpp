#include "store/graph.hpp"

#include <set>

#include "core/error.hpp"
#include "store/vocab.hpp"

namespace sfwi::store {

NamedGraph observations_to_graph(std::span<const ingest::Observation> batch) {
  if (batch.empty()) throw Error(ErrorCode::InvalidArgument, "observation batch is empty");
  const PropertyKind property = batch.front().property;
  for (const auto& o : batch)
    if (o.property != property) throw Error(ErrorCode::InvalidArgument, "batch mixes observed properties", "property");

  const Term p_property = Term::iri(vocab::observed_property());
  const Term p_time = Term::iri(vocab::sampling_time());
  const Term p_unit = Term::iri(vocab::unit_of_measure());
  const Term p_by = Term::iri(vocab::observed_by());
  const Term p_value = Term::iri(vocab::has_value());
  const Term p_platform = Term::iri(vocab::deployed_on_platform());
  const Term property_term = Term::iri(vocab::property_iri(property));
  const Term unit_term = Term::iri(vocab::unit_iri(property));

  NamedGraph g;
  g.triples.reserve(batch.size() * 5 + 8);
  std::set<Triple> seen;
  auto emit = [&](Triple t) {
    if (seen.insert(t).second) g.triples.push_back(std::move(t));
  };
  for (const auto& o : batch) {
    Term obs = Term::iri(vocab::observation_iri(o.sensor_id, o.time));
    Term sensor = Term::iri(vocab::sensor_iri(o.sensor_id));
    emit({obs, p_property, property_term});
    emit({obs, p_time, Term::date_time(o.time)});
    emit({obs, p_unit, unit_term});
    emit({obs, p_by, sensor});
    emit({obs, p_value, Term::decimal(o.value)});
    emit({sensor, p_platform, Term::iri(vocab::node_iri(o.node_id))});
  }
  return g;
}

}  // namespace sfwi::store
