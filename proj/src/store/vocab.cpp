#include "store/vocab.hpp"

namespace sfwi::store::vocab {

const std::map<std::string, std::string, std::less<>>& default_prefixes() {
  static const std::map<std::string, std::string, std::less<>> prefixes{
      {"ssn", std::string(kSsn)},   {"cf", std::string(kCf)},     {"dul", std::string(kDul)},
      {"unit", std::string(kUnit)}, {"aws", std::string(kAws)},   {"prov", std::string(kProv)},
      {"rdf", std::string(kRdf)},   {"xsd", std::string(kXsd)},   {"fwi", std::string(kFwi)},
  };
  return prefixes;
}

std::string ssn(std::string_view local) { return std::string(kSsn) + std::string(local); }
std::string prov(std::string_view local) { return std::string(kProv) + std::string(local); }

std::string observed_property() { return ssn("ObservedProperty"); }
std::string sampling_time() { return ssn("ObservationSamplingTime"); }
std::string unit_of_measure() { return std::string(kDul) + "unitOfMeasure"; }
std::string observed_by() { return ssn("ObservedBy"); }
std::string deployed_on_platform() { return ssn("deployedOnPlatform"); }
std::string has_value() { return ssn("hasValue"); }
std::string rdf_type() { return std::string(kRdf) + "type"; }
std::string at_location() { return prov("atLocation"); }
std::string at_time() { return prov("atTime"); }
std::string was_generated_by() { return prov("wasGeneratedBy"); }
std::string generated_at_time() { return prov("generatedAtTime"); }

std::string property_iri(PropertyKind p) { return std::string(kCf) + std::string(property_name(p)); }

std::string unit_iri(PropertyKind p) {
  switch (p) {
    case PropertyKind::AirTemperature: return std::string(kUnit) + "degreeCelsius";
    case PropertyKind::RelativeHumidity: return std::string(kUnit) + "percent";
    case PropertyKind::WindSpeed: return std::string(kUnit) + "meterPerSecond";
  }
  return {};
}

std::string class_iri(FwiClass c) { return std::string(kFwi) + class_local_name(c); }

std::optional<FwiClass> class_from_iri(std::string_view iri) {
  if (!iri.starts_with(kFwi)) return std::nullopt;
  return class_from_local_name(iri.substr(kFwi.size()));
}

std::string sensor_iri(std::string_view sensor_id) { return std::string(kSensorBase) + std::string(sensor_id); }
std::string node_iri(std::string_view node_id) { return std::string(kNodeBase) + std::string(node_id); }
std::string observation_iri(std::string_view sensor_id, Timestamp t) {
  return std::string(kObservationBase) + std::string(sensor_id) + ":" + std::to_string(t.seconds);
}
std::string rule_iri(std::string_view rule_name) { return std::string(kRuleBase) + std::string(rule_name); }

std::string node_id_from_iri(std::string_view iri) {
  if (iri.starts_with(kNodeBase)) iri.remove_prefix(kNodeBase.size());
  return std::string(iri);
}

std::string rule_name_from_iri(std::string_view iri) {
  if (iri.starts_with(kRuleBase)) iri.remove_prefix(kRuleBase.size());
  return std::string(iri);
}

}  // namespace sfwi::store::vocab
