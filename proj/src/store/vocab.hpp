#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "core/fwi_class.hpp"
#include "core/time.hpp"

// Fixed IRIs used by observation graphs, rules and FWI events.
namespace sfwi::store::vocab {

inline constexpr std::string_view kSsn = "http://purl.oclc.org/NET/ssnx/ssn#";
inline constexpr std::string_view kCf = "http://purl.oclc.org/NET/ssnx/cf/cf-property#";
inline constexpr std::string_view kDul = "http://www.loa-cnr.it/ontologies/DUL.owl#";
inline constexpr std::string_view kUnit = "http://purl.oclc.org/NET/ssnx/qu/unit#";
inline constexpr std::string_view kAws = "http://purl.oclc.org/NET/ssnx/meteo/aws#";
inline constexpr std::string_view kProv = "http://www.w3.org/ns/prov#";
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kFwi = "urn:sfwi:ontology:fwi#";

inline constexpr std::string_view kXsdDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kXsdDateTime = "http://www.w3.org/2001/XMLSchema#dateTime";
inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";

// Instance namespaces.
inline constexpr std::string_view kSensorBase = "urn:sfwi:sensor:";
inline constexpr std::string_view kNodeBase = "urn:sfwi:node:";
inline constexpr std::string_view kObservationBase = "urn:sfwi:obs:";
inline constexpr std::string_view kEventBase = "urn:sfwi:event:";
inline constexpr std::string_view kRuleBase = "urn:sfwi:rule:";
inline constexpr std::string_view kGraphBase = "urn:graph:";

// Prefixes available to every rule without a PREFIX declaration.
const std::map<std::string, std::string, std::less<>>& default_prefixes();

std::string ssn(std::string_view local);
std::string prov(std::string_view local);

std::string observed_property();
std::string sampling_time();
std::string unit_of_measure();
std::string observed_by();
std::string deployed_on_platform();
std::string has_value();
std::string rdf_type();
std::string at_location();
std::string at_time();
std::string was_generated_by();
std::string generated_at_time();

std::string property_iri(PropertyKind p);   // cf:air_temperature, ...
std::string unit_iri(PropertyKind p);       // unit:degreeCelsius, unit:percent, unit:meterPerSecond
std::string class_iri(FwiClass c);          // fwi:High, fwi:Min-High, ...
std::optional<FwiClass> class_from_iri(std::string_view iri);

std::string sensor_iri(std::string_view sensor_id);
std::string node_iri(std::string_view node_id);
std::string observation_iri(std::string_view sensor_id, Timestamp t);
std::string rule_iri(std::string_view rule_name);

// Inverse of node_iri; returns the input unchanged for foreign IRIs.
std::string node_id_from_iri(std::string_view iri);
std::string rule_name_from_iri(std::string_view iri);

}  // namespace sfwi::store::vocab
