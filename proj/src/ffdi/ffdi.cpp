#include "ffdi/ffdi.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "core/error.hpp"
#include "core/units.hpp"

namespace sfwi::ffdi {

void FfdiInput::validate() const {
  if (!std::isfinite(temperature)) throw Error(ErrorCode::Domain, "temperature must be finite", "temperature");
  if (!(humidity >= 0.0 && humidity <= 100.0)) throw Error(ErrorCode::Domain, "humidity must be in [0, 100]", "humidity");
  if (!(wind_kmh >= 0.0) || !std::isfinite(wind_kmh)) throw Error(ErrorCode::Domain, "wind must be >= 0", "wind");
  if (!(drought_factor > 0.0 && drought_factor <= 10.0))
    throw Error(ErrorCode::Domain, "drought factor must be in (0, 10]", "drought_factor");
}

double ffdi_score(const FfdiInput& in) {
  in.validate();
  return 2.0 * std::exp(-0.45 + 0.987 * std::log(in.drought_factor) - 0.0345 * in.humidity +
                        0.0338 * in.temperature + 0.0234 * in.wind_kmh);
}

FwiClass classify(double temperature, double humidity, double wind_mps, double drought_factor,
                  const ClassBands& bands) {
  return class_from_score(ffdi_score({temperature, humidity, mps_to_kmh(wind_mps), drought_factor}), bands);
}

namespace {

void check_edges(const std::vector<double>& edges, const char* field) {
  if (edges.size() < 2) throw Error(ErrorCode::InvalidArgument, std::string(field) + " needs at least 2 edges", field);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i])) throw Error(ErrorCode::InvalidArgument, std::string(field) + " edges must be finite", field);
    if (i && !(edges[i] > edges[i - 1]))
      throw Error(ErrorCode::InvalidArgument, std::string(field) + " edges must be strictly increasing", field);
  }
}

std::vector<double> steps(double lo, double hi, double step) {
  std::vector<double> out;
  int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) out.push_back(lo + step * i);
  return out;
}

std::string num(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void observation_block(std::ostringstream& out, const char* tag, const char* property, const char* unit) {
  out << "  ?" << tag << "_OB1 ssn:ObservedProperty cf:" << property << " .\n"
      << "  ?" << tag << "_OB1 ssn:ObservationSamplingTime ?T .\n"
      << "  ?" << tag << "_OB1 dul:unitOfMeasure unit:" << unit << " .\n"
      << "  ?" << tag << "_OB1 ssn:ObservedBy ?" << tag << "_Sensor1 .\n"
      << "  ?" << tag << "_Sensor1 ssn:deployedOnPlatform ?node .\n"
      << "  ?" << tag << "_OB1 ssn:hasValue ?" << tag << "_OB1V .\n";
}

std::string bounds(const char* var, double lo, double hi, bool hi_closed) {
  return std::string("?") + var + ">=" + num(lo) + "&&?" + var + (hi_closed ? "<=" : "<") + num(hi);
}

}  // namespace

void RuleGridSpec::validate() const {
  check_edges(temperature, "temperature");
  check_edges(humidity, "humidity");
  check_edges(wind, "wind");
  if (humidity.front() < 0.0 || humidity.back() > 100.0)
    throw Error(ErrorCode::InvalidArgument, "humidity edges must lie in [0, 100]", "humidity");
  if (wind.front() < 0.0) throw Error(ErrorCode::InvalidArgument, "wind edges must be >= 0", "wind");
  if (!(drought_factor > 0.0 && drought_factor <= 10.0))
    throw Error(ErrorCode::InvalidArgument, "drought factor must be in (0, 10]", "drought_factor");
  bands.validate();
}

RuleGridSpec uniform_grid_spec(double t_step, double h_step, double w_step) {
  if (!(t_step > 0 && h_step > 0 && w_step > 0))
    throw Error(ErrorCode::InvalidArgument, "grid steps must be positive", "grid");
  RuleGridSpec s;
  s.temperature = steps(0.0, 45.0, t_step);
  s.humidity = steps(0.0, 100.0, h_step);
  s.wind = steps(0.0, 25.0, w_step);
  s.validate();
  return s;
}

RuleGridSpec default_grid_spec() { return uniform_grid_spec(3.0, 4.0, 1.25); }

std::string box_rule_text(const std::string& name, const Box& b, FwiClass cls) {
  std::ostringstream out;
  out << "# rule: " << name << "\n"
      << "CONSTRUCT {\n"
      << "  ?FireEvent_1 prov:atLocation ?node .\n"
      << "  ?FireEvent_1 prov:atTime ?T .\n"
      << "  ?FireEvent_1 rdf:type fwi:" << class_local_name(cls) << " .\n"
      << "}\nWHERE {\n";
  observation_block(out, "RH", "relative_humidity", "percent");
  observation_block(out, "WS", "wind_speed", "meterPerSecond");
  observation_block(out, "AT", "air_temperature", "degreeCelsius");
  out << "  FILTER(" << bounds("RH_OB1V", b.h_lo, b.h_hi, b.h_hi_closed) << "&&"
      << bounds("WS_OB1V", b.w_lo, b.w_hi, b.w_hi_closed) << "&&" << bounds("AT_OB1V", b.t_lo, b.t_hi, b.t_hi_closed)
      << ")\n}\n";
  return out.str();
}

rules::RuleSet generate_rule_table(const RuleGridSpec& spec) {
  spec.validate();
  rules::RuleSet set;
  const auto& T = spec.temperature;
  const auto& H = spec.humidity;
  const auto& W = spec.wind;
  char name[64];
  for (std::size_t i = 0; i + 1 < T.size(); ++i)
    for (std::size_t j = 0; j + 1 < H.size(); ++j)
      for (std::size_t k = 0; k + 1 < W.size(); ++k) {
        Box b{T[i], T[i + 1], H[j], H[j + 1], W[k], W[k + 1],
              i + 2 == T.size(), j + 2 == H.size(), k + 2 == W.size()};
        FwiClass cls = classify((b.t_lo + b.t_hi) / 2, (b.h_lo + b.h_hi) / 2, (b.w_lo + b.w_hi) / 2,
                                spec.drought_factor, spec.bands);
        std::snprintf(name, sizeof name, "grid_T%02zu_H%02zu_W%02zu", i, j, k);
        set.rules.push_back(rules::parse_rule(box_rule_text(name, b, cls)));
      }

  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ",") + num(x);
    return s;
  };
  set.metadata["generator"] = "ffdi-grid";
  set.metadata["temperature_edges"] = join(T);
  set.metadata["humidity_edges"] = join(H);
  set.metadata["wind_edges"] = join(W);
  set.metadata["drought_factor"] = num(spec.drought_factor);
  set.metadata["major_edges"] = join({spec.bands.major_edges.begin(), spec.bands.major_edges.end()});
  set.metadata["extreme_sub_edges"] = join({spec.bands.extreme_sub_edges.begin(), spec.bands.extreme_sub_edges.end()});
  return set;
}

double agreement(const std::vector<FwiClass>& a, const std::vector<FwiClass>& b, Granularity g) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "agreement needs sequences of equal length");
  if (a.empty()) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    same += g == Granularity::Major ? a[i].major() == b[i].major() : a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

}  // namespace sfwi::ffdi
