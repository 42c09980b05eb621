#pragma once

#include <string>
#include <vector>

#include "core/fwi_class.hpp"
#include "rules/rule.hpp"

namespace sfwi::ffdi {

struct FfdiInput {
  double temperature = 0.0;     // °C
  double humidity = 0.0;        // %
  double wind_kmh = 0.0;        // km/h
  double drought_factor = 5.0;  // (0, 10]

  void validate() const;
};

// McArthur Mk5 forest fire danger index.
double ffdi_score(const FfdiInput& in);

// Class of a raw observation triple (wind in m/s).
FwiClass classify(double temperature, double humidity, double wind_mps, double drought_factor,
                  const ClassBands& bands);

struct RuleGridSpec {
  std::vector<double> temperature;  // °C edges
  std::vector<double> humidity;     // % edges
  std::vector<double> wind;         // m/s edges
  ClassBands bands;
  double drought_factor = 5.0;

  void validate() const;
};

// Edges T 0..45, RH 0..100, WS 0..25 at the given steps.
RuleGridSpec uniform_grid_spec(double t_step, double h_step, double w_step);

// T 0..45 step 3, RH 0..100 step 4, WS 0..25 step 1.25 (15 x 25 x 20 boxes).
RuleGridSpec default_grid_spec();

// Rule text for one box: the observation-centred form of the High rule,
// closed bounds given per side.
struct Box {
  double t_lo, t_hi, h_lo, h_hi, w_lo, w_hi;
  bool t_hi_closed = true, h_hi_closed = true, w_hi_closed = true;
};
std::string box_rule_text(const std::string& name, const Box& box, FwiClass cls);

// One rule per grid box, classified by the FFDI at the box midpoint. Interior
// upper bounds are exclusive; the last box on each axis is closed.
rules::RuleSet generate_rule_table(const RuleGridSpec& spec);

enum class Granularity { Major, Full15 };

double agreement(const std::vector<FwiClass>& a, const std::vector<FwiClass>& b, Granularity g);

}  // namespace sfwi::ffdi
