#pragma once

#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "scalex/bounds.hpp"
#include "scalex/csv.hpp"
#include "scalex/ensembles.hpp"
#include "scalex/experiments.hpp"

namespace scalex {

// JSON uses fixed key ordering for diffability; reports carry no timestamps or
// machine-dependent content.
using ojson = nlohmann::ordered_json;

inline ojson to_json(const ConcentrationReport& r) {
  return ojson{{"delta", r.delta},
               {"probability_floor", r.probability_floor},
               {"row_rel_error_bound", r.row_rel_error_bound},
               {"col_rel_error_bound", r.col_rel_error_bound},
               {"c_p", r.c_p},
               {"c_e", r.c_e}};
}

inline ojson to_json(const MarginalProfile& p) {
  return ojson{{"rho1", p.rho1}, {"rho2", p.rho2}, {"rho3", p.rho3}, {"m", p.M}, {"n", p.N}};
}

inline ojson to_json(const SlopeFit& f) {
  return ojson{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

inline ojson to_json(const TailCheckResult& t) {
  return ojson{{"violation_rate", t.violation_rate},
               {"bound", t.bound},
               {"violations", t.violations},
               {"trials", t.trials}};
}

inline ojson to_json(const EnsembleSpec& s) {
  ojson j{{"kind", to_string(s.kind)}, {"m", s.M}, {"n", s.N}, {"seed", s.seed}};
  ojson params = ojson::object();
  switch (s.kind) {
    case EnsembleKind::uniform_population:
      params["low"] = s.low;
      params["high"] = s.high;
      break;
    case EnsembleKind::uniform_observation:
      params["low"] = s.low;
      params["high"] = s.high;
      params["half_width"] = s.half_width;
      break;
    case EnsembleKind::rademacher_dependent:
      params["envelope_lower"] = s.envelope_lower;
      params["envelope_upper"] = s.envelope_upper;
      break;
  }
  j["parameters"] = std::move(params);
  return j;
}

inline EnsembleSpec ensemble_spec_from_json(const ojson& j) {
  EnsembleSpec s;
  s.kind = ensemble_kind_from_string(j.at("kind").get<std::string>());
  s.M = j.at("m").get<std::size_t>();
  s.N = j.at("n").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  const ojson& p = j.at("parameters");
  switch (s.kind) {
    case EnsembleKind::uniform_population:
      s.low = p.at("low").get<double>();
      s.high = p.at("high").get<double>();
      break;
    case EnsembleKind::uniform_observation:
      s.low = p.at("low").get<double>();
      s.high = p.at("high").get<double>();
      s.half_width = p.at("half_width").get<double>();
      break;
    case EnsembleKind::rademacher_dependent:
      s.envelope_lower = p.at("envelope_lower").get<std::vector<double>>();
      s.envelope_upper = p.at("envelope_upper").get<std::vector<double>>();
      break;
  }
  return s;
}

inline constexpr const char* kCurveCsvHeader =
    "scenario,N,M,mean_en,std_en,mean_operr,std_operr,bound_en,bound_operr,trials,failures";

inline void write_curve_csv(std::ostream& out, const ErrorCurve& curve) {
  out << kCurveCsvHeader << '\n';
  for (std::size_t k = 0; k < curve.n_values.size(); ++k) {
    out << scenario_letter(curve.scenario) << ',' << curve.n_values[k] << ',' << curve.m_values[k]
        << ',' << format_double17(curve.mean_en[k]) << ',' << format_double17(curve.std_en[k])
        << ',' << format_double17(curve.mean_operr[k]) << ','
        << format_double17(curve.std_operr[k]) << ',' << format_double17(curve.bound_en[k]) << ','
        << format_double17(curve.bound_operr[k]) << ',' << curve.trials[k] << ','
        << curve.failures[k] << '\n';
  }
}

inline ojson to_json(const ErrorCurve& curve) {
  ojson points = ojson::array();
  for (std::size_t k = 0; k < curve.n_values.size(); ++k) {
    points.push_back(ojson{{"scenario", std::string(1, scenario_letter(curve.scenario))},
                           {"N", curve.n_values[k]},
                           {"M", curve.m_values[k]},
                           {"mean_en", curve.mean_en[k]},
                           {"std_en", curve.std_en[k]},
                           {"mean_operr", curve.mean_operr[k]},
                           {"std_operr", curve.std_operr[k]},
                           {"bound_en", curve.bound_en[k]},
                           {"bound_operr", curve.bound_operr[k]},
                           {"trials", curve.trials[k]},
                           {"failures", curve.failures[k]}});
  }
  return ojson{{"points", std::move(points)}};
}

// Gnuplot script plotting the measured curves against the predicted rates on
// log-log axes. References the CSV by the given (relative) file name.
inline void write_plot_script(std::ostream& out, const std::string& csv_name, char scenario) {
  out << "set datafile separator ','\n"
         "set logscale xy\n"
         "set xlabel 'N'\n"
         "set key left bottom\n"
         "set term pngcairo size 900,600\n";
  out << "set output 'scenario_" << scenario << "_en.png'\n";
  out << "set ylabel 'E_N'\n";
  out << "plot '" << csv_name << "' every ::1 using 2:4 with linespoints title 'mean E_N', \\\n"
      << "     '" << csv_name
      << "' every ::1 using 2:8 with lines dashtype 2 title 'rate rho1 rho2 sqrt(log max(M,N))'\n";
  out << "set output 'scenario_" << scenario << "_operr.png'\n";
  out << "set ylabel '||P~ - P||_2 / ||P||_2'\n";
  out << "plot '" << csv_name
      << "' every ::1 using 2:6 with linespoints title 'mean operator-norm error', \\\n"
      << "     '" << csv_name
      << "' every ::1 using 2:9 with lines dashtype 2 title 'rate sqrt(log max(M,N)/min(M,N))'\n";
}

}  // namespace scalex
