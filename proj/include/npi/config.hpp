#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "npi/controller.hpp"
#include "npi/plant.hpp"
#include "npi/simcore.hpp"

namespace npi {

struct OutputPaths {
  std::string csv;     // empty: <name>.csv
  std::string svg;     // empty: no plot
  std::string report;  // empty: <name>_certificate
};

/// One closed-loop experiment as read from a config file.
struct ExperimentConfig {
  std::string name = "experiment";
  PlantSpec plant;
  ControllerSpec controller = NpiController{0.5, BetaCosGain{IdentityBeta{}}};
  SimConfig sim;
  InitialState init;
  double ell_factor = 1.01;
  OutputPaths output;

  std::string csv_name() const { return output.csv.empty() ? name + ".csv" : output.csv; }
  std::string report_name() const {
    return output.report.empty() ? name + "_certificate" : output.report;
  }
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& origin, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Flat "section.key = value" text with '#' comments. Unknown, duplicate,
/// unused or malformed keys are errors carrying the offending line number.
ExperimentConfig parse_config(std::string_view text, const std::string& origin = "<config>");

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace npi
