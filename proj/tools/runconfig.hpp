#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyvar/geometry.hpp"
#include "polyvar/operator.hpp"

namespace polyvar::cli {

// Flat sectioned key=value experiment configuration with explicit defaults.
struct RunConfig {
  // [geometry]
  GeomKind kind = GeomKind::slab;
  int n = 3;
  double radius = 1.0;
  int nodes = 201;

  // [operator]
  int k = 1;
  std::vector<RadialProfile> lower_order;  // resolved to exactly k entries
  RadialProfile f = RadialProfile::constant(1.0);

  // [constraint]
  std::optional<double> q;
  std::vector<double> q_schedule;
  double gamma = 1.0;
  std::vector<std::vector<double>> phi;  // per boundary component, k scalars each

  // [testfn]
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  double delta = 0.0;     // 0 -> radius/4
  int cutoff_order = 0;   // 0 -> 2k+1

  // [tolerances]
  double el_tol = 1e-6;
  double constraint_tol = 1e-12;
  int max_iterations = 20000;

  // [output]
  std::string directory = ".";
  std::vector<std::string> formats{"csv", "json"};

  void finalize();  // fills defaults, validates referential consistency
  std::string manifest_json() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace polyvar::cli
