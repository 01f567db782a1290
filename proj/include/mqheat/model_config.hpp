#pragma once
// ManifoldModel from a JSON description: named built-ins or a chart metric
// with coefficient expressions.
//
//   {"kind": "torus",  "L1": 1.0, "L2": 1.0}
//   {"kind": "sphere", "radius": 1.0}
//   {"kind": "chart",  "g11": "...", "g12": "...", "g22": "...",
//    "u_min": 0, "u_max": 1, "v_min": 0, "v_max": 1,
//    "injectivity_radius": 0.3, "chart_scale": 1.0, "periodic": false}

#include <memory>
#include <string>

#include "mqheat/geometry.hpp"

namespace mqheat {

std::shared_ptr<const ManifoldModel> model_from_json_text(const std::string& text);
std::shared_ptr<const ManifoldModel> model_from_json_file(const std::string& path);

}  // namespace mqheat
