#include "mqheat/model_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mqheat/expr.hpp"

namespace mqheat {

using nlohmann::json;

std::shared_ptr<const ManifoldModel> model_from_json_text(const std::string& text) {
    json j = json::parse(text);
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "torus") {
        double l1 = j.value("L1", 1.0), l2 = j.value("L2", 1.0);
        return std::make_shared<FlatTorus>(l1, l2);
    }
    if (kind == "sphere") {
        return std::make_shared<RoundSphere>(j.value("radius", 1.0));
    }
    if (kind == "chart") {
        ChartMetric::Params p;
        p.g11 = Expr::parse(j.at("g11").get<std::string>()).as_function();
        p.g12 = Expr::parse(j.at("g12").get<std::string>()).as_function();
        p.g22 = Expr::parse(j.at("g22").get<std::string>()).as_function();
        p.u_min = j.value("u_min", 0.0);
        p.u_max = j.value("u_max", 1.0);
        p.v_min = j.value("v_min", 0.0);
        p.v_max = j.value("v_max", 1.0);
        p.injectivity_radius = j.at("injectivity_radius").get<double>();
        p.chart_scale = j.value("chart_scale", 1.0);
        p.periodic = j.value("periodic", false);
        return std::make_shared<ChartMetric>(p);
    }
    throw std::invalid_argument("unknown model kind: " + kind);
}

std::shared_ptr<const ManifoldModel> model_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json_text(ss.str());
}

}  // namespace mqheat
