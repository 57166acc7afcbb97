#pragma once

#include <string>

#include <json.hpp>

#include "srf/attack.hpp"
#include "srf/bench.hpp"
#include "srf/certify.hpp"
#include "srf/features.hpp"
#include "srf/spheres.hpp"

namespace srf {

// Reports are JSON documents; doubles round-trip losslessly and non-finite
// values are encoded as the strings "inf" / "-inf".
nlohmann::json json_real(double v);
double real_from_json(const nlohmann::json& j);

nlohmann::json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);

nlohmann::json feature_matrix_to_json(const Matrix& values);
Matrix feature_matrix_from_json(const nlohmann::json& j);

nlohmann::json attack_result_to_json(const AttackResult& r);
nlohmann::json accuracy_curve_to_json(const AccuracyCurve& c);
nlohmann::json correlation_to_json(const CorrelationResult& r);
nlohmann::json spheres_report_to_json(const SpheresStructure& s, const SpheresFeatureReport& f);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

std::string laplacian_name(LaplacianVariant v);
LaplacianVariant laplacian_from_name(const std::string& s);

}
