#pragma once

#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "gmaxent/problem_file.hpp"

namespace gmaxent::detail {

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const Coordinates& c);
// Two-space indentation, scalar arrays on one line, doubles at 17 digits.
std::string write_json(const nlohmann::json& j);

}  // namespace gmaxent::detail
