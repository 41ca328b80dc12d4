// Internal: ForecastModel <-> JSON, shared by the model and stacker
// checkpoint writers.

#ifndef FLOWCAST_MODEL_JSON_HPP
#define FLOWCAST_MODEL_JSON_HPP

#include <json.hpp>

#include "flowcast/learner.hpp"

namespace flowcast {

nlohmann::json model_to_json(const ForecastModel& model);
ForecastModel model_from_json(const nlohmann::json& j);

}  // namespace flowcast

#endif  // FLOWCAST_MODEL_JSON_HPP
