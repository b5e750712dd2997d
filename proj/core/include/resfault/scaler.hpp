#pragma once

#include <string>
#include <vector>

#include "resfault/matrix.hpp"

namespace resfault {

// Column standardization with population std; constant columns map to 0.
struct ScalerParams {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<bool> constant;
};

ScalerParams fit_scaler(const Matrix& x);
Matrix apply_scaler(const ScalerParams& p, const Matrix& x);

std::string scaler_serialize(const ScalerParams& p);
ScalerParams scaler_deserialize(const std::string& text);

}  // namespace resfault
