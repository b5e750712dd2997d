#pragma once

namespace resfault {

inline constexpr const char* kToolVersion = "0.1.0";

}
