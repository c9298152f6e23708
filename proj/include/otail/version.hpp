#pragma once

namespace otail {

inline constexpr const char* kToolVersion = "0.1.0";

}
