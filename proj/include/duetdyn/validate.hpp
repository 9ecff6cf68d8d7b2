// validate.hpp: self-check suite behind `duetdyn validate`.

#pragma once

#include <string>
#include <vector>

namespace duetdyn {

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<PropertyResult> run_validation_suite();

} // namespace duetdyn
