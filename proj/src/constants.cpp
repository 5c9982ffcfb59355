#include "kgfw/constants.hpp"

#include <stdexcept>
#include <string>

namespace kgfw {

void PhysicalConstants::validate() const {
    auto require = [](double value, const char* name) {
        if (!(value > 0.0)) throw std::invalid_argument(std::string(name) + " must be strictly positive");
    };
    require(hbar, "hbar");
    require(c, "c");
    require(m, "m");
    require(q, "q");
}

}  // namespace kgfw
