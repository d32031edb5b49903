#include "gfsc/errors.hpp"

namespace gfsc::detail {

void throw_dimension(const std::string& what, long expected, long actual)
{
    throw DimensionError(what + ": expected " + std::to_string(expected) + ", got " +
                         std::to_string(actual));
}

} // namespace gfsc::detail
