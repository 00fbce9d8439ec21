#include "lambda_soliton/system.hpp"

#include "lambda_soliton/error.hpp"

#include <cmath>

namespace lambda_soliton {

void SystemParams::validate() const
{
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw Error(ErrorCode::InvalidSpec, "coupling mu must be positive and finite");
}

} // namespace lambda_soliton
