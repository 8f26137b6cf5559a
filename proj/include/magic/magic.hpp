#pragma once

#include "appendix_data.hpp"
#include "bloch.hpp"
#include "channels.hpp"
#include "conversion.hpp"
#include "errors.hpp"
#include "figures.hpp"
#include "io.hpp"
#include "jacobi.hpp"
#include "linalg.hpp"
#include "membership_lp.hpp"
#include "monotones.hpp"
#include "random.hpp"
#include "sdp.hpp"
#include "sdp_json.hpp"
#include "stabilizer.hpp"
#include "tolerances.hpp"
