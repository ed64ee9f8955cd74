#pragma once

#include "spintomo/error.hpp"
#include "spintomo/half_int.hpp"
#include "spintomo/jsmap.hpp"
#include "spintomo/qstate.hpp"
#include "spintomo/su2.hpp"
#include "spintomo/tomography.hpp"
#include "spintomo/witness.hpp"
