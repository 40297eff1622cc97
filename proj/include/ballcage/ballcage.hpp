#pragma once

#include "ballcage/geometry.hpp"
#include "ballcage/innerpoint.hpp"
#include "ballcage/instance.hpp"
#include "ballcage/levelset.hpp"
#include "ballcage/lp.hpp"
#include "ballcage/oracle.hpp"
#include "ballcage/props.hpp"
#include "ballcage/solver.hpp"
