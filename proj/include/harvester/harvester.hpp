// Convenience umbrella header.

#pragma once

#include "harvester/basins.hpp"
#include "harvester/bifurcation.hpp"
#include "harvester/chaos01.hpp"
#include "harvester/config.hpp"
#include "harvester/csv.hpp"
#include "harvester/integrator.hpp"
#include "harvester/model.hpp"
#include "harvester/ode.hpp"
