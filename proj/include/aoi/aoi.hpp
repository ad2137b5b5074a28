#pragma once

#include "aoi/chain.hpp"
#include "aoi/closedform.hpp"
#include "aoi/erlang.hpp"
#include "aoi/error.hpp"
#include "aoi/model.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/renewal.hpp"
#include "aoi/simulator.hpp"
#include "aoi/table.hpp"
