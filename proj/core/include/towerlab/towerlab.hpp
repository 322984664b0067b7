#pragma once

#include "towerlab/afcheck.hpp"
#include "towerlab/amdim.hpp"
#include "towerlab/cantor.hpp"
#include "towerlab/comparison.hpp"
#include "towerlab/errors.hpp"
#include "towerlab/flow.hpp"
#include "towerlab/group.hpp"
#include "towerlab/quasitiling.hpp"
#include "towerlab/rational.hpp"
#include "towerlab/serialize.hpp"
#include "towerlab/towers.hpp"
#include "towerlab/typesemigroup.hpp"
