#pragma once

#include "lagflow/core_model.hpp"
#include "lagflow/discretization.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/eulerian.hpp"
#include "lagflow/extensions.hpp"
#include "lagflow/legendre.hpp"
#include "lagflow/newton.hpp"
#include "lagflow/reconstruction.hpp"
#include "lagflow/schemes.hpp"
