#pragma once

#include "mhdbox/config.hpp"
#include "mhdbox/diagnostics.hpp"
#include "mhdbox/dynamics.hpp"
#include "mhdbox/errors.hpp"
#include "mhdbox/field.hpp"
#include "mhdbox/grid.hpp"
#include "mhdbox/initial_data.hpp"
#include "mhdbox/norms.hpp"
#include "mhdbox/operators.hpp"
#include "mhdbox/runner.hpp"
#include "mhdbox/snapshot.hpp"
#include "mhdbox/transform.hpp"
