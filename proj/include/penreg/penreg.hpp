#pragma once

#include "penreg/adaptive.hpp"
#include "penreg/classic.hpp"
#include "penreg/csv.hpp"
#include "penreg/errors.hpp"
#include "penreg/garrote.hpp"
#include "penreg/harness.hpp"
#include "penreg/metrics.hpp"
#include "penreg/model.hpp"
#include "penreg/rng.hpp"
#include "penreg/shrinkage.hpp"
#include "penreg/simulate.hpp"
#include "penreg/tuning.hpp"
