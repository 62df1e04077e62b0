#pragma once

#include "coe/causal.hpp"
#include "coe/dataset.hpp"
#include "coe/errors.hpp"
#include "coe/likelihood.hpp"
#include "coe/math.hpp"
#include "coe/model_space.hpp"
#include "coe/partition.hpp"
#include "coe/report.hpp"
#include "coe/simulate.hpp"
