#pragma once

#include "l0lsq/errors.hpp"
#include "l0lsq/linalg.hpp"
#include "l0lsq/model.hpp"
#include "l0lsq/io.hpp"
#include "l0lsq/minimizers.hpp"
#include "l0lsq/enumeration.hpp"
#include "l0lsq/global_analysis.hpp"
#include "l0lsq/experiments.hpp"
