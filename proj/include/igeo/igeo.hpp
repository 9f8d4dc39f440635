#pragma once

#include "igeo/errors.hpp"
#include "igeo/space.hpp"
#include "igeo/measure.hpp"
#include "igeo/linalg.hpp"
#include "igeo/rng.hpp"
#include "igeo/tangent.hpp"
#include "igeo/plot.hpp"
#include "igeo/model.hpp"
#include "igeo/kernel.hpp"
#include "igeo/estimation.hpp"
