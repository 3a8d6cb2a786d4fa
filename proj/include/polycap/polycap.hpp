#pragma once

#include "polycap/bench.hpp"
#include "polycap/errors.hpp"
#include "polycap/geometry.hpp"
#include "polycap/kinematics.hpp"
#include "polycap/loadshare.hpp"
#include "polycap/model.hpp"
#include "polycap/serialization.hpp"
#include "polycap/vertex_search.hpp"
