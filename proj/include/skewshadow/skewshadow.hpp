#pragma once

// Umbrella header.

#include "skewshadow/asymptotics.hpp"
#include "skewshadow/instance_io.hpp"
#include "skewshadow/model.hpp"
#include "skewshadow/montecarlo.hpp"
#include "skewshadow/rng.hpp"
#include "skewshadow/scaled.hpp"
#include "skewshadow/shadow.hpp"
#include "skewshadow/walk.hpp"
