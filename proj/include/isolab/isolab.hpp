#pragma once

#include "isolab/analysis.hpp"
#include "isolab/io.hpp"
#include "isolab/iso.hpp"
#include "isolab/mc_engine.hpp"
#include "isolab/noise.hpp"
#include "isolab/rng.hpp"
#include "isolab/runner.hpp"
#include "isolab/signals.hpp"
#include "isolab/stats.hpp"
