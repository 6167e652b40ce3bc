#pragma once

#include "adrcm/blocks.hpp"
#include "adrcm/cliques.hpp"
#include "adrcm/count.hpp"
#include "adrcm/error.hpp"
#include "adrcm/harness.hpp"
#include "adrcm/io.hpp"
#include "adrcm/model.hpp"
#include "adrcm/parallel.hpp"
#include "adrcm/random.hpp"
#include "adrcm/run_config.hpp"
#include "adrcm/stats.hpp"
#include "adrcm/theory.hpp"
#include "adrcm/trees.hpp"
